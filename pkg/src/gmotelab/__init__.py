"""Gaussian-mixture minority oversampling and an imbalanced-learning benchmark.

Subpackages and modules, bottom up:

``numcore``     Cholesky with ridge escalation, Gaussian densities, chi-square / F tails
``gmm``         EM for full-covariance mixtures and BIC selection
``outlier``     per-component tail probabilities and outlier flags
``gmote``       fit, clean, refit and rejection-sample inliers
``resamplers``  ROS, SMOTE, Borderline, Safe-level, DBSMOTE, Cluster-SMOTE, RBO
``learners``    CART, logistic regression, RBF SVM
``evalstats``   metrics, AUC, folds, Wilcoxon signed-rank, ranks
``harness``     datasets, toy problems, experiments, reports, CLI
"""
__version__ = "0.1.0"

from .errors import GmoteLabError
from .gmm import EmConfig, GmmModel, em_fit, gmm_loglik, gmm_sample, select_by_bic
from .gmote import GmoteConfig, GmoteModel, gmote_fit, gmote_generate, gmote_oversample
from .numcore import RngStream
from .outlier import OutlierPolicy, detect_outliers, is_inlier, tail_probabilities
from .resamplers import METHODS, oversample
from .synthetic import SyntheticSet

__all__ = [
    "EmConfig", "GmmModel", "GmoteConfig", "GmoteLabError", "GmoteModel", "METHODS",
    "OutlierPolicy", "RngStream", "SyntheticSet", "__version__", "detect_outliers",
    "em_fit", "gmm_loglik", "gmm_sample", "gmote_fit", "gmote_generate",
    "gmote_oversample", "is_inlier", "oversample", "select_by_bic", "tail_probabilities",
]
