"""CART, logistic regression and RBF-SVM behind one fit/score pair."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidArgument
from .cart import CartConfig, CartModel, cart_apply, cart_fit, cart_score
from .logreg import LogisticModel, LogregConfig, logreg_fit, logreg_score, penalized_grad, penalized_nll
from .svm import SvmConfig, SvmModel, dual_objective, rbf_kernel, svm_fit, svm_score

CLASSIFIERS = ("cart", "logreg", "svm")


@dataclass
class LearnerConfig:
    cart: CartConfig = field(default_factory=CartConfig)
    logreg: LogregConfig = field(default_factory=LogregConfig)
    svm: SvmConfig = field(default_factory=SvmConfig)


def fit(name: str, X, y, cfg: LearnerConfig | None = None):
    cfg = cfg or LearnerConfig()
    if name == "cart":
        return cart_fit(X, y, cfg.cart)
    if name == "logreg":
        return logreg_fit(X, y, cfg.logreg)
    if name == "svm":
        return svm_fit(X, y, cfg.svm)
    raise InvalidArgument(f"unknown classifier {name!r}")


def score(model, X):
    """Positive-class score; higher means more likely minority."""
    if isinstance(model, CartModel):
        return cart_score(model, X)
    if isinstance(model, LogisticModel):
        return logreg_score(model, X)
    if isinstance(model, SvmModel):
        return svm_score(model, X)
    raise InvalidArgument(f"not a fitted model: {type(model).__name__}")


def predict(model, X):
    """Hard 0/1 labels: leaf majority for CART, p > 0.5 for logistic, sign for SVM."""
    s = score(model, X)
    threshold = 0.0 if isinstance(model, SvmModel) else 0.5
    return (s > threshold).astype(int)
