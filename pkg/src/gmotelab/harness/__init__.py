"""Datasets, toy problems, cross-validated runs, report tables and the CLI."""
from .datasets import DatasetRecord, load_csv, load_keel, save_csv
from .experiment import (
    METHOD_ORDER,
    RESULT_COLUMNS,
    DatasetSource,
    ExperimentSpec,
    RunResult,
    load_spec,
    read_results,
    results_to_csv,
    run_experiment,
    spec_from_dict,
    write_results,
)
from .report import ComparisonReport, ReportTable, compare, summarize, summarize_metric
from .toys import toy_example1, toy_example2, toy_table

__all__ = [
    "METHOD_ORDER", "RESULT_COLUMNS", "ComparisonReport", "DatasetRecord", "DatasetSource",
    "ExperimentSpec", "ReportTable", "RunResult", "compare", "load_csv", "load_keel",
    "load_spec", "read_results", "results_to_csv", "run_experiment", "save_csv",
    "spec_from_dict", "summarize", "summarize_metric", "toy_example1", "toy_example2",
    "toy_table", "write_results",
]
