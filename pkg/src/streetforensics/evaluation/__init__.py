from .aggregation import aggregate_video
from .evaluator import FramePredictor, NetworkPredictor, evaluate, evaluate_records
from .matrix import ColumnCondition, MatrixSpec, RowCondition, load_matrix_spec, run_condition_matrix
from .unseen import heldout_records, run_unseen_generator_eval, training_records
from .render import ReportFormat, parse_matrix_csv, render_report
from .reference import (
    COMPRESSION_MISMATCH,
    CROSS_DATASET,
    MATCHED_ACCURACY,
    REFERENCE_TABLES,
    UNSEEN_GENERATOR_HELDOUT,
    UNSEEN_GENERATOR_MATCHED,
)

__all__ = [
    "aggregate_video",
    "FramePredictor",
    "NetworkPredictor",
    "evaluate",
    "evaluate_records",
    "ColumnCondition",
    "MatrixSpec",
    "RowCondition",
    "load_matrix_spec",
    "run_condition_matrix",
    "heldout_records",
    "run_unseen_generator_eval",
    "training_records",
    "ReportFormat",
    "parse_matrix_csv",
    "render_report",
    "COMPRESSION_MISMATCH",
    "CROSS_DATASET",
    "MATCHED_ACCURACY",
    "REFERENCE_TABLES",
    "UNSEEN_GENERATOR_HELDOUT",
    "UNSEEN_GENERATOR_MATCHED",
]
