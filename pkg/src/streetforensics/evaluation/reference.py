"""Published DeepStreets accuracies (percent, per frame).

They need the full corpus and GPU-scale training to reproduce, so they are
rendered beside fixture results for comparison and never asserted against.
"""

from ..models import ConditionMatrix

QUALITY_LABELS = ["RAW", "HQ", "LQ"]
SUB_DATASET_LABELS = ["Cityvid", "Citywcvid", "Kittivid"]

# Matched training and testing per sub-dataset and compression level.
MATCHED_ACCURACY = ConditionMatrix(
    title="Detection accuracy, matched conditions (published)",
    corner_label="Dataset\\Quality",
    row_labels=[*SUB_DATASET_LABELS, "DeepStreets"],
    column_labels=QUALITY_LABELS,
    cells=[
        [100.00, 100.00, 97.93],
        [99.76, 99.62, 99.96],
        [100.00, 100.00, 100.00],
        [99.86, 100.00, 99.19],
    ],
)

# Trained and tested on the whole corpus at different compression levels.
COMPRESSION_MISMATCH = ConditionMatrix(
    title="Compression mismatch (published)",
    corner_label="Training\\Testing",
    row_labels=QUALITY_LABELS,
    column_labels=QUALITY_LABELS,
    cells=[
        [99.89, 99.90, 95.41],
        [100.00, 100.00, 95.72],
        [99.70, 99.63, 99.19],
    ],
)

# RAW videos, trained on one sub-dataset and tested on another.
CROSS_DATASET = ConditionMatrix(
    title="Cross-dataset analysis, RAW videos (published)",
    corner_label="Training\\Testing",
    row_labels=SUB_DATASET_LABELS,
    column_labels=SUB_DATASET_LABELS,
    cells=[
        [100.00, 71.50, 88.16],
        [98.76, 99.76, 50.00],
        [50.03, 50.00, 100.00],
    ],
)

# Cityscapes reals vs Kittivid fakes: 100.00 on its own test set, 80.80 on unseen Cityvid fakes.
UNSEEN_GENERATOR_MATCHED = 100.00
UNSEEN_GENERATOR_HELDOUT = 80.80

REFERENCE_TABLES = {
    "table2": MATCHED_ACCURACY,
    "table3": COMPRESSION_MISMATCH,
    "table4": CROSS_DATASET,
}
