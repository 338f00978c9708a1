import csv
import io
from enum import Enum
from typing import Any, Dict, List, Sequence

import pandas as pd

from ..models import ConditionMatrix, EvalReport
from ..repositories.jsonl_repository import dump_line


class ReportFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"
    STRUCTURED = "structured"

    @classmethod
    def _missing_(cls, value: object):
        if value == "aligned_text":
            return cls.TEXT
        return None


BREAKDOWN_HEADER = ["Sub-dataset", "Quality", "Frames", "TP", "TN", "FP", "FN", "Accuracy"]


def fmt(value: float | None) -> str:
    """Two-decimal fixed point, the style of every accuracy table."""
    return "n/a" if value is None else f"{value:.2f}"


def align(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join(
        " | ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ) + "\n"


def to_csv(rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def matrix_rows(matrix: ConditionMatrix) -> List[List[str]]:
    rows = [[matrix.corner_label, *matrix.column_labels]]
    rows.extend(
        [label, *(fmt(value) for value in values)]
        for label, values in zip(matrix.row_labels, matrix.cells)
    )
    return rows


def breakdown_rows(report: EvalReport) -> List[List[str]]:
    rows = [BREAKDOWN_HEADER]
    rows.extend(
        [row.sub_dataset.value, row.quality.value, str(row.counts.total),
         str(row.counts.tp), str(row.counts.tn), str(row.counts.fp), str(row.counts.fn),
         fmt(row.accuracy)]
        for row in report.breakdown
    )
    return rows


def render_matrix(matrix: ConditionMatrix, format: ReportFormat) -> str:
    if format is ReportFormat.CSV:
        return to_csv(matrix_rows(matrix))
    if format is ReportFormat.STRUCTURED:
        header = {
            "kind": "condition_matrix",
            "title": matrix.title,
            "corner_label": matrix.corner_label,
            "rows": matrix.row_labels,
            "columns": matrix.column_labels,
        }
        lines = [dump_line(header)]
        lines.extend(
            dump_line({"row": row, "column": column, "accuracy": round(value, 2)})
            for row, values in zip(matrix.row_labels, matrix.cells)
            for column, value in zip(matrix.column_labels, values)
        )
        return "\n".join(lines) + "\n"
    text = align(matrix_rows(matrix))
    return f"{matrix.title}\n\n{text}" if matrix.title else text


def render_eval_report(report: EvalReport, format: ReportFormat) -> str:
    if format is ReportFormat.CSV:
        return to_csv(breakdown_rows(report))
    if format is ReportFormat.STRUCTURED:
        summary: Dict[str, Any] = report.model_dump(mode="json", exclude={"breakdown", "videos"})
        summary["kind"] = "eval_report"
        lines = [dump_line(summary)]
        lines.extend(dump_line({"kind": "breakdown", **row.model_dump(mode="json")}) for row in report.breakdown)
        lines.extend(dump_line({"kind": "video", **video.model_dump(mode="json")}) for video in report.videos)
        return "\n".join(lines) + "\n"

    counts = report.frame_counts
    lines = [
        f"Checkpoint: {report.checkpoint_id}",
        f"Test split: {report.split_id}",
        f"Accuracy level: {report.accuracy_level}",
        f"Frame accuracy: {fmt(report.frame_accuracy)} "
        f"(tp={counts.tp} tn={counts.tn} fp={counts.fp} fn={counts.fn})",
    ]
    for policy, accuracy in report.video_accuracy.items():
        lines.append(f"Video accuracy ({policy}): {fmt(accuracy)}")
    lines.extend(f"Note: {note}" for note in report.notes)
    return "\n".join(lines) + "\n\n" + align(breakdown_rows(report))


def render_report(report_or_matrix: EvalReport | ConditionMatrix, format: ReportFormat | str = ReportFormat.TEXT) -> str:
    """Deterministic text, csv or line-delimited JSON rendering; accuracies use two decimals."""
    format = ReportFormat(format)
    if isinstance(report_or_matrix, ConditionMatrix):
        return render_matrix(report_or_matrix, format)
    return render_eval_report(report_or_matrix, format)


def parse_matrix_csv(text: str, title: str | None = None) -> ConditionMatrix:
    """Inverse of the csv matrix rendering."""
    frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    corner = frame.columns[0]
    return ConditionMatrix(
        corner_label=corner,
        row_labels=frame[corner].tolist(),
        column_labels=list(frame.columns[1:]),
        cells=frame.iloc[:, 1:].astype(float).values.tolist(),
        title=title,
    )
