import json
import logging
from pathlib import Path
from typing import Union

import pandas as pd

from ..models.model import PQReport

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    ("PQ", "pq"),
    ("PQ†", "pq_dagger"),
    ("RQ", "rq"),
    ("SQ", "sq"),
    ("PQ_Th", "pq_things"),
    ("RQ_Th", "rq_things"),
    ("SQ_Th", "sq_things"),
    ("PQ_St", "pq_stuff"),
    ("RQ_St", "rq_stuff"),
    ("SQ_St", "sq_stuff"),
]


def summary_frame(report: PQReport) -> pd.DataFrame:
    """One-row frame of the headline metrics in percent."""
    row = {label: round(100.0 * getattr(report, field), 1) for label, field in SUMMARY_COLUMNS}
    return pd.DataFrame([row], index=[report.taxonomy or "all"])


def class_frame(report: PQReport) -> pd.DataFrame:
    rows = []
    for cid, q in sorted(report.per_class.items()):
        rows.append({
            "class": q.name,
            "kind": "thing" if q.is_thing else "stuff",
            "PQ": round(100.0 * q.pq, 1),
            "SQ": round(100.0 * q.sq, 1),
            "RQ": round(100.0 * q.rq, 1),
            "IoU": round(100.0 * q.semantic_iou, 1),
            "TP": q.tp,
            "FP": q.fp,
            "FN": q.fn,
            "present": q.present,
        })
    return pd.DataFrame(rows, index=[cid for cid in sorted(report.per_class)])


def format_table(report: PQReport) -> str:
    return (
        summary_frame(report).to_string()
        + "\n\n"
        + class_frame(report).to_string()
        + "\n"
    )


class ReportDAO:
    """PQ reports on disk: a JSON document and a fixed-width text table side by side."""

    @staticmethod
    def write(report: PQReport, directory: Union[str, Path], stem: str = "report") -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        json_path = directory / f"{stem}.json"
        json_path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        (directory / f"{stem}.txt").write_text(format_table(report), encoding="utf-8")
        logger.info(f"Report written to {json_path} (PQ {100.0 * report.pq:.1f})")
        return json_path

    @staticmethod
    def read(path: Union[str, Path]) -> PQReport:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Report not found: {path}")
        return PQReport.model_validate(json.loads(path.read_text(encoding="utf-8")))
