"""Report writers: human table, line-delimited JSON records and CSV."""

import json
import logging
from pathlib import Path
from typing import Optional

import pandas as pd

from .models import ExperimentReport

logger = logging.getLogger(__name__)

FORMATS = ("table", "records", "csv")
COLUMNS = ["section", "quantity", "exact", "decimal", "empirical", "samples", "verdict", "detail"]


def report_frame(report: ExperimentReport) -> pd.DataFrame:
    # object dtype keeps sample counts as ints next to missing values
    return pd.DataFrame([row.dict() for row in report.rows], columns=COLUMNS, dtype=object)


def render_table(report: ExperimentReport) -> str:
    meta = report.metadata()
    config = " ".join(f"{k}={v}" for k, v in meta["config"].items())
    header = [
        "=" * 80,
        f"📊 {report.kind}  |  {config}  |  seed={report.seed} samples={report.samples}  |  v{report.version}",
        "=" * 80,
    ]
    frame = report_frame(report).fillna("")
    body = frame.to_string(index=False) if len(frame) else "(no rows)"
    return "\n".join(header + [body]) + "\n"


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False)


def render_records(report: ExperimentReport) -> str:
    """Metadata line first, then one line per row (schema in docs/record_schema.md)"""
    lines = [_dumps({"record": "metadata", **report.metadata()})]
    lines += [_dumps({"record": "row", **row.dict()}) for row in report.rows]
    return "\n".join(lines) + "\n"


def render_csv(report: ExperimentReport) -> str:
    return report_frame(report).to_csv(index=False)


RENDERERS = {
    "table": render_table,
    "records": render_records,
    "csv": render_csv,
}


def render(report: ExperimentReport, fmt: str = "table") -> str:
    if fmt not in RENDERERS:
        raise ValueError(f"Unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    return RENDERERS[fmt](report)


def save_report(report: ExperimentReport, fmt: str, out: Optional[str]) -> str:
    """Render and, when ``out`` is given, write the text to that file"""
    text = render(report, fmt)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"✅ Report saved: {path} ({fmt}, {len(report.rows)} rows)")
    return text
