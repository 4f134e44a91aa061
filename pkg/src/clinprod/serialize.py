"""Canonical machine-readable serialization.

Both the CLI (machine mode) and the HTTP API emit exactly these bytes,
which is what makes byte-comparison between the two meaningful. Numbers
are serialized as fixed 4-decimal strings; field order is fixed.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from .analytics import PrePostReport
from .domain import MonthlyStatement, VpuLine
from .engine import Projection
from .pipeline import FeedbackView
from .store import IngestReport


def fmt(value: Optional[float]) -> Optional[str]:
    if value is None:
        return None
    return f"{value + 0.0:.4f}"  # +0.0 normalizes -0.0


def dumps(doc: Any) -> str:
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)


def line_doc(line: VpuLine) -> dict:
    return {
        "service_id": line.service_id,
        "vpu_base": fmt(line.vpu_base),
        "modifier_factor": fmt(line.modifier_factor),
        "slicer": fmt(line.slicer),
        "vpu_final": fmt(line.vpu_final),
        "trace": [
            {"rule_id": t.rule_id, "factor": fmt(t.factor), "reason": t.reason}
            for t in line.trace
        ],
        "flags": list(line.flags),
    }


def statement_doc(statement: MonthlyStatement) -> dict:
    return {
        "staff_id": statement.staff_id,
        "month": statement.month,
        "vpu_base_total": fmt(statement.vpu_base_total),
        "vpu_final_total": fmt(statement.vpu_final_total),
        "target": fmt(statement.target),
        "productivity_percentage": fmt(statement.productivity_percentage),
        "lines": [line_doc(line) for line in statement.lines],
        "flags": list(statement.flags),
    }


def projection_doc(projection: Projection) -> dict:
    return {
        "statement": statement_doc(projection.statement),
        "warnings": list(projection.warnings),
        "rejected": [
            {"service_id": sid,
             "violations": [str(v) for v in result.violations]}
            for sid, result in projection.rejected
        ],
    }


def feedback_doc(view: FeedbackView) -> dict:
    return {
        "staff_id": view.staff_id,
        "as_of": view.as_of.isoformat(),
        "month_to_date_vpu": fmt(view.month_to_date_vpu),
        "target": fmt(view.target),
        "pace": fmt(view.pace),
        "productivity_percentage": fmt(view.productivity_percentage),
        "flags": list(view.flags),
    }


def prepost_doc(report: PrePostReport) -> dict:
    return {
        "metric": report.metric,
        "baseline_month": report.baseline_month,
        "compare_month": report.compare_month,
        "n_matched": report.n_matched,
        "baseline_mean": fmt(report.baseline_mean),
        "baseline_sd": fmt(report.baseline_sd),
        "compare_mean": fmt(report.compare_mean),
        "compare_sd": fmt(report.compare_sd),
        "pct_change_of_means": fmt(report.pct_change_of_means),
        "t": fmt(report.test.t),
        "df": report.test.df,
        "p_two_sided": fmt(report.test.p_two_sided),
        "test_flags": list(report.test.flags),
    }


def ingest_report_doc(report: IngestReport) -> dict:
    return {
        "source": report.source,
        "accepted": report.accepted,
        "rejected": report.rejected,
        "rejections": [
            {"line": line_no, "reason": reason}
            for line_no, reason in report.rejections
        ],
    }
