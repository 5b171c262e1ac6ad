"""Verdict reporting: one row per verified inequality, shared CSV schema."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field


# Flags that mark a row as informational rather than pass/fail.
SKIP_FLAGS = {"HypothesisUnmet", "DegenerateBeta", "ReportedOnly", "Degenerate"}


@dataclass
class VerdictReport:
    """A single inequality verdict.

    slack = rhs - lhs by definition; the row passes iff slack >= -tol.
    Rows carrying a skip flag are informational and never count as
    failures.
    """

    inequality_id: str
    lhs: float
    rhs: float
    tol: float
    body_id: str = ""
    density_id: str = ""
    rho: float = 0.0
    invN: float = 0.0
    resolution: str = ""
    flag: str = ""
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def skipped(self) -> bool:
        return self.flag in SKIP_FLAGS

    @property
    def passed(self) -> bool:
        if self.skipped:
            return True
        return self.slack >= -self.tol

    @property
    def status(self) -> str:
        if self.skipped:
            return "skip"
        return "pass" if self.passed else "fail"

    def __repr__(self):
        return (f"VerdictReport({self.inequality_id!r}, lhs={self.lhs:.6g}, "
                f"rhs={self.rhs:.6g}, slack={self.slack:.3g}, "
                f"tol={self.tol:.3g}, status={self.status})")


CSV_FIELDS = ["inequality_id", "body_id", "density_id", "rho", "invN",
              "resolution", "lhs", "rhs", "slack", "tol", "pass", "wall_time"]


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def verdict_rows(reports):
    """Render reports as CSV rows (list of dicts) in the shared schema."""
    rows = []
    for r in reports:
        rows.append({
            "inequality_id": r.inequality_id,
            "body_id": r.body_id,
            "density_id": r.density_id,
            "rho": _fmt(float(r.rho)),
            "invN": _fmt(float(r.invN)),
            "resolution": r.resolution,
            "lhs": _fmt(float(r.lhs)),
            "rhs": _fmt(float(r.rhs)),
            "slack": _fmt(float(r.slack)),
            "tol": _fmt(float(r.tol)),
            "pass": r.status,
            "wall_time": _fmt(float(r.wall_time)),
        })
    return rows


def write_verdicts_csv(path, reports):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in verdict_rows(reports):
            writer.writerow(row)
