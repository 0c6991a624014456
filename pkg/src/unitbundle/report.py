"""Check records and reports rendered as JSON (canonical), CSV or text."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__


def _clean(v):
    """JSON-friendly copy: numpy scalars and arrays become Python values, non-finite floats become strings."""
    if hasattr(v, "tolist"):
        v = v.tolist()
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


@dataclass
class CheckRecord:
    """One check: ``residual`` compared against ``tol``.

    ``comparison`` is "le" (pass iff residual <= tol) or "ge" (pass iff
    residual >= tol, used for lower bounds such as negative controls).
    Records with ``overridable`` set take their tolerance from ``--tol``.
    """

    check_id: str
    equation: str
    residual: float
    tol: float
    comparison: str = "le"
    inputs: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    overridable: bool = True

    @property
    def passed(self) -> bool:
        r = float(self.residual)
        if math.isnan(r):
            return False
        return r <= self.tol if self.comparison == "le" else r >= self.tol

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "equation": self.equation,
            "inputs": _clean(self.inputs),
            "values": _clean(self.values),
            "residual": _clean(float(self.residual)),
            "tol": float(self.tol),
            "comparison": self.comparison,
            "pass": self.passed,
        }


@dataclass
class Report:
    config: dict
    checks: list[CheckRecord]
    deterministic: bool = False
    version: str = __version__

    def sorted_checks(self) -> list[CheckRecord]:
        return sorted(self.checks, key=lambda c: c.check_id)

    @property
    def summary(self) -> dict:
        passed = sum(c.passed for c in self.checks)
        return {"passed": passed, "failed": len(self.checks) - passed, "total": len(self.checks)}

    @property
    def ok(self) -> bool:
        return self.summary["failed"] == 0

    def to_dict(self) -> dict:
        out = {
            "version": self.version,
            "config": _clean(self.config),
            "checks": [c.to_dict() for c in self.sorted_checks()],
            "summary": self.summary,
        }
        if not self.deterministic:
            out["timestamp"] = datetime.now(timezone.utc).isoformat()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    CSV_HEADER = ("check_id", "equation", "residual", "tol", "comparison", "pass", "inputs", "values")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_HEADER)
        for rec in self.to_dict()["checks"]:
            w.writerow([rec["check_id"], rec["equation"], repr(rec["residual"]), repr(rec["tol"]),
                        rec["comparison"], rec["pass"],
                        json.dumps(rec["inputs"], sort_keys=True), json.dumps(rec["values"], sort_keys=True)])
        return buf.getvalue()

    def to_text(self) -> str:
        d = self.to_dict()
        lines = []
        for rec in d["checks"]:
            op = "<=" if rec["comparison"] == "le" else ">="
            status = "PASS" if rec["pass"] else "FAIL"
            line = f"{status}  {rec['check_id']:<48} residual={rec['residual']!s:<24} {op} {rec['tol']:g}"
            if isinstance(rec["values"], dict) and "label" in rec["values"]:
                line += f"  [{rec['values']['label']}]"
            lines.append(line)
        s = d["summary"]
        lines.append(f"{s['passed']} passed, {s['failed']} failed, {s['total']} total")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return {"json": self.to_json, "csv": self.to_csv, "text": self.to_text}[fmt]()
