"""Outcome records for identity and inequality checks."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Any, Iterable


@dataclass
class CheckReport:
    """One check: compared quantities, the normalized discrepancy and its verdict.

    ``passed`` is always ``residual <= tol``.  Diagnostics carry a verdict too
    but are excluded from hard pass/fail accounting unless run strictly.
    """

    check_id: str
    anchor: str
    lhs: float | None
    rhs: float | None
    residual: float
    tol: float
    passed: bool
    diagnostic: bool = False
    grid: dict | None = None
    field_id: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def compare(cls, check_id, anchor, *, residual, tol, scale=None, lhs=None, rhs=None,
                grid=None, **kw) -> "CheckReport":
        """Build a report; with ``scale`` the residual is made relative to it.

        A zero scale with zero residual passes (both sides vanish identically).
        """
        residual = float(residual)
        if scale is not None:
            scale = float(scale)
            residual = residual / scale if scale > 0 else (0.0 if residual == 0 else math.inf)
        if math.isnan(residual):
            residual = math.inf
        if grid is not None and not isinstance(grid, dict):
            grid = grid.as_dict()
        return cls(check_id, anchor, _f(lhs), _f(rhs), residual, float(tol),
                   residual <= tol, grid=grid, **kw)

    @classmethod
    def inequality(cls, check_id, anchor, *, lhs, rhs, tol, scale=None, **kw):
        """Report for ``lhs <= rhs``; residual is the (relative) excess of lhs over rhs."""
        excess = max(float(lhs) - float(rhs), 0.0)
        if scale is None:
            scale = max(abs(float(lhs)), abs(float(rhs)))
        return cls.compare(check_id, anchor, residual=excess, scale=scale if scale else None,
                           tol=tol, lhs=lhs, rhs=rhs, **kw)

    def to_json(self) -> str:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["tol"] = self.tol
        return json.dumps(_clean(d), sort_keys=True)

    def line(self) -> str:
        mark = "PASS" if self.passed else ("WARN" if self.diagnostic else "FAIL")
        return f"{mark} {self.check_id} [{self.field_id}] residual={self.residual:.3e} tol={self.tol:.1e}"


def _f(x):
    return None if x is None else float(x)


def _clean(obj):
    if isinstance(obj, float):
        if math.isinf(obj) or math.isnan(obj):
            return repr(obj)
        return obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def summarize(reports: Iterable[CheckReport], strict: bool = False) -> dict:
    """Pass/fail counts per anchor and the overall hard verdict."""
    table: dict[str, dict[str, int]] = {}
    hard_ok = True
    for r in reports:
        row = table.setdefault(r.anchor, {"pass": 0, "fail": 0, "diagnostic_fail": 0})
        if r.passed:
            row["pass"] += 1
        elif r.diagnostic and not strict:
            row["diagnostic_fail"] += 1
        else:
            row["fail"] += 1
            hard_ok = False
    return {"anchors": table, "ok": hard_ok}
