"""Structured experiment reports (JSON round-trippable)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

STATUSES = ("pass", "fail", "not-applicable", "diagnostic")


def _clean(value: Any) -> Any:
    # numpy scalars/arrays and Fractions become plain JSON values
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, Fraction):
        return float(value)
    if hasattr(value, "tolist"):
        return _clean(value.tolist())
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return str(value)


@dataclass
class ExperimentReport:
    name: str
    status: str
    quantities: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    mode: str = "exact"
    notes: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "name": self.name,
            "status": self.status,
            "mode": self.mode,
            "params": _clean(self.params),
            "quantities": _clean(self.quantities),
            "notes": list(self.notes),
            "config": _clean(self.config),
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(
            name=d["name"],
            status=d["status"],
            quantities=d.get("quantities", {}),
            params=d.get("params", {}),
            mode=d.get("mode", "exact"),
            notes=list(d.get("notes", [])),
            config=d.get("config", {}),
            wall_time=d.get("wall_time", 0.0),
        )


def inequality_report(name: str, lhs: float, rhs: float, tol: float, *, params=None,
                      mode="exact", notes=None, **extra) -> ExperimentReport:
    """Report for ``lhs <= rhs + tol``; raw sides are kept so the verdict is recomputable."""
    q = {"lhs": lhs, "rhs": rhs, "tol": tol}
    q.update(extra)
    return ExperimentReport(
        name=name,
        status="pass" if lhs <= rhs + tol else "fail",
        quantities=q,
        params=dict(params or {}),
        mode=mode,
        notes=list(notes or []),
    )
