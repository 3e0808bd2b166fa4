"""Verification reports and their byte-stable JSON / CSV serialization.

Floats are written with 17 significant digits so a parse restores them
exactly; non-finite values become ``null`` in JSON and empty cells in CSV.
Key order is fixed, and wall-clock time is only included on request, so
two runs with the same configuration and seed give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import ParameterError

FORMATS = ("json", "csv")
CHECK_FIELDS = ("name", "value", "gate", "comparison", "target", "status")
COMPARISONS = ("max", "abs-diff", "min", "reported")


def _version() -> str:
    from . import __version__
    return __version__


@dataclass
class Check:
    """One row of a report.

    ``comparison`` decides pass/fail from the gate:

    * ``max``: ``value < gate``
    * ``abs-diff``: ``|value - target| <= gate``
    * ``min``: ``value >= gate``
    * ``reported``: never gated; status is ``reported``
    """

    name: str
    value: float
    gate: Optional[float] = None
    comparison: str = "max"
    target: Optional[float] = None

    def __post_init__(self):
        if self.comparison not in COMPARISONS:
            raise ParameterError(f"unknown comparison {self.comparison!r}")
        if self.comparison != "reported" and self.gate is None:
            raise ParameterError(f"check {self.name!r} needs a gate")
        if self.comparison == "abs-diff" and self.target is None:
            raise ParameterError(f"check {self.name!r} needs a target")
        self.value = float(self.value)

    @property
    def passed(self) -> Optional[bool]:
        v = self.value
        if self.comparison == "reported":
            return None
        if not math.isfinite(v):
            return False
        if self.comparison == "max":
            return v < self.gate
        if self.comparison == "min":
            return v >= self.gate
        return abs(v - self.target) <= self.gate

    @property
    def status(self) -> str:
        p = self.passed
        return "reported" if p is None else ("pass" if p else "fail")


@dataclass
class VerificationReport:
    command: str
    config: dict
    seed: Optional[int]
    checks: list = field(default_factory=list)
    version: str = field(default_factory=_version)
    wall_time: Optional[float] = None

    def add(self, name: str, value: float, gate: Optional[float] = None,
            comparison: str = "max", target: Optional[float] = None) -> Check:
        c = Check(name, value, gate, comparison, target)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        """True iff every gated check passes (reported rows do not count)."""
        return all(c.passed is not False for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if c.passed is False]


# ---------------------------------------------------------------------------
# formatting

def format_float(v: Optional[float]) -> str:
    """17 significant digits; empty string for ``None`` or non-finite values."""
    if v is None or not math.isfinite(v):
        return ""
    return format(float(v), ".17g")


def json_value(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        s = format_float(v)
        if not s:
            return "null"
        # keep floats recognisable as floats after a round trip
        return s if any(ch in s for ch in ".en") else s + ".0"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(json_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {json_value(v[k])}"
                               for k in sorted(v)) + "}"
    if hasattr(v, "item"):            # numpy scalar
        return json_value(v.item())
    raise ParameterError(f"cannot serialize {type(v).__name__}")


def _check_dict(c: Check) -> dict:
    return {"name": c.name, "value": c.value, "gate": c.gate,
            "comparison": c.comparison, "target": c.target, "status": c.status}


def to_json(report: VerificationReport) -> str:
    lines = ["{",
             f'  "version": {json_value(report.version)},',
             f'  "command": {json_value(report.command)},',
             f'  "seed": {json_value(report.seed)},',
             f'  "config": {json_value(report.config)},',
             f'  "passed": {json_value(report.passed)},']
    if report.wall_time is not None:
        lines.append(f'  "wall_time": {json_value(report.wall_time)},')
    rows = [f"    {json_value(_check_dict(c))}" for c in report.checks]
    if rows:
        lines.append('  "checks": [\n' + ",\n".join(rows) + "\n  ]")
    else:
        lines.append('  "checks": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_csv(report: VerificationReport) -> str:
    """Header lines ``# key=value`` for metadata, then one row per check."""
    buf = io.StringIO()
    buf.write(f"# version={report.version}\n")
    buf.write(f"# command={report.command}\n")
    buf.write(f"# seed={'' if report.seed is None else report.seed}\n")
    for k in sorted(report.config):
        buf.write(f"# config.{k}={json_value(report.config[k])}\n")
    if report.wall_time is not None:
        buf.write(f"# wall_time={format_float(report.wall_time)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CHECK_FIELDS)
    for c in report.checks:
        w.writerow([c.name, format_float(c.value), format_float(c.gate), c.comparison,
                    format_float(c.target), c.status])
    return buf.getvalue()


def serialize_report(report: VerificationReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return to_json(report).encode()
    if fmt == "csv":
        return to_csv(report).encode()
    raise ParameterError(f"unknown report format {fmt!r}; use one of {FORMATS}")


# ---------------------------------------------------------------------------
# parsing

def _num(s: Any) -> Optional[float]:
    if s is None or s == "":
        return None
    return float(s)


def _from_rows(rows) -> list:
    out = []
    for r in rows:
        v = _num(r["value"])
        out.append(Check(r["name"], math.nan if v is None else v, _num(r["gate"]),
                         r["comparison"], _num(r["target"])))
    return out


def parse_report(data: bytes, fmt: str = "json") -> VerificationReport:
    text = data.decode()
    if fmt == "json":
        d = json.loads(text)
        rep = VerificationReport(d["command"], d["config"], d["seed"],
                                 _from_rows(d["checks"]), d["version"], d.get("wall_time"))
        return rep
    if fmt == "csv":
        meta, config, body = {}, {}, []
        for line in text.splitlines():
            if line.startswith("# "):
                key, _, val = line[2:].partition("=")
                if key.startswith("config."):
                    config[key[7:]] = json.loads(val)
                else:
                    meta[key] = val
            else:
                body.append(line)
        rows = list(csv.DictReader(body))
        seed = int(meta["seed"]) if meta.get("seed") else None
        wall = _num(meta.get("wall_time"))
        return VerificationReport(meta["command"], config, seed, _from_rows(rows),
                                  meta["version"], wall)
    raise ParameterError(f"unknown report format {fmt!r}; use one of {FORMATS}")
