"""Structured pass/fail records shared by every verification routine."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

STATUSES = ("PASS", "FAIL", "REPORT-ONLY")


def jsonable(x):
    """Convert numpy / complex values into plain JSON types.

    Complex numbers with a vanishing imaginary part become floats, others
    ``[re, im]`` pairs.  Floats are rounded to 15 significant digits so that
    reports are stable across BLAS thread counts.
    """
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        if abs(x.imag) <= 1e-14 * max(1.0, abs(x.real)):
            return jsonable(float(x.real))
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            return str(x)
        return float(f"{x:.15g}")
    return x


def digest(inputs):
    text = json.dumps(jsonable(inputs), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``margin`` is positive when the check is satisfied with room to spare;
    ``status`` is ``PASS`` iff ``margin >= 0`` unless the check is report-only.
    """

    check: str
    value: object
    oracle: object
    tolerance: float
    margin: float
    provenance: str
    status: str = ""
    inputs: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    message: str = ""
    wall_time: float = 0.0
    report_only: bool = False

    def __post_init__(self):
        if not self.status:
            if self.report_only:
                self.status = "REPORT-ONLY"
            else:
                self.status = "PASS" if np.isfinite(self.margin) and self.margin >= 0 else "FAIL"
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    @property
    def passed(self):
        return self.status != "FAIL"

    def to_dict(self):
        return jsonable({
            "check": self.check,
            "status": self.status,
            "value": self.value,
            "oracle": self.oracle,
            "tolerance": self.tolerance,
            "margin": self.margin,
            "provenance": self.provenance,
            "inputs_digest": digest(self.inputs),
            "inputs": self.inputs,
            "details": self.details,
            "message": self.message,
            "wall_time": self.wall_time,
        })


def discrepancy_report(check, value, oracle, discrepancy, tolerance, provenance, **kw):
    """Report for ``discrepancy <= tolerance``."""
    return VerificationReport(check, value, oracle, tolerance, float(tolerance - discrepancy),
                              provenance, details={"discrepancy": float(discrepancy), **kw.pop("details", {})},
                              **kw)


def failure_report(check, exc, inputs=None):
    """FAIL record for a check that raised."""
    return VerificationReport(check, None, None, 0.0, float("-inf"), "error", status="FAIL",
                              inputs=inputs or {}, message=f"{type(exc).__name__}: {exc}")
