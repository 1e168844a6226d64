"""Result record shared by every estimator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

METHODS = ("mc", "determinant", "contour", "rs_main", "oracle", "zeta")


@dataclass
class CorrelationResult:
    """A correlation value with its error estimate and provenance.

    ``error`` is a Monte Carlo standard error for ``method == "mc"`` and a
    quadrature error estimate otherwise.
    """

    value: complex
    error: float
    method: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if not self.error >= 0:
            raise ValueError("error estimate must be non-negative")
        self.value = complex(self.value)
        self.error = float(self.error)

    @property
    def real(self) -> float:
        return self.value.real

    def discrepancy(self, other: "CorrelationResult") -> float:
        """|a - b| in units of the combined error (inf if both errors vanish)."""
        diff = abs(self.value - other.value)
        scale = (self.error**2 + other.error**2) ** 0.5
        if scale == 0:
            return 0.0 if diff == 0 else float("inf")
        return diff / scale

    def to_record(self) -> str:
        """One-line JSON record with sorted keys (stable across reruns)."""
        rec = {
            "method": self.method,
            "value_re": repr(self.value.real),
            "value_im": repr(self.value.imag),
            "error": repr(float(self.error)),
            "params": self.params,
        }
        return json.dumps(rec, sort_keys=True, default=str)
