"""Photon-counting probability distributions with phase-derivative companions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .fock import FockConfiguration, ModeLayout

NORMALIZATION_TOL = 1e-10


@dataclass
class ProbabilityDistribution:
    """Map from outcome configuration to (probability, d(probability)/d(phi)).

    ``star_present`` tags which branch of the thermal mixture the
    distribution belongs to.
    """

    layout: ModeLayout
    entries: dict[FockConfiguration, tuple[float, float]]
    star_present: bool = True

    def probability(self, config: FockConfiguration) -> float:
        return self.entries.get(config, (0.0, 0.0))[0]

    def derivative(self, config: FockConfiguration) -> float:
        return self.entries.get(config, (0.0, 0.0))[1]

    def total_probability(self) -> float:
        return math.fsum(p for p, _ in self.entries.values())

    def total_derivative(self) -> float:
        return math.fsum(d for _, d in self.entries.values())

    def check_normalization(self, tol: float = NORMALIZATION_TOL) -> None:
        total = self.total_probability()
        if abs(total - 1.0) > tol:
            raise ValidationError(f"distribution sums to {total!r}, not 1")
        dtotal = self.total_derivative()
        if abs(dtotal) > tol:
            raise ValidationError(f"derivatives sum to {dtotal!r}, not 0")
