"""Mode bookkeeping and enumeration of photon-counting outcome configurations.

The interferometer has two receivers (R and L) with ``N`` detector modes each
(``a_1..a_N`` on R, ``b_1..b_N`` on L) plus one pair of loss ancilla modes
(``c_j``, ``d_j``) for every ground-photon pair ``j >= 2``.  The star mode
pair (``a_1``, ``b_1``) has no loss ancilla.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .errors import EnumerationLimitError, ValidationError

MAX_MODES = 64
MAX_CONFIGURATIONS = 10**7


@dataclass(frozen=True)
class ModeLayout:
    """Mode labels and index arithmetic for N photons over 4N-2 modes."""

    n_photons: int

    def __post_init__(self):
        if self.n_photons < 2:
            raise ValidationError(f"need n_photons >= 2, got {self.n_photons}")

    @property
    def n_modes(self) -> int:
        return 4 * self.n_photons - 2

    @property
    def n_detector_modes(self) -> int:
        return 2 * self.n_photons

    @property
    def n_loss_modes(self) -> int:
        return 2 * (self.n_photons - 1)

    # 1-based mode labels, matching the a/b/c/d naming above
    def a_index(self, j: int) -> int:
        if not 1 <= j <= self.n_photons:
            raise ValidationError(f"a_{j} out of range")
        return j - 1

    def b_index(self, j: int) -> int:
        if not 1 <= j <= self.n_photons:
            raise ValidationError(f"b_{j} out of range")
        return self.n_photons + j - 1

    def c_index(self, j: int) -> int:
        if not 2 <= j <= self.n_photons:
            raise ValidationError(f"c_{j} out of range")
        return 2 * self.n_photons + j - 2

    def d_index(self, j: int) -> int:
        if not 2 <= j <= self.n_photons:
            raise ValidationError(f"d_{j} out of range")
        return 3 * self.n_photons - 1 + j - 2

    @property
    def detector_modes(self) -> list[str]:
        n = self.n_photons
        return [f"a{j}" for j in range(1, n + 1)] + [f"b{j}" for j in range(1, n + 1)]

    @property
    def loss_modes(self) -> list[str]:
        n = self.n_photons
        return [f"c{j}" for j in range(2, n + 1)] + [f"d{j}" for j in range(2, n + 1)]

    @property
    def mode_labels(self) -> list[str]:
        return self.detector_modes + self.loss_modes

    @property
    def input_ports(self) -> list[str]:
        return [f"S{j}" for j in range(1, self.n_photons + 1)]


@dataclass(frozen=True)
class FockConfiguration:
    """Occupation numbers over a declared (sub)set of modes."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValidationError(f"negative occupation in {self.counts}")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, i):
        return self.counts[i]


def _check_limits(photons: int, modes: int) -> None:
    if photons < 0:
        raise EnumerationLimitError(f"photon number must be >= 0, got {photons}")
    if modes < 1:
        raise EnumerationLimitError(f"mode count must be >= 1, got {modes}")
    if modes > MAX_MODES:
        raise EnumerationLimitError(
            f"mode count {modes} exceeds MAX_MODES = {MAX_MODES}"
        )
    count = math.comb(photons + modes - 1, photons)
    if count > MAX_CONFIGURATIONS:
        raise EnumerationLimitError(
            f"configuration count {count} exceeds "
            f"MAX_CONFIGURATIONS = {MAX_CONFIGURATIONS}"
        )


def configuration_count(photons: int, modes: int) -> int:
    """Number of ways to put `photons` identical photons into `modes` modes."""
    _check_limits(photons, modes)
    return math.comb(photons + modes - 1, photons)


@lru_cache(maxsize=None)
def mode_index_array(photons: int, modes: int) -> np.ndarray:
    """All photon-to-mode assignments as sorted mode-index rows.

    Shape (n_configurations, photons).  Row order matches
    :func:`composition_array`: the corresponding occupation vectors are
    strictly increasing lexicographically.
    """
    _check_limits(photons, modes)
    combos = list(combinations_with_replacement(range(modes), photons))
    # combinations_with_replacement is lexicographic in mode indices, which
    # is lexicographically *decreasing* in occupation vectors; reverse it.
    combos.reverse()
    arr = np.array(combos, dtype=np.intp).reshape(len(combos), photons)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def composition_array(photons: int, modes: int) -> np.ndarray:
    """All occupation vectors of `photons` photons over `modes` modes.

    Shape (n_configurations, modes), rows strictly increasing
    lexicographically.
    """
    idx = mode_index_array(photons, modes)
    arr = np.zeros((idx.shape[0], modes), dtype=np.int64)
    rows = np.repeat(np.arange(idx.shape[0]), photons)
    np.add.at(arr, (rows, idx.ravel()), 1)
    arr.setflags(write=False)
    return arr


def enumerate_configurations(photons: int, modes: int) -> list[FockConfiguration]:
    """All weak compositions of `photons` into `modes` parts, lex increasing."""
    arr = composition_array(photons, modes)
    return [FockConfiguration(tuple(int(c) for c in row)) for row in arr]


@lru_cache(maxsize=None)
def factorial_products(photons: int, modes: int) -> np.ndarray:
    """prod_j d_j! for every row of composition_array(photons, modes)."""
    arr = composition_array(photons, modes)
    facts = np.array([math.factorial(k) for k in range(photons + 1)], dtype=np.float64)
    out = facts[arr].prod(axis=1)
    out.setflags(write=False)
    return out
