"""Exact output amplitudes for single-photon inputs through a unitary.

The production path evaluates matrix permanents (Ryser's inclusion-exclusion
with Gray-code updates).  :func:`oracle_distribution` is an independent
cross-check that multiplies out the product of creation-operator linear forms
symbolically and never touches the permanent code.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass, replace
from itertools import permutations

import numpy as np

from .circuit import CircuitSpec, UnitaryMatrix, build_telescope_circuit
from .distribution import ProbabilityDistribution
from .errors import DimensionLimitError, EnumerationLimitError, ValidationError
from .fock import FockConfiguration, enumerate_configurations

MAX_PERMANENT_DIM = 12
MAX_ORACLE_PHOTONS = 4


def permanent(m: np.ndarray) -> complex:
    """Exact permanent of a square complex matrix via Ryser's formula."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n > MAX_PERMANENT_DIM:
        raise DimensionLimitError(
            f"dimension {n} exceeds MAX_PERMANENT_DIM = {MAX_PERMANENT_DIM}"
        )
    if n == 0:
        return 1.0 + 0.0j
    # perm(A) = (-1)^n sum_{S subseteq cols} (-1)^|S| prod_i sum_{j in S} a_ij
    sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    gray = 0
    sign = 1  # (-1)^|S| of the current subset
    for k in range(1, 1 << n):
        next_gray = k ^ (k >> 1)
        bit = gray ^ next_gray
        j = bit.bit_length() - 1
        if next_gray & bit:
            sums += m[:, j]
        else:
            sums -= m[:, j]
        gray = next_gray
        sign = -sign
        total += sign * np.prod(sums)
    if n % 2:
        total = -total
    return complex(total)


def permanent_naive(m: np.ndarray) -> complex:
    """Brute-force permanent as a sum over all permutations (test oracle)."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    return complex(sum(
        math.prod(m[i, p[i]] for i in range(n)) for p in permutations(range(n))
    ))


def permanents_batch(mats: np.ndarray) -> np.ndarray:
    """Permanents of a stack of square matrices, shape (B, n, n) -> (B,).

    Same Ryser/Gray-code recursion as :func:`permanent`, vectorized over the
    batch axis.
    """
    mats = np.asarray(mats, dtype=complex)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValidationError(f"expected shape (B, n, n), got {mats.shape}")
    b, n, _ = mats.shape
    if n > MAX_PERMANENT_DIM:
        raise DimensionLimitError(
            f"dimension {n} exceeds MAX_PERMANENT_DIM = {MAX_PERMANENT_DIM}"
        )
    if n == 0:
        return np.ones(b, dtype=complex)
    sums = np.zeros((b, n), dtype=complex)
    total = np.zeros(b, dtype=complex)
    gray = 0
    sign = 1
    for k in range(1, 1 << n):
        next_gray = k ^ (k >> 1)
        bit = gray ^ next_gray
        j = bit.bit_length() - 1
        if next_gray & bit:
            sums += mats[:, :, j]
        else:
            sums -= mats[:, :, j]
        gray = next_gray
        sign = -sign
        total += sign * sums.prod(axis=1)
    return -total if n % 2 else total


def output_amplitude(
    u: UnitaryMatrix, input_ports: list[int], config: FockConfiguration
) -> complex:
    """Transition amplitude from single photons in `input_ports` to `config`.

    amplitude = perm(S) / sqrt(prod_j d_j!) with S the submatrix of rows
    `input_ports` and columns repeated with multiplicity d_j.
    """
    if len(config) != u.dim:
        raise ValidationError(
            f"configuration covers {len(config)} modes, unitary has {u.dim}"
        )
    if len(set(input_ports)) != len(input_ports):
        raise ValidationError("input ports must be distinct")
    if config.total != len(input_ports):
        raise ValidationError(
            f"configuration holds {config.total} photons, "
            f"expected {len(input_ports)}"
        )
    cols = [j for j, d in enumerate(config.counts) for _ in range(d)]
    sub = u.entries[np.ix_(input_ports, cols)]
    norm = math.sqrt(math.prod(math.factorial(d) for d in config.counts))
    return permanent(sub) / norm


@dataclass(frozen=True)
class AmplitudePair:
    """Output amplitude A(phi) = a0 + e^{i phi} a1 for a fixed configuration."""

    a0: complex
    a1: complex

    def amplitude(self, phi: float) -> complex:
        return self.a0 + cmath.exp(1j * phi) * self.a1

    def probability(self, phi: float) -> float:
        return abs(self.amplitude(phi)) ** 2

    def derivative(self, phi: float) -> float:
        """d|A(phi)|^2 / d phi."""
        rot = cmath.exp(1j * phi)
        return 2.0 * ((self.a0 + rot * self.a1).conjugate() * 1j * rot * self.a1).real


def split_amplitude(spec: CircuitSpec, config: FockConfiguration) -> AmplitudePair:
    """Phase-affine decomposition by two-point evaluation at phi = 0 and pi.

    The signal phase enters through exactly one linear factor of the output
    state, so A(phi) = a0 + e^{i phi} a1 holds exactly for every phi.
    """
    u0, ports = build_telescope_circuit(replace(spec, signal_phase=0.0))
    rows = list(ports.values())
    a_zero = output_amplitude(u0, rows, config)
    if not spec.star_present:
        return AmplitudePair(a_zero, 0.0 + 0.0j)
    u_pi, _ = build_telescope_circuit(replace(spec, signal_phase=math.pi))
    a_pi = output_amplitude(u_pi, rows, config)
    return AmplitudePair((a_zero + a_pi) / 2.0, (a_zero - a_pi) / 2.0)


def _expand_product(state: dict, row: np.ndarray) -> dict:
    """Apply one creation-operator linear form to a Fock-amplitude map."""
    support = np.nonzero(np.abs(row) > 0.0)[0]
    new: dict = defaultdict(complex)
    for occ, amp in state.items():
        for k in support:
            lifted = list(occ)
            lifted[k] += 1
            new[tuple(lifted)] += amp * row[k] * math.sqrt(lifted[k])
    return dict(new)


def oracle_distribution(spec: CircuitSpec) -> ProbabilityDistribution:
    """Exact output distribution by symbolic product expansion.

    Multiplies out the product of the input photons' linear forms in the
    4N-2 creation operators, applying bosonic sqrt factors, independent of
    the permanent path.  Limited to small N: monomial count grows fast.
    """
    n = spec.n_photons
    if n > MAX_ORACLE_PHOTONS:
        raise EnumerationLimitError(
            f"oracle expansion supports N <= {MAX_ORACLE_PHOTONS}, got {n}"
        )
    m = spec.layout.n_modes

    u0, ports = build_telescope_circuit(replace(spec, signal_phase=0.0))
    ground_rows = [u0.entries[ports[f"S{j}"]] for j in range(2, n + 1)]

    state = {(0,) * m: 1.0 + 0.0j}
    for row in ground_rows:
        state = _expand_product(state, row)

    if spec.star_present:
        u_pi, _ = build_telescope_circuit(replace(spec, signal_phase=math.pi))
        row0 = u0.entries[ports["S1"]]
        row_pi = u_pi.entries[ports["S1"]]
        row_a = (row0 + row_pi) / 2.0  # branch without the signal phase
        row_b = (row0 - row_pi) / 2.0  # branch carrying e^{i phi}
        state_a = _expand_product(state, row_a)
        state_b = _expand_product(state, row_b)
    else:
        state_a = state
        state_b = {}

    rot = cmath.exp(1j * spec.signal_phase)
    n_in = n if spec.star_present else n - 1
    entries = {}
    for config in enumerate_configurations(n_in, m):
        z0 = state_a.get(config.counts, 0.0 + 0.0j)
        z1 = state_b.get(config.counts, 0.0 + 0.0j)
        amp = z0 + rot * z1
        prob = abs(amp) ** 2
        deriv = 2.0 * (amp.conjugate() * 1j * rot * z1).real
        entries[config] = (prob, deriv)
    return ProbabilityDistribution(spec.layout, entries, spec.star_present)
