"""Construction of the full interferometer unitary.

Layer order (as seen by an input photon):

1. each source ``S_n`` splits 50:50 into ``(a_n, b_n)``; the star source
   ``S_1`` carries the signal phase ``e^{i phi}`` on its ``b_1`` branch,
2. the adjustable instrument phase on mode ``a_1``,
3. loss couplers mixing ``a_n <-> c_n`` and ``b_n <-> d_n`` for every
   ground pair ``n >= 2`` (the star pair bypasses loss),
4. an N-mode Fourier block on ``a_1..a_N`` and an identical one on
   ``b_1..b_N``; loss modes pass through unchanged.

The instrument phase is applied as ``e^{-i phi_inst}`` on ``a_1`` so that
detection statistics depend on the *sum* ``phi + phi_inst`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fock import ModeLayout

UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class CircuitSpec:
    """Parameters of one telescope circuit instance."""

    layout: ModeLayout
    signal_phase: float = 0.0
    instrument_phase: float = 0.0
    loss_probability: float = 0.0
    star_present: bool = True
    # star-path loss is not part of the model proper; kept as an escape
    # hatch and excluded from all acceptance checks
    star_loss_probability: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ValidationError(
                f"loss probability must be in [0, 1], got {self.loss_probability}"
            )
        if not 0.0 <= self.star_loss_probability <= 1.0:
            raise ValidationError(
                f"star loss probability must be in [0, 1], "
                f"got {self.star_loss_probability}"
            )
        if self.star_loss_probability > 0.0:
            raise ValidationError(
                "star-path loss is not supported by this circuit layout "
                "(no loss ancillas for the star mode pair)"
            )

    @property
    def n_photons(self) -> int:
        return self.layout.n_photons

    @property
    def transmissivity(self) -> float:
        return math.sqrt(1.0 - self.loss_probability)

    @property
    def total_phase(self) -> float:
        return self.signal_phase + self.instrument_phase


@dataclass(frozen=True)
class UnitaryMatrix:
    """Dense complex unitary, checked entrywise on construction."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {m.shape}")
        dev = np.abs(m @ m.conj().T - np.eye(m.shape[0])).max()
        if dev > UNITARITY_TOL:
            raise ValidationError(
                f"matrix fails unitarity check: max deviation {dev:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def build_qft_block(n: int) -> UnitaryMatrix:
    """N-mode Fourier block: entry (r, c) = omega^{(r+1)(c+1)} / sqrt(n).

    Indices effectively run from 1, so the n = 2 block is the 50:50
    beam splitter (1/sqrt(2)) [[-1, 1], [1, 1]].
    """
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    idx = np.arange(1, n + 1)
    phase = 2.0 * np.pi / n * np.outer(idx, idx)
    return UnitaryMatrix(np.exp(1j * phase) / math.sqrt(n))


def build_telescope_circuit(spec: CircuitSpec) -> tuple[UnitaryMatrix, dict[str, int]]:
    """Full circuit unitary plus the input-port -> row mapping.

    Row ``j`` of the returned matrix is the output-mode amplitude vector for
    a photon injected in mode ``j``; source ``S_n`` injects into ``a_n``.
    When the star is absent the matrix is unchanged but the port map drops
    ``S1``.
    """
    lay = spec.layout
    n = lay.n_photons
    m = lay.n_modes
    inv_sqrt2 = 1.0 / math.sqrt(2.0)

    # layer 1: source splitters, star phase on the b_1 branch
    l1 = np.eye(m, dtype=complex)
    for j in range(1, n + 1):
        a, b = lay.a_index(j), lay.b_index(j)
        phase = np.exp(1j * spec.signal_phase) if j == 1 else 1.0
        l1[a, a] = inv_sqrt2
        l1[a, b] = phase * inv_sqrt2
        l1[b, a] = inv_sqrt2
        l1[b, b] = -phase * inv_sqrt2

    # layer 2: instrument phase on a_1
    l2 = np.eye(m, dtype=complex)
    l2[lay.a_index(1), lay.a_index(1)] = np.exp(-1j * spec.instrument_phase)

    # layer 3: loss couplers for ground pairs
    l3 = np.eye(m, dtype=complex)
    eta = spec.transmissivity
    s = math.sqrt(spec.loss_probability)
    for j in range(2, n + 1):
        for det, anc in ((lay.a_index(j), lay.c_index(j)),
                         (lay.b_index(j), lay.d_index(j))):
            l3[det, det] = eta
            l3[det, anc] = s
            l3[anc, det] = -s
            l3[anc, anc] = eta

    # layer 4: Fourier blocks on each receiver
    l4 = np.eye(m, dtype=complex)
    q = build_qft_block(n).entries
    a_slice = slice(lay.a_index(1), lay.a_index(n) + 1)
    b_slice = slice(lay.b_index(1), lay.b_index(n) + 1)
    l4[a_slice, a_slice] = q
    l4[b_slice, b_slice] = q

    total = l1 @ l2 @ l3 @ l4
    first = 1 if spec.star_present else 2
    ports = {f"S{j}": lay.a_index(j) for j in range(first, n + 1)}
    return UnitaryMatrix(total), ports
