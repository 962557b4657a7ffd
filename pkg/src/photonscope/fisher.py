"""Detection distributions and classical Fisher information.

Probabilities are assembled once per (N, loss, star-present) as phase
coefficient tables: every detector outcome d has

    P_d(phi) = c0_d + 2 Re(c1_d e^{i phi}),
    dP_d/dphi = 2 Re(i c1_d e^{i phi}),

with c0, c1 summed over all loss-mode configurations.  Fisher evaluations at
any phase are then cheap, which the baseline optimizer relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .amplitudes import permanents_batch
from .circuit import CircuitSpec, build_telescope_circuit
from .distribution import ProbabilityDistribution
from .errors import InternalConsistencyError, ValidationError
from .fock import (
    FockConfiguration,
    ModeLayout,
    composition_array,
    factorial_products,
    mode_index_array,
)

PROB_FLOOR = 1e-14
DECOMPOSITION_TOL = 1e-10


@dataclass(frozen=True)
class PhaseBlock:
    """Coefficient table for all outcomes with a fixed detected count D."""

    detected: int
    det_counts: np.ndarray  # (nd, 2N) occupation vectors, lex increasing
    c0: np.ndarray          # (nd,) real
    c1: np.ndarray          # (nd,) complex

    def probabilities(self, phi: float) -> np.ndarray:
        rot = np.exp(1j * phi)
        return self.c0 + 2.0 * (self.c1 * rot).real

    def derivatives(self, phi: float) -> np.ndarray:
        rot = np.exp(1j * phi)
        return 2.0 * (1j * self.c1 * rot).real


@dataclass(frozen=True)
class PhaseTables:
    n_photons: int
    loss_probability: float
    star_present: bool
    blocks: tuple[PhaseBlock, ...]


@dataclass(frozen=True)
class FisherResult:
    """Fisher information with its per-detected-count decomposition."""

    value: float
    breakdown: tuple[tuple[int, float, float], ...]  # (D, q_D, F'_D)
    params: dict

    def weighted_sum(self) -> float:
        return math.fsum(q * f for _, q, f in self.breakdown)


def _batch_amplitudes(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Permanents of rows[:, cols[b]] for every batch row b."""
    mats = rows[:, cols].transpose(1, 0, 2)
    return permanents_batch(mats)


@lru_cache(maxsize=64)
def _phase_tables(n: int, p: float, star_present: bool) -> PhaseTables:
    layout = ModeLayout(n)
    spec0 = CircuitSpec(layout, signal_phase=0.0, instrument_phase=0.0,
                        loss_probability=p, star_present=star_present)
    u0, ports = build_telescope_circuit(spec0)
    port_rows = list(ports.values())
    rows0 = u0.entries[port_rows]
    if star_present:
        u_pi, _ = build_telescope_circuit(replace(spec0, signal_phase=math.pi))
        rows_pi = u_pi.entries[port_rows]
    n_in = len(port_rows)
    n_det = layout.n_detector_modes
    n_loss = layout.n_loss_modes

    blocks = []
    for detected in range(n_in + 1):
        det_idx = mode_index_array(detected, n_det)
        det_counts = composition_array(detected, n_det)
        nd = det_idx.shape[0]
        lost = n_in - detected
        if p == 0.0 and lost > 0:
            # lossless circuit never populates the ancilla modes
            blocks.append(PhaseBlock(detected, det_counts,
                                     np.zeros(nd), np.zeros(nd, dtype=complex)))
            continue
        loss_idx = mode_index_array(lost, n_loss) + n_det
        nl = loss_idx.shape[0]
        cols = np.concatenate(
            [np.broadcast_to(det_idx[:, None, :], (nd, nl, detected)),
             np.broadcast_to(loss_idx[None, :, :], (nd, nl, lost))],
            axis=2,
        ).reshape(nd * nl, n_in)
        norm_sq = (factorial_products(detected, n_det)[:, None]
                   * factorial_products(lost, n_loss)[None, :]).reshape(-1)
        a_zero = _batch_amplitudes(rows0, cols)
        if star_present:
            a_pi = _batch_amplitudes(rows_pi, cols)
            amp0 = (a_zero + a_pi) / 2.0
            amp1 = (a_zero - a_pi) / 2.0
        else:
            amp0 = a_zero
            amp1 = np.zeros_like(a_zero)
        c0 = ((np.abs(amp0) ** 2 + np.abs(amp1) ** 2) / norm_sq)
        c1 = (amp0.conj() * amp1) / norm_sq
        blocks.append(PhaseBlock(detected, det_counts,
                                 c0.reshape(nd, nl).sum(axis=1),
                                 c1.reshape(nd, nl).sum(axis=1)))
    return PhaseTables(n, p, star_present, tuple(blocks))


def detection_distribution(spec: CircuitSpec) -> ProbabilityDistribution:
    """Detector-mode outcome distribution, marginalized over loss modes.

    Keyed by configurations over the 2N detector modes, including the
    all-zero outcome.  Derivatives are with respect to the signal phase,
    evaluated at the spec's total phase.
    """
    tables = _phase_tables(spec.n_photons, spec.loss_probability,
                           spec.star_present)
    phi = spec.total_phase
    entries: dict[FockConfiguration, tuple[float, float]] = {}
    for block in tables.blocks:
        probs = block.probabilities(phi)
        derivs = block.derivatives(phi)
        for row, pr, dr in zip(block.det_counts, probs, derivs):
            cfg = FockConfiguration(tuple(int(c) for c in row))
            entries[cfg] = (float(pr), float(dr))
    return ProbabilityDistribution(spec.layout, entries, spec.star_present)


def _direct_fisher(tables: PhaseTables, phi: float) -> float:
    terms = []
    for block in tables.blocks:
        probs = block.probabilities(phi)
        derivs = block.derivatives(phi)
        mask = probs > PROB_FLOOR
        terms.extend((derivs[mask] ** 2 / probs[mask]).tolist())
    return math.fsum(terms)


def _decomposition(tables: PhaseTables, phi: float) -> list[tuple[int, float, float]]:
    """Per-detected-count (D, q_D, F'_D) from renormalized conditionals."""
    out = []
    for block in tables.blocks:
        probs = block.probabilities(phi)
        derivs = block.derivatives(phi)
        q = math.fsum(probs.tolist())
        if q <= PROB_FLOOR:
            out.append((block.detected, max(q, 0.0), 0.0))
            continue
        r = probs / q
        dr = derivs / q
        mask = r > PROB_FLOOR
        f_cond = math.fsum((dr[mask] ** 2 / r[mask]).tolist())
        out.append((block.detected, q, f_cond))
    return out


def _validate_n(n: int) -> None:
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")


def fisher_lossless(n: int, phi_total: float) -> FisherResult:
    """Fisher information of the lossless N-photon detection distribution."""
    _validate_n(n)
    tables = _phase_tables(n, 0.0, True)
    value = _direct_fisher(tables, phi_total)
    return FisherResult(value, tuple(_decomposition(tables, phi_total)),
                        {"n": n, "phi_total": phi_total, "lossless": True})


def detected_count_probability(n: int, detected: int, p: float) -> float:
    """Closed form q_D for one star photon and N-1 lossy ground photons."""
    lost = n - detected
    if detected < 1 or lost < 0:
        return 0.0
    return (1.0 - p) ** (detected - 1) * p**lost * math.comb(n - 1, lost)


def fisher_with_loss(n: int, phi_total: float, p: float) -> FisherResult:
    """Lossy Fisher information, computed directly and via the q_D/F'_D
    decomposition; the two paths must agree."""
    _validate_n(n)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"loss probability must be in [0, 1], got {p}")
    tables = _phase_tables(n, p, True)
    direct = _direct_fisher(tables, phi_total)
    breakdown = _decomposition(tables, phi_total)
    combined = math.fsum(q * f for _, q, f in breakdown)
    if abs(direct - combined) > DECOMPOSITION_TOL * (1.0 + abs(direct)):
        raise InternalConsistencyError(
            f"direct Fisher {direct!r} and decomposition {combined!r} "
            f"disagree beyond {DECOMPOSITION_TOL}"
        )
    return FisherResult(direct, tuple(breakdown),
                        {"n": n, "phi_total": phi_total, "p": p})


def loss_fisher_curve(n: int, p: float, phis: np.ndarray) -> np.ndarray:
    """Vectorized lossy (or lossless, p = 0) Fisher information on a phase grid."""
    _validate_n(n)
    tables = _phase_tables(n, p, True)
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    rot = np.exp(1j * phis)[None, :]
    total = np.zeros(phis.shape[0])
    for block in tables.blocks:
        probs = block.c0[:, None] + 2.0 * (block.c1[:, None] * rot).real
        derivs = 2.0 * (1j * block.c1[:, None] * rot).real
        mask = probs > PROB_FLOOR
        total += np.where(mask, derivs**2 / np.where(mask, probs, 1.0), 0.0).sum(axis=0)
    return total


def _thermal_blocks(n: int, p: float):
    """Aligned star-present / star-absent blocks over the common alphabet."""
    tables_b = _phase_tables(n, p, True)
    tables_a = _phase_tables(n, p, False)
    if max(np.abs(b.c1).max(initial=0.0) for b in tables_a.blocks) > 1e-12:
        raise InternalConsistencyError(
            "star-absent distribution acquired a phase dependence"
        )
    pairs = []
    for detected in range(n + 1):
        block_b = tables_b.blocks[detected]
        if detected < n:
            pa = tables_a.blocks[detected].c0
        else:
            pa = np.zeros(block_b.c0.shape[0])
        pairs.append((block_b, pa))
    return pairs


def thermal_fisher_curve(
    n: int, p: float, epsilon: float, phis: np.ndarray
) -> np.ndarray:
    """Fisher information of the thermal-source mixture on a phase grid.

    F = sum_d eps^2 (dP_B/dphi)^2 / ((1-eps) P_A + eps P_B), with P_A the
    star-absent and P_B the star-present branch.
    """
    _validate_n(n)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"loss probability must be in [0, 1], got {p}")
    if not 0.0 < epsilon <= 1.0:
        raise ValidationError(f"emission rate must be in (0, 1], got {epsilon}")
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    rot = np.exp(1j * phis)[None, :]
    total = np.zeros(phis.shape[0])
    for block_b, pa in _thermal_blocks(n, p):
        pb = block_b.c0[:, None] + 2.0 * (block_b.c1[:, None] * rot).real
        dpb = 2.0 * (1j * block_b.c1[:, None] * rot).real
        den = (1.0 - epsilon) * pa[:, None] + epsilon * pb
        mask = den > PROB_FLOOR
        if np.any(~mask & (epsilon**2 * dpb**2 > PROB_FLOOR)):
            raise InternalConsistencyError(
                "vanishing total probability with a non-vanishing derivative"
            )
        total += np.where(mask, epsilon**2 * dpb**2 / np.where(mask, den, 1.0),
                          0.0).sum(axis=0)
    return total


def fisher_thermal(n: int, phi_total: float, p: float, epsilon: float) -> FisherResult:
    """Thermal-source Fisher information with its detected-count breakdown."""
    _validate_n(n)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"loss probability must be in [0, 1], got {p}")
    if not 0.0 < epsilon <= 1.0:
        raise ValidationError(f"emission rate must be in (0, 1], got {epsilon}")
    rot = np.exp(1j * phi_total)
    terms = []
    breakdown = []
    for block_b, pa in _thermal_blocks(n, p):
        pb = block_b.c0 + 2.0 * (block_b.c1 * rot).real
        dpb = 2.0 * (1j * block_b.c1 * rot).real
        den = (1.0 - epsilon) * pa + epsilon * pb
        mask = den > PROB_FLOOR
        bad = ~mask & (epsilon**2 * dpb**2 > PROB_FLOOR)
        if np.any(bad):
            raise InternalConsistencyError(
                "vanishing total probability with a non-vanishing derivative"
            )
        block_terms = (epsilon**2 * dpb[mask] ** 2 / den[mask]).tolist()
        terms.extend(block_terms)
        q = math.fsum(den.tolist())
        f_cond = math.fsum(t / q for t in block_terms) if q > PROB_FLOOR else 0.0
        breakdown.append((block_b.detected, q, f_cond))
    return FisherResult(math.fsum(terms), tuple(breakdown),
                        {"n": n, "phi_total": phi_total, "p": p,
                         "epsilon": epsilon})
