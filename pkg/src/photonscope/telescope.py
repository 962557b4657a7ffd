"""Physical-parameter layer: baselines, loss, angular resolution, optimization.

The instrument operates on-axis: the source phase is zero and the adjustable
instrument phase sets the operating point, so the Fisher information is
evaluated at phi_total = phi_inst.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fisher import fisher_thermal, thermal_fisher_curve

MICROARCSEC_PER_RAD = math.degrees(1.0) * 3600.0 * 1e6

DEFAULT_EPSILON = 0.01
DEFAULT_WAVELENGTH = 628e-9       # meters
DEFAULT_ATTENUATION_LENGTH = 1e4  # meters

# relative spread below which the phase landscape is treated as flat
FLAT_LANDSCAPE_RTOL = 1e-9

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def loss_probability(alpha: float) -> float:
    """Ground-photon loss p = 1 - e^{-alpha/2} at baseline alpha = L / L0.

    Each photon travels half the baseline, so the amplitude transmissivity
    is eta = e^{-alpha/4} and p = 1 - eta^2.
    """
    if alpha < 0.0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    return -math.expm1(-alpha / 2.0)


def transmissivity(alpha: float) -> float:
    if alpha < 0.0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    return math.exp(-alpha / 4.0)


@dataclass(frozen=True)
class TelescopeScenario:
    """Physical operating point of the two-receiver telescope."""

    n_photons: int
    alpha: float
    instrument_phase: float = 0.0
    epsilon: float = DEFAULT_EPSILON
    wavelength: float = DEFAULT_WAVELENGTH
    attenuation_length: float = DEFAULT_ATTENUATION_LENGTH

    def __post_init__(self):
        if self.n_photons < 2:
            raise ValidationError(f"need n_photons >= 2, got {self.n_photons}")
        if self.alpha < 0.0:
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")
        if self.wavelength <= 0.0 or self.attenuation_length <= 0.0:
            raise ValidationError("wavelength and attenuation length must be > 0")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValidationError(f"epsilon must be in (0, 1], got {self.epsilon}")

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def baseline(self) -> float:
        return self.alpha * self.attenuation_length

    @property
    def transmissivity(self) -> float:
        return transmissivity(self.alpha)

    @property
    def loss_probability(self) -> float:
        return loss_probability(self.alpha)


@dataclass(frozen=True)
class ResolutionResult:
    """Optimal operating point and the resolution achieved there."""

    n_photons: int
    delta_theta_min_uas: float
    alpha_opt: float
    phi_opt: float            # radians, representative in [0, pi]
    fisher_at_opt: float
    phase_flat: bool          # Fisher independent of the instrument phase
    boundary_minimum: bool    # alpha optimum pinned to the scan window edge
    curve: tuple[tuple[float, float, float, float], ...] = field(default=())
    # curve rows: (alpha, phi_opt_rad, fisher, delta_theta_uas)


def resolution(scenario: TelescopeScenario) -> float:
    """Angular resolution delta-theta in micro-arcseconds at the scenario's
    operating point; infinite when the Fisher information vanishes."""
    value = fisher_thermal(scenario.n_photons, scenario.instrument_phase,
                           scenario.loss_probability, scenario.epsilon).value
    return _delta_theta_uas(scenario.wavenumber, scenario.baseline, value)


def _delta_theta_uas(wavenumber: float, baseline: float, fisher_value: float) -> float:
    if fisher_value <= 0.0:
        return math.inf
    return MICROARCSEC_PER_RAD / (wavenumber * baseline * math.sqrt(fisher_value))


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization of a unimodal f on [a, b]."""
    c = b - (b - a) * _INV_GOLDEN
    d = a + (b - a) * _INV_GOLDEN
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * _INV_GOLDEN
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * _INV_GOLDEN
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def best_instrument_phase(
    n: int,
    p: float,
    epsilon: float,
    phi_step: float = math.pi / 360.0,
    phi_tol: float = 1e-4,
) -> tuple[float, float, bool]:
    """Maximize the thermal Fisher information over the instrument phase.

    Returns (phi_opt, fisher_max, flat).  The full period [0, 2 pi) is
    scanned; the reported phase is the representative in [0, pi] under the
    F(phi) = F(2 pi - phi) symmetry.  ``flat`` marks landscapes with no
    resolvable phase dependence, where every phase is optimal.
    """
    phis = np.arange(0.0, 2.0 * math.pi, phi_step)
    values = thermal_fisher_curve(n, p, epsilon, phis)
    vmax = float(values.max())
    i = int(values.argmax())
    # The spread is measured against the median, not the minimum: flat
    # landscapes can still dip to exactly zero at isolated degenerate phases
    # (outcome probabilities vanishing faster than their derivatives).
    spread = vmax - float(np.median(values))
    if spread <= FLAT_LANDSCAPE_RTOL * max(vmax, 1e-300):
        phi_flat = float(phis[i])
        if phi_flat > math.pi:
            phi_flat = 2.0 * math.pi - phi_flat
        return phi_flat, vmax, True
    lo = phis[i] - phi_step
    hi = phis[i] + phi_step

    def f(phi: float) -> float:
        return float(thermal_fisher_curve(n, p, epsilon, np.array([phi]))[0])

    phi_best, f_best = _golden_max(f, lo, hi, phi_tol)
    phi_best %= 2.0 * math.pi
    if phi_best > math.pi:
        phi_best = 2.0 * math.pi - phi_best
        f_best = f(phi_best)
    return phi_best, f_best, False


def _evaluate_alpha(args) -> tuple[float, float, float, float, bool]:
    n, alpha, epsilon, wavenumber, attenuation_length, phi_step, phi_tol = args
    p = loss_probability(alpha)
    phi_opt, f_opt, flat = best_instrument_phase(n, p, epsilon, phi_step, phi_tol)
    dtheta = _delta_theta_uas(wavenumber, alpha * attenuation_length, f_opt)
    return alpha, phi_opt, f_opt, dtheta, flat


def resolution_curve(
    n: int,
    epsilon: float = DEFAULT_EPSILON,
    wavelength: float = DEFAULT_WAVELENGTH,
    attenuation_length: float = DEFAULT_ATTENUATION_LENGTH,
    alphas=None,
    workers: int = 1,
) -> list[tuple[float, float, float, float]]:
    """delta-theta(alpha) at the per-alpha optimal instrument phase.

    Rows are (alpha, phi_opt_rad, fisher, delta_theta_uas), ordered by alpha.
    """
    if alphas is None:
        alphas = np.arange(1.0, 12.0 + 1e-9, 0.1)
    wavenumber = 2.0 * math.pi / wavelength
    jobs = [(n, float(a), epsilon, wavenumber, attenuation_length,
             math.pi / 360.0, 1e-4) for a in alphas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_alpha, jobs))
    else:
        results = [_evaluate_alpha(job) for job in jobs]
    return [(a, phi, f, d) for a, phi, f, d, _ in results]


def optimize(
    n: int,
    epsilon: float = DEFAULT_EPSILON,
    wavelength: float = DEFAULT_WAVELENGTH,
    attenuation_length: float = DEFAULT_ATTENUATION_LENGTH,
    alpha_window: tuple[float, float] = (1.0, 10.0),
    alpha_step: float = 0.05,
    alpha_tol: float = 1e-3,
    phi_step: float = math.pi / 360.0,
    phi_tol: float = 1e-4,
    collect_curve: bool = False,
    workers: int = 1,
) -> ResolutionResult:
    """Minimize delta-theta over the baseline, re-optimizing the instrument
    phase at every baseline sample.

    Coarse grids (alpha_step, phi_step) locate the optimum; golden-section
    refinement tightens it to alpha_tol / phi_tol.  Grid ties break toward
    smaller alpha.
    """
    lo, hi = alpha_window
    if not 0.0 < lo < hi or hi > 20.0:
        raise ValidationError(f"alpha window must satisfy 0 < lo < hi <= 20, "
                              f"got {alpha_window}")
    if not 0.0 < epsilon <= 1.0:
        raise ValidationError(f"epsilon must be in (0, 1], got {epsilon}")
    wavenumber = 2.0 * math.pi / wavelength
    alphas = np.arange(lo, hi + alpha_step / 2.0, alpha_step)
    jobs = [(n, float(a), epsilon, wavenumber, attenuation_length,
             phi_step, phi_tol) for a in alphas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            coarse = list(pool.map(_evaluate_alpha, jobs))
    else:
        coarse = [_evaluate_alpha(job) for job in jobs]

    dthetas = [row[3] for row in coarse]
    i = int(np.argmin(dthetas))  # first minimum: ties go to smaller alpha
    boundary = i == 0 or i == len(coarse) - 1

    if boundary:
        alpha_best = coarse[i][0]
    else:
        def g(alpha: float) -> float:
            return -_evaluate_alpha(
                (n, alpha, epsilon, wavenumber, attenuation_length,
                 phi_step, phi_tol))[3]

        alpha_best, _ = _golden_max(g, coarse[i - 1][0], coarse[i + 1][0],
                                    alpha_tol)
    alpha_f, phi_f, fisher_f, dtheta_f, flat = _evaluate_alpha(
        (n, alpha_best, epsilon, wavenumber, attenuation_length,
         phi_step, phi_tol))

    curve = tuple((a, phi, f, d) for a, phi, f, d, _ in coarse) \
        if collect_curve else ()
    return ResolutionResult(
        n_photons=n,
        delta_theta_min_uas=dtheta_f,
        alpha_opt=alpha_f,
        phi_opt=phi_f,
        fisher_at_opt=fisher_f,
        phase_flat=flat,
        boundary_minimum=boundary,
        curve=curve,
    )
