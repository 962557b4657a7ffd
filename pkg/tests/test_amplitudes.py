import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonscope.amplitudes import (
    AmplitudePair,
    oracle_distribution,
    output_amplitude,
    permanent,
    permanent_naive,
    permanents_batch,
    split_amplitude,
)
from photonscope.circuit import CircuitSpec, UnitaryMatrix, build_telescope_circuit
from photonscope.errors import DimensionLimitError, EnumerationLimitError, ValidationError
from photonscope.fock import FockConfiguration, ModeLayout, enumerate_configurations


def _random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_permanent_small_closed_forms():
    assert permanent(np.eye(4)) == pytest.approx(1.0)
    for n in range(1, 6):
        assert permanent(np.ones((n, n))) == pytest.approx(math.factorial(n))
    assert permanent(np.zeros((0, 0))) == pytest.approx(1.0)


def test_permanent_matches_naive():
    rng = np.random.default_rng(3)
    for n in range(1, 7):
        m = _random_complex(rng, n)
        assert permanent(m) == pytest.approx(permanent_naive(m), abs=1e-9)


def test_permanent_dimension_limit():
    with pytest.raises(DimensionLimitError):
        permanent(np.eye(13))
    with pytest.raises(ValidationError):
        permanent(np.ones((2, 3)))


def test_permanents_batch_matches_scalar():
    rng = np.random.default_rng(5)
    mats = rng.standard_normal((8, 4, 4)) + 1j * rng.standard_normal((8, 4, 4))
    batch = permanents_batch(mats)
    for k in range(8):
        assert batch[k] == pytest.approx(permanent(mats[k]), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 5))
def test_permanent_row_linearity(seed, n):
    """perm is linear in each row: scaling row 0 scales the permanent."""
    rng = np.random.default_rng(seed)
    m = _random_complex(rng, n)
    scale = complex(rng.standard_normal(), rng.standard_normal())
    scaled = m.copy()
    scaled[0] *= scale
    assert permanent(scaled) == pytest.approx(scale * permanent(m), abs=1e-9)


def test_output_amplitudes_normalize():
    """Single photons through a unitary give a normalized distribution."""
    rng = np.random.default_rng(9)
    dim = 5
    q, _ = np.linalg.qr(_random_complex(rng, dim))
    u = UnitaryMatrix(q)
    ports = [0, 2, 3]
    total = math.fsum(
        abs(output_amplitude(u, ports, cfg)) ** 2
        for cfg in enumerate_configurations(len(ports), dim)
    )
    assert total == pytest.approx(1.0, abs=1e-10)


def test_output_amplitude_validation():
    u = UnitaryMatrix(np.eye(3, dtype=complex))
    with pytest.raises(ValidationError):
        output_amplitude(u, [0, 0], FockConfiguration((1, 1, 0)))
    with pytest.raises(ValidationError):
        output_amplitude(u, [0, 1], FockConfiguration((1, 0, 0)))
    with pytest.raises(ValidationError):
        output_amplitude(u, [0], FockConfiguration((1, 0)))


def test_split_amplitude_reconstructs_phase_dependence():
    layout = ModeLayout(2)
    for phi in (0.3, 1.7, 4.4):
        spec = CircuitSpec(layout, signal_phase=phi, loss_probability=0.25)
        u, ports = build_telescope_circuit(spec)
        rows = list(ports.values())
        for cfg in enumerate_configurations(2, layout.n_modes):
            direct = output_amplitude(u, rows, cfg)
            pair = split_amplitude(spec, cfg)
            assert cmath.isclose(pair.amplitude(phi), direct, abs_tol=1e-12)


def test_amplitude_pair_derivative_matches_finite_difference():
    pair = AmplitudePair(0.3 - 0.2j, -0.1 + 0.45j)
    h = 1e-7
    for phi in (0.0, 0.8, 2.9, 5.5):
        fd = (pair.probability(phi + h) - pair.probability(phi - h)) / (2 * h)
        assert pair.derivative(phi) == pytest.approx(fd, abs=1e-7)


def test_oracle_distribution_normalized():
    layout = ModeLayout(3)
    spec = CircuitSpec(layout, signal_phase=1.1, instrument_phase=0.2,
                       loss_probability=0.4)
    dist = oracle_distribution(spec)
    assert dist.total_probability() == pytest.approx(1.0, abs=1e-10)
    assert dist.total_derivative() == pytest.approx(0.0, abs=1e-10)


def test_oracle_photon_limit():
    with pytest.raises(EnumerationLimitError):
        oracle_distribution(CircuitSpec(ModeLayout(5)))
