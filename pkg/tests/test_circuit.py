import math

import numpy as np
import pytest

from photonscope.circuit import (
    CircuitSpec,
    UnitaryMatrix,
    build_qft_block,
    build_telescope_circuit,
)
from photonscope.errors import ValidationError
from photonscope.fisher import detection_distribution
from photonscope.fock import ModeLayout


def test_qft_block_is_unitary():
    for n in range(1, 7):
        q = build_qft_block(n)
        dev = np.abs(q.entries @ q.entries.conj().T - np.eye(n)).max()
        assert dev <= 1e-12


def test_qft_two_mode_convention():
    q = build_qft_block(2)
    expected = np.array([[-1.0, 1.0], [1.0, 1.0]]) / math.sqrt(2.0)
    assert np.abs(q.entries - expected).max() <= 1e-15


def test_unitary_matrix_rejects_nonunitary():
    with pytest.raises(ValidationError):
        UnitaryMatrix(np.array([[1.0, 0.0], [1.0, 1.0]], dtype=complex))


def test_spec_validation():
    layout = ModeLayout(2)
    with pytest.raises(ValidationError):
        CircuitSpec(layout, loss_probability=1.5)
    with pytest.raises(ValidationError):
        CircuitSpec(layout, loss_probability=-0.1)
    # star-photon loss is declared but not modeled
    with pytest.raises(ValidationError):
        CircuitSpec(layout, star_loss_probability=0.2)


def test_spec_derived_quantities():
    spec = CircuitSpec(ModeLayout(3), signal_phase=0.4, instrument_phase=0.3,
                       loss_probability=0.36)
    assert spec.n_photons == 3
    assert abs(spec.total_phase - 0.7) <= 1e-15
    assert abs(spec.transmissivity - 0.8) <= 1e-15


def test_telescope_circuit_unitarity():
    rng = np.random.default_rng(11)
    for n in (2, 3, 4, 5):
        layout = ModeLayout(n)
        spec = CircuitSpec(layout,
                           signal_phase=float(rng.uniform(0, 2 * math.pi)),
                           instrument_phase=float(rng.uniform(0, 2 * math.pi)),
                           loss_probability=float(rng.uniform(0, 1)))
        u, ports = build_telescope_circuit(spec)
        dev = np.abs(u.entries @ u.entries.conj().T - np.eye(u.dim)).max()
        assert dev <= 1e-12
        assert sorted(ports) == sorted(layout.input_ports)
        assert len(set(ports.values())) == n


def test_statistics_depend_on_total_phase_only():
    """Shifting signal phase into the instrument phase leaves outcomes fixed."""
    layout = ModeLayout(3)
    base = CircuitSpec(layout, signal_phase=0.9, instrument_phase=0.4,
                       loss_probability=0.3)
    shifted = CircuitSpec(layout, signal_phase=0.1, instrument_phase=1.2,
                          loss_probability=0.3)
    d1 = detection_distribution(base)
    d2 = detection_distribution(shifted)
    for config, (p1, dp1) in d1.entries.items():
        p2, dp2 = d2.entries[config]
        assert abs(p1 - p2) <= 1e-12
        assert abs(dp1 - dp2) <= 1e-12
