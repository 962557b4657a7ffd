"""Photon-assisted large-baseline interferometric telescope simulator."""

from .amplitudes import (
    AmplitudePair,
    oracle_distribution,
    output_amplitude,
    permanent,
    split_amplitude,
)
from .circuit import CircuitSpec, UnitaryMatrix, build_qft_block, build_telescope_circuit
from .distribution import ProbabilityDistribution
from .errors import (
    DimensionLimitError,
    EnumerationLimitError,
    InternalConsistencyError,
    ValidationError,
)
from .fisher import (
    FisherResult,
    detected_count_probability,
    detection_distribution,
    fisher_lossless,
    fisher_thermal,
    fisher_with_loss,
    loss_fisher_curve,
    thermal_fisher_curve,
)
from .fock import (
    FockConfiguration,
    ModeLayout,
    configuration_count,
    enumerate_configurations,
)
from .telescope import (
    ResolutionResult,
    TelescopeScenario,
    best_instrument_phase,
    loss_probability,
    optimize,
    resolution,
    resolution_curve,
)

__version__ = "0.1.0"
