"""qreservoir: exact desk-scale simulation of driven spin-ensemble recurrent
networks and Rydberg reservoir computers."""

__version__ = "0.1.0"

from .basis import (
    BasisKind,
    HilbertBasis,
    blockaded_chain,
    blockaded_ring,
    config_from_str,
    config_str,
    full_basis,
)
from .errors import ConfigError, QReservoirError, ToleranceError
from .operators import (
    HamiltonianProvider,
    JumpOperator,
    SpinOperator,
    build_pauli,
    expectation,
    ground_projector,
    identity_operator,
    number_operator,
    total_number,
)
from .quantum_info import (
    entanglement_entropy,
    partial_trace,
    state_fidelity,
    subsystem_entropy,
)
from .states import (
    QuantumState,
    all_ground,
    basis_state,
    embed_blockaded,
    mixed_state,
    product_state,
    pure_state,
    random_pure_state,
)
from .superop import SuperOperator, liouvillian, superop_eigendecomposition, unvec, vec
from .evolution import evolve_lindblad, evolve_unitary
