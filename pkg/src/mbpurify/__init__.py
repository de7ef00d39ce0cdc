"""Measurement-based entanglement purification under local noise.

Closed-form purification maps on Bell-diagonal states, a dense
density-matrix oracle, measurement-based resource states and threshold
analysis.
"""

from .analysis import (
    NoisyProtocolSpec,
    asymptotic_threshold_bipartite,
    graph_fidelity_lwn,
    graph_threshold_from_qmin,
    reachable_fidelity,
    resource_fidelity_estimate,
    super_round,
    threshold,
)
from .densemat import DenseState
from .pauli import (
    FIVE_QUBIT_CODE,
    BellDiagonalState,
    PauliChannel,
    PauliString,
    StabilizerCode,
    apply_lwn_both_sides,
    apply_pauli_channel_one_sided,
    bit_flip,
    dephasing,
    lwn,
    werner,
)
from .protocols import PurificationMap, bennett_step, code_step, concat_tree, deutsch_step, get_protocol

__version__ = "0.1.0"
