"""Reversible quantum circuits for 1D cellular automata, with Grover-style
preimage search on a dense statevector simulator.

Compile a cell-update rule into layered reversible circuits with ancilla
uncomputation, evolve every initial state in superposition, and amplify the
amplitudes of the initial states whose evolution reaches a target pattern.
Every quantum result can be cross-checked against exhaustive classical
enumeration.
"""

from .ca import (
    FIXED_ZERO,
    GENERIC_TABLE,
    PAPER_DECOMPOSITION,
    PERIODIC,
    CaRule,
    CaState,
    EvolutionSpec,
    PreimageReport,
    build_cell_update,
    build_layer,
    build_uca,
    ca_evolve,
    ca_step,
    evolve_ints,
    preimages,
    prepare_superposition,
    step_ints,
    uca_permutation,
)
from .circuit import (
    Circuit,
    Gate,
    RegisterLayout,
    export_qct,
    h,
    inverse,
    mcx,
    parse_qct,
    x,
)
from .errors import QctParseError, ResourceError
from .grover import (
    DOUBLING,
    FIXED_K,
    PAPER_LITERAL,
    RECOMPUTE,
    GroverPlan,
    Oracle,
    SearchResult,
    TargetPattern,
    build_diffusion,
    build_oracle,
    compare_styles,
    grover_search,
    optimal_iterations,
    paper_iteration_estimate,
    prepare_phase_ancilla,
    success_probability,
)
from .statevec import (
    DEFAULT_MAX_QUBITS,
    BasisIndex,
    StateVector,
    apply_circuit,
    apply_gate,
    apply_permutation,
    from_amplitudes,
    marginal_probability,
    measure_all,
    new_basis_state,
    reduced_density_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BasisIndex",
    "CaRule",
    "CaState",
    "Circuit",
    "DEFAULT_MAX_QUBITS",
    "DOUBLING",
    "EvolutionSpec",
    "FIXED_K",
    "FIXED_ZERO",
    "GENERIC_TABLE",
    "Gate",
    "GroverPlan",
    "Oracle",
    "PAPER_DECOMPOSITION",
    "PAPER_LITERAL",
    "PERIODIC",
    "PreimageReport",
    "QctParseError",
    "RECOMPUTE",
    "RegisterLayout",
    "ResourceError",
    "SearchResult",
    "StateVector",
    "TargetPattern",
    "apply_circuit",
    "apply_gate",
    "apply_permutation",
    "build_cell_update",
    "build_diffusion",
    "build_layer",
    "build_oracle",
    "build_uca",
    "ca_evolve",
    "ca_step",
    "compare_styles",
    "evolve_ints",
    "export_qct",
    "from_amplitudes",
    "grover_search",
    "h",
    "inverse",
    "marginal_probability",
    "mcx",
    "measure_all",
    "new_basis_state",
    "optimal_iterations",
    "paper_iteration_estimate",
    "parse_qct",
    "preimages",
    "prepare_phase_ancilla",
    "prepare_superposition",
    "reduced_density_matrix",
    "step_ints",
    "success_probability",
    "uca_permutation",
    "x",
]
