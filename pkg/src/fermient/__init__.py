"""Fermionic Fock states under the CAR algebra, superselection checks, and
entanglement diagnostics for two-mode fermionic states."""
from .channels import (
    KrausChannel,
    apply_channel,
    erasure_channel,
    erasure_choi,
    erasure_ppt_spectrum,
    erasure_quantum_capacity,
    grassmann_output_state,
)
from .density import (
    DensityMatrix,
    Spectrum,
    outer,
    partial_trace,
    partial_transpose,
    reorder_density,
    spectrum,
    ssr_check_mixed,
    ssr_separable_two_modes,
)
from .entanglement import (
    EntanglementReport,
    RoofConfig,
    RoofConstraint,
    RoofDecomposition,
    concurrence_two_qubit,
    eof_convex_roof,
    eof_wootters,
    log_negativity,
    negativity,
    von_neumann_entropy,
)
from .fock import (
    FockVector,
    ModeOrder,
    Parity,
    SSRVerdict,
    apply_annihilation,
    apply_creation,
    braided_adjoint_signs,
    inner_product,
    parity_of,
    reorder_modes,
    ssr_check_pure,
)

__version__ = "0.1.0"
