from .pipeline import (
    Gate,
    ProtocolSpec,
    add_reference_qubit,
    adjoint_gates,
    apply_gate,
    apply_gates,
    bypass_2scs,
    bypass_2scs_sine,
    bypass_4scs,
    bypass_ecs,
    encode_gates_2scs,
    encode_gates_4scs,
    lift_2scs_gates,
    lift_2scs_to_4scs,
    line_scs_pipeline,
    make_2scs,
    make_3scs,
    make_4scs,
    make_ecs,
    make_line_scs,
    pad_ancillas,
    rabi,
    rabi_strength,
    required_mode_dim,
    run_protocol,
    sine_composite_gates,
    three_scs_pipeline,
    unprotected,
)
from .conditional import (
    conditional_vacuum_filter,
    parity_branches,
    parity_corrected_filter,
)
from .dephasing_qec import ambiguity_weight, dephasing_qec, plus_minus_qubit
from .fock_runner import (
    BranchEnsemble,
    output_fidelity_fock,
    output_fidelity_fock_streaming,
    run_protocol_fock,
)
from .gaussian import (
    SqueezeParam,
    gaussian_dim,
    gaussian_ecs_density,
    gaussian_ecs_projected_mode2,
    gaussian_fidelity,
    gaussian_reduced_mode,
    r_opt_2scs,
    r_opt_ecs,
    r_opt_from_moments,
    run_gaussian,
    squeezed_mean_photon,
)
from .synthesis import (
    gate_synthesis_checks,
    jc_decomposition_distance,
    squeeze_boost_distance,
    synthetic_squeeze_distance,
)
