"""Single-shot conditional min- and max-entropies via semidefinite programming.

Compute H_min(A|B) and H_max(A|B) of finite-dimensional bipartite states
with certified primal/dual optimizers, together with the operational
quantities they equal: the optimal guessing probability, the maximal
singlet fraction with an explicit recovery channel, the key secrecy, and
the decoupling accuracy.  A built-in verification suite checks every
identity against independent oracles.
"""

from .channels import ChoiMatrix, MapClass, adjoint_channel, apply_channel, classify, identity_choi
from .core import (
    BipartiteState,
    CqEnsemble,
    DensityOperator,
    HermitianOperator,
    PureState,
    StateFormatError,
    cq_to_density,
    eig_hermitian,
    ensemble_from_json,
    ensemble_to_json,
    hermitian_basis,
    load_ensemble,
    load_state,
    matrix_function,
    maximally_entangled,
    partial_trace,
    purify,
    random_density,
    root_fidelity,
    save_ensemble,
    save_state,
    state_from_json,
    state_to_json,
    tensor_product,
    trace_norm,
)
from .entropy import (
    EntropyReport,
    RecoveryCertificate,
    closed_form_entropies,
    decoupling_accuracy,
    guessing_probability,
    key_secrecy,
    key_secrecy_block,
    max_entropy,
    max_relative_entropy,
    max_target_fidelity,
    min_entropy,
    report_to_json,
    singlet_fraction,
)
from .oracles import (
    OracleReport,
    fidelity_sdp,
    helstrom_guess_probability,
    min_entropy_direct_search,
    random_cptp_choi,
    sampled_singlet_fraction,
    sampled_target_fidelity,
)
from .sdp import (
    CertificateReport,
    HermitianSdp,
    SdpSolution,
    SolverError,
    check_certificate,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteState",
    "CertificateReport",
    "ChoiMatrix",
    "CqEnsemble",
    "DensityOperator",
    "EntropyReport",
    "HermitianOperator",
    "HermitianSdp",
    "MapClass",
    "OracleReport",
    "PureState",
    "RecoveryCertificate",
    "SdpSolution",
    "SolverError",
    "StateFormatError",
    "adjoint_channel",
    "apply_channel",
    "check_certificate",
    "classify",
    "closed_form_entropies",
    "cq_to_density",
    "decoupling_accuracy",
    "eig_hermitian",
    "ensemble_from_json",
    "ensemble_to_json",
    "fidelity_sdp",
    "guessing_probability",
    "helstrom_guess_probability",
    "hermitian_basis",
    "identity_choi",
    "key_secrecy",
    "key_secrecy_block",
    "load_ensemble",
    "load_state",
    "matrix_function",
    "max_entropy",
    "max_relative_entropy",
    "max_target_fidelity",
    "maximally_entangled",
    "min_entropy",
    "min_entropy_direct_search",
    "partial_trace",
    "purify",
    "random_cptp_choi",
    "report_to_json",
    "random_density",
    "root_fidelity",
    "sampled_singlet_fraction",
    "sampled_target_fidelity",
    "save_ensemble",
    "save_state",
    "singlet_fraction",
    "solve",
    "state_from_json",
    "state_to_json",
    "tensor_product",
    "trace_norm",
]
