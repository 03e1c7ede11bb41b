"""Magic monotones from alpha-z Renyi relative entropies.

Exact closed forms where they exist, a certificate-driven convex solver
over enumerated stabilizer polytopes everywhere else, and tooling for
additivity checks, counterexamples, and distillation-overhead bounds.
"""

from .linalg import (
    DensityMatrix,
    HermitianOperator,
    Spectrum,
    eigh,
    frac_power,
    frechet_dd,
    partial_trace,
    tensor,
)
from .divergences import (
    MIN,
    UMEGAKI,
    MAX,
    DivergenceOrder,
    DivergenceValue,
    d_az,
    d_max,
    d_max_qubit,
    d_min,
    d_umegaki,
)
from .stabilizers import (
    PauliString,
    PureStabilizer,
    StabilizerGroup,
    StabilizerProjector,
    enumerate_projectors,
    enumerate_pure,
    vector_of,
    verify_stabilizer,
    vertex_amplitudes,
)
from .certificates import CertificateReport, certificate, chi, xi
from .solver import (
    MonotoneResult,
    PolytopeWeights,
    SolverOptions,
    f0,
    f_m,
    is_stabilizer_aligned,
    polytope_membership,
    solve,
    solve_reverse,
)
from .closed_forms import (
    NamedState,
    ansatz_optimizer,
    f0_qubit,
    fidelity_qubit,
    named_noisy_monotone,
    robustness_qubit,
)
from .states import depolarize, from_bloch, named_state, parse_spec, to_bloch

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "HermitianOperator",
    "Spectrum",
    "eigh",
    "frac_power",
    "frechet_dd",
    "partial_trace",
    "tensor",
    "MIN",
    "UMEGAKI",
    "MAX",
    "DivergenceOrder",
    "DivergenceValue",
    "d_az",
    "d_max",
    "d_max_qubit",
    "d_min",
    "d_umegaki",
    "PauliString",
    "PureStabilizer",
    "StabilizerGroup",
    "StabilizerProjector",
    "enumerate_projectors",
    "enumerate_pure",
    "vector_of",
    "verify_stabilizer",
    "vertex_amplitudes",
    "CertificateReport",
    "certificate",
    "chi",
    "xi",
    "MonotoneResult",
    "PolytopeWeights",
    "SolverOptions",
    "f0",
    "f_m",
    "is_stabilizer_aligned",
    "polytope_membership",
    "solve",
    "solve_reverse",
    "NamedState",
    "ansatz_optimizer",
    "f0_qubit",
    "fidelity_qubit",
    "named_noisy_monotone",
    "robustness_qubit",
    "depolarize",
    "from_bloch",
    "named_state",
    "parse_spec",
    "to_bloch",
]
