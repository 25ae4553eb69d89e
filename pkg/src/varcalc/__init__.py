"""Exact symbolic variational calculus with boundary (theta) gradings."""

__version__ = "0.1.0"

from .brackets import (
    CLASSICAL,
    EULER,
    FRECHET,
    GRADED,
    HamiltonianVerdict,
    hamiltonian_vector_field,
    is_hamiltonian,
    jacobi_residual,
    poisson_bracket,
    sn_bracket_11,
    sn_self_bracket_22,
    sn_self_trivector,
    trivector_on_differentials,
)
from .errors import (
    InvariantError,
    KindError,
    ParseError,
    PreconditionError,
    SpecMismatchError,
    VarcalcError,
)
from .graded import (
    GradedDensity,
    GradedOperator,
    adjoint,
    apply_operator,
    classical_part,
    densities_equivalent,
    grading_zero_nf,
    operator_frechet,
    skew_part,
)
from .jet import (
    DiffPoly,
    FieldSpec,
    JetVar,
    frechet,
    higher_euler,
    partial_jet,
    total_derivative,
)
from .parser import make_spec, parse_density, parse_operator, parse_tensor
from .printer import format_any, to_latex
from .tensors import (
    OneFormCanonical,
    OneVectorCanonical,
    TensorDensity,
    bivector_from_operator,
    canonicalize_one_vector,
    commutator,
    differential_of_functional,
    evolutionary_action,
    exterior_d,
    interior_product,
    lie_derivative,
    operator_from_bivector,
    pair_form_vectors,
    tensor_nf,
)
