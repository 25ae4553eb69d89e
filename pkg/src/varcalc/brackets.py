"""Schouten-Nijenhuis and Poisson brackets, Hamiltonian fields and the Hamiltonian test."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import KindError
from .graded import (
    GradedDensity,
    GradedOperator,
    _accumulate,
    classical_part,
    grading_zero_nf,
    require_skew,
    skew_defect,
    skew_part,
)
from .jet import (
    check_same_spec,
    euler_operators,
    jet_gradient,
    mi_add,
    mi_below,
    mi_binom,
    mi_sign,
    mi_sub,
    total_derivative,
)
from .tensors import (
    VECTOR,
    OneVectorCanonical,
    TensorDensity,
    bivector_from_operator,
    canonical_differential,
    canonicalize_one_vector,
    contract,
    differential_of_functional,
    evaluate_multivector,
    tensor_nf,
    variational_derivatives,
    wedge_sort,
)

GRADED = "graded"
CLASSICAL = "classical"
FRECHET = "frechet"
EULER = "euler"


def sn_bracket_11(xi: OneVectorCanonical, eta: OneVectorCanonical) -> OneVectorCanonical:
    """``[xi, eta]_SN = d xi _| eta - d eta _| xi`` for canonical 1-vectors.

    ``d xi _| eta = sum theta^(J+K) (d xi_A^<J> / d phi_B^(L)) D_L eta_B^<K> delta/delta phi_A``,
    contracting ``delta phi`` against ``eta`` by plain substitution as
    ``interior_product`` does; the result is minus the commutator.
    """
    check_same_spec(xi, eta)

    def d_contract(a, b):
        out: dict = {}
        cache: dict = {}
        for (J, A), ac in a.chars.items():
            for v, da in jet_gradient(ac).items():
                for (K, B), bc in b.chars.items():
                    if B != v.field:
                        continue
                    key = (K, B, v.deriv)
                    db = cache.get(key)
                    if db is None:
                        db = cache[key] = total_derivative(bc, v.deriv)
                    _accumulate(out, (mi_add(J, K), A), da * db)
        return out

    out = d_contract(xi, eta)
    for k, c in d_contract(eta, xi).items():
        _accumulate(out, k, -c)
    return OneVectorCanonical._make(xi.spec, out)


def sn_self_trivector(op: GradedOperator) -> TensorDensity:
    """The trivector ``sum xi_A ^ I'_AB(I xi) ^ xi_B`` before normalisation.

    The inner ``I xi`` yields derived slots; the Fréchet derivative of each
    coefficient ``I^<L>N_AB`` along it is wedged between ``xi_A`` and ``D_N xi_B``,
    with gradings added.  No skewness check: classical mode feeds it the
    grading-zero part of a skew operator.
    """
    spec = op.spec
    z = spec.zero_index()
    rows: dict = {}
    for (M, C, Dd, P), k in op.coeffs.items():
        rows.setdefault(C, []).append((M, Dd, P, k))
    dcache: dict = {}
    terms: dict = {}
    for (L, A, B, N), c in op.coeffs.items():
        for v, dc in jet_gradient(c).items():
            J = v.deriv
            for M, Dd, P, k in rows.get(v.field, ()):
                for Q in mi_below(J):
                    key = (v.field, M, Dd, P, Q)
                    dk = dcache.get(key)
                    if dk is None:
                        dk = dcache[key] = total_derivative(k, Q)
                    if not dk:
                        continue
                    slot = (Dd, mi_add(mi_sub(J, Q), P))
                    sign, s = wedge_sort(((A, z), slot, (B, N)))
                    if not sign:
                        continue
                    _accumulate(terms, (mi_add(L, M), s), (dc * dk).scale(sign * mi_binom(J, Q)))
    return TensorDensity._make(spec, VECTOR, 3, terms)


def sn_self_bracket_22(op: GradedOperator) -> TensorDensity:
    """``[Psi, Psi]_SN`` for the bivector of a skew operator, in grading-zero normal form."""
    require_skew(op)
    return tensor_nf(sn_self_trivector(op))


def poisson_bracket(op: GradedOperator, F: GradedDensity, G: GradedDensity,
                    method: str = EULER, shifted: bool = False) -> GradedDensity:
    """``{F, G}`` as a graded density (not normalised).

    ``euler``: ``sum theta^(J) D_{P+Q}(E^P_A(f) I^<J>_AB E^Q_B(g))``.
    ``frechet``: the bivector evaluated on the Fréchet-form differentials through
    the trace rule.

    With ``shifted`` the outer ``D_{P+Q}`` is traded for the grading via
    ``theta^(J) D_K X ~ (-1)^|K| theta^(J+K) X``; same class, far cheaper when the
    result is only normalised later.
    """
    check_same_spec(op, F, G)
    require_skew(op)
    return _bracket(op, F, G, method, shifted)


def _bracket(op, F, G, method, shifted=False):
    if method == FRECHET:
        psi = bivector_from_operator(op)
        return evaluate_multivector(psi, [differential_of_functional(F), differential_of_functional(G)])
    if method != EULER:
        raise ValueError(f"unknown bracket method {method!r}")
    n = op.spec.n_dims
    ef = [(I, euler_operators(f, n)) for I, f in F.parts.items()]
    eg = [(I, euler_operators(g, n)) for I, g in G.parts.items()]
    out: dict = {}
    for I2, eops in eg:
        for (B, Q), e in eops.items():
            # I^<J> applied to E^Q_B(g), row by row
            applied: dict = {}
            for (J, A, B2, N), c in op.coeffs.items():
                if B2 == B:
                    _accumulate(applied, (J, A), c * total_derivative(e, N))
            for I1, fops in ef:
                for (A, P), fe in fops.items():
                    PQ = mi_add(P, Q)
                    for (J, A2), ap in applied.items():
                        if A2 == A:
                            grade = mi_add(mi_add(I1, I2), J)
                            if shifted:
                                _accumulate(out, mi_add(grade, PQ), (fe * ap).scale(mi_sign(PQ)))
                            else:
                                _accumulate(out, grade, total_derivative(fe * ap, PQ))
    return GradedDensity._make(op.spec, out)


def hamiltonian_vector_field(op: GradedOperator, H: GradedDensity) -> OneVectorCanonical:
    """``I dH = -dH _| Psi``, returned in canonical form."""
    check_same_spec(op, H)
    psi = bivector_from_operator(op)
    return canonicalize_one_vector(-contract(canonical_differential(H), psi))


def jacobi_residual(op: GradedOperator, F: GradedDensity, G: GradedDensity, H: GradedDensity,
                    method: str = EULER) -> GradedDensity:
    """Normal form of ``{{F,G},H} + {{G,H},F} + {{H,F},G}``.

    Brackets respect the quotient by formal divergences, so inner brackets are
    re-bracketed in whatever representative is cheapest (the shifted Euler form)
    and only the cyclic sum is normalised.
    """
    check_same_spec(op, F, G, H)
    require_skew(op)
    shifted = method == EULER
    total: dict = {}
    for a, b, c in ((F, G, H), (G, H, F), (H, F, G)):
        inner = _bracket(op, a, b, method, shifted)
        if method != EULER:
            inner = grading_zero_nf(inner)
        for J, p in _bracket(op, inner, c, method, shifted).parts.items():
            _accumulate(total, J, p)
    return grading_zero_nf(GradedDensity._make(op.spec, total))


def trivector_on_differentials(t: TensorDensity, F, G, H) -> GradedDensity:
    """Normal form of ``t(dF, dG, dH)``, using canonical differentials."""
    if t.degree != 3 or t.kind != VECTOR:
        raise KindError("expected a trivector")
    forms = [canonical_differential(X) for X in (F, G, H)]
    return grading_zero_nf(evaluate_multivector(t, forms))


@dataclass
class HamiltonianVerdict:
    mode: str
    is_hamiltonian: bool
    residual: TensorDensity
    operator_used: GradedOperator
    pre_nf: TensorDensity
    skew_taken: bool = False
    variational: dict = field(default_factory=dict)


def is_hamiltonian(op: GradedOperator, mode: str = GRADED) -> HamiltonianVerdict:
    """Decide whether the skew part of ``op`` is Hamiltonian.

    graded: the normal form of ``[Psi, Psi]_SN`` must vanish.
    classical: only the grading-zero operator is kept; its trivector must be an
    ordinary total divergence, i.e. every even and odd Euler operator kills it.
    """
    skew_taken = bool(skew_defect(op))
    skew = skew_part(op) if skew_taken else op
    if mode == GRADED:
        pre = sn_self_trivector(skew)
        residual = tensor_nf(pre)
        return HamiltonianVerdict(GRADED, residual.is_zero(), residual, skew, pre, skew_taken)
    if mode == CLASSICAL:
        used = classical_part(skew)
        pre = sn_self_trivector(used)
        var = variational_derivatives(pre)
        return HamiltonianVerdict(CLASSICAL, not var, pre, used, pre, skew_taken, var)
    raise ValueError(f"unknown mode {mode!r}")


def sn_jacobi_pair(op: GradedOperator, F, G, H) -> tuple:
    """Both sides of the Jacobi/Schouten relation: ``(jacobi_residual, T(dF, dG, dH))``."""
    t = sn_self_bracket_22(op)
    return jacobi_residual(op, F, G, H), trivector_on_differentials(t, F, G, H)
