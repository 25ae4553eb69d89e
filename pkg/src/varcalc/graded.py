"""Theta-graded densities and graded matrix differential operators.

Gradings are multi-indices ``J`` standing for ``theta^(J)``, the ``J``-th
derivative of the characteristic function of the domain.  Multiplying
graded objects adds gradings; products of theta factors are never stored.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError, SpecMismatchError
from .jet import (
    Q,
    RATIONAL_TYPES,
    DiffPoly,
    FieldSpec,
    check_same_spec,
    d_total,
    jet_gradient,
    mi_add,
    mi_below,
    mi_binom,
    mi_sign,
    mi_sub,
    total_derivative,
)


def _accumulate(target: dict, key, value: DiffPoly):
    if not value:
        return
    cur = target.get(key)
    s = value if cur is None else cur + value
    if s:
        target[key] = s
    else:
        target.pop(key, None)


def _check_keys_dims(spec: FieldSpec, *indices):
    for idx in indices:
        if len(idx) != spec.n_dims:
            raise SpecMismatchError(f"multi-index {idx} does not have {spec.n_dims} entries")


class GradedDensity:
    """Finite sum ``sum_J theta^(J) f^<J>``; stands for the local functional of its class."""

    __slots__ = ("spec", "parts")

    def __init__(self, spec: FieldSpec, parts: Mapping | None = None):
        self.spec = spec
        self.parts: dict = {}
        for J, p in (parts or {}).items():
            J = tuple(J)
            _check_keys_dims(spec, J)
            _accumulate(self.parts, J, DiffPoly.coerce(p))

    @classmethod
    def at(cls, spec: FieldSpec, p, J=None) -> "GradedDensity":
        return cls(spec, {tuple(J) if J is not None else spec.zero_index(): p})

    @classmethod
    def zero(cls, spec: FieldSpec) -> "GradedDensity":
        return cls(spec)

    def with_spec(self, spec: FieldSpec) -> "GradedDensity":
        if not spec.extends(self.spec):
            raise SpecMismatchError(f"{spec} does not extend {self.spec}")
        return GradedDensity(spec, self.parts)

    def is_zero(self) -> bool:
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def gradings(self) -> list:
        return sorted(self.parts, key=lambda J: (sum(J), J))

    def grade0(self) -> DiffPoly:
        return self.parts.get(self.spec.zero_index(), DiffPoly())

    def __eq__(self, other):
        if not isinstance(other, GradedDensity):
            return NotImplemented
        return self.spec == other.spec and self.parts == other.parts

    def __hash__(self):
        return hash((self.spec, frozenset(self.parts.items())))

    def __add__(self, other):
        check_same_spec(self, other)
        out = dict(self.parts)
        for J, p in other.parts.items():
            _accumulate(out, J, p)
        return GradedDensity._make(self.spec, out)

    def __neg__(self):
        return GradedDensity._make(self.spec, {J: -p for J, p in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "GradedDensity":
        c = Q(c)
        if not c:
            return GradedDensity(self.spec)
        return GradedDensity._make(self.spec, {J: p.scale(c) for J, p in self.parts.items()})

    def __mul__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            return self.scale(other)
        if isinstance(other, DiffPoly):
            return GradedDensity(self.spec, {J: p * other for J, p in self.parts.items()})
        if not isinstance(other, GradedDensity):
            return NotImplemented
        check_same_spec(self, other)
        out: dict = {}
        for I, p in self.parts.items():
            for J, q in other.parts.items():
                _accumulate(out, mi_add(I, J), p * q)
        return GradedDensity._make(self.spec, out)

    __rmul__ = __mul__

    @classmethod
    def _make(cls, spec, parts):
        d = cls.__new__(cls)
        d.spec = spec
        d.parts = {J: p for J, p in parts.items() if p}
        return d

    def __repr__(self):
        from .printer import format_density

        return f"GradedDensity({format_density(self)!r})"


def grading_zero_nf(d: GradedDensity) -> GradedDensity:
    """Representative supported at grading zero: ``f = sum_J (-1)^|J| D_J f^<J>``.

    Applies ``theta^(J) X -> -theta^(J-e_j) D_j X`` at the last nonzero coordinate,
    one coordinate at a time and Horner style (``f0 - D(f1 - D(f2 - ...))``), so
    cancellations between neighbouring gradings happen before differentiating.
    """
    parts = dict(d.parts)
    for j in reversed(range(d.spec.n_dims)):
        groups: dict = {}
        for J, p in parts.items():
            groups.setdefault(J[:j] + (0,) + J[j + 1:], {})[J[j]] = p
        parts = {}
        for base, col in groups.items():
            acc = DiffPoly()
            for k in range(max(col), -1, -1):
                if acc:
                    acc = -d_total(acc, j)
                if k in col:
                    acc = acc + col[k]
            if acc:
                parts[base] = acc
    return GradedDensity._make(d.spec, parts)


def densities_equivalent(a: GradedDensity, b: GradedDensity) -> bool:
    return grading_zero_nf(a - b).is_zero()


# ---------------------------------------------------------------- operators


class GradedOperator:
    """Matrix operator ``sum theta^(J) I^<J>N_AB D_N`` keyed by ``(J, A, B, N)``."""

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: FieldSpec, coeffs: Mapping | None = None):
        self.spec = spec
        self.coeffs: dict = {}
        for (J, A, B, N), p in (coeffs or {}).items():
            J, N = tuple(J), tuple(N)
            _check_keys_dims(spec, J, N)
            if not (0 <= A < spec.n_fields and 0 <= B < spec.n_fields):
                raise SpecMismatchError(f"field index out of range in {(A, B)}")
            _accumulate(self.coeffs, (J, A, B, N), DiffPoly.coerce(p))

    @classmethod
    def _make(cls, spec, coeffs):
        op = cls.__new__(cls)
        op.spec = spec
        op.coeffs = {k: p for k, p in coeffs.items() if p}
        return op

    @classmethod
    def identity(cls, spec: FieldSpec) -> "GradedOperator":
        z = spec.zero_index()
        return cls(spec, {(z, A, A, z): 1 for A in range(spec.n_fields)})

    def with_spec(self, spec: FieldSpec) -> "GradedOperator":
        if not spec.extends(self.spec):
            raise SpecMismatchError(f"{spec} does not extend {self.spec}")
        return GradedOperator(spec, self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, GradedOperator):
            return NotImplemented
        return self.spec == other.spec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.spec, frozenset(self.coeffs.items())))

    def __add__(self, other):
        check_same_spec(self, other)
        out = dict(self.coeffs)
        for k, p in other.coeffs.items():
            _accumulate(out, k, p)
        return GradedOperator._make(self.spec, out)

    def __neg__(self):
        return GradedOperator._make(self.spec, {k: -p for k, p in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "GradedOperator":
        c = Q(c)
        return GradedOperator._make(self.spec, {k: p.scale(c) for k, p in self.coeffs.items()})

    def grading_part(self, J) -> "GradedOperator":
        J = tuple(J)
        return GradedOperator._make(self.spec, {k: p for k, p in self.coeffs.items() if k[0] == J})

    def max_order(self) -> int:
        return max((sum(k[3]) for k in self.coeffs), default=0)

    def sorted_items(self) -> list:
        return sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0][0]), kv[0][0], kv[0][1], kv[0][2], -sum(kv[0][3]), tuple(-x for x in kv[0][3])))

    def __repr__(self):
        from .printer import format_operator

        return f"GradedOperator({format_operator(self)!r})"


def adjoint(op: GradedOperator) -> GradedOperator:
    """Adjoint graded operator.

    ``I*^<J>M_AB = sum_K sum_{L <= min(K,J)} (-1)^|K| C(K,L) C(K-L,M) D_{K-L-M} I^<J-L>K_BA``;
    each input term at grading ``J - L`` feeds the output grading ``J``.
    """
    out: dict = {}
    for (J0, A, B, K), c in op.coeffs.items():
        sK = mi_sign(K)
        for L in mi_below(K):
            J = mi_add(J0, L)
            bKL = mi_binom(K, L)
            KL = mi_sub(K, L)
            for M in mi_below(KL):
                coef = sK * bKL * mi_binom(KL, M)
                _accumulate(out, (J, B, A, M), total_derivative(c, mi_sub(KL, M)).scale(coef))
    return GradedOperator._make(op.spec, out)


def skew_part(op: GradedOperator) -> GradedOperator:
    return (op - adjoint(op)).scale(Q(1, 2))


def skew_defect(op: GradedOperator) -> GradedOperator:
    """``adjoint(op) + op``; zero exactly when ``op`` is skew-adjoint."""
    return adjoint(op) + op


def require_skew(op: GradedOperator):
    defect = skew_defect(op)
    if defect:
        from .printer import format_operator

        (J, A, B, N), c = defect.sorted_items()[0]
        raise PreconditionError(
            "operator is not skew-adjoint: adjoint(op) + op has nonzero coefficient "
            f"at grading {J}, entry ({op.spec.fields[A]},{op.spec.fields[B]}), D-order {N}; "
            f"defect = {format_operator(defect)}"
        )


def apply_operator(op: GradedOperator, q: Sequence[GradedDensity]) -> list:
    """``(op q)_A = sum theta^(J+J') I^<J>N_AB D_N q_B^<J'>``."""
    if len(q) != op.spec.n_fields:
        raise SpecMismatchError(f"operator on {op.spec.n_fields} fields applied to {len(q)} densities")
    for d in q:
        check_same_spec(op, d)
    out = [dict() for _ in range(op.spec.n_fields)]
    for (J, A, B, N), c in op.coeffs.items():
        for J2, p in q[B].parts.items():
            _accumulate(out[A], mi_add(J, J2), c * total_derivative(p, N))
    return [GradedDensity._make(op.spec, o) for o in out]


def operator_frechet(op: GradedOperator, eta: Sequence[GradedDensity]) -> GradedOperator:
    """Fréchet derivative of the coefficient functions along ``eta``, gradings added."""
    if len(eta) != op.spec.n_fields:
        raise SpecMismatchError(f"eta has {len(eta)} entries, expected {op.spec.n_fields}")
    for d in eta:
        check_same_spec(op, d)
    out: dict = {}
    for (J, A, B, N), c in op.coeffs.items():
        for v, dc in jet_gradient(c).items():
            for J2, p in eta[v.field].parts.items():
                _accumulate(out, (mi_add(J, J2), A, B, N), dc * total_derivative(p, v.deriv))
    return GradedOperator._make(op.spec, out)


def classical_part(op: GradedOperator) -> GradedOperator:
    """Grading-zero component: what survives when boundary terms are discarded."""
    return op.grading_part(op.spec.zero_index())


def operator_terms_by_grading(op: GradedOperator) -> dict:
    out: dict = {}
    for (J, A, B, N), c in op.coeffs.items():
        out.setdefault(J, {})[(A, B, N)] = c
    return out


def densities(spec: FieldSpec, polys: Iterable) -> list:
    """One grading-zero density per field from plain polynomials."""
    return [GradedDensity.at(spec, p) for p in polys]
