"""Functional forms and multi-vectors as theta-graded wedge densities.

A :class:`TensorDensity` stores terms ``(J, slots) -> coefficient`` where
``slots`` is a strictly increasing tuple of ``(field, deriv)`` pairs.  For a
form a slot ``(A, K)`` is ``delta phi_A^(K)``; for a multi-vector it is
``D_K (delta / delta phi_A)``.  The sign of the sorting permutation is
absorbed into the coefficient and repeated slots vanish.
"""
from __future__ import annotations

from typing import Mapping, Sequence

from .errors import KindError, SpecMismatchError
from .graded import (
    GradedDensity,
    GradedOperator,
    _accumulate,
    require_skew,
    skew_part,
)
from .jet import (
    Q,
    DiffPoly,
    FieldSpec,
    check_same_spec,
    euler_operators,
    jet_gradient,
    mi_add,
    mi_below,
    mi_binom,
    mi_sign,
    mi_sub,
    partial_jet,
    total_derivative,
    d_total,
)

FORM = "form"
VECTOR = "vector"
KINDS = (FORM, VECTOR)


def _opposite(kind):
    return VECTOR if kind == FORM else FORM


def wedge_sort(slots) -> tuple:
    """Sort wedge slots; returns ``(sign, sorted_slots)`` with sign 0 for a repeated slot."""
    slots = list(slots)
    n = len(slots)
    if len(set(slots)) != n:
        return 0, None
    sign = 1
    for i in range(n):
        for j in range(i + 1, n):
            if slots[j] < slots[i]:
                sign = -sign
    return sign, tuple(sorted(slots))


class TensorDensity:
    """Theta-graded sum of coefficient times wedge monomial, of a single kind."""

    __slots__ = ("spec", "kind", "degree", "terms")

    def __init__(self, spec: FieldSpec, kind, degree: int, terms: Mapping | None = None):
        if degree < 0:
            raise ValueError("negative degree")
        if degree > 0 and kind not in KINDS:
            raise KindError(f"unknown tensor kind {kind!r}")
        self.spec = spec
        self.kind = kind if degree > 0 else None
        self.degree = degree
        self.terms: dict = {}
        for (J, slots), c in (terms or {}).items():
            J = tuple(J)
            slots = [(A, tuple(K)) for A, K in slots]
            if len(slots) != degree:
                raise KindError(f"wedge monomial {slots} in a degree-{degree} tensor")
            if len(J) != spec.n_dims or any(len(K) != spec.n_dims for _, K in slots):
                raise SpecMismatchError("multi-index of wrong length in tensor term")
            sign, key = wedge_sort(slots)
            if sign:
                _accumulate(self.terms, (J, key), DiffPoly.coerce(c).scale(sign))

    @classmethod
    def _make(cls, spec, kind, degree, terms):
        t = cls.__new__(cls)
        t.spec = spec
        t.kind = kind if degree > 0 else None
        t.degree = degree
        t.terms = {k: c for k, c in terms.items() if c}
        return t

    @classmethod
    def from_density(cls, d: GradedDensity) -> "TensorDensity":
        return cls._make(d.spec, None, 0, {(J, ()): p for J, p in d.parts.items()})

    def to_density(self) -> GradedDensity:
        if self.degree != 0:
            raise KindError(f"degree-{self.degree} tensor is not a density")
        return GradedDensity(self.spec, {J: c for (J, _), c in self.terms.items()})

    def with_spec(self, spec: FieldSpec) -> "TensorDensity":
        if not spec.extends(self.spec):
            raise SpecMismatchError(f"{spec} does not extend {self.spec}")
        return TensorDensity._make(spec, self.kind, self.degree, self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _compatible(self, other):
        check_same_spec(self, other)
        if self.degree != other.degree or self.kind != other.kind:
            raise KindError(
                f"cannot combine degree-{self.degree} {self.kind} with degree-{other.degree} {other.kind}"
            )

    def __eq__(self, other):
        if not isinstance(other, TensorDensity):
            return NotImplemented
        return (self.spec, self.kind, self.degree, self.terms) == (
            other.spec, other.kind, other.degree, other.terms)

    def __hash__(self):
        return hash((self.spec, self.kind, self.degree, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, TensorDensity) and other.is_zero() and other.degree != self.degree:
            return self
        self._compatible(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(out, k, c)
        return TensorDensity._make(self.spec, self.kind, self.degree, out)

    def __neg__(self):
        return TensorDensity._make(self.spec, self.kind, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TensorDensity":
        c = Q(c)
        return TensorDensity._make(self.spec, self.kind, self.degree,
                                   {k: v.scale(c) for k, v in self.terms.items()})

    def sorted_items(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0][0]), kv[0][0], kv[0][1]))

    def gradings(self) -> set:
        return {J for J, _ in self.terms}

    def __repr__(self):
        from .printer import format_tensor

        return f"TensorDensity({self.kind}, {self.degree}, {format_tensor(self)!r})"


def zero_tensor(spec, kind, degree) -> TensorDensity:
    return TensorDensity._make(spec, kind, degree, {})


# ---------------------------------------------------------------- characteristics


class _Characteristic:
    """Canonical 1-tensor: every slot underived, grading and field keyed coefficients."""

    kind: str = ""
    __slots__ = ("spec", "chars")

    def __init__(self, spec: FieldSpec, chars: Mapping | None = None):
        self.spec = spec
        self.chars: dict = {}
        for (J, A), c in (chars or {}).items():
            J = tuple(J)
            if len(J) != spec.n_dims:
                raise SpecMismatchError(f"grading {J} does not have {spec.n_dims} entries")
            if not 0 <= A < spec.n_fields:
                raise SpecMismatchError(f"field index {A} out of range")
            _accumulate(self.chars, (J, A), DiffPoly.coerce(c))

    @classmethod
    def _make(cls, spec, chars):
        x = cls.__new__(cls)
        x.spec = spec
        x.chars = {k: c for k, c in chars.items() if c}
        return x

    @classmethod
    def from_components(cls, spec: FieldSpec, comps: Sequence[GradedDensity]):
        """Build from one graded density per field."""
        if len(comps) != spec.n_fields:
            raise SpecMismatchError(f"need {spec.n_fields} components, got {len(comps)}")
        return cls(spec, {(J, A): p for A, d in enumerate(comps) for J, p in d.parts.items()})

    def components(self) -> list:
        out = [dict() for _ in range(self.spec.n_fields)]
        for (J, A), c in self.chars.items():
            out[A][J] = c
        return [GradedDensity(self.spec, o) for o in out]

    def with_spec(self, spec: FieldSpec):
        if not spec.extends(self.spec):
            raise SpecMismatchError(f"{spec} does not extend {self.spec}")
        return type(self)._make(spec, self.chars)

    def as_tensor(self) -> TensorDensity:
        z = self.spec.zero_index()
        return TensorDensity._make(self.spec, self.kind, 1,
                                   {(J, ((A, z),)): c for (J, A), c in self.chars.items()})

    def is_zero(self):
        return not self.chars

    def __bool__(self):
        return bool(self.chars)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.spec == other.spec and self.chars == other.chars

    def __hash__(self):
        return hash((type(self), self.spec, frozenset(self.chars.items())))

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        check_same_spec(self, other)
        out = dict(self.chars)
        for k, c in other.chars.items():
            _accumulate(out, k, c)
        return type(self)._make(self.spec, out)

    def __neg__(self):
        return type(self)._make(self.spec, {k: -c for k, c in self.chars.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Q(c)
        return type(self)._make(self.spec, {k: v.scale(c) for k, v in self.chars.items()})

    def __repr__(self):
        from .printer import format_tensor

        return f"{type(self).__name__}({format_tensor(self.as_tensor())!r})"


class OneVectorCanonical(_Characteristic):
    """Canonical 1-vector ``sum theta^(J) xi_A^<J> delta/delta phi_A``, i.e. an evolutionary field."""

    kind = VECTOR
    __slots__ = ()


class OneFormCanonical(_Characteristic):
    """Canonical 1-form ``sum theta^(J) a_A^<J> delta phi_A``."""

    kind = FORM
    __slots__ = ()


def _characteristic_class(kind):
    return OneVectorCanonical if kind == VECTOR else OneFormCanonical


# ---------------------------------------------------------------- total derivatives of tensors


def _term_d(J, slots, c, i, out: dict):
    """Accumulate D_i(c * s_1 ^ ... ^ s_m) at grading J into ``out``."""
    _accumulate(out, (J, slots), d_total(c, i))
    for k, (A, K) in enumerate(slots):
        K2 = list(K)
        K2[i] += 1
        new = slots[:k] + ((A, tuple(K2)),) + slots[k + 1:]
        sign, key = wedge_sort(new)
        if sign:
            _accumulate(out, (J, key), c.scale(sign))


def tensor_d(t: TensorDensity, i: int) -> TensorDensity:
    """Total derivative D_i of a tensor density, Leibniz over coefficient and every slot."""
    out: dict = {}
    for (J, slots), c in t.terms.items():
        _term_d(J, slots, c, i, out)
    return TensorDensity._make(t.spec, t.kind, t.degree, out)


def tensor_total_derivative(t: TensorDensity, K) -> TensorDensity:
    for i, k in enumerate(K):
        for _ in range(k):
            t = tensor_d(t, i)
    return t


def formal_divergence(t: TensorDensity, i: int) -> TensorDensity:
    """``D_i(theta^(J) X) = theta^(J+e_i) X + theta^(J) D_i X``; integrates to zero."""
    e = t.spec.unit(i)
    shifted = TensorDensity._make(t.spec, t.kind, t.degree,
                                  {(mi_add(J, e), s): c for (J, s), c in t.terms.items()})
    return shifted + tensor_d(t, i)


def tensor_nf(t: TensorDensity) -> TensorDensity:
    """Grading-zero normal form modulo formal divergences.

    Each ``theta^(J) X`` becomes ``(-1)^|J| D_J X`` at grading zero, the same as
    pushing one derivative at a time off the last nonzero coordinate of ``J``.
    """
    z = t.spec.zero_index()
    out: dict = {}
    for (J, slots), c in t.terms.items():
        if J == z:
            _accumulate(out, (z, slots), c)
            continue
        piece = TensorDensity._make(t.spec, t.kind, t.degree, {(z, slots): c})
        for i in reversed(range(len(J))):
            for _ in range(J[i]):
                piece = tensor_d(piece, i)
        sign = mi_sign(J)
        for k, v in piece.terms.items():
            _accumulate(out, k, v.scale(sign))
    return TensorDensity._make(t.spec, t.kind, t.degree, out)


def tensors_equivalent(a: TensorDensity, b: TensorDensity) -> bool:
    return tensor_nf(a - b).is_zero()


# ---------------------------------------------------------------- differentials


def differential_of_functional(F: GradedDensity) -> TensorDensity:
    """First variation ``sum theta^(J) (df^<J>/dphi_A^(K)) delta phi_A^(K)``."""
    terms: dict = {}
    for J, f in F.parts.items():
        for v, df in jet_gradient(f).items():
            _accumulate(terms, (J, ((v.field, v.deriv),)), df)
    return TensorDensity._make(F.spec, FORM, 1, terms)


def canonical_differential(F: GradedDensity) -> OneFormCanonical:
    """Differential in canonical form: ``sum theta^(J+K) (-1)^|K| E^K_A(f^<J>) delta phi_A``."""
    chars: dict = {}
    for J, f in F.parts.items():
        for (A, K), e in euler_operators(f, F.spec.n_dims).items():
            _accumulate(chars, (mi_add(J, K), A), e.scale(mi_sign(K)))
    return OneFormCanonical._make(F.spec, chars)


def exterior_d(t) -> TensorDensity:
    """Exterior differential; the new ``delta phi_A^(K)`` is wedged in front."""
    if isinstance(t, GradedDensity):
        t = TensorDensity.from_density(t)
    if t.degree > 0 and t.kind != FORM:
        raise KindError("exterior_d is defined on forms only")
    out: dict = {}
    for (J, slots), c in t.terms.items():
        for v, dc in jet_gradient(c).items():
            sign, key = wedge_sort(((v.field, v.deriv),) + slots)
            if sign:
                _accumulate(out, (J, key), dc.scale(sign))
    return TensorDensity._make(t.spec, FORM, t.degree + 1, out)


# ---------------------------------------------------------------- pairing


def _coerce_characteristic(x):
    if isinstance(x, _Characteristic):
        return x
    raise KindError(f"expected a canonical 1-form or 1-vector, got {type(x).__name__}")


def contract(one, t: TensorDensity) -> TensorDensity:
    """Interior product of a canonical 1-object into a tensor of the opposite kind.

    Slot ``i`` with derivative ``K_i`` receives ``D_{K_i}`` of the matching
    characteristic, with sign ``(-1)^(i+1)`` (slots counted from 1); gradings add.
    """
    one = _coerce_characteristic(one)
    check_same_spec(one, t)
    if t.degree == 0:
        raise KindError("cannot contract into a degree-0 density")
    if t.kind == one.kind:
        raise KindError(f"cannot contract a {one.kind} into a {t.kind}")
    by_field: dict = {}
    for (I, A), x in one.chars.items():
        by_field.setdefault(A, []).append((I, x))
    cache: dict = {}
    out: dict = {}
    for (J, slots), c in t.terms.items():
        for i, (A, K) in enumerate(slots):
            entries = by_field.get(A)
            if not entries:
                continue
            rest = slots[:i] + slots[i + 1:]
            sc = c if i % 2 == 0 else -c
            for I, x in entries:
                key = (I, A, K)
                dx = cache.get(key)
                if dx is None:
                    dx = cache[key] = total_derivative(x, K)
                _accumulate(out, (mi_add(J, I), rest), sc * dx)
    kind = t.kind if t.degree > 1 else None
    return TensorDensity._make(t.spec, kind, t.degree - 1, out)


def contract_trace(one: TensorDensity, t: TensorDensity) -> TensorDensity:
    """Interior product of an arbitrary 1-tensor by the trace rule.

    A slot ``D_L s_A`` of ``t`` paired with a term ``a D_K s'_A`` of ``one`` gives
    ``D_L(a)`` times ``D_K`` applied to the coefficient and all remaining slots.
    """
    check_same_spec(one, t)
    if one.degree != 1:
        raise KindError("contract_trace takes a 1-tensor as first argument")
    if t.degree == 0 or t.kind == one.kind:
        raise KindError(f"cannot contract a {one.kind} into a degree-{t.degree} {t.kind}")
    spec = t.spec
    z = spec.zero_index()
    kind = t.kind if t.degree > 1 else None
    by_field: dict = {}
    for (I, ((A, K),)), a in one.terms.items():
        by_field.setdefault(A, []).append((I, K, a))
    out: dict = {}
    for (J, slots), c in t.terms.items():
        for i, (A, L) in enumerate(slots):
            entries = by_field.get(A)
            if not entries:
                continue
            rest = slots[:i] + slots[i + 1:]
            sc = c if i % 2 == 0 else -c
            base = TensorDensity._make(spec, kind, t.degree - 1, {(z, rest): sc})
            for I, K, a in entries:
                dla = total_derivative(a, L)
                moved = tensor_total_derivative(base, K)
                G = mi_add(J, I)
                for (_, s), v in moved.terms.items():
                    _accumulate(out, (G, s), v * dla)
    return TensorDensity._make(spec, kind, t.degree - 1, out)


def interior_product(xi: OneVectorCanonical, alpha: TensorDensity) -> TensorDensity:
    if not isinstance(xi, OneVectorCanonical):
        raise KindError("interior_product expects a canonical 1-vector")
    if alpha.degree == 0:
        raise KindError("interior product with a degree-0 form")
    if alpha.kind != FORM:
        raise KindError("interior_product expects a form")
    return contract(xi, alpha)


def pair_form_vectors(alpha: TensorDensity, xs: Sequence[OneVectorCanonical]) -> GradedDensity:
    """``alpha(xi_1, ..., xi_m) = xi_m _| ... xi_1 _| alpha``."""
    if len(xs) != alpha.degree:
        raise KindError(f"degree-{alpha.degree} form evaluated on {len(xs)} vectors")
    t = alpha
    for x in xs:
        t = interior_product(x, t)
    return t.to_density()


def evaluate_multivector(psi: TensorDensity, forms: Sequence) -> GradedDensity:
    """Value of an m-vector on m 1-forms (canonical or general), in the given order."""
    if len(forms) != psi.degree:
        raise KindError(f"degree-{psi.degree} multi-vector evaluated on {len(forms)} forms")
    if psi.degree and psi.kind != VECTOR:
        raise KindError("evaluate_multivector expects a multi-vector")
    t = psi
    for a in forms:
        t = contract(a, t) if isinstance(a, _Characteristic) else contract_trace(a, t)
    return t.to_density()


def canonicalize_one(t: TensorDensity):
    """Integrate by parts until every slot is underived.

    ``theta^(J) c D_N s_A  ->  sum_{L<=N} (-1)^|N| C(N,L) theta^(J+L) D_{N-L}(c) s_A``.
    """
    if t.degree != 1:
        raise KindError(f"expected a 1-tensor, got degree {t.degree}")
    chars: dict = {}
    for (J, ((A, N),)), c in t.terms.items():
        sN = mi_sign(N)
        for L in mi_below(N):
            _accumulate(chars, (mi_add(J, L), A),
                        total_derivative(c, mi_sub(N, L)).scale(sN * mi_binom(N, L)))
    return _characteristic_class(t.kind)._make(t.spec, chars)


def canonicalize_one_vector(t: TensorDensity) -> OneVectorCanonical:
    if t.degree != 1 or t.kind != VECTOR:
        raise KindError(f"expected a 1-vector, got degree-{t.degree} {t.kind}")
    return canonicalize_one(t)


def canonicalize_one_form(t: TensorDensity) -> OneFormCanonical:
    if t.degree != 1 or t.kind != FORM:
        raise KindError(f"expected a 1-form, got degree-{t.degree} {t.kind}")
    return canonicalize_one(t)


# ---------------------------------------------------------------- vector fields


def evolutionary_action(xi: OneVectorCanonical, F: GradedDensity) -> GradedDensity:
    """``xi F = sum theta^(I+J) D_K xi_A^<J> df^<I>/dphi_A^(K)``."""
    check_same_spec(xi, F)
    cache: dict = {}
    out: dict = {}
    for I, f in F.parts.items():
        for v, df in jet_gradient(f).items():
            for (J, A), x in xi.chars.items():
                if A != v.field:
                    continue
                key = (J, A, v.deriv)
                dx = cache.get(key)
                if dx is None:
                    dx = cache[key] = total_derivative(x, v.deriv)
                _accumulate(out, mi_add(I, J), dx * df)
    return GradedDensity._make(F.spec, out)


def commutator(xi: OneVectorCanonical, eta: OneVectorCanonical) -> OneVectorCanonical:
    """Characteristic of ``[xi, eta] = xi eta - eta xi``."""
    check_same_spec(xi, eta)

    def half(a, b):
        # sum D_L a_B^<I> d b_A^<J'> / d phi_B^(L), at grading I + J'
        out: dict = {}
        cache: dict = {}
        for (Jb, A), bc in b.chars.items():
            for v, db in jet_gradient(bc).items():
                for (I, B), ac in a.chars.items():
                    if B != v.field:
                        continue
                    key = (I, B, v.deriv)
                    da = cache.get(key)
                    if da is None:
                        da = cache[key] = total_derivative(ac, v.deriv)
                    _accumulate(out, (mi_add(I, Jb), A), da * db)
        return out

    out = half(xi, eta)
    for k, c in half(eta, xi).items():
        _accumulate(out, k, -c)
    return OneVectorCanonical._make(xi.spec, out)


def lie_derivative(xi: OneVectorCanonical, alpha) -> TensorDensity:
    """Cartan formula ``L_xi alpha = xi _| d alpha + d(xi _| alpha)``."""
    if isinstance(alpha, GradedDensity):
        alpha = TensorDensity.from_density(alpha)
    if alpha.degree > 0 and alpha.kind != FORM:
        raise KindError("Lie derivative is implemented for forms")
    out = interior_product(xi, exterior_d(alpha))
    if alpha.degree > 0:
        out = out + exterior_d(interior_product(xi, alpha))
    return out


# ---------------------------------------------------------------- bivectors and operators


def bivector_from_operator(op: GradedOperator) -> TensorDensity:
    """``Psi = 1/2 sum theta^(J) I^<J>N_AB  xi_A ^ D_N xi_B`` for a skew-adjoint operator."""
    require_skew(op)
    z = op.spec.zero_index()
    half = Q(1, 2)
    terms: dict = {}
    for (J, A, B, N), c in op.coeffs.items():
        sign, key = wedge_sort(((A, z), (B, N)))
        if sign:
            _accumulate(terms, (J, key), c.scale(half * sign))
    return TensorDensity._make(op.spec, VECTOR, 2, terms)


def operator_from_bivector(t: TensorDensity) -> GradedOperator:
    """Skew operator whose bivector is equivalent to ``t``.

    Each term is integrated by parts until its first slot is underived:
    ``theta^(J) c D_K s_A ^ D_P s_B`` becomes
    ``(-1)^|K| sum C(K,L) C(K-L,M) theta^(J+L) D_M(c) s_A ^ D_{K-L-M+P} s_B``.
    """
    if t.degree != 2 or t.kind != VECTOR:
        raise KindError(f"expected a bivector, got degree-{t.degree} {t.kind}")
    coeffs: dict = {}
    for (J, ((A, K), (B, P))), c in t.terms.items():
        sK = mi_sign(K)
        for L in mi_below(K):
            KL = mi_sub(K, L)
            bl = mi_binom(K, L)
            for M in mi_below(KL):
                coef = 2 * sK * bl * mi_binom(KL, M)
                N = mi_add(mi_sub(KL, M), P)
                _accumulate(coeffs, (mi_add(J, L), A, B, N), total_derivative(c, M).scale(coef))
    return skew_part(GradedOperator._make(t.spec, coeffs))


# ---------------------------------------------------------------- variational derivatives


def variational_derivatives(t: TensorDensity) -> dict:
    """Euler operators of a grading-zero tensor density, even and odd.

    Returns ``{("jet", A): E_{phi_A}(t), ("slot", A): E_{s_A}(t)}`` with zero entries
    omitted.  Odd derivatives are left derivatives.  At positive degree all of them
    vanish exactly when ``t`` is an ordinary total divergence.
    """
    spec = t.spec
    z = spec.zero_index()
    if any(J != z for J, _ in t.terms):
        raise KindError("variational derivatives are taken of grading-zero densities")
    result = {}
    for A in range(spec.n_fields):
        # even: sum_K (-D)_K d t / d phi_A^(K)
        acc = zero_tensor(spec, t.kind, t.degree)
        pieces: dict = {}
        for (J, slots), c in t.terms.items():
            for v in c.variables():
                if v.field == A:
                    pieces.setdefault(v.deriv, {})
                    _accumulate(pieces[v.deriv], (J, slots), partial_jet(c, v))
        for K, terms in pieces.items():
            piece = TensorDensity._make(spec, t.kind, t.degree, terms)
            acc = acc + tensor_total_derivative(piece, K).scale(mi_sign(K))
        if acc:
            result[("jet", A)] = acc
        if t.degree == 0:
            continue
        kind = t.kind if t.degree > 1 else None
        acc = zero_tensor(spec, kind, t.degree - 1)
        pieces = {}
        for (J, slots), c in t.terms.items():
            for i, (B, K) in enumerate(slots):
                if B != A:
                    continue
                rest = slots[:i] + slots[i + 1:]
                pieces.setdefault(K, {})
                _accumulate(pieces[K], (J, rest), c if i % 2 == 0 else -c)
        for K, terms in pieces.items():
            piece = TensorDensity._make(spec, kind, t.degree - 1, terms)
            acc = acc + tensor_total_derivative(piece, K).scale(mi_sign(K))
        if acc:
            result[("slot", A)] = acc
    return result
