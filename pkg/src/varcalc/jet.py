"""Multi-indices, jet variables and differential polynomials.

A :class:`DiffPoly` is an exact-rational polynomial in the jet variables
``phi_A^(K)``.  Jet variables are plain tuples ``(field, deriv)`` where
``deriv`` is a tuple of non-negative integers of length ``n_dims``; a
monomial is a sorted tuple of ``(jetvar, power)`` pairs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from typing import Iterable, NamedTuple, Sequence

from .errors import SpecMismatchError

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction


def Q(*args):
    """Exact rational in the fast backend; accepts ints, Fractions and mpq."""
    if len(args) == 1 and type(args[0]) is Fraction:
        # Fraction(mpq) carries mpz parts, which mpq() refuses
        a = args[0]
        return _mpq(int(a.numerator), int(a.denominator))
    return _mpq(*args)


RATIONAL_TYPES = (int, Fraction, type(_mpq(0)))

RESERVED_NAMES = frozenset({"theta", "D", "xi", "d", "E"})


@dataclass(frozen=True)
class FieldSpec:
    """Coordinates and dependent variables shared by every object of a computation."""

    coords: tuple[str, ...]
    fields: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "fields", tuple(self.fields))
        if not self.coords:
            raise ValueError("need at least one coordinate")
        if not self.fields:
            raise ValueError("need at least one field")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"duplicate coordinate names in {self.coords}")
        if len(set(self.fields)) != len(self.fields):
            raise ValueError(f"duplicate field names in {self.fields}")
        for c in self.coords:
            if len(c) != 1 or not c.isalpha():
                raise ValueError(f"coordinate names must be single letters, got {c!r}")
        for f in self.fields:
            if not f.isidentifier() or "_" in f or f in RESERVED_NAMES:
                raise ValueError(f"invalid field name {f!r}")
        clash = set(self.coords) & set(self.fields)
        if clash:
            raise ValueError(f"names used both as coordinate and field: {sorted(clash)}")

    @property
    def n_dims(self) -> int:
        return len(self.coords)

    @property
    def n_fields(self) -> int:
        return len(self.fields)

    def field_index(self, name: str) -> int:
        try:
            return self.fields.index(name)
        except ValueError:
            raise KeyError(f"unknown field {name!r}") from None

    def extend(self, *names: str) -> "FieldSpec":
        """Spec with extra (auxiliary) fields appended after the existing ones."""
        return FieldSpec(self.coords, self.fields + tuple(names))

    def extends(self, other: "FieldSpec") -> bool:
        return self.coords == other.coords and self.fields[: len(other.fields)] == other.fields

    def zero_index(self) -> tuple[int, ...]:
        return (0,) * self.n_dims

    def unit(self, i: int) -> tuple[int, ...]:
        return tuple(1 if k == i else 0 for k in range(self.n_dims))


def check_same_spec(*objs) -> FieldSpec:
    specs = {o.spec for o in objs}
    if len(specs) != 1:
        raise SpecMismatchError(f"objects built on different field specs: {sorted(map(repr, specs))}")
    return specs.pop()


# ---------------------------------------------------------------- multi-indices

MultiIndex = tuple


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def mi_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x - y for x, y in zip(a, b))


def mi_le(a: MultiIndex, b: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mi_min(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(min(x, y) for x, y in zip(a, b))


def mi_order(a: MultiIndex) -> int:
    return sum(a)


def mi_binom(k: MultiIndex, l: MultiIndex) -> int:
    """Product of componentwise binomials; zero unless ``l <= k``."""
    r = 1
    for ki, li in zip(k, l):
        if li < 0 or li > ki:
            return 0
        r *= comb(ki, li)
    return r


def mi_below(k: MultiIndex) -> Iterable[MultiIndex]:
    """All multi-indices ``l`` with ``0 <= l <= k``."""
    return product(*(range(ki + 1) for ki in k))


def mi_all(n: int, max_order: int) -> list[MultiIndex]:
    """All multi-indices in ``n`` dims with ``|J| <= max_order``, graded order."""
    out = [j for j in product(range(max_order + 1), repeat=n) if sum(j) <= max_order]
    out.sort(key=lambda j: (sum(j), tuple(-x for x in j)))
    return out


def mi_sign(k: MultiIndex) -> int:
    return -1 if sum(k) % 2 else 1


# ---------------------------------------------------------------- jet variables


class JetVar(NamedTuple):
    field: int
    deriv: tuple


# ---------------------------------------------------------------- polynomials


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    return _mono_mul_cached(a, b) if a <= b else _mono_mul_cached(b, a)


@lru_cache(maxsize=1 << 18)
def _mono_mul_cached(a: tuple, b: tuple) -> tuple:
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


class DiffPoly:
    """Polynomial in jet variables with :class:`~fractions.Fraction` coefficients.

    Instances are treated as immutable; ``terms`` never holds a zero coefficient,
    so structural equality of the term maps is equality of polynomials.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {}
        self._hash = None
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = Q(c)

    @classmethod
    def _raw(cls, terms: dict) -> "DiffPoly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "DiffPoly":
        c = Q(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, field: int, deriv: Sequence[int]) -> "DiffPoly":
        return cls._raw({((JetVar(field, tuple(deriv)), 1),): Q(1)})

    @classmethod
    def coerce(cls, x) -> "DiffPoly":
        if isinstance(x, DiffPoly):
            return x
        return cls.const(x)

    # -- inspection
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((), Q(0))

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def max_field(self) -> int:
        return max((v.field for v in self.variables()), default=-1)

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self.terms == other.terms
        if isinstance(other, RATIONAL_TYPES):
            return self.terms == DiffPoly.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- arithmetic
    def __add__(self, other):
        other = DiffPoly.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return DiffPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-DiffPoly.coerce(other))

    def __rsub__(self, other):
        return DiffPoly.coerce(other) - self

    def scale(self, c) -> "DiffPoly":
        c = Q(c)
        if not c:
            return DiffPoly._raw({})
        if c == 1:
            return self
        return DiffPoly._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            return self.scale(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        if not self.terms or not other.terms:
            return DiffPoly._raw({})
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = t.get(m, 0) + c1 * c2
        return DiffPoly._raw({m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        r = DiffPoly.const(1)
        for _ in range(n):
            r = r * self
        return r

    def sorted_terms(self) -> list:
        """Terms in graded-lex order over (field, deriv)-ordered jet variables."""
        return sorted(self.terms.items(), key=lambda mc: _mono_key(mc[0]))

    def __repr__(self):
        return f"DiffPoly({dict(self.sorted_terms())!r})"


def _mono_key(m: tuple):
    deg = sum(e for _, e in m)
    flat = []
    for v, e in m:
        flat.extend([(v.field, v.deriv)] * e)
    return (deg, flat)


def poly_sum(polys: Iterable[DiffPoly]) -> DiffPoly:
    t: dict = {}
    for p in polys:
        for m, c in p.terms.items():
            t[m] = t.get(m, 0) + c
    return DiffPoly._raw({m: c for m, c in t.items() if c})


# ---------------------------------------------------------------- derivatives


@lru_cache(maxsize=1 << 19)
def _mono_d(m: tuple, i: int) -> tuple:
    """Total derivative D_i of a monomial, as a tuple of (monomial, int coefficient)."""
    out: dict = {}
    for k, (v, e) in enumerate(m):
        deriv = list(v.deriv)
        deriv[i] += 1
        w = JetVar(v.field, tuple(deriv))
        rest = m[:k] + ((v, e - 1),) + m[k + 1:] if e > 1 else m[:k] + m[k + 1:]
        nm = _mono_mul(rest, ((w, 1),))
        out[nm] = out.get(nm, 0) + e
    return tuple(out.items())


def _check_dims(p: DiffPoly, n: int):
    for v in p.variables():
        if len(v.deriv) != n:
            raise SpecMismatchError(
                f"multi-index of length {n} applied to jet variable with {len(v.deriv)} dims"
            )


def d_total(p: DiffPoly, i: int) -> DiffPoly:
    """Single total derivative D_i."""
    t: dict = {}
    for m, c in p.terms.items():
        for nm, e in _mono_d(m, i):
            t[nm] = t.get(nm, 0) + c * e
    return DiffPoly._raw({m: c for m, c in t.items() if c})


def total_derivative(p: DiffPoly, J: MultiIndex) -> DiffPoly:
    """D_J p, composing the single derivatives coordinate by coordinate."""
    J = tuple(J)
    _check_dims(p, len(J))
    for i, k in enumerate(J):
        for _ in range(k):
            p = d_total(p, i)
    return p


def partial_jet(p: DiffPoly, v: JetVar) -> DiffPoly:
    """Formal partial derivative with respect to one jet variable."""
    v = JetVar(*v)
    t: dict = {}
    for m, c in p.terms.items():
        for k, (w, e) in enumerate(m):
            if w == v:
                rest = m[:k] + ((w, e - 1),) + m[k + 1:] if e > 1 else m[:k] + m[k + 1:]
                t[rest] = t.get(rest, 0) + c * e
                break
    return DiffPoly._raw({m: c for m, c in t.items() if c})


def jet_gradient(p: DiffPoly) -> dict:
    """Map jet variable -> partial derivative, over the variables present in ``p``."""
    return {v: partial_jet(p, v) for v in sorted(p.variables())}


def frechet(p: DiffPoly, eta: Sequence[DiffPoly], spec: FieldSpec | None = None) -> DiffPoly:
    """Fréchet derivative f'(eta) = sum (df/dphi_A^(K)) D_K eta_A."""
    eta = [DiffPoly.coerce(e) for e in eta]
    n_fields = spec.n_fields if spec is not None else None
    if n_fields is not None and len(eta) != n_fields:
        raise SpecMismatchError(f"eta has {len(eta)} entries, expected {n_fields}")
    out = DiffPoly()
    for v, dp in jet_gradient(p).items():
        if v.field >= len(eta):
            raise SpecMismatchError(f"eta has no entry for field index {v.field}")
        out = out + dp * total_derivative(eta[v.field], v.deriv)
    return out


def higher_euler(p: DiffPoly, A: int, K: MultiIndex) -> DiffPoly:
    """Higher Euler operator E^K_A(f) = sum_{J>=K} C(J,K) (-D)_{J-K} df/dphi_A^(J).

    The convention is the one for which ``sum_K D_K(E^K_A(f) eta_A) = f'(eta)``.
    """
    K = tuple(K)
    out = DiffPoly()
    for v, dp in jet_gradient(p).items():
        if v.field != A or not mi_le(K, v.deriv):
            continue
        L = mi_sub(v.deriv, K)
        out = out + total_derivative(dp, L).scale(mi_binom(v.deriv, K) * mi_sign(L))
    return out


def euler_operators(p: DiffPoly, n_dims: int) -> dict:
    """All nonzero E^K_A(p), keyed by (A, K)."""
    top: dict = {}
    for v in p.variables():
        top.setdefault(v.field, []).append(v.deriv)
    out = {}
    for A, derivs in top.items():
        seen = set()
        for d in derivs:
            for K in mi_below(d):
                if K in seen:
                    continue
                seen.add(K)
                e = higher_euler(p, A, K)
                if e:
                    out[(A, K)] = e
    return dict(sorted(out.items()))
