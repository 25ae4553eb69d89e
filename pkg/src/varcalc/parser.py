"""Text DSL for graded densities, operators and wedge tensors.

Grammar, informally::

    expr    := ['+'|'-'] term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*
    factor  := primary ('^' (nat | slot))*
    primary := rational | jetvar | 'theta(' [nat (',' nat)*] ')'
             | 'D[' coord ']' | 'E[' field ',' field ']' | slot | '(' expr ')'
    jetvar  := field ['_' coordchain]
    slot    := ('xi' | 'xi[' field ']' | 'd[' field ']') ['_' (nat | '(' nat-list ')' | coordchain)]

``^`` followed by a number is a power; between two slots it is the wedge.
Every term must carry exactly one theta factor; ``theta()`` is grading zero.
"""
from __future__ import annotations

import re
from typing import NamedTuple

from .errors import KindError, ParseError, SpecMismatchError
from .graded import GradedDensity, GradedOperator, _accumulate
from .jet import DiffPoly, FieldSpec, Q, mi_add
from .tensors import FORM, VECTOR, TensorDensity

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(.))", re.S)


class Tok(NamedTuple):
    kind: str  # "num", "id", "op", "end"
    text: str
    pos: int


def tokenize(src: str) -> list:
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            toks.append(Tok("num", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(Tok("id", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()[],_":
                raise ParseError(f"unexpected character {ch!r}", src, start)
            toks.append(Tok("op", ch, start))
        pos = m.end()
    toks.append(Tok("end", "", len(src)))
    return toks


class _Key(NamedTuple):
    thetas: int
    J: tuple
    N: tuple
    entry: tuple | None
    slots: tuple
    kind: str | None


# A parsed value is a dict _Key -> DiffPoly.


class _Parser:
    def __init__(self, spec: FieldSpec, src: str):
        self.spec = spec
        self.src = src
        self.toks = tokenize(src)
        self.i = 0
        self.z = spec.zero_index()

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, self.src, tok.pos)

    def take(self, text=None, kind=None) -> Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            got = repr(t.text) if t.kind != "end" else "end of input"
            self.error(f"expected {want}, got {got}")
        self.i += 1
        return t

    def peek(self, text, offset=0) -> bool:
        j = self.i + offset
        return j < len(self.toks) and self.toks[j].kind == "op" and self.toks[j].text == text

    # -- values
    def const(self, c):
        return {_Key(0, self.z, self.z, None, (), None): DiffPoly.const(c)} if c else {}

    def single(self, key, coeff=1):
        return {key: DiffPoly.coerce(coeff)}

    @staticmethod
    def add(a, b, sign=1):
        out = dict(a)
        for k, v in b.items():
            _accumulate(out, k, v if sign == 1 else -v)
        return out

    def mul(self, a, b, tok):
        out: dict = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                if any(ka.N) and (not cb.is_constant() or kb.thetas):
                    what = "theta factor" if kb.thetas else "non-constant coefficient"
                    self.error(f"D appearing inside a coefficient: {what} to the right of a D operator", tok)
                if ka.thetas + kb.thetas > 1:
                    self.error("more than one theta factor in a term", tok)
                if ka.entry is not None and kb.entry is not None:
                    self.error("more than one matrix entry E[.,.] in a term", tok)
                if ka.kind and kb.kind and ka.kind != kb.kind:
                    self.error("cannot mix form slots d[...] and vector slots xi in one tensor", tok)
                key = _Key(
                    ka.thetas + kb.thetas,
                    mi_add(ka.J, kb.J),
                    mi_add(ka.N, kb.N),
                    ka.entry if ka.entry is not None else kb.entry,
                    ka.slots + kb.slots,
                    ka.kind or kb.kind,
                )
                _accumulate(out, key, ca * cb)
        return out

    def as_constant(self, v):
        if not v:
            return Q(0)
        if len(v) == 1:
            (k, c), = v.items()
            if k.thetas == 0 and not any(k.N) and k.entry is None and not k.slots and c.is_constant():
                return c.constant_value()
        return None

    # -- grammar
    def parse(self):
        v = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return v

    def expr(self):
        sign = 1
        if self.peek("+") or self.peek("-"):
            sign = -1 if self.take().text == "-" else 1
        v = self.term()
        if sign == -1:
            v = self.add({}, v, -1)
        while self.peek("+") or self.peek("-"):
            s = 1 if self.take().text == "+" else -1
            v = self.add(v, self.term(), s)
        return v

    def term(self):
        v = self.factor()
        while self.peek("*") or self.peek("/"):
            t = self.take()
            rhs = self.factor()
            if t.text == "*":
                v = self.mul(v, rhs, t)
            else:
                c = self.as_constant(rhs)
                if c is None:
                    self.error("division only by a rational constant", t)
                if c == 0:
                    self.error("division by zero", t)
                v = self.mul(v, self.const(1 / Q(c)), t)
        return v

    def factor(self):
        v = self.primary()
        while self.peek("^"):
            t = self.take("^")
            if self.tok.kind == "num":
                n = int(self.take().text)
                if any(k.slots for k in v):
                    self.error("power of a wedge slot", t)
                r = self.const(1)
                for _ in range(n):
                    r = self.mul(r, v, t)
                v = r
            else:
                start = self.tok
                rhs = self.primary()
                if not (len(rhs) == 1 and next(iter(rhs)).slots and all(k.slots for k in v)):
                    self.error("'^' must be followed by an integer power or join two wedge slots", start)
                v = self.mul(v, rhs, t)
        return v

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return self.const(int(t.text))
        if self.peek("("):
            self.take("(")
            v = self.expr()
            self.take(")")
            return v
        if t.kind != "id":
            self.error("expected a number, identifier or '('" if t.kind != "end" else "unexpected end of input")
        name = t.text
        if name == "theta":
            return self.theta()
        if name == "D":
            self.i += 1
            self.take("[")
            c = self.coord()
            self.take("]")
            return self.single(_Key(0, self.z, self.spec.unit(c), None, (), None))
        if name == "E":
            self.i += 1
            self.take("[")
            a = self.field()
            self.take(",")
            b = self.field()
            self.take("]")
            return self.single(_Key(0, self.z, self.z, (a, b), (), None))
        if name in ("xi", "d"):
            return self.slot()
        if name in self.spec.fields:
            self.i += 1
            A = self.spec.field_index(name)
            deriv = self.z
            if self.peek("_"):
                self.take("_")
                deriv = self.chain()
            return self.const_poly(DiffPoly.var(A, deriv))
        if name in self.spec.coords:
            self.error(f"coordinate {name!r} used as a value")
        self.error(f"unknown identifier {name!r}")

    def const_poly(self, p):
        return {_Key(0, self.z, self.z, None, (), None): p}

    def theta(self):
        t = self.take("theta")
        self.take("(")
        J = []
        if not self.peek(")"):
            J.append(int(self.take(kind="num").text))
            while self.peek(","):
                self.take(",")
                J.append(int(self.take(kind="num").text))
        self.take(")")
        if not J:
            J = list(self.z)
        elif len(J) != self.spec.n_dims:
            self.error(f"theta grading has {len(J)} entries but there are {self.spec.n_dims} coordinates", t)
        return self.single(_Key(1, tuple(J), self.z, None, (), None))

    def coord(self) -> int:
        t = self.take(kind="id")
        if t.text not in self.spec.coords:
            self.error(f"unknown coordinate {t.text!r}", t)
        return self.spec.coords.index(t.text)

    def field(self) -> int:
        t = self.take(kind="id")
        if t.text not in self.spec.fields:
            self.error(f"unknown field {t.text!r}", t)
        return self.spec.field_index(t.text)

    def chain(self) -> tuple:
        t = self.take(kind="id")
        deriv = [0] * self.spec.n_dims
        for ch in t.text:
            if ch not in self.spec.coords:
                self.error(f"{ch!r} in derivative chain {t.text!r} is not a coordinate", t)
            deriv[self.spec.coords.index(ch)] += 1
        return tuple(deriv)

    def slot(self):
        t = self.take(kind="id")
        kind = VECTOR if t.text == "xi" else FORM
        if self.peek("["):
            self.take("[")
            A = self.field()
            self.take("]")
        elif self.spec.n_fields == 1:
            A = 0
        else:
            self.error(f"{t.text} needs a field, e.g. {t.text}[{self.spec.fields[0]}]", t)
        deriv = self.z
        if self.peek("_"):
            self.take("_")
            nt = self.tok
            if nt.kind == "num":
                if self.spec.n_dims != 1:
                    self.error("bare derivative order only allowed with one coordinate", nt)
                deriv = (int(self.take().text),)
            elif self.peek("("):
                self.take("(")
                ks = [int(self.take(kind="num").text)]
                while self.peek(","):
                    self.take(",")
                    ks.append(int(self.take(kind="num").text))
                self.take(")")
                if len(ks) != self.spec.n_dims:
                    self.error(f"derivative multi-index has {len(ks)} entries, expected {self.spec.n_dims}", nt)
                deriv = tuple(ks)
            else:
                deriv = self.chain()
        return self.single(_Key(0, self.z, self.z, None, ((A, deriv),), kind))


def _parse(spec: FieldSpec, src: str):
    if not isinstance(src, str):
        raise TypeError("source must be a string")
    p = _Parser(spec, src)
    val = p.parse()
    for k in val:
        if k.thetas != 1:
            raise ParseError("term without a theta factor (use theta() for grading zero)", src, 0)
    return val


def _forbid(val, src, what, pred):
    for k in val:
        if pred(k):
            raise ParseError(f"{what} not allowed here", src, 0)


def parse_density(spec: FieldSpec, src: str) -> GradedDensity:
    """Parse a graded density such as ``"theta()*u*u_x + theta(1)*u"``."""
    val = _parse(spec, src)
    _forbid(val, src, "D operator", lambda k: any(k.N))
    _forbid(val, src, "matrix entry E[.,.]", lambda k: k.entry is not None)
    _forbid(val, src, "wedge slot", lambda k: k.slots)
    parts: dict = {}
    for k, c in val.items():
        _accumulate(parts, k.J, c)
    return GradedDensity._make(spec, parts)


def parse_operator(spec: FieldSpec, src: str) -> GradedOperator:
    """Parse a graded operator such as ``"theta()*(D[x]^3 + (2/3)*u*D[x])"``."""
    val = _parse(spec, src)
    _forbid(val, src, "wedge slot", lambda k: k.slots)
    coeffs: dict = {}
    for k, c in val.items():
        if k.entry is None:
            if spec.n_fields != 1:
                raise ParseError("operator term needs a matrix entry E[A,B] when there are several fields", src, 0)
            entry = (0, 0)
        else:
            entry = k.entry
        _accumulate(coeffs, (k.J, entry[0], entry[1], k.N), c)
    return GradedOperator._make(spec, coeffs)


def parse_tensor(spec: FieldSpec, src: str) -> TensorDensity:
    """Parse a wedge tensor such as ``"theta()*u*xi^xi_1"`` or ``"theta()*d[u]^d[u]_2"``."""
    val = _parse(spec, src)
    _forbid(val, src, "D operator", lambda k: any(k.N))
    _forbid(val, src, "matrix entry E[.,.]", lambda k: k.entry is not None)
    degrees = {len(k.slots) for k in val}
    kinds = {k.kind for k in val if k.kind}
    if len(degrees) > 1:
        raise ParseError(f"terms of different wedge degrees {sorted(degrees)}", src, 0)
    if len(kinds) > 1:
        raise ParseError("cannot mix form and vector slots", src, 0)
    degree = degrees.pop() if degrees else 0
    kind = kinds.pop() if kinds else None
    try:
        return TensorDensity(spec, kind, degree, {(k.J, k.slots): c for k, c in val.items()})
    except (KindError, SpecMismatchError) as e:
        raise ParseError(str(e), src, 0) from None


def make_spec(dims, fields) -> FieldSpec:
    """FieldSpec from comma/space separated names or sequences."""
    def split(x):
        if isinstance(x, str):
            return tuple(s for s in re.split(r"[,\s]+", x) if s)
        return tuple(x)

    return FieldSpec(split(dims), split(fields))
