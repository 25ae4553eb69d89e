"""Canonical text and LaTeX presentations.

The text form is the DSL accepted by :mod:`varcalc.parser`; printing then
parsing returns an equal object.
"""
from __future__ import annotations

from fractions import Fraction

from .jet import DiffPoly, FieldSpec, JetVar


def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _chain(spec: FieldSpec, deriv) -> str:
    return "".join(name * k for name, k in zip(spec.coords, deriv))


def format_jetvar(spec: FieldSpec, v: JetVar) -> str:
    name = spec.fields[v.field]
    chain = _chain(spec, v.deriv)
    return f"{name}_{chain}" if chain else name


def format_monomial(spec: FieldSpec, m: tuple) -> str:
    parts = []
    for v, e in m:
        s = format_jetvar(spec, v)
        parts.append(f"{s}^{e}" if e > 1 else s)
    return "*".join(parts)


def format_grading(J) -> str:
    return "theta()" if not any(J) else "theta(" + ",".join(map(str, J)) + ")"


def format_slot(spec: FieldSpec, kind: str, slot) -> str:
    A, K = slot
    if kind == "vector":
        base = "xi" if spec.n_fields == 1 else f"xi[{spec.fields[A]}]"
    else:
        base = f"d[{spec.fields[A]}]"
    if not any(K):
        return base
    if spec.n_dims == 1:
        return f"{base}_{K[0]}"
    return f"{base}_(" + ",".join(map(str, K)) + ")"


def format_dorder(spec: FieldSpec, N) -> str:
    return "*".join(f"D[{c}]^{k}" if k > 1 else f"D[{c}]" for c, k in zip(spec.coords, N) if k)


def _join(pieces) -> str:
    """Join ``(coefficient, body)`` pairs into a signed sum."""
    out = []
    for c, body in pieces:
        neg = c < 0
        a = -c if neg else c
        if body:
            text = body if a == 1 else f"{format_rational(a)}*{body}"
        else:
            text = format_rational(a)
        if not out:
            out.append(("-" if neg else "") + text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out) if out else "0"


def format_poly(spec: FieldSpec, p: DiffPoly) -> str:
    return _join((c, format_monomial(spec, m)) for m, c in p.sorted_terms())


def _body(*parts) -> str:
    return "*".join(x for x in parts if x)


def format_density(d) -> str:
    spec = d.spec
    pieces = []
    for J in d.gradings():
        for m, c in d.parts[J].sorted_terms():
            pieces.append((c, _body(format_grading(J), format_monomial(spec, m))))
    return _join(pieces)


def format_operator(op) -> str:
    spec = op.spec
    pieces = []
    for (J, A, B, N), p in op.sorted_items():
        entry = f"E[{spec.fields[A]},{spec.fields[B]}]" if spec.n_fields > 1 else ""
        for m, c in p.sorted_terms():
            pieces.append((c, _body(format_grading(J), entry, format_monomial(spec, m), format_dorder(spec, N))))
    return _join(pieces)


def format_tensor(t) -> str:
    spec = t.spec
    pieces = []
    for (J, slots), p in t.sorted_items():
        wedge = "^".join(format_slot(spec, t.kind, s) for s in slots)
        for m, c in p.sorted_terms():
            pieces.append((c, _body(format_grading(J), format_monomial(spec, m), wedge)))
    return _join(pieces)


def format_characteristic(x) -> str:
    return format_tensor(x.as_tensor())


def format_any(obj) -> str:
    from .graded import GradedDensity, GradedOperator
    from .tensors import TensorDensity, _Characteristic

    if isinstance(obj, GradedDensity):
        return format_density(obj)
    if isinstance(obj, GradedOperator):
        return format_operator(obj)
    if isinstance(obj, TensorDensity):
        return format_tensor(obj)
    if isinstance(obj, _Characteristic):
        return format_characteristic(obj)
    if isinstance(obj, DiffPoly):
        raise TypeError("format_poly needs a FieldSpec")
    raise TypeError(f"cannot format {type(obj).__name__}")


# ---------------------------------------------------------------- LaTeX (best effort)


def _latex_rational(a: Fraction) -> str:
    return str(a.numerator) if a.denominator == 1 else rf"\frac{{{a.numerator}}}{{{a.denominator}}}"


def _latex_join(pieces) -> str:
    out = []
    for c, body in pieces:
        neg = c < 0
        a = -c if neg else c
        text = body if (a == 1 and body) else (_latex_rational(a) + (" " + body if body else ""))
        if not out:
            out.append(("-" if neg else "") + text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out) if out else "0"


def _latex_mono(spec, m) -> str:
    parts = []
    for v, e in m:
        name = spec.fields[v.field]
        chain = _chain(spec, v.deriv)
        s = f"{name}_{{{chain}}}" if chain else name
        parts.append(f"{s}^{{{e}}}" if e > 1 else s)
    return " ".join(parts)


def _latex_theta(J) -> str:
    return r"\theta" if not any(J) else r"\theta^{(" + ",".join(map(str, J)) + ")}"


def _latex_slot(spec, kind, slot) -> str:
    A, K = slot
    name = spec.fields[A]
    base = rf"\frac{{\delta}}{{\delta {name}}}" if kind == "vector" else rf"\delta {name}"
    chain = _chain(spec, K)
    return f"D_{{{chain}}} {base}" if chain else base


def to_latex(obj) -> str:
    from .graded import GradedDensity, GradedOperator
    from .tensors import TensorDensity, _Characteristic

    if isinstance(obj, _Characteristic):
        obj = obj.as_tensor()
    spec = obj.spec
    pieces = []
    if isinstance(obj, GradedDensity):
        for J in obj.gradings():
            for m, c in obj.parts[J].sorted_terms():
                pieces.append((c, " ".join(x for x in (_latex_theta(J), _latex_mono(spec, m)) if x)))
    elif isinstance(obj, GradedOperator):
        for (J, A, B, N), p in obj.sorted_items():
            entry = f"E_{{{spec.fields[A]}{spec.fields[B]}}}" if spec.n_fields > 1 else ""
            dn = " ".join(f"D_{{{c}}}^{{{k}}}" if k > 1 else f"D_{{{c}}}" for c, k in zip(spec.coords, N) if k)
            for m, c in p.sorted_terms():
                pieces.append((c, " ".join(x for x in (_latex_theta(J), entry, _latex_mono(spec, m), dn) if x)))
    elif isinstance(obj, TensorDensity):
        for (J, slots), p in obj.sorted_items():
            wedge = r" \wedge ".join(_latex_slot(spec, obj.kind, s) for s in slots)
            for m, c in p.sorted_terms():
                pieces.append((c, " ".join(x for x in (_latex_theta(J), _latex_mono(spec, m), wedge) if x)))
    else:
        raise TypeError(f"cannot render {type(obj).__name__}")
    return _latex_join(pieces)
