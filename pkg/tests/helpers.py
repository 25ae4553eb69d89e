"""Seeded generators and small utilities shared by the test modules."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from varcalc import (
    DiffPoly,
    GradedDensity,
    GradedOperator,
    OneVectorCanonical,
    TensorDensity,
    adjoint,
    apply_operator,
    grading_zero_nf,
)
from varcalc.jet import mi_all
from varcalc.tensors import FORM

SEED = 20240611


def rng(offset=0) -> random.Random:
    return random.Random(SEED + offset)


def rand_rational(r: random.Random) -> Fraction:
    num = 0
    while num == 0:
        num = r.randint(-6, 6)
    return Fraction(num, r.choice((1, 1, 2, 3)))


def rand_multi(r, n, max_order):
    return r.choice(mi_all(n, max_order))


def rand_poly(r, spec, n_terms=3, max_order=2, max_degree=2, fields=None, constant_ok=True):
    fields = list(range(spec.n_fields)) if fields is None else list(fields)
    p = DiffPoly()
    for _ in range(r.randint(1, n_terms)):
        m = DiffPoly.const(rand_rational(r))
        lo = 0 if constant_ok else 1
        for _ in range(r.randint(lo, max_degree)):
            m = m * DiffPoly.var(r.choice(fields), rand_multi(r, spec.n_dims, max_order))
        p = p + m
    return p


def rand_density(r, spec, max_grading=2, n_parts=2, **kw):
    return GradedDensity(spec, {rand_multi(r, spec.n_dims, max_grading): rand_poly(r, spec, **kw)
                                for _ in range(r.randint(1, n_parts))})


def rand_operator(r, spec, max_grading=3, max_order=3, coeff_degree=2, n_terms=3, coeff_order=2):
    coeffs = {}
    for _ in range(r.randint(1, n_terms)):
        key = (rand_multi(r, spec.n_dims, max_grading), r.randrange(spec.n_fields),
               r.randrange(spec.n_fields), rand_multi(r, spec.n_dims, max_order))
        coeffs[key] = rand_poly(r, spec, n_terms=2, max_degree=coeff_degree, max_order=coeff_order)
    return GradedOperator(spec, coeffs)


def rand_vector(r, spec, max_grading=1, n_terms=2, **kw):
    chars = {}
    for _ in range(r.randint(1, n_terms)):
        chars[(rand_multi(r, spec.n_dims, max_grading), r.randrange(spec.n_fields))] = rand_poly(r, spec, **kw)
    return OneVectorCanonical(spec, chars)


def rand_form(r, spec, degree, max_grading=1, max_slot_order=2, n_terms=3, **kw):
    terms = {}
    for _ in range(r.randint(1, n_terms)):
        slots = tuple((r.randrange(spec.n_fields), rand_multi(r, spec.n_dims, max_slot_order))
                      for _ in range(degree))
        terms[(rand_multi(r, spec.n_dims, max_grading), slots)] = rand_poly(r, spec, **kw)
    return TensorDensity(spec, FORM, degree, terms)


def monomials(spec, max_order=2, max_degree=3, field=0):
    """All monic monomials in one field's jet variables, as grading-zero densities."""
    gens = [DiffPoly.var(field, K) for K in mi_all(spec.n_dims, max_order)]
    out = []
    for d in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(gens, d):
            p = DiffPoly.const(1)
            for g in combo:
                p = p * g
            out.append(GradedDensity.at(spec, p))
    return out


def duality_defect(op: GradedOperator) -> GradedDensity:
    """NF of ``sum_A f_A (op g)_A - g_A (op* f)_A`` with f, g fresh auxiliary fields."""
    spec = op.spec
    n = spec.n_fields
    fnames = [f"pp{k}" for k in range(n)]
    gnames = [f"qq{k}" for k in range(n)]
    big = spec.extend(*fnames, *gnames)
    op2 = op.with_spec(big)
    z = big.zero_index()
    zero = GradedDensity(big)
    fvec = [GradedDensity.at(big, DiffPoly.var(n + A, z)) for A in range(n)] + [zero] * (2 * n)
    gvec = [GradedDensity.at(big, DiffPoly.var(2 * n + A, z)) for A in range(n)] + [zero] * (2 * n)
    og = apply_operator(op2, gvec)
    of = apply_operator(adjoint(op2), fvec)
    total = GradedDensity(big)
    for A in range(n):
        total = total + fvec[A] * og[A] - gvec[A] * of[A]
    return grading_zero_nf(total)
