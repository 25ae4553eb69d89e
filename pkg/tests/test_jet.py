import pytest
from hypothesis import given, settings, strategies as st

from helpers import rand_poly, rng
from varcalc import DiffPoly, FieldSpec, SpecMismatchError, frechet, higher_euler, partial_jet, total_derivative
from varcalc.jet import JetVar, d_total, euler_operators, mi_all, mi_binom, mi_le

X = FieldSpec(("x",), ("u",))
XY = FieldSpec(("x", "y"), ("u",))
XYZ = FieldSpec(("x", "y", "z"), ("u", "v"))


def u(*k):
    return DiffPoly.var(0, k)


class TestFieldSpec:
    def test_rejects_bad_names(self):
        with pytest.raises(ValueError):
            FieldSpec(("x",), ("u_x",))
        with pytest.raises(ValueError):
            FieldSpec(("xy",), ("u",))
        with pytest.raises(ValueError):
            FieldSpec(("x",), ("theta",))
        with pytest.raises(ValueError):
            FieldSpec(("x",), ("x",))
        with pytest.raises(ValueError):
            FieldSpec(("x",), ())

    def test_extend(self):
        big = X.extend("eta")
        assert big.fields == ("u", "eta")
        assert big.extends(X) and not X.extends(big)


class TestMultiIndex:
    def test_binomial_zero_unless_below(self):
        assert mi_binom((3, 2), (1, 1)) == 6
        assert mi_binom((1, 2), (2, 0)) == 0

    def test_all_sorted_by_order(self):
        js = mi_all(2, 3)
        assert len(js) == 10
        assert [sum(j) for j in js] == sorted(sum(j) for j in js)
        assert mi_le((0, 1), (1, 1)) and not mi_le((2, 0), (1, 1))


class TestTotalDerivative:
    def test_product_rule(self):
        assert d_total(u(0) * u(1), 0) == u(1) ** 2 + u(0) * u(2)

    def test_zero_index_is_identity(self):
        p = u(0) * u(2) + 3
        assert total_derivative(p, (0,)) is p

    def test_constant(self):
        assert total_derivative(DiffPoly.const(5), (3,)).is_zero()

    def test_dimension_mismatch(self):
        with pytest.raises(SpecMismatchError):
            total_derivative(DiffPoly.var(0, (1, 0)), (1,))

    def test_mixed_order_50_random(self):
        for k in range(50):
            p = rand_poly(rng(k), XY, max_order=2, max_degree=3)
            assert total_derivative(p, (1, 1)) == d_total(d_total(p, 0), 1) == d_total(d_total(p, 1), 0)

    @pytest.mark.parametrize("spec", [XY, XYZ])
    def test_commute(self, spec):
        for k in range(20):
            p = rand_poly(rng(100 + k), spec, max_degree=3)
            for i in range(spec.n_dims):
                for j in range(i):
                    assert d_total(d_total(p, i), j) == d_total(d_total(p, j), i)


class TestPartial:
    def test_examples(self):
        assert partial_jet(u(0) * u(1), JetVar(0, (1,))) == u(0)
        assert partial_jet(u(0) ** 2, JetVar(0, (1,))).is_zero()

    def test_leibniz(self):
        for k in range(30):
            r = rng(200 + k)
            p, q = rand_poly(r, X), rand_poly(r, X)
            for v in (p * q).variables():
                assert partial_jet(p * q, v) == p * partial_jet(q, v) + q * partial_jet(p, v)


class TestFrechet:
    spec = X.extend("eta")
    eta = DiffPoly.var(1, (0,))

    def test_two_term_chain_rule(self):
        f = u(0) * u(2)
        assert frechet(f, [self.eta, 0], self.spec) == u(2) * self.eta + u(0) * DiffPoly.var(1, (2,))

    def test_constant(self):
        assert frechet(DiffPoly.const(7), [self.eta, 0]).is_zero()

    def test_length_check(self):
        with pytest.raises(SpecMismatchError):
            frechet(u(0), [self.eta], self.spec)

    def test_derivation_law(self):
        for k in range(50):
            r = rng(300 + k)
            p, q = rand_poly(r, X, fields=[0]), rand_poly(r, X, fields=[0])
            e = [self.eta, 0]
            assert frechet(p * q, e) == frechet(p, e) * q + p * frechet(q, e)

    def test_linear(self):
        r = rng(7)
        p = rand_poly(r, X, fields=[0], max_degree=3)
        e1, e2 = DiffPoly.var(1, (1,)), DiffPoly.var(1, (0,)) * 3
        assert frechet(p, [e1 + e2.scale(2), 0]) == frechet(p, [e1, 0]) + frechet(p, [e2, 0]).scale(2)


def euler_identity_defect(f, spec, n_fields):
    """sum_{A,K} D_K(E^K_A(f) eta_A) - f'(eta) with fresh fields eta_A."""
    etas = [DiffPoly.var(n_fields + A, spec.zero_index()) for A in range(n_fields)]
    lhs = DiffPoly()
    for (A, K), e in euler_operators(f, spec.n_dims).items():
        lhs = lhs + total_derivative(e * etas[A], K)
    return lhs - frechet(f, etas + [0] * n_fields)


class TestHigherEuler:
    def test_example(self):
        f = u(0) * u(2)
        assert higher_euler(f, 0, (0,)) == u(2).scale(2)
        assert higher_euler(f, 0, (1,)) == u(1).scale(-2)
        assert higher_euler(f, 0, (2,)) == u(0)

    def test_linear_field(self):
        assert higher_euler(u(0), 0, (0,)) == 1
        assert higher_euler(u(0), 0, (1,)).is_zero()

    def test_kills_divergences(self):
        for k in range(50):
            g = rand_poly(rng(400 + k), XY, max_degree=3)
            for i in range(2):
                assert higher_euler(d_total(g, i), 0, (0, 0)).is_zero()

    @pytest.mark.parametrize("spec", [X, XY, XYZ])
    def test_identity_random(self, spec):
        for k in range(15):
            f = rand_poly(rng(500 + k), spec, max_order=3, max_degree=3)
            assert euler_identity_defect(f, spec.extend(*[f"eta{A}" for A in range(spec.n_fields)]),
                                         spec.n_fields).is_zero()


coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)
jet = st.tuples(st.integers(0, 1), st.tuples(st.integers(0, 2), st.integers(0, 2)))


@st.composite
def polys(draw):
    p = DiffPoly()
    for _ in range(draw(st.integers(0, 3))):
        m = DiffPoly.const(draw(coef))
        for f, k in draw(st.lists(jet, max_size=3)):
            m = m * DiffPoly.var(f, k)
        p = p + m
    return p


@settings(derandomize=True, max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_laws(a, b, c):
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()
    assert all(v != 0 for v in a.terms.values())
