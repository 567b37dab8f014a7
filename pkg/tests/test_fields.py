import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chart2, chart3, f, random_poly_source
from momsec.expressions import eval_jet, parse
from momsec.fields import (
    Chart,
    ExprField,
    FormField,
    MetricField,
    VectorField,
    const_field,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
    lie_derivative_metric,
    matrix_inverse_fields,
    max_abs_fields,
    sort_signed,
    wedge,
)


def random_form(chart: Chart, degree: int, rng) -> FormField:
    comps = {}
    from momsec.fields import increasing_tuples

    for idx in increasing_tuples(chart.dim, degree):
        comps[idx] = ExprField.parse(random_poly_source(rng, chart.coordinates, max_degree=3), chart)
    return FormField(chart, degree, comps)


def random_vector(chart: Chart, rng) -> VectorField:
    return VectorField(
        chart,
        [ExprField.parse(random_poly_source(rng, chart.coordinates, max_degree=2), chart) for _ in range(chart.dim)],
    )


class TestChart:
    def test_validation(self):
        with pytest.raises(ValueError):
            Chart(("x",), ((1.0, 1.0),))
        with pytest.raises(ValueError):
            Chart(("x", "y"), ((0.0, 1.0),))

    def test_sampling_deterministic(self):
        ch = chart2()
        a = ch.sample(8, 42)
        b = ch.sample(8, 42)
        assert np.array_equal(a, b)
        lo = np.array([-1.5, -1.5])
        hi = np.array([1.5, 1.5])
        assert np.all(a >= lo) and np.all(a <= hi)


class TestExteriorDerivative:
    def test_curl_example(self):
        # A = (-y, x): dA = 2 dx^dy
        ch = chart2()
        A = FormField(ch, 1, {(0,): f("-y", ch), (1,): f("x", ch)})
        dA = exterior_derivative(A)
        for p in ch.sample(10, 1):
            assert dA.comp((0, 1)).value(p) == pytest.approx(2.0, abs=1e-14)

    def test_d_of_constant(self):
        ch = chart2()
        df = exterior_derivative(FormField(ch, 0, {(): const_field(3.0, 2)}))
        assert df.is_zero

    def test_d_squared_zero_random(self):
        rng = np.random.default_rng(7)
        for d in (2, 3, 4):
            ch = Chart(tuple("abcd"[:d]), ((-2.0, 2.0),) * d)
            pts = ch.sample(20, 3)
            for k in range(d - 1):
                for _ in range(3):
                    omega = random_form(ch, k, rng)
                    dd = exterior_derivative(exterior_derivative(omega))
                    assert dd.degree == k + 2
                    assert dd.max_abs(pts) < 1e-10


class TestWedge:
    def test_basis_case(self):
        ch = chart2()
        dx = FormField(ch, 1, {(0,): const_field(1.0, 2)})
        dy = FormField(ch, 1, {(1,): const_field(1.0, 2)})
        w = wedge(dx, dy)
        assert w.comp((0, 1)).value(np.zeros(2)) == 1.0

    def test_function_coefficients(self):
        # (x dx) ^ (y dy) = xy dx^dy
        ch = chart2()
        a = FormField(ch, 1, {(0,): f("x", ch)})
        b = FormField(ch, 1, {(1,): f("y", ch)})
        w = wedge(a, b)
        for p in ch.sample(10, 2):
            assert w.comp((0, 1)).value(p) == pytest.approx(p[0] * p[1], abs=1e-14)

    def test_graded_symmetry(self):
        rng = np.random.default_rng(12)
        ch = chart3()
        pts = ch.sample(12, 4)
        for k, l in ((1, 1), (1, 2)):
            a = random_form(ch, k, rng)
            b = random_form(ch, l, rng)
            lhs = wedge(a, b)
            rhs = wedge(b, a).scaled((-1.0) ** (k * l))
            assert (lhs - rhs).max_abs(pts) < 1e-12

    def test_degree_overflow(self):
        ch = chart2()
        a = FormField(ch, 1, {(0,): f("x", ch)})
        b = FormField(ch, 2, {(0, 1): f("y", ch)})
        with pytest.raises(ValueError):
            wedge(a, b)


class TestInteriorProduct:
    def test_rotation_area_form(self):
        # v = x d_y - y d_x into dx^dy gives -x dx - y dy
        ch = chart2()
        v = VectorField(ch, [f("-y", ch), f("x", ch)])
        B = FormField(ch, 2, {(0, 1): const_field(1.0, 2)})
        ivB = interior_product(v, B)
        for p in ch.sample(10, 5):
            assert ivB.comp((0,)).value(p) == pytest.approx(-p[0], abs=1e-14)
            assert ivB.comp((1,)).value(p) == pytest.approx(-p[1], abs=1e-14)

    def test_double_contraction_vanishes(self):
        rng = np.random.default_rng(3)
        ch = chart3()
        pts = ch.sample(10, 6)
        v = random_vector(ch, rng)
        omega = random_form(ch, 2, rng)
        assert interior_product(v, interior_product(v, omega)).max_abs(pts) < 1e-12

    def test_basis_pairing(self):
        ch = chart2()
        v = VectorField(ch, [const_field(1.0, 2), const_field(0.0, 2)])
        dx = FormField(ch, 1, {(0,): const_field(1.0, 2)})
        assert interior_product(v, dx).comp(()).value(np.zeros(2)) == 1.0

    def test_graded_derivation(self):
        # i_v(a ^ b) = (i_v a) ^ b + (-1)^k a ^ (i_v b)
        rng = np.random.default_rng(9)
        ch = chart3()
        pts = ch.sample(10, 7)
        v = random_vector(ch, rng)
        a = random_form(ch, 1, rng)
        b = random_form(ch, 2, rng)
        lhs = interior_product(v, wedge(a, b))
        rhs = wedge(interior_product(v, a), b) - wedge(a, interior_product(v, b))
        assert (lhs - rhs).max_abs(pts) < 1e-10


class TestLieDerivative:
    def test_dilation_of_area_form(self):
        ch = chart2()
        v = VectorField(ch, [f("x", ch), const_field(0.0, 2)])
        B = FormField(ch, 2, {(0, 1): const_field(1.0, 2)})
        L = lie_derivative(v, B)
        for p in ch.sample(8, 8):
            assert L.comp((0, 1)).value(p) == pytest.approx(1.0, abs=1e-14)

    def test_zero_vector(self):
        ch = chart2()
        B = FormField(ch, 2, {(0, 1): f("x*y", ch)})
        assert lie_derivative(VectorField.zero(ch), B).max_abs(ch.sample(5, 1)) == 0.0

    def test_cartan_equals_component_formula(self):
        # L_v w (2-form): v^k d_k w_ij + d_i v^k w_kj + d_j v^k w_ik
        rng = np.random.default_rng(21)
        ch = chart3()
        pts = ch.sample(15, 9)
        for _ in range(4):
            v = random_vector(ch, rng)
            omega = random_form(ch, 2, rng)
            cartan = lie_derivative(v, omega)
            worst = 0.0
            for p in pts:
                w = np.zeros((3, 3))
                dw = np.zeros((3, 3, 3))
                for i in range(3):
                    for j in range(3):
                        comp = omega.comp((i, j))
                        jet = comp.jet(p)
                        w[i, j] = jet.value
                        dw[:, i, j] = jet.grad
                vv = np.array([v.comps[k].value(p) for k in range(3)])
                dv = np.array([eval_jet(v.comps[k].expr, p).grad for k in range(3)])
                for i in range(3):
                    for j in range(i + 1, 3):
                        direct = (
                            sum(vv[k] * dw[k, i, j] for k in range(3))
                            + sum(dv[k][i] * w[k, j] for k in range(3))
                            + sum(dv[k][j] * w[i, k] for k in range(3))
                        )
                        worst = max(worst, abs(cartan.comp((i, j)).value(p) - direct))
            assert worst < 1e-10


class TestLieDerivativeMetric:
    def test_rotation_is_killing(self):
        ch = chart2()
        v = VectorField(ch, [f("-y", ch), f("x", ch)])
        g = MetricField.identity(ch)
        rows = lie_derivative_metric(v, g)
        assert max_abs_fields([rows[i][j] for i in range(2) for j in range(2)], ch.sample(10, 3)) == 0.0

    def test_zero_vector(self):
        ch = chart2()
        g = MetricField(ch, {(0, 0): f("1 + x^2", ch), (1, 1): const_field(1.0, 2)})
        rows = lie_derivative_metric(VectorField.zero(ch), g)
        assert max_abs_fields([rows[i][j] for i in range(2) for j in range(2)], ch.sample(10, 3)) == 0.0

    def test_dilation(self):
        ch = chart2()
        v = VectorField(ch, [f("x", ch), const_field(0.0, 2)])
        g = MetricField.identity(ch)
        rows = lie_derivative_metric(v, g)
        p = np.array([0.4, -0.9])
        assert rows[0][0].value(p) == pytest.approx(2.0)
        assert rows[0][1].value(p) == 0.0
        assert rows[1][1].value(p) == 0.0


class TestAntisymmetricStorage:
    def test_swapped_entry_is_negated_exactly(self):
        ch = chart2()
        field = f("x*y + 1", ch)
        form = FormField.build(ch, 2, [((1, 0), field)])
        p = np.array([0.7, -0.3])
        assert form.comp((0, 1)).value(p) == -field.value(p)
        assert form.comp((1, 0)).value(p) == field.value(p)

    def test_duplicate_entry_rejected(self):
        ch = chart2()
        with pytest.raises(ValueError):
            FormField.build(ch, 2, [((0, 1), f("x", ch)), ((1, 0), f("y", ch))])

    def test_repeated_index_rejected(self):
        ch = chart2()
        with pytest.raises(ValueError):
            FormField.build(ch, 2, [((0, 0), f("x", ch))])

    def test_sort_signed(self):
        assert sort_signed((2, 0, 1)) == ((0, 1, 2), 1)
        assert sort_signed((1, 0)) == ((0, 1), -1)
        assert sort_signed((1, 1)) == (None, 0)


class TestMatrixInverse:
    def test_identity(self):
        ch = chart2()
        g = MetricField.identity(ch)
        inv = g.inverse()
        p = np.array([0.2, 0.4])
        assert inv[0][0].value(p) == 1.0
        assert inv[0][1].value(p) == 0.0

    def test_inverse_jets_match_fd(self):
        # entries of the pointwise inverse carry exact first and second
        # derivatives; compare against finite differences of the inverse
        ch = chart2()
        entries = [
            [f("2 + x^2", ch), f("x*y/2", ch)],
            [f("x*y/2", ch), f("2 + y^2", ch)],
        ]
        inv = matrix_inverse_fields(entries)
        rng = np.random.default_rng(17)
        h = 1e-3

        def inv_entry(point, i, j):
            m = np.array([[entries[a][b].value(point) for b in range(2)] for a in range(2)])
            return np.linalg.inv(m)[i, j]

        for _ in range(5):
            p = rng.uniform(-1, 1, size=2)
            for i in range(2):
                for j in range(2):
                    jet = inv[i][j].jet(p)
                    assert jet.value == pytest.approx(inv_entry(p, i, j), abs=1e-12)
                    for k in range(2):
                        e = np.zeros(2)
                        e[k] = h
                        fd = (inv_entry(p + e, i, j) - inv_entry(p - e, i, j)) / (2 * h)
                        fd = (4 * fd - (inv_entry(p + 2 * e, i, j) - inv_entry(p - 2 * e, i, j)) / (4 * h)) / 3
                        assert jet.grad[k] == pytest.approx(fd, abs=1e-8)
                    assert np.array_equal(jet.hess, jet.hess.T)

    def test_product_is_identity(self):
        ch = chart2()
        g = MetricField(ch, {(0, 0): f("2 + x^2", ch), (0, 1): f("x*y/2", ch), (1, 1): f("2 + y^2", ch)})
        inv = g.inverse()
        for p in ch.sample(10, 19):
            gm = np.array([[g.g[i][j].value(p) for j in range(2)] for i in range(2)])
            im = np.array([[inv[i][j].value(p) for j in range(2)] for i in range(2)])
            assert np.allclose(gm @ im, np.eye(2), atol=1e-12)


_coeff = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


@given(_coeff, _coeff, st.floats(min_value=-1.4, max_value=1.4), st.floats(min_value=-1.4, max_value=1.4))
@settings(max_examples=60, deadline=None)
def test_field_algebra_product_rule(a, b, px, py):
    # jets of (a x + b y^2) * (x y) match the hand-expanded product
    ch = chart2()
    left = FormField(ch, 0, {(): f(f"{a!r}*x + {b!r}*y^2", ch)}).comp(())
    right = f("x*y", ch)
    prod = left * right
    p = np.array([px, py])
    jet = prod.jet(p)
    value = (a * px + b * py * py) * (px * py)
    assert jet.value == pytest.approx(value, rel=1e-12, abs=1e-12)
    dx = a * px * py + (a * px + b * py * py) * py
    dy = 2 * b * py * px * py + (a * px + b * py * py) * px
    assert jet.grad[0] == pytest.approx(dx, rel=1e-12, abs=1e-12)
    assert jet.grad[1] == pytest.approx(dy, rel=1e-12, abs=1e-12)


@given(_coeff, _coeff)
@settings(max_examples=40, deadline=None)
def test_antisymmetric_entry_signs(c1, c2):
    ch = chart2()
    form = FormField.build(ch, 2, [((1, 0), f(f"{c1!r} + {c2!r}*x", ch))])
    p = np.array([0.3, -0.8])
    assert form.comp((0, 1)).value(p) == -(c1 + c2 * 0.3)
    assert form.comp((1, 0)).value(p) == (c1 + c2 * 0.3)


class TestLieBracket:
    def test_coordinate_fields_commute(self):
        ch = chart2()
        u = VectorField(ch, [const_field(1.0, 2), const_field(0.0, 2)])
        v = VectorField(ch, [const_field(0.0, 2), const_field(1.0, 2)])
        w = lie_bracket(u, v)
        assert all(c.is_zero for c in w.comps)

    def test_scaling_example(self):
        # [d_x, x d_x] = d_x
        ch = Chart(("x",), ((-1.0, 1.0),))
        u = VectorField(ch, [const_field(1.0, 1)])
        v = VectorField(ch, [f("x", ch)])
        w = lie_bracket(u, v)
        assert w.comps[0].value(np.array([0.3])) == pytest.approx(1.0)
