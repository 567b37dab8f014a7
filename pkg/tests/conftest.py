"""Shared helpers: fixture loading, independent finite-difference oracles,
random model generators."""

from __future__ import annotations

import numpy as np
import pytest

from momsec.expressions import eval_jet
from momsec.fields import Chart, ExprField, const_field
from momsec.fixtures import fixture_bytes, fixture_names
from momsec.modelfile import load_model_bytes


@pytest.fixture(scope="session")
def fixture_models():
    return {name: load_model_bytes(fixture_bytes(name)) for name in fixture_names()}


def chart2(box=1.5) -> Chart:
    return Chart(("x", "y"), ((-box, box), (-box, box)))


def chart3(box=1.5) -> Chart:
    return Chart(("x", "y", "z"), ((-box, box),) * 3)


def f(source: str, chart: Chart) -> ExprField:
    return ExprField.parse(source, chart)


def zero(chart: Chart):
    return const_field(0.0, chart.dim)


# ---------------------------------------------------------------------------
# Independent finite-difference oracle (values only, Richardson-extrapolated)


def _value(expr, point):
    return eval_jet(expr, point).value


def fd_gradient(expr, point, h=1e-3):
    point = np.asarray(point, dtype=float)
    d = point.shape[0]
    out = np.empty(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0

        def central(step):
            return (_value(expr, point + step * e) - _value(expr, point - step * e)) / (2 * step)

        out[i] = (4.0 * central(h) - central(2 * h)) / 3.0
    return out


def fd_hessian(expr, point, h=1e-3):
    point = np.asarray(point, dtype=float)
    d = point.shape[0]
    out = np.empty((d, d))
    f0 = _value(expr, point)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = 1.0

        def second(step):
            return (
                _value(expr, point + step * ei) - 2.0 * f0 + _value(expr, point - step * ei)
            ) / (step * step)

        out[i, i] = (4.0 * second(h) - second(2 * h)) / 3.0
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = 1.0

            def cross(step):
                return (
                    _value(expr, point + step * (ei + ej))
                    - _value(expr, point + step * (ei - ej))
                    - _value(expr, point - step * (ei - ej))
                    + _value(expr, point - step * (ei + ej))
                ) / (4.0 * step * step)

            val = (4.0 * cross(h) - cross(2 * h)) / 3.0
            out[i, j] = val
            out[j, i] = val
    return out


# ---------------------------------------------------------------------------
# Random polynomial expressions


def random_poly_source(rng: np.random.Generator, coords, max_terms=6, max_degree=4) -> str:
    terms = []
    n_terms = int(rng.integers(1, max_terms + 1))
    for _ in range(n_terms):
        coeff = float(rng.uniform(-1.0, 1.0))
        powers = []
        budget = max_degree
        for name in coords:
            k = int(rng.integers(0, budget + 1))
            budget -= k
            if k == 1:
                powers.append(name)
            elif k > 1:
                powers.append(f"{name}^{k}")
        term = repr(coeff)
        if powers:
            term += "*" + "*".join(powers)
        terms.append(term)
    return " + ".join(terms)


def random_smooth_source(rng: np.random.Generator, coords) -> str:
    base = random_poly_source(rng, coords, max_terms=3, max_degree=2)
    wrap = rng.integers(0, 4)
    if wrap == 0:
        return base
    inner = random_poly_source(rng, coords, max_terms=2, max_degree=2)
    fn = ("sin", "cos", "tanh")[int(rng.integers(0, 3))]
    return f"{base} + {fn}({inner})"
