from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distorder.errors import InvalidArgumentError
from distorder.fracops import SmoothnessWarning, f_alpha, frac_derivative, frac_integral, integral_weights
from distorder.grid import GridFunction, make_grid
from distorder.oracles import power_rule_reference


def test_f_alpha_values():
    g = make_grid(1.0, 10)
    assert np.all(f_alpha(1.0, g).values == 1.0)
    assert np.allclose(f_alpha(2.0, g).values, g.nodes)
    half = f_alpha(0.5, g)
    assert half.values[-1] == pytest.approx(0.5641895835477563, abs=1e-12)
    # node 0 holds the first-cell average
    assert half.values[0] == pytest.approx(g.h**-0.5 / math.gamma(1.5))


def test_f_alpha_rejects_nonpositive():
    with pytest.raises(InvalidArgumentError):
        f_alpha(0.0, make_grid(1.0, 4))


def test_integral_order_zero_is_identity():
    g = make_grid(1.0, 20)
    y = GridFunction.from_callable(g, np.cos)
    assert frac_integral(y, 0.0) is y


def test_integral_of_one():
    g = make_grid(1.0, 50)
    out = frac_integral(GridFunction.constant(g, 1.0), 1.0)
    assert np.max(np.abs(out.values - g.nodes)) < 1e-12


def test_half_integral_of_t():
    g = make_grid(1.0, 100)
    out = frac_integral(GridFunction.from_callable(g, lambda t: t), 0.5)
    assert out.values[-1] == pytest.approx(0.7522527780636751, abs=1e-4)


def test_negative_order_rejected():
    g = make_grid(1.0, 10)
    with pytest.raises(InvalidArgumentError):
        frac_integral(GridFunction.constant(g, 1.0), -0.5)
    for bad in (-0.1, 2.0, 2.5):
        with pytest.raises(InvalidArgumentError):
            frac_derivative(GridFunction.constant(g, 1.0), bad)


@pytest.mark.parametrize("gamma", [0.3, 0.5, 1.2, 1.7])
@pytest.mark.parametrize("p", [0, 1, 2])
def test_power_rule(gamma, p, backend):
    g = make_grid(1.0, 400)
    out = frac_integral(GridFunction.from_callable(g, lambda t: t**p), gamma)
    ref = np.array([power_rule_reference(gamma, p, t) for t in g.nodes])
    assert np.max(np.abs(out.values - ref)) <= 1e-3


def test_power_rule_second_order_for_p1():
    errs = []
    for N in (100, 200):
        g = make_grid(1.0, N)
        out = frac_integral(GridFunction.from_callable(g, lambda t: t * t), 0.5)
        ref = np.array([power_rule_reference(0.5, 2, t) for t in g.nodes])
        errs.append(np.max(np.abs(out.values - ref)[g.nodes >= 0.25]))
    assert errs[0] / errs[1] > 3


def test_semigroup():
    g = make_grid(1.0, 200)
    y = GridFunction.from_callable(g, np.sin)
    twice = frac_integral(frac_integral(y, 0.5), 0.5)
    assert np.max(np.abs(twice.values - frac_integral(y, 1.0).values)) <= 1e-3


@pytest.mark.parametrize("gamma", [0.25, 0.5, 0.7, 0.75, 1.5])
def test_left_inverse(gamma):
    g = make_grid(1.0, 400)
    y = GridFunction.from_callable(g, np.sin)
    back = frac_derivative(frac_integral(y, gamma), gamma)
    assert np.max(np.abs(back.values - y.values)) <= 5e-3


def test_derivative_integer_case():
    g = make_grid(1.0, 200)
    d = frac_derivative(GridFunction.from_callable(g, lambda t: t * t), 1.0)
    assert np.max(np.abs(d.values[1:-1] - 2 * g.nodes[1:-1])) < 1e-10


def test_half_derivative_of_constant_is_not_zero():
    g = make_grid(1.0, 400)
    d = frac_derivative(GridFunction.constant(g, 1.0), 0.5)
    assert d.values[-1] == pytest.approx(0.5641895835477563, abs=5e-3)


def test_limit_small_order():
    g = make_grid(1.0, 200)
    y = GridFunction.from_callable(g, lambda t: np.cos(3 * t))
    out = frac_integral(y, 1e-6)
    assert np.max(np.abs(out.values[1:] - y.values[1:])) <= 1e-3


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.95), st.floats(-3, 3), st.floats(-3, 3))
def test_integral_linear(gamma, a, b):
    g = make_grid(1.0, 40)
    u = GridFunction.from_callable(g, np.sin)
    v = GridFunction.from_callable(g, np.exp)
    lhs = frac_integral(u * a + v * b, gamma).values
    rhs = a * frac_integral(u, gamma).values + b * frac_integral(v, gamma).values
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12 * (1 + np.max(np.abs(rhs))))


def test_integral_weights_shapes():
    g = make_grid(1.0, 16)
    tp, corr = integral_weights(0.5, g)
    assert tp.shape == corr.shape == (17,)


def test_smoothness_warning_on_rough_data():
    g = make_grid(1.0, 64)
    rng = np.random.default_rng(0)
    y = GridFunction(g, rng.standard_normal(65))
    with pytest.warns(SmoothnessWarning):
        frac_derivative(y, 0.5)


def test_no_warning_on_smooth_data():
    g = make_grid(1.0, 64)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        frac_derivative(GridFunction.from_callable(g, np.sin), 0.5)
