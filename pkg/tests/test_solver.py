from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import rgamma

from distorder.errors import DivergenceError, InvalidArgumentError, NoBallError
from distorder.forcing import LipschitzForcing, PendulumForcing, PowerBoundForcing, TimeOnlyForcing, ZeroForcing
from distorder.grid import GridFunction, make_grid
from distorder.laplace import fundamental_solution
from distorder.oracles import direct_coupled_solve
from distorder.solver import (
    ProblemSpec,
    UncertifiedHorizonWarning,
    J_op,
    T_op,
    ball_inequality,
    classify_solution,
    delta_estimate,
    dissipation_work,
    picard_solve,
    recover_z,
)
from distorder.weights import AtomicWeight, ContinuousWeight, ExponentialWeight

# int_0^1 dg / Gamma(3 - g), adaptive quadrature
INT_RGAMMA_3MG = 0.7518497084956386

ONE = AtomicWeight(((1.0, 0.0),))
EMPTY = AtomicWeight()


def spec(phi1=ONE, phi2=ONE, f=None, y0=0.0, v0=0.0, T=1.0, r=2.0):
    return ProblemSpec(phi1, phi2, ZeroForcing() if f is None else f, y0, v0, T, r)


def test_frozen_quadrature_value():
    val, _ = quad(lambda g: rgamma(3.0 - g), 0.0, 1.0, epsabs=1e-14)
    assert val == pytest.approx(INT_RGAMMA_3MG, abs=1e-12)


def test_problem_spec_ball_radius():
    with pytest.raises(InvalidArgumentError):
        spec(y0=1.0, r=1.0)
    with pytest.raises(InvalidArgumentError):
        spec(v0=-3.0, r=2.0)
    with pytest.raises(InvalidArgumentError):
        spec(T=0.0)


# -- J and T ---------------------------------------------------------------------


def test_J_examples():
    g = make_grid(1.0, 400)
    one = GridFunction.constant(g, 1.0)
    assert np.allclose(J_op(ONE, one).values, g.nodes**2 / 2, atol=1e-12)
    assert np.allclose(J_op(AtomicWeight(((1.0, 1.0),)), one).values, g.nodes, atol=1e-12)
    cont = J_op(ContinuousWeight("uniform", (0.0, 1.0)), one)
    assert cont.values[-1] == pytest.approx(INT_RGAMMA_3MG, abs=2e-3)


def test_J_rejects_order_two():
    g = make_grid(1.0, 10)
    with pytest.raises(InvalidArgumentError):
        J_op(AtomicWeight(((1.0, 2.0),)), GridFunction.constant(g, 1.0))


def test_T_examples():
    g = make_grid(1.0, 400)
    ker = fundamental_solution(ONE, g)
    y = GridFunction.from_callable(g, np.exp)
    p = spec(phi1=EMPTY, y0=0.3, v0=-0.1)
    assert np.allclose(T_op(p, ker, y).values, 0.3 - 0.1 * g.nodes, atol=1e-15)
    out = T_op(spec(), ker, GridFunction.constant(g, 1.0))
    assert np.allclose(out.values, -(g.nodes**2) / 2, atol=1e-12)
    cos = GridFunction.from_callable(g, np.cos)
    out = T_op(spec(y0=1.0), ker, cos)
    assert np.max(np.abs(out.values - cos.values)) <= 5e-3


def test_T_superposition():
    g = make_grid(1.0, 200)
    p = spec(phi1=AtomicWeight(((1.0, 1.5), (0.5, 0.3))), phi2=AtomicWeight(((1.0, 1.0), (2.0, 0.0))), y0=0.2, v0=0.1)
    ker = fundamental_solution(p.phi2, g)
    zero = GridFunction.constant(g, 0.0)
    base = T_op(p, ker, zero).values
    u = GridFunction.from_callable(g, np.sin)
    v = GridFunction.from_callable(g, lambda t: t**2)
    lin = lambda w: T_op(p, ker, w).values - base  # noqa: E731
    lhs = lin(u * 2.0 + v * -3.0)
    rhs = 2.0 * lin(u) - 3.0 * lin(v)
    # node 0 is pinned to y0 in T, so it is excluded from the linear part
    assert np.max(np.abs(lhs[1:] - rhs[1:])) <= 1e-10


def test_T_grid_mismatch():
    ker = fundamental_solution(ONE, make_grid(1.0, 10))
    with pytest.raises(InvalidArgumentError):
        T_op(spec(), ker, GridFunction.constant(make_grid(1.0, 20), 1.0))


# -- delta ---------------------------------------------------------------------


def test_delta_empty_phi1():
    ker = fundamental_solution(ONE, make_grid(5.0, 100))
    est = delta_estimate(spec(phi1=EMPTY, v0=1.0, T=5.0, r=2.0), ker)
    assert est.delta == pytest.approx(2.0, rel=1e-10)
    assert est.M_delta == 0.0 and est.C_delta == 0.0
    est = delta_estimate(spec(phi1=EMPTY, v0=1.0, T=0.5, r=2.0), ker)
    assert est.delta == 0.5


def test_delta_integrator_kernel():
    w = AtomicWeight(((1.0, 1.0),))
    ker = fundamental_solution(w, make_grid(3.0, 300))
    est = delta_estimate(spec(phi1=w, phi2=w, T=3.0, r=1.0), ker)
    # M_t = t / Gamma(2) = t and D_t = t, so t^2 <= 1
    assert est.delta == pytest.approx(1.0, rel=1e-8)
    assert est.slack >= 0


def test_delta_no_ball():
    ker = fundamental_solution(ONE, make_grid(1.0, 10))
    with pytest.raises(NoBallError):
        delta_estimate(spec(y0=0.99999, v0=0.0, r=1.0, f=PendulumForcing(50.0)), ker)


@pytest.mark.parametrize(
    "f",
    [ZeroForcing(), PendulumForcing(0.5), PowerBoundForcing(1.0, 0.0, 0.5), TimeOnlyForcing("sin", 1.0)],
)
def test_delta_certificate_holds(f):
    p = spec(phi1=AtomicWeight(((1.0, 1.5),)), phi2=AtomicWeight(((1.0, 0.5), (1.0, 0.0))), f=f, y0=0.1, v0=0.2, T=2.0, r=1.0)
    ker = fundamental_solution(p.phi2, make_grid(2.0, 200))
    est = delta_estimate(p, ker)
    lhs, M, D, C = ball_inequality(p, ker, est.delta)
    assert lhs <= p.ball_radius
    assert est.slack >= 0


# -- picard ----------------------------------------------------------------------


def test_harmonic(backend):
    g = make_grid(1.0, 400)
    sol = picard_solve(spec(y0=1.0), g, tol=1e-8)
    assert sol.converged and sol.picard_iters <= 60
    assert np.max(np.abs(sol.y.values - np.cos(g.nodes))) <= 1e-3
    assert np.max(np.abs(sol.z.values - sol.y.values)) <= 1e-3
    assert sol.constitutive_residual <= 5e-3
    assert sol.certified
    assert sol.y.values[0] == 1.0
    assert abs((sol.y.values[1] - sol.y.values[0]) / g.h) <= 10 * g.h
    assert sol.fixed_point_residual <= 2e-8


def test_empty_phi1_one_iteration():
    g = make_grid(1.0, 50)
    sol = picard_solve(spec(phi1=EMPTY, y0=0.3, v0=-0.1), g)
    assert np.array_equal(sol.y.values, 0.3 - 0.1 * g.nodes)
    assert sol.picard_iters == 1
    assert np.all(sol.z.values == 0)


def test_bagley_torvik_matches_oracle():
    g = make_grid(0.5, 400)
    p = spec(phi1=AtomicWeight(((1.0, 1.5),)), f=TimeOnlyForcing("const", 1.0), T=0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UncertifiedHorizonWarning)
        sol = picard_solve(p, g, tol=1e-10)
    ref = direct_coupled_solve(p, g)
    assert sol.converged
    assert np.max(np.abs(sol.y.values - ref.y.values)) <= 5e-3


@pytest.mark.parametrize(
    "phi1, phi2, f",
    [
        (AtomicWeight(((1.0, 0.5),)), AtomicWeight(((1.0, 0.5), (1.0, 0.0))), LipschitzForcing(1.0, 1.0, "tanh")),
        (AtomicWeight(((1.0, 1.0), (0.5, 0.5))), AtomicWeight(((1.0, 1.0), (1.0, 0.0))), PendulumForcing(0.5)),
        (ONE, ONE, LipschitzForcing(-1.0, 0.0, "sin")),
    ],
)
def test_oracle_equivalence_invariant(phi1, phi2, f):
    g = make_grid(0.5, 400)
    p = spec(phi1, phi2, f, y0=0.0, v0=0.5, T=0.5, r=2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UncertifiedHorizonWarning)
        sol = picard_solve(p, g, tol=1e-10)
    ref = direct_coupled_solve(p, g)
    assert np.max(np.abs(sol.y.values - ref.y.values)) <= 10 * max(1e-10, g.h)


def test_uncertified_warning_and_flag():
    g = make_grid(2.0, 200)
    w = AtomicWeight(((1.0, 1.0),))
    with pytest.warns(UncertifiedHorizonWarning):
        sol = picard_solve(spec(phi1=w, phi2=w, T=2.0, r=1.0), g, tol=1e-8)
    assert not sol.certified


def test_not_converged_is_reported():
    g = make_grid(1.0, 100)
    sol = picard_solve(spec(y0=1.0), g, tol=1e-14, max_iter=2)
    assert not sol.converged and not sol.certified
    assert sol.picard_iters == 2 and len(sol.increments) == 2


def test_divergence_raises():
    g = make_grid(1.0, 50)
    p = spec(f=PowerBoundForcing(1e200, 0.0, 3.0), y0=1.0, r=2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(DivergenceError):
            picard_solve(p, g, max_iter=50)


def test_damping_converges_to_same_solution():
    g = make_grid(1.0, 200)
    a = picard_solve(spec(y0=1.0), g, tol=1e-11)
    b = picard_solve(spec(y0=1.0), g, tol=1e-11, damping=0.5, max_iter=500)
    assert b.converged and b.picard_iters > a.picard_iters
    assert np.max(np.abs(a.y.values - b.y.values)) <= 1e-9


def test_argument_validation():
    g = make_grid(1.0, 10)
    for kw in ({"tol": 0.0}, {"damping": 0.0}, {"damping": 1.5}, {"max_iter": 0}):
        with pytest.raises(InvalidArgumentError):
            picard_solve(spec(), g, **kw)


# -- z, dissipation ------------------------------------------------------------


def test_recover_z_examples():
    g = make_grid(1.0, 100)
    y = GridFunction.from_callable(g, np.sin)
    ker = fundamental_solution(ONE, g)
    z, _ = recover_z(spec(), ker, y)
    assert np.array_equal(z.values, y.values)
    z, z_ode = recover_z(spec(phi1=EMPTY), ker, y)
    assert np.all(z.values == 0)
    assert np.allclose(z_ode.values[1:-1], np.sin(g.nodes[1:-1]), atol=1e-4)


def test_dissipation_examples():
    g = make_grid(2 * math.pi, 2000)
    s = GridFunction.from_callable(g, np.sin)
    c = GridFunction.from_callable(g, np.cos)
    assert dissipation_work(s, s) == pytest.approx(0.0, abs=1e-3)
    assert dissipation_work(s, GridFunction.constant(g, 0.0)) == 0.0
    assert dissipation_work(s, c) == pytest.approx(math.pi, abs=1e-2)


def test_dissipation_grid_mismatch():
    with pytest.raises(InvalidArgumentError):
        dissipation_work(GridFunction.constant(make_grid(1.0, 4), 0.0), GridFunction.constant(make_grid(1.0, 5), 0.0))


# -- classification ----------------------------------------------------------------


def test_classify_spread_non_impact():
    p = spec(phi1=AtomicWeight(((1.0, 1.2),)), phi2=AtomicWeight(((1.0, 1.5), (1.0, 0.25))), f=PendulumForcing(1.0))
    flags = classify_solution(p)
    assert set(flags) == {"mild", "non_impact"}
    assert "g0 - gk > 1" in flags["non_impact"]


def test_classify_classical_zero_data():
    p = spec(phi1=ContinuousWeight("uniform", (0.2, 1.4)), phi2=AtomicWeight(((1.0, 1.0), (1.0, 0.0))), f=LipschitzForcing())
    flags = classify_solution(p)
    assert set(flags) == {"mild", "non_impact", "classical"}
    assert "y0 = v0 = 0" in flags["classical"]


def test_classify_exponential_pair():
    p = spec(phi1=ExponentialWeight(2.0), phi2=ExponentialWeight(1.2), f=ZeroForcing(), v0=1.0)
    flags = classify_solution(p)
    assert "exponential" in flags["classical"]
    # a > b violates the Second Law ordering: no exponential clause
    p = spec(phi1=ExponentialWeight(1.2), phi2=ExponentialWeight(2.0), f=ZeroForcing(), v0=1.0)
    assert "classical" not in classify_solution(p)


def test_classify_inadmissible_is_empty():
    p = spec(phi2=AtomicWeight(((1.0, 1.0), (-1.0, 0.0))))
    assert classify_solution(p) == {}


def test_classify_time_only_grants_nothing():
    p = spec(f=TimeOnlyForcing("const", 1.0))
    assert classify_solution(p) == {}


def test_classify_pendulum_never_classical():
    for y0, v0 in ((0.0, 0.0), (0.5, 0.5)):
        p = spec(f=PendulumForcing(0.5), y0=y0, v0=v0)
        assert "classical" not in classify_solution(p)


def test_classification_chain_on_solution():
    g = make_grid(1.0, 100)
    sol = picard_solve(spec(y0=1.0), g, tol=1e-8)
    flags = sol.classification
    if "classical" in flags:
        assert "non_impact" in flags
    if "non_impact" in flags:
        assert "mild" in flags
