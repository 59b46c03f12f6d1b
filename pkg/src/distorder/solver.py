"""Fixed-point solver for the coupled displacement/stress system.

The displacement solves ``y = T y`` with

    T y = -l * J y + I^2 f(., y) + v0 t + y0,    J y = int phi1(g) I^(2-g) y dg,

where ``l`` is the fundamental solution of the constitutive law. The
stress is recovered afterwards as ``z = l * int phi1(g) D^g y dg``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import AdmissibilityError, DivergenceError, InvalidArgumentError, NoBallError
from .forcing import ForcingTerm
from .fracops import frac_integral, integral_weights
from .grid import GridFunction, TimeGrid, diff1, diff2, make_grid, trapezoid
from .kernels import causal_dot
from .laplace import AdmissibilityReport, FundamentalSolution, check_A0, fundamental_solution
from .weights import (
    AtomicWeight,
    ExponentialWeight,
    OrderWeight,
    classify_weight,
    distributed_derivative,
)


class UncertifiedHorizonWarning(UserWarning):
    """The requested horizon exceeds the certified existence interval."""


@dataclass(frozen=True)
class ProblemSpec:
    phi1: OrderWeight
    phi2: OrderWeight
    f: ForcingTerm
    y0: float
    v0: float
    horizon_request: float
    ball_radius: float

    def __post_init__(self):
        for name in ("y0", "v0", "horizon_request", "ball_radius"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise InvalidArgumentError(f"{name} must be finite")
            object.__setattr__(self, name, val)
        if not self.horizon_request > 0:
            raise InvalidArgumentError("horizon_request must be positive")
        if not self.ball_radius > max(abs(self.y0), abs(self.v0)):
            raise InvalidArgumentError(
                f"ball radius {self.ball_radius} must exceed max(|y0|, |v0|) = {max(abs(self.y0), abs(self.v0))}"
            )


@dataclass(frozen=True)
class DeltaEstimate:
    delta: float
    M_delta: float
    D_delta: float
    C_delta: float
    alpha: float = 1.0
    slack: float = 0.0


@dataclass
class SolutionPair:
    y: GridFunction
    z: GridFunction
    delta_used: float
    picard_iters: int
    fixed_point_residual: float
    constitutive_residual: float
    ode_residual: float
    dissipation_work: float
    classification: dict[str, str]
    converged: bool
    certified: bool = False
    z_ode: GridFunction | None = None
    increments: list[float] = field(default_factory=list)
    delta: DeltaEstimate | None = None


# -- operators ------------------------------------------------------------------


def _phi1_measure(phi1: OrderWeight) -> list[tuple[float, float]]:
    measure = phi1.measure()
    for _, g in measure:
        if g >= 2:
            raise InvalidArgumentError(f"phi1 support must stay below order 2 (found {g:g})")
    if not isinstance(phi1, AtomicWeight) and phi1.support[1] >= 2:
        raise InvalidArgumentError("phi1 support must stay below order 2")
    return measure


class JOperator:
    """``J y = int phi1(g) I^(2-g) y dg`` assembled once as a single Toeplitz operator."""

    def __init__(self, phi1: OrderWeight, grid: TimeGrid):
        self.grid = grid
        self.toeplitz = np.zeros(grid.size)
        self.corr = np.zeros(grid.size)
        for w, g in _phi1_measure(phi1):
            tp, corr = integral_weights(2.0 - g, grid)
            self.toeplitz += w * tp
            self.corr += w * corr

    def __call__(self, y: GridFunction) -> GridFunction:
        if y.grid != self.grid:
            raise InvalidArgumentError("J operator applied on a different grid")
        vals = causal_dot(self.toeplitz, y.values) + self.corr * y.values[0]
        vals[0] = 0.0
        return GridFunction(self.grid, vals)


def J_op(phi1: OrderWeight, y: GridFunction) -> GridFunction:
    """``int phi1(g) I^(2-g) y dg`` (only fractional integrals of positive order appear)."""
    return JOperator(phi1, y.grid)(y)


def _forcing_values(problem: ProblemSpec, y: GridFunction) -> GridFunction:
    vals = np.asarray(problem.f(y.t, y.values), dtype=float)
    if vals.shape != y.values.shape:
        raise InvalidArgumentError("forcing returned values of the wrong shape")
    return GridFunction(y.grid, vals)


class TOperator:
    """The fixed-point map, with ``J`` and ``l`` precomputed for repeated application."""

    def __init__(self, problem: ProblemSpec, kernel: FundamentalSolution, grid: TimeGrid | None = None):
        grid = kernel.grid if grid is None else grid
        if kernel.grid != grid:
            raise InvalidArgumentError("kernel grid differs from the solver grid")
        self.problem = problem
        self.kernel = kernel
        self.grid = grid
        self.J = JOperator(problem.phi1, grid)
        self.affine = problem.y0 + problem.v0 * grid.nodes

    def __call__(self, y: GridFunction) -> GridFunction:
        if y.grid != self.grid:
            raise InvalidArgumentError("T operator applied on a different grid")
        R = self.kernel.convolve(self.J(y))
        G = frac_integral(_forcing_values(self.problem, y), 2.0)
        vals = -R.values + G.values + self.affine
        vals[0] = self.problem.y0
        return GridFunction(self.grid, vals)


def T_op(problem: ProblemSpec, kernel: FundamentalSolution, y: GridFunction) -> GridFunction:
    """``-(l * J y) + I^2 f(., y) + v0 t + y0``."""
    if kernel.grid != y.grid:
        raise InvalidArgumentError("kernel grid differs from the grid of y")
    return TOperator(problem, kernel)(y)


# -- existence interval ---------------------------------------------------------


def _M(phi1: OrderWeight, t: float) -> float:
    if t <= 0:
        return 0.0
    return float(sum(abs(w) * t ** (2.0 - g) / gamma_fn(3.0 - g) for w, g in _phi1_measure(phi1)))


def ball_inequality(problem: ProblemSpec, kernel: FundamentalSolution, t: float) -> tuple[float, float, float, float]:
    """Left-hand side of the self-mapping bound at ``t`` and its constants ``(lhs, M, D, C)``."""
    r = problem.ball_radius
    M = _M(problem.phi1, t)
    D = float(kernel.abs_mass(t)) if M > 0 else 0.0
    growth = problem.f.growth_bound(t, r)
    alpha = getattr(problem.f, "alpha", 1.0)
    C = growth / r**alpha if problem.f.satisfies_Al else growth
    lhs = D * M * r + growth + abs(problem.v0) * t + abs(problem.y0)
    return lhs, M, D, C


def delta_estimate(problem: ProblemSpec, kernel: FundamentalSolution) -> DeltaEstimate:
    """Largest ``delta <= horizon_request`` for which ``T`` maps the r-ball into itself."""
    r = problem.ball_radius
    t_max = min(problem.horizon_request, kernel.grid.horizon)
    alpha = getattr(problem.f, "alpha", 1.0)

    def excess(t: float) -> float:
        return ball_inequality(problem, kernel, t)[0] - r

    if excess(t_max) <= 0:
        delta = t_max
    else:
        h = kernel.grid.h
        if excess(min(h, t_max)) > 0:
            raise NoBallError(
                f"no delta >= one grid step ({h:g}) maps the ball of radius {r:g} into itself; enlarge r"
            )
        lo, hi = min(h, t_max), t_max
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if excess(mid) <= 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-14 * hi:
                break
        delta = lo
    lhs, M, D, C = ball_inequality(problem, kernel, delta)
    return DeltaEstimate(delta, M, D, C, alpha, r - lhs)


# -- z recovery and diagnostics -------------------------------------------------


def recover_z(problem: ProblemSpec, kernel: FundamentalSolution, y: GridFunction) -> tuple[GridFunction, GridFunction]:
    """``z = l * int phi1(g) D^g y dg`` and the cross-check ``z_ode = f(., y) - y''``."""
    if isinstance(problem.phi1, AtomicWeight) and not problem.phi1.atoms:
        z = GridFunction(y.grid, np.zeros(y.grid.size))
    else:
        z = kernel.convolve(distributed_derivative(problem.phi1, y))
    z_ode = _forcing_values(problem, y) - diff2(y)
    return z, z_ode


def dissipation_work(y: GridFunction, z: GridFunction) -> float:
    """``A_d = int z y' dt`` by the trapezoid rule."""
    if y.grid != z.grid:
        raise InvalidArgumentError("y and z live on different grids")
    return trapezoid(GridFunction(y.grid, z.values * diff1(y).values))


def _weak_residual(problem: ProblemSpec, y: GridFunction, z: GridFunction) -> float:
    # twice-integrated form of y'' + z = f
    lhs = y.values - problem.y0 - problem.v0 * y.t + frac_integral(z, 2.0).values
    rhs = frac_integral(_forcing_values(problem, y), 2.0).values
    return float(np.max(np.abs(lhs - rhs)))


# -- classification -------------------------------------------------------------


def _phi2_ok(problem: ProblemSpec, report: AdmissibilityReport | None) -> tuple[str | None, float]:
    """Structural class of phi2 admitting a kernel, and the order spread ``g0 - gk``."""
    wc = classify_weight(problem.phi2, "phi2")
    if wc.name == "fidva":
        if report is None:
            report = check_A0(problem.phi2)
        if report.verdict != "admissible":
            return None, 0.0
        g = problem.phi2.orders
        return "fidva", float(g[0] - g[-1])
    if wc.name == "Phi5":
        return "Phi5", 0.0
    return None, 0.0


def _grant(flags: dict[str, str], flag: str, clause: str) -> None:
    if flag not in flags:
        flags[flag] = clause


def classify_solution(
    problem: ProblemSpec,
    sol: SolutionPair | None = None,
    report: AdmissibilityReport | None = None,
) -> dict[str, str]:
    """Solution classes granted by the existence theory, each with the clause that fired.

    Purely hypothesis driven: the numerical solution is never inspected.
    Returns a mapping from ``mild``/``non_impact``/``classical`` to a
    description of the hypotheses that granted it.
    """
    flags: dict[str, str] = {}
    f = problem.f
    Al, Alp, Alpp = bool(f.satisfies_Al), bool(f.satisfies_Alp), bool(f.satisfies_Alpp)
    y0_zero = problem.y0 == 0.0
    v0_zero = problem.v0 == 0.0
    p1 = classify_weight(problem.phi1, "phi1")
    p2, spread = _phi2_ok(problem, report)
    if p2 is None or not p1.classified:
        return flags
    atomic1 = isinstance(problem.phi1, AtomicWeight)
    if atomic1:
        orders = problem.phi1.orders
        top = float(orders[0]) if len(orders) else -math.inf
    else:
        top = float(problem.phi1.support[1])

    if p2 == "fidva":
        if atomic1:
            if Al:
                _grant(flags, "mild", "Phi4, A0, A_l")
                if y0_zero and spread > 1:
                    _grant(flags, "non_impact", "Phi4, A0, A_l, y0 = 0, g0 - gk > 1")
                if top < 1:
                    _grant(flags, "non_impact", "Phi4, A0, A_l, beta0 < 1")
            if Alp and Al:
                if y0_zero and v0_zero:
                    _grant(flags, "classical", "Phi4, A0, A_l', y0 = v0 = 0")
                if top < 1 and y0_zero:
                    _grant(flags, "classical", "Phi4, A0, A_l', beta0 < 1, y0 = 0")
                if top < 0:
                    _grant(flags, "classical", "Phi4, A0, A_l', beta0 < 0")
        else:
            # continuous phi1: d < 2 (Phi1), d < 1 (Phi2), d < 0 (Phi3)
            if Al:
                _grant(flags, "mild", "Phi1, A0, A_l")
                if y0_zero and spread > 1:
                    _grant(flags, "non_impact", "Phi1, A0, A_l, y0 = 0, g0 - gk > 1")
                if top < 1:
                    _grant(flags, "non_impact", "Phi2, A0, A_l")
            if Alp:
                if Al and y0_zero and v0_zero:
                    _grant(flags, "classical", "Phi1, A0, A_l', y0 = v0 = 0")
                if Al and top < 1 and y0_zero:
                    _grant(flags, "classical", "Phi2, A0, A_l', y0 = 0")
                if top < 0:
                    _grant(flags, "classical", "Phi3, A0, A_l'")
            if Alpp and top < 1 and y0_zero:
                _grant(flags, "classical", "Phi2, A0, A_l'', y0 = 0")
    else:
        exp_pair = (
            isinstance(problem.phi1, ExponentialWeight)
            and isinstance(problem.phi2, ExponentialWeight)
            and problem.phi1.scale == 1.0
            and problem.phi2.scale == 1.0
            and problem.phi1.base > problem.phi2.base
        )
        if Al:
            _grant(flags, "mild", "Phi5, A_l")
            if top < 1:
                _grant(flags, "non_impact", "Phi5, A_l, supp phi1 in [c, 1)")
            if exp_pair:
                _grant(flags, "non_impact", "exponential weights b > a, A_l")
            if Alp:
                if y0_zero and v0_zero:
                    _grant(flags, "classical", "Phi5, A_l', y0 = v0 = 0")
                if top < 1 and y0_zero:
                    _grant(flags, "classical", "Phi5, A_l', supp phi1 in [c, 1), y0 = 0")
                if top < 0:
                    _grant(flags, "classical", "Phi5, A_l', supp phi1 in [c, 0)")
                if exp_pair and y0_zero:
                    _grant(flags, "classical", "exponential weights b > a, A_l', y0 = 0")

    # a classical solution is non-impact, a non-impact solution is mild
    if "classical" in flags:
        _grant(flags, "non_impact", "implied by classical")
    if "non_impact" in flags:
        _grant(flags, "mild", "implied by non_impact")
    return flags


# -- Picard iteration -----------------------------------------------------------


def picard_solve(
    problem: ProblemSpec,
    grid: TimeGrid,
    tol: float = 1e-10,
    max_iter: int = 200,
    damping: float = 1.0,
    *,
    certify: bool = True,
    kernel: FundamentalSolution | None = None,
) -> SolutionPair:
    """Damped Picard iteration for ``y = T y`` on ``grid``.

    Non-convergence is reported through ``converged = False``, not raised.
    With ``certify`` the grid horizon is compared with the existence
    interval from :func:`delta_estimate`; a longer horizon triggers an
    :class:`UncertifiedHorizonWarning` and the run proceeds uncertified.
    """
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    if not 0 < damping <= 1:
        raise InvalidArgumentError("damping must lie in (0, 1]")
    if max_iter < 1:
        raise InvalidArgumentError("max_iter must be at least 1")
    if kernel is None:
        kernel = fundamental_solution(problem.phi2, grid)
    T = TOperator(problem, kernel, grid)

    certified = False
    est = None
    if certify:
        try:
            if problem.horizon_request <= grid.horizon:
                est_kernel = kernel
            else:
                est_kernel = fundamental_solution(problem.phi2, make_grid(problem.horizon_request, grid.n_steps))
            est = delta_estimate(problem, est_kernel)
            certified = grid.horizon <= est.delta * (1 + 1e-12)
            if not certified:
                warnings.warn(
                    f"horizon {grid.horizon:g} exceeds the certified interval delta = {est.delta:.6g}; "
                    "running uncertified",
                    UncertifiedHorizonWarning,
                    stacklevel=2,
                )
        except NoBallError as exc:
            warnings.warn(f"{exc}; running uncertified", UncertifiedHorizonWarning, stacklevel=2)
        except InvalidArgumentError as exc:
            warnings.warn(f"no existence interval: {exc}; running uncertified", UncertifiedHorizonWarning, stacklevel=2)

    y = GridFunction(grid, T.affine.copy())
    increments: list[float] = []
    converged = False
    iters = 0
    for iters in range(1, max_iter + 1):
        Ty = T(y).values
        if not np.all(np.isfinite(Ty)):
            raise DivergenceError(f"non-finite iterate at iteration {iters}", iters)
        new = (1.0 - damping) * y.values + damping * Ty
        new[0] = problem.y0
        step = float(np.max(np.abs(new - y.values)))
        increments.append(step)
        y = GridFunction(grid, new)
        if step < tol:
            converged = True
            break

    fp_res = float(np.max(np.abs(T(y).values - y.values)))
    z, z_ode = recover_z(problem, kernel, y)
    cons = float(np.max(np.abs(z.values - z_ode.values)))
    classification = classify_solution(problem, None, kernel.report)
    return SolutionPair(
        y=y,
        z=z,
        delta_used=grid.horizon,
        picard_iters=iters,
        fixed_point_residual=fp_res,
        constitutive_residual=cons,
        ode_residual=_weak_residual(problem, y, z),
        dissipation_work=dissipation_work(y, z),
        classification=classification,
        converged=converged,
        certified=certified and converged,
        z_ode=z_ode,
        increments=increments,
        delta=est,
    )


__all__ = [
    "AdmissibilityError",
    "DeltaEstimate",
    "JOperator",
    "J_op",
    "ProblemSpec",
    "SolutionPair",
    "TOperator",
    "T_op",
    "UncertifiedHorizonWarning",
    "ball_inequality",
    "classify_solution",
    "delta_estimate",
    "dissipation_work",
    "picard_solve",
    "recover_z",
]
