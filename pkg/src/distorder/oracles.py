"""Independent reference computations.

Nothing here shares discretization code with the main solver path: the
Mittag-Leffler function is summed from its series, half-plane roots come
from a polynomial companion matrix, and the coupled system is marched
with Grunwald-Letnikov weights instead of product-trapezoid weights and
Laplace inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, rgamma

from .errors import InvalidArgumentError, OracleError
from .forcing import PowerBoundForcing
from .grid import GridFunction, TimeGrid, diff2
from .weights import AtomicWeight

ML_MAX_ARG = 10.0
ML_MAX_TERMS = 500


@dataclass(frozen=True)
class MLParams:
    alpha: float
    beta: float
    x: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise InvalidArgumentError("Mittag-Leffler parameters need alpha > 0 and beta > 0")
        if not abs(self.x) <= ML_MAX_ARG:
            raise InvalidArgumentError(f"Mittag-Leffler argument must satisfy |x| <= {ML_MAX_ARG:g}, got {self.x}")


def mittag_leffler(alpha: float, beta: float, x: float) -> float:
    """Two-parameter Mittag-Leffler ``E_{alpha,beta}(x)`` by compensated series summation.

    Examples
    --------
    >>> round(mittag_leffler(1.0, 1.0, 1.0), 12)
    2.718281828459
    """
    p = MLParams(float(alpha), float(beta), float(x))
    total = 0.0
    comp = 0.0
    biggest = 0.0
    log_ax = math.log(abs(p.x)) if p.x != 0 else -math.inf
    for k in range(ML_MAX_TERMS):
        if k == 0:
            term = math.exp(-gammaln(p.beta))
        elif p.x == 0:
            break
        else:
            sign = -1.0 if (p.x < 0 and k % 2) else 1.0
            term = sign * math.exp(k * log_ax - gammaln(p.alpha * k + p.beta))
        biggest = max(biggest, abs(term))
        # Neumaier summation
        s = total + term
        if abs(total) >= abs(term):
            comp += (total - s) + term
        else:
            comp += (term - s) + total
        total = s
        # terms decay monotonically once alpha*k + beta passes |x|^(1/alpha)
        if k > 0 and abs(term) < 1e-16 * abs(total + comp) and p.alpha * k + p.beta > abs(p.x) ** (1 / p.alpha):
            break
    value = total + comp
    # rounding in the largest terms bounds what the alternating series can resolve
    if biggest * 1e-16 > 1e-8 * abs(value):
        raise OracleError(f"series cancellation: E_{{{p.alpha:g},{p.beta:g}}}({p.x:g}) is not resolvable in double precision")
    return value


def power_rule_reference(gamma: float, p: float, t: float) -> float:
    """``I^gamma t^p = Gamma(p+1) / Gamma(p+1+gamma) t^(p+gamma)``."""
    if not gamma > 0 or p < 0 or t < 0:
        raise InvalidArgumentError("power rule needs gamma > 0, p >= 0, t >= 0")
    if t == 0:
        return 0.0
    return math.exp(gammaln(p + 1.0) - gammaln(p + 1.0 + gamma) + (p + gamma) * math.log(t))


def _common_denominator(orders, max_q: int = 12) -> int:
    for q in range(1, max_q + 1):
        if all(abs(g * q - round(g * q)) < 1e-9 for g in orders):
            return q
    raise OracleError(f"orders {list(orders)} have no common denominator <= {max_q}")


def halfplane_roots_oracle(phi2: AtomicWeight, max_q: int = 12) -> list[complex]:
    """Zeros of ``sum a_i s^g_i`` with ``Re s > 0`` via the substitution ``w = s^(1/q)``.

    The open right half-plane maps onto the sector ``|arg w| < pi / (2q)``;
    roots on its edges (the imaginary axis in ``s``) are excluded.
    """
    if not isinstance(phi2, AtomicWeight) or not phi2.atoms:
        raise OracleError("the roots oracle needs a non-empty atomic weight")
    q = _common_denominator([g for _, g in phi2.atoms], max_q)
    powers = [int(round(g * q)) for _, g in phi2.atoms]
    if any(p < 0 for p in powers):
        raise OracleError("negative orders are not polynomial in w")
    low = min(powers)
    deg = max(powers) - low
    if deg == 0:
        return []
    coeffs = np.zeros(deg + 1)
    for (a, _), p in zip(phi2.atoms, powers):
        coeffs[deg - (p - low)] += a
    roots = np.roots(coeffs)
    sector = math.pi / (2 * q)
    out = []
    for w in roots:
        if w != 0 and abs(np.angle(w)) < sector - 1e-9:
            out.append(complex(w**q))
    return sorted(out, key=lambda s: (s.real, s.imag))


def _gl_weights(order: float, n: int) -> np.ndarray:
    """Coefficients of ``(1 - z)^order``."""
    w = np.empty(n + 1)
    w[0] = 1.0
    for j in range(1, n + 1):
        w[j] = w[j - 1] * (1.0 - (order + 1.0) / j)
    return w


def direct_coupled_solve(problem, grid: TimeGrid, newton_tol: float = 1e-13, newton_iter: int = 50):
    """March ``y'' + z = f(t, y)`` and the constitutive law together.

    The second derivative uses the four-point backward stencil
    ``(2 y_n - 5 y_{n-1} + 4 y_{n-2} - y_{n-3}) / h^2`` and every
    fractional derivative its Grunwald-Letnikov sum, so each step is a
    scalar equation in ``y_n`` (``z_n`` is linear in ``y_n``), solved by
    Newton's method. ``y_1`` and ``y_2`` come from a Taylor start.
    """
    from .solver import SolutionPair, dissipation_work  # local: solver is heavier

    phi1, phi2, f = problem.phi1, problem.phi2, problem.f
    if not (isinstance(phi1, AtomicWeight) and isinstance(phi2, AtomicWeight)):
        raise OracleError("the coupled oracle supports atomic weights only")
    if not phi2.atoms:
        raise OracleError("phi2 has no atoms")
    if isinstance(f, PowerBoundForcing) and f.alpha < 1:
        raise OracleError("Newton steps need a forcing that is Lipschitz in y")
    if grid.n_steps < 3:
        raise OracleError("the coupled oracle needs at least 3 steps")
    N, h, t = grid.n_steps, grid.h, grid.nodes

    ws_y = [(b * h**-beta, _gl_weights(beta, N)) for b, beta in phi1.atoms]
    ws_z = [(a * h**-gam, _gl_weights(gam, N)) for a, gam in phi2.atoms]
    A = sum(c for c, _ in ws_z)
    B = sum(c for c, _ in ws_y)
    if A == 0 or not math.isfinite(A):
        raise OracleError("singular step system: the leading constitutive coefficient vanishes")

    y = np.zeros(N + 1)
    z = np.zeros(N + 1)

    y0, v0 = problem.y0, problem.v0
    # GL acts on y - y0; the initial value contributes b y0 t^-beta / Gamma(1 - beta) exactly
    t_start = np.where(t > 0, t, 0.5 * h)
    y_init = np.zeros(N + 1)
    for b, beta in phi1.atoms:
        y_init += b * y0 * rgamma(1.0 - beta) * t_start**-beta

    def history(n: int) -> float:
        hist = y_init[n]
        for c, w in ws_y:
            hist += c * np.dot(w[1 : n + 1], y[n - 1 :: -1][:n] - y0)
        for c, w in ws_z:
            hist -= c * np.dot(w[1 : n + 1], z[n - 1 :: -1][:n])
        return hist

    y[0] = y0
    z[0] = history(0) / A
    singular_start = y0 != 0 and any(beta > 0 for _, beta in phi1.atoms)
    acc = float(f(0.0, y0)) - (0.0 if singular_start else z[0])
    for n in (1, 2):
        y[n] = y0 + v0 * t[n] + 0.5 * acc * t[n] ** 2
        z[n] = (B * (y[n] - y0) + history(n)) / A

    h2 = h * h
    for n in range(3, N + 1):
        known = (-5.0 * y[n - 1] + 4.0 * y[n - 2] - y[n - 3]) / h2
        hist = history(n) - B * y0
        u = 2.0 * y[n - 1] - y[n - 2]
        for _ in range(newton_iter):
            res = 2.0 * u / h2 + known + (B * u + hist) / A - float(f(t[n], u))
            jac = 2.0 / h2 + B / A - float(f.dfdu(t[n], u))
            if jac == 0 or not math.isfinite(jac):
                raise OracleError(f"singular step system at step {n}")
            du = res / jac
            u -= du
            if abs(du) <= newton_tol * max(1.0, abs(u)):
                break
        else:
            raise OracleError(f"Newton did not converge at step {n}")
        y[n] = u
        z[n] = (B * u + hist) / A
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(z))):
        raise OracleError("non-finite values in the coupled oracle")

    Y = GridFunction(grid, y)
    Z = GridFunction(grid, z)
    z_ode = GridFunction(grid, np.asarray(f(t, y), dtype=float)) - diff2(Y)
    return SolutionPair(
        y=Y,
        z=Z,
        delta_used=grid.horizon,
        picard_iters=0,
        fixed_point_residual=float("nan"),
        constitutive_residual=float(np.max(np.abs(z - z_ode.values))),
        ode_residual=float("nan"),
        dissipation_work=dissipation_work(Y, Z),
        classification={},
        converged=True,
        z_ode=z_ode,
    )
