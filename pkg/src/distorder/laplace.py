"""Admissibility of the constitutive symbol and the fundamental solution.

For an atomic weight the symbol is ``F(s) = sum a_i s^g_i``. The
constitutive equation ``sum a_i D^g_i z = g`` is uniquely solvable in
tempered distributions iff ``F`` has no zeros with ``Re s > 0``. Zeros can
only sit in an annulus ``r <= |s| <= R`` (outside it one term dominates),
so the count is obtained from the winding number of ``F`` around the
right half of a slightly larger annulus.

The fundamental solution ``l = L^{-1}[1/F]`` is sampled with a
fixed-Talbot (cotangent contour) quadrature, together with
``K(t) = int_0^t l = L^{-1}[1/(s F)]`` which carries the singular part.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gamma as gamma_fn

from .errors import (
    AdmissibilityError,
    ContourError,
    InvalidArgumentError,
    LaplaceEvaluationError,
    UnsupportedKernelError,
)
from .grid import GridFunction, TimeGrid, conv_causal, stieltjes_conv
from .weights import AtomicWeight, OrderWeight, classify_weight

logger = logging.getLogger(__name__)

# cotangent contour s(th) = (M/t) (SIGMA + MU th cot(ALPHA th) + i NU th). The shape
# is the optimal one for exact arithmetic shrunk by 0.4: the largest terms grow like
# exp(M (SIGMA + MU / ALPHA)), and the unshrunk shape loses ~1e-7 to rounding at M = 96.
_SHRINK = 0.4
_SIGMA, _MU, _ALPHA, _NU = -0.6122 * _SHRINK, 0.5017 * _SHRINK, 0.6407, 0.2645 * _SHRINK
DEFAULT_TALBOT_NODES = 64

AXIS_SAMPLES = 2048
AXIS_ZERO_RTOL = 1e-6
_MAX_PHASE_STEP = math.pi / 4


# -- zero localization -------------------------------------------------------


def _crossing(excess: Callable[[float], float]) -> float:
    """Smallest rho (to ~1e-12 relative) with ``excess(rho) > 0``, ``excess`` increasing; search starts at 1."""
    lo = hi = 1.0
    if excess(1.0) > 0:
        while excess(lo) > 0:
            hi, lo = lo, lo / 2.0
    else:
        while excess(hi) <= 0:
            lo, hi = hi, hi * 2.0
    while hi / lo - 1.0 > 1e-12:
        mid = math.sqrt(lo * hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def bracket_zero_region(phi2: AtomicWeight) -> tuple[float, float]:
    """Radii ``(r, R)`` such that the symbol has no zeros with ``|s| < r`` or ``|s| > R``."""
    if not isinstance(phi2, AtomicWeight) or not phi2.atoms:
        raise InvalidArgumentError("bracket_zero_region needs a non-empty atomic weight")
    if len(phi2.atoms) == 1:
        return 1.0, 1.0
    a = np.abs(phi2.coefs)
    g = phi2.orders

    def lead_excess(rho: float) -> float:
        # > 0 where the leading term dominates the rest; increasing in rho
        return 1.0 - float(np.sum(a[1:] / a[0] * rho ** (g[1:] - g[0])))

    def tail_excess(rho: float) -> float:
        # > 0 where the lowest-order term dominates; decreasing in rho
        return 1.0 - float(np.sum(a[:-1] / a[-1] * rho ** (g[:-1] - g[-1])))

    R = _crossing(lead_excess)
    r = 1.0 / _crossing(lambda u: tail_excess(1.0 / u))
    # strict margins so the boundary circles are zero-free
    return 0.99 * min(r, R), 1.01 * max(r, R)


@dataclass
class AdmissibilityReport:
    admissible: bool
    r_inner: float
    R_outer: float
    winding_count: int | None
    axis_zeros: list[tuple[float, float]] = field(default_factory=list)
    notes: str = ""
    verdict: str = "admissible"

    @property
    def boundary_degenerate(self) -> bool:
        return self.verdict == "boundary_degenerate"


def _contour_pieces(eps: float, r_in: float, r_out: float):
    """Counter-clockwise boundary of ``{Re s > eps, r_in < |s| < r_out}`` as parametrized pieces."""
    phi_out = math.acos(eps / r_out)
    phi_in = math.acos(eps / r_in)
    y_out = math.sqrt(r_out**2 - eps**2)
    y_in = math.sqrt(r_in**2 - eps**2)
    return [
        lambda u: r_out * np.exp(1j * (-phi_out + 2.0 * phi_out * u)),
        lambda u: eps + 1j * (y_out + (y_in - y_out) * u),
        lambda u: r_in * np.exp(1j * (phi_in - 2.0 * phi_in * u)),
        lambda u: eps + 1j * (-y_in + (y_in - y_out) * u),
    ]


def _track_phase(F: Callable, path: Callable[[float], complex], max_halvings: int = 60) -> float:
    """Accumulated argument change of ``F`` along ``path(u)``, ``u`` in [0, 1]."""
    u = 0.0
    du = 1.0 / 256.0
    min_du = 2.0**-max_halvings
    f_old = complex(F(path(0.0)))
    if f_old == 0 or not np.isfinite(f_old):
        raise ContourError("symbol vanishes or is not finite on the contour")
    total = 0.0
    while u < 1.0:
        step = min(du, 1.0 - u)
        f_new = complex(F(path(u + step)))
        if not np.isfinite(f_new):
            raise ContourError("symbol not finite on the contour")
        delta = math.atan2((f_new / f_old).imag, (f_new / f_old).real) if f_new != 0 else math.pi
        if abs(delta) >= _MAX_PHASE_STEP or f_new == 0:
            du = step / 2.0
            if du < min_du:
                raise ContourError("phase tracking did not resolve within the refinement limit")
            continue
        total += delta
        u += step
        f_old = f_new
        du = min(2.0 * step, 1.0 / 64.0)
    return total


def _axis_scan(phi2: AtomicWeight, lo: float, hi: float) -> list[tuple[float, float]]:
    a = phi2.coefs
    g = phi2.orders

    def rel_abs(y: float) -> float:
        s = 1j * y
        val = abs(complex(phi2.symbol(s)))
        scale = float(np.sum(np.abs(a) * y**g))
        return val / scale

    ys = np.geomspace(lo, hi, AXIS_SAMPLES)
    vals = np.abs(phi2.symbol(1j * ys)) / (np.abs(a)[:, None] * ys[None, :] ** g[:, None]).sum(axis=0)
    zeros = []
    for i in range(AXIS_SAMPLES):
        left = vals[i - 1] if i > 0 else np.inf
        right = vals[i + 1] if i < AXIS_SAMPLES - 1 else np.inf
        # only refine genuine dips; flat profiles (single atom) have none
        if vals[i] <= left and vals[i] <= right and vals[i] < min(left, right) and vals[i] < 0.25:
            a_lo = ys[max(i - 1, 0)]
            a_hi = ys[min(i + 1, AXIS_SAMPLES - 1)]
            res = minimize_scalar(
                rel_abs, bounds=(a_lo, a_hi), method="bounded", options={"xatol": 1e-14 * a_hi}
            )
            best_y, best = (res.x, res.fun) if res.fun < vals[i] else (ys[i], vals[i])
            if best < AXIS_ZERO_RTOL:
                zeros.append((float(best_y), float(best)))
    # conjugate symmetry: zeros come in pairs +-iy
    return [(-y, v) for y, v in reversed(zeros)] + zeros


def check_A0(phi2: OrderWeight) -> AdmissibilityReport:
    """Count zeros of ``sum a_i s^g_i`` in the open right half-plane by the argument principle."""
    if not isinstance(phi2, AtomicWeight):
        raise InvalidArgumentError("check_A0 applies to atomic weights; continuous phi2 is classified instead")
    if not phi2.atoms:
        raise InvalidArgumentError("check_A0 needs at least one atom")
    r, R = bracket_zero_region(phi2)
    r_in, r_out = 0.5 * r, 2.0 * R
    eps = 1e-9 * r
    axis = _axis_scan(phi2, r_in, r_out)
    notes = []
    F = phi2.symbol
    try:
        total = sum(_track_phase(F, piece) for piece in _contour_pieces(eps, r_in, r_out))
    except ContourError as exc:
        return AdmissibilityReport(False, r, R, None, axis, f"indeterminate: {exc}", "indeterminate")
    turns = total / (2.0 * math.pi)
    winding = int(round(turns))
    if abs(turns - winding) > 0.25:
        return AdmissibilityReport(
            False, r, R, None, axis, f"indeterminate: non-integral winding {turns:.3f}", "indeterminate"
        )
    if winding != 0:
        verdict = "not_admissible"
        notes.append(f"{winding} zero(s) with Re s > 0")
    elif axis:
        verdict = "boundary_degenerate"
        notes.append("zeros on the imaginary axis: (A_0) holds but inversion is refused")
    else:
        verdict = "admissible"
    return AdmissibilityReport(winding == 0, r, R, winding, axis, "; ".join(notes), verdict)


# -- numerical inverse Laplace transform ----------------------------------------


def _talbot_nodes(M: int):
    # midpoint rule on (-pi, pi); keep the upper half and use conjugate symmetry
    theta = (2.0 * np.arange(M // 2) + 1.0) * math.pi / M
    at = _ALPHA * theta
    cot = np.cos(at) / np.sin(at)
    z = _SIGMA + _MU * theta * cot + 1j * _NU * theta
    dz = _MU * (cot - at / np.sin(at) ** 2) + 1j * _NU
    return z, dz


def talbot_ilt(F_hat: Callable, t, M: int = DEFAULT_TALBOT_NODES):
    """Inverse Laplace transform of ``F_hat`` at ``t > 0`` on the cotangent contour scaled by ``M/t``.

    ``F_hat`` must accept complex arrays. Returns a float for scalar ``t``
    and an array otherwise.
    """
    if M < 2 or M % 2:
        raise InvalidArgumentError("number of Talbot nodes must be an even integer >= 2")
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt <= 0):
        raise InvalidArgumentError("inverse Laplace transform needs t > 0")
    z, dz = _talbot_nodes(M)
    scale = (M / tt)[:, None]
    s = scale * z[None, :]
    vals = np.asarray(F_hat(s), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise LaplaceEvaluationError("transform is not finite on the Talbot contour")
    terms = np.exp(s * tt[:, None]) * vals * (scale * dz[None, :])
    out = (2.0 / M) * np.sum(terms.imag, axis=1)
    return float(out[0]) if np.ndim(t) == 0 else out


# -- fundamental solution -------------------------------------------------------


@dataclass
class FundamentalSolution:
    """Kernel ``l`` of the constitutive law: optional delta mass at 0 plus sampled regular part."""

    atomic_coef: float
    regular: GridFunction
    cumulative: GridFunction
    regularity: str
    phi2: OrderWeight | None = None
    report: AdmissibilityReport | None = None

    @property
    def grid(self) -> TimeGrid:
        return self.regular.grid

    def convolve(self, g: GridFunction) -> GridFunction:
        """``l * g``: scaling for algebraic kernels, trapezoid for AC, Stieltjes otherwise."""
        if self.regularity == "algebraic":
            return g * self.atomic_coef
        if self.regularity == "AC":
            out = conv_causal(self.regular, g)
        else:
            out = stieltjes_conv(self.cumulative, g)
        if self.atomic_coef:
            out = out + g * self.atomic_coef
        return out

    def abs_mass(self, t):
        """``D_t = int_0^t |l|`` (including any delta mass), interpolated on the kernel grid."""
        t = np.asarray(t, dtype=float)
        if np.any(t > self.grid.horizon * (1 + 1e-12)):
            raise InvalidArgumentError("abs_mass requested beyond the kernel grid")
        mass = np.abs(self.atomic_coef) * np.ones_like(t)
        if self.regularity == "algebraic":
            return mass
        reg = self.regular.values
        cum = self.cumulative.values
        if np.all(reg[1:] >= 0) and np.all(np.diff(cum) >= 0):
            running = cum
        else:
            h = self.grid.h
            cells = 0.5 * h * (np.abs(reg[1:]) + np.abs(reg[:-1]))
            cells[0] = abs(cum[1])  # first cell from K: handles the singularity at 0
            running = np.concatenate([[0.0], np.cumsum(cells)])
        return mass + np.interp(t, self.grid.nodes, running)


def kernel_regularity(phi2: OrderWeight) -> str:
    if isinstance(phi2, AtomicWeight):
        g = phi2.orders
        if len(g) == 1 and g[0] == 0:
            return "algebraic"
        return "AC" if g[0] - g[-1] > 1 else "L1loc"
    return "L1loc"


def fundamental_solution(phi2: OrderWeight, grid: TimeGrid, M: int = DEFAULT_TALBOT_NODES) -> FundamentalSolution:
    """Sample the kernel ``l = L^{-1}[1 / <phi2, s^g>]`` and its running integral on ``grid``."""
    report = None
    if isinstance(phi2, AtomicWeight):
        if not phi2.atoms:
            raise UnsupportedKernelError("phi2 has no atoms: the constitutive law does not determine z")
        g = phi2.orders
        a = phi2.coefs
        if len(g) == 1 and g[0] == 0:
            zero = GridFunction(grid, np.zeros(grid.size))
            return FundamentalSolution(1.0 / a[0], zero, zero, "algebraic", phi2)
        if g[0] == 0:
            raise UnsupportedKernelError("leading order 0 with several atoms: 1/F does not decay")
        if g[0] >= 2 or g[-1] < 0:
            raise UnsupportedKernelError("kernel sampling needs all phi2 orders in [0, 2)")
        report = check_A0(phi2)
        if report.verdict != "admissible":
            raise AdmissibilityError(f"phi2 symbol is not admissible ({report.verdict}): {report.notes}", report)
    else:
        wc = classify_weight(phi2, "phi2")
        if wc.name != "Phi5":
            raise UnsupportedKernelError(f"continuous phi2 must satisfy Phi5: {wc.reason}")

    symbol = phi2.symbol
    t = grid.nodes[1:]
    regular = np.empty(grid.size)
    cumulative = np.zeros(grid.size)
    regular[1:] = talbot_ilt(lambda s: 1.0 / symbol(s), t, M)
    cumulative[1:] = talbot_ilt(lambda s: 1.0 / (s * symbol(s)), t, M)
    if isinstance(phi2, AtomicWeight):
        g0, a0 = phi2.orders[0], phi2.coefs[0]
        regular[0] = grid.h ** (g0 - 1.0) / (a0 * gamma_fn(g0 + 1.0))
    else:
        regular[0] = cumulative[1] / grid.h
    return FundamentalSolution(
        0.0,
        GridFunction(grid, regular),
        GridFunction(grid, cumulative),
        kernel_regularity(phi2),
        phi2,
        report,
    )
