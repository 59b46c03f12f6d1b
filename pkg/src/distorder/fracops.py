"""Riemann-Liouville fractional integrals and derivatives on uniform grids.

The integral uses product-trapezoidal weights (piecewise-linear interpolant
of ``y`` integrated exactly against the kernel ``(t - tau)^(g-1)/Gamma(g)``),
which stay valid for weakly singular kernels ``0 < g < 1``. The derivative
of order ``g`` is the integer derivative ``d^k/dt^k`` of ``I^(k-g) y`` with
``k = ceil(g)`` (``k = 1`` at ``g = 1``), so nonzero initial values give the
usual Riemann-Liouville singular terms.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import InvalidArgumentError
from .grid import GridFunction, TimeGrid
from .kernels import causal_dot


class SmoothnessWarning(UserWarning):
    """Discrete data looks too rough for the requested derivative to be meaningful."""


def f_alpha(alpha: float, grid: TimeGrid) -> GridFunction:
    """Samples of ``H(t) t^(alpha-1) / Gamma(alpha)``.

    For ``alpha < 1`` the node at ``t = 0`` holds the first-cell average
    ``h^(alpha-1) / Gamma(alpha+1)`` instead of the infinite point value.
    """
    if not alpha > 0:
        raise InvalidArgumentError(f"f_alpha needs alpha > 0, got {alpha}")
    t = grid.nodes
    vals = np.empty_like(t)
    vals[1:] = t[1:] ** (alpha - 1.0) / gamma_fn(alpha)
    if alpha > 1:
        vals[0] = 0.0
    elif alpha == 1:
        vals[0] = 1.0
    else:
        vals[0] = grid.h ** (alpha - 1.0) / gamma_fn(alpha + 1.0)
    return GridFunction(grid, vals)


@lru_cache(maxsize=512)
def _product_trapezoid_weights(gamma: float, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled Toeplitz weights ``c`` and first-column weights ``a0``.

    ``I^g y(t_n) = h^g / Gamma(g+2) * (a0[n] y_0 + sum_{j=1}^n c[n-j] y_j)``.
    """
    k = np.arange(n_steps + 1, dtype=np.float64)
    p = gamma + 1.0
    kp = k**p
    c = np.empty_like(k)
    c[0] = 1.0
    c[1:] = np.append(kp[2:], (n_steps + 1.0) ** p) - 2.0 * kp[1:] + kp[:-1]
    a0 = np.zeros_like(k)
    n = k[1:]
    a0[1:] = (n - 1.0) ** p - (n - p) * n**gamma
    c.setflags(write=False)
    a0.setflags(write=False)
    return c, a0


def integral_weights(gamma: float, grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    """Scaled weights ``(toeplitz, first_column_correction)`` of ``I^gamma`` on ``grid``.

    ``I^g y = causal_dot(toeplitz, y) + first_column_correction * y[0]``.
    """
    c, a0 = _product_trapezoid_weights(float(gamma), grid.n_steps)
    scale = grid.h**gamma / gamma_fn(gamma + 2.0)
    return scale * c, scale * (a0 - c)


def frac_integral(y: GridFunction, gamma: float) -> GridFunction:
    """Riemann-Liouville integral ``I^gamma y``; ``gamma = 0`` returns ``y``."""
    if not gamma >= 0:
        raise InvalidArgumentError(f"fractional integral needs gamma >= 0, got {gamma}")
    if gamma == 0:
        return y
    toeplitz, corr = integral_weights(gamma, y.grid)
    vals = causal_dot(toeplitz, y.values) + corr * y.values[0]
    vals[0] = 0.0
    return GridFunction(y.grid, vals)


def _derivative(v: np.ndarray, h: float, k: int) -> np.ndarray:
    # central interior, first-order one-sided at the two ends
    out = np.empty_like(v)
    if k == 1:
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
        out[0] = (v[1] - v[0]) / h
        out[-1] = (v[-1] - v[-2]) / h
    else:
        h2 = h * h
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h2
        out[0] = (v[0] - 2.0 * v[1] + v[2]) / h2
        out[-1] = (v[-1] - 2.0 * v[-2] + v[-3]) / h2
    return out


def _roughness(v: np.ndarray, k: int, skip: int = 3) -> float:
    """Ratio of the (k+1)-th to k-th difference magnitudes away from t = 0."""
    dk = np.diff(v, k)[skip:]
    dk1 = np.diff(v, k + 1)[skip:]
    if dk.size < 2:
        return 0.0
    scale = np.max(np.abs(dk))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(dk1)) / scale)


def frac_derivative(y: GridFunction, gamma: float, *, check_smoothness: bool = True) -> GridFunction:
    """Riemann-Liouville derivative ``D^gamma y = d^k/dt^k I^(k-gamma) y`` for ``0 <= gamma < 2``."""
    if not 0 <= gamma < 2:
        raise InvalidArgumentError(f"fractional derivative order must lie in [0, 2), got {gamma}")
    if gamma == 0:
        return y
    k = 1 if gamma <= 1 else 2
    inner = frac_integral(y, k - gamma).values
    if check_smoothness and y.grid.n_steps >= 8:
        ratio = _roughness(inner, k)
        if ratio > 0.75:
            warnings.warn(
                f"I^{k - gamma:g} y is not numerically {k}-times differentiable "
                f"(difference ratio {ratio:.2f}); D^{gamma:g} y is not certified",
                SmoothnessWarning,
                stacklevel=2,
            )
    return GridFunction(y.grid, _derivative(inner, y.grid.h, k))

