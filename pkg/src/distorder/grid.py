"""Uniform causal time grids and the discrete operators built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .kernels import causal_dot


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_j = j*T/N`` on ``[0, T]``."""

    horizon: float
    n_steps: int

    def __post_init__(self):
        if not np.isfinite(self.horizon) or self.horizon <= 0:
            raise InvalidArgumentError(f"horizon must be positive, got {self.horizon}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise InvalidArgumentError(f"n_steps must be an integer >= 2, got {self.n_steps}")
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def h(self) -> float:
        return self.horizon / self.n_steps

    @property
    def size(self) -> int:
        return self.n_steps + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.size) * self.horizon / self.n_steps


def make_grid(T: float, N: int) -> TimeGrid:
    return TimeGrid(T, N)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a causal function (zero for t < 0) at the grid nodes."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.shape != (self.grid.size,):
            raise InvalidArgumentError(
                f"expected {self.grid.size} samples, got shape {vals.shape}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: TimeGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, np.broadcast_to(fn(grid.nodes), (grid.size,)))

    @classmethod
    def constant(cls, grid: TimeGrid, value: float) -> "GridFunction":
        return cls(grid, np.full(grid.size, float(value)))

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other):
        if isinstance(other, GridFunction):
            _check_same(self, other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            _check_same(self, other)
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - other)

    def __neg__(self):
        return self.with_values(-self.values)

    def __mul__(self, scalar):
        if isinstance(scalar, GridFunction):
            _check_same(self, scalar)
            return self.with_values(self.values * scalar.values)
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __len__(self):
        return self.grid.size


def _check_same(*fns: GridFunction) -> TimeGrid:
    grid = fns[0].grid
    for other in fns[1:]:
        if other.grid != grid:
            raise InvalidArgumentError("grid functions live on different grids")
    return grid


def conv_causal(u: GridFunction, v: GridFunction) -> GridFunction:
    """Trapezoidal product quadrature of ``int_0^t u(tau) v(t - tau) dtau``."""
    grid = _check_same(u, v)
    a, b = u.values, v.values
    full = causal_dot(a, b)
    # trapezoid end corrections: half weight on j = 0 and j = n
    out = grid.h * (full - 0.5 * a[0] * b - 0.5 * a * b[0])
    out[0] = 0.0
    return GridFunction(grid, out)


def stieltjes_conv(K: GridFunction, g: GridFunction) -> GridFunction:
    """Riemann-Stieltjes sum for ``l * g`` given ``K(t) = int_0^t l``.

    Increments of ``K`` over each cell are paired with ``g`` at the cell
    midpoint (linear interpolation), so integrable singularities of ``l``
    at the origin are handled exactly through ``K``.
    """
    grid = _check_same(K, g)
    dK = np.diff(K.values)
    gv = g.values
    gmid = 0.5 * (gv[1:] + gv[:-1])
    out = np.zeros(grid.size)
    out[1:] = causal_dot(dK, gmid)
    return GridFunction(grid, out)


def diff1(y: GridFunction) -> GridFunction:
    """First derivative: second-order central interior, second-order one-sided ends."""
    return GridFunction(y.grid, np.gradient(y.values, y.grid.h, edge_order=2))


def diff2(y: GridFunction) -> GridFunction:
    """Second derivative: central interior, second-order one-sided four-point ends."""
    grid = y.grid
    if grid.n_steps < 4:
        raise InvalidArgumentError("diff2 needs at least 4 steps")
    v = y.values
    h2 = grid.h * grid.h
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h2
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h2
    return GridFunction(grid, out)


def trapezoid(y: GridFunction) -> float:
    return float(np.trapezoid(y.values, dx=y.grid.h))
