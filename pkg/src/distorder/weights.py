"""Order weights, distributed-order derivatives and their Laplace symbols.

A weight is one of

* ``AtomicWeight`` -- finitely many atoms ``sum a_i delta(. - g_i)``,
* ``ContinuousWeight`` -- a continuous density on ``[c, d]``,
* ``ExponentialWeight`` -- the density ``base**g`` on ``[0, 1]``.

The Laplace symbol of ``int phi(g) D^g y dg`` is ``<phi(g), s^g> * y_hat(s)``
with ``s^g`` taken on the principal branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InvalidArgumentError
from .fracops import frac_derivative, frac_integral
from .grid import GridFunction

TIME_QUADRATURE = 32
SYMBOL_QUADRATURE = 64


@lru_cache(maxsize=16)
def _gauss_legendre(q: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(q)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_nodes(c: float, d: float, q: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(q)
    half = 0.5 * (d - c)
    return c + half * (x + 1.0), half * w


@dataclass(frozen=True)
class AtomicWeight:
    """``sum_i coef_i * delta(. - order_i)`` with strictly decreasing orders."""

    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        atoms = tuple((float(a), float(g)) for a, g in self.atoms)
        for a, g in atoms:
            if a == 0 or not math.isfinite(a):
                raise InvalidArgumentError(f"atom coefficients must be finite and nonzero, got {a}")
            if not math.isfinite(g):
                raise InvalidArgumentError(f"atom orders must be finite, got {g}")
        orders = [g for _, g in atoms]
        if any(o1 <= o2 for o1, o2 in zip(orders, orders[1:])):
            raise InvalidArgumentError("orders must be strictly decreasing")
        object.__setattr__(self, "atoms", atoms)

    @property
    def coefs(self) -> np.ndarray:
        return np.array([a for a, _ in self.atoms])

    @property
    def orders(self) -> np.ndarray:
        return np.array([g for _, g in self.atoms])

    @property
    def support(self) -> tuple[float, float] | None:
        if not self.atoms:
            return None
        return self.atoms[-1][1], self.atoms[0][1]

    def scaled(self, c: float) -> "AtomicWeight":
        return AtomicWeight(tuple((c * a, g) for a, g in self.atoms))

    def measure(self, q: int = TIME_QUADRATURE) -> list[tuple[float, float]]:
        return list(self.atoms)

    def symbol(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        logs = np.log(s)
        out = np.zeros_like(s)
        for a, g in self.atoms:
            out = out + a * np.exp(g * logs)
        return out


_TAGS: dict[str, Callable[[float], Callable[[np.ndarray], np.ndarray]]] = {
    "uniform": lambda _: (lambda g: np.ones_like(g)),
    "linear": lambda _: (lambda g: np.asarray(g, dtype=float)),
    "power": lambda q: (lambda g: np.abs(g) ** q),
    "exp": lambda b: (lambda g: b ** np.asarray(g, dtype=float)),
}


def _parse_tag(tag: str) -> tuple[str, float | None]:
    name, _, arg = tag.partition(":")
    if name not in _TAGS and name != "table":
        raise InvalidArgumentError(f"unknown density tag {tag!r}; known: {sorted(_TAGS)} or 'table'")
    if name in ("power", "exp"):
        try:
            value = float(arg)
        except ValueError:
            raise InvalidArgumentError(f"density tag {tag!r} needs a numeric parameter") from None
        if name == "exp" and value <= 0:
            raise InvalidArgumentError("exp density base must be positive")
        return name, value
    if arg and name != "table":
        raise InvalidArgumentError(f"density tag {name!r} takes no parameter")
    return name, None


@dataclass(frozen=True)
class ContinuousWeight:
    """Continuous density on ``[c, d]``, zero outside.

    ``tag`` names a closed form (``uniform``, ``linear``, ``power:q``,
    ``exp:b``) or is ``table`` with ``samples`` interpolated by a monotone
    cubic. The density is multiplied by ``scale``.
    """

    tag: str
    support: tuple[float, float]
    scale: float = 1.0
    samples: tuple[tuple[float, float], ...] | None = None
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        c, d = (float(v) for v in self.support)
        if not (math.isfinite(c) and math.isfinite(d)) or not c < d:
            raise InvalidArgumentError(f"support must satisfy c < d, got {self.support}")
        object.__setattr__(self, "support", (c, d))
        object.__setattr__(self, "scale", float(self.scale))
        name, _ = _parse_tag(self.tag)
        if name == "table":
            if not self.samples or len(self.samples) < 2:
                raise InvalidArgumentError("table density needs at least two samples")
            pts = tuple((float(g), float(v)) for g, v in self.samples)
            gs = [g for g, _ in pts]
            if any(a >= b for a, b in zip(gs, gs[1:])):
                raise InvalidArgumentError("table abscissae must be strictly increasing")
            if gs[0] > c + 1e-12 or gs[-1] < d - 1e-12:
                raise InvalidArgumentError("table must cover the whole support")
            object.__setattr__(self, "samples", pts)
            xs, ys = zip(*pts)
            fn = PchipInterpolator(np.array(xs), np.array(ys), extrapolate=False)
        else:
            fn = _TAGS[name](_parse_tag(self.tag)[1])
        object.__setattr__(self, "_fn", fn)

    def density(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        c, d = self.support
        inside = (g >= c) & (g <= d)
        vals = np.where(inside, self.scale * np.nan_to_num(self._fn(np.clip(g, c, d))), 0.0)
        return vals

    def scaled(self, k: float) -> "ContinuousWeight":
        return ContinuousWeight(self.tag, self.support, self.scale * k, self.samples, self.source)

    def measure(self, q: int = TIME_QUADRATURE) -> list[tuple[float, float]]:
        nodes, w = gauss_nodes(*self.support, q)
        return list(zip((w * self.density(nodes)).tolist(), nodes.tolist()))

    def symbol(self, s, q: int = SYMBOL_QUADRATURE) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        logs = np.log(s)[..., None]
        nodes, w = gauss_nodes(*self.support, q)
        return np.sum(w * self.density(nodes) * np.exp(nodes * logs), axis=-1)


@dataclass(frozen=True)
class ExponentialWeight:
    """Density ``base**g`` on ``[0, 1]``."""

    base: float
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.base) and self.base > 0):
            raise InvalidArgumentError(f"exponential base must be positive, got {self.base}")
        object.__setattr__(self, "base", float(self.base))
        object.__setattr__(self, "scale", float(self.scale))

    support = (0.0, 1.0)

    def density(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        return np.where((g >= 0) & (g <= 1), self.scale * self.base**g, 0.0)

    def scaled(self, k: float) -> "ExponentialWeight":
        return ExponentialWeight(self.base, self.scale * k)

    def measure(self, q: int = TIME_QUADRATURE) -> list[tuple[float, float]]:
        nodes, w = gauss_nodes(0.0, 1.0, q)
        return list(zip((w * self.density(nodes)).tolist(), nodes.tolist()))

    def symbol(self, s) -> np.ndarray:
        # int_0^1 (b s)^g dg = (b s - 1) / log(b s), removable at b s = 1
        s = np.asarray(s, dtype=complex)
        w = math.log(self.base) + np.log(s)
        small = np.abs(w) < 1e-8
        safe = np.where(small, 1.0, w)
        out = np.where(small, 1.0 + 0.5 * w, np.expm1(safe) / safe)
        return self.scale * out


OrderWeight = Union[AtomicWeight, ContinuousWeight, ExponentialWeight]


def _check_symbol_arg(s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    if np.any((s.imag == 0) & (s.real <= 0)):
        raise InvalidArgumentError("s lies on the branch cut (-inf, 0]")
    return s


def symbol_eval(phi: OrderWeight, s):
    """``<phi(g), s^g>`` on the principal branch; scalar in, scalar out."""
    arr = _check_symbol_arg(s)
    out = phi.symbol(arr)
    return complex(out) if np.ndim(s) == 0 else out


def distributed_derivative(phi: OrderWeight, y: GridFunction, q: int = TIME_QUADRATURE) -> GridFunction:
    """``int phi(g) D^g y dg``; negative orders act as fractional integrals."""
    lo_hi = phi.support
    if lo_hi is not None and lo_hi[1] >= 2:
        raise InvalidArgumentError("order weight support must stay below 2")
    out = np.zeros(y.grid.size)
    for w, g in phi.measure(q):
        if g < 0:
            term = frac_integral(y, -g)
        else:
            term = frac_derivative(y, g, check_smoothness=isinstance(phi, AtomicWeight))
        out = out + w * term.values
    return GridFunction(y.grid, out)


@dataclass(frozen=True)
class WeightClass:
    """Which order-weight condition block a weight satisfies in a given role."""

    role: str
    name: str
    reason: str = ""
    notes: tuple[str, ...] = ()

    @property
    def classified(self) -> bool:
        return self.name != "unclassified"


def _unclassified(role: str, reason: str) -> WeightClass:
    return WeightClass(role, "unclassified", reason)


def _phi5_origin_ok(density: Callable[[np.ndarray], np.ndarray]) -> tuple[bool, str]:
    at0 = float(density(np.array([0.0]))[0])
    if at0 != 0.0:
        return True, "phi2(0) != 0"
    e1, e2 = 1e-4, 1e-3
    v1, v2 = (float(v) for v in density(np.array([e1, e2])))
    if v1 > 0 and v2 > 0:
        q = math.log(v2 / v1) / math.log(e2 / e1)
        p = v1 / e1**q
        if q > 0 and p > 0:
            return True, f"phi2(g) ~ {p:.3g} g^{q:.3g} near 0"
    return False, "Phi5 requires phi2(0) != 0 or phi2(g) ~ p g^q with p, q > 0"


def classify_weight(phi: OrderWeight, role: str) -> WeightClass:
    """Determine the condition block a weight falls into (total: never raises on valid weights)."""
    if role not in ("phi1", "phi2"):
        raise InvalidArgumentError(f"role must be 'phi1' or 'phi2', got {role!r}")
    if role == "phi1":
        if isinstance(phi, AtomicWeight):
            if phi.atoms and phi.orders[0] >= 2:
                return _unclassified(role, "atomic phi1 needs all orders below 2")
            notes = ()
            if phi.atoms and phi.orders[-1] < 0:
                notes = ("negative orders act as fractional integrals",)
            return WeightClass(role, "Phi4", "atomic phi1 with orders below 2", notes)
        c, d = phi.support
        notes = []
        if np.any(phi.density(gauss_nodes(c, d, 16)[0]) < 0):
            notes.append("signed density: dissipation semantics unclear")
        if d >= 2:
            return _unclassified(role, "continuous phi1 needs support [c,d] with d < 2")
        if c < 0 <= d:
            notes.append("support extends below 0 (lower bound relaxed)")
        if d < 0:
            return WeightClass(role, "Phi3", "continuous on [c,d] with d < 0", tuple(notes))
        if d < 1:
            return WeightClass(role, "Phi2", "continuous on [c,d] with d < 1", tuple(notes))
        return WeightClass(role, "Phi1", "continuous on [c,d] with d < 2", tuple(notes))

    if isinstance(phi, AtomicWeight):
        if not phi.atoms:
            return _unclassified(role, "phi2 must have at least one atom")
        if phi.orders[0] >= 2 or phi.orders[-1] < 0:
            return _unclassified(role, "atomic phi2 needs orders in [0, 2)")
        return WeightClass(role, "fidva", "finite sum of deltas with orders in [0, 2)")
    c, d = phi.support
    if c < 0 or d > 1:
        return _unclassified(role, "Phi5 requires phi2 to vanish outside [0, 1]")
    if d != 1 or float(phi.density(np.array([1.0]))[0]) == 0.0:
        return _unclassified(role, "Phi5 requires phi2(1) != 0")
    if c > 0:
        return _unclassified(role, "Phi5 requires phi2(0) != 0 or phi2(g) ~ p g^q with p, q > 0")
    ok, why = _phi5_origin_ok(phi.density)
    if not ok:
        return _unclassified(role, why)
    notes = ()
    if isinstance(phi, ContinuousWeight) and phi.samples is not None:
        notes = ("sampled density: C^3 regularity not verified",)
    return WeightClass(role, "Phi5", f"continuous on [0,1], phi2(1) != 0, {why}", notes)
