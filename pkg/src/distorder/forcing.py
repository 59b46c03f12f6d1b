"""Forcing terms f(t, y) and the growth hypotheses they satisfy.

Each forcing knows its bound function ``h`` and exponent ``alpha`` in
``|f(t, u)| <= h(t) |u|^alpha`` (condition A_l), whether it is
Lipschitz in ``u`` with a continuous ``h`` vanishing at 0 (A_l'), and
whether it is jointly Lipschitz in (t, u) with such an ``h`` (A_l'').
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np
from scipy.integrate import quad

from .errors import InvalidArgumentError

_PROFILES = {
    "const": (lambda t: np.ones_like(t), lambda t: 1.0),
    "sin": (np.sin, lambda t: abs(math.sin(t))),
    "cos": (np.cos, lambda t: abs(math.cos(t))),
    "linear": (lambda t: t, abs),
    "exp": (lambda t: np.exp(-t), lambda t: math.exp(-t)),
}

_NONLINEARITIES = {
    "linear": (lambda u: u, lambda u: np.ones_like(u)),
    "sin": (np.sin, np.cos),
    "tanh": (np.tanh, lambda u: 1.0 / np.cosh(u) ** 2),
}


class _Forcing:
    kind: ClassVar[str]
    alpha: float = 1.0

    satisfies_Al: bool = True
    satisfies_Alp: bool = False
    satisfies_Alpp: bool = False

    def h(self, t: float) -> float:
        return 0.0

    def growth_bound(self, t: float, r: float) -> float:
        """Bound on ``sup |int_0^t (t - x) f(x, y(x)) dx|`` over ``sup|y| <= r``."""
        if not self.satisfies_Al:
            raise InvalidArgumentError(f"{self.kind} forcing has no growth bound")
        return self.C(t) * r**self.alpha

    def C(self, t: float) -> float:
        """``C_t = int_0^t h(x) (t - x) dx``."""
        if t <= 0:
            return 0.0
        return quad(lambda x: self.h(x) * (t - x), 0.0, t, limit=200)[0]


@dataclass(frozen=True)
class ZeroForcing(_Forcing):
    kind: ClassVar[str] = "zero"
    satisfies_Alp: ClassVar[bool] = True
    satisfies_Alpp: ClassVar[bool] = True

    def __call__(self, t, u):
        return np.zeros(np.broadcast(np.asarray(t), np.asarray(u)).shape)

    def dfdu(self, t, u):
        return np.zeros(np.broadcast(np.asarray(t), np.asarray(u)).shape)

    def C(self, t: float) -> float:
        return 0.0


@dataclass(frozen=True)
class TimeOnlyForcing(_Forcing):
    """``f(t, y) = amp * profile(t)``; violates ``f(t, 0) = 0`` unless ``amp == 0``."""

    profile: str = "const"
    amp: float = 1.0
    kind: ClassVar[str] = "time_only"

    def __post_init__(self):
        if self.profile not in _PROFILES:
            raise InvalidArgumentError(f"unknown profile {self.profile!r}; known: {sorted(_PROFILES)}")
        object.__setattr__(self, "amp", float(self.amp))

    @property
    def satisfies_Al(self) -> bool:
        return self.amp == 0.0

    @property
    def satisfies_Alp(self) -> bool:
        return self.amp == 0.0

    def __call__(self, t, u):
        t = np.asarray(t, dtype=float)
        vals = self.amp * _PROFILES[self.profile][0](t)
        return np.broadcast_to(vals, np.broadcast(t, np.asarray(u)).shape).astype(float)

    def dfdu(self, t, u):
        return np.zeros(np.broadcast(np.asarray(t), np.asarray(u)).shape)

    def growth_bound(self, t: float, r: float) -> float:
        # additive bound independent of r
        mag = _PROFILES[self.profile][1]
        if t <= 0:
            return 0.0
        return abs(self.amp) * quad(lambda x: (t - x) * mag(x), 0.0, t, limit=200)[0]


@dataclass(frozen=True)
class PowerBoundForcing(_Forcing):
    """``f(t, u) = coef * t^h_power * sign(u) |u|^alpha`` (the extremal A_l forcing)."""

    coef: float = 1.0
    h_power: float = 0.0
    alpha: float = 1.0
    kind: ClassVar[str] = "power_bound"

    def __post_init__(self):
        if self.alpha <= 0:
            raise InvalidArgumentError("power_bound needs alpha > 0")
        if self.h_power < 0:
            raise InvalidArgumentError("power_bound needs h_power >= 0")
        for name in ("coef", "h_power", "alpha"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def h(self, t):
        return abs(self.coef) * t**self.h_power

    def C(self, t: float) -> float:
        p = self.h_power
        return abs(self.coef) * t ** (p + 2.0) / ((p + 1.0) * (p + 2.0))

    def __call__(self, t, u):
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        return self.coef * t**self.h_power * np.sign(u) * np.abs(u) ** self.alpha

    def dfdu(self, t, u):
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            d = self.coef * t**self.h_power * self.alpha * np.abs(u) ** (self.alpha - 1.0)
        return np.where(np.isfinite(d), d, 0.0)


@dataclass(frozen=True)
class LipschitzForcing(_Forcing):
    """``f(t, u) = coef * t^h_power * sigma(u)`` with a 1-Lipschitz ``sigma`` vanishing at 0."""

    coef: float = 1.0
    h_power: float = 1.0
    nonlinearity: str = "linear"
    kind: ClassVar[str] = "lipschitz"

    def __post_init__(self):
        if self.nonlinearity not in _NONLINEARITIES:
            raise InvalidArgumentError(
                f"unknown nonlinearity {self.nonlinearity!r}; known: {sorted(_NONLINEARITIES)}"
            )
        if self.h_power < 0:
            raise InvalidArgumentError("lipschitz needs h_power >= 0 (h continuous)")
        object.__setattr__(self, "coef", float(self.coef))
        object.__setattr__(self, "h_power", float(self.h_power))

    @property
    def satisfies_Alp(self) -> bool:
        # h continuous with h(0) = 0
        return self.coef == 0.0 or self.h_power > 0

    def h(self, t):
        return abs(self.coef) * t**self.h_power

    def C(self, t: float) -> float:
        p = self.h_power
        return abs(self.coef) * t ** (p + 2.0) / ((p + 1.0) * (p + 2.0))

    def __call__(self, t, u):
        t = np.asarray(t, dtype=float)
        return self.coef * t**self.h_power * _NONLINEARITIES[self.nonlinearity][0](np.asarray(u, dtype=float))

    def dfdu(self, t, u):
        t = np.asarray(t, dtype=float)
        return self.coef * t**self.h_power * _NONLINEARITIES[self.nonlinearity][1](np.asarray(u, dtype=float))


@dataclass(frozen=True)
class PendulumForcing(_Forcing):
    """``f(t, y) = amp * sin(y)``: A_l with ``h = |amp|``, ``alpha = 1``; not A_l' since ``h(0) != 0``."""

    amp: float = 1.0
    kind: ClassVar[str] = "pendulum"

    def __post_init__(self):
        object.__setattr__(self, "amp", float(self.amp))

    @property
    def satisfies_Alp(self) -> bool:
        return self.amp == 0.0

    def h(self, t):
        return abs(self.amp)

    def C(self, t: float) -> float:
        return abs(self.amp) * t * t / 2.0

    def __call__(self, t, u):
        return self.amp * np.sin(np.asarray(u, dtype=float)) + 0.0 * np.asarray(t, dtype=float)

    def dfdu(self, t, u):
        return self.amp * np.cos(np.asarray(u, dtype=float)) + 0.0 * np.asarray(t, dtype=float)


ForcingTerm = Union[ZeroForcing, TimeOnlyForcing, PowerBoundForcing, LipschitzForcing, PendulumForcing]
