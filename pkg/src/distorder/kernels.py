"""Backend selection for the O(N^2) causal products.

The compiled extension is used when it was built; otherwise the numpy
fallback is used. ``set_backend`` switches explicitly (tests and the
benchmark use it to compare both).
"""

from __future__ import annotations

import logging

from . import _pykernels

logger = logging.getLogger(__name__)

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _pykernels}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = _BACKENDS.get("compiled", _pykernels)


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend() -> str:
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def set_backend(name: str) -> None:
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available_backends()}") from None
    logger.debug("kernel backend set to %s", name)


def causal_dot(c, y):
    """Discrete causal convolution ``out[n] = sum_{j<=n} c[n-j] * y[j]``."""
    return _active.causal_dot(c, y)


def causal_dot_many(c, y):
    return _active.causal_dot_many(c, y)
