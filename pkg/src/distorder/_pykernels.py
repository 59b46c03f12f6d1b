"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``.

Results agree with the compiled path to ~1e-12; the summation order inside
``np.convolve`` is not guaranteed to be sequential.
"""

from __future__ import annotations

import numpy as np


def causal_dot(c, y):
    c = np.ascontiguousarray(c, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    m = y.shape[0]
    if c.shape[0] < m:
        raise ValueError("coefficient vector shorter than operand")
    return np.convolve(c[:m], y)[:m]


def causal_dot_many(c, y):
    c = np.ascontiguousarray(c, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    m = y.shape[0]
    if c.shape[1] < m:
        raise ValueError("coefficient rows shorter than operand")
    return np.stack([np.convolve(row[:m], y)[:m] for row in c])
