"""Coupled fractional system solver.

Solves ``y'' + z = f(t, y)`` together with a distributed-order
constitutive law ``int phi1(g) D^g y dg = int phi2(g) D^g z dg`` on a
short interval, by fixed-point iteration on an integrated form built
from the fundamental solution of the constitutive law.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    AdmissibilityError,
    ContourError,
    DistOrderError,
    DivergenceError,
    InvalidArgumentError,
    LaplaceEvaluationError,
    NoBallError,
    OracleError,
    ProblemFileError,
    UnsupportedKernelError,
)
from .forcing import LipschitzForcing, PendulumForcing, PowerBoundForcing, TimeOnlyForcing, ZeroForcing
from .fracops import SmoothnessWarning, f_alpha, frac_derivative, frac_integral
from .grid import GridFunction, TimeGrid, conv_causal, diff1, diff2, make_grid, stieltjes_conv
from .kernels import available_backends, get_backend, set_backend
from .laplace import AdmissibilityReport, FundamentalSolution, check_A0, fundamental_solution, talbot_ilt
from .solver import (
    DeltaEstimate,
    ProblemSpec,
    SolutionPair,
    J_op,
    T_op,
    classify_solution,
    delta_estimate,
    dissipation_work,
    picard_solve,
    recover_z,
)
from .weights import (
    AtomicWeight,
    ContinuousWeight,
    ExponentialWeight,
    classify_weight,
    distributed_derivative,
    symbol_eval,
)

__all__ = [name for name in dir() if not name.startswith("_")]
