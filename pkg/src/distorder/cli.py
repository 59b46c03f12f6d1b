"""Command-line interface: ``distorder {check,kernel,solve,oracle-compare} PROBLEM``.

Exit codes: 0 success, 1 usage or problem-file error, 2 not converged or
solver/oracle disagreement, 3 constitutive symbol not admissible, 4 symbol
zeros on the imaginary axis (boundary-degenerate).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from contextlib import contextmanager

import numpy as np

from . import __version__
from .errors import AdmissibilityError, DistOrderError, DivergenceError, OracleError, ProblemFileError
from .grid import make_grid
from .laplace import check_A0, fundamental_solution
from .oracles import direct_coupled_solve
from .problemfile import RunOptions, parse_problem_file
from .solver import ProblemSpec, picard_solve
from .weights import AtomicWeight, classify_weight

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_NOT_ADMISSIBLE = 3
EXIT_BOUNDARY = 4

_VERDICT_EXIT = {
    "admissible": EXIT_OK,
    "not_admissible": EXIT_NOT_ADMISSIBLE,
    "indeterminate": EXIT_NOT_ADMISSIBLE,
    "boundary_degenerate": EXIT_BOUNDARY,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def fmt(x) -> str:
    """Shortest round-trip decimal for a float (at most 17 significant digits)."""
    return repr(float(x))


def _csv(header: list[str], columns: list[np.ndarray], meta: list[tuple[str, object]]) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    for key, value in meta:
        lines.append(f"# {key}={value}")
    return "\n".join(lines) + "\n"


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def _override(args, name: str, default):
    value = getattr(args, name, None)
    return default if value is None else value


def _load(args) -> tuple[ProblemSpec, RunOptions]:
    spec, run = parse_problem_file(args.problem)
    horizon = args.horizon if args.horizon is not None else run.horizon
    run = RunOptions(
        horizon=horizon,
        n_steps=args.grid_n if args.grid_n is not None else run.n_steps,
        tol=_override(args, "tol", run.tol),
        max_iter=_override(args, "max_iter", run.max_iter),
        damping=_override(args, "damping", run.damping),
    )
    if args.horizon is not None:
        spec = ProblemSpec(spec.phi1, spec.phi2, spec.f, spec.y0, spec.v0, horizon, spec.ball_radius)
    if not run.horizon > 0 or run.n_steps < 4 or not run.tol > 0 or run.max_iter < 1 or not 0 < run.damping <= 1:
        raise UsageError("run options out of range (horizon > 0, grid-n >= 4, tol > 0, max-iter >= 1, 0 < damping <= 1)")
    return spec, run


def _weight_lines(spec: ProblemSpec) -> list[tuple[str, object]]:
    out = []
    for role, phi in (("phi1", spec.phi1), ("phi2", spec.phi2)):
        wc = classify_weight(phi, role)
        out.append((f"{role}_class", wc.name))
        out.append((f"{role}_reason", wc.reason))
        for note in wc.notes:
            out.append((f"{role}_note", note))
    return out


def cmd_check(args) -> int:
    spec, _ = _load(args)
    meta: list[tuple[str, object]] = []
    if isinstance(spec.phi2, AtomicWeight) and spec.phi2.atoms:
        rep = check_A0(spec.phi2)
        meta += [
            ("verdict", rep.verdict),
            ("admissible", str(rep.admissible).lower()),
            ("winding_count", rep.winding_count),
            ("r_inner", fmt(rep.r_inner)),
            ("R_outer", fmt(rep.R_outer)),
            ("axis_zeros", " ".join(f"{fmt(y)}:{fmt(res)}" for y, res in rep.axis_zeros) or "none"),
        ]
        meta.append(("notes", rep.notes or "none"))
        code = _VERDICT_EXIT[rep.verdict]
    else:
        wc = classify_weight(spec.phi2, "phi2")
        ok = wc.name == "Phi5"
        meta += [("verdict", "admissible" if ok else "not_admissible"), ("admissible", str(ok).lower())]
        code = EXIT_OK if ok else EXIT_NOT_ADMISSIBLE
    meta += _weight_lines(spec)
    with _output(args.out) as fh:
        fh.write("".join(f"{k},{v}\n" for k, v in meta))
    return code


def _admissibility_exit(exc: AdmissibilityError) -> int:
    rep = exc.report
    if rep is not None and rep.verdict == "boundary_degenerate":
        return EXIT_BOUNDARY
    return EXIT_NOT_ADMISSIBLE


def cmd_kernel(args) -> int:
    spec, run = _load(args)
    grid = make_grid(run.horizon, run.n_steps)
    ker = fundamental_solution(spec.phi2, grid)
    meta = [("regularity", ker.regularity), ("atomic_coef", fmt(ker.atomic_coef)), ("n_steps", grid.n_steps)]
    text = _csv(["t", "l", "cumulative"], [grid.nodes, ker.regular.values, ker.cumulative.values], meta)
    with _output(args.out) as fh:
        fh.write(text)
    return EXIT_OK


def _solve(spec: ProblemSpec, run: RunOptions):
    grid = make_grid(run.horizon, run.n_steps)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sol = picard_solve(spec, grid, tol=run.tol, max_iter=run.max_iter, damping=run.damping)
    messages = sorted({str(w.message) for w in caught})
    for msg in messages:
        print(f"warning: {msg}", file=sys.stderr)
    return grid, sol, messages


def cmd_solve(args) -> int:
    spec, run = _load(args)
    grid, sol, messages = _solve(spec, run)
    meta: list[tuple[str, object]] = [
        ("converged", str(sol.converged).lower()),
        ("certified", str(sol.certified).lower()),
        ("delta_used", fmt(sol.delta_used)),
        ("delta_certified", fmt(sol.delta.delta) if sol.delta is not None else "none"),
        ("iterations", sol.picard_iters),
        ("fixed_point_residual", fmt(sol.fixed_point_residual)),
        ("constitutive_residual", fmt(sol.constitutive_residual)),
        ("ode_residual", fmt(sol.ode_residual)),
        ("A_d", fmt(sol.dissipation_work)),
    ]
    if sol.classification:
        for flag in ("mild", "non_impact", "classical"):
            if flag in sol.classification:
                meta.append((f"class_{flag}", sol.classification[flag]))
    else:
        meta.append(("classification", "none"))
    meta += [("warning", m) for m in messages]
    resid = sol.z.values - sol.z_ode.values
    text = _csv(["t", "y", "z", "z_ode_residual"], [grid.nodes, sol.y.values, sol.z.values, resid], meta)
    with _output(args.out) as fh:
        fh.write(text)
    return EXIT_OK if sol.converged else EXIT_NOT_CONVERGED


def cmd_oracle_compare(args) -> int:
    spec, run = _load(args)
    grid, sol, messages = _solve(spec, run)
    try:
        ref = direct_coupled_solve(spec, grid)
    except OracleError as exc:
        print(f"error: oracle failure: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    diff = np.abs(sol.y.values - ref.y.values)
    sup = float(np.max(diff))
    agree = sol.converged and sup <= args.agree_tol
    meta: list[tuple[str, object]] = [
        ("sup_diff", fmt(sup)),
        ("agree_tol", fmt(args.agree_tol)),
        ("agree", str(agree).lower()),
        ("solver_converged", str(sol.converged).lower()),
    ]
    meta += [("warning", m) for m in messages]
    text = _csv(["t", "y_solver", "y_oracle", "abs_diff"], [grid.nodes, sol.y.values, ref.y.values, diff], meta)
    with _output(args.out) as fh:
        fh.write(text)
    return EXIT_OK if agree else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="distorder", description="Distributed-order viscoelastic oscillator toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("problem", help="problem file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--grid-n", type=int, help="number of grid steps")
        p.add_argument("--horizon", type=float, help="time horizon")

    def solver_flags(p):
        p.add_argument("--tol", type=float, help="Picard increment tolerance")
        p.add_argument("--max-iter", type=int, help="maximum Picard iterations")
        p.add_argument("--damping", type=float, help="relaxation factor in (0, 1]")

    p = sub.add_parser("check", help="admissibility of the constitutive symbol and weight classes")
    common(p)
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("kernel", help="sample the fundamental solution")
    common(p)
    p.set_defaults(func=cmd_kernel)
    p = sub.add_parser("solve", help="solve the coupled system by Picard iteration")
    common(p)
    solver_flags(p)
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("oracle-compare", help="compare the solver with the direct time-stepping oracle")
    common(p)
    solver_flags(p)
    p.add_argument("--agree-tol", type=float, default=5e-3, help="sup-norm agreement threshold")
    p.set_defaults(func=cmd_oracle_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AdmissibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _admissibility_exit(exc)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except DistOrderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
