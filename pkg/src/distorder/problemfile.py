"""Problem files: INI-style text with sections [phi1], [phi2], [forcing], [initial], [run].

Example::

    [phi1]
    kind = atomic
    atoms = 1:0

    [phi2]
    kind = exponential
    base = 1.2

    [forcing]
    kind = zero

    [initial]
    y0 = 1
    v0 = 0

    [run]
    horizon = 1
    n_steps = 400
    ball_radius = 2

Unknown sections or keys are rejected, and every error names the
offending key and line.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidArgumentError, ProblemFileError
from .forcing import (
    ForcingTerm,
    LipschitzForcing,
    PendulumForcing,
    PowerBoundForcing,
    TimeOnlyForcing,
    ZeroForcing,
)
from .solver import ProblemSpec
from .weights import AtomicWeight, ContinuousWeight, ExponentialWeight, OrderWeight

_FLOAT = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_INT = re.compile(r"[+-]?\d+")

_SECTIONS = ("phi1", "phi2", "forcing", "initial", "run")
_WEIGHT_KEYS = {
    "atomic": ({"atoms"}, set()),
    "continuous": ({"density", "support"}, {"scale", "samples", "samples_file"}),
    "exponential": ({"base"}, {"scale"}),
}
_FORCING_KEYS = {
    "zero": set(),
    "time_only": {"profile", "amp"},
    "power_bound": {"coef", "h_power", "alpha"},
    "lipschitz": {"coef", "h_power", "nonlinearity"},
    "pendulum": {"amp"},
}
_RUN_REQUIRED = {"horizon", "ball_radius"}
_RUN_OPTIONAL = {"n_steps", "tol", "max_iter", "damping"}


@dataclass(frozen=True)
class RunOptions:
    horizon: float
    n_steps: int = 400
    tol: float = 1e-8
    max_iter: int = 200
    damping: float = 1.0


class _Reader:
    def __init__(self, cp: configparser.ConfigParser, lines: dict[tuple[str, str], int], base_dir: Path | None):
        self.cp = cp
        self.lines = lines
        self.base_dir = base_dir

    def line(self, section: str, key: str | None = None) -> int | None:
        return self.lines.get((section, key or ""))

    def fail(self, msg: str, section: str, key: str | None = None) -> ProblemFileError:
        name = f"{section}.{key}" if key else section
        return ProblemFileError(msg, key=name, line=self.line(section, key))

    def section(self, name: str):
        if not self.cp.has_section(name):
            raise ProblemFileError(f"missing section [{name}]", key=name)
        return self.cp[name]

    def check_keys(self, section: str, required: set[str], optional: set[str]) -> None:
        sec = self.section(section)
        allowed = required | optional
        for key in sec:
            if key not in allowed:
                raise self.fail(f"unknown key (allowed: {', '.join(sorted(allowed)) or 'none'})", section, key)
        for key in sorted(required):
            if key not in sec:
                raise self.fail("missing required key", section, key)

    def raw(self, section: str, key: str) -> str:
        return self.section(section)[key].strip()

    def number(self, section: str, key: str, default: float | None = None) -> float:
        sec = self.section(section)
        if key not in sec:
            if default is None:
                raise self.fail("missing required key", section, key)
            return default
        text = sec[key].strip()
        if not _FLOAT.fullmatch(text):
            raise self.fail(f"malformed number {text!r}", section, key)
        return float(text)

    def integer(self, section: str, key: str, default: int) -> int:
        sec = self.section(section)
        if key not in sec:
            return default
        text = sec[key].strip()
        if not _INT.fullmatch(text):
            raise self.fail(f"malformed integer {text!r}", section, key)
        return int(text)

    def pairs(self, section: str, key: str) -> tuple[tuple[float, float], ...]:
        text = self.raw(section, key)
        if not text:
            return ()
        out = []
        for item in text.split(","):
            left, sep, right = item.strip().partition(":")
            left, right = left.strip(), right.strip()
            if not sep or not _FLOAT.fullmatch(left) or not _FLOAT.fullmatch(right):
                raise self.fail(f"malformed pair {item.strip()!r} (expected 'number:number')", section, key)
            out.append((float(left), float(right)))
        return tuple(out)


def _scan_lines(text: str) -> dict[tuple[str, str], int]:
    lines: dict[tuple[str, str], int] = {}
    section = ""
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#;":
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            lines.setdefault((section, ""), i)
        elif "=" in stripped and not line[:1].isspace():
            key = stripped.split("=", 1)[0].strip().lower()
            lines.setdefault((section, key), i)
    return lines


def _weight(rd: _Reader, role: str) -> OrderWeight:
    sec = rd.section(role)
    if "kind" not in sec:
        raise rd.fail("missing required key", role, "kind")
    kind = sec["kind"].strip()
    if kind not in _WEIGHT_KEYS:
        raise rd.fail(f"unknown weight kind {kind!r} (expected {', '.join(_WEIGHT_KEYS)})", role, "kind")
    req, opt = _WEIGHT_KEYS[kind]
    rd.check_keys(role, req | {"kind"}, opt)
    key = sorted(req)[0]
    try:
        if kind == "atomic":
            key = "atoms"
            return AtomicWeight(tuple((a, g) for a, g in rd.pairs(role, "atoms")))
        if kind == "exponential":
            return ExponentialWeight(rd.number(role, "base"), rd.number(role, "scale", 1.0))
        key = "support"
        parts = [p.strip() for p in rd.raw(role, "support").split(",")]
        if len(parts) != 2 or not all(_FLOAT.fullmatch(p) for p in parts):
            raise rd.fail("support must be 'c, d'", role, "support")
        support = (float(parts[0]), float(parts[1]))
        density = rd.raw(role, "density")
        samples = None
        source = None
        if density == "table":
            if "samples" in sec and "samples_file" in sec:
                raise rd.fail("give either samples or samples_file, not both", role, "samples_file")
            if "samples" in sec:
                key = "samples"
                samples = rd.pairs(role, "samples")
            elif "samples_file" in sec:
                key = "samples_file"
                source = rd.raw(role, "samples_file")
                samples = _read_table(rd, role, source)
            else:
                raise rd.fail("table density needs samples or samples_file", role, "density")
        elif "samples" in sec or "samples_file" in sec:
            raise rd.fail("samples are only allowed with density = table", role, "samples")
        key = "density"
        return ContinuousWeight(density, support, rd.number(role, "scale", 1.0), samples, source)
    except InvalidArgumentError as exc:
        raise rd.fail(str(exc), role, key) from None


def _read_table(rd: _Reader, role: str, source: str) -> tuple[tuple[float, float], ...]:
    path = Path(source)
    if not path.is_absolute() and rd.base_dir is not None:
        path = rd.base_dir / path
    try:
        text = path.read_text()
    except OSError as exc:
        raise rd.fail(f"cannot read sample table: {exc}", role, "samples_file") from None
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 2 or not all(_FLOAT.fullmatch(c) for c in cells):
            raise ProblemFileError(f"malformed sample row in {path}", key=f"{role}.samples_file", line=lineno)
        out.append((float(cells[0]), float(cells[1])))
    return tuple(out)


def _forcing(rd: _Reader) -> ForcingTerm:
    sec = rd.section("forcing")
    if "kind" not in sec:
        raise rd.fail("missing required key", "forcing", "kind")
    kind = sec["kind"].strip()
    if kind not in _FORCING_KEYS:
        raise rd.fail(f"unknown forcing kind {kind!r} (expected {', '.join(_FORCING_KEYS)})", "forcing", "kind")
    rd.check_keys("forcing", _FORCING_KEYS[kind] | {"kind"}, set())
    try:
        if kind == "zero":
            return ZeroForcing()
        if kind == "time_only":
            return TimeOnlyForcing(rd.raw("forcing", "profile"), rd.number("forcing", "amp"))
        if kind == "power_bound":
            return PowerBoundForcing(
                rd.number("forcing", "coef"), rd.number("forcing", "h_power"), rd.number("forcing", "alpha")
            )
        if kind == "lipschitz":
            return LipschitzForcing(
                rd.number("forcing", "coef"), rd.number("forcing", "h_power"), rd.raw("forcing", "nonlinearity")
            )
        return PendulumForcing(rd.number("forcing", "amp"))
    except InvalidArgumentError as exc:
        raise rd.fail(str(exc), "forcing", "kind") from None


def parse_problem_text(text: str, base_dir: Path | None = None) -> tuple[ProblemSpec, RunOptions]:
    """Parse problem-file text into a validated spec and run options."""
    cp = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#",),
        strict=True,
        interpolation=None,
        empty_lines_in_values=False,
    )
    try:
        cp.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ProblemFileError("duplicate key", key=f"{exc.section}.{exc.option}", line=exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ProblemFileError("duplicate section", key=exc.section, line=exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ProblemFileError("content before the first section header", line=exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ProblemFileError("malformed line", line=lineno) from None
    rd = _Reader(cp, _scan_lines(text), base_dir)
    for name in cp.sections():
        if name not in _SECTIONS:
            raise rd.fail(f"unknown section (expected {', '.join(_SECTIONS)})", name)

    phi1 = _weight(rd, "phi1")
    phi2 = _weight(rd, "phi2")
    forcing = _forcing(rd)
    rd.check_keys("initial", {"y0", "v0"}, set())
    y0 = rd.number("initial", "y0")
    v0 = rd.number("initial", "v0")
    rd.check_keys("run", _RUN_REQUIRED, _RUN_OPTIONAL)
    run = RunOptions(
        horizon=rd.number("run", "horizon"),
        n_steps=rd.integer("run", "n_steps", RunOptions.n_steps),
        tol=rd.number("run", "tol", RunOptions.tol),
        max_iter=rd.integer("run", "max_iter", RunOptions.max_iter),
        damping=rd.number("run", "damping", RunOptions.damping),
    )
    for key, ok in (
        ("horizon", run.horizon > 0),
        ("n_steps", run.n_steps >= 4),
        ("tol", run.tol > 0),
        ("max_iter", run.max_iter >= 1),
        ("damping", 0 < run.damping <= 1),
    ):
        if not ok:
            raise rd.fail("value out of range", "run", key)
    radius = rd.number("run", "ball_radius")
    try:
        spec = ProblemSpec(phi1, phi2, forcing, y0, v0, run.horizon, radius)
    except InvalidArgumentError as exc:
        raise rd.fail(str(exc), "run", "ball_radius") from None
    return spec, run


def parse_problem_file(path) -> tuple[ProblemSpec, RunOptions]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read problem file: {exc}") from None
    return parse_problem_text(text, path.parent)


def _emit_weight(role: str, phi: OrderWeight) -> list[str]:
    out = [f"[{role}]"]
    if isinstance(phi, AtomicWeight):
        out += ["kind = atomic", "atoms = " + ", ".join(f"{a!r}:{g!r}" for a, g in phi.atoms)]
    elif isinstance(phi, ExponentialWeight):
        out += ["kind = exponential", f"base = {phi.base!r}", f"scale = {phi.scale!r}"]
    else:
        c, d = phi.support
        out += ["kind = continuous", f"density = {phi.tag}", f"support = {c!r}, {d!r}", f"scale = {phi.scale!r}"]
        if phi.samples is not None:
            out.append("samples = " + ", ".join(f"{g!r}:{v!r}" for g, v in phi.samples))
    return out


def _emit_forcing(f: ForcingTerm) -> list[str]:
    out = ["[forcing]", f"kind = {f.kind}"]
    if isinstance(f, TimeOnlyForcing):
        out += [f"profile = {f.profile}", f"amp = {f.amp!r}"]
    elif isinstance(f, PowerBoundForcing):
        out += [f"coef = {f.coef!r}", f"h_power = {f.h_power!r}", f"alpha = {f.alpha!r}"]
    elif isinstance(f, LipschitzForcing):
        out += [f"coef = {f.coef!r}", f"h_power = {f.h_power!r}", f"nonlinearity = {f.nonlinearity}"]
    elif isinstance(f, PendulumForcing):
        out.append(f"amp = {f.amp!r}")
    return out


def emit_problem(spec: ProblemSpec, run: RunOptions | None = None) -> str:
    """Problem-file text that parses back to ``spec`` (and ``run``)."""
    if run is None:
        run = RunOptions(spec.horizon_request)
    lines = _emit_weight("phi1", spec.phi1) + [""] + _emit_weight("phi2", spec.phi2) + [""]
    lines += _emit_forcing(spec.f) + [""]
    lines += ["[initial]", f"y0 = {spec.y0!r}", f"v0 = {spec.v0!r}", ""]
    lines += [
        "[run]",
        f"horizon = {spec.horizon_request!r}",
        f"n_steps = {run.n_steps}",
        f"tol = {run.tol!r}",
        f"max_iter = {run.max_iter}",
        f"damping = {run.damping!r}",
        f"ball_radius = {spec.ball_radius!r}",
    ]
    return "\n".join(lines) + "\n"
