"""Command-line front end.

Exit status: 0 success, 1 verification failure, 2 usage, 3 domain, 4 I/O.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import registry
from .errors import LoschmidtError
from .scan import Cell, GridAxis, PhaseDiagram, compare_routes, scan_dynamics, scan_uhlmann

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

COMMANDS = ("quasistatic", "quench", "uhlmann", "scan", "verify")
FORMATS = ("csv", "json")
MODES = ("closed-form", "numeric", "both")
CSV_COLUMNS = ("x1", "x2", "G_re", "G_im", "echo", "phase", "rate", "divergent")
MIN_STEPS = 64

DYNAMICS_TOL = 1e-12
HOLONOMY_TOL = 1e-6

EPILOG = """\
Angles are in radians. Reals may be written with a pi helper:
  pi, 2pi, -pi, pi/3, 0.5*pi/2   (form: [c][*]pi[/d])
Axes: --axis name:min:max:n[:log]; an axis named T (or beta) sets the
temperature, t the time, and any other name overrides that parameter.
The scan command runs a quench when one axis is t, else an Uhlmann loop.
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str
    params: dict = field(default_factory=dict)
    axes: tuple = ()
    n_steps: int = 1024
    out_path: str = "-"
    format: str = "csv"
    mode: str = "both"

    @property
    def process(self) -> str:
        if self.command in registry.PROCESSES:
            return self.command
        if self.command == "scan":
            return "quench" if any(a.name == "t" for a in self.axes) else "uhlmann"
        raise ValueError("verify runs every process of the model")


# --------------------------------------------------------------------------- parsing

_PI = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/((?:\d+\.?\d*|\.\d+)))?$")


def parse_real(text: str) -> float:
    """A float literal or a multiple of pi such as ``pi/3`` or ``-2pi``."""
    s = text.strip()
    try:
        value = float(s)
    except ValueError:
        m = _PI.match(s)
        if not m:
            raise ValueError(f"not a real number: {text!r}") from None
        coeff = m.group(1)
        c = -1.0 if coeff == "-" else 1.0 if coeff in ("", "+") else float(coeff)
        value = c * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def parse_param(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise UsageError(f"--param: expected key=value, got {text!r}")
    try:
        return key.strip(), parse_real(value)
    except ValueError as exc:
        raise UsageError(f"--param {key.strip()}: {exc}") from None


def parse_axis(text: str) -> GridAxis:
    parts = text.split(":")
    if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] not in ("log", "linear")):
        raise UsageError(f"--axis: expected name:min:max:n[:log], got {text!r}")
    name = parts[0].strip()
    try:
        lo, hi = parse_real(parts[1]), parse_real(parts[2])
        n = int(parts[3])
    except ValueError as exc:
        raise UsageError(f"--axis {name}: {exc}") from None
    scale = parts[4] if len(parts) == 5 else "linear"
    try:
        return GridAxis(name, lo, hi, n, scale)
    except LoschmidtError as exc:
        raise UsageError(f"--axis: {exc}") from None


def _build_parser() -> _Parser:
    p = _Parser(
        prog="loschmidt",
        description="Loschmidt amplitudes of purified thermal states: scans, criticals and checks.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", required=True, choices=registry.MODELS)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--axis", action="append", default=[], metavar="NAME:MIN:MAX:N[:log]")
    p.add_argument("--steps", type=int, default=1024, help="holonomy steps (default 1024)")
    p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--mode", choices=MODES, default="both")
    return p


def _has_temperature(names) -> bool:
    return "T" in names or "beta" in names


def parse_args(argv: list[str]) -> RunConfig:
    ns = _build_parser().parse_args(argv)
    params: dict[str, float] = {}
    for item in ns.param:
        key, value = parse_param(item)
        if key in params:
            raise UsageError(f"--param {key}: given more than once")
        params[key] = value
    axes = tuple(parse_axis(a) for a in ns.axis)
    names = [a.name for a in axes]
    if len(set(names)) != len(names):
        raise UsageError("--axis: duplicate axis names")
    if ns.steps < MIN_STEPS:
        raise UsageError(f"--steps: must be at least {MIN_STEPS}")

    cfg = RunConfig(ns.command, ns.model, params, axes, ns.steps, ns.out, ns.format, ns.mode)
    if ns.command == "verify":
        if len(axes) > 1:
            raise UsageError("--axis: verify takes at most one axis")
        if axes and not _has_temperature(names):
            raise UsageError("--axis: verify only scans a temperature axis (T or beta)")
        _check_verify_params(cfg)
        return cfg
    if ns.command == "scan" and len(axes) != 2:
        raise UsageError("--axis: scan needs exactly two axes")
    if ns.command != "scan" and len(axes) not in (1, 2):
        raise UsageError(f"--axis: {ns.command} needs one or two axes")
    process = cfg.process
    if (ns.model, process) not in registry.EVALUATORS:
        raise UsageError(f"--model: {ns.model} has no {process} process")
    provided = set(params) | set(names)
    missing = registry.missing_params(ns.model, process, provided)
    if process != "uhlmann" and "t" not in provided:
        missing.append("t")
    if process == "uhlmann" and not _has_temperature(provided):
        missing.append("T")
    if missing:
        raise UsageError(f"--param: missing {', '.join(sorted(set(missing)))} for {ns.model} {process}")
    return cfg


def _check_verify_params(cfg: RunConfig) -> None:
    names = set(cfg.params) | {a.name for a in cfg.axes} | {"T", "t"}
    needed: set[str] = set()
    for (model, process) in registry.EVALUATORS:
        if model == cfg.model:
            needed.update(registry.missing_params(model, process, names))
    if needed:
        raise UsageError(f"--param: missing {', '.join(sorted(needed))} for {cfg.model} verify")


# --------------------------------------------------------------------------- running


def _model(cfg: RunConfig, route: str) -> registry.ScanModel:
    # parameters supplied by an axis are dropped so metadata never shows a stale value
    names = {a.name for a in cfg.axes}
    if _has_temperature(names):
        names |= {"T", "beta"}
    params = {k: v for k, v in cfg.params.items() if k not in names}
    return registry.ScanModel(cfg.model, cfg.process, params, route, cfg.n_steps)


def run_scan(cfg: RunConfig) -> PhaseDiagram:
    route = "numeric" if cfg.mode == "numeric" else "closed-form"
    model = _model(cfg, route)
    axis1 = cfg.axes[0]
    axis2 = cfg.axes[1] if len(cfg.axes) > 1 else None
    scanner = scan_uhlmann if model.is_uhlmann else scan_dynamics
    diagram = scanner(model, axis1, axis2)
    diagram.metadata["command"] = cfg.command
    diagram.metadata["mode"] = cfg.mode
    if cfg.mode == "both":
        diagram.metadata["route_comparison"] = compare_routes(diagram, model)
    return diagram


def _fmt(x: float) -> str:
    return "%.17g" % x


def to_csv(diagram: PhaseDiagram) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for c in diagram.cells:
        row = (
            _fmt(c.x1),
            "" if c.x2 is None else _fmt(c.x2),
            _fmt(c.G_re),
            _fmt(c.G_im),
            _fmt(c.echo),
            "" if c.phase is None else _fmt(c.phase),
            _fmt(c.rate),
            "true" if c.divergent else "false",
        )
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def to_json(diagram: PhaseDiagram) -> str:
    doc = {
        "metadata": diagram.metadata,
        "axes": [a.as_dict() for a in (diagram.axis1, diagram.axis2) if a is not None],
        "cells": [c._asdict() for c in diagram.cells],
        "criticals": [list(c) for c in diagram.criticals],
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def from_json(text: str) -> PhaseDiagram:
    doc = json.loads(text)
    axes = [GridAxis(**a) for a in doc["axes"]]
    cells = [Cell(**c) for c in doc["cells"]]
    criticals = [tuple(c) for c in doc["criticals"]]
    return PhaseDiagram(axes[0], axes[1] if len(axes) > 1 else None, cells, criticals, doc["metadata"])


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".loschmidt-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(diagram: PhaseDiagram, cfg: RunConfig, stdout=None) -> None:
    text = to_json(diagram) if cfg.format == "json" else to_csv(diagram)
    _write(text, cfg.out_path, stdout)


def _write(text: str, path: str, stdout=None) -> None:
    if path == "-":
        (stdout or sys.stdout).write(text)
    else:
        write_atomic(path, text)


# --------------------------------------------------------------------------- verify

VERIFY_TIMES = np.linspace(0.0, 10.0, 41)


def _temperatures(cfg: RunConfig, scale: float) -> list[dict]:
    """Temperature points for verify: the axis, else the given T/beta, else defaults."""
    if cfg.axes:
        a = cfg.axes[0]
        return [{a.name: float(x)} for x in a.values]
    for key in ("T", "beta"):
        if key in cfg.params:
            return [{key: cfg.params[key]}]
    return [{"beta": b / scale} for b in (0.5, 1.0, 2.0)]


def verify(cfg: RunConfig) -> tuple[list[tuple[str, float, float]], bool]:
    """Closed form vs numeric pipeline for every process of the model."""
    rows = []
    for (name, process) in registry.EVALUATORS:
        if name != cfg.model:
            continue
        closed = registry.ScanModel(name, process, dict(cfg.params), "closed-form", cfg.n_steps)
        numeric = closed.with_route("numeric")
        p = closed.merged()
        scale = float(p.get("R", 1.0)) if name == "three-level" else 1.0
        dev = 0.0
        for point in _temperatures(cfg, scale):
            if process == "uhlmann":
                samples = [point]
            else:
                samples = [{**point, "t": float(t)} for t in VERIFY_TIMES]
            for s in samples:
                dev = max(dev, abs(closed.evaluate(s) - numeric.evaluate(s)))
        tol = HOLONOMY_TOL if process == "uhlmann" else DYNAMICS_TOL
        rows.append((f"{name}:{process}", dev, tol))
    ok = all(dev <= tol for _, dev, tol in rows)
    return rows, ok


def format_report(rows) -> str:
    lines = ["quantity,max_abs_deviation,tolerance,status"]
    for q, dev, tol in rows:
        lines.append(f"{q},{dev:.3e},{tol:.0e},{'ok' if dev <= tol else 'FAIL'}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- entry point


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ("-h", "--help"):
        _build_parser().print_help(stdout or sys.stdout)
        return EXIT_OK
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        stderr.write(f"loschmidt: usage error: {exc}\n")
        return EXIT_USAGE
    try:
        if cfg.command == "verify":
            rows, ok = verify(cfg)
            _write(format_report(rows), cfg.out_path, stdout)
            if not ok:
                failed = ", ".join(q for q, dev, tol in rows if dev > tol)
                stderr.write(f"loschmidt: verification failed: {failed}\n")
                return EXIT_VERIFY
            return EXIT_OK
        emit(run_scan(cfg), cfg, stdout)
    except (LoschmidtError, ArithmeticError) as exc:
        stderr.write(f"loschmidt: domain error: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        stderr.write(f"loschmidt: I/O error: {exc}\n")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
