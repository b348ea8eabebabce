"""Grid scans of Loschmidt amplitudes, critical-point refinement and phase-jump detection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import root

from .dynamics import RATE_CAP, free_energy_density, principal_arg, refine_minimum
from .errors import DomainError, LoschmidtError, NoSignChange
from .registry import ScanModel
from .uhlmann import snap_phase

ECHO_FLOOR = 1e-20
CRITICAL_TOL = 1e-6
SEED_TOL = 0.25
TEMPERATURE_NAMES = ("T", "beta")
GRID_SEMANTICS = "linear axes at nodes; log axes at geometric cell centers"


@dataclass(frozen=True)
class GridAxis:
    name: str
    min: float
    max: float
    n: int
    scale: str = "linear"

    def __post_init__(self):
        if not self.name:
            raise DomainError("axis name must be non-empty")
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or not self.min < self.max:
            raise DomainError(f"axis {self.name}: need finite min < max")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"axis {self.name}: need n >= 2")
        if self.scale not in ("linear", "log"):
            raise DomainError(f"axis {self.name}: scale must be linear or log")
        if self.scale == "log" and self.min <= 0:
            raise DomainError(f"axis {self.name}: log scale needs min > 0")

    @property
    def values(self) -> np.ndarray:
        if self.scale == "linear":
            return np.linspace(self.min, self.max, self.n)
        edges = np.geomspace(self.min, self.max, self.n + 1)
        return np.sqrt(edges[:-1] * edges[1:])

    @property
    def cell_width(self) -> float:
        """Largest spacing between adjacent sample points."""
        return float(np.max(np.diff(self.values)))

    def as_dict(self) -> dict:
        return {"name": self.name, "min": float(self.min), "max": float(self.max), "n": int(self.n), "scale": self.scale}


class Cell(NamedTuple):
    x1: float
    x2: float | None
    G_re: float
    G_im: float
    echo: float
    phase: float | None
    rate: float
    divergent: bool


class PhaseJump(NamedTuple):
    location: tuple[float, float | None]
    delta_phase: float


@dataclass
class PhaseDiagram:
    axis1: GridAxis
    axis2: GridAxis | None
    cells: list[Cell]
    criticals: list[tuple[float, float | None]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis1.n, 1 if self.axis2 is None else self.axis2.n)

    def grid(self, name: str) -> np.ndarray:
        """Cell field as an ``n1 x n2`` array (``None`` phases become NaN)."""
        vals = [getattr(c, name) for c in self.cells]
        vals = [np.nan if v is None else v for v in vals]
        return np.asarray(vals, dtype=float).reshape(self.shape)

    def amplitudes(self) -> np.ndarray:
        return (self.grid("G_re") + 1j * self.grid("G_im"))


def _as_evaluator(model) -> tuple[Callable[[dict], complex], dict]:
    if isinstance(model, ScanModel):
        return model.evaluate, model.metadata()
    return model, {}


def _point(axis1: GridAxis, axis2: GridAxis | None, x1, x2) -> dict:
    p = {axis1.name: float(x1)}
    if axis2 is not None:
        p[axis2.name] = float(x2)
    return p


def _make_cell(x1, x2, G: complex, uhlmann_phase: bool) -> Cell:
    echo = abs(G) ** 2
    if echo < ECHO_FLOOR:
        phase = None
    else:
        phase = principal_arg(G)
        if uhlmann_phase:
            phase = snap_phase(phase)
        phase += 0.0
    rate = free_energy_density(G, 1, RATE_CAP)
    return Cell(float(x1), None if x2 is None else float(x2), G.real, G.imag, echo, phase, rate, rate >= RATE_CAP)


def _fill(evaluate, axis1: GridAxis, axis2: GridAxis | None, uhlmann_phase: bool) -> list[Cell]:
    xs2 = [None] if axis2 is None else axis2.values
    cells = []
    for x1 in axis1.values:
        for x2 in xs2:
            G = complex(evaluate(_point(axis1, axis2, x1, x2)))
            cells.append(_make_cell(x1, x2, G, uhlmann_phase))
    return cells


def _metadata(meta: dict, axis1, axis2, kind: str) -> dict:
    out = dict(meta)
    out.update({"scan": kind, "rate_cap": RATE_CAP, "L": 1, "grid": GRID_SEMANTICS})
    return out


def scan_dynamics(model, axis1: GridAxis, axis2: GridAxis | None = None) -> PhaseDiagram:
    """Scan ``G`` over a (temperature, time) plane or a single axis.

    ``model`` is a :class:`ScanModel` or any callable taking a parameter
    mapping keyed by axis name. Criticals are refined zeros of ``G``.
    """
    evaluate, meta = _as_evaluator(model)
    cells = _fill(evaluate, axis1, axis2, uhlmann_phase=False)
    diagram = PhaseDiagram(axis1, axis2, cells, [], _metadata(meta, axis1, axis2, "dynamics"))
    diagram.criticals = _dynamics_criticals(evaluate, diagram)
    return diagram


def scan_uhlmann(model, axis1: GridAxis, axis2: GridAxis | None = None) -> PhaseDiagram:
    """Scan ``G^U`` over a (temperature, parameter) plane or a temperature axis.

    Phases are snapped to {0, pi}; criticals come from bisection of the real
    amplitude along the temperature axis in every parameter column.
    """
    evaluate, meta = _as_evaluator(model)
    cells = _fill(evaluate, axis1, axis2, uhlmann_phase=True)
    diagram = PhaseDiagram(axis1, axis2, cells, [], _metadata(meta, axis1, axis2, "uhlmann"))
    diagram.criticals = _uhlmann_criticals(evaluate, diagram)
    return diagram


# --------------------------------------------------------------------------- criticals


def refine_critical(evaluator: Callable[[float], float], bracket: tuple[float, float]) -> float:
    """Bisect a sign change of ``evaluator`` until the bracket is below ``1e-10 max(1, |x|)``."""
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = float(evaluator(a)), float(evaluator(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise NoSignChange(f"no sign change on [{a!r}, {b!r}]")
    while abs(b - a) >= 1e-10 * max(1.0, abs(0.5 * (a + b))):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        fm = float(evaluator(mid))
        if fm == 0.0:
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, fa):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _temperature_axis(diagram: PhaseDiagram) -> int:
    if diagram.axis2 is not None and diagram.axis2.name in TEMPERATURE_NAMES and diagram.axis1.name not in TEMPERATURE_NAMES:
        return 2
    return 1


def _uhlmann_criticals(evaluate, diagram: PhaseDiagram) -> list[tuple[float, float | None]]:
    along = _temperature_axis(diagram)
    G = diagram.amplitudes()
    ax1, ax2 = diagram.axis1, diagram.axis2
    if along == 2:
        G = G.T
        scan_axis, other = ax2, ax1
    else:
        scan_axis, other = ax1, ax2
    xs = scan_axis.values
    others = [None] if other is None else other.values
    found = []
    for j, y in enumerate(others):
        f = G[:, j].real

        def line(x, y=y):
            p = {scan_axis.name: float(x)}
            if other is not None:
                p[other.name] = float(y)
            return complex(evaluate(p)).real

        for i in range(len(xs)):
            roots = []
            if f[i] == 0.0:
                roots.append(float(xs[i]))
            elif i + 1 < len(xs) and f[i + 1] != 0.0 and f[i] * f[i + 1] < 0:
                roots.append(refine_critical(line, (xs[i], xs[i + 1])))
            for x in roots:
                if abs(line(x)) >= CRITICAL_TOL:
                    continue
                found.append((x, None if other is None else float(y)) if along == 1 else (float(y), x))
    return found


def _local_minima(mag: np.ndarray) -> list[tuple[int, int]]:
    n1, n2 = mag.shape
    out = []
    for i in range(n1):
        for j in range(n2):
            v = mag[i, j]
            if v >= SEED_TOL:
                continue
            block = mag[max(i - 1, 0) : i + 2, max(j - 1, 0) : j + 2]
            if v <= block.min():
                out.append((i, j))
    return out


def _dynamics_criticals(evaluate, diagram: PhaseDiagram) -> list[tuple[float, float | None]]:
    ax1, ax2 = diagram.axis1, diagram.axis2
    mag = np.abs(diagram.amplitudes())
    xs1 = ax1.values
    xs2 = None if ax2 is None else ax2.values
    found: list[tuple[float, float | None]] = []

    def duplicate(x1, x2):
        for c1, c2 in found:
            if abs(c1 - x1) <= 0.5 * ax1.cell_width and (x2 is None or abs(c2 - x2) <= 0.5 * ax2.cell_width):
                return True
        return False

    for i, j in _local_minima(mag):
        if ax2 is None:

            def objective(x):
                return abs(complex(evaluate({ax1.name: float(x)})))

            x1, value = refine_minimum(objective, xs1, mag[:, 0], i)
            x2 = None
        else:

            def residual(v):
                G = complex(evaluate({ax1.name: float(v[0]), ax2.name: float(v[1])}))
                return [G.real, G.imag]

            try:
                res = root(residual, [xs1[i], xs2[j]], method="hybr", options={"xtol": 1e-14})
            except LoschmidtError:
                continue
            x1, x2 = float(res.x[0]), float(res.x[1])
            if not (ax1.min <= x1 <= ax1.max and ax2.min <= x2 <= ax2.max):
                continue
            try:
                value = abs(complex(evaluate({ax1.name: x1, ax2.name: x2})))
            except LoschmidtError:
                continue
        if value < CRITICAL_TOL and not duplicate(x1, x2):
            found.append((x1, x2))
    # rounding keeps the order stable against last-digit differences between seeds
    found.sort(key=lambda c: (round(c[0], 8), -math.inf if c[1] is None else round(c[1], 8)))
    return found


# --------------------------------------------------------------------------- phase jumps


def _wrap(delta: float) -> float:
    """Principal branch ``(-pi, pi]``."""
    w = math.remainder(delta, 2 * math.pi)
    return math.pi if w == -math.pi else w


def detect_phase_jumps(diagram: PhaseDiagram, axis: int = 1) -> list[PhaseJump]:
    """Jumps ``|delta phase| > pi/2`` between consecutive defined cells along ``axis``."""
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    if axis == 2 and diagram.axis2 is None:
        raise ValueError("diagram has no second axis")
    phase = diagram.grid("phase")
    x1 = diagram.axis1.values
    x2 = [None] if diagram.axis2 is None else list(diagram.axis2.values)
    if axis == 2:
        phase = phase.T
    jumps = []
    for j in range(phase.shape[1]):
        prev = None
        for i in range(phase.shape[0]):
            v = phase[i, j]
            if math.isnan(v):
                continue
            if prev is not None:
                d = _wrap(v - phase[prev, j])
                if abs(d) > math.pi / 2:
                    if axis == 1:
                        loc = (0.5 * (x1[prev] + x1[i]), None if x2[j] is None else float(x2[j]))
                    else:
                        loc = (float(x1[j]), 0.5 * (x2[prev] + x2[i]))
                    jumps.append(PhaseJump((float(loc[0]), loc[1] if loc[1] is None else float(loc[1])), d))
            prev = i
    return jumps


# --------------------------------------------------------------------------- route comparison


def compare_routes(diagram: PhaseDiagram, model: ScanModel) -> dict:
    """Re-evaluate with the numeric route and report the largest deviations.

    Dynamics scans are compared cell by cell. Uhlmann scans compare the
    amplitude at, and the position of, every critical (numeric holonomies on
    the whole grid would dominate the run time); criticals whose neighbourhood
    is not full rank are counted as skipped.
    """
    numeric = model.with_route("numeric")
    ax1, ax2 = diagram.axis1, diagram.axis2
    if not model.is_uhlmann:
        dev = 0.0
        for c in diagram.cells:
            G = numeric.evaluate(_point(ax1, ax2, c.x1, c.x2))
            dev = max(dev, abs(G - complex(c.G_re, c.G_im)))
        return {"max_abs_G_deviation": dev, "compared_cells": len(diagram.cells)}
    along = _temperature_axis(diagram)
    scan_axis = ax1 if along == 1 else ax2
    half = 1e-3
    shift = 0.0
    dev = 0.0
    skipped = 0
    agree = True
    for crit in diagram.criticals:
        base = _point(ax1, ax2, crit[0], crit[1])
        x0 = base[scan_axis.name]

        def line(x, base=base):
            return numeric.evaluate({**base, scan_axis.name: float(x)}).real

        try:
            closed_here = model.evaluate(base)
            dev = max(dev, abs(numeric.evaluate(base) - closed_here))
            x_num = refine_critical(line, (x0 - half, x0 + half))
        except NoSignChange:
            agree = False
            continue
        except LoschmidtError:
            skipped += 1
            continue
        shift = max(shift, abs(x_num - x0))
    return {
        "max_abs_G_deviation": dev,
        "max_critical_shift": shift,
        "criticals_agree": agree,
        "compared_criticals": len(diagram.criticals) - skipped,
        "skipped_criticals": skipped,
    }
