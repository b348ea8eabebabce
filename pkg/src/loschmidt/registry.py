"""Named model/process pairs exposed as amplitude evaluators over keyword parameters.

Each evaluator takes a mapping of parameter values. Temperature may be given
either as ``T`` or as ``beta`` (``T`` wins when both are present, so a ``T``
axis overrides a fixed ``beta``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import dynamics, models, uhlmann
from .errors import DomainError

MODELS = ("two-level", "three-level", "creutz")
PROCESSES = ("quasistatic", "quench", "uhlmann")
ROUTES = ("closed-form", "numeric")

# parameters each (model, process) needs before axes are applied
REQUIRED = {
    ("two-level", "quasistatic"): ("Rx", "Ry", "Rz", "beta"),
    ("two-level", "quench"): ("Rx", "Ry", "Rz", "beta"),
    ("three-level", "quasistatic"): ("R", "theta", "phi", "beta"),
    ("three-level", "quench"): ("R", "theta", "phi", "beta"),
    ("three-level", "uhlmann"): ("R", "beta"),
    ("creutz", "uhlmann"): ("m", "Theta", "k_points"),
}
DEFAULTS = {
    ("two-level", "quench"): {"E": 1.0},
    ("creutz", "uhlmann"): {"k_points": 1024.0},
}
# free variables supplied per grid cell rather than as fixed parameters
FREE = {
    "quasistatic": ("t",),
    "quench": ("t",),
    "uhlmann": (),
}


def beta_of(p: Mapping[str, float]) -> float:
    if "T" in p:
        T = float(p["T"])
        if T <= 0:
            raise DomainError("T must be positive")
        return 1.0 / T
    beta = float(p["beta"])
    if beta < 0:
        raise DomainError("beta must be non-negative")
    return beta


def temperature_of(p: Mapping[str, float]) -> float:
    if "T" in p:
        return float(p["T"])
    beta = float(p["beta"])
    if beta <= 0:
        raise DomainError("this model needs a finite positive temperature")
    return 1.0 / beta


def _R_vec(p):
    return (float(p["Rx"]), float(p["Ry"]), float(p["Rz"]))


def _creutz(p) -> models.CreutzSpec:
    k = float(p["k_points"])
    if k != int(k) or k < 4:
        raise DomainError("k_points must be an integer of at least 4")
    return models.CreutzSpec(float(p["m"]), float(p["Theta"]), int(k))


def _three(p) -> models.ThreeLevelSpec:
    return models.ThreeLevelSpec(float(p["R"]), float(p["theta"]), float(p["phi"]), beta_of(p))


# --------------------------------------------------------------------------- evaluators


def _tl_qs_closed(p, n_steps):
    return complex(models.two_level_quasistatic_G(models.TwoLevelSpec(_R_vec(p), beta_of(p)), float(p["t"])))


def _tl_qs_numeric(p, n_steps):
    spec = models.TwoLevelSpec(_R_vec(p), beta_of(p))
    H = models.two_level_hamiltonian(spec.R_vec)
    return dynamics.loschmidt_amplitude(models.two_level_density(spec), H, float(p["t"]))


def _tl_q_closed(p, n_steps):
    return complex(models.two_level_thermal_quench_G(float(p["E"]), beta_of(p), _R_vec(p), float(p["t"])))


def _tl_q_numeric(p, n_steps):
    rho0 = models.two_level_thermal_density(float(p["E"]), beta_of(p))
    return dynamics.loschmidt_amplitude(rho0, models.two_level_hamiltonian(_R_vec(p)), float(p["t"]))


def _3l_qs_closed(p, n_steps):
    return complex(models.three_level_quasistatic_G(_three(p), float(p["t"])))


def _3l_qs_numeric(p, n_steps):
    s = _three(p)
    rho0 = models.three_level_density(s.R, s.beta)
    return dynamics.loschmidt_amplitude(rho0, models.three_level_hamiltonian(s.R), float(p["t"]))


def _3l_q_closed(p, n_steps):
    return complex(models.three_level_quench_G(_three(p), float(p["t"])))


def _3l_q_numeric(p, n_steps):
    s = _three(p)
    rho0 = models.three_level_density(s.R, s.beta)
    H = models.three_level_quench_hamiltonian(s.R, s.theta, s.phi)
    return dynamics.loschmidt_amplitude(rho0, H, float(p["t"]))


def _3l_u_closed(p, n_steps):
    R = float(p["R"])
    if R <= 0:
        raise DomainError("R must be positive")
    return complex(models.three_level_uhlmann_closed_form(R, beta_of(p)))


def _3l_u_numeric(p, n_steps):
    R = float(p["R"])
    if R <= 0:
        raise DomainError("R must be positive")
    return uhlmann.uhlmann_loschmidt(models.three_level_uhlmann_path(R, beta_of(p), n_steps))


def _cr_u_closed(p, n_steps):
    return complex(models.two_band_uhlmann_closed_form(_creutz(p), temperature_of(p)))


def _cr_u_numeric(p, n_steps):
    return uhlmann.uhlmann_loschmidt(models.creutz_path(_creutz(p), temperature_of(p), n_steps))


EVALUATORS: dict[tuple[str, str], tuple[Callable, Callable]] = {
    ("two-level", "quasistatic"): (_tl_qs_closed, _tl_qs_numeric),
    ("two-level", "quench"): (_tl_q_closed, _tl_q_numeric),
    ("three-level", "quasistatic"): (_3l_qs_closed, _3l_qs_numeric),
    ("three-level", "quench"): (_3l_q_closed, _3l_q_numeric),
    ("three-level", "uhlmann"): (_3l_u_closed, _3l_u_numeric),
    ("creutz", "uhlmann"): (_cr_u_closed, _cr_u_numeric),
}


@dataclass(frozen=True)
class ScanModel:
    """An amplitude evaluator with fixed parameters and a chosen route."""

    name: str
    process: str
    params: dict = field(default_factory=dict)
    route: str = "closed-form"
    n_steps: int = uhlmann.DEFAULT_STEPS

    def __post_init__(self):
        if (self.name, self.process) not in EVALUATORS:
            raise DomainError(f"model {self.name!r} has no {self.process} process")
        if self.route not in ROUTES:
            raise DomainError(f"unknown route {self.route!r}")

    @property
    def is_uhlmann(self) -> bool:
        return self.process == "uhlmann"

    def with_route(self, route: str) -> ScanModel:
        return ScanModel(self.name, self.process, dict(self.params), route, self.n_steps)

    def merged(self, overrides: Mapping[str, float] | None = None) -> dict:
        p = dict(DEFAULTS.get((self.name, self.process), {}))
        p.update(self.params)
        if overrides:
            p.update(overrides)
        return p

    def evaluate(self, overrides: Mapping[str, float] | None = None) -> complex:
        closed, numeric = EVALUATORS[(self.name, self.process)]
        fn = closed if self.route == "closed-form" else numeric
        return complex(fn(self.merged(overrides), self.n_steps))

    def metadata(self) -> dict:
        meta = {
            "model": self.name,
            "process": self.process,
            "route": self.route,
            "params": {k: float(v) for k, v in sorted(self.merged().items())},
            "n_steps": int(self.n_steps),
        }
        extra = analytic_markers(self)
        if extra:
            meta["analytic"] = extra
        return meta


def missing_params(name: str, process: str, provided) -> list[str]:
    have = set(provided) | set(DEFAULTS.get((name, process), {}))
    if "T" in have:
        have.add("beta")
    need = REQUIRED.get((name, process), ())
    return [k for k in need if k not in have]


def analytic_markers(model: ScanModel) -> dict:
    """Closed-form critical temperatures recorded alongside a run."""
    p = model.merged()
    key = (model.name, model.process)
    # markers do not depend on the temperature or the time
    if missing_params(model.name, model.process, set(p) | {"T", "t"}):
        return {}
    if key == ("three-level", "quasistatic"):
        T = models.critical_temperatures_analytic(models.CriticalKind.THREE_LEVEL_QUASISTATIC, float(p["R"]))
        return {"T_q": T}
    if key == ("three-level", "quench"):
        T = models.critical_temperatures_analytic(
            models.CriticalKind.THREE_LEVEL_QUENCH, float(p["R"]), float(p["theta"])
        )
        return {"T_h": T}
    if key == ("three-level", "uhlmann"):
        return {"T_star": models.three_level_uhlmann_Tstar(float(p["R"]))}
    if key == ("creutz", "uhlmann"):
        spec = _creutz(p)
        T = models.creutz_critical_temperature(spec)
        return {"winding": float(models.creutz_winding(spec)), "T_star": T}
    return {}


def zero_times(model: ScanModel, n_max: int = 4) -> list[float]:
    """``(n + 1/2) pi / omega`` for the oscillation frequency of the quasistatic/quench models."""
    p = model.merged()
    if model.name == "two-level":
        w = float(np.linalg.norm(_R_vec(p)))
    else:
        w = float(p["R"])
    return [(n + 0.5) * math.pi / w for n in range(n_max)]
