"""Built-in models with closed-form Loschmidt amplitudes.

* generic two-level system ``H = R . sigma``;
* planar two-band lattice models, in particular the Creutz ladder
  (units 2K = 1, gap ``Delta_k = sqrt((m + cos k)^2 + sin^2 Theta sin^2 k)``);
* the three-level system ``H = R diag(sigma_z, 1)`` and its quench/Uhlmann
  variants.

Every closed form has a generic counterpart built from the model's
Hamiltonian and density matrix (``*_hamiltonian``, ``*_density``,
``*_path``) so the two routes can be compared.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from . import linalg
from .errors import DomainError, GaplessPath, GridTooCoarse
from .uhlmann import DEFAULT_STEPS, DensityPath, orbit_holonomy

GAP_TOL = 1e-9
BRACKET = (1e-3, 1e3)
BRACKET_EXPANSIONS = 2


def sech(x):
    """Overflow-safe hyperbolic secant."""
    ax = np.abs(x)
    e = np.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


def fermi(x, beta):
    """``1 / (exp(beta x) + 1)`` without overflow."""
    return 0.5 * (1.0 - np.tanh(0.5 * beta * np.asarray(x, dtype=float)))


# --------------------------------------------------------------------------- two-level


@dataclass(frozen=True)
class TwoLevelSpec:
    R_vec: tuple[float, float, float]
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "R_vec", tuple(float(c) for c in self.R_vec))
        if self.R == 0.0:
            raise DomainError("|R| must be positive")
        if self.beta < 0:
            raise DomainError("beta must be non-negative")

    @property
    def R(self) -> float:
        return math.sqrt(sum(c * c for c in self.R_vec))

    @property
    def R_hat(self) -> np.ndarray:
        return np.array(self.R_vec) / self.R


def two_level_hamiltonian(R_vec) -> np.ndarray:
    return linalg.pauli_dot(R_vec)


def two_level_density(spec: TwoLevelSpec) -> np.ndarray:
    """``(1 - tanh(beta R) R_hat . sigma) / 2``."""
    return 0.5 * (linalg.SIGMA_0 - math.tanh(spec.beta * spec.R) * linalg.pauli_dot(spec.R_hat))


def bloch_density(R0) -> np.ndarray:
    """``(1 + R0 . sigma) / 2`` for a Bloch vector with ``|R0| <= 1``."""
    return 0.5 * (linalg.SIGMA_0 + linalg.pauli_dot(R0))


def two_level_quasistatic_G(spec: TwoLevelSpec, t):
    w = spec.R
    return np.cos(w * t) + 1j * np.sin(w * t) * math.tanh(spec.beta * spec.R)


def two_level_quench_G(R0, R_f, t):
    """Quench from ``(1 + R0 . sigma)/2`` into ``H_f = R_f . sigma``."""
    R_f = np.asarray(R_f, dtype=float)
    w = float(np.linalg.norm(R_f))
    if w == 0.0:
        raise DomainError("|R_f| must be positive")
    proj = float(np.dot(R0, R_f)) / w
    return np.cos(w * t) - 1j * np.sin(w * t) * proj


def two_level_thermal_density(E: float, beta: float) -> np.ndarray:
    """Gibbs state of ``H_0 = E sigma_z``."""
    return np.diag([fermi(2 * E, beta), fermi(-2 * E, beta)]).astype(complex)


def two_level_thermal_quench_G(E: float, beta: float, R_f, t):
    """Thermal state of ``E sigma_z`` quenched into ``R_f . sigma``; ``Z = 2 cosh(beta E)``."""
    R_f = np.asarray(R_f, dtype=float)
    w = float(np.linalg.norm(R_f))
    if w == 0.0:
        raise DomainError("|R_f| must be positive")
    # 2 cosh / Z = 1 and 2 sinh / Z = tanh
    return np.cos(w * t) + 1j * (R_f[2] / w) * math.tanh(beta * E) * np.sin(w * t)


# --------------------------------------------------------------------------- two-band planar


@dataclass(frozen=True)
class CreutzSpec:
    m: float
    Theta: float
    k_points: int = 1024

    def __post_init__(self):
        if self.Theta == 0.0:
            raise DomainError("Theta must be non-zero")
        if abs(self.Theta) > math.pi / 2 + 1e-12:
            raise DomainError("Theta must lie in [-pi/2, pi/2]")
        if self.m < 0:
            raise DomainError("m must be non-negative")
        if self.k_points < 1:
            raise DomainError("k_points must be positive")


def k_grid(n: int) -> np.ndarray:
    """Uniform grid on ``[-pi, pi)``; the endpoint ``pi`` is identified with ``-pi``."""
    return -math.pi + 2 * math.pi * np.arange(n) / n


def creutz_vector(spec: CreutzSpec, k):
    """Unnormalised ``(h_x, h_y, h_z)`` whose direction is ``n_hat_k``."""
    k = np.asarray(k, dtype=float)
    return np.stack([spec.m + np.cos(k), np.zeros_like(k), math.sin(spec.Theta) * np.sin(k)])


def creutz_vector_dk(spec: CreutzSpec, k):
    k = np.asarray(k, dtype=float)
    return np.stack([-np.sin(k), np.zeros_like(k), math.sin(spec.Theta) * np.cos(k)])


def creutz_gap(spec: CreutzSpec, k):
    return np.linalg.norm(creutz_vector(spec, k), axis=0)


def creutz_plane(spec: CreutzSpec) -> Callable:
    """The in-plane components ``(n^i, n^j) = (h_z, h_x)`` as a function of k."""

    def plane(k):
        h = creutz_vector(spec, k)
        return h[2], h[0]

    return plane


def _unwrapped_angles(n_plane: Callable, k_points: int) -> np.ndarray:
    k = k_grid(k_points)
    ni, nj = (np.asarray(c, dtype=float) for c in n_plane(k))
    if float(np.min(np.hypot(ni, nj))) < GAP_TOL:
        raise GaplessPath("n^i and n^j vanish simultaneously on the grid")
    theta = np.arctan2(ni, nj)
    closed = np.append(theta, theta[0])
    steps = np.diff(closed)
    steps = (steps + math.pi) % (2 * math.pi) - math.pi
    if np.any(np.abs(steps) >= math.pi - 1e-9):
        raise GridTooCoarse("angle jumps by pi or more between adjacent k points")
    return steps


def winding_number(n_plane: Callable, k_points: int = 1024) -> int:
    """Winding of ``k -> atan2(n^i, n^j)`` over the closed k-grid."""
    total = float(np.sum(_unwrapped_angles(n_plane, k_points))) / (2 * math.pi)
    w = round(total)
    if abs(total - w) > 1e-6:
        raise GridTooCoarse(f"winding sum {total!r} is not an integer")
    return int(w)


def creutz_winding(spec: CreutzSpec) -> int:
    return winding_number(creutz_plane(spec), spec.k_points)


def creutz_angle_rate(spec: CreutzSpec, k):
    """``d theta_k / dk`` for ``theta_k = atan2(h_z, h_x)``."""
    h = creutz_vector(spec, k)
    dh = creutz_vector_dk(spec, k)
    return (h[0] * dh[2] - h[2] * dh[0]) / (h[0] ** 2 + h[2] ** 2)


def creutz_loop_integral(spec: CreutzSpec, T: float) -> float:
    """``oint (d theta_k / 2) sech(Delta_k / 2T)`` by the periodic trapezoidal rule."""
    if T <= 0:
        raise DomainError("T must be positive")
    k = k_grid(spec.k_points)
    gap = creutz_gap(spec, k)
    if float(np.min(gap)) < GAP_TOL:
        raise GaplessPath("Creutz gap closes on the k-grid")
    integrand = 0.5 * creutz_angle_rate(spec, k) * sech(gap / (2 * T))
    return float(np.sum(integrand) * (2 * math.pi / spec.k_points))


def two_band_uhlmann_closed_form(spec: CreutzSpec, T: float) -> float:
    """``cos(pi w1) cos(loop integral)``."""
    w1 = creutz_winding(spec)
    return math.cos(math.pi * w1) * math.cos(creutz_loop_integral(spec, T))


def creutz_critical_temperature(spec: CreutzSpec) -> float | None:
    """Temperature where the loop integral reaches ``pi/2`` in magnitude, else ``None``."""

    def residual(T):
        return abs(creutz_loop_integral(spec, T)) - math.pi / 2

    return _bracketed_root(residual, BRACKET, residual_tol=1e-8)


def _bracketed_root(func: Callable, bracket, residual_tol: float) -> float | None:
    lo, hi = bracket
    for _ in range(BRACKET_EXPANSIONS + 1):
        f_lo, f_hi = func(lo), func(hi)
        if f_lo == 0.0:
            return lo
        if f_hi == 0.0:
            return hi
        if np.sign(f_lo) != np.sign(f_hi):
            root = bisect(func, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=400)
            if abs(func(root)) > residual_tol:
                raise ArithmeticError(f"bisection residual {func(root):.3e} above {residual_tol:.0e}")
            return float(root)
        lo, hi = lo / 10, hi * 10
    return None


def creutz_density(spec: CreutzSpec, T: float, k):
    """``rho_k = (1 - tanh(Delta_k / 2T) n_hat_k . sigma) / 2`` (stacked over k)."""
    h = creutz_vector(spec, k)
    gap = np.linalg.norm(h, axis=0)
    b = np.tanh(gap / (2 * T)) * h / gap
    return 0.5 * (np.eye(2) - np.einsum("i...,ijk->...jk", b, np.stack(linalg.PAULI)))


def creutz_density_dk(spec: CreutzSpec, T: float, k):
    h = creutz_vector(spec, k)
    dh = creutz_vector_dk(spec, k)
    gap = np.linalg.norm(h, axis=0)
    n = h / gap
    dgap = np.sum(n * dh, axis=0)
    dn = (dh - n * dgap) / gap
    a = np.tanh(gap / (2 * T))
    da = 0.5 / T * (1 - a * a) * dgap
    db = da * n + a * dn
    return -0.5 * np.einsum("i...,ijk->...jk", db, np.stack(linalg.PAULI))


def creutz_path(spec: CreutzSpec, T: float, n_steps: int = DEFAULT_STEPS) -> DensityPath:
    """Uhlmann loop ``k = -pi + 2 pi s`` through the Brillouin zone."""
    if T <= 0:
        raise DomainError("T must be positive")
    if float(np.min(creutz_gap(spec, k_grid(max(spec.k_points, 4096))))) < GAP_TOL:
        raise GaplessPath("Creutz gap closes")
    two_pi = 2 * math.pi

    def density(s):
        return creutz_density(spec, T, -math.pi + two_pi * s)

    def derivative(s):
        return two_pi * creutz_density_dk(spec, T, -math.pi + two_pi * s)

    return DensityPath(density, derivative, n_steps, closed=True, vectorized=True)


# --------------------------------------------------------------------------- three-level


@dataclass(frozen=True)
class ThreeLevelSpec:
    R: float
    theta: float = 0.0
    phi: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.R <= 0:
            raise DomainError("R must be positive")
        if self.beta < 0:
            raise DomainError("beta must be non-negative")


def three_level_hamiltonian(R: float) -> np.ndarray:
    return R * np.diag([1.0, -1.0, 1.0]).astype(complex)


def three_level_quench_hamiltonian(R: float, theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return R * np.array(
        [
            [c, s * np.exp(-1j * phi), 0],
            [s * np.exp(1j * phi), -c, 0],
            [0, 0, 1],
        ],
        dtype=complex,
    )


def three_level_density(R: float, beta: float) -> np.ndarray:
    """Gibbs state of ``R diag(1, -1, 1)``."""
    x = beta * R
    w = np.array([math.exp(-2 * x), 1.0, math.exp(-2 * x)])
    return np.diag(w / w.sum()).astype(complex)


def three_level_quasistatic_G(spec: ThreeLevelSpec, t):
    x = spec.beta * spec.R
    q = math.exp(-2 * x)  # weights scaled by exp(-beta R)
    Z = 2 * q + 1
    w = spec.R
    return ((2 * q + 1) * np.cos(w * t) - 1j * (2 * q - 1) * np.sin(w * t)) / Z


def three_level_quench_G(spec: ThreeLevelSpec, t):
    x = spec.beta * spec.R
    q = math.exp(-2 * x)
    c = math.cos(spec.theta)
    Z = 2 * q + 1
    w = spec.R
    return ((2 * q + 1) * np.cos(w * t) + 1j * ((-1 - c) * q + c) * np.sin(w * t)) / Z


def three_level_uhlmann_closed_form(R: float, beta: float) -> float:
    """``[-2 cosh(bR) cos(pi / cosh(bR)) + e^{-bR}] / (2 cosh(bR) + e^{-bR})``."""
    x = beta * R
    sh = float(sech(x))
    tail = math.exp(-x) * sh  # e^{-x} / cosh(x)
    return (-2 * math.cos(math.pi * sh) + tail) / (2 + tail)


def three_level_uhlmann_Tstar(R: float) -> float:
    def g(T):
        return three_level_uhlmann_closed_form(R, 1.0 / T)

    root = _bracketed_root(g, (BRACKET[0] * R, BRACKET[1] * R), residual_tol=1e-10)
    if root is None:
        raise ArithmeticError("no sign change of the three-level Uhlmann amplitude")
    return root


def three_level_uhlmann_density(R: float, beta: float, phi, theta: float = math.pi / 2):
    """Gibbs state of the quench Hamiltonian on the latitude ``theta`` (stacked over phi)."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    x = beta * R
    ch, sh = math.cosh(x), math.sinh(x)
    e3 = math.exp(-x)
    c, s = math.cos(theta), math.sin(theta)
    out = np.zeros(phi.shape + (3, 3), dtype=complex)
    # exp(-x n.sigma) = cosh x - sinh x n.sigma
    out[..., 0, 0] = ch - sh * c
    out[..., 1, 1] = ch + sh * c
    out[..., 0, 1] = -sh * s * np.exp(-1j * phi)
    out[..., 1, 0] = -sh * s * np.exp(1j * phi)
    out[..., 2, 2] = e3
    return out / (2 * ch + e3)


THREE_LEVEL_LOOP_GENERATOR = np.diag([0.0, 1.0, 0.0]).astype(complex)


def three_level_uhlmann_path(
    R: float, beta: float, n_steps: int = DEFAULT_STEPS, theta: float = math.pi / 2
) -> DensityPath:
    """Latitude loop ``phi = 2 pi s`` at polar angle ``theta``; the default is the equator."""
    if beta * R > 300.0:
        raise DomainError("beta R too large: the loop is no longer full rank in double precision")
    two_pi = 2 * math.pi
    gen = THREE_LEVEL_LOOP_GENERATOR

    def density(s):
        return three_level_uhlmann_density(R, beta, two_pi * np.asarray(s), theta)

    def derivative(s):
        rho = density(s)
        return two_pi * 1j * (gen @ rho - rho @ gen)

    return DensityPath(density, derivative, n_steps, closed=True, vectorized=True)


def three_level_latitude_reference(R: float, beta: float, theta: float) -> complex:
    """Uhlmann amplitude of the latitude loop from the exact co-rotating-frame holonomy."""
    rho0 = three_level_uhlmann_density(R, beta, 0.0, theta)[0]
    hol = orbit_holonomy(rho0, THREE_LEVEL_LOOP_GENERATOR)
    return complex(np.trace(rho0 @ hol))


def three_level_uhlmann_connection(R: float, beta: float) -> np.ndarray:
    """Connection per unit ``phi``: ``(i/2)(1 - sech(beta R)) diag(sigma_z, 0)``."""
    a = 0.5 * (1.0 - float(sech(beta * R)))
    return 1j * a * np.diag([1.0, -1.0, 0.0]).astype(complex)


class CriticalKind(enum.Enum):
    THREE_LEVEL_QUASISTATIC = "three-level-quasistatic"
    THREE_LEVEL_QUENCH = "three-level-quench"


def critical_temperatures_analytic(kind: CriticalKind, R: float, theta: float = 0.0) -> float:
    """``T_q = 2R / ln 2`` or ``T_h = 2R / ln(1 + sec theta)`` (k_B = 1)."""
    kind = CriticalKind(kind)
    if R <= 0:
        raise DomainError("R must be positive")
    if kind is CriticalKind.THREE_LEVEL_QUASISTATIC:
        return 2 * R / math.log(2.0)
    if not 0.0 <= theta < math.pi / 2:
        raise DomainError(f"theta = {theta!r} outside [0, pi/2): no positive critical temperature")
    return 2 * R / math.log(1.0 + 1.0 / math.cos(theta))
