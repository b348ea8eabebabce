"""Quasistatic and quench evolution of amplitudes and the Loschmidt amplitude.

``G(t) = <W(0)|W(t)> = Tr(rho(0) exp(-i H t))``. Its argument is the
dynamical phase and ``-ln|G|^2 / L`` the dynamical free-energy density.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import linalg
from .errors import DimMismatch, DomainError
from .purification import Amplitude, DensityMatrix, _matrix

ZERO_TOL = 1e-10
RATE_CAP = 80.0
# |G| is a sum of O(1) terms, so anything this small is cancellation noise
ROUNDOFF_ZERO = 1e-15
COMMUTE_TOL = 1e-10


class Process(enum.Enum):
    QUASISTATIC = "quasistatic"
    QUENCH = "quench"


@dataclass(frozen=True)
class ProcessKind:
    tag: Process
    hamiltonian: np.ndarray

    @classmethod
    def for_state(cls, rho0, H) -> ProcessKind:
        """Classify by whether ``rho0`` commutes with ``H``."""
        comm = linalg.commutator(_matrix(rho0), np.asarray(H, dtype=complex))
        tag = Process.QUASISTATIC if np.max(np.abs(comm)) <= COMMUTE_TOL else Process.QUENCH
        return cls(tag, np.asarray(H, dtype=complex))

    def validate(self, rho0) -> None:
        if self.tag is Process.QUASISTATIC:
            comm = linalg.commutator(_matrix(rho0), self.hamiltonian)
            if np.max(np.abs(comm)) > COMMUTE_TOL:
                raise DomainError("quasistatic process requires [rho(0), H] = 0")


@dataclass(frozen=True)
class LoschmidtSample:
    t: float
    G: complex
    echo: float
    theta_D: float | None
    f: float
    divergent: bool


@dataclass(frozen=True)
class ZeroTime:
    t: float
    magnitude: float
    is_zero: bool


def _check_dims(rho: np.ndarray, H: np.ndarray) -> None:
    if rho.shape != H.shape:
        raise DimMismatch(f"state shape {rho.shape} and Hamiltonian shape {H.shape} differ")


def evolve_amplitude(W0: Amplitude, H: np.ndarray, t: float) -> Amplitude:
    """``W(t) = exp(-i H t) W(0)``; the gauge label is carried along unchanged."""
    H = np.asarray(H, dtype=complex)
    _check_dims(W0.mat, H)
    return Amplitude(linalg.expm_i(H, t, -1) @ W0.mat, W0.gauge)


def evolve_density(rho0, H: np.ndarray, t: float) -> np.ndarray:
    U = linalg.expm_i(H, t, -1)
    return U @ _matrix(rho0) @ U.conj().T


def loschmidt_amplitude(rho0, H: np.ndarray, t: float) -> complex:
    rho = _matrix(rho0)
    H = np.asarray(H, dtype=complex)
    _check_dims(rho, H)
    return complex(np.trace(rho @ linalg.expm_i(H, t, -1)))


def loschmidt_series(rho0, H: np.ndarray, times) -> np.ndarray:
    """Vectorised ``G(t)`` over an array of times (single diagonalisation)."""
    rho = _matrix(rho0)
    H = np.asarray(H, dtype=complex)
    _check_dims(rho, H)
    values, vectors = linalg.eig_hermitian(H)
    # Tr(rho V e^{-i E t} V^dagger) = sum_k (V^dagger rho V)_kk e^{-i E_k t}
    weights = np.real_if_close(np.einsum("ik,ij,jk->k", vectors.conj(), rho, vectors))
    times = np.asarray(times, dtype=float)
    return np.exp(-1j * np.multiply.outer(times, values)) @ weights


def principal_arg(G: complex) -> float:
    """``arg`` in ``(-pi, pi]``; negative reals map to ``+pi``."""
    angle = math.atan2(G.imag, G.real)
    return math.pi if angle == -math.pi else angle


def dynamical_phase(G: complex, zero_tol: float = ZERO_TOL) -> float | None:
    """Principal argument of ``G``, or ``None`` when ``|G| <= zero_tol``."""
    G = complex(G)
    if abs(G) <= zero_tol:
        return None
    return principal_arg(G)


def phase_series(values, zero_tol: float = ZERO_TOL, continuous: bool = False) -> np.ndarray:
    """Phases along a grid; undefined points are NaN.

    ``continuous=True`` accumulates principal-branch increments (np.unwrap) over
    the defined points, for plotting.
    """
    values = np.asarray(values, dtype=complex)
    phases = np.array([principal_arg(complex(g)) if abs(g) > zero_tol else np.nan for g in values])
    if continuous:
        ok = ~np.isnan(phases)
        phases[ok] = np.unwrap(phases[ok])
    return phases


def free_energy_density(G: complex, L: int = 1, cap: float = RATE_CAP) -> float:
    """``-ln|G|^2 / L``, capped at ``cap``.

    ``|G| <= ROUNDOFF_ZERO`` counts as an exact zero and returns the cap:
    the logarithm of cancellation noise (about 1e-16) would otherwise land
    just below the cap at a true zero.
    """
    if L < 1:
        raise ValueError("L must be a positive integer")
    mag = abs(complex(G))
    if mag <= ROUNDOFF_ZERO:
        return cap
    echo = mag * mag
    # + 0.0 turns -0.0 (echo exactly 1) into 0.0
    return min(-math.log(echo) / L, cap) + 0.0


def is_divergent(rate: float, cap: float = RATE_CAP) -> bool:
    return rate >= cap


def sample(rho0, H: np.ndarray, t: float, L: int = 1, zero_tol: float = ZERO_TOL) -> LoschmidtSample:
    G = loschmidt_amplitude(rho0, H, t)
    f = free_energy_density(G, L)
    return LoschmidtSample(t, G, abs(G) ** 2, dynamical_phase(G, zero_tol), f, is_divergent(f))


def refine_minimum(objective, times: np.ndarray, mags: np.ndarray, i: int) -> tuple[float, float]:
    """Golden-section search on the grid bracket around local minimum ``i``."""
    n = len(times)
    if 0 < i < n - 1:
        res = minimize_scalar(
            objective, bracket=(times[i - 1], times[i], times[i + 1]), method="golden", options={"xtol": 1e-15}
        )
    else:
        lo, hi = times[max(i - 1, 0)], times[min(i + 1, n - 1)]
        res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    t_star, g_star = float(res.x), float(res.fun)
    if mags[i] < g_star or not times[0] <= t_star <= times[-1]:
        return float(times[i]), float(mags[i])
    return t_star, g_star


def find_zero_times(
    rho0,
    H: np.ndarray,
    t_min: float,
    t_max: float,
    n_grid: int = 2048,
    threshold: float = 1e-3,
    zero_tol: float = 1e-8,
) -> list[ZeroTime]:
    """Locate zeros of ``|G(t)|`` on ``[t_min, t_max]``.

    Every local minimum of a uniform grid scan is refined by golden-section
    search. Refined minima below ``threshold`` are returned, flagged as zeros
    when ``|G| < zero_tol`` and as near misses otherwise.
    """
    if not t_min < t_max:
        raise ValueError("t_min must be smaller than t_max")
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    times = np.linspace(t_min, t_max, n_grid)
    mags = np.abs(loschmidt_series(rho0, H, times))

    def objective(t):
        return abs(loschmidt_amplitude(rho0, H, t))

    found: list[ZeroTime] = []
    for i in range(n_grid):
        left = mags[i - 1] if i > 0 else np.inf
        right = mags[i + 1] if i < n_grid - 1 else np.inf
        if not (mags[i] <= left and mags[i] < right):
            continue
        t_star, g_star = refine_minimum(objective, times, mags, i)
        if g_star < threshold:
            found.append(ZeroTime(t_star, g_star, g_star < zero_tol))
    return found
