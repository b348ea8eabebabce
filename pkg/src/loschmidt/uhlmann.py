"""Uhlmann connection, discretised holonomy and parallel transport of amplitudes.

The connection along a path of full-rank density matrices is

    A_U = - sum_ij |i><i| [d sqrt(rho), sqrt(rho)] |j><j| / (lambda_i + lambda_j)

in the instantaneous eigenbasis of ``rho``. With ``W = sqrt(rho) U`` the
parallel-transport condition reduces to ``dU = -A_U U``, so the gauge after
a closed loop is ``P exp(-oint A_U) U(0)`` and the Uhlmann Loschmidt amplitude
is ``Tr(rho(0) P exp(-oint A_U))``.

Discretisation: midpoint rule, one exact unitary step ``exp(-A(s_{k+1/2}) ds)``
per interval, later steps multiplied from the left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .dynamics import principal_arg
from .errors import DomainError, NotClosed, RankDeficient
from .purification import FULL_RANK_TOL, Amplitude, _matrix

DEFAULT_STEPS = 1024
MIN_STEPS = 64
CLOSED_TOL = 1e-10
SNAP_TOL = 1e-4
FD_STEP = 1e-3


@dataclass(frozen=True)
class DensityPath:
    """A family ``s -> rho(s)`` on ``s in [0, 1]``.

    ``derivative`` returns ``d rho / ds``; without it a fourth-order central
    difference is used. With ``vectorized=True`` both callables accept an
    array of ``s`` values and return a stack of matrices.
    """

    density: Callable
    derivative: Callable | None = None
    n_steps: int = DEFAULT_STEPS
    closed: bool = True
    vectorized: bool = False

    def sample(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.vectorized:
            return np.asarray(self.density(s), dtype=complex)
        return np.stack([np.asarray(self.density(float(x)), dtype=complex) for x in s])

    def sample_derivative(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.derivative is not None:
            if self.vectorized:
                return np.asarray(self.derivative(s), dtype=complex)
            return np.stack([np.asarray(self.derivative(float(x)), dtype=complex) for x in s])
        h = FD_STEP
        return (
            -self.sample(s + 2 * h) + 8 * self.sample(s + h) - 8 * self.sample(s - h) + self.sample(s - 2 * h)
        ) / (12 * h)

    def with_steps(self, n_steps: int) -> DensityPath:
        return DensityPath(self.density, self.derivative, n_steps, self.closed, self.vectorized)


@dataclass(frozen=True)
class Holonomy:
    matrix: np.ndarray
    n_steps: int


def connection(rho: np.ndarray, drho: np.ndarray, rank_tol: float = FULL_RANK_TOL) -> np.ndarray:
    """Uhlmann connection for ``rho`` moving with velocity ``drho`` (stacks allowed)."""
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    values, vectors = linalg.eig_hermitian(rho)
    lo = float(np.min(values))
    if lo <= rank_tol:
        raise RankDeficient(f"smallest eigenvalue {lo:.3e} is not above {rank_tol:.0e}")
    root = np.sqrt(values)
    d_eig = linalg.dagger(vectors) @ drho @ vectors
    root_sum = root[..., :, None] + root[..., None, :]
    # d sqrt(rho) from sqrt(rho) dS + dS sqrt(rho) = d rho
    dsqrt = d_eig / root_sum
    comm = dsqrt * (root[..., None, :] - root[..., :, None])
    A_eig = -comm / (values[..., :, None] + values[..., None, :])
    return vectors @ A_eig @ linalg.dagger(vectors)


def uhlmann_connection_step(rho, drho: np.ndarray) -> np.ndarray:
    """Connection matrix for a single sample; ``drho`` must be Hermitian and traceless."""
    rho = _matrix(rho)
    drho = linalg.check_hermitian(drho)
    tr = abs(np.trace(drho))
    if tr > 1e-10 * max(1.0, float(np.max(np.abs(drho)))):
        raise DomainError(f"d rho has trace {tr:.3e}; a unit-trace family needs a traceless derivative")
    return connection(rho, drho)


def _midpoints(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def step_unitaries(path: DensityPath, n_steps: int | None = None) -> np.ndarray:
    """Stack of ``exp(-A(s_{k+1/2}) ds)`` for ``k = 0 .. n-1``."""
    n = path.n_steps if n_steps is None else n_steps
    s = _midpoints(n)
    A = connection(path.sample(s), path.sample_derivative(s))
    # A is anti-Hermitian: exp(-A ds) = exp(+i K ds) with K = i A Hermitian
    K = 1j * A
    K = 0.5 * (K + linalg.dagger(K))
    return linalg.expm_i(K, 1.0 / n, +1)


def ordered_product(steps: np.ndarray) -> np.ndarray:
    out = np.eye(steps.shape[-1], dtype=complex)
    for step in steps:
        out = step @ out
    return out


def _require_closed(path: DensityPath) -> np.ndarray:
    ends = path.sample(np.array([0.0, 1.0]))
    gap = float(np.max(np.abs(ends[0] - ends[1])))
    if not path.closed or gap > CLOSED_TOL:
        raise NotClosed(f"path is not closed (|rho(0) - rho(1)| = {gap:.3e})")
    return ends[0]


def holonomy(path: DensityPath) -> Holonomy:
    if path.n_steps < MIN_STEPS:
        raise ValueError(f"n_steps must be at least {MIN_STEPS}")
    _require_closed(path)
    return Holonomy(ordered_product(step_unitaries(path)), path.n_steps)


def uhlmann_loschmidt(path: DensityPath) -> complex:
    rho0 = _require_closed(path)
    hol = holonomy(path)
    return complex(np.trace(rho0 @ hol.matrix))


def snap_phase(theta: float, tol: float = SNAP_TOL) -> float:
    """Snap to 0 or pi when within ``tol`` of either."""
    if abs(theta) < tol:
        return 0.0
    if math.pi - abs(theta) < tol:
        return math.pi
    return theta


def uhlmann_phase(path: DensityPath, zero_tol: float = 1e-10, quantized: bool = False) -> float | None:
    """Argument of the Uhlmann Loschmidt amplitude; ``None`` at a zero.

    ``quantized=True`` applies the {0, pi} snapping appropriate to planar
    two-band paths.
    """
    G = uhlmann_loschmidt(path)
    if abs(G) <= zero_tol:
        return None
    theta = principal_arg(G)
    return snap_phase(theta) if quantized else theta


def transport_amplitude(W0: Amplitude, path: DensityPath, trajectory: bool = False):
    """Parallel-transport ``W0`` along ``path`` (open or closed).

    Returns the final amplitude, or the list of amplitudes at
    ``s_k = k / n_steps`` when ``trajectory`` is set.
    """
    n = path.n_steps
    nodes = path.sample(np.arange(n + 1) / n)
    roots = linalg.sqrtm_psd(nodes)
    rho0 = nodes[0]
    W0m = _matrix(W0)
    if float(np.max(np.abs(W0m @ W0m.conj().T - rho0))) > 1e-8:
        raise DomainError("W0 does not purify rho(0)")
    values, vectors = linalg.eig_hermitian(rho0)
    if values[0] <= FULL_RANK_TOL:
        raise RankDeficient(f"smallest eigenvalue {values[0]:.3e} is not above {FULL_RANK_TOL:.0e}")
    inv_root = linalg.from_eig(1.0 / np.sqrt(values).astype(complex), vectors)
    U = inv_root @ W0m
    steps = step_unitaries(path, n)
    out = [Amplitude(W0m, U)]
    for k, step in enumerate(steps):
        U = step @ U
        if trajectory or k == n - 1:
            out.append(Amplitude(roots[k + 1] @ U, U))
    return out if trajectory else out[-1]


def orbit_holonomy(rho0, generator: np.ndarray, period: float = 2 * math.pi) -> np.ndarray:
    """Exact holonomy of the unitary-orbit loop ``rho(phi) = V rho0 V^dagger``, ``V = exp(i phi G)``.

    Along the orbit ``A(phi) = V A(0) V^dagger``; in the co-rotating frame the
    transport equation has the constant generator ``-i G - A(0)``, so no path
    ordering is needed: ``Hol = V(period) exp(period (-i G - A(0)))``.
    """
    rho0 = _matrix(rho0)
    G = linalg.check_hermitian(generator)
    A0 = connection(rho0, 1j * linalg.commutator(G, rho0))
    K = 1j * (-1j * G - A0)
    K = 0.5 * (K + linalg.dagger(K))
    return linalg.expm_i(G, period, +1) @ linalg.expm_i(K, period, -1)
