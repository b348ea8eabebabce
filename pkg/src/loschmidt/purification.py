"""Amplitudes, purified states and the Uhlmann parallel condition.

A density matrix ``rho`` is factored as ``rho = W W^dagger`` with the
amplitude ``W = sqrt(rho) U``. The purified state ``|W>`` is the row-major
flattening of ``W`` (composite index ``a*d + c``, system major, ancilla minor),
so ``<W1|W2> = Tr(W1^dagger W2)`` and ``Tr_2 |W><W| = W W^dagger``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimMismatch, NotPositive, NotUnitary, RankDeficient

TRACE_TOL = 1e-10
FULL_RANK_TOL = 1e-10
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    mat: np.ndarray
    inverse_temperature: float | None = None

    def __post_init__(self):
        mat = linalg.check_hermitian(self.mat)
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotPositive(f"trace {tr.real:.12g} differs from 1")
        lo = np.linalg.eigvalsh(mat)[0]
        if lo < -linalg.CLAMP_TOL:
            raise NotPositive(f"smallest eigenvalue {lo:.3e} is negative")
        object.__setattr__(self, "mat", mat)

    @classmethod
    def thermal(cls, H: np.ndarray, beta: float) -> DensityMatrix:
        """Gibbs state ``exp(-beta H) / Z``, computed with a shifted spectrum."""
        values, vectors = linalg.eig_hermitian(H)
        weights = np.exp(-beta * (values - values.min()))
        weights /= weights.sum()
        return cls(linalg.from_eig(weights.astype(complex), vectors), beta)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def is_full_rank(self, tol: float = FULL_RANK_TOL) -> bool:
        return bool(self.eigenvalues[0] > tol)

    def require_full_rank(self, tol: float = FULL_RANK_TOL) -> None:
        lo = self.eigenvalues[0]
        if lo <= tol:
            raise RankDeficient(f"smallest eigenvalue {lo:.3e} is not above {tol:.0e}")


@dataclass(frozen=True)
class Amplitude:
    mat: np.ndarray
    gauge: np.ndarray | None = None

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimMismatch(f"amplitude must be square, got {mat.shape}")
        gauge = np.eye(mat.shape[0], dtype=complex) if self.gauge is None else np.asarray(self.gauge, dtype=complex)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "gauge", gauge)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def density(self) -> np.ndarray:
        return self.mat @ self.mat.conj().T


@dataclass(frozen=True)
class PurifiedState:
    vec: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=complex).reshape(-1)
        d = int(round(np.sqrt(vec.size)))
        if d * d != vec.size:
            raise DimMismatch(f"length {vec.size} is not a perfect square")
        object.__setattr__(self, "vec", vec)

    @property
    def system_dim(self) -> int:
        return int(round(np.sqrt(self.vec.size)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


def _matrix(x) -> np.ndarray:
    return x.mat if isinstance(x, (DensityMatrix, Amplitude)) else np.asarray(x, dtype=complex)


def amplitude_from_density(rho, gauge: np.ndarray | None = None) -> Amplitude:
    """``W = sqrt(rho) U`` with ``U = 1`` unless a unitary gauge is supplied."""
    rho = _matrix(rho)
    d = rho.shape[0]
    if gauge is None:
        gauge = np.eye(d, dtype=complex)
    gauge = np.asarray(gauge, dtype=complex)
    if gauge.shape != (d, d):
        raise DimMismatch(f"gauge shape {gauge.shape} does not match dimension {d}")
    err = linalg.unitarity_error(gauge)
    if err > UNITARY_TOL:
        raise NotUnitary(f"gauge deviates from unitarity by {err:.3e}")
    return Amplitude(linalg.sqrtm_psd(rho) @ gauge, gauge)


def purify(W: Amplitude) -> PurifiedState:
    return PurifiedState(_matrix(W).reshape(-1))


def unpurify(psi: PurifiedState) -> Amplitude:
    """Inverse of :func:`purify`; the gauge is recovered from the polar factor."""
    d = psi.system_dim
    W = psi.vec.reshape(d, d)
    left, _, right = np.linalg.svd(W)
    return Amplitude(W, left @ right)


def reduce(psi: PurifiedState) -> DensityMatrix:
    """Partial trace over the ancilla."""
    d = psi.system_dim
    M = np.outer(psi.vec, psi.vec.conj())
    return DensityMatrix(linalg.partial_trace_second(M, d))


def overlap(psi1: PurifiedState, psi2: PurifiedState) -> complex:
    if psi1.vec.size != psi2.vec.size:
        raise DimMismatch(f"dimensions {psi1.vec.size} and {psi2.vec.size} differ")
    return complex(np.vdot(psi1.vec, psi2.vec))


def hilbert_schmidt(W1, W2) -> complex:
    """``Tr(W1^dagger W2)``."""
    A, B = _matrix(W1), _matrix(W2)
    if A.shape != B.shape:
        raise DimMismatch(f"shapes {A.shape} and {B.shape} differ")
    return complex(np.trace(A.conj().T @ B))


def expectation(psi: PurifiedState, O: np.ndarray) -> complex:
    """``<psi| O (x) 1 |psi>``, equal to ``Tr(rho O)`` for the reduced state."""
    O = np.asarray(O, dtype=complex)
    d = psi.system_dim
    if O.shape != (d, d):
        raise DimMismatch(f"operator shape {O.shape} incompatible with system dimension {d}")
    W = psi.vec.reshape(d, d)
    return complex(np.vdot(W, O @ W))


def is_parallel(W1, W2, tol: float = 1e-10) -> bool:
    """Uhlmann parallelity: ``W1^dagger W2`` Hermitian with all eigenvalues above ``tol``."""
    A, B = _matrix(W1), _matrix(W2)
    if A.shape != B.shape:
        raise DimMismatch(f"shapes {A.shape} and {B.shape} differ")
    M = A.conj().T @ B
    if linalg.hermiticity_error(M) > tol:
        return False
    values = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    return bool(np.all(values > tol))


def parallel_partner(W1, rho2) -> Amplitude:
    """The amplitude of ``rho2`` parallel to ``W1``: ``sqrt(rho2) U`` with ``U`` the polar factor."""
    A = _matrix(W1)
    S2 = linalg.sqrtm_psd(_matrix(rho2))
    left, _, right = np.linalg.svd(A.conj().T @ S2)
    # A^dagger S2 = L s R  ->  A^dagger S2 (L R)^dagger = L s L^dagger >= 0
    U = (left @ right).conj().T
    return Amplitude(S2 @ U, U)
