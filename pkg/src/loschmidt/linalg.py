"""Small dense complex linear algebra.

Everything here works on plain ``numpy`` arrays. Functions that act on a
single matrix also accept a stack of matrices with shape ``(..., d, d)``.
Units are fixed to hbar = k_B = 1.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimMismatch, NotHermitian, NotPositive

HERMITIAN_TOL = 1e-10
CLAMP_TOL = 1e-12
NEGATIVE_TOL = 1e-9

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class EigenSystem(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def dagger(A: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(A, -1, -2))


def pauli_dot(vec) -> np.ndarray:
    """Return ``vec . sigma`` for a real 3-vector."""
    vx, vy, vz = vec
    return vx * SIGMA_X + vy * SIGMA_Y + vz * SIGMA_Z


def hermiticity_error(A: np.ndarray) -> float:
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A - dagger(A))))


def check_hermitian(A: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise DimMismatch(f"expected square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NotHermitian("matrix has non-finite entries")
    err = hermiticity_error(A)
    if err > tol:
        raise NotHermitian(f"max |A - A^dagger| = {err:.3e} exceeds {tol:.1e}")
    return A


def eig_hermitian(A: np.ndarray) -> EigenSystem:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""
    A = check_hermitian(A)
    values, vectors = np.linalg.eigh(0.5 * (A + dagger(A)))
    return EigenSystem(values, vectors)


def from_eig(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Rebuild ``V diag(f) V^dagger`` (works on stacks)."""
    return (vectors * values[..., None, :]) @ dagger(vectors)


def expm_i(H: np.ndarray, t: float, sign: int = -1) -> np.ndarray:
    """``exp(sign * i * H * t)`` for Hermitian ``H``; ``sign=-1`` is forward evolution."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    values, vectors = eig_hermitian(H)
    phases = np.exp(sign * 1j * values * t)
    return from_eig(phases, vectors)


def sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in [-1e-9, 0) are clamped to zero."""
    values, vectors = eig_hermitian(rho)
    if np.any(values < -NEGATIVE_TOL):
        raise NotPositive(f"smallest eigenvalue {values.min():.3e} is negative")
    return from_eig(np.sqrt(np.clip(values, 0.0, None)), vectors)


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def partial_trace_second(M: np.ndarray, d: int) -> np.ndarray:
    """Trace out the ancilla of a ``d^2 x d^2`` operator (index = system*d + ancilla)."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (d * d, d * d):
        raise DimMismatch(f"expected shape {(d * d, d * d)}, got {M.shape}")
    return np.einsum("acbc->ab", M.reshape(d, d, d, d))


def unitarity_error(U: np.ndarray) -> float:
    U = np.asarray(U)
    return float(np.max(np.abs(dagger(U) @ U - np.eye(U.shape[-1]))))


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (X + X.conj().T)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(X)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_density(d: int, rng: np.random.Generator, min_eig: float = 1e-3) -> np.ndarray:
    """Random full-rank density matrix with spectrum bounded below by ``min_eig``."""
    weights = rng.dirichlet(np.ones(d))
    weights = min_eig + (1.0 - d * min_eig) * weights
    U = random_unitary(d, rng)
    return (U * weights) @ U.conj().T
