"""Spinor picture of two-level purification.

With ``Delta = 2R`` the thermal state is ``n_f(Delta) P_+ + n_f(-Delta) P_-``
and its purification is a four-component spinor
``|W> = sqrt(n_f(Delta)) |+R>|+R> + sqrt(n_f(-Delta)) |-R>|-R>``.
Quasistatic evolution acts on it as ``exp(-i R_i t Gamma_i)`` with
``Gamma_i = sigma_i (x) 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimMismatch, DomainError
from .models import fermi
from .purification import PurifiedState, _matrix


def gap_from_field(R: float) -> float:
    """Level splitting ``Delta = 2R`` of ``H = R . sigma``."""
    return 2.0 * R


def field_from_gap(Delta: float) -> float:
    return 0.5 * Delta


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError("theta must lie in [0, pi]")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise DomainError("phi must lie in [0, 2 pi)")

    @classmethod
    def from_vector(cls, R_vec) -> BlochAngles:
        x, y, z = (float(c) for c in R_vec)
        r = math.sqrt(x * x + y * y + z * z)
        return cls(math.acos(max(-1.0, min(1.0, z / r))), math.atan2(y, x) % (2 * math.pi))

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True)
class SpinorDecomposition:
    w_plus: np.ndarray
    w_minus: np.ndarray
    coeff_plus: float
    coeff_minus: float

    def state(self) -> PurifiedState:
        return PurifiedState(self.coeff_plus * self.w_plus + self.coeff_minus * self.w_minus)


def level_spinors(angles: BlochAngles) -> tuple[np.ndarray, np.ndarray]:
    """``|+R>`` and ``|-R>`` in the fixed phase convention."""
    c, s = math.cos(angles.theta / 2), math.sin(angles.theta / 2)
    e = np.exp(1j * angles.phi)
    return np.array([c, s * e]), np.array([s, -c * e])


def projectors(angles: BlochAngles) -> tuple[np.ndarray, np.ndarray]:
    n_sigma = linalg.pauli_dot(angles.unit_vector)
    return 0.5 * (linalg.SIGMA_0 + n_sigma), 0.5 * (linalg.SIGMA_0 - n_sigma)


def spinor_decomposition(angles: BlochAngles, beta: float, Delta: float) -> SpinorDecomposition:
    if not (Delta > 0 or beta == 0):
        raise DomainError("Delta must be positive unless beta = 0")
    plus, minus = level_spinors(angles)
    return SpinorDecomposition(
        np.kron(plus, plus),
        np.kron(minus, minus),
        math.sqrt(fermi(Delta, beta)),
        math.sqrt(fermi(-Delta, beta)),
    )


def spinor_gauge(angles: BlochAngles) -> np.ndarray:
    """Gauge ``U = V V^T`` (``V`` = eigenvector columns) for which ``sqrt(rho) U`` flattens to the spinor."""
    plus, minus = level_spinors(angles)
    V = np.column_stack([plus, minus])
    return V @ V.T


def gamma_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(linalg.kron(s, linalg.SIGMA_0) for s in linalg.PAULI)


def gamma_rotate(psi: PurifiedState, R_vec, t: float) -> PurifiedState:
    """Apply ``exp(-i R_i t Gamma_i)`` to a two-level purified state."""
    if psi.vec.size != 4:
        raise DimMismatch(f"expected a 4-component spinor, got {psi.vec.size}")
    generator = sum(r * g for r, g in zip(R_vec, gamma_matrices()))
    return PurifiedState(linalg.expm_i(generator, t, -1) @ psi.vec)


def quasistatic_overlap_closed_form(beta: float, Delta: float, omega: float, t):
    return fermi(Delta, beta) * np.exp(-1j * omega * t) + fermi(-Delta, beta) * np.exp(1j * omega * t)


def minkowski_norm_check(rho, beta: float, Delta: float) -> float:
    """Return ``det rho``; for a thermal qubit it equals ``sech^2(beta Delta / 2) / 4``."""
    rho = _matrix(rho)
    if rho.shape != (2, 2):
        raise DimMismatch("expected a 2x2 density matrix")
    return float(np.linalg.det(rho).real)


def thermal_determinant(beta: float, Delta: float) -> float:
    x = 0.5 * beta * Delta
    return 0.25 / math.cosh(x) ** 2 if x < 350 else 0.0


def schmidt_coefficients(psi: PurifiedState) -> np.ndarray:
    """Singular values of the ``d x d`` reshape; one non-zero value means a product vector."""
    d = psi.system_dim
    return np.linalg.svd(psi.vec.reshape(d, d), compute_uv=False)
