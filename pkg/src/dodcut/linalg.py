"""Dense m-by-m flux algebra for symmetric, simultaneously diagonalizable systems.

All flux matrices of the target problems share one orthogonal eigenbasis, so
signed splittings are computed by clipping diagonal eigenvalue vectors and
transforming back instead of running per-face eigensolvers.  Everything here
is immutable after construction and safe to share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# tolerance for structural invariants (orthogonality, unit normals)
STRUCT_TOL = 1e-12


@dataclass(frozen=True)
class SystemMatrices:
    """Flux matrices A, B stored through their shared eigenbasis.

    ``A = V diag(lam1) V^T`` and ``B = V diag(lam2) V^T`` with V orthogonal.
    Wave family k moves with velocity ``(lam1[k], lam2[k])``.
    """

    eigvecs: np.ndarray  # (m, m), orthogonal
    lam1: np.ndarray     # (m,), x-direction wave speeds
    lam2: np.ndarray     # (m,), y-direction wave speeds

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.eigvecs, dtype=float))
        l1 = np.atleast_1d(np.asarray(self.lam1, dtype=float))
        l2 = np.atleast_1d(np.asarray(self.lam2, dtype=float))
        object.__setattr__(self, "eigvecs", v)
        object.__setattr__(self, "lam1", l1)
        object.__setattr__(self, "lam2", l2)
        m = v.shape[0]
        if v.shape != (m, m) or l1.shape != (m,) or l2.shape != (m,):
            raise ValueError("inconsistent system dimensions")
        if np.max(np.abs(v.T @ v - np.eye(m))) > STRUCT_TOL:
            raise ValueError("eigenvector matrix is not orthogonal")

    @property
    def m(self) -> int:
        return self.eigvecs.shape[0]

    @property
    def A(self) -> np.ndarray:
        return (self.eigvecs * self.lam1) @ self.eigvecs.T

    @property
    def B(self) -> np.ndarray:
        return (self.eigvecs * self.lam2) @ self.eigvecs.T

    def wave_speeds(self) -> np.ndarray:
        """Euclidean speed of each wave family."""
        return np.hypot(self.lam1, self.lam2)

    def to_characteristic(self, u: np.ndarray) -> np.ndarray:
        """Row-wise change to characteristic components w = V^T u."""
        return np.asarray(u) @ self.eigvecs

    def from_characteristic(self, w: np.ndarray) -> np.ndarray:
        return np.asarray(w) @ self.eigvecs.T


def build_system(theta: float, rho1: float, rho2: float | None = None, m: int = 2) -> SystemMatrices:
    """System matrices from a rotation angle and per-wave direction angles.

    m=1 is scalar advection with velocity (cos rho1, sin rho1); theta and rho2
    are ignored.  m=2 couples two unit-speed waves through the rotation theta.
    """
    if m == 1:
        return SystemMatrices(
            np.eye(1), np.array([math.cos(rho1)]), np.array([math.sin(rho1)])
        )
    if m == 2:
        if rho2 is None:
            raise ValueError("rho2 is required for m=2")
        c, s = math.cos(theta), math.sin(theta)
        v = np.array([[c, -s], [s, c]])
        return SystemMatrices(
            v,
            np.array([math.cos(rho1), math.cos(rho2)]),
            np.array([math.sin(rho1), math.sin(rho2)]),
        )
    raise ValueError("only m=1 and m=2 are supported")


@dataclass(frozen=True)
class FluxDecomposition:
    """Normal flux matrix C = n1*A + n2*B and its signed spectral parts.

    ``c`` is assembled as ``c_plus + c_minus`` so the splitting identity is
    exact by construction, not up to round-off of a subtraction.
    """

    normal: np.ndarray   # (2,)
    lam: np.ndarray      # (m,), eigenvalues of C in the shared basis
    c_plus: np.ndarray   # (m, m), positive semi-definite part
    c_minus: np.ndarray  # (m, m), negative semi-definite part
    c: np.ndarray        # (m, m)
    c_abs: np.ndarray    # (m, m), c_plus - c_minus


def flux_matrix(sys: SystemMatrices, normal) -> FluxDecomposition:
    """Signed flux splitting for one unit normal."""
    n = np.asarray(normal, dtype=float)
    if abs(math.hypot(n[0], n[1]) - 1.0) > STRUCT_TOL:
        raise ValueError("face normal must be a unit vector")
    lam = n[0] * sys.lam1 + n[1] * sys.lam2
    v = sys.eigvecs
    c_plus = (v * np.maximum(lam, 0.0)) @ v.T
    c_minus = (v * np.minimum(lam, 0.0)) @ v.T
    return FluxDecomposition(n, lam, c_plus, c_minus, c_plus + c_minus, c_plus - c_minus)


def max_wave_speed(sys: SystemMatrices) -> float:
    """Largest ||n1*lam1 + n2*lam2||_inf over unit normals.

    The maximum is attained when n aligns with a wave velocity, so it equals
    the largest Euclidean wave speed.
    """
    return float(np.max(sys.wave_speeds()))


class FluxTables(NamedTuple):
    """Per-face flux matrices for a stack of unit normals; arrays (F, m, m)."""

    lam: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    c: np.ndarray
    c_abs: np.ndarray


def face_flux_tables(sys: SystemMatrices, normals: np.ndarray) -> FluxTables:
    """Vectorized flux splittings for all faces at once."""
    normals = np.asarray(normals, dtype=float)
    lam = np.outer(normals[:, 0], sys.lam1) + np.outer(normals[:, 1], sys.lam2)
    v = sys.eigvecs
    c_plus = np.einsum("ik,fk,jk->fij", v, np.maximum(lam, 0.0), v)
    c_minus = np.einsum("ik,fk,jk->fij", v, np.minimum(lam, 0.0), v)
    return FluxTables(lam, c_plus, c_minus, c_plus + c_minus, c_plus - c_minus)
