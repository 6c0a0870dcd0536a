"""Exact group and Lie-algebra arithmetic for SE(3).

Conventions used throughout the library:

  * A rigid motion is g = (x, R) acting by y -> x + R y, with product
    g1 g2 = (x1 + R1 x2, R1 R2) and identity e = (0, I).
  * Algebra coordinates c = (c1..c6) refer to the basis (A1..A6) whose first
    three elements generate translations along ex, ey, ez and whose last
    three generate rotations about ex, ey, ez.  The rotation angle of an
    algebra element is q = sqrt(c4^2 + c5^2 + c6^2).
  * Euler angles follow the ZYZ factorization R = Rz(gamma) Ry(beta)
    Rz(alpha) with beta in [0, pi].  All angles are radians.

Logarithms are defined for rotation angles q < pi; inputs at the cut locus
q = pi raise :class:`~se3geo.errors.AngleAtCutLocus`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import tau

import numpy as np

from . import _kernels
from .errors import AngleAtCutLocus
from .tolerances import TOLERANCES


# Algebra coordinates are bare float64 arrays of shape (6,); the alias only
# names the convention in signatures.
AlgebraVector = np.ndarray


def rot_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def skew(w: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(w) @ v == np.cross(w, v)."""
    w = np.asarray(w, dtype=float)
    return np.array([
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ])


def check_rotation(R: np.ndarray) -> np.ndarray:
    """Validate orthonormality and unit determinant; re-project small drift.

    Drift above the re-orthonormalization threshold but below gross error is
    fixed by polar projection (nearest rotation in Frobenius norm); genuinely
    invalid input raises ValueError.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got {R.shape}")
    drift = np.abs(R.T @ R - np.eye(3)).max()
    if drift > TOLERANCES.reorthonormalize:
        if drift > 1e-6:
            raise ValueError(f"matrix is not a rotation (orthonormality drift {drift:.2e})")
        U, _, Vt = np.linalg.svd(R)
        R = U @ Vt
    if np.linalg.det(R) < 0.0:
        raise ValueError("matrix has determinant -1 (reflection, not rotation)")
    return R


@dataclass(frozen=True)
class RigidMotion:
    """Element g = (x, R) of SE(3)."""

    x: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(3))
        object.__setattr__(self, "R", check_rotation(self.R))

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls(np.zeros(3), np.eye(3))

    def as_matrix(self) -> np.ndarray:
        """4x4 homogeneous representation."""
        M = np.eye(4)
        M[:3, :3] = self.R
        M[:3, 3] = self.x
        return M

    @classmethod
    def from_matrix(cls, M: np.ndarray) -> "RigidMotion":
        M = np.asarray(M, dtype=float)
        if M.shape != (4, 4) or np.abs(M[3] - [0, 0, 0, 1]).max() > 1e-9:
            raise ValueError("expected a homogeneous 4x4 rigid-motion matrix")
        return cls(M[:3, 3], M[:3, :3])

    def to_flat(self) -> list[float]:
        """Flat serialization [x, y, z, R11..R33 row-major]."""
        return [*self.x.tolist(), *self.R.reshape(9).tolist()]

    @classmethod
    def from_flat(cls, values) -> "RigidMotion":
        values = np.asarray(values, dtype=float).reshape(12)
        return cls(values[:3], values[3:].reshape(3, 3))

    def __matmul__(self, other: "RigidMotion") -> "RigidMotion":
        return compose(self, other)


def compose(g1: RigidMotion, g2: RigidMotion) -> RigidMotion:
    """Group product (x1 + R1 x2, R1 R2)."""
    return RigidMotion(g1.x + g1.R @ g2.x, g1.R @ g2.R)


def inverse(g: RigidMotion) -> RigidMotion:
    """Group inverse (-R^T x, R^T)."""
    Rt = g.R.T
    return RigidMotion(-(Rt @ g.x), Rt)


@dataclass(frozen=True)
class EulerZYZ:
    """ZYZ Euler angles; ``degenerate`` marks beta in {0, pi} where only the
    combination alpha+gamma (resp. alpha-gamma) is determined and the
    convention gamma = 0 is used."""

    gamma: float
    beta: float
    alpha: float
    degenerate: bool = False


def euler_zyz(R: np.ndarray) -> EulerZYZ:
    """Extract ZYZ angles: beta = arccos(R33), gamma = atan2(R23, R13),
    alpha = atan2(R32, -R31); gamma, alpha wrapped to [0, 2 pi)."""
    R = check_rotation(R)
    beta = float(np.arccos(np.clip(R[2, 2], -1.0, 1.0)))
    sin_beta = float(np.hypot(R[0, 2], R[1, 2]))
    if sin_beta < TOLERANCES.degenerate_fiber:
        # gamma = 0 convention: R = Rz(alpha) for beta = 0, Ry(pi) Rz(alpha)
        # for beta = pi.
        if R[2, 2] > 0.0:
            alpha = float(np.arctan2(R[1, 0], R[0, 0]))
            beta = 0.0
        else:
            alpha = float(np.arctan2(R[1, 0], R[1, 1]))
            beta = float(np.pi)
        return EulerZYZ(0.0, beta, alpha % tau, degenerate=True)
    gamma = float(np.arctan2(R[1, 2], R[0, 2]))
    alpha = float(np.arctan2(R[2, 1], -R[2, 0]))
    return EulerZYZ(gamma % tau, beta, alpha % tau)


def rotation_from_euler(angles: EulerZYZ) -> np.ndarray:
    """Rz(gamma) Ry(beta) Rz(alpha)."""
    return rot_z(angles.gamma) @ rot_y(angles.beta) @ rot_z(angles.alpha)


def rotation_angle(R: np.ndarray) -> float:
    """Rotation angle in [0, pi]."""
    return float(_kernels.rotation_angle(np.asarray(R, dtype=float)))


def exp_so3(w: np.ndarray) -> np.ndarray:
    """Rodrigues formula exp: so(3) -> SO(3)."""
    return _kernels.so3_exp(np.asarray(w, dtype=float).reshape(3))


def log_so3(R: np.ndarray) -> np.ndarray:
    """Inverse of exp_so3 on angles < pi.

    Raises AngleAtCutLocus when the angle equals pi within the margin.
    """
    R = check_rotation(R)
    w, ok = _kernels.so3_log(R)
    if not ok:
        raise AngleAtCutLocus(f"rotation angle {rotation_angle(R):.12f} is at the cut locus")
    return w


def exp_se3(c: np.ndarray) -> RigidMotion:
    """Group exponential of algebra coordinates (c1..c6)."""
    x, R = _kernels.se3_exp(np.asarray(c, dtype=float).reshape(6))
    return RigidMotion(x, R)


def log_se3(g: RigidMotion) -> np.ndarray:
    """Group logarithm as algebra coordinates; requires q < pi."""
    c, ok = _kernels.se3_log(g.x, g.R)
    if not ok:
        raise AngleAtCutLocus(f"rotation angle {rotation_angle(g.R):.12f} is at the cut locus")
    return c


def rotation_angle_of(c: np.ndarray) -> float:
    """q = sqrt(c4^2 + c5^2 + c6^2) of algebra coordinates."""
    c = np.asarray(c, dtype=float).reshape(6)
    return float(np.linalg.norm(c[3:]))


def f_coefficient(q: float) -> float:
    """f(q) = (1 - (q/2) cot(q/2)) / q^2 for 0 <= q < 2 pi.

    This is the quadratic coefficient of the logarithm's translation part;
    it is nonnegative, strictly increasing on [0, pi), and satisfies
    1 - q^2 f(q) >= 0 there.
    """
    if not 0.0 <= q < tau:
        raise ValueError(f"f_coefficient needs 0 <= q < 2 pi, got {q}")
    return float(_kernels.f_coefficient(q))


def hat(c: np.ndarray) -> np.ndarray:
    """Algebra coordinates to the 4x4 homogeneous representation."""
    c = np.asarray(c, dtype=float).reshape(6)
    M = np.zeros((4, 4))
    M[:3, :3] = skew(c[3:])
    M[:3, 3] = c[:3]
    return M


def unhat(M: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hat`."""
    M = np.asarray(M, dtype=float)
    return np.array([M[0, 3], M[1, 3], M[2, 3], M[2, 1], M[0, 2], M[1, 0]])


def basis_matrices() -> list[np.ndarray]:
    """The six generators (A1..A6) in the 4x4 homogeneous representation."""
    out = []
    for i in range(6):
        c = np.zeros(6)
        c[i] = 1.0
        out.append(hat(c))
    return out


@lru_cache(maxsize=1)
def structure_constants() -> np.ndarray:
    """Structure-constant table C with [A_i, A_j] = sum_k C[k, i, j] A_k.

    Computed once from commutators of the homogeneous-matrix generators
    (never hard-coded) and cached; the returned array is read-only.
    """
    B = basis_matrices()
    C = np.zeros((6, 6, 6))
    for i in range(6):
        for j in range(6):
            C[:, i, j] = unhat(B[i] @ B[j] - B[j] @ B[i])
    C.flags.writeable = False
    return C


@lru_cache(maxsize=1)
def structure_constant_triples() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Nonzero entries of the structure tensor as (k, i, j, value) arrays,
    the sparse form consumed by the compiled kernels."""
    C = structure_constants()
    ks, is_, js = np.nonzero(C)
    vals = C[ks, is_, js].copy()
    for arr in (ks, is_, js, vals):
        arr.flags.writeable = False
    return ks, is_, js, vals


def ad(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Lie bracket ad_v(w) = [v, w] in algebra coordinates."""
    C = structure_constants()
    v = np.asarray(v, dtype=float).reshape(6)
    w = np.asarray(w, dtype=float).reshape(6)
    return np.einsum("kij,i,j->k", C, v, w)


def coad(v: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Coadjoint action, the dual of ad: <coad_v mu, w> = <mu, ad_v w>."""
    C = structure_constants()
    v = np.asarray(v, dtype=float).reshape(6)
    mu = np.asarray(mu, dtype=float).reshape(6)
    return np.einsum("kij,i,k->j", C, v, mu)


def adjoint_action(h: RigidMotion, v: np.ndarray) -> np.ndarray:
    """Ad(h) v, computed by conjugating the homogeneous representation."""
    H = h.as_matrix()
    Hinv = inverse(h).as_matrix()
    return unhat(H @ hat(v) @ Hinv)


def adjoint_matrix(h: RigidMotion) -> np.ndarray:
    """The 6x6 matrix of Ad(h) in the (A1..A6) basis."""
    cols = [adjoint_action(h, col) for col in np.eye(6)]
    return np.column_stack(cols)


def warmup_kernels() -> None:
    """Compile the numerical kernels eagerly (results are disk-cached)."""
    _kernels.warmup(*structure_constant_triples())
