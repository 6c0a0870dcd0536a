"""Left-invariant metrics on SE(3): the diagonal family, norms, legality.

The diagonal family assigns weights diag(g11, g11, g33, g44, g44, g66) to
the left-invariant coframe.  Three modes are supported:

  * ``"R"``  - Riemannian: all four weights finite and positive;
  * ``"SR"`` - sub-Riemannian: g11 infinite, motion restricted to the
    horizontal distribution span{A3, A4, A5};
  * ``"GI"`` - gauge-invariant: g66 = 0, the fiber direction is free.

A general inner product is *legal* when it is invariant under Ad of the
stabilizer subgroup H = {(0, Rz(alpha))}; only legal metrics descend to the
quotient of positions and orientations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHorizontal, NotLegal
from .se3 import RigidMotion, ad, adjoint_matrix, log_se3, rot_z
from .tolerances import TOLERANCES

MODES = ("R", "SR", "GI")


@dataclass(frozen=True)
class MetricParams:
    """Weights of the diagonal left-invariant metric, plus the mode flag.

    g11 is stored as math.inf in SR mode; no large-float stand-in is ever
    used.  Costs are per unit left-invariant velocity squared.
    """

    g11: float
    g33: float
    g44: float
    g66: float
    mode: str = "R"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        finite_positive = {"g33": self.g33, "g44": self.g44}
        if self.mode == "R":
            finite_positive["g11"] = self.g11
            finite_positive["g66"] = self.g66
        elif self.mode == "SR":
            if not math.isinf(self.g11):
                raise ValueError("SR mode requires g11 = inf")
            finite_positive["g66"] = self.g66
        else:  # GI
            finite_positive["g11"] = self.g11
            if self.g66 != 0.0:
                raise ValueError("GI mode requires g66 = 0")
        for name, value in finite_positive.items():
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {value}")

    @property
    def weights(self) -> np.ndarray:
        """Six diagonal weights (g11, g11, g33, g44, g44, g66)."""
        return np.array([self.g11, self.g11, self.g33, self.g44, self.g44, self.g66])

    @property
    def inv_weights(self) -> np.ndarray:
        """Inverse-metric diagonal used by the geodesic flow.

        Directions excluded from the Hamiltonian carry weight zero: 1 and 2
        in SR mode (infinite cost), 6 in SR and GI mode (the fiber momentum
        feeds no velocity there).
        """
        w = np.zeros(6)
        if self.mode != "SR":
            w[0] = w[1] = 1.0 / self.g11
        w[2] = 1.0 / self.g33
        w[3] = w[4] = 1.0 / self.g44
        if self.mode == "R":
            w[5] = 1.0 / self.g66
        return w

    def matrix(self) -> np.ndarray:
        """Dense 6x6 metric matrix (finite modes only)."""
        if self.mode == "SR":
            raise ValueError("SR metric has no finite matrix representation")
        return np.diag(self.weights)


def algebra_norm(c: np.ndarray, m: MetricParams) -> float:
    """Metric norm of algebra coordinates.

    In SR mode the input must lie in the horizontal distribution
    (c1 = c2 = c6 = 0 up to tolerance) or NotHorizontal is raised.  In GI
    mode the c6 component simply contributes zero.
    """
    c = np.asarray(c, dtype=float).reshape(6)
    if m.mode == "SR":
        tol = TOLERANCES.horizontal * max(1.0, float(np.abs(c).max()))
        off = max(abs(c[0]), abs(c[1]), abs(c[5]))
        if off > tol:
            raise NotHorizontal(f"SR norm needs c1 = c2 = c6 = 0; worst component {off:.2e}")
        return float(np.sqrt(m.g33 * c[2] ** 2 + m.g44 * (c[3] ** 2 + c[4] ** 2)))
    return float(np.sqrt(np.sum(m.weights * c * c)))


def log_norm(g: RigidMotion, m: MetricParams) -> float:
    """Logarithmic norm ||log g||, the cheap stand-in for geodesic distance."""
    return algebra_norm(log_se3(g), m)


def stabilizer_element(alpha: float) -> RigidMotion:
    """h_alpha = (0, Rz(alpha)), an element of the stabilizer subgroup H."""
    return RigidMotion(np.zeros(3), rot_z(alpha))


def _alpha_samples(samples: int, seed: int = 0) -> np.ndarray:
    # Ad(h_alpha) entries are trig polynomials of degree <= 2 in alpha, so a
    # 64-point uniform grid over-determines invariance; random extras guard
    # against grid-aligned coincidences.
    rng = np.random.default_rng(seed)
    grid = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    return np.concatenate([grid, rng.uniform(0.0, 2.0 * np.pi, samples)])


def legality_check(M: np.ndarray, samples: int = 16, seed: int = 0) -> tuple[bool, float]:
    """Ad(H)-invariance test for a symmetric PSD inner product.

    Returns (legal, worst violation of ||Ad(h)^T M Ad(h) - M||_inf over the
    sampled stabilizer elements).
    """
    if samples < 8:
        raise ValueError("need at least 8 random samples")
    M = np.asarray(M, dtype=float)
    if M.shape != (6, 6) or np.abs(M - M.T).max() > 1e-12:
        raise ValueError("inner product must be a symmetric 6x6 matrix")
    if np.linalg.eigvalsh(M).min() < -1e-12:
        raise ValueError("inner product must be positive semidefinite")
    worst = 0.0
    for alpha in _alpha_samples(samples, seed):
        A = adjoint_matrix(stabilizer_element(alpha))
        worst = max(worst, float(np.abs(A.T @ M @ A - M).max()))
    return worst <= TOLERANCES.ad_invariance, worst


def reductive_check(M: np.ndarray, samples: int = 16, seed: int = 0) -> tuple[bool, float, np.ndarray]:
    """Verify the reductive split g = h (+) m for a legal inner product.

    h = span{A6}; m is its M-orthogonal complement.  Checks Ad(h_alpha) m
    within m and [h, m] within m.  Returns (ok, worst violation, an
    orthonormal basis of m as columns).  Raises NotLegal if the legality
    check fails first.
    """
    legal, violation = legality_check(M, samples, seed)
    if not legal:
        raise NotLegal(f"inner product is not Ad(H)-invariant (violation {violation:.2e})")
    M = np.asarray(M, dtype=float)
    normal = M @ np.eye(6)[5]
    if np.linalg.norm(normal) < 1e-12:
        # Degenerate fiber cost (GI): the M-orthogonal complement is not
        # defined, fall back to the coordinate complement span{A1..A5}.
        normal = np.eye(6)[5]
    normal = normal / np.linalg.norm(normal)
    # Orthonormal basis of the complement {v : normal . v = 0}.
    _, _, Vt = np.linalg.svd(normal.reshape(1, 6))
    m_basis = Vt[1:].T
    proj = m_basis @ m_basis.T
    worst = 0.0
    for alpha in _alpha_samples(samples, seed):
        A = adjoint_matrix(stabilizer_element(alpha))
        mapped = A @ m_basis
        worst = max(worst, float(np.abs(mapped - proj @ mapped).max()))
    a6 = np.eye(6)[5]
    for col in m_basis.T:
        bracket = ad(a6, col)
        worst = max(worst, float(np.abs(bracket - proj @ bracket).max()))
    return worst <= TOLERANCES.ad_invariance, worst, m_basis


@dataclass(frozen=True)
class SubbundleProjections:
    """Projections in the left-invariant frame (base-point independent)."""

    P_H: np.ndarray
    P_V: np.ndarray
    P_Delta: np.ndarray


def projections(m: MetricParams) -> SubbundleProjections:
    """Vertical, horizontal, and distribution projections.

    For the diagonal family the metric-orthogonal complement of the fiber
    direction A6 is the coordinate complement, so P_V zeroes all but
    coordinate 6, P_H = I - P_V, and P_Delta keeps coordinates 3, 4, 5.
    """
    del m  # validation only; the diagonal family shares one frame split
    P_V = np.zeros((6, 6))
    P_V[5, 5] = 1.0
    P_H = np.eye(6) - P_V
    P_Delta = np.diag([0.0, 0.0, 1.0, 1.0, 1.0, 0.0])
    return SubbundleProjections(P_H, P_V, P_Delta)
