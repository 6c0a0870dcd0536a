"""Seeded random samplers shared by the verification suites and the tests."""
from __future__ import annotations

import numpy as np

from .metrics import MetricParams
from .se3 import RigidMotion, exp_se3, exp_so3
from .sections import EZ, CosetPoint


def random_rotation(rng: np.random.Generator, max_angle: float = np.pi - 0.1) -> np.ndarray:
    w = rng.standard_normal(3)
    w *= rng.uniform(0.0, max_angle) / np.linalg.norm(w)
    return exp_so3(w)


def random_algebra_vector(rng: np.random.Generator, max_angle: float = np.pi - 0.1,
                          translation_scale: float = 1.0) -> np.ndarray:
    c = np.empty(6)
    c[:3] = translation_scale * rng.standard_normal(3)
    w = rng.standard_normal(3)
    w *= rng.uniform(0.0, max_angle) / np.linalg.norm(w)
    c[3:] = w
    return c


def random_rigid_motion(rng: np.random.Generator, max_angle: float = np.pi - 0.1,
                        translation_scale: float = 1.0) -> RigidMotion:
    return exp_se3(random_algebra_vector(rng, max_angle, translation_scale))


def random_unit_vector(rng: np.random.Generator, polar_margin: float = 0.1) -> np.ndarray:
    """Unit vector with polar angle in [margin, pi - margin] (generic fiber)."""
    beta = rng.uniform(polar_margin, np.pi - polar_margin)
    gamma = rng.uniform(0.0, 2.0 * np.pi)
    return np.array([np.sin(beta) * np.cos(gamma), np.sin(beta) * np.sin(gamma), np.cos(beta)])


def random_coset(rng: np.random.Generator, translation_scale: float = 1.0,
                 polar_margin: float = 0.1) -> CosetPoint:
    return CosetPoint(translation_scale * rng.standard_normal(3),
                      random_unit_vector(rng, polar_margin))


def random_coplanar_coset(rng: np.random.Generator, translation_scale: float = 1.0,
                          polar_margin: float = 0.1) -> CosetPoint:
    """Coset with position in the span of the orientation and the reference
    axis, the symmetry hypothesis of the fiber profile."""
    n = random_unit_vector(rng, polar_margin)
    a, b = translation_scale * rng.standard_normal(2)
    return CosetPoint(a * n + b * EZ, n)


def random_metric(rng: np.random.Generator, mode: str = "R",
                  low: float = 0.3, high: float = 3.0) -> MetricParams:
    g11, g33, g44, g66 = rng.uniform(low, high, 4)
    if mode == "SR":
        return MetricParams(np.inf, g33, g44, g66, mode="SR")
    if mode == "GI":
        return MetricParams(g11, g33, g44, 0.0, mode="GI")
    return MetricParams(g11, g33, g44, g66, mode="R")
