"""The quotient of positions and orientations, and its fiber sections.

A coset [g] of the stabilizer subgroup H = {(0, Rz(alpha))} is the pair
(x, n) of a position and a unit orientation n = R ez.  The fiber over
(x, n) is the circle of group elements sharing that pair, parametrized by
a rotation angle about ez.

Three one-representative-per-fiber choices are implemented:

  * the canonical section: the closed-form zero-fiber-twist representative
    (third Euler angle opposite the first, equivalently c6(log) = 0);
  * the minimal-log-norm section: the fiber element of smallest
    logarithmic norm, found by global scan plus golden refinement;
  * the minimal-distance section: the fiber element of smallest exact
    geodesic distance to the identity, found by a warm-started shooting
    scan over the fiber.

The gap between the first two is the log-norm error functional reported by
:func:`lognorm_error` and :func:`fiber_sweep`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import AllAtCutLocus, AngleAtCutLocus, DegenerateFiber, NoConvergence, NotHorizontal
from .flow import ShootingConfig, ShootingResult, shoot_distance
from .metrics import MetricParams, log_norm
from .scan import golden_min, grid_local_minima, periodic_argmin
from .se3 import RigidMotion, log_se3, rot_y, rot_z
from .tolerances import TOLERANCES

EZ = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class CosetPoint:
    """Point of the quotient: position x plus unit orientation n."""

    x: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(3)
        n = np.asarray(self.n, dtype=float).reshape(3)
        norm = float(np.linalg.norm(n))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"orientation must be a unit vector, |n| = {norm}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "n", n / norm)

    @property
    def degenerate_fiber(self) -> bool:
        """True when n is (anti)parallel to ez within tolerance: the Euler
        angle of the fiber base is then undefined (gamma = 0 is used)."""
        return float(np.hypot(self.n[0], self.n[1])) < TOLERANCES.degenerate_fiber

    def to_flat(self) -> list[float]:
        return [*self.x.tolist(), *self.n.tolist()]

    @classmethod
    def from_flat(cls, values) -> "CosetPoint":
        values = np.asarray(values, dtype=float).reshape(6)
        return cls(values[:3], values[3:])


def project(g: RigidMotion) -> CosetPoint:
    """Canonical projection g = (x, R) -> (x, R ez); constant on fibers."""
    return CosetPoint(g.x, g.R @ EZ)


def spherical_angles(n: np.ndarray) -> tuple[float, float]:
    """(gamma, beta) with n = (sin b cos g, sin b sin g, cos b); gamma = 0
    at the poles."""
    beta = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
    if np.hypot(n[0], n[1]) < TOLERANCES.degenerate_fiber:
        return 0.0, beta
    return float(np.arctan2(n[1], n[0])), beta


def _sigma_rotation(p: CosetPoint) -> np.ndarray:
    gamma, beta = spherical_angles(p.n)
    return rot_z(gamma) @ rot_y(beta) @ rot_z(-gamma)


def section_canonical(p: CosetPoint) -> RigidMotion:
    """The zero-fiber-twist representative (x, Rz(g) Ry(b) Rz(-g)).

    It is the unique fiber element whose logarithm has vanishing c6 (for
    rotation angles below pi), keeps the translation of the coset exactly,
    and is smooth away from n = -ez, where DegenerateFiber is raised.
    """
    if p.degenerate_fiber and p.n[2] < 0.0:
        raise DegenerateFiber("canonical section is undefined at n = -ez")
    return RigidMotion(p.x, _sigma_rotation(p))


def fiber_element(p: CosetPoint, alpha: float) -> RigidMotion:
    """Fiber parametrization: canonical representative times (0, Rz(alpha)).

    Bijective in alpha for n != +-ez; at the poles the gamma = 0 convention
    applies and ``p.degenerate_fiber`` flags the chart degeneracy.
    """
    return RigidMotion(p.x, _sigma_rotation(p) @ rot_z(alpha))


def coplanarity(p: CosetPoint) -> float:
    """det(x | n | ez); zero means position, orientation, and the reference
    axis are co-planar (the symmetry hypothesis of the fiber profile)."""
    return float(np.linalg.det(np.column_stack([p.x, p.n, EZ])))


def _lognorm_profile(p: CosetPoint, m: MetricParams) -> Callable[[float], float]:
    def profile(alpha: float) -> float:
        try:
            return log_norm(fiber_element(p, alpha), m)
        except (AngleAtCutLocus, NotHorizontal):
            return np.nan
    return profile


@dataclass(frozen=True)
class MinLognormSection:
    element: RigidMotion
    alpha: float
    rho: float
    ties: tuple[float, ...] = ()


def section_min_lognorm(p: CosetPoint, m: MetricParams, n_grid: int = 256,
                        xtol: float = 1e-10) -> MinLognormSection:
    """Fiber element of minimal logarithmic norm.

    Scans a uniform n_grid over the fiber circle (fiber angles at the
    rotational cut locus are excluded) and refines the best cell by
    golden section to |dalpha| <= xtol.  Ties within 1e-9 are reported.
    """
    profile = _lognorm_profile(p, m)
    try:
        alpha, rho, grid, values = periodic_argmin(profile, n_grid, xtol)
    except ValueError:
        raise AllAtCutLocus("no admissible fiber sample (cut locus or non-horizontal)") from None
    ties = _refined_ties(profile, grid, values, alpha, rho, xtol, 1e-9)
    return MinLognormSection(fiber_element(p, alpha), alpha, rho, ties)


def lognorm_error(p: CosetPoint, m: MetricParams, n_grid: int = 256) -> float:
    """Log-norm gap between the canonical section and the fiber minimum.

    Nonnegative up to refinement error; zero exactly when the canonical
    representative already minimizes the log norm over its fiber.
    """
    rho_sigma = log_norm(section_canonical(p), m)
    return rho_sigma - section_min_lognorm(p, m, n_grid=n_grid).rho


def _refined_ties(profile, grid, values, alpha_best, f_best, xtol, tie_tol
                  ) -> tuple[float, ...]:
    """Refine secondary grid local minima; keep those tied with the best."""
    step = 2.0 * np.pi / len(grid)
    ties = [alpha_best]
    for i in grid_local_minima(values):
        if np.isnan(values[i]) or values[i] > f_best + max(10 * tie_tol, 1e-3):
            continue
        if _circ_dist(grid[i], alpha_best) <= 2 * step:
            continue
        x_ref, f_ref = golden_min(profile, grid[i] - step, grid[i] + step, xtol)
        if f_ref <= f_best + tie_tol:
            x_ref = -np.pi + (x_ref + np.pi) % (2.0 * np.pi)
            if all(_circ_dist(x_ref, t) > 2 * step for t in ties):
                ties.append(float(x_ref))
    return tuple(ties)


def _circ_dist(a: float, b: float) -> float:
    d = abs(a - b) % (2.0 * np.pi)
    return min(d, 2.0 * np.pi - d)


@dataclass(frozen=True)
class MinDistanceSection:
    element: RigidMotion
    alpha: float
    dist: float
    shooting: ShootingResult
    ties: tuple[float, ...] = ()


class _FiberShooter:
    """Warm-started shooting along the fiber: each solve seeds the next.

    Scan solves run at relaxed tolerance and a coarsened step count (they
    only localize the argmin); the stationarity polish and the final solve
    run at full quality.  Random multi-start is the fallback whenever the
    warm chain fails, and the grid argmin is re-checked against the
    exponential-curve seed to catch a chain stuck on a non-minimal branch.
    """

    def __init__(self, p: CosetPoint, m: MetricParams, cfg: ShootingConfig):
        self.p = p
        self.m = m
        # Fiber elements can sit beyond a caller's reach budget even when
        # the coset itself is nearby; the scan manages its own reach.
        self.cfg = replace(cfg, max_rho=np.inf)
        scan_steps = cfg.steps if cfg.steps <= 250 else max(250, cfg.steps // 4)
        # Scan solves only rank fiber angles; grid values separate at ~1e-2.
        self.scan_cfg = replace(self.cfg, tol=max(cfg.tol, 1e-5), steps=scan_steps)
        # Stationarity solves want momentum resolution near the coarse
        # integration noise floor, still far cheaper than full quality.
        self.lam6_cfg = replace(self.cfg, tol=max(cfg.tol, 2e-8), steps=scan_steps)
        self.fallback_cfg = replace(self.scan_cfg, restarts=min(cfg.restarts, 4))
        self.history: list[tuple[float, np.ndarray]] = []

    @property
    def warm_lam(self) -> Optional[np.ndarray]:
        return self.history[-1][1] if self.history else None

    @warm_lam.setter
    def warm_lam(self, value) -> None:
        self.history.clear()
        if value is not None:
            self.history.append((np.nan, value))

    def _seed(self, alpha: float) -> Optional[np.ndarray]:
        """Warm seed with linear momentum prediction from the last two
        solves, cutting the seed error from O(dalpha) to O(dalpha^2)."""
        if not self.history:
            return None
        a1, lam1 = self.history[-1]
        if len(self.history) < 2 or np.isnan(a1):
            return lam1
        a0, lam0 = self.history[-2]
        if not 1e-12 < abs(a1 - a0) < 0.7 or abs(alpha - a1) > 0.7:
            return lam1
        return lam1 + (lam1 - lam0) * ((alpha - a1) / (a1 - a0))

    def _shoot(self, alpha: float, cfg: ShootingConfig, seed) -> Optional[ShootingResult]:
        try:
            return shoot_distance(fiber_element(self.p, alpha), self.m, cfg,
                                  lam_seed=seed, explore=False, with_trajectory=False)
        except (NoConvergence, AngleAtCutLocus, ValueError):
            return None

    def solve(self, alpha: float, cfg: Optional[ShootingConfig] = None
              ) -> Optional[ShootingResult]:
        cfg = cfg or self.scan_cfg
        seed = self._seed(alpha)
        res = self._shoot(alpha, cfg, seed)
        if res is None and seed is not None:
            res = self._shoot(alpha, cfg, None)
        if res is None:
            try:
                res = shoot_distance(fiber_element(self.p, alpha), self.m,
                                     self.fallback_cfg, explore=True, with_trajectory=False)
            except (NoConvergence, AngleAtCutLocus, ValueError):
                return None
        self.history.append((alpha, res.lam0))
        if len(self.history) > 2:
            del self.history[0]
        return res

    def distance(self, alpha: float) -> float:
        res = self.solve(alpha)
        return np.nan if res is None else res.distance

    def probe(self, alpha: float) -> float:
        """Grid-scan solve: the warm chain plus an independent exponential-
        curve start, so one bad basin cannot capture the whole scan."""
        warm = self.solve(alpha)
        fresh = self._shoot(alpha, self.scan_cfg, None)
        if fresh is not None and (warm is None or fresh.distance < warm.distance - 1e-9):
            self.warm_lam = fresh.lam0
            return fresh.distance
        return np.nan if warm is None else warm.distance

    def lam6(self, alpha: float, full_quality: bool = False) -> float:
        # Fiber derivative of the distance is proportional to the conserved
        # fiber momentum of the connecting geodesic; its zero marks the
        # stationary fiber angle.  Warm coarse solves put the momentum noise
        # floor near 1e-8, ample for locating the zero; the full-quality
        # variant is the fallback when the final check wants more.
        cfg = replace(self.cfg, tol=0.1 * self.cfg.tol) if full_quality else self.lam6_cfg
        res = self.solve(alpha, cfg=cfg)
        return np.nan if res is None else float(res.lam0[5])


def section_min_distance(p: CosetPoint, m: MetricParams,
                         cfg: ShootingConfig = ShootingConfig(), n_grid: int = 32,
                         xtol: float = 1e-6) -> MinDistanceSection:
    """Fiber element of minimal geodesic distance to the identity.

    Grid scan over the fiber (warm-started shooting), golden refinement to
    |dalpha| <= xtol, then a stationarity polish that brackets the zero of
    the winner's fiber momentum inside the refined cell (the fiber
    derivative of the distance, so this sharpens the same minimum).  The
    winning geodesic is returned with its trajectory; tied minimizers
    within 1e-6 are reported.
    """
    shooter = _FiberShooter(p, m, cfg)
    grid = -np.pi + 2.0 * np.pi * np.arange(n_grid) / n_grid
    values = np.array([shooter.probe(a) for a in grid])
    if np.all(np.isnan(values)):
        raise NoConvergence("no fiber angle admitted a converged geodesic")
    j = int(np.nanargmin(values))
    if shooter.distance(grid[j]) > values[j] + 1e-4:
        # Re-anchor the warm chain on the winning basin before refining.
        shooter.warm_lam = None
        shooter.probe(grid[j])
    step = 2.0 * np.pi / n_grid
    alpha, _ = golden_min(shooter.distance, grid[j] - step, grid[j] + step, xtol)
    alpha = _polish_stationary(shooter.lam6, alpha, half_width=step)

    def finalize(a):
        a = -np.pi + (a + np.pi) % (2.0 * np.pi)
        res = shoot_distance(fiber_element(p, a), m, shooter.cfg,
                             lam_seed=shooter.warm_lam, explore=False, with_trajectory=True)
        return a, res

    alpha, final = finalize(alpha)
    if abs(final.lam0[5]) > 1e-7 * max(1.0, float(np.linalg.norm(final.lam0))):
        # The scan-quality momentum was too noisy to pin the stationary
        # angle; repeat the refinement on full-quality solves.
        refined = _polish_stationary(lambda a: shooter.lam6(a, full_quality=True),
                                     alpha, half_width=step)
        alpha, final = finalize(refined)

    def distance_hq(a):
        res = shooter.solve(a, cfg=shooter.lam6_cfg)
        return np.nan if res is None else res.distance

    ties = _refined_ties(distance_hq, grid, values, alpha, final.distance, xtol, 1e-6)
    return MinDistanceSection(fiber_element(p, alpha), float(alpha), final.distance,
                              final, ties)


def _polish_stationary(lam6_fn, alpha: float, half_width: float) -> float:
    """Safeguarded false-position refinement of the zero of lam6(alpha).

    The bracket starts tight and expands geometrically up to the grid cell
    until the fiber momentum changes sign across it.
    """
    h = min(half_width, 1e-3)
    a = b = alpha
    sa = sb = np.nan
    while True:
        a, b = alpha - h, alpha + h
        sa, sb = lam6_fn(a), lam6_fn(b)
        if np.isnan(sa) or np.isnan(sb):
            return alpha
        if np.sign(sa) != np.sign(sb):
            break
        if h >= half_width:
            return alpha
        h = min(4.0 * h, half_width)
    x = alpha
    for _ in range(10):
        x = (a * sb - b * sa) / (sb - sa)
        if not a < x < b:
            x = 0.5 * (a + b)
        sx = lam6_fn(x)
        if np.isnan(sx):
            return alpha
        if abs(sx) <= 1e-10 or b - a < 1e-12:
            return float(x)
        if np.sign(sx) == np.sign(sa):
            a, sa = x, sx
        else:
            b, sb = x, sx
    return float(x)


@dataclass(frozen=True)
class FiberSweep:
    """Tabulated fiber profiles of the log norm and (optionally) distance."""

    base: CosetPoint
    alphas: np.ndarray
    rho: np.ndarray
    dist: Optional[np.ndarray]
    argmin_rho: float
    argmin_dist: Optional[float]
    min_rho: float
    min_dist: Optional[float]
    curvature_at_zero: float


def fiber_sweep(p: CosetPoint, m: MetricParams, nsamples: int = 256,
                with_dist: bool = False, cfg: ShootingConfig = ShootingConfig()
                ) -> FiberSweep:
    """Uniform sweep of the fiber profiles over [-pi, pi).

    Per-sample failures (cut locus, non-convergence) are recorded as NaN.
    Also estimates the second derivative of the log-norm profile at the
    canonical point by central differences with the grid step, whose sign
    tells a fiber minimum from a maximum there.
    """
    if nsamples < 16:
        raise ValueError("need at least 16 samples")
    profile = _lognorm_profile(p, m)
    try:
        argmin_rho, min_rho, alphas, rho = periodic_argmin(profile, nsamples, 1e-10)
    except ValueError:
        raise AllAtCutLocus("no admissible fiber sample (cut locus or non-horizontal)") from None
    h = 2.0 * np.pi / nsamples
    e0, ep, em = profile(0.0), profile(h), profile(-h)
    curvature = (ep - 2.0 * e0 + em) / (h * h)

    dist = None
    argmin_dist = None
    min_dist = None
    if with_dist:
        shooter = _FiberShooter(p, m, cfg)
        dist = np.array([shooter.distance(a) for a in alphas])
        if not np.all(np.isnan(dist)):
            j = int(np.nanargmin(dist))
            argmin_dist, min_dist, _, _ = _refine_cell(shooter.distance, alphas[j], h, 1e-6)
    return FiberSweep(p, alphas, rho, dist, float(argmin_rho), argmin_dist,
                      float(min_rho), min_dist, float(curvature))


def _refine_cell(f, center, step, xtol):
    x, fx = golden_min(f, center - step, center + step, xtol)
    if np.isnan(fx) or f(center) < fx:
        x, fx = center, f(center)
    x = -np.pi + (x + np.pi) % (2.0 * np.pi)
    return float(x), float(fx), None, None


def min_angular_velocity_check(p: CosetPoint, m: MetricParams, n_grid: int = 256,
                               xtol: float = 1e-8) -> tuple[bool, float]:
    """Check that the canonical section minimizes the rotational log norm.

    Sweeps ||rotation part of log||_G over the fiber and verifies the
    refined argmin sits at fiber angle zero within resolution.
    """
    w_rot = m.weights[3:]

    def profile(alpha: float) -> float:
        try:
            c = log_se3(fiber_element(p, alpha))
        except AngleAtCutLocus:
            return np.nan
        return float(np.sqrt(np.sum(w_rot * c[3:] * c[3:])))

    try:
        alpha, _, _, _ = periodic_argmin(profile, n_grid, xtol)
    except ValueError:
        raise AllAtCutLocus("no admissible fiber sample (cut locus or non-horizontal)") from None
    return _circ_dist(alpha, 0.0) <= 1e-6, float(alpha)


@dataclass(frozen=True)
class SectionResult:
    """All three sections of one coset plus the log-norm error."""

    sigma: RigidMotion
    sigma_rho: RigidMotion
    sigma_d: Optional[RigidMotion]
    rho_at_sigma: float
    rho_at_sigma_rho: float
    dist_at_sigma_d: Optional[float]
    error_g: float
    alpha_rho: float
    alpha_dist: Optional[float]
    chain_ok: bool
    chain_violation: float
    lam0: Optional[np.ndarray] = None


def compute_sections(p: CosetPoint, m: MetricParams,
                     cfg: ShootingConfig = ShootingConfig(),
                     with_distance: bool = True) -> SectionResult:
    """Canonical, minimal-log-norm, and minimal-distance sections of p.

    The chain check asserts rho(sigma) >= rho(sigma_rho) >= dist(sigma_d)
    up to 1e-9 / 1e-6 slack.  A non-converged distance section leaves the
    distance fields unset; callers decide whether that is fatal.
    """
    sigma = section_canonical(p)
    rho_sigma = log_norm(sigma, m)
    min_log = section_min_lognorm(p, m)
    error_g = rho_sigma - min_log.rho

    sigma_d = None
    dist = None
    alpha_dist = None
    lam0 = None
    if with_distance:
        min_dist = section_min_distance(p, m, cfg)
        sigma_d = min_dist.element
        dist = min_dist.dist
        alpha_dist = min_dist.alpha
        lam0 = min_dist.shooting.lam0

    violation = max(0.0, min_log.rho - rho_sigma)
    if dist is not None:
        violation = max(violation, dist - min_log.rho)
    chain_ok = (min_log.rho <= rho_sigma + 1e-9) and (dist is None or dist <= min_log.rho + 1e-6)
    return SectionResult(sigma, min_log.element, sigma_d, rho_sigma, min_log.rho,
                         dist, error_g, min_log.alpha, alpha_dist, chain_ok,
                         violation, lam0)
