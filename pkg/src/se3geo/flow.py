"""Hamiltonian geodesic flow and boundary-value solvers.

The left-invariant geodesic flow pairs a group trajectory gamma(t) with a
momentum covector lam(t) in the dual left-invariant frame:

    gamma' = sum_i u^i A_i|gamma,   u = Ginv lam,   lam' = coad_u(lam),

with Ginv the inverse-metric diagonal of the active mode (SR and GI modes
zero out the excluded directions).  The Hamiltonian is normalized as
h = (1/2) <lam, Ginv lam>, so unit-time geodesics have length sqrt(2 h).

Integration is classical RK4 in the left trivialization with a group
exponential reconstructing the configuration each step, which keeps
gamma(t) exactly in SE(3).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .errors import NoConvergence, StepCountTooSmall
from .metrics import MetricParams, algebra_norm
from .se3 import RigidMotion, log_se3, structure_constant_triples

# Relative Hamiltonian drift above which integrate() asks for more steps.
DRIFT_LIMIT = 1e-6
# Function-evaluation budgets for one simplex start (first start / restart).
MAXFEV_PRIMARY = 4000
MAXFEV_RESTART = 1200


@dataclass(frozen=True)
class PhaseState:
    """Point of the cotangent flow: configuration plus momentum coordinates."""

    g: RigidMotion
    lam: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=float).reshape(6))


@dataclass(frozen=True)
class Trajectory:
    """Sampled geodesic: times plus configuration, momentum, velocity arrays."""

    times: np.ndarray
    xs: np.ndarray
    Rs: np.ndarray
    lams: np.ndarray
    us: np.ndarray
    hams: np.ndarray
    metric: MetricParams

    def state(self, i: int) -> PhaseState:
        return PhaseState(RigidMotion(self.xs[i], self.Rs[i]), self.lams[i])

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class ShootingConfig:
    """Budget and reproducibility knobs for the boundary-value solver."""

    tol: float = 1e-8
    restarts: int = 8
    steps: int = 1000
    max_rho: float = 3.0
    seed: int = 0


@dataclass(frozen=True)
class ShootingResult:
    distance: float
    lam0: np.ndarray
    endpoint_error: float
    converged: bool
    trajectory: Optional[Trajectory] = None
    starts_used: int = 0


def hamiltonian(lam: np.ndarray, m: MetricParams) -> float:
    """h = (1/2) sum g^{ii} lam_i^2 over the mode's active directions."""
    lam = np.asarray(lam, dtype=float).reshape(6)
    return float(0.5 * np.sum(m.inv_weights * lam * lam))


def flow_rhs(s: PhaseState, m: MetricParams) -> tuple[np.ndarray, np.ndarray]:
    """Velocity u = Ginv lam and momentum rate coad_u(lam).

    Component 6 of the momentum rate vanishes identically for every legal
    diagonal metric; the fiber momentum is a first integral.
    """
    ks, is_, js, vals = structure_constant_triples()
    u = m.inv_weights * s.lam
    lamdot = _kernels.coad_apply(ks, is_, js, vals, u, s.lam)
    return u, lamdot


def integrate(s0: PhaseState, m: MetricParams, T: float, steps: int,
              check_drift: bool = True) -> Trajectory:
    """RK4 integration of the geodesic flow from s0 over [0, T].

    Raises StepCountTooSmall when the relative Hamiltonian drift exceeds
    the 1e-6 budget, signalling the caller to refine; convergence studies
    that integrate deliberately coarsely pass ``check_drift=False``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if T <= 0.0:
        raise ValueError("T must be positive")
    trip = structure_constant_triples()
    ginv = m.inv_weights
    xs, Rs, lams, us = _kernels.integrate_full(*trip, ginv, s0.g.x, s0.g.R, s0.lam, T, steps)
    with np.errstate(over="ignore", invalid="ignore"):
        hams = 0.5 * np.sum(ginv * lams * lams, axis=1)
        drift = float(np.abs(hams - hams[0]).max())
    # The negated comparison also catches a non-finite drift (blow-up).
    if check_drift and not drift <= DRIFT_LIMIT * max(1.0, hams[0]):
        raise StepCountTooSmall(
            f"Hamiltonian drift {drift:.2e} over {steps} steps; increase the step count")
    times = np.linspace(0.0, T, steps + 1)
    return Trajectory(times, xs, Rs, lams, us, hams, m)


@dataclass(frozen=True)
class MomentumDiagnostics:
    max_lam6_drift: float
    max_ham_drift: float
    max_u6_drift: float


def momentum_diagnostics(tr: Trajectory) -> MomentumDiagnostics:
    """Worst absolute deviations of lam6, h, and u6 from their start values."""
    if len(tr) == 0:
        raise ValueError("empty trajectory")
    return MomentumDiagnostics(
        max_lam6_drift=float(np.abs(tr.lams[:, 5] - tr.lams[0, 5]).max()),
        max_ham_drift=float(np.abs(tr.hams - tr.hams[0]).max()),
        max_u6_drift=float(np.abs(tr.us[:, 5] - tr.us[0, 5]).max()),
    )


def exponential_seed(target: RigidMotion, m: MetricParams) -> np.ndarray:
    """Momentum G log(target): exact whenever the geodesic is an exp curve.

    Components with infinite or zero cost are seeded with zero.
    """
    c = log_se3(target)
    lam = np.zeros(6)
    if m.mode != "SR":
        lam[0] = m.g11 * c[0]
        lam[1] = m.g11 * c[1]
    lam[2] = m.g33 * c[2]
    lam[3] = m.g44 * c[3]
    lam[4] = m.g44 * c[4]
    if m.mode == "R":
        lam[5] = m.g66 * c[5]
    return lam


class _Converged(Exception):
    pass


def _nm_start(res_fn, lam_start, tol, maxfev, simplex_scale):
    """One Nelder-Mead start; stops as soon as the tolerance is met.

    Returns (best residual, best momentum, evaluations used).
    """
    best_f = np.inf
    best_lam = np.asarray(lam_start, dtype=float).copy()
    nfev = 0

    def objective(lam):
        nonlocal best_f, best_lam, nfev
        nfev += 1
        f = res_fn(lam)
        if f < best_f:
            best_f = f
            best_lam = lam.copy()
        if f <= tol:
            raise _Converged
        return f

    simplex = np.repeat(best_lam[None, :], 7, axis=0)
    for i in range(6):
        simplex[i + 1, i] += simplex_scale
    try:
        minimize(objective, best_lam, method="Nelder-Mead",
                 options=dict(initial_simplex=simplex, fatol=1e-14, xatol=1e-12,
                              maxfev=maxfev, maxiter=maxfev))
    except _Converged:
        pass
    return best_f, best_lam, nfev


def shoot_distance(target: RigidMotion, m: MetricParams, cfg: ShootingConfig = ShootingConfig(),
                   *, lam_seed: Optional[np.ndarray] = None, explore: bool = True,
                   with_trajectory: bool = True, rng: Optional[np.random.Generator] = None
                   ) -> ShootingResult:
    """Geodesic distance d(e, target) by multi-start momentum shooting.

    Minimizes the endpoint discrepancy ||log(gamma(1)^{-1} target)||_2 over
    the initial momentum with a derivative-free simplex method.  The first
    start is the exponential-curve seed G log(target) (or ``lam_seed`` when
    given); cfg.restarts further starts perturb it with the seeded
    generator.  Exploration integrates at a coarsened step count, and the
    shortest converged candidate is re-polished at cfg.steps; the distance
    is sqrt(2 h(lam0)) under the unit-time parametrization.

    ``explore=False`` stops at the first converged start (used by warm-
    started fiber scans).  Raises NoConvergence when no start reaches
    cfg.tol; minimality holds up to multi-start consensus.  In SR mode
    only normal extremals are covered (momentum shooting cannot produce
    abnormal ones).
    """
    c_target = log_se3(target)
    reach = algebra_norm(c_target, m) if m.mode != "SR" else float(np.linalg.norm(c_target))
    if reach > cfg.max_rho:
        raise ValueError(f"target log-norm {reach:.3f} exceeds the reach budget {cfg.max_rho}")
    trip = structure_constant_triples()
    ginv = m.inv_weights

    def make_res_fn(steps):
        def res_fn(lam0):
            return _kernels.shoot_residual(*trip, ginv, lam0, 1.0, steps, target.x, target.R)
        return res_fn

    res_fine = make_res_fn(cfg.steps)
    # 250 steps keep the coarse integration error (~1e-9 relative) safely
    # below the exploration stop; never coarsen an already-coarse budget.
    coarse_steps = cfg.steps if cfg.steps <= 250 else max(250, cfg.steps // 4)
    res_coarse = make_res_fn(coarse_steps)
    # When integration is coarsened, exploration only needs to identify the
    # basin (the fine polish of the winner closes the gap to cfg.tol), and
    # random restarts stop even earlier: they exist to find alternative
    # geodesics, whose lengths separate at far looser accuracy.
    explore_tol = cfg.tol if coarse_steps == cfg.steps else max(cfg.tol, 1e-7)
    restart_tol = max(explore_tol, 1e-5)

    seed0 = np.asarray(lam_seed, dtype=float).copy() if lam_seed is not None \
        else exponential_seed(target, m)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    scale0 = max(1.0, float(np.linalg.norm(seed0)))

    candidates: list[tuple[float, np.ndarray]] = []
    best_f_overall = np.inf
    starts_used = 0
    for k in range(1 + cfg.restarts):
        if k == 0:
            start, maxfev, scale, stop = seed0, MAXFEV_PRIMARY, 0.1 * scale0, explore_tol
        else:
            start = seed0 + (0.4 + 0.3 * k) * scale0 * rng.standard_normal(6)
            maxfev, scale, stop = MAXFEV_RESTART, 0.2 * scale0, restart_tol
        f, lam, _ = _nm_start(res_coarse, start, stop, maxfev, scale)
        starts_used += 1
        best_f_overall = min(best_f_overall, f)
        if f <= stop:
            candidates.append((hamiltonian(lam, m), lam))
            if not explore:
                break
    if not candidates:
        raise NoConvergence(
            f"no shooting start reached tol {cfg.tol:.1e}; best endpoint error {best_f_overall:.2e}")
    h_best, lam_best = min(candidates, key=lambda c: c[0])
    f_best = res_fine(lam_best)
    if f_best > cfg.tol:
        f_best, lam_best, _ = _nm_start(res_fine, lam_best, cfg.tol, MAXFEV_PRIMARY,
                                        1e-5 * max(1.0, float(np.linalg.norm(lam_best))))
        if f_best > cfg.tol:
            raise NoConvergence(
                f"fine-grid polish stalled at endpoint error {f_best:.2e}")
        h_best = hamiltonian(lam_best, m)
    trajectory = integrate(PhaseState(RigidMotion.identity(), lam_best), m, 1.0, cfg.steps) \
        if with_trajectory else None
    return ShootingResult(distance=float(np.sqrt(2.0 * h_best)), lam0=lam_best,
                          endpoint_error=f_best, converged=True,
                          trajectory=trajectory, starts_used=starts_used)


def energy_oracle_distance(target: RigidMotion, m: MetricParams, segments: int = 32) -> float:
    """Independent distance check: minimize the discrete path energy.

    The curve from e to the target is discretized as ``segments`` group
    increments exp(c_i) through free interior points (seeded on the exp
    curve, so every initial increment is log(target)/segments); the
    increment energy sum ||c_i||_G^2 is minimized by quasi-Newton descent
    and the minimized length sum ||c_i||_G is returned.  This shares no
    machinery with the Hamiltonian shooting route.
    """
    if segments < 8:
        raise ValueError("need at least 8 segments")
    if m.mode == "SR":
        raise ValueError("the energy oracle supports finite-cost modes only")
    gw = m.weights
    c = log_se3(target)
    fractions = np.arange(1, segments) / segments
    xi0 = np.concatenate([t * c for t in fractions])

    def objective(xi):
        return _kernels.path_energy(gw, xi, target.x, target.R, segments)

    def gradient(xi):
        return _kernels.path_energy_grad(gw, xi, target.x, target.R, segments, 1e-6)

    res = minimize(objective, xi0, jac=gradient, method="L-BFGS-B",
                   options=dict(maxiter=4000, maxfun=10 ** 6, ftol=1e-15, gtol=1e-8))
    grad_norm = float(np.linalg.norm(res.jac)) if res.jac is not None else np.inf
    if not res.success and grad_norm > 1e-5 * max(1.0, abs(res.fun)):
        raise NoConvergence(f"energy descent stalled: {res.message}")
    return float(_kernels.path_length(gw, res.x, target.x, target.R, segments))
