"""Seeded verification suites behind the ``verify`` CLI command.

Each suite runs a batch of invariant checks with reproducible randomness
and reports the worst violation per invariant against its tolerance.  The
suites mirror the library's mathematical guarantees: algebra identities,
flow conservation laws, horizontality of distance minimizers, metric
legality/reductivity, section inequalities and symmetries, and the
error-convergence behavior of the log-norm approximation.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import se3
from .flow import (PhaseState, ShootingConfig, energy_oracle_distance, integrate,
                   momentum_diagnostics, shoot_distance)
from .metrics import MetricParams, legality_check, log_norm, projections, reductive_check
from .sampling import (random_algebra_vector, random_coplanar_coset, random_coset,
                       random_metric, random_rigid_motion, random_unit_vector)
from .se3 import (RigidMotion, ad, adjoint_action, adjoint_matrix, coad, compose,
                  euler_zyz, exp_se3, f_coefficient, inverse, log_se3,
                  rotation_from_euler, rot_y, rot_z, structure_constants)
from .sections import (CosetPoint, compute_sections, fiber_element, fiber_sweep,
                       lognorm_error, min_angular_velocity_check, project,
                       section_canonical)

FIG_TOP_COORDS = np.array([0.0, 0.0, 2.0, 7.0 * np.pi / 16.0, 7.0 * np.pi / 16.0, 0.0])
FIG_TOP_METRIC = MetricParams(1.0, 1.0, 1.0, 0.0, mode="GI")
FIG_BOTTOM_COORDS = np.array([0.0, 0.25, 0.25, 0.0, np.pi / 56.0, 0.0])
FIG_BOTTOM_METRIC = MetricParams(1.0, 1.0, 0.01, 0.05)


@dataclass
class InvariantResult:
    violation: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.violation <= self.tolerance


@dataclass
class VerificationReport:
    suite: str
    cases: int = 0
    invariants: dict[str, InvariantResult] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.invariants.values())

    def record(self, name: str, violation: float, tolerance: float, cases: int = 0) -> None:
        previous = self.invariants.get(name)
        if previous is None:
            self.invariants[name] = InvariantResult(float(violation), tolerance)
        else:
            previous.violation = max(previous.violation, float(violation))
        self.cases += cases

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "cases": self.cases,
            "passed": self.passed,
            "wallTime": self.wall_time,
            "invariants": {
                name: {"violation": r.violation, "tolerance": r.tolerance, "ok": r.ok}
                for name, r in self.invariants.items()
            },
        }


def _timed(fn):
    def wrapper(seed: int = 0) -> VerificationReport:
        start = time.perf_counter()
        report = fn(seed)
        report.wall_time = time.perf_counter() - start
        return report
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _motion_gap(g1: RigidMotion, g2: RigidMotion) -> float:
    return max(float(np.abs(g1.x - g2.x).max()), float(np.abs(g1.R - g2.R).max()))


@_timed
def suite_algebra(seed: int = 0) -> VerificationReport:
    """Group axioms, exp/log, Euler angles, structure constants, duality."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("algebra")

    worst = 0.0
    for _ in range(100):
        g1, g2, g3 = (random_rigid_motion(rng) for _ in range(3))
        assoc = _motion_gap(compose(compose(g1, g2), g3), compose(g1, compose(g2, g3)))
        ident = _motion_gap(compose(g1, RigidMotion.identity()), g1)
        inv = _motion_gap(compose(g1, inverse(g1)), RigidMotion.identity())
        worst = max(worst, assoc, ident, inv)
    rep.record("group_axioms", worst, 1e-12, 100)

    worst = 0.0
    for _ in range(1000):
        c = random_algebra_vector(rng)
        worst = max(worst, float(np.abs(log_se3(exp_se3(c)) - c).max()))
    rep.record("exp_log_roundtrip", worst, 1e-10, 1000)

    worst = 0.0
    for _ in range(1000):
        g = random_rigid_motion(rng)
        worst = max(worst, _motion_gap(exp_se3(log_se3(g)), g))
    rep.record("log_exp_roundtrip", worst, 1e-10, 1000)

    worst = 0.0
    for _ in range(500):
        g = random_rigid_motion(rng, max_angle=np.pi - 0.1)
        c = log_se3(g)
        angles = euler_zyz(g.R)
        if angles.degenerate:
            continue
        q = float(np.linalg.norm(c[3:]))
        sinc = np.sin(q) / q if q > 1e-12 else 1.0
        predicted = np.sin(angles.alpha + angles.gamma) * np.cos(angles.beta / 2.0) ** 2 / sinc
        worst = max(worst, abs(c[5] - predicted))
    rep.record("fiber_coordinate_identity", worst, 1e-9, 500)

    worst = 0.0
    for _ in range(1000):
        beta = rng.uniform(0.01, np.pi - 0.01)
        gamma, alpha = rng.uniform(0.0, 2.0 * np.pi, 2)
        R = rot_z(gamma) @ rot_y(beta) @ rot_z(alpha)
        worst = max(worst, float(np.abs(rotation_from_euler(euler_zyz(R)) - R).max()))
    rep.record("euler_roundtrip", worst, 1e-10, 1000)

    C = structure_constants()
    rep.record("structure_antisymmetry", float(np.abs(C + C.transpose(0, 2, 1)).max()), 1e-12)
    worst = 0.0
    B = se3.basis_matrices()
    for i in range(6):
        for j in range(6):
            table = np.einsum("k,khl->hl", C[:, i, j], np.array(B))
            worst = max(worst, float(np.abs(table - (B[i] @ B[j] - B[j] @ B[i])).max()))
    rep.record("structure_vs_commutators", worst, 1e-12, 36)
    worst = 0.0
    for i in range(6):
        for j in range(6):
            for k in range(6):
                cyc = (np.einsum("m,lm->l", C[:, i, j], C[:, :, k])
                       + np.einsum("m,lm->l", C[:, j, k], C[:, :, i])
                       + np.einsum("m,lm->l", C[:, k, i], C[:, :, j]))
                worst = max(worst, float(np.abs(cyc).max()))
    rep.record("jacobi_identity", worst, 1e-12, 216)

    worst = 0.0
    for _ in range(100):
        v, w, mu = (rng.standard_normal(6) for _ in range(3))
        worst = max(worst, abs(float(coad(v, mu) @ w) - float(mu @ ad(v, w))))
    rep.record("coad_duality", worst, 1e-12, 100)

    qs = np.linspace(0.0, np.pi - 1e-6, 400)
    fs = np.array([f_coefficient(q) for q in qs])
    rep.record("f_nonnegative", float(max(0.0, -fs.min())), 0.0)
    rep.record("f_monotone", float(max(0.0, -np.diff(fs).min())), 0.0)
    rep.record("f_bound", float(max(0.0, -(1.0 - qs ** 2 * fs).min())), 0.0, 400)

    worst = 0.0
    for _ in range(50):
        h1, h2 = random_rigid_motion(rng), random_rigid_motion(rng)
        lhs = adjoint_matrix(compose(h1, h2))
        rhs = adjoint_matrix(h1) @ adjoint_matrix(h2)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    rep.record("adjoint_homomorphism", worst, 1e-12, 50)

    worst = 0.0
    eps = 1e-6
    a6 = np.eye(6)[5]
    for _ in range(20):
        v = rng.standard_normal(6)
        h = RigidMotion(np.zeros(3), rot_z(eps))
        fd = (adjoint_action(h, v) - v) / eps
        worst = max(worst, float(np.abs(fd - ad(a6, v)).max()))
    rep.record("adjoint_derivative_is_ad", worst, 1e-5, 20)
    return rep


@_timed
def suite_conservation(seed: int = 0) -> VerificationReport:
    """Fiber momentum, Hamiltonian, and fiber velocity are first integrals."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("conservation")
    worst_lam6 = worst_ham = worst_u6 = 0.0
    for _ in range(100):
        mode = "R" if rng.random() < 0.5 else "SR"
        m = random_metric(rng, mode=mode)
        lam0 = rng.standard_normal(6)
        tr = integrate(PhaseState(RigidMotion.identity(), lam0), m, 1.0, 1000)
        diag = momentum_diagnostics(tr)
        scale = max(1.0, float(np.linalg.norm(lam0)))
        worst_lam6 = max(worst_lam6, diag.max_lam6_drift / scale)
        worst_u6 = max(worst_u6, diag.max_u6_drift / scale)
        worst_ham = max(worst_ham, diag.max_ham_drift / max(1.0, tr.hams[0]))
    rep.record("fiber_momentum_drift", worst_lam6, 1e-8, 100)
    rep.record("fiber_velocity_drift", worst_u6, 1e-8)
    rep.record("hamiltonian_drift", worst_ham, 1e-8)

    worst_ratio_defect = 0.0
    for _ in range(5):
        m = random_metric(rng)
        lam0 = 2.0 * rng.standard_normal(6)
        drifts = []
        for steps in (40, 80):
            tr = integrate(PhaseState(RigidMotion.identity(), lam0), m, 1.0, steps,
                           check_drift=False)
            drifts.append(momentum_diagnostics(tr).max_ham_drift)
        if drifts[1] < 1e-14:
            continue
        ratio = drifts[0] / drifts[1]
        worst_ratio_defect = max(worst_ratio_defect, max(0.0, 8.0 - ratio))
    rep.record("fourth_order_drift_ratio", worst_ratio_defect, 0.0, 5)
    return rep


@_timed
def suite_horizontality(seed: int = 0) -> VerificationReport:
    """Horizontal starts stay horizontal; fiber cost is irrelevant."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("horizontality")
    worst = 0.0
    for _ in range(50):
        m = random_metric(rng)
        lam0 = rng.standard_normal(6)
        lam0[5] = 0.0
        tr = integrate(PhaseState(RigidMotion.identity(), lam0), m, 1.0, 1000)
        worst = max(worst, float(np.abs(tr.us[:, 5]).max()) / max(1.0, float(np.linalg.norm(lam0))))
    rep.record("horizontal_stays_horizontal", worst, 1e-8, 50)

    worst = 0.0
    for _ in range(5):
        lam0 = rng.standard_normal(6)
        lam0[5] = 0.0
        paths = []
        for g66 in (0.01, 1.0, 100.0):
            m = MetricParams(1.2, 0.8, 1.5, g66)
            tr = integrate(PhaseState(RigidMotion.identity(), lam0), m, 1.0, 500)
            paths.append((tr.xs, tr.Rs))
        for xs, Rs in paths[1:]:
            worst = max(worst, float(np.abs(xs - paths[0][0]).max()),
                        float(np.abs(Rs - paths[0][1]).max()))
    rep.record("fiber_cost_irrelevant", worst, 1e-7, 5)

    worst = 0.0
    for _ in range(4):
        p = random_coset(rng, translation_scale=0.5)
        m = random_metric(rng)
        result = compute_sections(p, m)
        lam0 = result.lam0
        worst = max(worst, abs(float(lam0[5])) / max(1.0, float(np.linalg.norm(lam0))))
    rep.record("min_distance_winner_horizontal", worst, 1e-6, 4)
    return rep


@_timed
def suite_reductive(seed: int = 0) -> VerificationReport:
    """Legality of the diagonal family and the reductive decomposition."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("reductive")
    worst = 0.0
    for _ in range(20):
        m = random_metric(rng, mode="GI" if rng.random() < 0.3 else "R")
        _, violation = legality_check(m.matrix(), seed=seed)
        worst = max(worst, violation)
    rep.record("diagonal_family_legal", worst, 1e-10, 20)

    ok, _ = legality_check(np.diag([1.0, 2.0, 1.0, 1.0, 1.0, 1.0]), seed=seed)
    rep.record("broken_translation_isotropy_detected", 1.0 if ok else 0.0, 0.0, 1)
    ok, _ = legality_check(np.diag([1.0, 1.0, 1.0, 1.0, 2.5, 1.0]), seed=seed)
    rep.record("broken_rotation_isotropy_detected", 1.0 if ok else 0.0, 0.0, 1)

    worst = 0.0
    worst_m = 0.0
    for _ in range(10):
        m = random_metric(rng)
        ok, violation, m_basis = reductive_check(m.matrix(), seed=seed)
        worst = max(worst, violation)
        # complement of the fiber generator must be span{A1..A5}
        span_gap = float(np.abs(m_basis.T @ np.eye(6)[5]).max())
        worst_m = max(worst_m, span_gap)
    rep.record("reductive_split", worst, 1e-10, 10)
    rep.record("complement_is_A1_to_A5", worst_m, 1e-10)

    P = projections(MetricParams(1.0, 1.0, 1.0, 1.0))
    rep.record("projection_idempotent",
               float(max(np.abs(P.P_H @ P.P_H - P.P_H).max(),
                         np.abs(P.P_V @ P.P_V - P.P_V).max(),
                         np.abs(P.P_Delta @ P.P_Delta - P.P_Delta).max())), 1e-15, 3)
    rep.record("projection_complementary",
               float(np.abs(P.P_H + P.P_V - np.eye(6)).max()), 1e-15)
    return rep


@_timed
def suite_sections(seed: int = 0) -> VerificationReport:
    """Section inequalities, sphere coincidence, profile symmetry, and the
    figure-configuration error values."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("sections")

    worst_chain = 0.0
    worst_proj = 0.0
    for _ in range(4):
        p = random_coset(rng, translation_scale=0.5)
        m = random_metric(rng)
        r = compute_sections(p, m)
        worst_chain = max(worst_chain, max(0.0, r.rho_at_sigma_rho - r.rho_at_sigma - 1e-9),
                          max(0.0, r.dist_at_sigma_d - r.rho_at_sigma_rho - 1e-6))
        for g in (r.sigma, r.sigma_rho, r.sigma_d):
            q = project(g)
            worst_proj = max(worst_proj, float(np.abs(q.x - p.x).max()),
                             float(np.abs(q.n - p.n).max()))
    rep.record("section_chain_inequality", worst_chain, 0.0, 4)
    rep.record("sections_project_back", worst_proj, 1e-10)

    worst_rho = worst_d = 0.0
    for _ in range(4):
        g44 = rng.uniform(0.5, 2.0)
        m = MetricParams(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), g44, g44)
        p = CosetPoint(np.zeros(3), random_unit_vector(rng))
        beta = float(np.arccos(np.clip(p.n[2], -1, 1)))
        r = compute_sections(p, m)
        worst_rho = max(worst_rho, abs(r.rho_at_sigma - r.rho_at_sigma_rho))
        worst_d = max(worst_d, abs(r.rho_at_sigma_rho - r.dist_at_sigma_d),
                      abs(r.dist_at_sigma_d - np.sqrt(g44) * beta))
    rep.record("sphere_lognorm_coincidence", worst_rho, 1e-9, 4)
    rep.record("sphere_distance_coincidence", worst_d, 1e-6)

    worst = 0.0
    for _ in range(10):
        p = random_coplanar_coset(rng)
        m = random_metric(rng, mode="GI" if rng.random() < 0.3 else "R")
        sweep = fiber_sweep(p, m, nsamples=256)
        rho_neg = np.array([_safe_rho(p, m, -a) for a in sweep.alphas])
        good = ~(np.isnan(sweep.rho) | np.isnan(rho_neg))
        worst = max(worst, float(np.abs(sweep.rho[good] - rho_neg[good]).max()))
    rep.record("coplanar_profile_symmetry", worst, 1e-9, 10)

    worst = 0.0
    for _ in range(20):
        z = rng.uniform(-1.5, 1.5)
        n = random_unit_vector(rng)
        g33 = rng.uniform(0.3, 1.0)
        m = MetricParams(g33 + rng.uniform(0.0, 2.0), g33,
                         rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0))
        err = lognorm_error(CosetPoint(np.array([0.0, 0.0, z]), n), m)
        worst = max(worst, abs(err))
    rep.record("axis_coset_error_vanishes", worst, 1e-6, 20)

    worst = 0.0
    for _ in range(5):
        p = random_coset(rng)
        g44 = rng.uniform(0.5, 2.0)
        m = MetricParams(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), g44, g44)
        ok, alpha = min_angular_velocity_check(p, m)
        worst = max(worst, 0.0 if ok else abs(alpha))
    rep.record("canonical_minimizes_angular_velocity", worst, 0.0, 5)

    worst = 0.0
    for _ in range(5):
        p = random_coset(rng, translation_scale=0.5)
        delta = rng.standard_normal(3)
        m = random_metric(rng)
        s1 = section_canonical(CosetPoint(p.x + delta, p.n))
        s2 = compose(RigidMotion(delta, np.eye(3)), section_canonical(p))
        worst = max(worst, _motion_gap(s1, s2))
    rep.record("translation_equivariance", worst, 1e-12, 5)

    err_top = lognorm_error(project(exp_se3(FIG_TOP_COORDS)), FIG_TOP_METRIC)
    rep.record("figure_top_error", abs(err_top - 0.1), 0.03, 1)
    err_bottom = lognorm_error(project(exp_se3(FIG_BOTTOM_COORDS)), FIG_BOTTOM_METRIC)
    rep.record("figure_bottom_error_vanishes", err_bottom, 1e-3, 1)
    return rep


def _safe_rho(p: CosetPoint, m: MetricParams, alpha: float) -> float:
    try:
        return log_norm(fiber_element(p, alpha), m)
    except Exception:
        return np.nan


@_timed
def suite_error_convergence(seed: int = 0) -> VerificationReport:
    """The log-norm error vanishes toward the identity, and the log norm
    approximates the distance to fourth order."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("error-convergence")

    worst_growth = 0.0
    for _ in range(5):
        c = random_algebra_vector(rng, max_angle=2.0)
        previous = None
        for t in (1.0, 0.5, 0.25, 0.125):
            err = lognorm_error(project(exp_se3(t * c)), MetricParams(1.0, 1.0, 1.0, 1.0))
            if previous is not None:
                worst_growth = max(worst_growth, err - 1.1 * previous - 1e-12)
            previous = err
    rep.record("error_decreases_toward_identity", worst_growth, 0.0, 20)

    worst_growth = 0.0
    cfg = ShootingConfig(restarts=4)
    for _ in range(2):
        c = random_algebra_vector(rng)
        c *= min(1.0, 1.5 / float(np.linalg.norm(c)))
        m = random_metric(rng)
        previous = None
        for t in (0.8, 0.4, 0.2, 0.1):
            target = exp_se3(t * c)
            d = shoot_distance(target, m, cfg, with_trajectory=False).distance
            rho = log_norm(target, m)
            ratio = abs(d * d - rho * rho) / rho ** 4
            if previous is not None:
                worst_growth = max(worst_growth, ratio - 2.0 * previous)
            previous = ratio
    rep.record("lognorm_fourth_order_accuracy", worst_growth, 0.0, 8)

    worst = 0.0
    for _ in range(3):
        c = random_algebra_vector(rng)
        c *= min(1.0, 1.2 / float(np.linalg.norm(c)))
        m = random_metric(rng)
        target = exp_se3(c)
        d_shoot = shoot_distance(target, m, cfg, with_trajectory=False).distance
        d_oracle = energy_oracle_distance(target, m)
        worst = max(worst, abs(d_shoot - d_oracle) / d_shoot)
    rep.record("solver_oracle_agreement", worst, 0.01, 3)

    # No quantitative radius is claimed for "co-planar and close implies
    # zero error"; probe it empirically and report the observed radius
    # (informational: the tolerance is infinite).
    radius = np.inf
    for _ in range(3):
        p0 = random_coplanar_coset(rng, translation_scale=1.0)
        m = random_metric(rng)
        scale = 1.0
        while scale > 1e-3:
            p = CosetPoint(scale * p0.x, p0.n)
            if lognorm_error(p, m) <= 1e-9:
                break
            scale *= 0.5
        radius = min(radius, scale * float(np.linalg.norm(p0.x)))
    rep.record("coplanar_zero_error_radius_observed", radius, np.inf, 3)
    return rep


SUITES = {
    "algebra": suite_algebra,
    "conservation": suite_conservation,
    "horizontality": suite_horizontality,
    "reductive": suite_reductive,
    "sections": suite_sections,
    "error-convergence": suite_error_convergence,
}


def run_suite(name: str, seed: int = 0) -> list[VerificationReport]:
    """Run one named suite, or every suite for ``all``."""
    if name == "all":
        return [fn(seed) for fn in SUITES.values()]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return [SUITES[name](seed)]
