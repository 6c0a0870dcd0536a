"""Acceptance criteria.

One test per criterion; each prints a [PASS]/[FAIL] line with its wall time
(run pytest with -s to see them) and then asserts the criterion at its
stated tolerance and runtime budget.  Budgets assume warmed-up kernels (the
session fixture compiles them once, cached on disk).
"""
import time

import numpy as np

from se3geo.flow import (PhaseState, ShootingConfig, energy_oracle_distance, integrate,
                         momentum_diagnostics, shoot_distance)
from se3geo.metrics import MetricParams, legality_check, log_norm, reductive_check
from se3geo.sampling import (random_algebra_vector, random_coplanar_coset, random_coset,
                             random_metric, random_rigid_motion, random_unit_vector)
from se3geo.se3 import RigidMotion, euler_zyz, exp_se3, log_se3, structure_constants
from se3geo.sections import (CosetPoint, compute_sections, fiber_element, fiber_sweep,
                             lognorm_error, project, section_min_distance)

G1_COORDS = np.array([0.0, 0.0, 2.0, 7 * np.pi / 16, 7 * np.pi / 16, 0.0])
G1_METRIC = MetricParams(1.0, 1.0, 1.0, 0.0, mode="GI")
G2_COORDS = np.array([0.0, 0.25, 0.25, 0.0, np.pi / 56, 0.0])
G2_METRIC = MetricParams(1.0, 1.0, 0.01, 0.05)


class Criterion:
    def __init__(self, number, description, budget):
        self.number = number
        self.description = description
        self.budget = budget
        self.start = time.perf_counter()

    def finish(self, ok):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if ok and elapsed < self.budget else "FAIL"
        print(f"\n[{status}] criterion {self.number}: {self.description} "
              f"({elapsed:.2f} s / budget {self.budget:.0f} s)")
        assert elapsed < self.budget, f"criterion {self.number} exceeded its runtime budget"
        return ok


def test_criterion_1_figure_top_reproduction():
    crit = Criterion(1, "figure top: error_G(project(g1)) in [0.07, 0.13]", 5.0)
    error = lognorm_error(project(exp_se3(G1_COORDS)), G1_METRIC)
    ok = crit.finish(0.07 <= error <= 0.13)
    # The faithfully computed gap is 0.0: the canonical representative is
    # the global fiber minimizer for these settings (cross-checked against
    # matrix-logarithm oracles in test_sections).  The figure's reported
    # 0.1 matches a fixed-position conjugation sweep, not the fiber sweep;
    # see the decisions ledger.  This assertion is kept as specified.
    assert ok, f"error_G(project(g1)) = {error!r} not in [0.07, 0.13]"


def test_criterion_2_figure_bottom_reproduction():
    crit = Criterion(2, "figure bottom: error_G(project(g2)) <= 1e-3", 5.0)
    error = lognorm_error(project(exp_se3(G2_COORDS)), G2_METRIC)
    assert crit.finish(0.0 <= error <= 1e-3), error


def test_criterion_3_conservation():
    crit = Criterion(3, "conservation: lam6 and u6 drift <= 1e-8 relative, R and SR", 30.0)
    rng = np.random.default_rng(12345 + 3)
    worst = 0.0
    for _ in range(100):
        lam0 = rng.standard_normal(6)
        scale = max(1.0, float(np.linalg.norm(lam0)))
        for mode in ("R", "SR"):
            m = random_metric(rng, mode=mode)
            tr = integrate(PhaseState(RigidMotion.identity(), lam0), m, 1.0, 1000)
            d = momentum_diagnostics(tr)
            worst = max(worst, d.max_lam6_drift / scale, d.max_u6_drift / scale)
    assert crit.finish(worst <= 1e-8), worst


def test_criterion_4_horizontality_and_fiber_cost():
    crit = Criterion(4, "min-distance winners horizontal; fiber cost irrelevant", 300.0)
    rng = np.random.default_rng(12345 + 4)
    worst_lam6 = 0.0
    worst_path_gap = 0.0
    for _ in range(20):
        p = random_coset(rng, translation_scale=0.6, polar_margin=0.25)
        m = random_metric(rng)
        res = section_min_distance(p, m, ShootingConfig())
        lam0 = res.shooting.lam0
        worst_lam6 = max(worst_lam6, abs(lam0[5]) / max(1.0, float(np.linalg.norm(lam0))))
        lam_h = lam0.copy()
        lam_h[5] = 0.0
        reference = None
        for g66 in (0.01, 1.0, 100.0):
            m_g = MetricParams(m.g11, m.g33, m.g44, g66)
            tr = integrate(PhaseState(RigidMotion.identity(), lam_h), m_g, 1.0, 500)
            if reference is None:
                reference = tr
            else:
                worst_path_gap = max(worst_path_gap,
                                     float(np.abs(tr.xs - reference.xs).max()),
                                     float(np.abs(tr.Rs - reference.Rs).max()))
    assert crit.finish(worst_lam6 <= 1e-6 and worst_path_gap <= 1e-7), \
        (worst_lam6, worst_path_gap)


def test_criterion_5_sphere_coincidence():
    crit = Criterion(5, "pure rotations, g44 = g66: sections coincide, d = sqrt(g44) beta", 120.0)
    rng = np.random.default_rng(12345 + 5)
    worst_rho = worst_dist = worst_formula = 0.0
    for _ in range(50):
        g44 = rng.uniform(0.5, 2.0)
        m = MetricParams(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), g44, g44)
        p = CosetPoint(np.zeros(3), random_unit_vector(rng, polar_margin=0.15))
        beta = float(np.arccos(np.clip(p.n[2], -1.0, 1.0)))
        res = compute_sections(p, m)
        worst_rho = max(worst_rho, abs(res.rho_at_sigma - res.rho_at_sigma_rho))
        worst_dist = max(worst_dist, abs(res.rho_at_sigma_rho - res.dist_at_sigma_d))
        worst_formula = max(worst_formula, abs(res.dist_at_sigma_d - np.sqrt(g44) * beta))
    assert crit.finish(worst_rho <= 1e-9 and worst_dist <= 1e-6 and worst_formula <= 1e-6), \
        (worst_rho, worst_dist, worst_formula)


def test_criterion_6_coplanar_symmetry():
    crit = Criterion(6, "co-planar cosets: 256-point profile symmetric to 1e-9", 30.0)
    rng = np.random.default_rng(12345 + 6)
    worst = 0.0
    for _ in range(50):
        p = random_coplanar_coset(rng)
        m = random_metric(rng, mode="GI" if rng.random() < 0.25 else "R")
        sweep = fiber_sweep(p, m, nsamples=256)
        mirrored = np.full_like(sweep.rho, np.nan)
        for i, a in enumerate(sweep.alphas):
            try:
                mirrored[i] = log_norm(fiber_element(p, -a), m)
            except Exception:
                pass
        good = ~(np.isnan(sweep.rho) | np.isnan(mirrored))
        worst = max(worst, float(np.abs(sweep.rho[good] - mirrored[good]).max()))
    assert crit.finish(worst <= 1e-9), worst


def test_criterion_7_axis_cosets_zero_error():
    crit = Criterion(7, "cosets on the reference axis with g11 >= g33: error <= 1e-6", 30.0)
    rng = np.random.default_rng(12345 + 7)
    worst = 0.0
    for _ in range(50):
        g33 = rng.uniform(0.3, 1.5)
        m = MetricParams(g33 + rng.uniform(0.0, 2.0), g33,
                         rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0))
        p = CosetPoint(np.array([0.0, 0.0, rng.uniform(-1.5, 1.5)]),
                       random_unit_vector(rng, polar_margin=0.15))
        worst = max(worst, abs(lognorm_error(p, m)))
    assert crit.finish(worst <= 1e-6), worst


def test_criterion_8_lognorm_asymptotics():
    crit = Criterion(8, "|d^2 - rho^2| / rho^4 bounded as the target shrinks", 120.0)
    rng = np.random.default_rng(12345 + 8)
    ok = True
    worst_growth = 0.0
    for _ in range(5):
        c = random_algebra_vector(rng)
        c *= min(1.0, 1.5 / float(np.linalg.norm(c)))
        m = random_metric(rng)
        previous = None
        for t in (0.8, 0.4, 0.2, 0.1):
            target = exp_se3(t * c)
            d = shoot_distance(target, m, ShootingConfig(), with_trajectory=False).distance
            rho = log_norm(target, m)
            ratio = abs(d * d - rho * rho) / rho ** 4
            if previous is not None:
                worst_growth = max(worst_growth, ratio / max(previous, 1e-12))
                ok = ok and ratio <= 2.0 * previous + 1e-9
            previous = ratio
    assert crit.finish(ok), f"worst ratio growth per halving: {worst_growth}"


def test_criterion_9_solver_oracle_agreement():
    crit = Criterion(9, "shooting vs discrete-energy oracle within 1%", 300.0)
    rng = np.random.default_rng(12345 + 9)
    worst = 0.0
    for _ in range(30):
        m = random_metric(rng)
        c = random_algebra_vector(rng)
        g = exp_se3(c)
        rho = log_norm(g, m)
        if rho > 1.5:
            c *= 1.5 / rho * rng.uniform(0.3, 1.0)
            g = exp_se3(c)
        d_shoot = shoot_distance(g, m, ShootingConfig(), with_trajectory=False).distance
        d_oracle = energy_oracle_distance(g, m, segments=32)
        worst = max(worst, abs(d_shoot - d_oracle) / d_shoot)
    assert crit.finish(worst <= 0.01), worst


def test_criterion_10_structural_suites():
    crit = Criterion(10, "roundtrips, fiber-twist identity, Jacobi, legality, order 4", 60.0)
    rng = np.random.default_rng(12345 + 10)

    worst_round = 0.0
    for _ in range(1000):
        c = random_algebra_vector(rng)
        worst_round = max(worst_round, float(np.abs(log_se3(exp_se3(c)) - c).max()))
        g = random_rigid_motion(rng)
        back = exp_se3(log_se3(g))
        worst_round = max(worst_round, float(np.abs(back.x - g.x).max()),
                          float(np.abs(back.R - g.R).max()))

    worst_c6 = 0.0
    for _ in range(500):
        g = random_rigid_motion(rng, max_angle=np.pi - 0.1)
        a = euler_zyz(g.R)
        if a.degenerate:
            continue
        c = log_se3(g)
        q = float(np.linalg.norm(c[3:]))
        sinc = np.sin(q) / q if q > 0 else 1.0
        predicted = np.sin(a.alpha + a.gamma) * np.cos(a.beta / 2.0) ** 2 / sinc
        worst_c6 = max(worst_c6, abs(c[5] - predicted))

    C = structure_constants()
    worst_jacobi = 0.0
    for i in range(6):
        for j in range(6):
            for k in range(6):
                cyc = (np.einsum("m,lm->l", C[:, i, j], C[:, :, k])
                       + np.einsum("m,lm->l", C[:, j, k], C[:, :, i])
                       + np.einsum("m,lm->l", C[:, k, i], C[:, :, j]))
                worst_jacobi = max(worst_jacobi, float(np.abs(cyc).max()))

    worst_legal = 0.0
    for _ in range(10):
        m = random_metric(rng, mode="GI" if rng.random() < 0.3 else "R")
        _, v1 = legality_check(m.matrix())
        _, v2, _ = reductive_check(m.matrix())
        worst_legal = max(worst_legal, v1, v2)

    ratios = []
    for _ in range(3):
        m = random_metric(rng)
        lam0 = 2.0 * rng.standard_normal(6)
        drifts = [momentum_diagnostics(
            integrate(PhaseState(RigidMotion.identity(), lam0), m, 1.0, steps,
                      check_drift=False)).max_ham_drift for steps in (40, 80)]
        if drifts[1] > 1e-14:
            ratios.append(drifts[0] / drifts[1])

    ok = (worst_round <= 1e-10 and worst_c6 <= 1e-9 and worst_jacobi <= 1e-12
          and worst_legal <= 1e-10 and ratios and min(ratios) >= 8.0)
    assert crit.finish(ok), (worst_round, worst_c6, worst_jacobi, worst_legal, ratios)
