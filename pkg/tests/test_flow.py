import math

import numpy as np
import pytest

from se3geo.errors import NoConvergence, StepCountTooSmall
from se3geo.flow import (PhaseState, ShootingConfig, energy_oracle_distance, flow_rhs,
                         hamiltonian, integrate, momentum_diagnostics, shoot_distance)
from se3geo.metrics import MetricParams, log_norm
from se3geo.sampling import random_algebra_vector, random_metric
from se3geo.se3 import RigidMotion, exp_se3, inverse, log_se3, rot_y

UNIT = MetricParams(1.0, 1.0, 1.0, 1.0)


def start(lam):
    return PhaseState(RigidMotion.identity(), np.asarray(lam, dtype=float))


class TestHamiltonian:
    def test_zero(self):
        assert hamiltonian(np.zeros(6), UNIT) == 0.0

    def test_unit_metric_single_component(self):
        assert hamiltonian(np.eye(6)[2], UNIT) == 0.5

    def test_sr_ignores_transverse_momenta(self):
        m = MetricParams(math.inf, 1.0, 1.0, 1.0, mode="SR")
        assert hamiltonian(np.array([3.0, -2.0, 0.0, 0.0, 0.0, 5.0]), m) == 0.0

    def test_gi_ignores_fiber_momentum(self):
        m = MetricParams(1.0, 1.0, 1.0, 0.0, mode="GI")
        assert hamiltonian(np.array([0.0, 0.0, 0.0, 0.0, 0.0, 5.0]), m) == 0.0


class TestFlowRhs:
    def test_pure_forward_translation_is_straight(self):
        u, lamdot = flow_rhs(start([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]), UNIT)
        assert np.abs(lamdot).max() == 0.0
        assert np.allclose(u, [0.0, 0.0, 1.0, 0.0, 0.0, 0.0])

    def test_fiber_momentum_rate_vanishes(self, rng):
        for _ in range(1000):
            mode = "R" if rng.random() < 0.5 else "SR"
            m = random_metric(rng, mode=mode)
            _, lamdot = flow_rhs(start(rng.standard_normal(6)), m)
            assert abs(lamdot[5]) < 1e-13

    def test_sr_velocity_in_distribution(self, rng):
        m = MetricParams(math.inf, 1.0, 1.0, 1.0, mode="SR")
        for _ in range(20):
            u, _ = flow_rhs(start(rng.standard_normal(6)), m)
            assert abs(u[0]) == 0.0 and abs(u[1]) == 0.0 and abs(u[5]) == 0.0


class TestIntegrate:
    def test_zero_momentum_constant(self):
        tr = integrate(start(np.zeros(6)), UNIT, 1.0, 10)
        assert np.abs(tr.xs).max() == 0.0
        assert np.abs(tr.Rs - np.eye(3)).max() == 0.0

    def test_straight_line_geodesic(self):
        g33 = 4.0
        m = MetricParams(1.0, g33, 1.0, 1.0)
        tr = integrate(start([0.0, 0.0, np.sqrt(g33), 0.0, 0.0, 0.0]), m, 1.0, 100)
        # speed ||u||_G = 1, so gamma(t) = (0, 0, t/sqrt(g33))
        assert np.abs(tr.xs[:, 2] - tr.times / np.sqrt(g33)).max() < 1e-12
        assert np.abs(tr.Rs - np.eye(3)).max() < 1e-14

    def test_biinvariant_rotational_block_gives_exp_curve(self, rng):
        m = MetricParams(1.0, 1.0, 1.7, 1.7)
        lam = np.zeros(6)
        lam[3:] = rng.standard_normal(3)
        tr = integrate(start(lam), m, 1.0, 200)
        u0 = m.inv_weights * lam
        for i in (50, 120, 200):
            g_exp = exp_se3(tr.times[i] * u0)
            assert np.abs(tr.xs[i] - g_exp.x).max() < 1e-9
            assert np.abs(tr.Rs[i] - g_exp.R).max() < 1e-9

    def test_conservation(self, rng):
        for _ in range(20):
            mode = "R" if rng.random() < 0.5 else "SR"
            m = random_metric(rng, mode=mode)
            lam0 = rng.standard_normal(6)
            tr = integrate(start(lam0), m, 1.0, 1000)
            d = momentum_diagnostics(tr)
            scale = max(1.0, np.linalg.norm(lam0))
            assert d.max_lam6_drift <= 1e-8 * scale
            assert d.max_u6_drift <= 1e-8 * scale
            assert d.max_ham_drift <= 1e-8 * max(1.0, tr.hams[0])

    def test_horizontal_start_stays_horizontal(self, rng):
        for _ in range(10):
            m = random_metric(rng)
            lam0 = rng.standard_normal(6)
            lam0[5] = 0.0
            tr = integrate(start(lam0), m, 1.0, 1000)
            assert np.abs(tr.us[:, 5]).max() <= 1e-8 * max(1.0, np.linalg.norm(lam0))

    def test_fiber_cost_does_not_move_horizontal_paths(self, rng):
        # free (GI), finite small, and finite large fiber costs all produce
        # the same configuration path from a horizontal start
        lam0 = rng.standard_normal(6)
        lam0[5] = 0.0
        reference = integrate(start(lam0), MetricParams(1.2, 0.8, 1.5, 0.0, mode="GI"),
                              1.0, 500)
        for g66 in (0.01, 1.0, 100.0):
            m = MetricParams(1.2, 0.8, 1.5, g66)
            tr = integrate(start(lam0), m, 1.0, 500)
            assert np.abs(tr.xs - reference.xs).max() < 1e-7
            assert np.abs(tr.Rs - reference.Rs).max() < 1e-7

    def test_fourth_order_convergence(self, rng):
        m = MetricParams(1.0, 2.0, 1.5, 0.7)
        lam0 = 2.0 * rng.standard_normal(6)
        drifts = []
        for steps in (40, 80):
            tr = integrate(start(lam0), m, 1.0, steps, check_drift=False)
            drifts.append(momentum_diagnostics(tr).max_ham_drift)
        assert drifts[0] / drifts[1] >= 8.0

    def test_step_count_guard(self):
        lam = 5.0 * np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0])
        with pytest.raises(StepCountTooSmall):
            integrate(start(lam), MetricParams(1.0, 1.0, 0.05, 1.0), 1.0, 2)
        # a blown-up (non-finite) trajectory must also be rejected
        with pytest.raises(StepCountTooSmall):
            integrate(start(8.0 * np.ones(6)), MetricParams(1.0, 0.1, 0.2, 0.1), 1.0, 3)
        with pytest.raises(ValueError):
            integrate(start(np.zeros(6)), UNIT, 1.0, 0)

    def test_diagnostics_constant_trajectory(self):
        tr = integrate(start(np.zeros(6)), UNIT, 1.0, 5)
        d = momentum_diagnostics(tr)
        assert (d.max_lam6_drift, d.max_ham_drift, d.max_u6_drift) == (0.0, 0.0, 0.0)


class TestShootDistance:
    def test_identity_target(self):
        res = shoot_distance(RigidMotion.identity(), UNIT, ShootingConfig(restarts=0))
        assert res.distance < 1e-12 and res.converged

    def test_pure_translation(self):
        m = MetricParams(1.0, 4.0, 1.0, 1.0)
        g = RigidMotion(np.array([0.0, 0.0, 0.8]), np.eye(3))
        res = shoot_distance(g, m, ShootingConfig(restarts=2))
        assert abs(res.distance - 2.0 * 0.8) < 1e-6

    def test_pure_rotation_biinvariant(self):
        m = MetricParams(1.0, 1.0, 2.0, 2.0)
        beta = 0.9
        res = shoot_distance(RigidMotion(np.zeros(3), rot_y(beta)), m, ShootingConfig(restarts=2))
        assert abs(res.distance - np.sqrt(2.0) * beta) < 1e-6
        assert res.endpoint_error <= 1e-8
        # unit-time parametrization: distance equals sqrt(2 h)
        assert abs(res.distance - np.sqrt(2.0 * hamiltonian(res.lam0, m))) < 1e-14

    def test_distance_below_log_norm(self, rng):
        for _ in range(5):
            c = random_algebra_vector(rng)
            c *= 0.9 / np.linalg.norm(c)
            m = random_metric(rng)
            g = exp_se3(c)
            res = shoot_distance(g, m, ShootingConfig(restarts=2), with_trajectory=False)
            assert res.distance <= log_norm(g, m) + 1e-7

    def test_inverse_symmetry(self, rng):
        cfg = ShootingConfig(restarts=3)
        for _ in range(3):
            c = random_algebra_vector(rng)
            c *= 0.9 / np.linalg.norm(c)
            m = random_metric(rng)
            g = exp_se3(c)
            d1 = shoot_distance(g, m, cfg, with_trajectory=False).distance
            d2 = shoot_distance(inverse(g), m, cfg, with_trajectory=False).distance
            assert abs(d1 - d2) <= 2.0 * cfg.tol

    def test_reach_budget(self):
        g = RigidMotion(np.array([10.0, 0.0, 0.0]), np.eye(3))
        with pytest.raises(ValueError):
            shoot_distance(g, UNIT, ShootingConfig(max_rho=3.0))

    def test_no_convergence_is_typed(self):
        g = exp_se3(np.array([0.4, 0.1, -0.2, 0.3, 0.2, 0.1]))
        with pytest.raises(NoConvergence):
            shoot_distance(g, UNIT, ShootingConfig(tol=1e-15, restarts=0))

    def test_trajectory_attached_and_consistent(self):
        m = MetricParams(1.0, 1.0, 2.0, 2.0)
        res = shoot_distance(RigidMotion(np.zeros(3), rot_y(0.7)), m, ShootingConfig(restarts=1))
        assert res.trajectory is not None
        end = res.trajectory
        gap = log_se3(RigidMotion(end.xs[-1], end.Rs[-1]))
        assert np.abs(gap[3:] - log_se3(RigidMotion(np.zeros(3), rot_y(0.7)))[3:]).max() < 1e-6


class TestEnergyOracle:
    def test_identity(self):
        assert energy_oracle_distance(RigidMotion.identity(), UNIT) < 1e-12

    def test_pure_translation(self):
        m = MetricParams(2.0, 3.0, 1.0, 1.0)
        g = RigidMotion(np.array([0.3, -0.4, 0.5]), np.eye(3))
        expected = np.sqrt(2.0 * (0.09 + 0.16) + 3.0 * 0.25)
        assert abs(energy_oracle_distance(g, m) - expected) < 0.01 * expected

    def test_matches_shooting(self, rng):
        for _ in range(3):
            c = random_algebra_vector(rng)
            c *= min(1.0, 1.2 / np.linalg.norm(c))
            m = random_metric(rng)
            g = exp_se3(c)
            d_shoot = shoot_distance(g, m, ShootingConfig(restarts=3),
                                     with_trajectory=False).distance
            d_oracle = energy_oracle_distance(g, m)
            assert abs(d_shoot - d_oracle) <= 0.01 * d_shoot

    def test_segment_validation(self):
        with pytest.raises(ValueError):
            energy_oracle_distance(RigidMotion.identity(), UNIT, segments=4)
        with pytest.raises(ValueError):
            energy_oracle_distance(RigidMotion.identity(),
                                   MetricParams(math.inf, 1.0, 1.0, 1.0, mode="SR"))
