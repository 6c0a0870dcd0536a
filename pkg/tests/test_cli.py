import json
import math

import numpy as np
import pytest

from se3geo.cli import main
from se3geo.metrics import MetricParams
from se3geo.sampling import random_algebra_vector
from se3geo.se3 import RigidMotion, rot_y
from se3geo.serialize import (atomic_write, metric_from_dict, metric_to_dict,
                              parse_group_element, shooting_config_from_dict)

G1 = "0,0,2,1.3744467859455345,1.3744467859455345,0"


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr().out
    return rc, out


class TestSerialization:
    def test_metric_roundtrip_inf(self):
        m = MetricParams(math.inf, 1.0, 2.0, 3.0, mode="SR")
        d = metric_to_dict(m)
        assert d["g11"] == "inf"
        back = metric_from_dict(json.loads(json.dumps(d)))
        assert back == m

    def test_shooting_config_defaults(self):
        cfg = shooting_config_from_dict({"tol": 1e-6})
        assert cfg.tol == 1e-6 and cfg.restarts == 8 and cfg.steps == 1000
        assert cfg.max_rho == 3.0

    def test_parse_group_element_forms(self):
        g = parse_group_element("1,2,3," + ",".join(map(str, np.eye(3).ravel())))
        assert np.allclose(g.x, [1, 2, 3])
        g2 = parse_group_element("exp:0,0,1,0,0,0")
        assert np.allclose(g2.x, [0, 0, 1])
        with pytest.raises(ValueError):
            parse_group_element("1,2,3")
        with pytest.raises(ValueError):
            parse_group_element("exp:1,2")

    def test_atomic_write_replaces(self, tmp_path):
        target = tmp_path / "x.csv"
        atomic_write(target, "one\n")
        atomic_write(target, "two\n")
        assert target.read_text() == "two\n"
        assert list(tmp_path.iterdir()) == [target]


class TestLogExp:
    def test_log_of_identity_is_zero(self, capsys):
        rc, out = run(capsys, "log", "0,0,0,1,0,0,0,1,0,0,0,1")
        assert rc == 0
        assert np.abs(np.array(json.loads(out))).max() == 0.0

    def test_exp_log_pipeline_roundtrip(self, capsys, rng):
        for _ in range(20):
            c = random_algebra_vector(rng)
            rc, out = run(capsys, "exp", ",".join(f"{v:.17g}" for v in c))
            assert rc == 0
            flat = json.loads(out)
            rc, out = run(capsys, "log", ",".join(f"{v:.17g}" for v in flat))
            assert rc == 0
            assert np.abs(np.array(json.loads(out)) - c).max() < 1e-10

    def test_figure_element_roundtrips(self, capsys):
        rc, out = run(capsys, "exp", G1)
        assert rc == 0
        rc, out = run(capsys, "log", ",".join(f"{v:.17g}" for v in json.loads(out)))
        assert rc == 0
        c = np.array(json.loads(out))
        assert abs(c[2] - 2.0) < 1e-10 and abs(c[3] - 7 * np.pi / 16) < 1e-10

    def test_parse_error_exit_code(self, capsys):
        rc, _ = run(capsys, "log", "not,a,number")
        assert rc == 2

    def test_cut_locus_exit_code(self, capsys):
        flat = RigidMotion(np.zeros(3), rot_y(np.pi)).to_flat()
        rc, _ = run(capsys, "log", ",".join(f"{v:.17g}" for v in flat))
        assert rc == 3


class TestGeodesic:
    def test_zero_momentum_constant_trajectory(self, capsys, tmp_path):
        rc, _ = run(capsys, "geodesic", "0,0,0,0,0,0", "--steps", "5",
                    "--out", str(tmp_path))
        assert rc == 0
        lines = (tmp_path / "geodesic.csv").read_text().splitlines()
        rows = [l for l in lines if not l.startswith(("t,", "#"))]
        assert len(rows) == 6
        first = rows[0].split(",")[1:]
        assert all(r.split(",")[1:] == first for r in rows)

    def test_diagnostics_footer(self, capsys, tmp_path):
        rc, _ = run(capsys, "geodesic", "0.3,-0.2,0.5,0.4,0.3,-0.25",
                    "--out", str(tmp_path))
        assert rc == 0
        text = (tmp_path / "geodesic.csv").read_text()
        footer = {l.split("=")[0][2:]: float(l.split("=")[1])
                  for l in text.splitlines() if l.startswith("#")}
        assert footer["lam6_drift"] <= 1e-8
        assert footer["ham_drift"] <= 1e-8

    def test_sr_velocities_stay_in_distribution(self, capsys, tmp_path):
        metric = json.dumps({"g11": "inf", "g33": 1.0, "g44": 1.0, "g66": 1.0, "mode": "SR"})
        rc, _ = run(capsys, "geodesic", "0.5,0.4,0.3,0.2,0.1,0.7",
                    "--metric", metric, "--steps", "50", "--out", str(tmp_path))
        assert rc == 0
        lines = [l for l in (tmp_path / "geodesic.csv").read_text().splitlines()
                 if not l.startswith(("t,", "#"))]
        cols = np.array([[float(v) for v in l.split(",")] for l in lines])
        u = cols[:, 19:25]
        assert np.abs(u[:, [0, 1, 5]]).max() == 0.0
        assert np.abs(u[:, 2]).max() > 0.0

    def test_integration_exit_code(self, capsys):
        rc, _ = run(capsys, "geodesic", "5,-5,5,5,-5,5", "--steps", "2",
                    "--metric", json.dumps({"g11": 1, "g33": 1, "g44": 0.05, "g66": 1, "mode": "R"}))
        assert rc == 4


class TestDistance:
    def test_known_rotation_distance(self, capsys):
        metric = json.dumps({"g11": 1.0, "g33": 1.0, "g44": 2.0, "g66": 2.0, "mode": "R"})
        flat = RigidMotion(np.zeros(3), rot_y(0.9)).to_flat()
        rc, out = run(capsys, "distance", ",".join(f"{v:.17g}" for v in flat),
                      "--metric", metric, "--shooting", json.dumps({"restarts": 2}))
        assert rc == 0
        payload = json.loads(out)
        assert abs(payload["distance"] - np.sqrt(2.0) * 0.9) < 1e-6
        assert payload["converged"] and payload["endpointError"] <= 1e-8

    def test_out_of_reach_is_parse_free_error(self, capsys):
        rc, _ = run(capsys, "distance", "9,0,0,1,0,0,0,1,0,0,0,1")
        assert rc == 2  # reach precondition violates ValueError contract


class TestSections:
    def test_north_pole(self, capsys):
        rc, out = run(capsys, "sections", "0,0,0,0,0,1")
        assert rc == 0
        payload = json.loads(out)
        assert payload["rhoAtSigma"] == 0.0
        assert payload["errorG"] <= 1e-12
        assert payload["distAtSigmaD"] <= 1e-7
        assert payload["chainOk"]

    def test_sphere_equalities(self, capsys):
        metric = json.dumps({"g11": 1.0, "g33": 1.0, "g44": 1.5, "g66": 1.5, "mode": "R"})
        n = [np.sin(0.8), 0.0, np.cos(0.8)]
        rc, out = run(capsys, "sections", f"0,0,0,{n[0]},{n[1]},{n[2]}", "--metric", metric)
        assert rc == 0
        payload = json.loads(out)
        assert abs(payload["rhoAtSigma"] - payload["rhoAtSigmaRho"]) <= 1e-9
        assert abs(payload["rhoAtSigmaRho"] - payload["distAtSigmaD"]) <= 1e-6

    def test_no_convergence_reports_partial(self, capsys):
        shooting = json.dumps({"tol": 1e-15, "restarts": 0})
        rc, out = run(capsys, "sections", "0.3,0.1,0.2,0.6,0,0.8", "--shooting", shooting)
        assert rc == 5
        payload = json.loads(out)
        assert payload["sigmaD"] is None and payload["distAtSigmaD"] is None
        assert payload["rhoAtSigma"] > 0.0 and payload["sigmaRho"] is not None


class TestSweep:
    def test_csv_and_summary(self, capsys, tmp_path):
        rc, out = run(capsys, "sweep", "0,0,0.5,0.71735609,0,0.69670671",
                      "--samples", "64", "--out", str(tmp_path))
        assert rc == 0
        summary = json.loads(out)
        assert "argminRho" in summary and "curvatureAtZero" in summary
        text = (tmp_path / "sweep.csv").read_text()
        assert text.startswith("# metric=")
        assert "alpha,rho,dist" in text.splitlines()[2]
        data_rows = [l for l in text.splitlines() if not l.startswith("#")][1:]
        assert len(data_rows) == 64
        assert all(r.endswith(",") for r in data_rows)  # dist column empty

    def test_determinism(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out_dir in (a, b):
            rc, _ = run(capsys, "sweep", "0.2,0.1,0.5,0.71735609,0,0.69670671",
                        "--samples", "32", "--seed", "7", "--out", str(out_dir))
            assert rc == 0
        assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


class TestVerifyCommand:
    def test_algebra_suite_passes(self, capsys):
        rc, out = run(capsys, "verify", "algebra")
        assert rc == 0
        payload = json.loads(out)
        assert payload[0]["suite"] == "algebra" and payload[0]["passed"]

    def test_reductive_suite_passes(self, capsys):
        rc, out = run(capsys, "verify", "reductive")
        assert rc == 0
        assert json.loads(out)[0]["passed"]


class TestReproduceFig2:
    def test_outputs_and_determinism(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out_dir in (a, b):
            rc, out = run(capsys, "reproduce-fig2", "--out", str(out_dir), "--seed", "3",
                          "--samples", "64")
            assert rc == 0
        for name in ("fig2_g1.csv", "fig2_g2.csv", "fig2_summary.json"):
            assert (a / name).exists()
            assert (a / name).read_bytes() == (b / name).read_bytes()
        summary = json.loads((a / "fig2_summary.json").read_text())
        assert summary["errorG_g2"] <= 1e-3
        assert "errorG_g1" in summary
