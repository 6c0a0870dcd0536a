"""Command-line harness.

Subcommands: log, exp, geodesic, distance, sections, sweep, verify,
reproduce-fig2.  Exit codes: 0 ok, 1 verification failure, 2 parse error,
3 rotational cut locus, 4 integration step count too small, 5 solver
non-convergence.  All outputs are deterministic for a fixed --seed, and
files are written atomically.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (AllAtCutLocus, AngleAtCutLocus, DegenerateFiber, NoConvergence,
                     NotHorizontal, NotLegal, StepCountTooSmall)
from .flow import PhaseState, ShootingConfig, integrate, momentum_diagnostics, shoot_distance
from .metrics import MetricParams
from .se3 import RigidMotion, exp_se3, log_se3
from .sections import compute_sections, fiber_sweep
from .serialize import (atomic_write, metric_from_dict, parse_algebra_vector,
                        parse_coset, parse_group_element, section_result_to_dict,
                        shooting_config_from_dict, sweep_csv, sweep_to_dict,
                        trajectory_csv)
from .verify import FIG_BOTTOM_COORDS, FIG_BOTTOM_METRIC, FIG_TOP_COORDS, FIG_TOP_METRIC, run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_CUT_LOCUS = 3
EXIT_INTEGRATION = 4
EXIT_NO_CONVERGENCE = 5


@dataclass(frozen=True)
class RunConfig:
    """One command invocation's resolved settings; a fixed seed makes every
    file output byte-identical across runs."""

    metric: MetricParams
    shooting: ShootingConfig
    sweep_samples: int
    output_dir: Optional[Path]
    seed: int


def _run_config(args, samples: int = 256) -> RunConfig:
    return RunConfig(
        metric=_parse_metric(args.metric),
        shooting=_parse_shooting(args.shooting, args.seed),
        sweep_samples=getattr(args, "samples", samples),
        output_dir=Path(args.out) if args.out else None,
        seed=args.seed,
    )


def _parse_metric(text: str | None) -> MetricParams:
    if text is None:
        return MetricParams(1.0, 1.0, 1.0, 1.0)
    path = Path(text)
    if path.suffix == ".json" or path.exists():
        text = path.read_text()
    return metric_from_dict(json.loads(text))


def _parse_shooting(text: str | None, seed: int) -> ShootingConfig:
    cfg = shooting_config_from_dict(json.loads(text)) if text else ShootingConfig(seed=seed)
    return cfg


def _emit(args, name: str, text: str) -> None:
    if args.out:
        atomic_write(Path(args.out) / name, text)
    else:
        sys.stdout.write(text)


def cmd_log(args) -> int:
    g = parse_group_element(args.element)
    print(json.dumps(list(log_se3(g))))
    return EXIT_OK


def cmd_exp(args) -> int:
    c = parse_algebra_vector(args.coordinates)
    print(json.dumps(exp_se3(c).to_flat()))
    return EXIT_OK


def cmd_geodesic(args) -> int:
    m = _parse_metric(args.metric)
    lam0 = parse_algebra_vector(args.lam0)
    tr = integrate(PhaseState(RigidMotion.identity(), lam0), m, args.T, args.steps)
    diag = momentum_diagnostics(tr)
    footer = {"lam6_drift": diag.max_lam6_drift, "ham_drift": diag.max_ham_drift,
              "u6_drift": diag.max_u6_drift}
    if args.format == "json":
        payload = {"t": tr.times.tolist(), "x": tr.xs.tolist(), "R": tr.Rs.reshape(len(tr), 9).tolist(),
                   "lam": tr.lams.tolist(), "u": tr.us.tolist(), "diagnostics": footer}
        _emit(args, "geodesic.json", json.dumps(payload) + "\n")
    else:
        _emit(args, "geodesic.csv", trajectory_csv(tr, footer))
    return EXIT_OK


def cmd_distance(args) -> int:
    m = _parse_metric(args.metric)
    cfg = _parse_shooting(args.shooting, args.seed)
    target = parse_group_element(args.element)
    result = shoot_distance(target, m, cfg, with_trajectory=False)
    print(json.dumps({
        "distance": result.distance,
        "lam0": list(result.lam0),
        "endpointError": result.endpoint_error,
        "converged": result.converged,
        "startsUsed": result.starts_used,
    }))
    return EXIT_OK


def cmd_sections(args) -> int:
    m = _parse_metric(args.metric)
    cfg = _parse_shooting(args.shooting, args.seed)
    p = parse_coset(args.coset)
    code = EXIT_OK
    try:
        result = compute_sections(p, m, cfg)
    except NoConvergence:
        result = compute_sections(p, m, cfg, with_distance=False)
        code = EXIT_NO_CONVERGENCE
    print(json.dumps(section_result_to_dict(result)))
    return code


def cmd_sweep(args) -> int:
    run = _run_config(args)
    m, cfg = run.metric, run.shooting
    p = parse_coset(args.coset)
    sweep = fiber_sweep(p, m, nsamples=run.sweep_samples, with_dist=args.with_dist, cfg=cfg)
    if args.format == "json":
        _emit(args, "sweep.json", json.dumps(sweep_to_dict(sweep, m)) + "\n")
    else:
        _emit(args, "sweep.csv", sweep_csv(sweep, m))
    summary = {"argminRho": sweep.argmin_rho, "minRho": sweep.min_rho,
               "argminDist": sweep.argmin_dist, "minDist": sweep.min_dist,
               "curvatureAtZero": sweep.curvature_at_zero}
    print(json.dumps(summary))
    all_failed = bool(np.all(np.isnan(sweep.rho)))
    return EXIT_VERIFY_FAILED if all_failed else EXIT_OK


def cmd_verify(args) -> int:
    reports = run_suite(args.suite, seed=args.seed)
    payload = [r.to_dict() for r in reports]
    print(json.dumps(payload, indent=2))
    if args.out:
        atomic_write(Path(args.out) / "verify.json", json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY_FAILED


def cmd_reproduce_fig2(args) -> int:
    run = _run_config(args)
    out = run.output_dir if run.output_dir else Path.cwd()
    summary = {}
    for tag, coords, metric in (("g1", FIG_TOP_COORDS, FIG_TOP_METRIC),
                                ("g2", FIG_BOTTOM_COORDS, FIG_BOTTOM_METRIC)):
        from .sections import lognorm_error, project
        p = project(exp_se3(coords))
        sweep = fiber_sweep(p, metric, nsamples=run.sweep_samples,
                            cfg=ShootingConfig(seed=run.seed))
        atomic_write(out / f"fig2_{tag}.csv", sweep_csv(sweep, metric))
        error = lognorm_error(p, metric)
        summary[f"errorG_{tag}"] = error
        summary[f"argminAlpha_{tag}"] = sweep.argmin_rho
        summary[f"rhoAtSigma_{tag}"] = float(sweep.rho[len(sweep.alphas) // 2])
    atomic_write(out / "fig2_summary.json", json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="se3geo", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--metric", help="metric JSON string or path to a JSON file")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--out", help="output directory (default: stdout/cwd)")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="tabular output format")
    common.add_argument("--shooting", help="shooting config JSON "
                        '(e.g. {"tol":1e-8,"restarts":8,"steps":1000,"maxRho":3.0,"seed":0})')
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("log", parents=[common], help="group logarithm of an element")
    p.add_argument("element", help='"x,y,z,R11..R33" (12 numbers) or "exp:c1..c6"')
    p.set_defaults(fn=cmd_log)

    p = sub.add_parser("exp", parents=[common], help="group exponential of coordinates")
    p.add_argument("coordinates", help="c1,c2,c3,c4,c5,c6")
    p.set_defaults(fn=cmd_exp)

    p = sub.add_parser("geodesic", parents=[common], help="integrate the geodesic flow")
    p.add_argument("lam0", help="initial momentum lam1..lam6")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=1000)
    p.set_defaults(fn=cmd_geodesic)

    p = sub.add_parser("distance", parents=[common], help="geodesic distance to an element")
    p.add_argument("element", help='target element ("12 numbers" or "exp:c1..c6")')
    p.set_defaults(fn=cmd_distance)

    p = sub.add_parser("sections", parents=[common], help="all three sections of a coset")
    p.add_argument("coset", help="x,y,z,n1,n2,n3")
    p.set_defaults(fn=cmd_sections)

    p = sub.add_parser("sweep", parents=[common], help="fiber profile sweep of a coset")
    p.add_argument("coset", help="x,y,z,n1,n2,n3")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--with-dist", action="store_true", dest="with_dist",
                   help="also sweep the exact geodesic distance")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=("algebra", "conservation", "horizontality",
                                     "reductive", "sections", "error-convergence", "all"))
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("reproduce-fig2", parents=[common],
                       help="run both figure configurations and emit sweeps + summary")
    p.add_argument("--samples", type=int, default=256)
    p.set_defaults(fn=cmd_reproduce_fig2)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    # Comma-separated payloads may start with a minus sign; pad them so
    # argparse does not mistake them for options (parsers strip whitespace).
    argv = [" " + a if a.startswith("-") and "," in a else a for a in argv]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (AngleAtCutLocus, AllAtCutLocus) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CUT_LOCUS
    except StepCountTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (NotHorizontal, NotLegal, DegenerateFiber) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
