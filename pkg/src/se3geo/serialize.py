"""Wire formats: flat JSON arrays, metric/config dictionaries, CSV tables.

Numbers in CSV output are written with 17 significant digits so values
round-trip losslessly through text.  File writes go through a temp file and
an atomic rename; no command leaves a partial file behind.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np

from .flow import ShootingConfig, Trajectory
from .metrics import MetricParams
from .se3 import RigidMotion, exp_se3
from .sections import CosetPoint, FiberSweep, SectionResult


def fmt(value: float) -> str:
    return f"{value:.17g}"


def metric_to_dict(m: MetricParams) -> dict:
    return {
        "g11": "inf" if math.isinf(m.g11) else m.g11,
        "g33": m.g33,
        "g44": m.g44,
        "g66": m.g66,
        "mode": m.mode,
    }


def metric_from_dict(d: dict) -> MetricParams:
    g11 = d["g11"]
    if g11 == "inf":
        g11 = math.inf
    return MetricParams(float(g11), float(d["g33"]), float(d["g44"]), float(d["g66"]),
                        mode=d.get("mode", "R"))


def shooting_config_from_dict(d: dict) -> ShootingConfig:
    base = ShootingConfig()
    return ShootingConfig(
        tol=float(d.get("tol", base.tol)),
        restarts=int(d.get("restarts", base.restarts)),
        steps=int(d.get("steps", base.steps)),
        max_rho=float(d.get("maxRho", d.get("max_rho", base.max_rho))),
        seed=int(d.get("seed", base.seed)),
    )


def shooting_config_to_dict(cfg: ShootingConfig) -> dict:
    return {"tol": cfg.tol, "restarts": cfg.restarts, "steps": cfg.steps,
            "maxRho": cfg.max_rho, "seed": cfg.seed}


def parse_group_element(text: str) -> RigidMotion:
    """Parse "x,y,z,R11..R33" (12 numbers) or "exp:c1,...,c6"."""
    text = text.strip()
    if text.startswith("exp:"):
        values = [float(v) for v in text[4:].split(",")]
        if len(values) != 6:
            raise ValueError("exp: form needs 6 comma-separated coordinates")
        return exp_se3(np.array(values))
    values = [float(v) for v in text.split(",")]
    if len(values) != 12:
        raise ValueError("group element needs 12 comma-separated numbers "
                         "(x,y,z + row-major rotation) or the exp: form")
    return RigidMotion.from_flat(values)


def parse_algebra_vector(text: str) -> np.ndarray:
    values = [float(v) for v in text.strip().split(",")]
    if len(values) != 6:
        raise ValueError("algebra vector needs 6 comma-separated coordinates")
    return np.array(values)


def parse_coset(text: str) -> CosetPoint:
    values = [float(v) for v in text.strip().split(",")]
    if len(values) != 6:
        raise ValueError("coset needs 6 comma-separated numbers (x,y,z,n1,n2,n3)")
    return CosetPoint.from_flat(values)


def trajectory_csv(tr: Trajectory, diagnostics: Optional[dict] = None) -> str:
    """CSV with header t,x,y,z,R11..R33,lam1..lam6,u1..u6 and an optional
    diagnostics footer of comment lines."""
    header = ["t", "x", "y", "z",
              *[f"R{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)],
              *[f"lam{i}" for i in range(1, 7)],
              *[f"u{i}" for i in range(1, 7)]]
    lines = [",".join(header)]
    for i in range(len(tr)):
        row = [tr.times[i], *tr.xs[i], *tr.Rs[i].reshape(9), *tr.lams[i], *tr.us[i]]
        lines.append(",".join(fmt(v) for v in row))
    if diagnostics:
        for key, value in diagnostics.items():
            lines.append(f"# {key}={fmt(value)}")
    return "\n".join(lines) + "\n"


def sweep_csv(sweep: FiberSweep, m: MetricParams) -> str:
    """CSV with metadata comment lines then columns alpha,rho,dist (dist
    empty when not computed; failed samples are empty cells)."""
    lines = [
        f"# metric={json.dumps(metric_to_dict(m), separators=(',', ':'))}",
        f"# base={','.join(fmt(v) for v in sweep.base.to_flat())}",
        "alpha,rho,dist",
    ]
    for i, alpha in enumerate(sweep.alphas):
        rho = "" if np.isnan(sweep.rho[i]) else fmt(sweep.rho[i])
        if sweep.dist is None:
            dist = ""
        else:
            dist = "" if np.isnan(sweep.dist[i]) else fmt(sweep.dist[i])
        lines.append(f"{fmt(alpha)},{rho},{dist}")
    return "\n".join(lines) + "\n"


def sweep_to_dict(sweep: FiberSweep, m: MetricParams) -> dict:
    return {
        "metric": metric_to_dict(m),
        "base": sweep.base.to_flat(),
        "alphas": sweep.alphas.tolist(),
        "rho": [None if np.isnan(v) else v for v in sweep.rho],
        "dist": None if sweep.dist is None else
                [None if np.isnan(v) else v for v in sweep.dist],
        "argminRho": sweep.argmin_rho,
        "argminDist": sweep.argmin_dist,
        "minRho": sweep.min_rho,
        "minDist": sweep.min_dist,
        "curvatureAtZero": sweep.curvature_at_zero,
    }


def section_result_to_dict(result: SectionResult) -> dict:
    return {
        "sigma": result.sigma.to_flat(),
        "sigmaRho": result.sigma_rho.to_flat(),
        "sigmaD": None if result.sigma_d is None else result.sigma_d.to_flat(),
        "rhoAtSigma": result.rho_at_sigma,
        "rhoAtSigmaRho": result.rho_at_sigma_rho,
        "distAtSigmaD": result.dist_at_sigma_d,
        "errorG": result.error_g,
        "alphaRho": result.alpha_rho,
        "alphaDist": result.alpha_dist,
        "chainOk": result.chain_ok,
        "chainViolation": result.chain_violation,
        "lam0": None if result.lam0 is None else list(result.lam0),
    }


def atomic_write(path: Path, text: str) -> None:
    """Write text to path via a temp file in the same directory + rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
