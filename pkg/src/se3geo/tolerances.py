"""Global numerical tolerances, fixed in one record.

All are double-precision headroom choices; none is a model parameter.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # Above this orthonormality drift a rotation matrix is re-projected
    # onto SO(3) (polar projection); gross drift is rejected instead.
    reorthonormalize: float = 1e-10
    # Ad(H)-invariance / reductivity checks.
    ad_invariance: float = 1e-10
    # Membership of the sub-Riemannian distribution (c1 = c2 = c6 = 0).
    horizontal: float = 1e-12
    # |sin beta| below this means the fiber parametrization is degenerate.
    degenerate_fiber: float = 1e-10


TOLERANCES = Tolerances()
