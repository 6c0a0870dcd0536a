"""Typed errors shared across the library.

Each error maps to a CLI exit code in :mod:`se3geo.cli`.
"""


class GeometryError(Exception):
    """Base class for all library-specific errors."""


class AngleAtCutLocus(GeometryError):
    """Rotation angle equals pi (within margin): the group logarithm has no
    preferred branch there and is rejected."""


class NotHorizontal(GeometryError):
    """A sub-Riemannian norm was requested for a vector outside the
    horizontal distribution span{A3, A4, A5}."""


class NotLegal(GeometryError):
    """An inner product failed the Ad(H)-invariance check."""


class DegenerateFiber(GeometryError):
    """Orientation is (anti)parallel to the reference axis: the canonical
    section's angles are ill-defined."""


class AllAtCutLocus(GeometryError):
    """Every sampled fiber element sits at the rotational cut locus."""


class StepCountTooSmall(GeometryError):
    """Integration produced more Hamiltonian drift than allowed; rerun with
    more steps."""


class NoConvergence(GeometryError):
    """An iterative solver did not reach its tolerance."""
