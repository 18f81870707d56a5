"""Domain-error hierarchy shared by the numerical modules.

Every error carries a short machine-readable ``code`` so the command line
layer can map failures onto its exit-code contract (domain errors exit 3,
usage errors exit 2).
"""
from __future__ import annotations


class DomainError(Exception):
    """A request that is syntactically fine but numerically out of domain."""

    code = "domain_error"


class DegeneratePointError(DomainError):
    """Evaluation at an exact spectral degeneracy (field magnitude zero)."""

    code = "degenerate_point"


class OnStringError(DomainError):
    """Evaluation on (or numerically indistinguishable from) a nodal line."""

    code = "on_string"


class LoopTouchesStringError(DomainError):
    """A loop or path sample sits on a nodal line or degeneracy."""

    code = "loop_touches_string"


class GapClosureError(DomainError):
    """An adiabatic sweep passes too close to a spectral degeneracy."""

    code = "gap_closure"


class RefinementError(DomainError):
    """Discretization too coarse, a per-step phase increment is unsafe."""

    code = "refine_discretization"


class QuadratureNodeError(DomainError):
    """Sphere quadrature could not be kept clear of nodal lines."""

    code = "node_on_string"


class ComponentVanishesError(DomainError):
    """A selected eigenvector component vanishes somewhere on the loop."""

    code = "component_vanishes"
