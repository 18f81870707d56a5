"""Nodal lines, monopole charges, and holonomies of a two-mode Hamiltonian.

The package keeps eigenvectors unnormalized on purpose: their nodal lines
(strings) end at spectral degeneracies, and the phase collected around any
circuit decomposes into curvature flux plus 2 pi per threaded string.  Each
quantity is computable by at least two independent routes so every claim in
the test suite is a cross-check rather than a tautology.
"""
from .models import (ModelSpec, Poly1D, base_model, custom_model, evaluate,
                     field_components, field_derivatives, field_vector,
                     make_model, x_cubic_model, z_quadratic_model)
from .eigen import (TAU_DEG, TAU_STRING, Branch, EigenPair, branch_pair,
                    branch_vectors, eigensystem, gauge_alternate,
                    normalized_density)
from .gauge import (ConnectionSample, MonopoleReport, connection,
                    connection_analytic, connection_field, connection_numeric,
                    curvature, monopole_charge)
from .holonomy import (CircleZ, ParametricLoop, PathSpec, PhaseResult,
                       PolylineLoop, charge_wilson_sweep, degenerate_path_phase,
                       loop_phase_flux, loop_phase_line_integral,
                       loop_phase_wilson, path_phase, principal_value)
from .strings import (GridSpec, StringSet, classify_endpoints,
                      component_plane_winding, refine_degeneracy,
                      scan_nodal_set, string_charge)
from .adiabatic import (AdiabaticRun, ConvergenceReport, Ramp, SweepSpec,
                        convergence_report, evolve)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "AdiabaticRun", "Branch", "CircleZ", "ConnectionSample",
    "ConvergenceReport", "EigenPair", "GridSpec", "ModelSpec",
    "MonopoleReport", "ParametricLoop", "PathSpec", "PhaseResult",
    "Poly1D", "PolylineLoop", "Ramp", "StringSet", "SweepSpec",
    "TAU_DEG", "TAU_STRING", "base_model", "branch_pair", "branch_vectors",
    "charge_wilson_sweep", "classify_endpoints", "component_plane_winding",
    "connection", "connection_analytic", "connection_field",
    "connection_numeric",
    "convergence_report", "curvature", "custom_model",
    "degenerate_path_phase", "eigensystem", "errors", "evaluate", "evolve",
    "field_components", "field_derivatives", "field_vector",
    "gauge_alternate", "loop_phase_flux",
    "loop_phase_line_integral", "loop_phase_wilson", "make_model",
    "monopole_charge", "normalized_density", "path_phase", "principal_value",
    "refine_degeneracy", "scan_nodal_set", "string_charge", "x_cubic_model",
    "z_quadratic_model",
]
