"""Nodal-line extraction and integer charges of the eigenvector field.

A string is the zero curve of the unnormalized eigenvector norm.  The scan
thresholds the normalized density on a regular grid, groups nodal cells by
26-neighborhood connectivity, and thins each cluster to a centerline
polyline.  Interior polyline ends are candidate degeneracies and get refined
off-grid; ends on the box boundary stay open because the curve presumably
continues outside the scan volume.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .errors import RefinementError
from .eigen import TAU_DEG, TAU_STRING, Branch, branch_vectors
from .holonomy import MIN_LOOP_NODES, loop_phase_wilson
from .models import ModelSpec, field_components

# Two independently refined endpoint estimates closer than this are the same
# degeneracy.
TAU_ENDPOINT = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Regular scan box, one (min, max, step) triple per axis."""

    x: tuple[float, float, float]
    y: tuple[float, float, float]
    z: tuple[float, float, float]

    def __post_init__(self):
        # min == max collapses the axis to one plane (useful for slice maps).
        for name, (lo, hi, step) in zip("xyz", (self.x, self.y, self.z)):
            if not lo <= hi:
                raise ValueError(f"{name}: need min <= max")
            if not step > 0:
                raise ValueError(f"{name}: need step > 0")
            if lo < hi and step > hi - lo:
                raise ValueError(f"{name}: need step <= max - min")

    def coords(self):
        out = []
        for lo, hi, step in (self.x, self.y, self.z):
            n = int(round((hi - lo) / step)) + 1
            out.append(lo + step * np.arange(n))
        return tuple(out)

    @staticmethod
    def parse(text: str) -> "GridSpec":
        """Parse 'x=-1:1:0.02,y=-1:1:0.02,z=-1:1:0.02'."""
        parts = {}
        for chunk in text.split(","):
            name, _, rng = chunk.partition("=")
            name = name.strip().lower()
            if name not in ("x", "y", "z") or name in parts:
                raise ValueError(f"bad grid axis in {chunk!r}")
            pieces = rng.split(":")
            if len(pieces) != 3:
                raise ValueError(f"bad grid range in {chunk!r}, want min:max:step")
            parts[name] = tuple(float(p) for p in pieces)
        if set(parts) != {"x", "y", "z"}:
            raise ValueError("grid needs all of x=, y=, z=")
        return GridSpec(parts["x"], parts["y"], parts["z"])

    def describe(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "z": list(self.z)}


@dataclass(frozen=True)
class StringSet:
    """Extracted nodal polylines plus their interior ends.

    endpoints[i] is a terminal vertex of polylines[endpoint_polyline[i]];
    endpoint_is_degeneracy is None until classify_endpoints has refined the
    estimates.  open_termini are polyline ends on the scan boundary.
    """

    branch: Branch
    gauge: str
    grid: GridSpec
    polylines: list = field(default_factory=list)
    endpoints: np.ndarray = None
    endpoint_polyline: tuple = ()
    endpoint_is_degeneracy: tuple | None = None
    open_termini: np.ndarray = None
    endpoint_rho: tuple | None = None


def scan_nodal_set(model: ModelSpec, branch: Branch, grid: GridSpec,
                   gauge: str = "standard") -> StringSet:
    """Extract nodal polylines of one branch from a grid scan.

    A cell is nodal when its normalized density is at most TAU_STRING or its
    field magnitude is at most TAU_DEG (exact degeneracies divide 0/0 and
    must be caught separately).  Clusters are 26-connected components in
    deterministic scan order; each is thinned to one vertex per slice along
    its longest axis by averaging cell coordinates.
    """
    xs, ys, zs = grid.coords()
    fx, fy, fz = field_components(model, xs[:, None, None], ys[None, :, None],
                                  zs[None, None, :])
    fx, fy, fz = np.broadcast_arrays(fx, fy, fz)
    rho = np.sqrt(fx * fx + fy * fy + fz * fz)
    if gauge == "standard":
        num = rho + branch.sign * fz
    elif gauge == "alternate":
        if branch is not Branch.PLUS:
            raise ValueError("alternate gauge is defined for the plus branch only")
        num = rho - fz
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    safe = np.where(rho > 0.0, rho, 1.0)
    density = np.where(rho > 0.0, num / (2.0 * safe), 0.0)
    mask = (density <= TAU_STRING) | (rho <= TAU_DEG)

    labels, count = ndimage.label(mask, structure=np.ones((3, 3, 3), dtype=int))
    axes = (xs, ys, zs)
    shape = mask.shape
    polylines, endpoints, owners, opens = [], [], [], []
    for lab in range(1, count + 1):
        cells = np.argwhere(labels == lab)
        extent = cells.max(axis=0) - cells.min(axis=0)
        dom = int(np.argmax(extent))
        verts = []
        for sl in np.unique(cells[:, dom]):
            chunk = cells[cells[:, dom] == sl]
            centroid_idx = chunk.mean(axis=0)
            verts.append([np.interp(centroid_idx[a], np.arange(len(axes[a])), axes[a])
                          for a in range(3)])
        poly = np.asarray(verts)
        polylines.append(poly)
        for endv, slice_idx in ((poly[0], cells[:, dom].min()),
                                (poly[-1], cells[:, dom].max())):
            if len(poly) == 1 and len(endpoints) and np.array_equal(endpoints[-1], endv):
                continue  # single-cell cluster contributes one terminus
            if slice_idx == 0 or slice_idx == shape[dom] - 1:
                opens.append(endv)
            else:
                endpoints.append(endv)
                owners.append(len(polylines) - 1)
    return StringSet(branch, gauge, grid, polylines,
                     np.asarray(endpoints) if endpoints else np.empty((0, 3)),
                     tuple(owners), None,
                     np.asarray(opens) if opens else np.empty((0, 3)))


def _rho_squared(model: ModelSpec, p: np.ndarray) -> float:
    fx, fy, fz = field_components(model, p[0], p[1], p[2])
    return float(fx * fx + fy * fy + fz * fz)


def refine_degeneracy(model: ModelSpec, start, step: float,
                      tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Coordinate-descent minimizer of rho^2 from a grid estimate.

    Classic pattern search: probe +-h along each axis, keep improvements,
    halve h when a full sweep stalls, stop when h drops below tol.  Returns
    the refined point and rho there.
    """
    p = np.asarray(start, dtype=float).copy()
    best = _rho_squared(model, p)
    h = float(step)
    while h >= tol:
        improved = True
        while improved:
            improved = False
            for axis in range(3):
                for sign in (+1.0, -1.0):
                    trial = p.copy()
                    trial[axis] += sign * h
                    val = _rho_squared(model, trial)
                    if val < best:
                        p, best = trial, val
                        improved = True
        h *= 0.5
    return p, math.sqrt(best)


def classify_endpoints(model: ModelSpec, found: StringSet) -> StringSet:
    """Refine interior polyline ends and flag true degeneracies.

    Each endpoint estimate is polished by ``refine_degeneracy``; points whose
    refined rho is at most TAU_DEG are degeneracies.  Open termini are left
    untouched.
    """
    step = min(found.grid.x[2], found.grid.y[2], found.grid.z[2])
    refined, flags, rhos = [], [], []
    for est in found.endpoints:
        p, rho = refine_degeneracy(model, est, step)
        refined.append(p)
        rhos.append(rho)
        flags.append(rho <= TAU_DEG)
    return replace(found,
                   endpoints=np.asarray(refined) if refined else found.endpoints,
                   endpoint_is_degeneracy=tuple(flags),
                   endpoint_rho=tuple(rhos))


def string_charge(model: ModelSpec, branch: Branch, loop,
                  nodes: int | None = None, gauge: str = "standard") -> int:
    """Integer winding of the eigenvector phase around a loop.

    The Wilson phase of a loop encircling a string is 2 pi times an integer
    up to the smooth curvature contribution; the nearest integer is the
    string charge for the loop orientation as given.  Raises if the rounding
    residual is not small.
    """
    res = loop_phase_wilson(model, branch, loop, nodes=nodes, gauge=gauge)
    turns = res.value / (2.0 * math.pi)
    nearest = round(turns)
    if abs(turns - nearest) > 0.2:
        raise RefinementError(
            f"winding {turns:.4f} is not close to an integer, shrink the loop")
    return int(nearest)


def component_plane_winding(model: ModelSpec, branch: Branch, loop,
                            component: int, nodes: int | None = None,
                            gauge: str = "standard") -> int:
    """Winding number of one eigenvector component around zero.

    Tracks the argument of the chosen component (0 or 1) along the loop and
    counts accumulated turns.  The component must stay away from zero on
    every sample; step rotations past pi/2 demand more nodes.
    """
    if component not in (0, 1):
        raise ValueError("component index must be 0 or 1")
    n = nodes if nodes is not None else loop.nodes
    if n < MIN_LOOP_NODES:
        raise ValueError(f"loops need at least {MIN_LOOP_NODES} nodes")
    u = np.arange(n + 1) / n
    vecs, _, _ = branch_vectors(model, loop.point(u), branch, gauge)
    comp = vecs[:, component]
    norms = np.sqrt(np.sum(np.abs(vecs) ** 2, axis=-1))
    mag = np.abs(comp)
    if float(np.min(mag)) == 0.0 or float(np.min(mag / norms)) < 1e-12:
        from .errors import ComponentVanishesError

        raise ComponentVanishesError(
            f"component {component} vanishes on the loop")
    steps = np.angle(comp[1:] * np.conj(comp[:-1]))
    worst = float(np.max(np.abs(steps)))
    if worst >= 0.5 * math.pi:
        raise RefinementError(
            f"component rotates {worst:.3f} rad per step, increase the node count")
    turns = float(np.sum(steps)) / (2.0 * math.pi)
    nearest = round(turns)
    if abs(turns - nearest) > 0.2:
        raise RefinementError(
            f"component winding {turns:.4f} is not close to an integer")
    return int(nearest)
