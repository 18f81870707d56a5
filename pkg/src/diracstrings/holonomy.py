"""Geometric phase of closed circuits and open paths.

Three routes to the same number:

* adaptive line integral of the real connection along the curve,
* discrete Wilson accumulation of eigenvector overlap phases,
* a flux prediction, monopole charge times the solid angle of a spherical
  cap plus 2 pi per nodal line threading the cap.

The first two work for any model and loop; the flux route is the base-model
bookkeeping identity and is what makes phases differing by multiples of
2 pi meaningful.  Values are reported unwrapped together with the principal
representative in (-pi, pi].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import LoopTouchesStringError, RefinementError
from .eigen import TAU_DEG, TAU_STRING, Branch, branch_vectors
from .models import ModelSpec
from .gauge import connection_field

MIN_LOOP_NODES = 64
# Unwrapped step phases above this fraction of pi abort instead of aliasing.
_STEP_PHASE_LIMIT = 0.5 * math.pi


def principal_value(value: float) -> float:
    """Reduce an unwrapped phase to its representative in (-pi, pi]."""
    p = math.remainder(value, 2.0 * math.pi)
    if p <= -math.pi:
        p += 2.0 * math.pi
    return p


@dataclass(frozen=True)
class PhaseResult:
    """Unwrapped phase, principal representative, and how it was obtained."""

    value: float
    method: str
    metadata: dict = field(default_factory=dict)

    @property
    def principal(self) -> float:
        return principal_value(self.value)


class CircleZ:
    """Horizontal circle at height z, positive orientation seen from +z."""

    def __init__(self, z: float, radius: float, center_xy=(0.0, 0.0),
                 orientation: int = +1, nodes: int = 4096):
        if radius <= 0:
            raise ValueError("circle radius must be positive")
        if orientation not in (+1, -1):
            raise ValueError("orientation must be +1 (ccw from +z) or -1")
        if nodes < MIN_LOOP_NODES:
            raise ValueError(f"loops need at least {MIN_LOOP_NODES} nodes")
        self.z = float(z)
        self.radius = float(radius)
        self.center_xy = (float(center_xy[0]), float(center_xy[1]))
        self.orientation = orientation
        self.nodes = nodes

    @staticmethod
    def on_sphere(z: float, sphere_radius: float = 1.0, center=(0.0, 0.0, 0.0),
                  orientation: int = +1, nodes: int = 4096) -> "CircleZ":
        """Circle cut from a sphere by the plane of constant z."""
        dz = z - center[2]
        if abs(dz) >= sphere_radius:
            raise ValueError("plane does not intersect the sphere")
        r = math.sqrt(sphere_radius * sphere_radius - dz * dz)
        return CircleZ(z, r, (center[0], center[1]), orientation, nodes)

    def point(self, u):
        """Loop point for normalized parameter u in [0, 1]."""
        ang = self.orientation * 2.0 * np.pi * np.asarray(u, dtype=float)
        x = self.center_xy[0] + self.radius * np.cos(ang)
        y = self.center_xy[1] + self.radius * np.sin(ang)
        return np.stack([x, y, np.broadcast_to(self.z, np.shape(ang))], axis=-1)

    def velocity(self, u):
        ang = self.orientation * 2.0 * np.pi * np.asarray(u, dtype=float)
        w = self.orientation * 2.0 * np.pi * self.radius
        return np.stack([-w * np.sin(ang), w * np.cos(ang),
                         np.zeros_like(ang)], axis=-1)

    def describe(self) -> dict:
        return {"kind": "circle-z", "z": self.z, "radius": self.radius,
                "center_xy": list(self.center_xy),
                "orientation": self.orientation, "nodes": self.nodes}


class PolylineLoop:
    """Closed polyline through the given vertices (first vertex repeated)."""

    def __init__(self, vertices, nodes: int = 4096):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 3:
            raise ValueError("need at least three 3d vertices")
        if nodes < MIN_LOOP_NODES:
            raise ValueError(f"loops need at least {MIN_LOOP_NODES} nodes")
        self.vertices = v
        self.nodes = nodes

    def point(self, u):
        u = np.mod(np.asarray(u, dtype=float), 1.0)
        closed = np.vstack([self.vertices, self.vertices[:1]])
        nseg = len(self.vertices)
        s = u * nseg
        idx = np.minimum(s.astype(int), nseg - 1)
        frac = s - idx
        return closed[idx] + frac[..., None] * (closed[idx + 1] - closed[idx])

    def segments(self):
        closed = np.vstack([self.vertices, self.vertices[:1]])
        return [(closed[i], closed[i + 1]) for i in range(len(self.vertices))]

    def describe(self) -> dict:
        return {"kind": "polyline", "vertices": self.vertices.tolist(),
                "nodes": self.nodes}


class ParametricLoop:
    """Closed curve given by a callable of the normalized parameter."""

    def __init__(self, fn, nodes: int = 4096, velocity=None, label: str = "parametric"):
        if nodes < MIN_LOOP_NODES:
            raise ValueError(f"loops need at least {MIN_LOOP_NODES} nodes")
        self._fn = fn
        self._velocity = velocity
        self.nodes = nodes
        self.label = label

    def point(self, u):
        u = np.asarray(u, dtype=float)
        if u.ndim == 0:
            return np.asarray(self._fn(float(u)), dtype=float)
        return np.stack([np.asarray(self._fn(float(t)), dtype=float) for t in u])

    def velocity(self, u):
        if self._velocity is not None:
            u = np.asarray(u, dtype=float)
            if u.ndim == 0:
                return np.asarray(self._velocity(float(u)), dtype=float)
            return np.stack([np.asarray(self._velocity(float(t)), dtype=float) for t in u])
        h = 1e-6
        return (self.point(np.asarray(u) + h) - self.point(np.asarray(u) - h)) / (2.0 * h)

    def describe(self) -> dict:
        return {"kind": "parametric", "label": self.label, "nodes": self.nodes}


def _screen_loop(model: ModelSpec, loop, branch: Branch, gauge: str) -> None:
    """Reject loops whose node samples sit on a string or degeneracy."""
    u = np.arange(loop.nodes) / loop.nodes
    _, rho, density = branch_vectors(model, loop.point(u), branch, gauge)
    if float(np.min(rho)) <= TAU_DEG or float(np.min(density)) <= TAU_STRING:
        raise LoopTouchesStringError("loop sample touches a nodal line or degeneracy")


def loop_phase_line_integral(model: ModelSpec, branch: Branch, loop,
                             tol: float = 1e-10,
                             gauge: str = "standard") -> PhaseResult:
    """Adaptive line integral of the real connection around a closed loop."""
    _screen_loop(model, loop, branch, gauge)

    if isinstance(loop, PolylineLoop):
        total, est = 0.0, 0.0
        for a, b in loop.segments():
            v, e = _segment_integral(model, branch, a, b, tol, gauge)
            total += v
            est += abs(e)
    else:
        def integrand(u):
            p = loop.point(u)
            vel = loop.velocity(u)
            return float(connection_field(model, p, branch, gauge) @ vel)

        total, est = quad(integrand, 0.0, 1.0, epsabs=tol, epsrel=1e-12, limit=400)
    return PhaseResult(total, "line-integral",
                       {"branch": branch.value, "gauge": gauge,
                        "abs_error_estimate": est, "loop": loop.describe()})


def _segment_integral(model: ModelSpec, branch: Branch, a, b, tol, gauge):
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a

    def integrand(t):
        return float(connection_field(model, a + t * d, branch, gauge) @ d)

    return quad(integrand, 0.0, 1.0, epsabs=tol, epsrel=1e-12, limit=400)


def loop_phase_wilson(model: ModelSpec, branch: Branch, loop,
                      nodes: int | None = None,
                      gauge: str = "standard") -> PhaseResult:
    """Discrete overlap-product phase, minus the sum of step phases.

    Accumulates arg<V_k|V_k+1> without reduction, so windings around nodal
    lines are kept.  Every step phase must stay clearly below pi; steps past
    pi/2 raise instead of silently aliasing.
    """
    n = nodes if nodes is not None else loop.nodes
    if n < MIN_LOOP_NODES:
        raise ValueError(f"loops need at least {MIN_LOOP_NODES} nodes")
    u = np.arange(n + 1) / n
    pts = loop.point(u)
    vecs, rho, density = branch_vectors(model, pts, branch, gauge)
    if float(np.min(rho)) <= TAU_DEG or float(np.min(density)) <= TAU_STRING:
        raise LoopTouchesStringError("loop sample touches a nodal line or degeneracy")
    overlaps = np.sum(np.conj(vecs[:-1]) * vecs[1:], axis=-1)
    steps = np.angle(overlaps)
    worst = float(np.max(np.abs(steps)))
    if worst >= _STEP_PHASE_LIMIT:
        raise RefinementError(
            f"step phase {worst:.3f} rad is unsafe, increase the node count")
    value = -float(np.sum(steps))
    return PhaseResult(value, "wilson",
                       {"branch": branch.value, "gauge": gauge, "nodes": n,
                        "max_step_phase": worst, "loop": loop.describe()})


def loop_phase_flux(mu: float, loop: CircleZ, strings_pierced=(),
                    cap: str = "upper", center=(0.0, 0.0, 0.0)) -> PhaseResult:
    """Predicted phase from one monopole plus threaded nodal lines.

    The loop must be a horizontal circle on a sphere centered on the
    monopole.  ``cap`` picks which spherical cap spans the loop; the string
    charges in ``strings_pierced`` are counted with the right-hand rule of
    the cap normal that matches the loop orientation (outward for the upper
    cap, inward for the lower).  Consistency of the two caps is exactly the
    statement that each threaded string carries 2 pi times an integer.
    """
    center = np.asarray(center, dtype=float)
    dx = loop.center_xy[0] - center[0]
    dy = loop.center_xy[1] - center[1]
    if abs(dx) > 1e-12 or abs(dy) > 1e-12:
        raise ValueError("circle axis must pass through the monopole center")
    dz = loop.z - center[2]
    sphere_r = math.hypot(loop.radius, dz)
    omega_upper = 2.0 * math.pi * (1.0 - dz / sphere_r)
    if cap == "upper":
        base = mu * omega_upper
    elif cap == "lower":
        base = -mu * (4.0 * math.pi - omega_upper)
    else:
        raise ValueError("cap must be 'upper' or 'lower'")
    base *= loop.orientation
    value = base + 2.0 * math.pi * float(sum(strings_pierced))
    return PhaseResult(value, "flux-prediction",
                       {"mu": mu, "cap": cap, "sphere_radius": sphere_r,
                        "solid_angle_upper": omega_upper,
                        "strings_pierced": list(strings_pierced),
                        "loop": loop.describe()})


@dataclass(frozen=True)
class PathSpec:
    """Open path, either an axis-sweep protocol or an explicit polyline.

    With protocol "xyz" the path sweeps x from start to target first, then
    y, then z, one axis per straight segment.  Any permutation of "xyz" is
    accepted.  ``vertices`` overrides the protocol when given.
    """

    start: tuple
    end: tuple = None
    protocol: str = "xyz"
    vertices: tuple | None = None

    def waypoints(self) -> np.ndarray:
        if self.vertices is not None:
            pts = np.asarray(self.vertices, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
                raise ValueError("explicit path needs at least two 3d vertices")
            return pts
        if sorted(self.protocol) != ["x", "y", "z"]:
            raise ValueError("protocol must be a permutation of 'xyz'")
        cur = np.asarray(self.start, dtype=float).copy()
        target = np.asarray(self.end, dtype=float)
        pts = [cur.copy()]
        for axis_name in self.protocol:
            axis = "xyz".index(axis_name)
            cur[axis] = target[axis]
            pts.append(cur.copy())
        return np.asarray(pts)


def _line_min(fn, levels: int = 4) -> float:
    """Minimum of a smooth scalar over [0, 1] by sample-and-zoom.

    Four zoom levels resolve the argmin to ~3e-11, tight enough that a
    conical zero sitting exactly on the segment is sampled below TAU_DEG.
    """
    lo, hi, n, best = 0.0, 1.0, 257, math.inf
    for _ in range(levels):
        t = np.linspace(lo, hi, n)
        vals = fn(t)
        i = int(np.argmin(vals))
        best = min(best, float(vals[i]))
        step = (hi - lo) / (n - 1)
        lo, hi = max(lo, t[i] - step), min(hi, t[i] + step)
        n = 1025
    return best


def _screen_segment(model: ModelSpec, branch: Branch, a, b, gauge) -> None:
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a

    def rho_at(t):
        return branch_vectors(model, a + t[:, None] * d, branch, gauge)[1]

    def density_at(t):
        return branch_vectors(model, a + t[:, None] * d, branch, gauge)[2]

    if _line_min(rho_at) <= TAU_DEG or _line_min(density_at) <= TAU_STRING:
        raise LoopTouchesStringError("path crosses a nodal line or degeneracy")


def path_phase(model: ModelSpec, branch: Branch, path: PathSpec,
               tol: float = 1e-10, gauge: str = "standard") -> PhaseResult:
    """Line integral of the real connection along an open path."""
    pts = path.waypoints()
    for a, b in zip(pts[:-1], pts[1:]):
        if not np.allclose(a, b):
            _screen_segment(model, branch, a, b, gauge)
    total, est = 0.0, 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if np.allclose(a, b):
            continue
        v, e = _segment_integral(model, branch, a, b, tol, gauge)
        total += v
        est += abs(e)
    return PhaseResult(total, "line-integral",
                       {"branch": branch.value, "gauge": gauge,
                        "abs_error_estimate": est,
                        "waypoints": pts.tolist()})


def degenerate_path_phase(model: ModelSpec, side: str = "plus-y",
                          epsilons=None, x_range=(-1.0, 1.0),
                          branch: Branch = Branch.PLUS) -> PhaseResult:
    """Limit of the x-axis path phase as the path grazes the degeneracy.

    The straight path from (x0, 0, 0) to (x1, 0, 0) runs through the origin
    where the phase is undefined, but its sideways displacements y = +-eps
    have finite phases with a well-defined one-sided limit.  Each ladder
    value integrates the connection along the displaced segment; the limit
    eps -> 0+ is taken by a full Richardson table on the geometric ladder.

    side "plus-y" displaces toward +y, "minus-y" toward -y.
    """
    if side not in ("plus-y", "minus-y"):
        raise ValueError("side must be 'plus-y' or 'minus-y'")
    sign = 1.0 if side == "plus-y" else -1.0
    if epsilons is None:
        epsilons = [0.1 * 2.0 ** -k for k in range(7)]
    epsilons = [float(e) for e in epsilons]
    if len(epsilons) < 2 or any(e <= 0 for e in epsilons):
        raise ValueError("need a ladder of at least two positive epsilons")
    x0, x1 = float(x_range[0]), float(x_range[1])
    ladder = []
    for eps in epsilons:
        a = np.array([x0, sign * eps, 0.0])
        d = np.array([x1 - x0, 0.0, 0.0])

        def integrand(t):
            return float(connection_field(model, a + t * d, branch) @ d)

        # The integrand is a Lorentzian spike of width eps at the crossing;
        # hand the crossing point to the subdivision.
        tc = min(max(-x0 / (x1 - x0), 0.0), 1.0)
        v, _ = quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13,
                    limit=400, points=[tc])
        ladder.append(v)
    table = [list(ladder)]
    for j in range(1, len(ladder)):
        prev = table[-1]
        fac = 2.0 ** j - 1.0
        table.append([prev[i + 1] + (prev[i + 1] - prev[i]) / fac
                      for i in range(len(prev) - 1)])
    value = table[-1][0]
    return PhaseResult(value, "line-integral",
                       {"side": side, "branch": branch.value,
                        "epsilons": epsilons, "ladder": ladder,
                        "richardson_depth": len(ladder) - 1})


def charge_wilson_sweep(model: ModelSpec, center, radius: float, branch: Branch,
                        n_theta: int = 64, nodes: int = 512,
                        gauge: str = "standard") -> float:
    """Enclosed charge from a polar sweep of Wilson circles on a sphere.

    The Wilson phase of the constant-latitude circle, followed continuously
    from pole to pole, changes by the total curvature flux through the
    sphere; strings through the polar caps enter both ends and cancel in the
    difference.  Independent of the curvature quadrature route: only
    eigenvector overlaps are used.
    """
    center = np.asarray(center, dtype=float)
    deltas = (0.04, 0.02)
    inner = np.pi * np.arange(1, n_theta + 1) / (n_theta + 1)
    thetas = np.sort(np.concatenate([np.array(deltas), inner,
                                     np.pi - np.array(deltas)]))
    t = 2.0 * np.pi * np.arange(nodes + 1) / nodes
    cos_t, sin_t = np.cos(t), np.sin(t)
    raw = []
    for th in thetas:
        r = radius * math.sin(th)
        zj = center[2] + radius * math.cos(th)
        pts = np.stack([center[0] + r * cos_t, center[1] + r * sin_t,
                        np.full_like(t, zj)], axis=-1)
        vecs, rho, density = branch_vectors(model, pts, branch, gauge)
        if float(np.min(rho)) <= TAU_DEG or float(np.min(density)) <= TAU_STRING:
            raise LoopTouchesStringError(
                "sweep circle touches a nodal line, move the sphere")
        overlaps = np.sum(np.conj(vecs[:-1]) * vecs[1:], axis=-1)
        raw.append(-float(np.sum(np.angle(overlaps))))
    # Continuity in theta fixes the 2 pi branch of each circle.
    unwrapped = [raw[0]]
    for v in raw[1:]:
        k = round((unwrapped[-1] - v) / (2.0 * math.pi))
        unwrapped.append(v + 2.0 * math.pi * k)
    # Quadratic tail extrapolation toward both poles (cap flux is O(delta^2)).
    f_north = unwrapped[0] + (unwrapped[0] - unwrapped[1]) / 3.0
    f_south = unwrapped[-1] + (unwrapped[-1] - unwrapped[-2]) / 3.0
    return (f_south - f_north) / (4.0 * math.pi)
