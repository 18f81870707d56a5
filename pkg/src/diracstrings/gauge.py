"""Berry connection and curvature of the unnormalized eigenvector field.

The full connection of a branch is the complex vector field

    Atilde = i <V|grad V> / <V|V>.

Its real part is the physical gauge potential A; the imaginary part equals
grad(log <V|V>)/2, a pure gradient that carries no curvature and is reported
separately so callers can check that claim numerically instead of assuming
it.  Because every model substitutes one univariate polynomial per axis,
<V|grad V> has an exact coefficient-calculus expression; finite differences
are kept as an independent cross-check (``connection_numeric``), not as the
primary evaluation route.

Curvature is always the central-difference curl of the evaluated connection.
No closed-form curl is coded anywhere, so the monopole field mu*R/R^3 seen in
tests is a measurement, not an input.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import DegeneratePointError, OnStringError, QuadratureNodeError
from .eigen import TAU_DEG, TAU_STRING, Branch, branch_vectors
from .models import ModelSpec, field_components, field_derivatives


@dataclass(frozen=True)
class ConnectionSample:
    """Connection at one point: real part ``a``, imaginary part ``a_imag``."""

    at: np.ndarray
    a: np.ndarray
    a_imag: np.ndarray
    branch: Branch
    gauge: str = "standard"


@dataclass(frozen=True)
class MonopoleReport:
    """Result of a closed-sphere curvature flux integration."""

    center: np.ndarray
    radius: float
    charge: float
    flux: float
    branch: Branch
    quadrature_nodes: int
    tilt_retries: int
    gauge: str = "standard"


def _guard_point(rho: float, density: float, what: str) -> None:
    if rho <= TAU_DEG:
        raise DegeneratePointError(f"{what} undefined at a degeneracy (rho={rho:.3e})")
    if density <= TAU_STRING:
        raise OnStringError(f"{what} singular on a nodal line (density={density:.3e})")


def connection_field(model: ModelSpec, pts: np.ndarray, branch: Branch,
                     gauge: str = "standard") -> np.ndarray:
    """Real connection A on an array of points, shape (..., 3) in, same out.

    Uses the exact gradient of the eigenvector components; the only floating
    point error is arithmetic rounding.  No singularity guards here, callers
    screen their own sample points.
    """
    pts = np.asarray(pts, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    fx, fy, fz = field_components(model, x, y, z)
    dfx, dfy, _ = field_derivatives(model, x, y, z)
    rho = np.sqrt(fx * fx + fy * fy + fz * fz)
    if gauge == "standard":
        den = 2.0 * rho * (rho + branch.sign * fz)
        ax = fy * dfx / den
        ay = -fx * dfy / den
    elif gauge == "alternate":
        if branch is not Branch.PLUS:
            raise ValueError("alternate gauge is defined for the plus branch only")
        den = 2.0 * rho * (rho - fz)
        ax = -fy * dfx / den
        ay = fx * dfy / den
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    az = np.zeros_like(ax)
    return np.stack([ax, ay, az], axis=-1)


def _imag_field(model: ModelSpec, pts: np.ndarray, branch: Branch,
                gauge: str = "standard") -> np.ndarray:
    """Imaginary part of the full connection, grad(log <V|V>)/2."""
    pts = np.asarray(pts, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    fx, fy, fz = field_components(model, x, y, z)
    dfx, dfy, dfz = field_derivatives(model, x, y, z)
    rho = np.sqrt(fx * fx + fy * fy + fz * fz)
    sigma = branch.sign if gauge == "standard" else -1.0
    drho = (np.stack([fx * dfx, fy * dfy, fz * dfz], axis=-1)
            / rho[..., None])
    grad_fz = np.stack([np.zeros_like(fz), np.zeros_like(fz),
                        np.broadcast_to(dfz, np.shape(fz))], axis=-1)
    outer = rho + sigma * fz
    num = drho * outer[..., None] + rho[..., None] * (drho + sigma * grad_fz)
    return num / (2.0 * rho * outer)[..., None]


def connection(model: ModelSpec, at, branch: Branch,
               gauge: str = "standard") -> ConnectionSample:
    """Connection at one point with singularity guards."""
    at = np.asarray(at, dtype=float)
    _, rho, density = branch_vectors(model, at, branch, gauge)
    _guard_point(float(rho), float(density), "connection")
    a = connection_field(model, at, branch, gauge)
    a_imag = _imag_field(model, at, branch, gauge)
    return ConnectionSample(at, a, a_imag, branch, gauge)


def connection_analytic(model: ModelSpec, at, branch: Branch) -> ConnectionSample:
    """Closed-form connection of the base model.

    Upper branch:

        A      = (y, -x, 0) / (2 R (R + z))
        A_imag = (x (2R+z), y (2R+z), (R+z)^2) / (2 R^2 (R + z))

    and the lower branch is the same expression with z -> -z in the
    denominators (no overall sign flip; the curvature sign comes out of the
    derivative structure by itself).  The z component of the real part is
    identically zero.
    """
    if model.name != "base":
        raise ValueError("analytic connection is available for the base model only")
    at = np.asarray(at, dtype=float)
    x, y, z = at
    r = float(np.sqrt(x * x + y * y + z * z))
    zz = z if branch is Branch.PLUS else -z
    if r <= TAU_DEG:
        raise DegeneratePointError("analytic connection undefined at the origin")
    den = r + zz
    if den / (2.0 * r) <= TAU_STRING:
        raise OnStringError("analytic connection singular on the nodal line")
    a = np.array([y, -x, 0.0]) / (2.0 * r * den)
    sg = branch.sign
    a_imag = np.array([
        x * (2.0 * r + zz) / (2.0 * r * r * den),
        y * (2.0 * r + zz) / (2.0 * r * r * den),
        sg * den / (2.0 * r * r),
    ])
    return ConnectionSample(at, a, a_imag, branch)


def connection_numeric(model: ModelSpec, at, branch: Branch, h: float = 1e-5,
                       gauge: str = "standard") -> ConnectionSample:
    """Finite-difference connection, i<V|grad V>/<V|V> by central differences.

    Independent of the coefficient-calculus route: only eigenvector values
    enter.  Agreement is O(h^2).
    """
    if not 0 < h <= 1e-3:
        raise ValueError("step h must lie in (0, 1e-3]")
    at = np.asarray(at, dtype=float)
    v0, rho, density = branch_vectors(model, at, branch, gauge)
    _guard_point(float(rho), float(density), "connection")
    n2 = float(np.real(np.vdot(v0, v0)))
    tilde = np.empty(3, dtype=complex)
    for axis in range(3):
        step = np.zeros(3)
        step[axis] = h
        vp, _, _ = branch_vectors(model, at + step, branch, gauge)
        vm, _, _ = branch_vectors(model, at - step, branch, gauge)
        tilde[axis] = 1j * np.vdot(v0, (vp - vm) / (2.0 * h)) / n2
    return ConnectionSample(at, np.real(tilde), np.imag(tilde), branch, gauge)


def curvature(model: ModelSpec, at, branch: Branch, h: float = 2e-5,
              gauge: str = "standard") -> np.ndarray:
    """Central-difference curl of the real connection at one point.

    The default step balances the h^2 truncation bias against roundoff in
    the difference quotient; unit-scale fields stay below 1e-6 relative
    error away from strings.
    """
    at = np.asarray(at, dtype=float)
    _, rho, density = branch_vectors(model, at, branch, gauge)
    _guard_point(float(rho), float(density), "curvature")
    return _curl_field(model, at[None, :], branch, h, gauge)[0]


def _curl_field(model: ModelSpec, pts: np.ndarray, branch: Branch, h: float,
                gauge: str) -> np.ndarray:
    """Vectorized FD curl of the real connection, pts shape (n, 3)."""
    grads = []
    for axis in range(3):
        step = np.zeros(3)
        step[axis] = h
        ap = connection_field(model, pts + step, branch, gauge)
        am = connection_field(model, pts - step, branch, gauge)
        grads.append((ap - am) / (2.0 * h))
    dax, day, daz = grads  # d/dx_i of A, each (n, 3)
    return np.stack([
        day[:, 2] - daz[:, 1],
        daz[:, 0] - dax[:, 2],
        dax[:, 1] - day[:, 0],
    ], axis=-1)


def _tilted_axes(retry: int) -> np.ndarray:
    """Deterministic orthonormal frame for quadrature attempt ``retry``.

    Attempt 0 is the identity.  Later attempts tilt the polar axis through
    golden-angle increments so consecutive frames share no symmetry plane
    with axis-aligned nodal lines.
    """
    if retry == 0:
        return np.eye(3)
    golden = 2.399963229728653
    theta = 0.7227342478134157 * retry
    phi = golden * retry
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    pole = np.array([st * cp, st * sp, ct])
    seed = np.array([1.0, 0.0, 0.0])
    if abs(pole @ seed) > 0.9:
        seed = np.array([0.0, 1.0, 0.0])
    e1 = seed - (seed @ pole) * pole
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(pole, e1)
    return np.stack([e1, e2, pole], axis=-1)


def monopole_charge(model: ModelSpec, center, radius: float, branch: Branch,
                    n_theta: int = 64, n_phi: int = 128, h: float = 1e-5,
                    gauge: str = "standard", max_retries: int = 3) -> MonopoleReport:
    """Curvature flux through a sphere divided by 4 pi.

    Gauss-Legendre nodes in cos(theta) crossed with a trapezoid ring in phi.
    The polar axis never samples the poles, which already avoids the built-in
    nodal lines; if any node still lands within TAU_STRING of a string the
    whole frame is re-tilted (at most ``max_retries`` times) before failing.
    """
    center = np.asarray(center, dtype=float)
    radius = float(radius)
    if radius <= 0:
        raise ValueError("sphere radius must be positive")
    xg, wg = roots_legendre(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    ct = xg[:, None]
    st = np.sqrt(1.0 - ct * ct)
    normals = np.stack([st * np.cos(phi)[None, :],
                        st * np.sin(phi)[None, :],
                        np.broadcast_to(ct, (n_theta, n_phi))], axis=-1)
    for retry in range(max_retries + 1):
        frame = _tilted_axes(retry)
        n = normals @ frame.T
        pts = center + radius * n
        _, rho, density = branch_vectors(model, pts, branch, gauge)
        if float(np.min(density)) > TAU_STRING and float(np.min(rho)) > TAU_DEG:
            break
    else:
        raise QuadratureNodeError(
            f"quadrature nodes still touch a nodal line after {max_retries} re-tilts")
    flat = pts.reshape(-1, 3)
    b = _curl_field(model, flat, branch, h, gauge).reshape(n_theta, n_phi, 3)
    integrand = np.sum(b * n, axis=-1)
    flux = radius * radius * float(np.sum(wg[:, None] * integrand) * (2.0 * np.pi / n_phi))
    return MonopoleReport(center, radius, flux / (4.0 * np.pi), flux, branch,
                          n_theta * n_phi, retry, gauge)
