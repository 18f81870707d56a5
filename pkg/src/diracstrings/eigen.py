"""Closed-form eigensystem of the two-mode Hamiltonian.

The eigenvectors are kept deliberately unnormalized,

    V(+|-) = (fz +- rho, fx + i fy),      rho = |f|,

because their squared norm 2 rho (rho +- fz) is the object of interest: its
zero set is a curve in parameter space (the nodal line, or string) and
normalizing would erase it.  ``normalized_density`` rescales the squared norm
by its maximum 4 rho^2 so thresholds are dimensionless.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePointError
from .models import ModelSpec, field_components

# Dimensionless threshold on normalized density below which a point is
# treated as sitting on a string.
TAU_STRING = 1e-6
# Absolute threshold on rho below which a point counts as a degeneracy.
TAU_DEG = 1e-8


class Branch(enum.Enum):
    """Upper (+rho) or lower (-rho) energy branch."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> float:
        return 1.0 if self is Branch.PLUS else -1.0

    @staticmethod
    def parse(text: str) -> "Branch":
        try:
            return Branch(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown branch {text!r}, expected 'plus' or 'minus'") from None


@dataclass(frozen=True)
class EigenPair:
    """One energy branch at one parameter point.

    vector is the unnormalized eigenvector; on_string flags a normalized
    density at or below TAU_STRING; degenerate flags rho == 0 exactly, where
    both vectors vanish identically and the branch label is kept only as a
    bookkeeping tag.
    """

    branch: Branch
    energy: float
    vector: np.ndarray
    rho: float
    on_string: bool
    degenerate: bool = False
    gauge: str = "standard"


def _pair(branch: Branch, fx: float, fy: float, fz: float, rho: float) -> EigenPair:
    s = branch.sign
    vec = np.array([fz + s * rho, fx + 1j * fy])
    if rho == 0.0:
        return EigenPair(branch, 0.0, vec, 0.0, True, degenerate=True)
    density = (rho + s * fz) / (2.0 * rho)
    return EigenPair(branch, s * rho, vec, rho, density <= TAU_STRING)


def eigensystem(model: ModelSpec, at) -> tuple[EigenPair, EigenPair]:
    """Both branches at a parameter point, upper branch first."""
    x, y, z = np.asarray(at, dtype=float)
    fx, fy, fz = model.fx(x), model.fy(y), model.fz(z)
    rho = float(np.sqrt(fx * fx + fy * fy + fz * fz))
    return _pair(Branch.PLUS, fx, fy, fz, rho), _pair(Branch.MINUS, fx, fy, fz, rho)


def branch_pair(model: ModelSpec, at, branch: Branch) -> EigenPair:
    """Single requested branch at a parameter point."""
    plus, minus = eigensystem(model, at)
    return plus if branch is Branch.PLUS else minus


def normalized_density(pair: EigenPair) -> float:
    """Squared vector norm over its ceiling 4 rho^2, in [0, 1].

    Raises DegeneratePointError at rho == 0 where the ratio is undefined.
    """
    if pair.rho == 0.0:
        raise DegeneratePointError("normalized density undefined at a degeneracy")
    n2 = float(np.real(np.vdot(pair.vector, pair.vector)))
    return n2 / (4.0 * pair.rho * pair.rho)


def gauge_alternate(pair: EigenPair) -> EigenPair:
    """Alternate gauge form of an upper-branch pair.

    Rewrites the eigenvector as (fx - i fy, rho - fz), which moves the nodal
    line to the opposite half axis.  Only the upper branch ships with an
    alternate form.
    """
    if pair.branch is not Branch.PLUS:
        raise ValueError("alternate gauge is defined for the plus branch only")
    fzp, cxy = pair.vector[0], pair.vector[1]
    rho = pair.rho
    fz = float(np.real(fzp)) - rho
    vec = np.array([np.conj(cxy), rho - fz])
    if rho == 0.0:
        return EigenPair(pair.branch, 0.0, vec, 0.0, True, degenerate=True, gauge="alternate")
    density = (rho - fz) / (2.0 * rho)
    return EigenPair(pair.branch, pair.energy, vec, rho, density <= TAU_STRING,
                     gauge="alternate")


def branch_vectors(model: ModelSpec, pts: np.ndarray, branch: Branch,
                   gauge: str = "standard"):
    """Vectorized eigenvector field along an array of points.

    Parameters
    ----------
    pts : array, shape (..., 3)
    branch : Branch
    gauge : "standard" for (fz + s rho, fx + i fy), "alternate" for the
        plus-branch form (fx - i fy, rho - fz).

    Returns
    -------
    vecs : complex array, shape (..., 2)
    rho : float array, shape (...)
    density : float array, shape (...), normalized density of the requested
        gauge form, defined as 0 where rho == 0.
    """
    pts = np.asarray(pts, dtype=float)
    fx, fy, fz = field_components(model, pts[..., 0], pts[..., 1], pts[..., 2])
    fx, fy, fz = np.broadcast_arrays(fx, fy, fz)
    rho = np.sqrt(fx * fx + fy * fy + fz * fz)
    if gauge == "standard":
        vecs = np.stack([fz + branch.sign * rho, fx + 1j * fy], axis=-1)
        num = rho + branch.sign * fz
    elif gauge == "alternate":
        if branch is not Branch.PLUS:
            raise ValueError("alternate gauge is defined for the plus branch only")
        vecs = np.stack([fx - 1j * fy, rho - fz], axis=-1)
        num = rho - fz
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    safe = np.where(rho > 0.0, rho, 1.0)
    density = np.where(rho > 0.0, num / (2.0 * safe), 0.0)
    return vecs, rho, density
