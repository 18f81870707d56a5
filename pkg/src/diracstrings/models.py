"""Two-mode Hamiltonian families built from per-axis polynomial substitutions.

A model replaces the Cartesian components of the control field by univariate
polynomials, one per axis: ``f = (fx(x), fy(y), fz(z))``.  The resulting
traceless Hermitian matrix is

    H(r) = [[ fz,        fx - i fy ],
            [ fx + i fy, -fz       ]]

so eigenvalues come in a symmetric pair and every common zero of the three
polynomials is a spectral degeneracy.  Three named families ship here; custom
coefficient sets are accepted but marked unvalidated.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ParamPoint = tuple[float, float, float]


@dataclass(frozen=True)
class Poly1D:
    """Real univariate polynomial, coefficients in ascending order."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def __call__(self, t):
        # Horner, works for scalars and arrays alike.
        acc = np.zeros_like(np.asarray(t, dtype=float))
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "Poly1D":
        if len(self.coeffs) == 1:
            return Poly1D((0.0,))
        return Poly1D(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    @staticmethod
    def from_roots(roots) -> "Poly1D":
        from numpy.polynomial import polynomial as P

        return Poly1D(tuple(P.polyfromroots(roots)))


@dataclass(frozen=True)
class ModelSpec:
    """A named substitution triple plus the parameters that built it."""

    name: str
    fx: Poly1D
    fy: Poly1D
    fz: Poly1D
    params: dict = field(default_factory=dict)
    validated: bool = False

    def describe(self) -> dict:
        """Echo block used by the CLI envelope."""
        return {
            "name": self.name,
            "params": dict(self.params),
            "validated": self.validated,
            "fx": list(self.fx.coeffs),
            "fy": list(self.fy.coeffs),
            "fz": list(self.fz.coeffs),
        }


_IDENT = Poly1D((0.0, 1.0))


def base_model() -> ModelSpec:
    """Identity substitution, one degeneracy at the origin."""
    return ModelSpec("base", _IDENT, _IDENT, _IDENT, {}, validated=True)


def z_quadratic_model(z0: float = 0.5) -> ModelSpec:
    """fz -> z^2 - z0^2, degeneracies at (0, 0, +-z0).  Requires z0 > 0."""
    z0 = float(z0)
    if not z0 > 0:
        raise ValueError("z-quadratic model needs z0 > 0")
    fz = Poly1D((-z0 * z0, 0.0, 1.0))
    return ModelSpec("z-quadratic", _IDENT, _IDENT, fz, {"Z0": z0}, validated=True)


def x_cubic_model(x1: float = -0.5, x2: float = 0.2, x3: float = 0.8) -> ModelSpec:
    """fx -> (x-x1)(x-x2)(x-x3), degeneracies at the roots.  x1 < x2 < x3."""
    x1, x2, x3 = float(x1), float(x2), float(x3)
    if not (x1 < x2 < x3):
        raise ValueError("x-cubic model needs x1 < x2 < x3")
    fx = Poly1D.from_roots([x1, x2, x3])
    return ModelSpec(
        "x-cubic", fx, _IDENT, _IDENT, {"X1": x1, "X2": x2, "X3": x3}, validated=True
    )


def custom_model(fx, fy, fz, name: str = "custom") -> ModelSpec:
    """Arbitrary coefficient triple.  Not covered by the validated suites."""
    return ModelSpec(name, Poly1D(tuple(fx)), Poly1D(tuple(fy)), Poly1D(tuple(fz)),
                     {"fx": tuple(fx), "fy": tuple(fy), "fz": tuple(fz)},
                     validated=False)


_BUILTINS = {
    "base": (base_model, ()),
    "z-quadratic": (z_quadratic_model, ("Z0",)),
    "x-cubic": (x_cubic_model, ("X1", "X2", "X3")),
}


def make_model(name: str, params: dict | None = None) -> ModelSpec:
    """Build a model by CLI name, applying optional keyword overrides."""
    if name not in _BUILTINS:
        raise ValueError(f"unknown model {name!r}, expected one of {sorted(_BUILTINS)}")
    factory, keys = _BUILTINS[name]
    params = dict(params or {})
    unknown = set(params) - set(keys)
    if unknown:
        raise ValueError(f"model {name!r} does not take parameters {sorted(unknown)}")
    return factory(**{k.lower(): v for k, v in params.items()})


def field_components(model: ModelSpec, x, y, z):
    """Vectorized (fx, fy, fz) for coordinate arrays of any common shape."""
    return model.fx(x), model.fy(y), model.fz(z)


def field_vector(model: ModelSpec, at) -> np.ndarray:
    """Substituted field (fx, fy, fz) at one parameter point."""
    x, y, z = np.asarray(at, dtype=float)
    return np.array([model.fx(x), model.fy(y), model.fz(z)], dtype=float)


def field_derivatives(model: ModelSpec, x, y, z):
    """Vectorized (fx'(x), fy'(y), fz'(z)), exact coefficient calculus."""
    return (model.fx.derivative()(x),
            model.fy.derivative()(y),
            model.fz.derivative()(z))


def evaluate(model: ModelSpec, at) -> np.ndarray:
    """Hermitian 2x2 matrix of the model at a parameter point.

    The entries are assembled from one evaluation of each polynomial, so
    Hermiticity and zero trace hold exactly in floating point.
    """
    fx, fy, fz = field_vector(model, at)
    return np.array([[fz + 0j, fx - 1j * fy],
                     [fx + 1j * fy, -fz + 0j]])
