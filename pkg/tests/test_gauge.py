"""Connection and curvature: three independent routes, guards, monopole flux."""
import numpy as np
import pytest

from diracstrings import (
    Branch,
    base_model,
    branch_vectors,
    connection,
    connection_analytic,
    connection_field,
    connection_numeric,
    curvature,
    monopole_charge,
    x_cubic_model,
    z_quadratic_model,
)
from diracstrings.errors import DegeneratePointError, OnStringError
from diracstrings.gauge import _imag_field, _tilted_axes

BASE = base_model()
ZQ = z_quadratic_model()
XC = x_cubic_model()


def _sample_error(s, t):
    return np.linalg.norm(s.a - t.a) + np.linalg.norm(s.a_imag - t.a_imag)


def test_connection_frozen_point():
    # hand-computable point: x=1, everything else zero
    plus = connection(BASE, (1.0, 0.0, 0.0), Branch.PLUS)
    np.testing.assert_allclose(plus.a, [0.0, -0.5, 0.0], atol=1e-14)
    np.testing.assert_allclose(plus.a_imag, [1.0, 0.0, 0.5], atol=1e-14)
    minus = connection(BASE, (1.0, 0.0, 0.0), Branch.MINUS)
    np.testing.assert_allclose(minus.a, [0.0, -0.5, 0.0], atol=1e-14)
    np.testing.assert_allclose(minus.a_imag, [1.0, 0.0, -0.5], atol=1e-14)


def test_three_routes_agree_on_base():
    rng = np.random.default_rng(7)
    kept = 0
    while kept < 30:
        p = rng.uniform(-1.5, 1.5, size=3)
        if np.linalg.norm(p) < 0.3:
            continue
        _, _, den_p = branch_vectors(BASE, p, Branch.PLUS)
        _, _, den_m = branch_vectors(BASE, p, Branch.MINUS)
        if min(float(den_p), float(den_m)) < 5e-2:
            continue
        kept += 1
        for br in (Branch.PLUS, Branch.MINUS):
            exact = connection(BASE, p, br)
            closed = connection_analytic(BASE, p, br)
            numeric = connection_numeric(BASE, p, br, h=1e-5)
            assert _sample_error(exact, closed) < 1e-8
            assert _sample_error(exact, numeric) < 1e-8


def test_analytic_route_is_base_only():
    with pytest.raises(ValueError):
        connection_analytic(ZQ, (0.3, 0.1, 0.9), Branch.PLUS)


@pytest.mark.parametrize("model", [BASE, ZQ, XC], ids=lambda m: m.name)
def test_exact_matches_numeric_everywhere(model):
    rng = np.random.default_rng(42)
    kept = 0
    while kept < 20:
        p = rng.uniform(-1.2, 1.2, size=3)
        try:
            ex_p = connection(model, p, Branch.PLUS)
            ex_m = connection(model, p, Branch.MINUS)
        except DegeneratePointError:
            continue
        except OnStringError:
            continue
        _, rho_p, den_p = branch_vectors(model, p, Branch.PLUS)
        _, rho_m, den_m = branch_vectors(model, p, Branch.MINUS)
        if min(float(den_p), float(den_m)) < 1e-2 or min(float(rho_p), float(rho_m)) < 1e-2:
            continue
        kept += 1
        for br, ex in ((Branch.PLUS, ex_p), (Branch.MINUS, ex_m)):
            num = connection_numeric(model, p, br, h=1e-5)
            scale = 1.0 + np.linalg.norm(ex.a) + np.linalg.norm(ex.a_imag)
            assert _sample_error(ex, num) / scale < 1e-8


def test_numeric_route_converges_quadratically():
    # the base model is too kind to the difference quotient (the overlap is
    # linear in the coordinates there), so probe the cubic profile instead
    pt = np.array([0.7, 0.2, -0.3])
    for br in (Branch.PLUS, Branch.MINUS):
        ex = connection(XC, pt, br)
        errs = [_sample_error(connection_numeric(XC, pt, br, h=h), ex)
                for h in (1e-3, 5e-4)]
        ratio = errs[0] / errs[1]
        assert 3.8 < ratio < 4.2


def test_numeric_step_validation():
    for bad in (0.0, -1e-5, 2e-3):
        with pytest.raises(ValueError):
            connection_numeric(BASE, (0.5, 0.5, 0.5), Branch.PLUS, h=bad)


def test_connection_field_matches_pointwise():
    rng = np.random.default_rng(13)
    pts = rng.uniform(0.3, 1.0, size=(8, 3))
    a = connection_field(BASE, pts, Branch.PLUS)
    for i, p in enumerate(pts):
        np.testing.assert_allclose(a[i], connection(BASE, p, Branch.PLUS).a,
                                   rtol=0, atol=1e-13)


def test_guards_on_string_and_degeneracy():
    with pytest.raises(OnStringError):
        connection(BASE, (0.0, 0.0, -0.5), Branch.PLUS)
    with pytest.raises(OnStringError):
        connection(BASE, (0.0, 0.0, 0.5), Branch.MINUS)
    with pytest.raises(DegeneratePointError):
        connection(BASE, (0.0, 0.0, 0.0), Branch.PLUS)
    with pytest.raises(OnStringError):
        curvature(BASE, (0.0, 0.0, -0.3), Branch.PLUS)
    with pytest.raises(DegeneratePointError):
        connection_numeric(BASE, (0.0, 0.0, 0.0), Branch.MINUS)


def test_alternate_gauge_relocates_the_singularity():
    # the lower half-axis becomes regular, the upper one blows up
    s = connection(BASE, (0.0, 0.0, -0.5), Branch.PLUS, gauge="alternate")
    np.testing.assert_allclose(s.a, [0.0, 0.0, 0.0], atol=1e-14)
    with pytest.raises(OnStringError):
        connection(BASE, (0.0, 0.0, 0.5), Branch.PLUS, gauge="alternate")


def test_alternate_gauge_frozen_values():
    s = connection(BASE, (0.3, -0.4, 0.6), Branch.PLUS, gauge="alternate")
    np.testing.assert_allclose(s.a, [1.41457702, 1.06093277, 0.0], atol=1e-6)
    np.testing.assert_allclose(s.a_imag, [1.30683441, -1.74244588, -0.14838112],
                               atol=1e-6)
    num = connection_numeric(BASE, (0.3, -0.4, 0.6), Branch.PLUS, h=1e-5,
                             gauge="alternate")
    assert _sample_error(s, num) < 1e-8


def test_curvature_is_gauge_independent():
    p = np.array([0.4, -0.7, 0.3])
    c1 = curvature(BASE, p, Branch.PLUS)
    c2 = curvature(BASE, p, Branch.PLUS, gauge="alternate")
    assert np.linalg.norm(c1 - c2) < 1e-8


def test_curvature_frozen_points():
    np.testing.assert_allclose(curvature(BASE, (0.0, 0.0, 1.0), Branch.PLUS),
                               [0.0, 0.0, -0.5], rtol=0, atol=1e-7)
    np.testing.assert_allclose(curvature(BASE, (2.0, 0.0, 0.0), Branch.PLUS),
                               [-0.125, 0.0, 0.0], rtol=0, atol=1e-7)
    np.testing.assert_allclose(curvature(BASE, (0.0, 0.0, -1.0), Branch.MINUS),
                               [0.0, 0.0, -0.5], rtol=0, atol=1e-7)


def test_curvature_is_a_radial_inverse_square_field():
    rng = np.random.default_rng(20260818)
    kept = 0
    while kept < 100:
        p = rng.uniform(-1.8, 1.8, size=3)
        r = np.linalg.norm(p)
        if not 0.6 <= r <= 1.8 or np.hypot(p[0], p[1]) < 0.3:
            continue
        kept += 1
        for br in (Branch.PLUS, Branch.MINUS):
            strength = -0.5 * br.sign
            want = strength * p / r**3
            got = curvature(BASE, p, br)
            assert np.linalg.norm(got - want) / np.linalg.norm(want) < 1e-6


def _curl_of_imag(model, p, br, h=2e-5):
    rows = []
    for ax in range(3):
        step = np.zeros(3)
        step[ax] = h
        ap = _imag_field(model, (p + step)[None, :], br, "standard")[0]
        am = _imag_field(model, (p - step)[None, :], br, "standard")[0]
        rows.append((ap - am) / (2 * h))
    dax, day, daz = rows
    return np.array([day[2] - daz[1], daz[0] - dax[2], dax[1] - day[0]])


def test_imaginary_part_is_curl_free():
    # the imaginary part is half the log-gradient of the norm, a pure gradient
    rng = np.random.default_rng(99)
    kept = 0
    while kept < 50:
        p = rng.uniform(-1.5, 1.5, size=3)
        if np.linalg.norm(p) < 0.4 or np.hypot(p[0], p[1]) < 0.3:
            continue
        kept += 1
        for br in (Branch.PLUS, Branch.MINUS):
            assert np.linalg.norm(_curl_of_imag(BASE, p, br)) < 1e-6


def test_monopole_charge_unit_sphere():
    plus = monopole_charge(BASE, (0, 0, 0), 1.0, Branch.PLUS)
    minus = monopole_charge(BASE, (0, 0, 0), 1.0, Branch.MINUS)
    assert abs(plus.charge + 0.5) < 1e-6
    assert abs(minus.charge - 0.5) < 1e-6
    assert plus.quadrature_nodes == 64 * 128
    assert plus.tilt_retries == 0
    assert plus.flux == pytest.approx(4 * np.pi * plus.charge, abs=1e-12)
    assert plus.gauge == "standard"


def test_monopole_charge_radius_invariance():
    charges = [monopole_charge(BASE, (0, 0, 0), rad, Branch.PLUS).charge
               for rad in (0.5, 1.0, 2.0)]
    for q in charges[1:]:
        assert abs(q - charges[0]) < 1e-6


def test_monopole_charge_off_center_sphere():
    rep = monopole_charge(BASE, (0.15, -0.1, 0.2), 1.0, Branch.PLUS)
    assert abs(rep.charge + 0.5) < 1e-4
    # one quadrature node of the untilted frame grazes the nodal half-axis,
    # so this particular sphere exercises the re-tilt path
    assert rep.tilt_retries == 1


def test_monopole_charge_empty_sphere():
    rep = monopole_charge(BASE, (1.5, 0.0, 0.5), 0.4, Branch.PLUS)
    assert abs(rep.charge) < 1e-8


def test_monopole_charge_sphere_threaded_by_string():
    # the nodal line carries no curvature flux of its own
    rep = monopole_charge(BASE, (0, 0, -0.5), 0.2, Branch.PLUS)
    assert abs(rep.charge) < 1e-8
    assert rep.tilt_retries == 0


def test_monopole_charge_alternate_gauge():
    rep = monopole_charge(BASE, (0, 0, 0), 1.0, Branch.PLUS, gauge="alternate")
    assert abs(rep.charge + 0.5) < 1e-6


def test_monopole_radius_must_be_positive():
    with pytest.raises(ValueError):
        monopole_charge(BASE, (0, 0, 0), 0.0, Branch.PLUS)


def test_tilted_axes_frames():
    assert np.allclose(_tilted_axes(0), np.eye(3))
    poles = []
    for retry in (1, 2):
        frame = _tilted_axes(retry)
        assert np.allclose(frame.T @ frame, np.eye(3), atol=1e-12)
        poles.append(frame[:, 2])
    assert np.linalg.norm(poles[0] - poles[1]) > 0.1
