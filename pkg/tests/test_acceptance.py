"""Acceptance battery: eight gating checks, one PASS/FAIL line each.

Each criterion prints its verdict on the real stdout even under capture, so
the suite log always shows the eight lines, and fails honestly afterwards if
any sub-check missed its tolerance.
"""
import math
import time

import numpy as np

from diracstrings import (
    Branch,
    CircleZ,
    GridSpec,
    base_model,
    charge_wilson_sweep,
    classify_endpoints,
    convergence_report,
    curvature,
    degenerate_path_phase,
    loop_phase_flux,
    loop_phase_line_integral,
    loop_phase_wilson,
    monopole_charge,
    principal_value,
    scan_nodal_set,
    string_charge,
    x_cubic_model,
    z_quadratic_model,
)
from diracstrings.gauge import _imag_field

BASE = base_model()
CIRCUITS = ((0.0, -math.pi), (0.98, -0.02 * math.pi), (0.5, -math.pi / 2),
            (-0.98, -1.98 * math.pi), (-0.5, -1.5 * math.pi))


def report(capsys, number, name, failures):
    status = "PASS" if not failures else "FAIL"
    with capsys.disabled():
        print(f"[criterion {number}] {name}: {status}", flush=True)
    assert not failures, f"criterion {number}: " + "; ".join(failures)


def test_criterion_1_five_circuits(capsys):
    t0 = time.monotonic()
    failures = []
    for z, expected in CIRCUITS:
        loop = CircleZ.on_sphere(z)
        li = loop_phase_line_integral(BASE, Branch.PLUS, loop).value
        if abs(li - expected) > 1e-6:
            failures.append(f"line integral z={z}: {li} vs {expected}")
        wi = loop_phase_wilson(BASE, Branch.PLUS, loop, nodes=4096).value
        if abs(wi - expected) > 1e-4:
            failures.append(f"wilson z={z}: {wi} vs {expected}")
    elapsed = time.monotonic() - t0
    if elapsed >= 5.0:
        failures.append(f"runtime {elapsed:.1f}s exceeds 5s")
    report(capsys, 1, "five-circuit phases by two routes", failures)


def test_criterion_2_unit_sphere_charges(capsys):
    t0 = time.monotonic()
    failures = []
    plus = monopole_charge(BASE, (0, 0, 0), 1.0, Branch.PLUS).charge
    minus = monopole_charge(BASE, (0, 0, 0), 1.0, Branch.MINUS).charge
    if abs(plus + 0.5) > 1e-4:
        failures.append(f"plus charge {plus}")
    if abs(minus - 0.5) > 1e-4:
        failures.append(f"minus charge {minus}")
    elapsed = time.monotonic() - t0
    if elapsed >= 2.0:
        failures.append(f"runtime {elapsed:.1f}s exceeds 2s")
    report(capsys, 2, "half-integer unit-sphere charges", failures)


def test_criterion_3_string_geometry(capsys):
    grid = GridSpec((-1, 1, 0.02), (-1, 1, 0.02), (-1, 1, 0.02))
    cases = (
        (BASE, [(0.0, 0.0, 0.0)]),
        (z_quadratic_model(), [(0.0, 0.0, -0.5), (0.0, 0.0, 0.5)]),
        (x_cubic_model(), [(-0.5, 0.0, 0.0), (0.2, 0.0, 0.0), (0.8, 0.0, 0.0)]),
    )
    failures = []
    for model, targets in cases:
        t0 = time.monotonic()
        found = classify_endpoints(model, scan_nodal_set(model, Branch.PLUS, grid))
        got = sorted(map(tuple, found.endpoints))
        if len(got) != len(targets):
            failures.append(f"{model.name}: {len(got)} endpoints, "
                            f"want {len(targets)}")
            continue
        for g, w in zip(got, sorted(targets)):
            if max(abs(a - b) for a, b in zip(g, w)) > 0.02:
                failures.append(f"{model.name}: endpoint {g} not near {w}")
        if not all(found.endpoint_is_degeneracy):
            failures.append(f"{model.name}: endpoint failed degeneracy test")
        if max(found.endpoint_rho) >= 1e-8:
            failures.append(f"{model.name}: refined rho {max(found.endpoint_rho)}")
        elapsed = time.monotonic() - t0
        if elapsed >= 60.0:
            failures.append(f"{model.name}: runtime {elapsed:.1f}s exceeds 60s")
    if len(scan_nodal_set(BASE, Branch.PLUS, grid).polylines) != 1:
        failures.append("base scan is not a single polyline")
    report(capsys, 3, "string geometry of the three profiles", failures)


def test_criterion_4_grazing_limit(capsys):
    failures = []
    plus = degenerate_path_phase(BASE, "plus-y").value
    minus = degenerate_path_phase(BASE, "minus-y").value
    if abs(plus - math.pi / 2) > 1e-6:
        failures.append(f"plus-y limit {plus}")
    if abs(minus + math.pi / 2) > 1e-6:
        failures.append(f"minus-y limit {minus}")
    rung = degenerate_path_phase(BASE, "plus-y",
                                 epsilons=[0.01, 0.005, 0.0025])
    sample = rung.metadata["ladder"][0]
    if abs(sample - math.atan(100.0)) > 1e-9:
        failures.append(f"eps=0.01 sample {sample}")
    report(capsys, 4, "half-quantized degeneracy-grazing limit", failures)


def test_criterion_5_cap_consistency(capsys):
    failures = []
    for z, _ in CIRCUITS:
        loop = CircleZ.on_sphere(z)
        upper = loop_phase_flux(-0.5, loop, cap="upper").value
        lower = loop_phase_flux(-0.5, loop, strings_pierced=(-1,),
                                cap="lower").value
        line = loop_phase_line_integral(BASE, Branch.PLUS, loop).value
        if abs(upper - lower) > 1e-9:
            failures.append(f"caps disagree at z={z}: {upper} vs {lower}")
        if abs(upper - line) > 1e-9:
            failures.append(f"flux vs line at z={z}: {upper} vs {line}")
    report(capsys, 5, "two spherical caps, one phase", failures)


def test_criterion_6_adiabatic_convergence(capsys):
    t0 = time.monotonic()
    failures = []
    rep = convergence_report(BASE, Branch.PLUS, CircleZ.on_sphere(0.5),
                             [250, 500, 1000, 2000])
    errs = rep.errors()
    if errs[-1] > 1e-2:
        failures.append(f"T=2000 error {errs[-1]}")
    if not all(a > b for a, b in zip(errs, errs[1:])):
        failures.append(f"errors not monotone: {errs}")
    if abs(rep.oracle + math.pi / 2) > 1e-9:
        failures.append(f"oracle {rep.oracle}")
    elapsed = time.monotonic() - t0
    if elapsed >= 120.0:
        failures.append(f"runtime {elapsed:.1f}s exceeds 120s")
    report(capsys, 6, "real-time sweep converges on the holonomy", failures)


def test_criterion_7_property_battery(capsys):
    failures = []

    # Wilson phases are gauge invariant as principal values
    for z in (0.5, -0.5):
        loop = CircleZ.on_sphere(z)
        std = loop_phase_wilson(BASE, Branch.PLUS, loop)
        alt = loop_phase_wilson(BASE, Branch.PLUS, loop, gauge="alternate")
        d = abs(principal_value(alt.value) - principal_value(std.value))
        if d > 1e-4:
            failures.append(f"wilson gauge dependence {d} at z={z}")
    q_std = monopole_charge(BASE, (0, 0, 0), 1.0, Branch.PLUS).charge
    q_alt = monopole_charge(BASE, (0, 0, 0), 1.0, Branch.PLUS,
                            gauge="alternate").charge
    if abs(q_std - q_alt) > 1e-4:
        failures.append(f"charge gauge dependence {q_std} vs {q_alt}")

    # imaginary part of the connection is curl-free
    h = 2e-5
    rng = np.random.default_rng(99)
    kept = 0
    while kept < 50:
        p = rng.uniform(-1.5, 1.5, size=3)
        if np.linalg.norm(p) < 0.4 or np.hypot(p[0], p[1]) < 0.3:
            continue
        kept += 1
        for br in (Branch.PLUS, Branch.MINUS):
            rows = []
            for ax in range(3):
                step = np.zeros(3)
                step[ax] = h
                ap = _imag_field(BASE, (p + step)[None, :], br, "standard")[0]
                am = _imag_field(BASE, (p - step)[None, :], br, "standard")[0]
                rows.append((ap - am) / (2 * h))
            dax, day, daz = rows
            curl = np.array([day[2] - daz[1], daz[0] - dax[2], dax[1] - day[0]])
            if np.linalg.norm(curl) > 1e-6:
                failures.append(f"imaginary curl {np.linalg.norm(curl)} at {p}")

    # curvature is the field of a point charge
    rng = np.random.default_rng(20260818)
    kept = 0
    while kept < 100:
        p = rng.uniform(-1.8, 1.8, size=3)
        r = np.linalg.norm(p)
        if not 0.6 <= r <= 1.8 or np.hypot(p[0], p[1]) < 0.3:
            continue
        kept += 1
        for br in (Branch.PLUS, Branch.MINUS):
            want = -0.5 * br.sign * p / r**3
            rel = (np.linalg.norm(curvature(BASE, p, br) - want)
                   / np.linalg.norm(want))
            if rel > 1e-6:
                failures.append(f"curvature off by {rel} at {p}")

    # charges of separate degeneracies add up
    xc = x_cubic_model()
    parts = [monopole_charge(xc, (x0, 0, 0), 0.1, Branch.PLUS).charge
             for x0 in (-0.5, 0.2, 0.8)]
    total = monopole_charge(xc, (0.15, 0, 0), 2.0, Branch.PLUS).charge
    if abs(sum(parts) - total) > 1e-3:
        failures.append(f"additivity: {parts} vs {total}")

    # string charge is twice the monopole strength on both branches; the
    # loop radius keeps the smooth flux below the winding residual budget
    plus_winding = loop_phase_wilson(
        BASE, Branch.PLUS, CircleZ(-0.5, 0.02)).value / (2 * math.pi)
    minus_winding = loop_phase_wilson(
        BASE, Branch.MINUS, CircleZ(0.5, 0.02, orientation=-1)).value / (2 * math.pi)
    for turns, want, tag in ((plus_winding, -1, "plus"), (minus_winding, 1, "minus")):
        if abs(turns - want) > 1e-3:
            failures.append(f"{tag} winding {turns} vs {want}")
    if string_charge(BASE, Branch.PLUS, CircleZ(-0.5, 0.02)) != -1:
        failures.append("plus string charge rounds wrong")
    if string_charge(BASE, Branch.MINUS, CircleZ(0.5, 0.02, orientation=-1)) != 1:
        failures.append("minus string charge rounds wrong")

    report(capsys, 7, "gauge, curl, curvature, additivity, doubling", failures)


def test_criterion_8_zero_total_charge(capsys):
    failures = []
    model = z_quadratic_model()
    by_flux = monopole_charge(model, (0, 0, 0), 1.0, Branch.PLUS).charge
    by_sweep = charge_wilson_sweep(model, (0, 0, 0), 1.0, Branch.PLUS)
    if abs(by_flux) > 1e-4:
        failures.append(f"flux total {by_flux}")
    if abs(by_sweep) > 1e-4:
        failures.append(f"sweep total {by_sweep}")
    top = monopole_charge(model, (0, 0, 0.5), 0.2, Branch.PLUS).charge
    bottom = monopole_charge(model, (0, 0, -0.5), 0.2, Branch.PLUS).charge
    if abs(top + 0.5) > 1e-3:
        failures.append(f"top endpoint {top}")
    if abs(bottom - 0.5) > 1e-3:
        failures.append(f"bottom endpoint {bottom}")
    report(capsys, 8, "interval profile carries zero net charge", failures)
