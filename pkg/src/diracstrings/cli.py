"""Command line front end.

Every subcommand prints one JSON result envelope on stdout (deterministic,
sorted keys, floats at 17 significant digits so values round-trip exactly)
and a short human summary on stderr unless --json-only is given.  Exit codes:
0 success, 2 usage problems, 3 numerical-domain errors; domain errors still
emit an envelope carrying a machine-readable error code.

Bulk data (polylines, maps, isosurface clouds) goes to CSV files under
--out-dir, which defaults to $DIRACSTRINGS_OUT_DIR or the working directory.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, errors
from .adiabatic import Ramp, SweepSpec, convergence_report, evolve
from .eigen import Branch, eigensystem
from .gauge import connection, connection_analytic, connection_numeric, \
    curvature, monopole_charge
from .holonomy import CircleZ, PathSpec, charge_wilson_sweep, \
    degenerate_path_phase, loop_phase_flux, loop_phase_line_integral, \
    loop_phase_wilson, path_phase, principal_value
from .models import make_model
from .strings import GridSpec, classify_endpoints, scan_nodal_set, string_charge

_OUT_DIR_ENV = "DIRACSTRINGS_OUT_DIR"


# ---------------------------------------------------------------- envelope

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".e"):
        s += ".0"
    return s


def _dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{json.dumps(str(k))}: {_dumps(v, indent + 1)}'
                 for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{_dumps(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _envelope(command: str, model, inputs: dict, outputs: dict,
              warnings: list, error: dict | None = None) -> dict:
    env = {
        "tool_version": __version__,
        "command": command,
        "model": model.describe() if model is not None else None,
        "inputs": inputs,
        "outputs": outputs,
        "warnings": list(warnings),
    }
    if error is not None:
        env["error"] = error
    return env


def _phase_block(value: float) -> dict:
    p = principal_value(value)
    return {"value": value, "value_over_pi": value / math.pi,
            "principal": p, "principal_over_pi": p / math.pi}


# ------------------------------------------------------------- arg helpers

def _int_like(text: str) -> int:
    """Integer flag that tolerates scientific notation like 2e5."""
    val = float(text)
    if val != int(val) or val <= 0:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return int(val)


def _parse_point(text: str) -> tuple:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected x,y,z, got {text!r}")
    return tuple(parts)


def _parse_params(pairs) -> dict:
    out = {}
    for chunk in pairs or []:
        for item in chunk.split(","):
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"bad --params entry {item!r}, want key=value")
            out[key.strip()] = float(val)
    return out


def _model_from(args):
    return make_model(args.model, _parse_params(args.params))


def _branch_from(args) -> Branch:
    return Branch.parse(args.branch)


def _out_dir(args) -> Path:
    raw = args.out_dir or os.environ.get(_OUT_DIR_ENV) or "."
    path = Path(raw)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _circle_height(args) -> float:
    if args.circle is not None:
        key, sep, val = args.circle.partition("=")
        if not sep or key.strip() != "z":
            raise ValueError(f"--circle wants z=<height>, got {args.circle!r}")
        return float(val)
    if args.circle_z is None:
        raise ValueError("give the circle height via --circle-z or --circle z=...")
    return args.circle_z


def _loop_from(args) -> CircleZ:
    orientation = +1 if args.orientation == "ccw" else -1
    z = _circle_height(args)
    if args.circle_radius is not None:
        return CircleZ(z, args.circle_radius,
                       orientation=orientation, nodes=args.nodes)
    return CircleZ.on_sphere(z, args.sphere_radius,
                             orientation=orientation, nodes=args.nodes)


def _write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for cell in row:
                if isinstance(cell, (float, np.floating)):
                    cells.append(format(float(cell), ".17g"))
                else:
                    cells.append(str(cell))
            fh.write(",".join(cells) + "\n")


# ------------------------------------------------------------- subcommands

def _cmd_eigen(args):
    model = _model_from(args)
    at = _parse_point(args.at)
    plus, minus = eigensystem(model, at)

    def block(pair):
        return {"energy": pair.energy,
                "vector": [[v.real, v.imag] for v in pair.vector],
                "on_string": pair.on_string,
                "rho": pair.rho}

    outputs = {"energies": [plus.energy, minus.energy],
               "plus": block(plus), "minus": block(minus),
               "on_string": [plus.on_string, minus.on_string],
               "degenerate": plus.degenerate}
    summary = (f"eigen at {at}: E=+-{plus.rho:.6g}, on_string="
               f"{plus.on_string}/{minus.on_string}")
    return model, {"at": list(at)}, outputs, [], summary


def _cmd_strings(args):
    model = _model_from(args)
    branch = _branch_from(args)
    grid = GridSpec.parse(args.grid)
    found = scan_nodal_set(model, branch, grid, gauge=args.gauge)
    found = classify_endpoints(model, found)
    out = _out_dir(args)
    stem = f"strings_{model.name}_{branch.value}"
    if args.gauge != "standard":
        stem += f"_{args.gauge}"
    csv_path = out / f"{stem}.csv"
    rows = []
    for sid, poly in enumerate(found.polylines):
        for vid, (x, y, z) in enumerate(poly):
            rows.append((sid, vid, x, y, z))
    _write_csv(csv_path, ["string_id", "vertex_index", "x", "y", "z"], rows)
    outputs = {
        "polylines": [{"id": i, "vertices": len(p),
                       "first": list(map(float, p[0])),
                       "last": list(map(float, p[-1]))}
                      for i, p in enumerate(found.polylines)],
        "endpoints": [list(map(float, p)) for p in found.endpoints],
        "endpoint_polyline": list(found.endpoint_polyline),
        "endpoint_is_degeneracy": list(found.endpoint_is_degeneracy),
        "endpoint_rho": list(found.endpoint_rho),
        "open_termini": [list(map(float, p)) for p in found.open_termini],
        "csv": str(csv_path),
    }
    summary = (f"strings {model.name}/{branch.value}: {len(found.polylines)} "
               f"polylines, {len(found.endpoints)} endpoints -> {csv_path}")
    return model, {"grid": grid.describe(), "gauge": args.gauge,
                   "branch": branch.value}, outputs, [], summary


def _cmd_connection(args):
    model = _model_from(args)
    branch = _branch_from(args)
    at = _parse_point(args.at)
    if args.method == "analytic":
        sample = connection_analytic(model, at, branch)
    elif args.method == "numeric":
        sample = connection_numeric(model, at, branch, h=args.h, gauge=args.gauge)
    else:
        sample = connection(model, at, branch, gauge=args.gauge)
    outputs = {"a": [float(v) for v in sample.a],
               "a_imag": [float(v) for v in sample.a_imag],
               "method": args.method}
    summary = f"connection[{args.method}] at {at}: a={outputs['a']}"
    return model, {"at": list(at), "branch": branch.value, "gauge": args.gauge,
                   "method": args.method, "h": args.h}, outputs, [], summary


def _cmd_curvature(args):
    model = _model_from(args)
    branch = _branch_from(args)
    at = _parse_point(args.at)
    b = curvature(model, at, branch, h=args.h, gauge=args.gauge)
    outputs = {"b": [float(v) for v in b]}
    return model, {"at": list(at), "branch": branch.value, "h": args.h,
                   "gauge": args.gauge}, outputs, [], f"curvature at {at}: {outputs['b']}"


def _cmd_charge(args):
    model = _model_from(args)
    branch = _branch_from(args)
    center = _parse_point(args.center)
    outputs = {}
    warnings = []
    if args.method in ("flux", "both"):
        rep = monopole_charge(model, center, args.radius, branch,
                              n_theta=args.n_theta, n_phi=args.n_phi,
                              h=args.h, gauge=args.gauge)
        outputs["flux_quadrature"] = {
            "charge": rep.charge, "flux": rep.flux,
            "quadrature_nodes": rep.quadrature_nodes,
            "tilt_retries": rep.tilt_retries}
    if args.method in ("wilson-sweep", "both"):
        q = charge_wilson_sweep(model, center, args.radius, branch,
                                gauge=args.gauge)
        outputs["wilson_sweep"] = {"charge": q}
    if args.method == "both":
        d = abs(outputs["flux_quadrature"]["charge"]
                - outputs["wilson_sweep"]["charge"])
        outputs["route_difference"] = d
        if d > 1e-4:
            warnings.append("flux and wilson-sweep routes disagree beyond 1e-4")
    first = next(iter(outputs.values()))
    summary = (f"charge {model.name}/{branch.value} r={args.radius} "
               f"around {center}: {first['charge']:+.6f}")
    return model, {"center": list(center), "radius": args.radius,
                   "branch": branch.value, "method": args.method,
                   "gauge": args.gauge}, outputs, warnings, summary


def _cmd_loop_phase(args):
    model = _model_from(args)
    branch = _branch_from(args)
    loop = _loop_from(args)
    outputs = {}
    if args.method in ("line", "all"):
        res = loop_phase_line_integral(model, branch, loop, gauge=args.gauge)
        outputs["line_integral"] = _phase_block(res.value)
    if args.method in ("wilson", "all"):
        res = loop_phase_wilson(model, branch, loop, gauge=args.gauge)
        outputs["wilson"] = _phase_block(res.value)
    if args.method in ("flux", "all"):
        mu = args.mu if args.mu is not None else -0.5 * branch.sign
        pierced = [int(s) for s in args.strings_pierced.split(",")] \
            if args.strings_pierced else []
        res = loop_phase_flux(mu, loop, pierced, cap=args.cap)
        outputs["flux_prediction"] = _phase_block(res.value)
        outputs["flux_prediction"]["mu"] = mu
        outputs["flux_prediction"]["cap"] = args.cap
    first = next(iter(outputs.values()))
    summary = (f"loop z={loop.z} r={loop.radius:.6g}: "
               f"{first['value_over_pi']:+.6f} pi")
    return model, {"branch": branch.value, "loop": loop.describe(),
                   "method": args.method, "gauge": args.gauge}, outputs, [], summary


def _cmd_phase_map(args):
    model = _model_from(args)
    branch = _branch_from(args)
    grid = GridSpec.parse(args.grid)
    start = _parse_point(args.start)
    xs, ys, zs = grid.coords()
    out = _out_dir(args)
    csv_path = out / f"phase_map_{model.name}_{branch.value}.csv"
    rows = []
    failures = 0
    for x in xs:
        for y in ys:
            for z in zs:
                spec = PathSpec(start=start, end=(x, y, z),
                                protocol=args.protocol)
                try:
                    val = path_phase(model, branch, spec, gauge=args.gauge).value
                except errors.DomainError:
                    val = float("nan")
                    failures += 1
                rows.append((x, y, z, val))
    _write_csv(csv_path, ["x", "y", "z", "phase"], rows)
    warnings = []
    if failures:
        warnings.append(f"{failures} paths touched a string and were recorded as nan")
    outputs = {"csv": str(csv_path), "points": len(rows),
               "failed_points": failures}
    summary = f"phase map {len(rows)} points -> {csv_path}"
    return model, {"grid": grid.describe(), "start": list(start),
                   "protocol": args.protocol, "branch": branch.value,
                   "gauge": args.gauge}, outputs, warnings, summary


def _cmd_degenerate_path(args):
    model = _model_from(args)
    eps = [float(e) for e in args.epsilons.split(",")] if args.epsilons else None
    res = degenerate_path_phase(model, side=args.side, epsilons=eps)
    outputs = _phase_block(res.value)
    outputs["ladder"] = [{"epsilon": e, "phase": v} for e, v in
                         zip(res.metadata["epsilons"], res.metadata["ladder"])]
    summary = f"degenerate path {args.side}: {res.value/math.pi:+.8f} pi"
    return model, {"side": args.side}, outputs, [], summary


def _cmd_adiabatic(args):
    model = _model_from(args)
    branch = _branch_from(args)
    loop = _loop_from(args)
    ramp = Ramp.LINEAR if args.ramp == "linear" else Ramp.SMOOTH_C1
    run = evolve(model, branch, SweepSpec(loop, args.total_time, ramp, args.steps))
    outputs = {
        "geometric_phase_rad": run.geometric_phase,
        "geometric_phase_over_pi": run.geometric_phase / math.pi,
        "dynamical_phase_rad": run.dynamical_phase,
        "dynamical_phase_over_pi": run.dynamical_phase / math.pi,
        "fidelity": run.fidelity,
        "norm_drift": run.max_norm_drift,
        "steps": run.steps,
        "final_state": [[v.real, v.imag] for v in run.final_state],
    }
    summary = (f"adiabatic T={args.total_time}: geometric "
               f"{run.geometric_phase/math.pi:+.6f} pi, fidelity {run.fidelity:.8f}")
    return model, {"branch": branch.value, "loop": loop.describe(),
                   "total_time": args.total_time, "ramp": ramp.value,
                   "steps": args.steps}, outputs, [], summary


def _cmd_adiabatic_sweep(args):
    model = _model_from(args)
    branch = _branch_from(args)
    loop = _loop_from(args)
    ramp = Ramp.LINEAR if args.ramp == "linear" else Ramp.SMOOTH_C1
    times = [float(t) for t in args.total_times.split(",")]
    rep = convergence_report(model, branch, loop, times, ramp=ramp)
    out = _out_dir(args)
    csv_path = out / f"adiabatic_sweep_{model.name}_{branch.value}.csv"
    _write_csv(csv_path, ["T", "phase", "error", "fidelity"],
               [(r.total_time, r.geometric_phase, r.error, r.fidelity)
                for r in rep.rows])
    outputs = {
        "oracle": rep.oracle,
        "oracle_method": rep.oracle_method,
        "fitted_order": rep.fitted_order,
        "rows": [{"total_time": r.total_time, "steps": r.steps,
                  "geometric_phase": r.geometric_phase, "error": r.error,
                  "fidelity": r.fidelity} for r in rep.rows],
        "csv": str(csv_path),
    }
    summary = f"adiabatic sweep: fitted order {rep.fitted_order:.3f} -> {csv_path}"
    return model, {"branch": branch.value, "loop": loop.describe(),
                   "total_times": times, "ramp": ramp.value}, outputs, [], summary


_FIGURES = {
    "fig1": ("base", {}, (Branch.PLUS,)),
    "fig2": ("base", {}, (Branch.PLUS, Branch.MINUS)),
    "fig3a": ("z-quadratic", {}, (Branch.PLUS, Branch.MINUS)),
    "fig3b": ("x-cubic", {}, (Branch.PLUS, Branch.MINUS)),
}


def _cmd_export_figure(args):
    name, params, branches = _FIGURES[args.which]
    model = make_model(name, params)
    grid = GridSpec.parse(args.grid)
    out = _out_dir(args)
    xs, ys, zs = grid.coords()
    from .models import field_components

    fx, fy, fz = field_components(model, xs[:, None, None], ys[None, :, None],
                                  zs[None, None, :])
    fx, fy, fz = np.broadcast_arrays(fx, fy, fz)
    rho = np.sqrt(fx * fx + fy * fy + fz * fz)
    string_rows, cloud_rows = [], []
    endpoint_report = {}
    for branch in branches:
        found = classify_endpoints(model, scan_nodal_set(model, branch, grid))
        for sid, poly in enumerate(found.polylines):
            for vid, (x, y, z) in enumerate(poly):
                string_rows.append((branch.value, sid, vid, x, y, z))
        raw = 2.0 * rho * (rho + branch.sign * fz)
        sel = np.argwhere(raw <= args.iso_level)
        for i, j, k in sel:
            cloud_rows.append((branch.value, xs[i], ys[j], zs[k], raw[i, j, k]))
        endpoint_report[branch.value] = {
            "endpoints": [list(map(float, p)) for p in found.endpoints],
            "endpoint_is_degeneracy": list(found.endpoint_is_degeneracy),
            "endpoint_rho": list(found.endpoint_rho),
        }
        if args.which == "fig2":
            rep = monopole_charge(model, (0.0, 0.0, 0.0), 1.0, branch)
            endpoint_report[branch.value]["monopole_charge"] = rep.charge
    strings_path = out / f"{args.which}_strings.csv"
    cloud_path = out / f"{args.which}_isosurface.csv"
    endpoints_path = out / f"{args.which}_endpoints.json"
    _write_csv(strings_path, ["branch", "string_id", "vertex_index", "x", "y", "z"],
               string_rows)
    _write_csv(cloud_path, ["branch", "x", "y", "z", "raw_density"], cloud_rows)
    endpoints_path.write_text(_dumps(endpoint_report) + "\n", encoding="utf-8")
    outputs = {"strings_csv": str(strings_path),
               "isosurface_csv": str(cloud_path),
               "endpoints_json": str(endpoints_path),
               "isosurface_points": len(cloud_rows),
               "iso_level": args.iso_level}
    summary = f"{args.which}: wrote {strings_path}, {cloud_path}, {endpoints_path}"
    return model, {"which": args.which, "grid": grid.describe(),
                   "iso_level": args.iso_level}, outputs, [], summary


def _check(name, value, expected, tol):
    ok = abs(value - expected) <= tol
    return {"name": name, "value": value, "expected": expected,
            "tolerance": tol, "pass": ok}


def _cmd_reproduce(args):
    checks = []
    base = make_model("base", {})
    zq = make_model("z-quadratic", {})
    xc = make_model("x-cubic", {})
    plus, minus = Branch.PLUS, Branch.MINUS

    for zj in (0.0, 0.98, 0.5, -0.98, -0.5):
        loop = CircleZ.on_sphere(zj)
        expected = -math.pi * (1.0 - zj)
        li = loop_phase_line_integral(base, plus, loop).value
        wi = loop_phase_wilson(base, plus, loop).value
        fl = loop_phase_flux(-0.5, loop).value
        checks.append(_check(f"circuit z={zj} line-integral", li, expected, 1e-6))
        checks.append(_check(f"circuit z={zj} wilson", wi, expected, 1e-4))
        checks.append(_check(f"circuit z={zj} flux-prediction", fl, expected, 1e-9))

    checks.append(_check("unit-sphere charge plus",
                         monopole_charge(base, (0, 0, 0), 1.0, plus).charge,
                         -0.5, 1e-4))
    checks.append(_check("unit-sphere charge minus",
                         monopole_charge(base, (0, 0, 0), 1.0, minus).charge,
                         0.5, 1e-4))

    grid = GridSpec((-1, 1, 0.02), (-1, 1, 0.02), (-1, 1, 0.02))
    for model, branch, expected_pts in (
            (base, plus, [(0.0, 0.0, 0.0)]),
            (zq, plus, [(0.0, 0.0, -0.5), (0.0, 0.0, 0.5)]),
            (xc, plus, [(-0.5, 0.0, 0.0), (0.2, 0.0, 0.0), (0.8, 0.0, 0.0)])):
        found = classify_endpoints(model, scan_nodal_set(model, branch, grid))
        got = sorted(map(tuple, found.endpoints))
        want = sorted(expected_pts)
        dist = (max(max(abs(a - b) for a, b in zip(g, w))
                    for g, w in zip(got, want))
                if len(got) == len(want) else float("inf"))
        checks.append(_check(f"{model.name} endpoint count", len(got),
                             len(want), 0))
        checks.append(_check(f"{model.name} endpoint placement", dist, 0.0, 1e-6))

    for side, expected in (("plus-y", math.pi / 2), ("minus-y", -math.pi / 2)):
        val = degenerate_path_phase(base, side=side).value
        checks.append(_check(f"degenerate path {side}", val, expected, 1e-6))

    checks.append(_check("z-quadratic total charge (flux)",
                         monopole_charge(zq, (0, 0, 0), 1.0, plus).charge,
                         0.0, 1e-4))
    checks.append(_check("z-quadratic total charge (wilson sweep)",
                         charge_wilson_sweep(zq, (0, 0, 0), 1.0, plus),
                         0.0, 1e-4))
    checks.append(_check("z-quadratic top endpoint charge",
                         monopole_charge(zq, (0, 0, 0.5), 0.2, plus).charge,
                         -0.5, 1e-3))
    checks.append(_check("z-quadratic bottom endpoint charge",
                         monopole_charge(zq, (0, 0, -0.5), 0.2, plus).charge,
                         0.5, 1e-3))

    loop = CircleZ.on_sphere(0.5)
    run = evolve(base, plus, SweepSpec(loop, 2000.0, Ramp.SMOOTH_C1, 200000))
    checks.append(_check("adiabatic circuit z=0.5", run.geometric_phase,
                         -math.pi / 2, 1e-2))

    all_pass = all(c["pass"] for c in checks)
    outputs = {"checks": checks, "all_pass": all_pass,
               "total": len(checks),
               "passed": sum(1 for c in checks if c["pass"])}
    summary = f"reproduction: {outputs['passed']}/{outputs['total']} checks pass"
    if not all_pass:
        raise _ReproductionFailure(outputs, summary)
    return None, {}, outputs, [], summary


class _ReproductionFailure(Exception):
    def __init__(self, outputs, summary):
        super().__init__(summary)
        self.outputs = outputs
        self.summary = summary


# ------------------------------------------------------------------ parser

def _add_model_args(p):
    p.add_argument("--model", default="base",
                   choices=["base", "z-quadratic", "x-cubic"],
                   help="built-in model family")
    p.add_argument("--params", action="append", default=None, metavar="K=V",
                   help="model parameters, e.g. Z0=0.4 (repeatable)")


def _add_branch_arg(p):
    p.add_argument("--branch", default="plus", choices=["plus", "minus"])


def _add_gauge_arg(p):
    p.add_argument("--gauge", default="standard",
                   choices=["standard", "alternate"])


def _add_loop_args(p):
    p.add_argument("--circle-z", type=float, default=None,
                   help="height of the horizontal circle")
    p.add_argument("--circle", default=None, metavar="z=Z",
                   help="same as --circle-z, key=value form")
    p.add_argument("--circle-radius", type=float, default=None,
                   help="explicit circle radius (otherwise cut from sphere)")
    p.add_argument("--sphere-radius", "--sphere-r", type=float, default=1.0,
                   dest="sphere_radius",
                   help="sphere the circle is cut from when no radius given")
    p.add_argument("--orientation", default="ccw", choices=["ccw", "cw"])
    p.add_argument("--nodes", type=int, default=4096)


def _add_out_dir(p):
    p.add_argument("--out-dir", default=None,
                   help=f"output directory (default ${_OUT_DIR_ENV} or cwd)")


class _Subcommands:
    """add_parser that also accepts --json-only after the subcommand.

    The root default must survive, so the per-subcommand copy suppresses its
    own default instead of clobbering an already parsed value.
    """

    def __init__(self, sub):
        self._sub = sub

    def add_parser(self, name, **kwargs):
        p = self._sub.add_parser(name, **kwargs)
        p.add_argument("--json-only", action="store_true",
                       default=argparse.SUPPRESS,
                       help="suppress the human summary on stderr")
        return p


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracstrings",
        description="Nodal strings, monopole charges, and holonomies of a "
                    "two-mode Hamiltonian")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--json-only", action="store_true",
                        help="suppress the human summary on stderr")
    sub = _Subcommands(parser.add_subparsers(dest="command", required=True))

    p = sub.add_parser("eigen", help="closed-form eigensystem at a point")
    _add_model_args(p)
    p.add_argument("--at", required=True, metavar="X,Y,Z")
    p.set_defaults(handler=_cmd_eigen)

    p = sub.add_parser("strings", help="scan nodal polylines on a grid")
    _add_model_args(p)
    _add_branch_arg(p)
    _add_gauge_arg(p)
    p.add_argument("--grid", default="x=-1:1:0.02,y=-1:1:0.02,z=-1:1:0.02")
    _add_out_dir(p)
    p.set_defaults(handler=_cmd_strings)

    p = sub.add_parser("connection", help="gauge connection at a point")
    _add_model_args(p)
    _add_branch_arg(p)
    _add_gauge_arg(p)
    p.add_argument("--at", required=True, metavar="X,Y,Z")
    p.add_argument("--method", default="exact",
                   choices=["exact", "analytic", "numeric"])
    p.add_argument("--h", type=float, default=1e-5,
                   help="finite-difference step for --method numeric")
    p.set_defaults(handler=_cmd_connection)

    p = sub.add_parser("curvature", help="curl of the connection at a point")
    _add_model_args(p)
    _add_branch_arg(p)
    _add_gauge_arg(p)
    p.add_argument("--at", required=True, metavar="X,Y,Z")
    p.add_argument("--h", type=float, default=1e-4)
    p.set_defaults(handler=_cmd_curvature)

    p = sub.add_parser("charge", help="monopole charge inside a sphere")
    _add_model_args(p)
    _add_branch_arg(p)
    _add_gauge_arg(p)
    p.add_argument("--center", required=True, metavar="X,Y,Z")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--method", default="flux",
                   choices=["flux", "wilson-sweep", "both"])
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--n-phi", type=int, default=128)
    p.add_argument("--h", type=float, default=1e-5)
    p.set_defaults(handler=_cmd_charge)

    p = sub.add_parser("loop-phase", help="holonomy of a horizontal circle")
    _add_model_args(p)
    _add_branch_arg(p)
    _add_gauge_arg(p)
    _add_loop_args(p)
    p.add_argument("--method", default="all",
                   choices=["line", "wilson", "flux", "all"])
    p.add_argument("--mu", type=float, default=None,
                   help="monopole charge for the flux prediction "
                        "(default -sign(branch)/2)")
    p.add_argument("--cap", default="upper", choices=["upper", "lower"])
    p.add_argument("--strings-pierced", default=None, metavar="M1,M2",
                   help="signed charges of strings threading the cap")
    p.set_defaults(handler=_cmd_loop_phase)

    p = sub.add_parser("phase-map",
                       help="path phases over a grid under a fixed protocol")
    _add_model_args(p)
    _add_branch_arg(p)
    _add_gauge_arg(p)
    p.add_argument("--grid", required=True)
    p.add_argument("--start", default="0,-1,0", metavar="X,Y,Z")
    p.add_argument("--protocol", default="xyz")
    _add_out_dir(p)
    p.set_defaults(handler=_cmd_phase_map)

    p = sub.add_parser("degenerate-path",
                       help="one-sided limit of the through-origin path phase")
    _add_model_args(p)
    p.add_argument("--side", default="plus-y", choices=["plus-y", "minus-y"])
    p.add_argument("--epsilons", default=None, metavar="E1,E2,...")
    p.set_defaults(handler=_cmd_degenerate_path)

    p = sub.add_parser("adiabatic", help="real-time sweep around a circle")
    _add_model_args(p)
    _add_branch_arg(p)
    _add_loop_args(p)
    p.add_argument("--total-time", "--T", type=float, required=True,
                   dest="total_time")
    p.add_argument("--steps", type=_int_like, default=None,
                   help="step count, scientific notation accepted (2e5)")
    p.add_argument("--ramp", default="smooth-c1", choices=["smooth-c1", "linear"])
    p.set_defaults(handler=_cmd_adiabatic)

    p = sub.add_parser("adiabatic-sweep",
                       help="convergence of the sweep against the holonomy")
    _add_model_args(p)
    _add_branch_arg(p)
    _add_loop_args(p)
    p.add_argument("--total-times", "--T-list", default="250,500,1000,2000",
                   dest="total_times")
    p.add_argument("--ramp", default="smooth-c1", choices=["smooth-c1", "linear"])
    _add_out_dir(p)
    p.set_defaults(handler=_cmd_adiabatic_sweep)

    p = sub.add_parser("export-figure",
                       help="CSV/JSON data behind the reference figures")
    p.add_argument("--which", required=True, choices=sorted(_FIGURES))
    p.add_argument("--grid", default="x=-1:1:0.02,y=-1:1:0.02,z=-1:1:0.02")
    p.add_argument("--iso-level", type=float, default=0.001,
                   help="raw density level bounding the exported cloud")
    _add_out_dir(p)
    p.set_defaults(handler=_cmd_export_figure)

    p = sub.add_parser("reproduce-paper",
                       help="run the full battery of reference checks")
    p.set_defaults(handler=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        model, inputs, outputs, warnings, summary = args.handler(args)
    except errors.DomainError as exc:
        env = _envelope(args.command, None, {}, {}, [],
                        error={"code": exc.code, "message": str(exc)})
        print(_dumps(env))
        if not args.json_only:
            print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 3
    except _ReproductionFailure as exc:
        env = _envelope(args.command, None, {}, exc.outputs, [],
                        error={"code": "reproduction_failed",
                               "message": exc.summary})
        print(_dumps(env))
        if not args.json_only:
            print(exc.summary, file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    env = _envelope(args.command, model, inputs, outputs, warnings)
    print(_dumps(env))
    if not args.json_only:
        print(summary, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
