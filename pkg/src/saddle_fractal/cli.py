"""Command-line front end: dimension experiments and numeric checks with JSON reports.

Every subcommand writes a versioned JSON report (``"schema": 1``) to stdout
or ``--output``.  A report can be re-run with ``--replay report.json``; the
stored parameters are reused and the new numbers are compared against the
stored ones.  Exit status is 0 when every check passes, 1 when a check fails
or the numerics break down, and 2 for invalid flags.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from ._accel import backend
from ._errors import DomainError, FitError, IntegrationError
from .dimension import (EpsGrid, FitConfig, box_dim_planar, box_dim_sequence,
                        cyclicity_candidates, displacement_asymptotics_formula,
                        induced_away_model, spiral_dim_formula)
from .geometry import assemble_spiral, family_from_orbit
from .linearize import F_map, compute_g_polynomials, jacobian_F, verify_curve_mapping
from .orbits1d import MapModel, Orbit1D, Variant, generate_orbit, theoretical_orbit_dim
from .saddlefield import (NormalFormField, OffSaddleMap, ThroughSaddleMap, codimension_scenario,
                          dulac_map, fit_displacement)

SCHEMA = 1
LOG_ENV = "SADDLE_FRACTAL_LOG"
# arguments that never influence the numbers in a report
IO_KEYS = {"command", "func", "output", "csv", "plot", "replay", "jobs"}

log = logging.getLogger("saddle_fractal")


class UsageError(Exception):
    """Flags are syntactically fine but describe an invalid setup."""


def _configure_logging() -> None:
    level = os.environ.get(LOG_ENV, "error").strip().lower()
    if level not in ("error", "info", "debug"):
        level = "error"
    logging.basicConfig(level=getattr(logging, level.upper()), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _usage(fn: Callable, *a, **kw):
    """Run a setup step, turning domain errors into usage errors."""
    try:
        return fn(*a, **kw)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _check(name: str, value, target, tolerance: float, passed: bool | None = None) -> dict:
    if passed is None:
        passed = abs(float(value) - float(target)) <= tolerance
    return {"name": name, "value": _num(value), "target": _num(target),
            "tolerance": tolerance, "pass": bool(passed)}


def _num(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _grid(args, default: EpsGrid | None) -> EpsGrid | None:
    if args.eps_first is None and args.eps_last is None:
        return default
    first = args.eps_first if args.eps_first is not None else 2
    last = args.eps_last if args.eps_last is not None else 12
    if last - first < 4:
        raise UsageError("the scale grid needs at least 5 dyadic levels")
    return EpsGrid.dyadic(first, last)


def _fit_config(args) -> FitConfig:
    return _usage(FitConfig, threshold=args.threshold, residual_floor=args.residual_floor,
                  drop_largest=args.drop_largest)


def _map_model(args) -> MapModel:
    return _usage(MapModel, Variant(args.model), alpha=args.alpha, C=args.C, kappa=args.kappa,
                  beta=args.beta)


def _orbit(model: MapModel, args) -> Orbit1D:
    return _usage(generate_orbit, model, args.s0, max_points=args.max_points, floor=args.floor)


def _estimate_entry(key: str, est) -> dict:
    out = {"key": key}
    out.update(est.to_dict())
    return out


def _geometry_params(args, grid: EpsGrid) -> tuple[float, float | None, float | None]:
    eps_min = min(grid.values)
    sagitta = args.sagitta if args.sagitta is not None else eps_min / 16
    resolution = args.resolution if args.resolution is not None else eps_min / 2
    return args.max_step, sagitta if sagitta > 0 else None, resolution if resolution > 0 else None


def trace_dim_formula(model: MapModel, r: float) -> float:
    """Dimension of the denser of the two traces ``S`` and ``S^(1/r)`` of ``H_{r,S}``.

    An orbit with ``s_n ~ n^(-a)`` has dimension ``1 / (1 + a)``; the power
    ``1/r`` divides the decay rate by ``r``.
    """
    d0 = theoretical_orbit_dim(model)
    if d0 <= 0:
        return 0.0
    a = 1.0 / d0 - 1.0
    return 1.0 / (1.0 + a / max(r, 1.0))


# --------------------------------------------------------------------------- commands

def cmd_orbit_dim(args) -> dict:
    model = _map_model(args)
    grid = _grid(args, None)
    cfg = _fit_config(args)
    S = _orbit(model, args)
    est = _usage(box_dim_sequence, S, grid, cfg)
    formula = theoretical_orbit_dim(model)
    return {
        "estimates": [_estimate_entry("orbit", est)],
        "formula": {"orbit_dim": formula},
        "checks": [_check("orbit_dim", est.d, formula, args.tolerance)],
        "diagnostics": {"orbit_points": len(S), "last_point": float(S.points[-1])},
    }


def cmd_hyperbola_dim(args) -> dict:
    grid = _grid(args, EpsGrid.default_2d())
    cfg = _fit_config(args)
    if args.level is not None:
        S = _usage(Orbit1D, np.array([args.level]))
        formula = 1.0
    else:
        model = _map_model(args)
        S = _orbit(model, args)
        formula = 1.0 + trace_dim_formula(model, args.r)
    max_step, sagitta, resolution = _geometry_params(args, grid)
    fam = _usage(family_from_orbit, args.r, S, args.delta)
    polylines = _usage(fam.arcs, max_step=max_step, sagitta=sagitta, resolution=resolution)
    est = box_dim_planar(polylines, grid, cfg, jobs=args.jobs)
    return {
        "estimates": [_estimate_entry("family", est)],
        "formula": {"family_dim": formula},
        "checks": [_check("family_dim", est.d, formula, args.tolerance)],
        "diagnostics": {"levels": len(S), "arcs": len(polylines),
                        "vertices": int(sum(len(p) for p in polylines))},
    }


def cmd_spiral_dim(args) -> dict:
    K = args.codim
    r = args.r if args.r is not None else (2.0 if K == 1 else 1.0)
    if K >= 2 and r != 1.0:
        raise UsageError("codimension >= 2 requires the resonance ratio r = 1")
    if K == 1 and r == 1.0:
        raise UsageError("codimension 1 requires a ratio r != 1")
    grid = _grid(args, EpsGrid.default_2d())
    cfg = _fit_config(args)
    model = _usage(induced_away_model, K, r=r, C=args.C)
    S = _orbit(model, args)
    max_step, sagitta, resolution = _geometry_params(args, grid)
    polylines = _usage(assemble_spiral, S, r, args.delta, args.length, max_step, sagitta, resolution)
    est = box_dim_planar(polylines, grid, cfg, jobs=args.jobs)
    formula = spiral_dim_formula(K)
    candidates = sorted(cyclicity_candidates(formula))
    print(f"cyclicity candidates for d = {formula}: {{{', '.join(map(str, candidates))}}}",
          file=sys.stderr)
    return {
        "estimates": [_estimate_entry("spiral", est)],
        "formula": {"spiral_dim": float(formula), "spiral_dim_exact": str(formula),
                    "cyclicity_candidates": candidates},
        "checks": [_check("spiral_dim", est.d, formula, args.tolerance)],
        "diagnostics": {"orbit_points": len(S), "polylines": len(polylines), "r": r},
    }


def dulac_closed_form(fld: NormalFormField, s: float) -> float:
    """Exact Dulac map for linear fields and for ``p = q = 1`` with ``a_2`` only.

    With ``u = x y`` the flow is ``u' = a_2 u^2`` (Riccati) and the passage
    time from ``{y = delta}`` to ``{x = delta}`` is ``log(delta / s)``.
    """
    d = fld.delta
    t = math.log(d / s)
    if fld.is_linear:
        return d * (s / d) ** fld.r
    if fld.p == 1 and fld.q == 1 and not any(fld.coeffs[1:]):
        u0 = s * d
        return u0 / (1.0 - fld.coeffs[0] * u0 * t) / d
    raise DomainError("closed form needs a linear field or p = q = 1 with only a2")


def cmd_dulac_check(args) -> dict:
    coeffs = (args.a2,) + tuple(args.higher or ())
    fld = _usage(NormalFormField, p=args.p, q=args.q, coeffs=coeffs, delta=args.delta)
    s_values = args.s_values or [1e-1, 1e-2, 1e-3, 1e-4]
    rows = []
    for s in s_values:
        exact = _usage(dulac_closed_form, fld, s)
        num = _usage(dulac_map, fld, s)
        rows.append({"s": s, "numeric": num, "closed_form": exact, "rel_error": abs(num - exact) / exact})
    worst = max(r["rel_error"] for r in rows)
    return {
        "estimates": rows,
        "formula": {"closed_form": "delta * (s/delta)^r" if fld.is_linear
                    else "s / (1 + a2 * s * delta * log(s/delta))"},
        "checks": [_check("max_rel_error", worst, 0.0, args.tolerance, worst <= args.tolerance)],
    }


def cmd_poincare_asym(args) -> dict:
    through = args.transversal == "through"
    r = args.r if args.r is not None else (2 if args.codim == 1 else 1)
    fld, R = _usage(codimension_scenario, args.codim, r=r)
    pmap = ThroughSaddleMap(fld, R) if through else OffSaddleMap(fld, R)
    grid = np.geomspace(args.s_min, args.s_max, args.samples)
    cfg = _fit_config(args)
    fit = _usage(fit_displacement, pmap, grid, cfg)
    target = _usage(displacement_asymptotics_formula, args.codim, r=r, through_saddle=through)
    return {
        "estimates": [{"key": fit.quantity, "exponent": fit.exponent, "has_log": fit.has_log,
                       "log_exponent": fit.log_exponent, "residual": fit.residual,
                       "epsilons": list(fit.s_values), "measures": list(fit.values)}],
        "formula": {"exponent": float(target.exponent), "has_log": target.has_log},
        "checks": [_check("exponent", fit.exponent, target.exponent, args.tolerance),
                   _check("log_flag", int(fit.has_log), int(target.has_log), 0.0)],
    }


def cmd_linearize_check(args) -> dict:
    if args.order < 2:
        raise UsageError("order N must be at least 2")
    coeffs = (args.a2,) + (0.0,) * (args.order - 2)
    fld = _usage(NormalFormField, p=args.p, q=args.q, coeffs=(args.a2,))
    flow = _usage(compute_g_polynomials, coeffs)
    dev = _usage(verify_curve_mapping, fld, flow, args.s, args.samples)
    h = args.boundary
    probes = [(x, h) for x in (0.25, 0.5, 1.0)] + [(h, y) for y in (0.25, 0.5, 1.0)]
    jac = [float(jacobian_F(args.p, args.q, flow, x, y)[1, 1]) for x, y in probes]
    jac_dev = max(abs(v - 1.0) for v in jac)
    pts = np.linspace(-1.0, 1.0, 17)
    axes_fixed = all(F_map(args.p, args.q, flow, float(v), 0.0) == (float(v), 0.0)
                     and F_map(args.p, args.q, flow, 0.0, float(v)) == (0.0, float(v)) for v in pts)
    return {
        "estimates": [{"key": "curve_deviation", "value": dev},
                      {"key": "jacobian_dyF2", "probes": [list(p) for p in probes], "values": jac}],
        "formula": {"curve_deviation": 0.0, "jacobian_dyF2": 1.0},
        "checks": [_check("curve_deviation", dev, 0.0, args.tolerance, dev < args.tolerance),
                   _check("jacobian_limit", jac_dev, 0.0, args.jacobian_tolerance,
                          jac_dev <= args.jacobian_tolerance),
                   _check("axes_fixed", int(axes_fixed), 1, 0.0)],
    }


# --------------------------------------------------------------------------- output

def write_measure_csv(path, estimates) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["key", "epsilon", "measure"])
        for est in estimates:
            for e, m in zip(est.get("epsilons", ()), est.get("measures", ())):
                w.writerow([est["key"], repr(float(e)), repr(float(m))])


def _fitted_line(est: dict, L: np.ndarray) -> np.ndarray | None:
    eps = np.log(np.asarray(est["epsilons"], dtype=float))
    y = np.log(np.asarray(est["measures"], dtype=float))
    if "d_raw" in est:
        slope = est["ambient"] - est["d_raw"]
        lam = est["log_exponent"]
    elif "exponent" in est:
        slope, lam = est["exponent"], est["log_exponent"]
    else:
        return None
    c = float(np.mean(y - slope * eps - lam * np.log(-eps)))
    return slope * L + lam * np.log(-L) + c


def write_svg(path, estimates, title: str) -> None:
    """Log-log scatter with the fitted curve; a display aid only."""
    W, H, pad = 480, 360, 48
    series = [e for e in estimates if e.get("epsilons")]
    if not series:
        raise DomainError("nothing to plot")
    xs = np.concatenate([np.log10(e["epsilons"]) for e in series])
    ys = np.concatenate([np.log10(e["measures"]) for e in series])
    x0, x1 = xs.min(), xs.max()
    y0, y1 = ys.min(), ys.max()
    span_x = (x1 - x0) or 1.0
    span_y = (y1 - y0) or 1.0

    def px(x):
        return pad + (x - x0) / span_x * (W - 2 * pad)

    def py(y):
        return H - pad - (y - y0) / span_y * (H - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">',
             f'<rect width="{W}" height="{H}" fill="white"/>',
             f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="13">{title}</text>',
             f'<line x1="{pad}" y1="{H - pad}" x2="{W - pad}" y2="{H - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H - pad}" stroke="black"/>',
             f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle" font-size="11">log10 eps</text>',
             f'<text x="14" y="{H / 2}" font-size="11" transform="rotate(-90 14 {H / 2})">'
             'log10 measure</text>']
    for est in series:
        lx = np.log10(est["epsilons"])
        ly = np.log10(est["measures"])
        for a, b in zip(lx, ly):
            parts.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="steelblue"/>')
        L = np.linspace(np.min(np.log(est["epsilons"])), np.max(np.log(est["epsilons"])), 64)
        fit = _fitted_line(est, L)
        if fit is not None:
            pts = " ".join(f"{px(a / math.log(10)):.2f},{py(b / math.log(10)):.2f}"
                           for a, b in zip(L, fit))
            parts.append(f'<polyline points="{pts}" fill="none" stroke="crimson"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(parts) + "\n")


def _fingerprint(report: dict) -> str:
    """Serialized numbers that must agree between a run and its replay."""
    return json.dumps({k: report[k] for k in ("estimates", "formula", "checks")}, sort_keys=True)


# --------------------------------------------------------------------------- parser

def _add_fit_flags(p):
    p.add_argument("--threshold", type=float, default=1.25,
                   help="PowerLog must reduce the Power residual by this factor")
    p.add_argument("--residual-floor", type=float, default=1e-4,
                   help="Power residual below which PowerLog is never selected")
    p.add_argument("--drop-largest", type=int, default=2, help="coarsest scales left out of the fit")


def _add_grid_flags(p):
    p.add_argument("--eps-first", type=int, default=None, help="finest grid is 2^-eps-last ...")
    p.add_argument("--eps-last", type=int, default=None, help="... coarsest is 2^-eps-first")


def _add_orbit_flags(p, default_model="parabolic"):
    p.add_argument("--model", choices=[v.value for v in Variant], default=default_model)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--s0", type=float, default=0.5)
    p.add_argument("--max-points", type=int, default=100_000)
    p.add_argument("--floor", type=float, default=1e-9)


def _add_geometry_flags(p):
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--max-step", type=float, default=1 / 64)
    p.add_argument("--sagitta", type=float, default=None,
                   help="chord error bound; default eps_min/16, 0 disables")
    p.add_argument("--resolution", type=float, default=None,
                   help="level thinning resolution; default eps_min/2, 0 disables")
    p.add_argument("--jobs", type=int, default=1, help="threads over the scale grid")


def _add_io_flags(p, measures: bool = True):
    p.add_argument("-o", "--output", default=None, help="JSON report path (default: stdout)")
    p.add_argument("--replay", default=None, help="re-run the parameters stored in a report")
    if measures:
        p.add_argument("--csv", default=None, help="write (key, epsilon, measure) rows")
        p.add_argument("--plot", default=None, help="write a log-log SVG")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="saddle-fractal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--replay", dest="replay_top", default=None,
                        help="re-run a stored report without naming the subcommand")
    parser.add_argument("-o", "--output", dest="output_top", default=None)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("orbit-dim", help="box dimension of a 1-D orbit")
    _add_orbit_flags(p)
    _add_grid_flags(p)
    _add_fit_flags(p)
    p.add_argument("--tolerance", type=float, default=0.03)
    _add_io_flags(p)
    p.set_defaults(func=cmd_orbit_dim)

    p = sub.add_parser("hyperbola-dim", help="box dimension of a hyperbola family x^r y = c")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--level", type=float, default=None, help="single level instead of an orbit")
    _add_orbit_flags(p)
    _add_geometry_flags(p)
    _add_grid_flags(p)
    _add_fit_flags(p)
    p.add_argument("--tolerance", type=float, default=0.05)
    _add_io_flags(p)
    p.set_defaults(func=cmd_hyperbola_dim)

    p = sub.add_parser("spiral-dim", help="box dimension of the model spiral of codimension K")
    p.add_argument("--codim", type=int, required=True)
    p.add_argument("--r", type=float, default=None, help="hyperbolicity ratio (2 for K=1, else 1)")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--length", type=float, default=1.0, help="flow-box segment length")
    p.add_argument("--s0", type=float, default=0.5)
    p.add_argument("--max-points", type=int, default=100_000)
    p.add_argument("--floor", type=float, default=1e-9)
    _add_geometry_flags(p)
    _add_grid_flags(p)
    _add_fit_flags(p)
    p.add_argument("--tolerance", type=float, default=0.05)
    _add_io_flags(p)
    p.set_defaults(func=cmd_spiral_dim)

    p = sub.add_parser("dulac-check", help="numeric Dulac map against its closed form")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--a2", type=float, default=-1.0)
    p.add_argument("--higher", type=float, nargs="*", default=None, help="a3, a4, ...")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--s-values", type=float, nargs="+", default=None)
    p.add_argument("--tolerance", type=float, default=1e-8)
    _add_io_flags(p, measures=False)
    p.set_defaults(func=cmd_dulac_check)

    p = sub.add_parser("poincare-asym", help="fitted asymptotics of the first-return map")
    p.add_argument("--codim", type=int, required=True)
    p.add_argument("--r", type=int, default=None, help="integer ratio for codimension 1 (default 2)")
    p.add_argument("--transversal", choices=["through", "off"], default="through")
    p.add_argument("--s-min", type=float, default=1e-6)
    p.add_argument("--s-max", type=float, default=1e-2)
    p.add_argument("--samples", type=int, default=40)
    _add_fit_flags(p)
    p.add_argument("--tolerance", type=float, default=0.1)
    _add_io_flags(p)
    p.set_defaults(func=cmd_poincare_asym)

    p = sub.add_parser("linearize-check", help="orbital linearization against the integrated flow")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--a2", type=float, default=-1.0)
    p.add_argument("--order", type=int, default=6, help="series order N")
    p.add_argument("--s", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--boundary", type=float, default=2.0**-20, help="distance of Jacobian probes")
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--jacobian-tolerance", type=float, default=1e-3)
    _add_io_flags(p, measures=False)
    p.set_defaults(func=cmd_linearize_check)
    return parser


def _load_replay(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        report = json.load(fh)
    if report.get("schema") != SCHEMA:
        raise UsageError(f"unsupported report schema {report.get('schema')!r}")
    return report


def _namespace_for(parser, command: str, params: dict, io: argparse.Namespace) -> argparse.Namespace:
    ns = parser.parse_args([command] + _required_stub(command, params))
    for k, v in params.items():
        setattr(ns, k, v)
    for k in ("output", "csv", "plot", "jobs"):
        if getattr(io, k, None) is not None:
            setattr(ns, k, getattr(io, k))
    return ns


def _required_stub(command: str, params: dict) -> list[str]:
    return ["--codim", str(params["codim"])] if "codim" in params else []


def run(args) -> tuple[int, dict]:
    params = {k: v for k, v in vars(args).items()
              if k not in IO_KEYS and not k.endswith("_top")}
    t0 = time.perf_counter()
    result = args.func(args)
    wall = time.perf_counter() - t0
    checks = result["checks"]
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "parameters": params,
        **result,
        "pass": all(c["pass"] for c in checks),
        "wall_time": wall,
        "backend": backend(),
        "version": __version__,
    }
    return (0 if report["pass"] else 1), report


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    replay_path = args.replay_top or getattr(args, "replay", None)
    try:
        stored = None
        if replay_path:
            stored = _load_replay(replay_path)
            if args.command not in (None, stored["command"]):
                raise UsageError(f"report was made by {stored['command']!r}, not {args.command!r}")
            io = args
            if args.command is None:
                io = argparse.Namespace(output=args.output_top, csv=None, plot=None, jobs=None)
            args = _namespace_for(parser, stored["command"], stored["parameters"], io)
        elif args.command is None:
            parser.print_usage(sys.stderr)
            print("saddle-fractal: error: a subcommand or --replay is required", file=sys.stderr)
            return 2
        code, report = run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"saddle-fractal: error: {exc}", file=sys.stderr)
        return 2
    except (FitError, IntegrationError, DomainError, FloatingPointError, ZeroDivisionError) as exc:
        log.error("numeric failure: %s", exc)
        print(f"saddle-fractal: numeric failure: {exc}", file=sys.stderr)
        return 1
    if stored is not None:
        same = _fingerprint(report) == _fingerprint(stored)
        report["replay"] = {"source": replay_path, "identical": same}
        if not same:
            log.error("replay differs from the stored report")
            code = 1
    text = json.dumps(report, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if getattr(args, "csv", None):
        write_measure_csv(args.csv, report["estimates"])
    if getattr(args, "plot", None):
        write_svg(args.plot, report["estimates"], f"{args.command}")
    for c in report["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}: {c['value']!r} "
              f"(target {c['target']!r}, tol {c['tolerance']!r})", file=sys.stderr)
    return code
