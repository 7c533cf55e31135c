"""Command-line front end: ``ricci-forge <command> [options]``.

Exit status: 0 all checks passed, 1 a verification check failed (the report
is still written), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .analysis.null_curves import integrate_null_curve, null_slopes
from .analysis.scan import ModelRef, Tolerances, parse_grid, scan
from .analysis.singularities import catalog, classify_singularity, find_locus
from .analysis.slices import slice_metric
from .errors import RicciForgeError, UsageError
from .models import BUILTIN_NAMES, CORRUPTIONS, Margins, builtin, corrupted, random_events
from .pipeline import EQUATIONS, ResidualReport, residual_ode7, residual_reduced
from .quadrature import QuadratureSpec
from .report import to_csv, to_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

RESIDUAL_TOLS = {"ode7": 1e-9, "eq27": 1e-8, "eq28": 1e-5, "eq29": 1e-8, "eq30": 1e-5}

# options that never change the numbers in a report
_NOT_CONFIG = {"out", "config", "workers", "command", "handler"}


# -- small parsers -------------------------------------------------------------

def _kv_pairs(text: str, what: str) -> dict[str, float]:
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            k, v = item.split("=", 1)
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"bad {what} {item!r}; expected key=value") from None
    return out


def _params(items: Sequence[str] | None) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in items or ():
        out.update(_kv_pairs(item, "--param"))
    return out


def read_config(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; keys use flag names with - or _."""
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _apply_config(parser: argparse.ArgumentParser, values: dict[str, str]) -> None:
    actions = {a.dest: a for a in parser._actions}
    defaults: dict[str, Any] = {}
    for key, raw in values.items():
        act = actions.get(key)
        if act is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(act, argparse._AppendAction):
            defaults[key] = [s.strip() for s in raw.split(";") if s.strip()]
        elif isinstance(act, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            conv = act.type or str
            try:
                defaults[key] = conv(raw)
            except (TypeError, ValueError):
                raise UsageError(f"bad value for config key {key!r}: {raw!r}") from None
            if act.choices is not None and defaults[key] not in act.choices:
                raise UsageError(f"config key {key!r} must be one of {list(act.choices)}")
    parser.set_defaults(**defaults)


# -- shared pieces ---------------------------------------------------------------

def _model(args):
    params = _params(args.param)
    model = builtin(args.model, **params)
    corrupt = getattr(args, "corrupt", None)
    if corrupt and args.command != "derive-check":
        model = corrupted(model, corrupt)
    ref = ModelRef(args.model, tuple(sorted(params.items())), corrupt if args.command != "derive-check" else None)
    return model, ref


def _margins(args) -> Margins:
    return Margins(args.sin_t_floor, args.cos_t_floor, args.x_floor)


def _tolerances(args) -> Tolerances:
    return Tolerances(ricci_tol=args.ricci_tol, riemann_tol=args.riemann_tol, det_tol=args.det_tol)


def _config_dict(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def _envelope(args, model_name: str, results: Any, summary: dict) -> dict:
    return {"tool_version": __version__, "model": model_name, "config": _config_dict(args),
            "results": results, "summary": summary}


def _write(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")


def _checks_csv(args, model_name: str, checks: dict, summary: dict) -> str:
    rows = [(name, c["value"], c["tol"], c["pass"]) for name, c in sorted(checks.items())]
    meta = {"tool_version": __version__, "model": model_name, "passed": summary.get("passed")}
    return to_csv(["check", "value", "tol", "pass"], rows, meta)


# -- commands ------------------------------------------------------------------

def cmd_verify(args) -> int:
    model, ref = _model(args)
    rep = scan(model, args.grid, _tolerances(args), _margins(args), args.workers, ref)
    summary = dict(rep.summary, passed=rep.passed)
    worst = sorted(rep.records, key=lambda r: -r.ricci_rel)[:5]
    results = {"grid": rep.grid.to_dict(), "grid_spec": str(rep.grid), "checks": rep.checks,
               "worst_ricci_events": [r.to_dict() for r in worst]}
    if args.format == "csv":
        _write(args, _checks_csv(args, model.name, rep.checks, summary))
    else:
        _write(args, to_json(_envelope(args, model.name, results, summary)))
    return EXIT_OK if rep.passed else EXIT_FAIL


_SCAN_COLUMNS = ["t", "x", "y", "z", "det", "det_closed_form", "det_rel_err", "D1", "D2", "D3", "D4",
                 "minors_alternate", "scale", "ricci_rel", "riemann_rel", "off_pattern_rel",
                 "riemann_pattern", "kretschmann", "kretschmann_rel"]


def cmd_scan(args) -> int:
    model, ref = _model(args)
    rep = scan(model, args.grid, _tolerances(args), _margins(args), args.workers, ref)
    summary = dict(rep.summary, passed=rep.passed, checks=rep.checks)
    if args.format == "csv":
        rows = [[*r.coords, r.det, r.det_closed_form, r.det_rel_err, *r.minors, r.minors_alternate,
                 r.scale, r.ricci_rel, r.riemann_rel, r.off_pattern_rel, r.riemann_pattern,
                 r.kretschmann, r.kretschmann_rel] for r in rep.records]
        meta = {"tool_version": __version__, "model": model.name, "grid": str(rep.grid),
                "passed": rep.passed}
        _write(args, to_csv(_SCAN_COLUMNS, rows, meta))
    else:
        _write(args, to_json(_envelope(args, model.name, rep.to_dict(), summary)))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_derive_check(args) -> int:
    model = builtin(args.model, **_params(args.param))
    if model.generators is None:
        raise UsageError(f"{model.name} is not a family model; derive-check needs generating functions")
    gen = model.generators
    quad = QuadratureSpec(y0=args.y0, abs_tol=args.quad_tol) if args.quadrature else None
    rng = np.random.default_rng(args.seed)
    events = random_events(model, args.samples, rng, _margins(args))
    v_tr = V_tr = None
    if args.corrupt == "v":
        v_tr = CORRUPTIONS["v"]["v_transform"]
    elif args.corrupt == "V":
        V_tr = CORRUPTIONS["V"]["V_transform"]

    tols = dict(RESIDUAL_TOLS)
    tols.update(_params(args.residual_tol))
    reports = {eq: ResidualReport(eq) for eq in EQUATIONS}
    for p in events:
        reports["ode7"].add(residual_ode7(gen, p, v_transform=v_tr, V_transform=V_tr))
        for eq in EQUATIONS[1:]:
            reports[eq].add(residual_reduced(gen, quad, eq, p[0], p[2], v_transform=V_tr))
    checks = {eq: {"value": r.max_relative, "tol": tols[eq], "pass": r.max_relative < tols[eq]}
              for eq, r in reports.items()}
    passed = all(c["pass"] for c in checks.values())
    summary = {"passed": passed, "samples": len(events),
               "max_relative": {eq: r.max_relative for eq, r in reports.items()}}
    if args.format == "csv":
        _write(args, _checks_csv(args, model.name, checks, summary))
    else:
        results = {"checks": checks, "residuals": {eq: r.to_dict() for eq, r in reports.items()},
                   "V_mode": "quadrature" if quad or not hasattr(gen.V_mode, "V") else "closed_form"}
        _write(args, to_json(_envelope(args, model.name, results, summary)))
    return EXIT_OK if passed else EXIT_FAIL


def _point_spec(text: str, what: str) -> dict[str, float]:
    vals = _kv_pairs(text, what)
    bad = set(vals) - {"t", "x", "rho"}
    if bad:
        raise UsageError(f"{what} accepts t, x or rho, got {sorted(bad)}")
    return vals


def cmd_null_curve(args) -> int:
    model, _ = _model(args)
    start = _point_spec(args.start, "--start")
    to = _point_spec(args.to, "--to")
    if "t" not in start:
        raise UsageError("--start needs t=...")
    coordinate = "rho" if "rho" in start or "rho" in to else "x"
    if coordinate not in start or coordinate not in to or len(to) != 1:
        raise UsageError(f"--start and --to must both give {coordinate}=...")
    curve = integrate_null_curve(model, start["t"], start[coordinate], to[coordinate], args.step,
                                 coordinate, args.y, args.z, float(np.sign(args.x_sign) or 1.0),
                                 args.cap)
    summary = {"samples": len(curve.samples), "halted": curve.halted,
               "halt_reason": curve.halt_reason, "final": curve.final,
               "max_relative_residual": curve.max_relative_residual(),
               "start_slopes": list(null_slopes(model, (start["t"], curve.start["x"], args.y, args.z)))}
    fmt = args.format or "csv"
    if fmt == "csv":
        meta = {"tool_version": __version__, "model": model.name, "coordinate": coordinate,
                "plane": f"y={args.y:.17g},z={args.z:.17g}", "integrator": f"RK4 step={args.step:.17g}",
                "halted": curve.halted, "halt_reason": curve.halt_reason or ""}
        # in x mode the parameter column would repeat x
        lead = ["rho"] if coordinate == "rho" else []
        cols = lead + ["x", "t", "slope", "residual", "relative_residual"]
        rows = [([s["param"]] if lead else []) + [s["x"], s["t"], s["slope"], s["residual"],
                                                   s["relative_residual"]]
                for s in curve.samples]
        _write(args, to_csv(cols, rows, meta))
    else:
        _write(args, to_json(_envelope(args, model.name, curve.to_dict(), summary)))
    return EXIT_OK


def cmd_slice(args) -> int:
    model, _ = _model(args)
    default = "x=0.5:2.5:5" if model.name.startswith("example3") else "x=-1:1:5"
    grid = parse_grid(args.grid or "", default + ",y=-1:1:5,t=0:0:1,z=0:0:1")
    xs, ys = grid.axes[1].values(), grid.axes[2].values()
    if model.name.startswith("example3") and any(abs(x) < args.x_floor for x in xs):
        raise UsageError("slice grid touches x = 0, where example3 is singular")
    sl = slice_metric(model, args.t, xs, ys, args.z)
    summary = {"flags": sl.flags, "degenerate": sl.degenerate,
               "max_abs_g22": float(np.max(np.abs(sl.g22))), "max_abs_g33": float(np.max(np.abs(sl.g33)))}
    if args.format == "csv":
        rows = [[x, y, sl.g22[i][j], sl.g33[i][j]] for i, x in enumerate(xs) for j, y in enumerate(ys)]
        meta = {"tool_version": __version__, "model": model.name, "t": args.t, "z": args.z,
                "flags": ";".join(sl.flags)}
        _write(args, to_csv(["x", "y", "g22", "g33"], rows, meta))
    else:
        _write(args, to_json(_envelope(args, model.name, sl.to_dict(), summary)))
    return EXIT_OK


def cmd_classify(args) -> int:
    model, _ = _model(args)
    loci = catalog(model) if args.locus in (None, "all") else [find_locus(model, args.locus)]
    verdicts = [classify_singularity(model, loc) for loc in loci]
    summary = {"verdicts": {v.locus: v.kind for v in verdicts},
               "matches_expected": {v.locus: v.kind == v.evidence["expected"]
                                    for v in verdicts if "expected" in v.evidence}}
    if args.format == "csv":
        cols = ["locus", "kind", "expected", "det_first", "det_last", "metric_ratio",
                "riemann_first", "riemann_last", "riemann_ratio", "kretschmann_last"]
        rows = []
        for v in verdicts:
            e = v.evidence
            rows.append([v.locus, v.kind, e.get("expected"), e["det_limit"]["first"],
                         e["det_limit"]["last"], e["metric_limit"]["ratio"],
                         e["riemann_component_limit"]["first"], e["riemann_component_limit"]["last"],
                         e["riemann_component_limit"]["ratio"], e["kretschmann_limit"]["last"]])
        _write(args, to_csv(cols, rows, {"tool_version": __version__, "model": model.name}))
    else:
        _write(args, to_json(_envelope(args, model.name, [v.to_dict() for v in verdicts], summary)))
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, fmt_default: str | None = "json") -> None:
    p.add_argument("--model", default="example1", help=f"one of: {', '.join(BUILTIN_NAMES)}")
    p.add_argument("--param", action="append", metavar="K=V",
                   help="model parameter, e.g. c1=1 or mass=2 (repeatable)")
    p.add_argument("--grid", default=None, metavar="SPEC", help="axis=min:max:count, comma-joined")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=fmt_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None, help="key = value file; flags override it")
    p.add_argument("--sin-t-floor", type=float, default=Margins.sin_t_floor)
    p.add_argument("--cos-t-floor", type=float, default=Margins.cos_t_floor)
    p.add_argument("--x-floor", type=float, default=Margins.x_floor)
    p.add_argument("--ricci-tol", type=float, default=Tolerances.ricci_tol)
    p.add_argument("--riemann-tol", type=float, default=Tolerances.riemann_tol)
    p.add_argument("--det-tol", type=float, default=Tolerances.det_tol)
    p.add_argument("--workers", type=int, default=1, help="process pool size for scans")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ricci-forge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="vacuum, determinant and curvature checks on a grid")
    _common(p)
    p.add_argument("--corrupt", choices=sorted(CORRUPTIONS), default=None,
                   help="negative control: v -> 2v+1 or V -> V+0.1 in the assembled metric")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("scan", help="per-event grid report")
    _common(p)
    p.add_argument("--corrupt", choices=sorted(CORRUPTIONS), default=None)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("derive-check", help="residuals of the reduction chain at random events")
    _common(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--corrupt", choices=sorted(CORRUPTIONS), default=None,
                   help="negative control: v -> 2v+1 (ode7) or V -> V+0.1 (all equations)")
    p.add_argument("--quadrature", action="store_true", help="build V by quadrature instead of closed form")
    p.add_argument("--y0", type=float, default=0.0, help="quadrature base point")
    p.add_argument("--quad-tol", type=float, default=1e-12)
    p.add_argument("--residual-tol", action="append", metavar="EQ=TOL",
                   help=f"override a residual tolerance; defaults {RESIDUAL_TOLS}")
    p.set_defaults(handler=cmd_derive_check)

    p = sub.add_parser("null-curve", help="integrate the sloped null branch in the (t, x) plane")
    _common(p, fmt_default=None)
    p.add_argument("--start", required=True, help="t=T,x=X or t=T,rho=R")
    p.add_argument("--to", required=True, help="x=X or rho=R")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--y", type=float, default=0.0)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--x-sign", type=float, default=1.0, help="branch of x = +-e^(rho/2)")
    p.add_argument("--cap", type=float, default=1e6, help="halt when |dt/dx| exceeds this")
    p.set_defaults(handler=cmd_null_curve)

    p = sub.add_parser("slice", help="induced metric of a t-slice over an (x, y) grid")
    _common(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--z", type=float, default=0.0)
    p.set_defaults(handler=cmd_slice)

    p = sub.add_parser("classify", help="classify cataloged singular loci")
    _common(p)
    p.add_argument("--locus", default="all")
    p.set_defaults(handler=cmd_classify)
    return parser


def _validate(args) -> None:
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if getattr(args, "samples", 1) < 1:
        raise UsageError("--samples must be >= 1")
    _margins(args)
    _tolerances(args)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.config:
            subparser = parser._subparsers._group_actions[0].choices[args.command]
            _apply_config(subparser, read_config(args.config))
            args = parser.parse_args(argv)
        _validate(args)
        return args.handler(args)
    except RicciForgeError as exc:
        sys.stderr.write(f"ricci-forge: error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
