"""Command-line front end.

Subcommands: find, fig1, count, semiclassical, expand, oracle.  Every run can
be written as CSV or JSON (``--format``, ``--out``) and configured from a flat
key=value file (``--config``) whose values are overridden by explicit flags.

Exit codes: 0 success, 1 consistency failure (solver/oracle disagreement or a
failed inequality), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import expansion as ex
from . import semiclassical as sc
from .model import EIGHT_PI, BoundaryCondition, ModelParams
from .oracle import Rectangle, WindingError, count_zeros_half_disk, winding_count
from .solver import (
    ConsistencyError,
    ResonanceKind,
    count_exact,
    detect_zero,
    find_all,
    find_branch,
    gamma_residual,
    on_curve_error,
    total_multiplicity,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Bad flag or config value; reported with exit code 2."""


# ------------------------------------------------------------ parsing


def parse_alpha(value, bc, y3: float) -> float:
    """A float, or one of the tags critical-, critical+, lnpi2k:<k>."""
    text = str(value).strip().lower()
    if text in ("critical-", "critical+"):
        s = -1.0 if text.endswith("-") else 1.0
        return s / (EIGHT_PI * y3)
    if text.startswith("lnpi2k:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError as err:
            raise UsageError(f"bad alpha tag {value!r}") from err
        if k < 0:
            raise UsageError("lnpi2k needs k >= 0")
        return math.log(math.pi / 2 + k * math.pi) / (EIGHT_PI * y3)
    try:
        a = float(text)
    except ValueError as err:
        raise UsageError(f"alpha must be a number or tag, got {value!r}") from err
    if not math.isfinite(a):
        raise UsageError("alpha must be finite")
    return a


def read_config(path: str) -> dict[str, str]:
    """key=value lines ('#' comments), or the JSON written by a previous run."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        cfg = data.get("config", data)
        return {str(k): v for k, v in cfg.items() if k not in ("command", "config", "out", "format")}
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as err:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from err
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} numbers, got {text!r}")
    return vals


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RESONANCE_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ------------------------------------------------------------- output


def fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return {True: "true", False: "false", None: ""}[v]
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.16e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(command: str, config: dict, rows: list[dict], fmt_name: str, extra: dict | None = None) -> str:
    if fmt_name == "json":
        doc = {"command": command, "config": config, "rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for r in rows:
            writer.writerow([fmt(v) for v in r.values()])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------- commands


def _model(args) -> ModelParams:
    if not args.y3 > 0:
        raise UsageError("y3 must be positive")
    alpha = parse_alpha(args.alpha, args.bc, args.y3)
    return ModelParams.from_height(args.bc, alpha, args.y3)


def _base_config(args) -> dict:
    return {"bc": BoundaryCondition.parse(args.bc).value, "alpha": str(args.alpha), "y3": args.y3}


def resonance_row(params: ModelParams, r) -> dict:
    on_curve = math.nan if r.kind is ResonanceKind.ANTIBOUND else on_curve_error(params, r.z)
    return {
        "re": float(r.z.real),
        "im": float(r.z.imag),
        "kind": r.kind.value,
        "branch": r.branch,
        "multiplicity": r.multiplicity,
        "gamma_residual": gamma_residual(params, r.z),
        "on_curve_error": on_curve,
    }


def cmd_find(args) -> int:
    params = _model(args)
    if not args.rmax > 0:
        raise UsageError("rmax must be positive")
    res = find_all(params, args.rmax)
    rows = [resonance_row(params, r) for r in res]
    extra = {}
    status = EXIT_OK
    if not args.no_oracle:
        w = count_zeros_half_disk(params, args.rmax, include_origin=detect_zero(params) is not None)
        solver_count = total_multiplicity(res if not w.offset else find_all(params, args.rmax + w.offset))
        extra = {"oracle_count": w.count, "solver_count": solver_count}
        if w.count != solver_count:
            print(f"solver count {solver_count} != oracle count {w.count}", file=sys.stderr)
            status = EXIT_FAIL
    config = _base_config(args) | {"rmax": args.rmax}
    emit(render("find", config, rows, args.format, extra), args.out)
    return status


def figure_resonances(params: ModelParams, count: int = 100, re_min: float = math.pi):
    """The first ``count`` zeros with Re z > re_min, in order of real part."""
    out = []
    k = 1 if params.bc is BoundaryCondition.DIRICHLET else 0
    while len(out) < count:
        r = find_branch(params, k)[0]
        if r.z.real > re_min:
            out.append(r)
        k += 1
    return out


def cmd_fig1(args) -> int:
    params = _model(args)
    t0 = time.perf_counter()
    res = figure_resonances(params, args.count)
    elapsed = time.perf_counter() - t0
    out = args.out or "fig1.dat"
    lines = [f"{r.z.real:.16e} {r.z.imag:.16e}" for r in res]
    Path(out).write_text("\n".join(lines) + "\n")
    resid = [gamma_residual(params, r.z) for r in res]
    curve = [on_curve_error(params, r.z) for r in res]
    sidecar = {
        "config": _base_config(args) | {"count": args.count},
        "rows": len(res),
        "max_gamma_residual": max(resid),
        "max_on_curve_error": max(curve),
        "gamma_residual": resid,
        "on_curve_error": curve,
        "seconds": elapsed,
    }
    Path(out + ".json").write_text(json.dumps(_jsonable(sidecar), indent=2) + "\n")
    ok = max(resid) <= 1e-12 and max(curve) <= 1e-10
    print(f"wrote {len(res)} rows to {out} (max residual {max(resid):.3g})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_count(args) -> int:
    params = _model(args)
    grid = _floats(args.grid) if args.grid else [args.rmax]
    if any(not R > 0 for R in grid):
        raise UsageError("radii must be positive")
    try:
        reports = _pmap(lambda R: count_exact(params, R, slack=args.slack, use_oracle=not args.no_oracle), grid)
    except ConsistencyError as err:
        print(str(err), file=sys.stderr)
        return EXIT_FAIL
    rows = [
        {
            "R": float(r.R),
            "exact_count": r.exact_count,
            "asymptotic_count": r.asymptotic_count,
            "oracle_count": r.oracle_count,
            "slack": r.slack,
            "within_slack": r.within_slack,
            "ratio": r.exact_count / (2 * params.y3 * r.R / math.pi),
        }
        for r in reports
    ]
    config = _base_config(args) | {"grid": ",".join(fmt(R) for R in grid), "slack": args.slack}
    emit(render("count", config, rows, args.format), args.out)
    return EXIT_OK if all(r.within_slack for r in reports) else EXIT_FAIL


def _sc_report(bc, sign, h, beta, eps, y3, envelope):
    p = sc.SemiclassicalParams(h, beta, sign, bc, y3)
    if beta < 1:
        return sc.verify_band_beta_lt1(p, eps)
    return sc.verify_parabola_beta_gt1(p, eps, envelope=envelope)


def cmd_semiclassical(args) -> int:
    if args.beta == 1 or not args.beta > 0:
        raise UsageError("beta must be positive and different from 1")
    if not 0 < args.eps < 1:
        raise UsageError("eps must lie in (0, 1)")
    if not 0 < args.h <= 1:
        raise UsageError("h must lie in (0, 1]")
    signs = ["plus", "minus"] if args.sign == "both" else [args.sign]
    reports = _pmap(lambda s: _sc_report(args.bc, s, args.h, args.beta, args.eps, args.y3, args.envelope), signs)
    rows = []
    for rep in reports:
        for c in rep.checks:
            rows.append(
                {
                    "sign": rep.params.sign.value,
                    "h": rep.params.h,
                    "beta": rep.params.beta,
                    "branch": c.branch,
                    "re": c.z.real,
                    "im": c.z.imag,
                    "value": c.value,
                    "lower": c.lower,
                    "upper": c.upper,
                    "lower_ok": c.lower_ok,
                    "upper_ok": c.upper_ok,
                    "slack": c.slack,
                }
            )
    summary = [
        {
            "sign": rep.params.sign.value,
            "n_roots": rep.n_roots,
            "failed": sum(not c.ok for c in rep.checks),
            "max_slack": rep.max_slack,
            "max_direct_diff": rep.max_direct_diff,
            "max_residual": rep.max_residual,
            "tail_ok": rep.tail_ok,
            "window_ok": rep.window_ok,
        }
        for rep in reports
    ]
    config = {
        "bc": BoundaryCondition.parse(args.bc).value,
        "y3": args.y3,
        "h": args.h,
        "beta": args.beta,
        "eps": args.eps,
        "sign": args.sign,
        "envelope": args.envelope,
    }
    emit(render("semiclassical", config, rows, args.format, {"summary": summary}), args.out)
    for s in summary:
        print(
            f"{s['sign']}: {s['n_roots']} roots, {s['failed']} failed, max slack {s['max_slack']:.3g}",
            file=sys.stderr,
        )
    ok = all(s["failed"] == 0 and s["tail_ok"] for s in summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_expand(args) -> int:
    params = _model(args)
    x = _floats(args.x, 3)
    xp = _floats(args.xp, 3)
    if not (x[2] > 0 and xp[2] > 0):
        raise UsageError("points must lie in the half-space x3 > 0")
    if not args.t > 0:
        raise UsageError("t must be positive")
    try:
        k = ex.schrodinger_kernel(params, args.t, x, xp, args.n_max)
    except ValueError as err:
        raise UsageError(str(err)) from err
    row = {
        "t": args.t,
        "n_terms": len(k.terms),
        "free_re": k.free_term.real,
        "free_im": k.free_term.imag,
        "residue_sum_re": k.residue_sum.real,
        "residue_sum_im": k.residue_sum.imag,
        "background_re": k.background.real,
        "background_im": k.background.imag,
        "total_re": k.total.real,
        "total_im": k.total.imag,
    }
    status = EXIT_OK
    if not args.no_oracle:
        o = ex.horizontal_contour_kernel(params, args.t, x, xp)
        delta = abs(o.total - k.total) / abs(k.total)
        row |= {"oracle_re": o.total.real, "oracle_im": o.total.imag, "oracle_delta": delta}
        if delta > args.tol:
            status = EXIT_FAIL
    config = _base_config(args) | {"t": args.t, "x": args.x, "xp": args.xp, "n_max": args.n_max}
    emit(render("expand", config, [row], args.format), args.out)
    return status


def cmd_oracle(args) -> int:
    params = _model(args)
    rects = args.rect or ["3.14,4.71,-3,-1e-6"]
    rows = []
    status = EXIT_OK
    for rect_text in rects:
        a, b, c, d = _floats(rect_text, 4)
        try:
            rect = Rectangle(a, b, c, d)
        except ValueError as err:
            raise UsageError(str(err)) from err
        try:
            w = winding_count(params, rect)
        except WindingError as err:
            print(f"{rect_text}: {err}", file=sys.stderr)
            status = EXIT_FAIL
            continue
        row = {
            "re_min": a,
            "re_max": b,
            "im_min": c,
            "im_max": d,
            "count": w.count,
            "raw_re": w.raw.real,
            "raw_im": w.raw.imag,
            "certified": w.certified,
            "offset": w.offset,
            "solver_count": None,
        }
        if d <= 0:
            # the solver covers the closed lower half-plane only
            R = math.hypot(max(abs(a), abs(b)), max(abs(c), abs(d))) + 1.0
            g = rect.grown(w.offset) if w.offset else rect
            inside = [
                r for r in find_all(params, R)
                if g.re_min < r.z.real < g.re_max and g.im_min < r.z.imag < g.im_max
            ]
            row["solver_count"] = total_multiplicity(inside)
            if row["solver_count"] != w.count:
                status = EXIT_FAIL
        rows.append(row)
    config = _base_config(args) | {"rect": rects}
    emit(render("oracle", config, rows, args.format), args.out)
    return status


# -------------------------------------------------------------- parser


def _add_model(p: argparse.ArgumentParser, alpha_default="0"):
    p.add_argument("--bc", default="dirichlet", choices=["dirichlet", "neumann"])
    p.add_argument("--alpha", default=alpha_default, help="number or tag: critical-, critical+, lnpi2k:<k>")
    p.add_argument("--y3", type=float, default=1.0, help="height of the interaction point")


def _add_output(p: argparse.ArgumentParser):
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--config", default=None, help="key=value file; explicit flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfspace-resonances",
        description="Resonances of a point interaction on the half-space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("find", help="list every resonance with |z| < rmax")
    _add_model(p)
    p.add_argument("--rmax", type=float, default=10.0)
    p.add_argument("--no-oracle", action="store_true", help="skip the argument-principle cross-check")
    _add_output(p)
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("fig1", help="plot data: first resonances with Re z > pi")
    _add_model(p)
    p.add_argument("--count", type=int, default=100)
    _add_output(p)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("count", help="resonance counts against the linear counting law")
    _add_model(p)
    p.add_argument("--rmax", type=float, default=100.0)
    p.add_argument("--grid", default=None, help="comma-separated radii (overrides --rmax)")
    p.add_argument("--slack", type=int, default=4)
    p.add_argument("--no-oracle", action="store_true")
    _add_output(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("semiclassical", help="band / parabola inequalities on Lambert-W roots")
    p.add_argument("--bc", default="dirichlet", choices=["dirichlet", "neumann"])
    p.add_argument("--y3", type=float, default=1.0)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--sign", default="both", choices=["plus", "minus", "both"])
    p.add_argument("--envelope", action="store_true", help="check the branch-free envelopes (beta > 1)")
    _add_output(p)
    p.set_defaults(func=cmd_semiclassical)

    p = sub.add_parser("expand", help="resonance expansion of the Schroedinger kernel")
    _add_model(p)
    p.add_argument("--t", type=float, default=2.0)
    p.add_argument("--x", default="0,0,1.5")
    p.add_argument("--xp", default="0,0,2")
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-6, help="relative tolerance against the contour check")
    p.add_argument("--no-oracle", action="store_true")
    _add_output(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("oracle", help="argument-principle counts on rectangles")
    _add_model(p)
    p.add_argument("--rect", action="append", help="re_min,re_max,im_min,im_max (repeatable)")
    _add_output(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    known = {a.dest: a for a in sub._actions}  # noqa: SLF001
    defaults = {}
    for key, val in cfg.items():
        key = key.replace("-", "_")
        if key not in known or key in ("help", "func", "config"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):  # noqa: SLF001
            val = val if isinstance(val, bool) else str(val).strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):  # noqa: SLF001
            val = list(val) if isinstance(val, list) else [v for v in str(val).split(";") if v.strip()]
        elif action.type is not None and not isinstance(val, (int, float)):
            val = action.type(val)
        defaults[key] = val
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if exc.code is not None else EXIT_OK
    except (UsageError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as err:
        print(f"consistency failure: {err}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        # reader closed early (e.g. piped into head)
        sys.stdout = None
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
