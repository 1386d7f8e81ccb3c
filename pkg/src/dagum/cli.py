"""Command-line front end.

    dagum eval      --delta 0.7 --lambda 1 --dim 2 --grid 0.01:100:10:log
    dagum compare   --delta 0.4 --lambda 1.25 --methods series,quadrature --grid ...
    dagum validate  --delta 0.5 --lambda 1 --dim 3
    dagum asymptote --delta 1.5 --lambda 1 --dim 1

Tables go to standard output (or ``--output``), diagnostics to standard
error. Exit status: 0 success, 1 invalid invocation, 2 when any row fell
back, did not converge, failed, or (for ``compare``) disagreed.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels, spectral, transforms
from .errors import DagumError
from .kernels import CauchyParams, DagumParams

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2

DENSITY_METHODS = ("auto", "series", "foxwright", "series-large", "asymptotic-low",
                   "asymptotic-high", "quadrature", "thm1", "thm2")
CAUCHY_METHODS = ("auto", "quadrature", "thm2")
CSV_HEADER = ("x", "value", "abs_error", "method", "detail", "status")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class EvalGrid:
    points: tuple[float, ...]
    spacing: str
    count: int
    text: str = ""


@dataclass(frozen=True)
class RunConfig:
    family: str
    delta: float
    lam: float
    dim: int
    quantity: str
    method: str
    tol: float
    fmt: str


@dataclass(frozen=True)
class Row:
    x: float
    value: float | None
    abs_error: float | None
    method: str
    detail: str
    status: str


def parse_grid(text: str) -> EvalGrid:
    """Parse ``start:stop:count[:log]`` into an increasing grid."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise UsageError(f"grid must be start:stop:count[:log], got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid must be start:stop:count[:log], got {text!r}") from None
    spacing = "log" if len(parts) == 4 and parts[3] == "log" else "linear"
    if count < 1:
        raise UsageError("grid count must be positive")
    if count == 1:
        if start != stop:
            raise UsageError("a one-point grid needs start == stop")
        return EvalGrid((start,), spacing, 1, text)
    if not stop > start:
        raise UsageError("grid needs stop > start")
    if spacing == "log":
        if start <= 0:
            raise UsageError("log grid needs start > 0")
        pts = np.logspace(math.log10(start), math.log10(stop), count)
    else:
        pts = np.linspace(start, stop, count)
    pts[0], pts[-1] = start, stop
    return EvalGrid(tuple(float(p) for p in pts), spacing, count, text)


def _params(cfg: RunConfig):
    try:
        if cfg.family == "cauchy":
            return CauchyParams(cfg.delta, cfg.lam, cfg.dim)
        return DagumParams(cfg.delta, cfg.lam, cfg.dim)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _check_method(cfg: RunConfig, method: str, grid: EvalGrid | None) -> None:
    if cfg.quantity == "cov":
        if method != "auto":
            raise UsageError("covariance is evaluated directly; use --method auto")
        if grid and min(grid.points) < 0:
            raise UsageError("covariance grid needs r >= 0")
        return
    if grid and min(grid.points) <= 0:
        raise UsageError("density grid needs z > 0")
    if cfg.family == "cauchy":
        if method not in CAUCHY_METHODS:
            raise UsageError(f"cauchy density supports methods {', '.join(CAUCHY_METHODS)}")
        if method != "quadrature" and not 0 < cfg.delta < 2:
            raise UsageError("imaginary-axis cauchy density needs delta < 2")
        return
    if method not in DENSITY_METHODS:
        raise UsageError(f"unknown method {method!r}")
    if method == "thm1" and cfg.dim != 1:
        raise UsageError("thm1 is the one-dimensional form; needs --dim 1")
    p = _params(cfg)
    if method != "quadrature":
        rep = kernels.classify_validity(p)
        if not rep.spectral_series_admissible:
            raise UsageError("density needs delta in (0,2) and delta*lambda in (0,2)")
    if method in ("series", "foxwright"):
        res = spectral.resonance_check(p)
        if res.resonant:
            raise UsageError(f"resonant parameters (n={res.offending_n}); "
                             f"series refused, use auto or quadrature")
    if method == "asymptotic-low":
        try:
            spectral.low_freq_law(p)
        except DagumError as e:
            raise UsageError(str(e)) from None
    if method == "asymptotic-high":
        try:
            spectral.high_freq_law(p)
        except DagumError as e:
            raise UsageError(str(e)) from None


def _from_spectral(v: spectral.SpectralValue, label: str | None = None) -> Row:
    status = "ok" if v.converged else "unconverged"
    if v.fallback:
        status = "fallback"
    # an unbounded error estimate is reported as missing, never as inf
    err = v.abs_error if math.isfinite(v.abs_error) else None
    return Row(v.z, v.value, err, label or str(v.method), f"terms={v.terms_used}", status)


def _from_quad(x: float, r: transforms.QuadratureReport, label: str) -> Row:
    detail = f"zeros={r.zeros_used}" + (";accelerated" if r.accelerated else "")
    return Row(x, r.value, r.abs_error, label, detail, "ok")


def evaluator(cfg: RunConfig, method: str) -> Callable[[float], Row]:
    """Row-producing function for one (config, method) pair."""
    p = _params(cfg)
    tol = cfg.tol
    if cfg.quantity == "cov":
        cov = kernels.cauchy_cov if cfg.family == "cauchy" else kernels.dagum_cov

        def ev_cov(r):
            v = cov(p, r)
            return Row(r, v, 4.0 * np.finfo(float).eps * abs(v), "direct", "closed-form", "ok")
        return ev_cov

    if cfg.family == "cauchy":
        if method == "quadrature":
            return lambda z: _from_quad(
                z, transforms.density_quadrature(lambda u: kernels.cauchy_cov(p, u), p.dim, z, tol),
                "quadrature")
        label = "thm2" if method == "thm2" else None
        return lambda z: _from_spectral(spectral.cauchy_density_reference(p, z, tol), label)

    table = {
        "auto": lambda z: _from_spectral(spectral.density_auto(p, z, tol)),
        "series": lambda z: _from_spectral(spectral.density_series_small_z(p, z, tol)),
        "foxwright": lambda z: _from_spectral(spectral.density_fox_wright(p, z, tol)),
        "series-large": lambda z: _from_spectral(spectral.density_series_large_z(p, z, tol)),
        "asymptotic-low": lambda z: _from_spectral(spectral.low_freq_asymptotic(p, z)),
        "asymptotic-high": lambda z: _from_spectral(spectral.high_freq_leading(p, z)),
        "quadrature": lambda z: _from_quad(
            z, transforms.density_quadrature(lambda u: kernels.dagum_cov(p, u), p.dim, z, tol),
            "quadrature"),
        "thm1": lambda z: _from_quad(z, transforms.imag_axis_density_d1(p, z, tol), "thm1"),
        "thm2": lambda z: _from_quad(z, transforms.imag_axis_density_dge2(p, z, tol), "thm2"),
    }
    return table[method]


def _safe_row(ev, x: float, method: str, err) -> Row:
    try:
        return ev(x)
    except DagumError as e:
        print(f"x={x!r}: {type(e).__name__}: {e}", file=err)
        return Row(x, None, None, method, type(e).__name__, "failed")


def cmd_eval(cfg: RunConfig, grid: EvalGrid, err=sys.stderr) -> tuple[int, list[Row]]:
    _check_method(cfg, cfg.method, grid)
    ev = evaluator(cfg, cfg.method)
    rows = [_safe_row(ev, x, cfg.method, err) for x in grid.points]
    code = EXIT_OK if all(r.status == "ok" for r in rows) else EXIT_PARTIAL
    return code, rows


@dataclass(frozen=True)
class CompareRow:
    x: float
    values: tuple[float | None, ...]
    errors: tuple[float | None, ...]
    max_rel_diff: float | None
    status: str


def max_pairwise_rel_diff(values) -> float:
    vals = [v for v in values]
    worst = 0.0
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            a, b = vals[i], vals[j]
            scale = max(abs(a), abs(b), 1e-300)
            worst = max(worst, abs(a - b) / scale)
    return worst


def cmd_compare(cfg: RunConfig, grid: EvalGrid, methods: list[str], max_rel_diff: float = 1e-5,
                err=sys.stderr) -> tuple[int, list[CompareRow]]:
    if len(methods) < 2:
        raise UsageError("compare needs at least two methods")
    if cfg.quantity != "density":
        raise UsageError("compare works on the density")
    for m in methods:
        _check_method(cfg, m, grid)
    evs = [evaluator(cfg, m) for m in methods]
    out, code = [], EXIT_OK
    for x in grid.points:
        rows = [_safe_row(ev, x, m, err) for ev, m in zip(evs, methods)]
        if any(r.value is None for r in rows):
            out.append(CompareRow(x, tuple(r.value for r in rows),
                                  tuple(r.abs_error for r in rows), None, "failed"))
            code = EXIT_PARTIAL
            continue
        d = max_pairwise_rel_diff([r.value for r in rows])
        status = "ok" if d <= max_rel_diff else "mismatch"
        if status != "ok" and any(r.status == "unconverged" for r in rows):
            # a route outside its regime, not a disagreement between converged routes
            status = "unconverged"
        if status != "ok":
            code = EXIT_PARTIAL
        out.append(CompareRow(x, tuple(r.value for r in rows), tuple(r.abs_error for r in rows),
                              d, status))
    return code, out


def validity_record(delta: float, lam: float, dim: int) -> dict:
    p = DagumParams(delta, lam, dim)
    rep = kernels.classify_validity(p)
    return {"delta": delta, "lambda": lam, "dim": dim,
            "phi3_sufficient": rep.phi3_sufficient,
            "phi_inf_sufficient": rep.phi_inf_sufficient,
            "spectral_series_admissible": rep.spectral_series_admissible,
            "resonant": spectral.resonance_check(p).resonant,
            "notes": rep.notes}


def cmd_validate(delta: float, lam: float, dim: int) -> tuple[int, dict]:
    try:
        rec = validity_record(delta, lam, dim)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return EXIT_OK, rec


def asymptote_record(cfg: RunConfig) -> dict:
    p = _params(cfg)
    if not isinstance(p, DagumParams):
        raise UsageError("asymptote reports the Dagum family")
    if cfg.quantity != "density":
        raise UsageError("asymptote reports density laws; use --quantity density")
    rec: dict = {"delta": p.delta, "lambda": p.lam, "dim": p.dim}
    try:
        law = spectral.low_freq_law(p)
        rec["low_freq"] = {"case": law.case, "coef": law.coef, "exponent": law.exponent}
    except DagumError as e:
        rec["low_freq"] = {"case": None, "reason": str(e)}
    try:
        law = spectral.high_freq_law(p)
        rec["high_freq"] = {"coef": law.coef, "exponent": law.exponent}
    except DagumError as e:
        rec["high_freq"] = {"coef": None, "exponent": -p.dim - p.delta * p.lam, "reason": str(e)}
    fh = kernels.fractal_hurst(p)
    rec["fractal_dim"] = fh.fractal_dim
    rec["hurst"] = fh.hurst
    if fh.reason:
        rec["fractal_hurst_note"] = fh.reason
    if p.delta > p.dim:
        rec["total_integral"] = kernels.dagum_total_integral(p)
    else:
        rec["total_integral"] = None
    return rec


def cmd_asymptote(cfg: RunConfig) -> tuple[int, dict]:
    return EXIT_OK, asymptote_record(cfg)


# -- formatting -------------------------------------------------------------------

def fmt_float(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_json(obj) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return _json_str(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_json_str(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json_str(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def render_rows(rows: list[Row], fmt: str, config: dict) -> str:
    if fmt == "json":
        recs = [{"x": r.x, "value": r.value, "abs_error": r.abs_error, "method": r.method,
                 "detail": r.detail, "status": r.status} for r in rows]
        return to_json({"config": config, "rows": recs}) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([fmt_float(r.x), fmt_float(r.value), fmt_float(r.abs_error), r.method,
                    r.detail, r.status])
    return buf.getvalue()


def render_compare(rows: list[CompareRow], methods: list[str], fmt: str, config: dict) -> str:
    if fmt == "json":
        recs = []
        for r in rows:
            rec = {"x": r.x}
            for m, v, e in zip(methods, r.values, r.errors):
                rec[f"value_{m}"] = v
                rec[f"abs_error_{m}"] = e
            rec["max_rel_diff"] = r.max_rel_diff
            rec["status"] = r.status
            recs.append(rec)
        return to_json({"config": config, "rows": recs}) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["x"]
    for m in methods:
        head += [f"value_{m}", f"abs_error_{m}"]
    w.writerow(head + ["max_rel_diff", "status"])
    for r in rows:
        line = [fmt_float(r.x)]
        for v, e in zip(r.values, r.errors):
            line += [fmt_float(v), fmt_float(e)]
        w.writerow(line + [fmt_float(r.max_rel_diff), r.status])
    return buf.getvalue()


def render_record(rec: dict, fmt: str, title: str) -> str:
    if fmt == "json":
        return to_json(rec) + "\n"
    lines = [title]
    for k, v in rec.items():
        if isinstance(v, dict):
            inner = ", ".join(f"{a}={_plain(b)}" for a, b in v.items())
            lines.append(f"  {k}: {inner}")
        else:
            lines.append(f"  {k}: {_plain(v)}")
    lines.append(to_json(rec))
    return "\n".join(lines) + "\n"


def _plain(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


# -- argument parsing --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Argument errors become a single diagnostic line."""

    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dagum", description="Dagum / Generalized Cauchy "
                                 "covariances and their isotropic spectral densities")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, grid=True):
        sp.add_argument("--family", choices=("dagum", "cauchy"), default="dagum")
        sp.add_argument("--delta", type=float, required=True)
        sp.add_argument("--lambda", dest="lam", type=float, required=True)
        sp.add_argument("--dim", type=int, default=1)
        sp.add_argument("--quantity", choices=("cov", "density"), default="density")
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--output", default=None)
        if grid:
            sp.add_argument("--grid", required=True)

    ev = sub.add_parser("eval", help="evaluate over a grid")
    common(ev)
    ev.add_argument("--method", default="auto", choices=DENSITY_METHODS)
    ev.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    cp = sub.add_parser("compare", help="cross-check methods over a grid")
    common(cp)
    cp.add_argument("--methods", required=True, help="comma-separated method list")
    cp.add_argument("--method", default="auto", choices=DENSITY_METHODS,
                    help=argparse.SUPPRESS)
    cp.add_argument("--max-rel-diff", type=float, default=1e-5)
    cp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    va = sub.add_parser("validate", help="positive-definiteness conditions")
    va.add_argument("--delta", type=float, required=True)
    va.add_argument("--lambda", dest="lam", type=float, required=True)
    va.add_argument("--dim", type=int, default=1)
    va.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    va.add_argument("--output", default=None)

    asy = sub.add_parser("asymptote", help="low/high-frequency laws, fractal and Hurst indices")
    common(asy, grid=False)
    asy.add_argument("--method", default="auto", choices=DENSITY_METHODS,
                     help=argparse.SUPPRESS)
    asy.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    return ap


def _config(a) -> RunConfig:
    if not a.tol > 0:
        raise UsageError("--tol must be positive")
    return RunConfig(a.family, a.delta, a.lam, a.dim, a.quantity, a.method, a.tol, a.fmt)


def _echo(cfg: RunConfig, grid: EvalGrid | None = None, **extra) -> dict:
    rec = {"family": cfg.family, "delta": cfg.delta, "lambda": cfg.lam, "dim": cfg.dim,
           "quantity": cfg.quantity, "method": cfg.method, "tol": cfg.tol}
    if grid is not None:
        rec["grid"] = grid.text
    rec.update(extra)
    return rec


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        with contextlib.redirect_stderr(err):
            a = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        if a.command == "validate":
            code, rec = cmd_validate(a.delta, a.lam, a.dim)
            text = render_record(rec, a.fmt, "validity")
        elif a.command == "asymptote":
            cfg = _config(a)
            code, rec = cmd_asymptote(cfg)
            text = render_record(rec, a.fmt, "asymptotic regimes")
        elif a.command == "eval":
            cfg = _config(a)
            grid = parse_grid(a.grid)
            code, rows = cmd_eval(cfg, grid, err)
            text = render_rows(rows, cfg.fmt, _echo(cfg, grid))
        else:
            cfg = _config(a)
            grid = parse_grid(a.grid)
            methods = [m.strip() for m in a.methods.split(",") if m.strip()]
            code, rows = cmd_compare(cfg, grid, methods, a.max_rel_diff, err)
            text = render_compare(rows, methods, cfg.fmt,
                                  _echo(cfg, grid, methods=methods, max_rel_diff=a.max_rel_diff))
    except UsageError as e:
        print(f"dagum: error: {e}", file=err)
        return EXIT_USAGE
    except DagumError as e:
        print(f"dagum: error: {type(e).__name__}: {e}", file=err)
        return EXIT_USAGE
    if a.output:
        with open(a.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))
