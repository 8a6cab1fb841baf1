"""Command-line experiments: moment checks, convergence tables, and the
reference figure.

Three subcommands, one shared flag set:

* ``moments``  -- numeric-vs-closed-form moment sweep, CSV report.
* ``converge`` -- sup-norm error of the operator against a target function
  for a list of n, optionally along the (p_n, q_n) -> 1 schedule.
* ``figure``   -- the fixed reference reproduction (cos(x^2) on [0, 2],
  n = 98 and 100, p = 0.9, q = 0.8, alpha = 0.1, beta = 0.5) as CSV and/or
  a self-contained SVG.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (a
non-convergent sum, a growth violation, or a moment row off by more than
1e-6 relative). All file output is deterministic: identical inputs produce
byte-identical CSV/SVG.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import moments
from ._family import choose_k_max, integral_family, log_basis_row
from .operator_kernel import StancuParams
from .operators import GrowthViolation, RealFunction, _vector_eval, apply_stancu_grid
from .pq_core import NonConvergence, PqParams, TruncationConfig
from .smoothness import GridSpec

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "run_moment_verification",
    "run_convergence_table",
    "reproduce_figure",
    "emit_plot",
    "schedule_params",
    "main",
]


class ConfigError(ValueError):
    """Bad flag, config-file entry, or flag combination (exit code 1)."""


# fixed reproduction preset for the `figure` subcommand
FIGURE_PARAMS = PqParams(0.9, 0.8)
FIGURE_SHIFT = StancuParams(0.1, 0.5)
FIGURE_N = (98, 100)
FIGURE_GRID = GridSpec(0.0, 2.0, 0.01)

# default sweep for the `moments` subcommand when no --p/--q is given
SWEEP_PQ = ((1.0, 0.9), (0.9, 0.8), (0.95, 0.9))
SWEEP_N = (2, 5, 10, 50, 100)
SWEEP_X = (0.0, 0.5, 1.0, 2.0, 3.0)
SWEEP_SHIFTS = ((0.0, 0.0), (0.1, 0.5))

MOMENT_HEADER = ("p", "q", "n", "x", "alpha", "beta", "order",
                 "numeric", "closed_form", "abs_err", "rel_err", "note")
MOMENT_REL_TOL = 1e-6


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved run description (flags > config file > defaults)."""

    command: str
    params: PqParams | None          # None => the moments preset sweep
    stancu: StancuParams
    n_values: tuple[int, ...]
    function: str
    grid: GridSpec
    truncation: TruncationConfig
    out: Path
    format: str
    strict: bool
    literal_kernel: bool
    schedule: bool


def schedule_params(n: int) -> PqParams:
    """The convergence schedule p_n = 1 - 1/(2 n^2), q_n = 1 - 1/n^2."""
    if n < 2:
        raise ValueError("the schedule needs n >= 2")
    return PqParams(1.0 - 1.0 / (2.0 * n * n), 1.0 - 1.0 / (n * n))


_EXPR_NS = {
    "cos": np.cos, "sin": np.sin, "tan": np.tan, "exp": np.exp,
    "sqrt": np.sqrt, "log": np.log, "abs": np.abs,
    "pi": math.pi, "e": math.e,
}


def _make_function(name: str) -> RealFunction:
    if name == "cos_x_squared":
        return RealFunction(lambda t: np.cos(t * t), "bounded", 1.0)
    if name.startswith("monomial:"):
        try:
            j = int(name.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad monomial argument {name!r}") from None
        if not 0 <= j <= 2:
            raise ConfigError("monomial order must be 0, 1 or 2")
        ev = lambda t, j=j: t ** j
        return RealFunction(ev, "bounded" if j == 0 else "quadratic_growth", 1.0)
    if name.startswith("expr:"):
        src = name.split(":", 1)[1]
        try:
            code = compile(src, "<expr>", "eval")
        except SyntaxError as exc:
            raise ConfigError(f"bad expression: {exc}") from None
        for nm in code.co_names:
            if nm not in _EXPR_NS and nm != "t":
                raise ConfigError(f"unknown name {nm!r} in expression")
        ev = lambda t, code=code: eval(code, {"__builtins__": {}},
                                       dict(_EXPR_NS, t=t))
        # the growth constant is a loose cap; true violations still raise
        return RealFunction(ev, "quadratic_growth", 1e6)
    raise ConfigError(f"unknown function {name!r}")


# ---------------------------------------------------------------------------
# moments


def _moment_block(params: PqParams, st: StancuParams, n: int,
                  xs: Sequence[float], cfg: TruncationConfig,
                  literal: bool, strict: bool) -> list[dict]:
    """All (x, order) rows for one (p, q, alpha, beta, n) combination.

    The three integral families are built once and reused across x: the
    per-index integrals do not depend on the evaluation point.
    """
    p, q = params.p, params.q
    rows: list[dict] = []

    def row(x, m, numeric, closed, note=""):
        if numeric is None or not math.isfinite(numeric):
            abs_err = rel_err = numeric = float("nan")
        else:
            abs_err = abs(numeric - closed)
            rel_err = abs_err / max(abs(closed), 1e-300)
        return {"p": p, "q": q, "n": n, "x": x, "alpha": st.alpha,
                "beta": st.beta, "order": m, "numeric": numeric,
                "closed_form": closed, "abs_err": abs_err,
                "rel_err": rel_err, "note": note}

    try:
        km = choose_k_max(n, p, q, float(max(xs)), cfg.series_tol, cfg.max_k)
        fams = [integral_family(n, p, q, st.alpha, st.beta, km,
                                lambda s, m=m: s ** m,
                                cfg.integral_tol, cfg.max_j_pos,
                                unpatched=literal)
                for m in (0, 1, 2)]
    except NonConvergence as exc:
        if strict:
            raise
        for x in xs:
            for m in (0, 1, 2):
                closed = moments.closed_moment_stancu(m, n, float(x), params, st)
                rows.append(row(float(x), m, None, closed, note=str(exc)))
        return rows

    for x in xs:
        w = np.exp(log_basis_row(n, p, q, float(x), km))
        for m in (0, 1, 2):
            numeric = float(w @ fams[m])
            closed = moments.closed_moment_stancu(m, n, float(x), params, st)
            rows.append(row(float(x), m, numeric, closed))
    return rows


def run_moment_verification(config: ExperimentConfig) -> list[dict]:
    """Moment rows for the preset sweep (params None) or the configured
    single combination. Row order is deterministic."""
    cfg = config.truncation
    rows: list[dict] = []
    if config.params is None:
        for p, q in SWEEP_PQ:
            params = PqParams(p, q)
            for a, b in SWEEP_SHIFTS:
                st = StancuParams(a, b)
                for n in SWEEP_N:
                    rows.extend(_moment_block(params, st, n, SWEEP_X, cfg,
                                              config.literal_kernel,
                                              config.strict))
    else:
        xs = [float(v) for v in config.grid.points()]
        for n in config.n_values:
            rows.extend(_moment_block(config.params, config.stancu, n, xs,
                                      cfg, config.literal_kernel,
                                      config.strict))
    return rows


# ---------------------------------------------------------------------------
# convergence tables


def run_convergence_table(config: ExperimentConfig) -> list[dict]:
    """Sup-norm error over the grid for each n, with the parameters either
    fixed or taken from the schedule."""
    f = _make_function(config.function)
    xs = config.grid.points()
    fx = _vector_eval(f.evaluator, xs)
    rows: list[dict] = []
    for n in config.n_values:
        params = schedule_params(n) if config.schedule else config.params
        assert params is not None
        try:
            vals = apply_stancu_grid(f, n, xs, params, config.stancu,
                                     config.truncation)
            sup = float(np.max(np.abs(vals - fx)))
            note = ""
        except NonConvergence as exc:
            if config.strict:
                raise
            sup = float("nan")
            note = str(exc)
        rows.append({"n": n, "p": params.p, "q": params.q,
                     "sup_error": sup, "note": note})
    return rows


# ---------------------------------------------------------------------------
# figure reproduction


def reproduce_figure(config: ExperimentConfig) -> list[Path]:
    """The fixed reference curves; returns the paths written.

    Grid points are i/100 for i = 0..200. Non-convergent columns become
    empty CSV cells (and are dropped from the plot) unless --strict.
    """
    xs = np.arange(201) / 100.0
    f = RealFunction(lambda t: np.cos(t * t), "bounded", 1.0)
    fx = np.cos(xs * xs)
    cols: dict[int, np.ndarray] = {}
    for n in FIGURE_N:
        try:
            cols[n] = apply_stancu_grid(f, n, xs, FIGURE_PARAMS, FIGURE_SHIFT,
                                        config.truncation)
        except NonConvergence:
            if config.strict:
                raise
            cols[n] = np.full_like(xs, np.nan)

    written: list[Path] = []
    header = ("x", "f") + tuple(f"B_n{n}" for n in FIGURE_N)
    if config.format in ("csv", "both"):
        body = [[xs[i], fx[i]] + [cols[n][i] for n in FIGURE_N]
                for i in range(xs.size)]
        _write_csv(config.out, header, body)
        written.append(config.out)
    if config.format in ("svg", "both"):
        svg_path = config.out.with_suffix(".svg")
        series = [("f", list(zip(xs, fx)))]
        for n in FIGURE_N:
            series.append((f"B_n{n}", list(zip(xs, cols[n]))))
        emit_plot(series, svg_path)
        written.append(svg_path)
    return written


# ---------------------------------------------------------------------------
# output helpers

PLOT_WIDTH = 640.0
PLOT_HEIGHT = 440.0
MARGIN_LEFT = 62.0
MARGIN_RIGHT = 18.0
MARGIN_TOP = 18.0
MARGIN_BOTTOM = 46.0
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(v) else "%.17g" % v
    return str(v)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    for r in rows:
        vals = r if not isinstance(r, dict) else [r[h] for h in header]
        lines.append(",".join(_fmt(v) for v in vals))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def pixel_maps(xmin: float, xmax: float, ymin: float, ymax: float):
    """The affine data->pixel maps emit_plot uses; exposed so output can be
    inverted and checked. Degenerate ranges are padded by 0.5 per side."""
    if xmax <= xmin:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    if ymax <= ymin:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    iw = PLOT_WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ih = PLOT_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    fx = lambda x: MARGIN_LEFT + (x - xmin) / (xmax - xmin) * iw
    fy = lambda y: MARGIN_TOP + (ymax - y) / (ymax - ymin) * ih
    return fx, fy


def emit_plot(series, path: Path) -> None:
    """Write a self-contained SVG 1.1 line plot.

    ``series`` is a sequence of (label, points) with points iterable over
    (x, y); non-finite points are dropped and a series needs at least two
    finite points to be drawn. Axes autoscale to the joint data range.
    """
    clean: list[tuple[str, list[tuple[float, float]]]] = []
    for label, pts in series:
        kept = [(float(x), float(y)) for x, y in pts
                if math.isfinite(float(x)) and math.isfinite(float(y))]
        if len(kept) >= 2:
            clean.append((str(label), kept))
    if not clean:
        raise ValueError("no series has two or more finite points")

    xmin = min(x for _, pts in clean for x, _ in pts)
    xmax = max(x for _, pts in clean for x, _ in pts)
    ymin = min(y for _, pts in clean for _, y in pts)
    ymax = max(y for _, pts in clean for _, y in pts)
    fx, fy = pixel_maps(xmin, xmax, ymin, ymax)
    if xmax <= xmin:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    if ymax <= ymin:
        ymin, ymax = ymin - 0.5, ymax + 0.5

    x_axis_y = PLOT_HEIGHT - MARGIN_BOTTOM
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{PLOT_WIDTH:.0f}" height="{PLOT_HEIGHT:.0f}" '
        f'viewBox="0 0 {PLOT_WIDTH:.0f} {PLOT_HEIGHT:.0f}">',
        f'<rect width="{PLOT_WIDTH:.0f}" height="{PLOT_HEIGHT:.0f}" fill="#ffffff"/>',
        f'<line x1="{MARGIN_LEFT:.2f}" y1="{x_axis_y:.2f}" '
        f'x2="{PLOT_WIDTH - MARGIN_RIGHT:.2f}" y2="{x_axis_y:.2f}" stroke="#000000"/>',
        f'<line x1="{MARGIN_LEFT:.2f}" y1="{MARGIN_TOP:.2f}" '
        f'x2="{MARGIN_LEFT:.2f}" y2="{x_axis_y:.2f}" stroke="#000000"/>',
    ]
    for i in range(5):
        xv = xmin + i * (xmax - xmin) / 4.0
        yv = ymin + i * (ymax - ymin) / 4.0
        px, py = fx(xv), fy(yv)
        parts.append(f'<line x1="{px:.2f}" y1="{x_axis_y:.2f}" x2="{px:.2f}" '
                     f'y2="{x_axis_y + 5:.2f}" stroke="#000000"/>')
        parts.append(f'<text x="{px:.2f}" y="{x_axis_y + 18:.2f}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'text-anchor="middle">{xv:.6g}</text>')
        parts.append(f'<line x1="{MARGIN_LEFT - 5:.2f}" y1="{py:.2f}" '
                     f'x2="{MARGIN_LEFT:.2f}" y2="{py:.2f}" stroke="#000000"/>')
        parts.append(f'<text x="{MARGIN_LEFT - 8:.2f}" y="{py + 4:.2f}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'text-anchor="end">{yv:.6g}</text>')
    for idx, (label, pts) in enumerate(clean):
        color = PALETTE[idx % len(PALETTE)]
        coords = " ".join(f"{fx(x):.2f},{fy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{coords}"/>')
        ly = MARGIN_TOP + 16.0 + 16.0 * idx
        lx = PLOT_WIDTH - MARGIN_RIGHT - 150.0
        parts.append(f'<line x1="{lx:.2f}" y1="{ly - 4:.2f}" x2="{lx + 22:.2f}" '
                     f'y2="{ly - 4:.2f}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{lx + 28:.2f}" y="{ly:.2f}" '
                     f'font-family="sans-serif" font-size="11">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# argument handling

_DEFAULTS: dict[str, dict] = {
    "moments": {"p": None, "q": None, "alpha": 0.0, "beta": 0.0, "n": [5],
                "grid": "0:3:0.5", "tol": None, "out": "moments.csv",
                "format": "csv", "strict": False, "literal_kernel": False},
    "converge": {"p": 0.9, "q": 0.8, "alpha": 0.0, "beta": 0.0,
                 "n": [5, 10, 20, 40], "grid": "0:2:0.01", "tol": None,
                 "out": "converge.csv", "format": "csv", "strict": False,
                 "function": "cos_x_squared", "schedule": False},
    "figure": {"tol": None, "out": "figure.csv", "format": "both",
               "strict": False},
}

_FILE_KEYS = {"p", "q", "alpha", "beta", "n", "grid", "tol", "out", "format",
              "strict", "function", "schedule", "literal_kernel"}


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the contract here is
    # that configuration problems are exit code 1, so raise instead
    def error(self, message):
        raise ConfigError(message)


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--q", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--n", type=int, action="append", default=None,
                    help="degree index; repeatable")
    sp.add_argument("--grid", default=None, metavar="MIN:MAX:STEP")
    sp.add_argument("--tol", type=float, default=None,
                    help="series and integral truncation tolerance")
    sp.add_argument("--out", default=None, metavar="PATH")
    sp.add_argument("--format", choices=("csv", "svg", "both"), default=None)
    sp.add_argument("--config", default=None, metavar="PATH",
                    help="JSON file with the same keys as the flags")
    sp.add_argument("--strict", action="store_const", const=True, default=None,
                    help="abort on the first numerical failure")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pqbaskakov",
                     description="Two-parameter deformed operator experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    mom = sub.add_parser("moments", help="numeric vs closed-form moments")
    _add_common(mom)
    mom.add_argument("--literal-kernel", dest="literal_kernel",
                     action="store_const", const=True, default=None,
                     help="use the unnormalized kernel variant (diagnostic)")
    conv = sub.add_parser("converge", help="sup-error table over n")
    _add_common(conv)
    conv.add_argument("--function", default=None,
                      help="cos_x_squared | monomial:J | expr:...")
    conv.add_argument("--schedule", action="store_const", const=True,
                      default=None, help="use p_n = 1 - 1/(2n^2), q_n = 1 - 1/n^2")
    fig = sub.add_parser("figure", help="fixed reference reproduction")
    _add_common(fig)
    return parser


def _parse_grid(text: str) -> GridSpec:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be MIN:MAX:STEP, got {text!r}")
    try:
        lo, hi, step = (float(v) for v in parts)
    except ValueError:
        raise ConfigError(f"grid must be numeric, got {text!r}") from None
    try:
        return GridSpec(lo, hi, step)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - _FILE_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _resolve(command: str, args: argparse.Namespace) -> ExperimentConfig:
    merged = dict(_DEFAULTS[command])
    if args.config is not None:
        merged.update(_load_config_file(args.config))
    for key in _FILE_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v

    if command == "figure":
        fixed = [k for k in ("p", "q", "alpha", "beta", "n", "grid",
                             "function", "schedule", "literal_kernel")
                 if merged.get(k) is not None]
        if fixed:
            raise ConfigError(
                f"figure uses a fixed preset; {sorted(fixed)} cannot be overridden")

    def fval(key, default=0.0):
        v = merged.get(key)
        return default if v is None else float(v)

    try:
        p, q = merged.get("p"), merged.get("q")
        if (p is None) != (q is None):
            raise ConfigError("--p and --q must be given together")
        params = None if p is None else PqParams(float(p), float(q))
        stancu = StancuParams(fval("alpha"), fval("beta"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if command == "moments" and params is None and (
            merged.get("alpha") or merged.get("beta")):
        raise ConfigError(
            "the preset sweep fixes alpha/beta; pass --p/--q to customize")

    raw_n = merged.get("n") or []
    if isinstance(raw_n, (int, float)):
        raw_n = [raw_n]
    try:
        n_values = tuple(int(v) for v in raw_n)
    except (TypeError, ValueError):
        raise ConfigError(f"bad n list: {raw_n!r}") from None
    if any(v < 1 for v in n_values):
        raise ConfigError("every n must be >= 1")

    grid = _parse_grid(merged["grid"]) if merged.get("grid") else FIGURE_GRID

    tol = merged.get("tol")
    if tol is not None and not float(tol) > 0:
        raise ConfigError("tol must be positive")
    if command == "converge" and merged.get("schedule"):
        # q_n -> 1 pushes the integrand peak to j in the tens of thousands;
        # the default node budget cannot reach it
        truncation = TruncationConfig(
            integral_tol=float(tol) if tol is not None else 1e-11,
            max_j_pos=300_000, max_j_neg=300_000)
    elif tol is not None:
        truncation = TruncationConfig(series_tol=float(tol),
                                      integral_tol=float(tol))
    else:
        truncation = TruncationConfig()

    fmt = merged.get("format") or "csv"
    if command == "moments" and fmt != "csv":
        raise ConfigError("the moments command emits csv only")

    return ExperimentConfig(
        command=command,
        params=params,
        stancu=stancu,
        n_values=n_values,
        function=str(merged.get("function") or "cos_x_squared"),
        grid=grid,
        truncation=truncation,
        out=Path(merged["out"]),
        format=fmt,
        strict=bool(merged.get("strict") or False),
        literal_kernel=bool(merged.get("literal_kernel") or False),
        schedule=bool(merged.get("schedule") or False),
    )


# ---------------------------------------------------------------------------
# dispatch


def _cmd_moments(config: ExperimentConfig) -> int:
    rows = run_moment_verification(config)
    _write_csv(config.out, MOMENT_HEADER, rows)
    finite = [r["rel_err"] for r in rows if math.isfinite(r["rel_err"])]
    flagged = sum(1 for r in rows if r["note"])
    worst = max(finite) if finite else float("nan")
    print(f"wrote {config.out}: {len(rows)} rows, worst rel err "
          f"{worst:.3e}, {flagged} non-convergent")
    failed = flagged or not finite or worst > MOMENT_REL_TOL
    return 2 if failed else 0


def _cmd_converge(config: ExperimentConfig) -> int:
    rows = run_convergence_table(config)
    header = ("n", "p", "q", "sup_error", "note")
    if config.format in ("csv", "both"):
        _write_csv(config.out, header, rows)
        print(f"wrote {config.out}")
    if config.format in ("svg", "both"):
        pts = [(r["n"], r["sup_error"]) for r in rows
               if math.isfinite(r["sup_error"])]
        if len(pts) >= 2:
            emit_plot([("sup_error", pts)], config.out.with_suffix(".svg"))
            print(f"wrote {config.out.with_suffix('.svg')}")
    for r in rows:
        print(f"n={r['n']}: sup error = {_fmt(r['sup_error']) or 'n/a'}"
              + (f"  ({r['note']})" if r["note"] else ""))
    return 2 if any(r["note"] for r in rows) else 0


def _cmd_figure(config: ExperimentConfig) -> int:
    written = reproduce_figure(config)
    for pth in written:
        print(f"wrote {pth}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _resolve(args.command, args)
        if args.command == "moments":
            return _cmd_moments(config)
        if args.command == "converge":
            return _cmd_converge(config)
        return _cmd_figure(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NonConvergence, GrowthViolation) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
