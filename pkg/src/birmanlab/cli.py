"""Command-line front end: ``birmanlab <command> [options]``.

Tables are written as CSV with a versioned header comment and a trailing
``#``-prefixed JSON summary, or as a single JSON document.  Grid points run on
a thread pool; results are gathered in grid order, so output does not depend
on the thread count.

Exit codes: 0 success, 1 bad input or parameters, 2 an inequality failed
beyond rounding tolerance (an implementation bug, never an expected outcome).
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bridge import PlateauFunction, PolyBump, lemma_convergence, riemann_bridge
from .constants import IneqParams, hardy_opnorm_bound
from .hardy_op import opnorm_sweep
from .inequalities import (birman_integral_report, birman_report, copson_report, hardy_report,
                           pointwise_lemma_check, weighted_hardy_report)
from .seq import Seq, to_extended
from .sharpness import sharpness_sweep
from .weights import classical_weight, rho_weight

SCHEMA_VERSION = 1
COMMANDS = ("verify", "weights", "opnorm", "sharpness", "bridge", "lemma-grid")
INEQUALITIES = ("hardy", "copson", "weighted-hardy", "birman", "birman-integral")


class InputError(Exception):
    """Bad file, flag or parameter; maps to exit code 1."""


@dataclass
class RunConfig:
    command: str
    params: IneqParams
    input_path: str | None = None
    grid: list | None = None
    output: str = "-"
    fmt: str = "csv"
    threads: int = 1
    precision: str = "double"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.threads < 1:
            raise InputError("--threads must be >= 1")
        if self.grid is not None and list(self.grid) != sorted(self.grid):
            raise InputError("grid must be ascending")
        if self.fmt not in ("csv", "json"):
            raise InputError(f"unknown output format {self.fmt!r}")
        if self.precision not in ("double", "extended"):
            raise InputError(f"unknown precision {self.precision!r}")


# grids and formatting ------------------------------------------------------

def parse_grid(text: str, integer: bool = False) -> list:
    """``a:b:logsteps=k`` (log-spaced, endpoints included) or ``x1,x2,...``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3 or not parts[2].startswith("logsteps="):
                raise InputError(f"grid {text!r}: expected a:b:logsteps=k")
            a, b, k = float(parts[0]), float(parts[1]), int(parts[2][len("logsteps="):])
            if not (0 < a < b) or k < 2:
                raise InputError(f"grid {text!r}: need 0 < a < b and k >= 2")
            vals = np.logspace(math.log10(a), math.log10(b), k).tolist()
        else:
            vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"grid {text!r}: {exc}") from None
    if not vals:
        raise InputError("empty grid")
    if integer:
        vals = [int(round(v)) for v in vals]
    if vals != sorted(vals) or len(set(vals)) != len(vals):
        raise InputError(f"grid {text!r} must be strictly ascending")
    return vals


def fmt_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def render_table(command: str, columns: list, rows: list, summary: dict, fmt: str) -> str:
    summary = _json_safe({"schema_version": SCHEMA_VERSION, "command": command, **summary})
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "columns": columns,
               "rows": [_json_safe(list(r)) for r in rows], "summary": summary}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# birmanlab-csv schema_version={SCHEMA_VERSION} command={command}\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt_value(x) for x in r) + "\n")
    buf.write("# " + json.dumps(summary, sort_keys=True) + "\n")
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _executor(cfg: RunConfig):
    return ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else nullcontext(None)


def _params_dict(params: IneqParams) -> dict:
    return {"p": params.p, "ell": params.ell, "alpha": params.alpha}


def _double_only(cfg: RunConfig) -> None:
    if cfg.precision != "double":
        raise InputError(f"--precision extended is only available for verify, not {cfg.command}")


# commands ----------------------------------------------------------------------

def load_sequence(path: str) -> Seq:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    try:
        return Seq.from_json(obj)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.input_path is None:
        raise InputError("verify needs --input")
    u = load_sequence(cfg.input_path)
    ineq = cfg.options["ineq"]
    p, ell, alpha = cfg.params.p, cfg.params.ell, cfg.params.alpha
    if cfg.precision == "extended":
        if ineq == "birman-integral":
            raise InputError("birman-integral runs in double precision only")
        u = to_extended(u)
    if ineq == "hardy":
        rep = hardy_report(u, p)
    elif ineq == "copson":
        cfg.params.check_copson()
        rep = copson_report(u, p, alpha)
    elif ineq == "weighted-hardy":
        cfg.params.check_negative_alpha()
        rep = weighted_hardy_report(u, p, alpha)
    elif ineq == "birman":
        rep = birman_report(u, p, ell)
    else:
        rep = birman_integral_report(u, p, ell)
    doc = {"schema_version": SCHEMA_VERSION, "inequality": ineq, **_params_dict(cfg.params),
           "precision": cfg.precision, **rep.to_dict(), "holds": bool(rep.holds)}
    _emit(cfg, json.dumps(_json_safe(doc), indent=2, sort_keys=True) + "\n")
    return 0 if rep.holds else 2


def cmd_weights(cfg: RunConfig) -> int:
    _double_only(cfg)
    p, alpha = cfg.params.p, cfg.params.alpha
    variant = cfg.options["variant"]
    n_max = cfg.options["n_max"]
    lo = 2 if variant == "negative_alpha" else 1
    if n_max < lo:
        raise InputError(f"--n-max must be >= {lo}")
    n = np.arange(lo, n_max + 1)
    classical = classical_weight(n, p, alpha, variant)
    rho = rho_weight(n, p, alpha, variant)
    ratio = rho / classical
    rows = list(zip(n.tolist(), classical, rho, ratio))
    k = int(np.argmin(ratio))
    summary = {"params": _params_dict(cfg.params), "variant": variant,
               "min_ratio": float(ratio[k]), "argmin_n": int(n[k]),
               "dominates": bool(np.all(ratio >= 1))}
    _emit(cfg, render_table("weights", ["n", "classical_weight", "rho", "ratio"], rows, summary, cfg.fmt))
    return 0 if summary["dominates"] else 2


def cmd_opnorm(cfg: RunConfig) -> int:
    _double_only(cfg)
    p, ell = cfg.params.p, cfg.params.ell
    with _executor(cfg) as ex:
        recs = opnorm_sweep(p, ell, cfg.grid, cfg.options["tol"], cfg.options["max_iter"], ex)
    rows = [(r.N, r.value, r.bound, r.gap, r.iters) for r in recs]
    bound = hardy_opnorm_bound(p, ell)
    summary = {"params": _params_dict(cfg.params), "bound": bound,
               "below_bound": all(r.value <= bound * (1 + 1e-9) for r in recs),
               "monotone": all(b.value >= a.value for a, b in zip(recs, recs[1:]))}
    _emit(cfg, render_table("opnorm", ["size", "estimate", "bound", "gap", "iters"], rows, summary, cfg.fmt))
    return 0 if summary["below_bound"] else 2


def cmd_sharpness(cfg: RunConfig) -> int:
    _double_only(cfg)
    p, ell, alpha = cfg.params.p, cfg.params.ell, cfg.params.alpha
    kind = cfg.options["kind"]
    if kind == "copson":
        ell = 1
        if not alpha < p - 1:
            raise InputError("copson sharpness needs alpha < p-1")
    with _executor(cfg) as ex:
        res = sharpness_sweep(p, ell, cfg.grid, kind, alpha if kind == "copson" else None,
                              cfg.options["mode"], cfg.options.get("order"), ex)
    rows = [(r.N, r.value, r.bound, r.gap) for r in res.records]
    summary = {"params": _params_dict(cfg.params), "kind": kind, "mode": cfg.options["mode"],
               "fit": res.fit_json(), "above_bound": all(r.gap >= -1e-12 * r.bound for r in res.records)}
    _emit(cfg, render_table("sharpness", ["N", "value", "bound", "gap"], rows, summary, cfg.fmt))
    return 0 if summary["above_bound"] else 2


def _bridge_function(name: str, cfg: RunConfig):
    p, ell = cfg.params.p, cfg.params.ell
    if name == "bump":
        return PolyBump(0.1, 0.9, max(6, ell + 3))
    if name == "plateau":
        return PlateauFunction(p, ell, N=cfg.options["plateau_n"], order=ell + 2)
    raise InputError(f"unknown test function {name!r}")


def cmd_bridge(cfg: RunConfig) -> int:
    _double_only(cfg)
    p, ell, alpha = cfg.params.p, cfg.params.ell, cfg.params.alpha
    grid = [int(round(N)) for N in cfg.grid]
    phi = _bridge_function(cfg.options["function"], cfg)
    mode = cfg.options["mode"]
    with _executor(cfg) as ex:
        if mode == "lemma":
            reps, slope = lemma_convergence(phi, ell, grid, ex)
            rows = [(r.N, r.max_abs_error, r.argmax_n) for r in reps]
            columns = ["N", "max_abs_error", "argmax_n"]
            summary = {"slope": slope}
        else:
            kind = cfg.options["kind"]
            if kind == "copson" and not alpha < p - 1:
                raise InputError("copson scaling needs alpha < p-1")
            recs = riemann_bridge(phi, p, ell, grid, kind, alpha if kind == "copson" else None, ex)
            rows = [(r.N, r.value, r.bound, r.gap) for r in recs]
            columns = ["N", "discrete_ratio", "continuous_ratio", "gap"]
            gaps = [r.gap for r in recs]
            summary = {"kind": kind, "gap_shrink": [a / b if b > 0 else None
                                                    for a, b in zip(gaps, gaps[1:])]}
    summary = {"params": _params_dict(cfg.params), "mode": mode,
               "function": cfg.options["function"], **summary}
    _emit(cfg, render_table("bridge", columns, rows, summary, cfg.fmt))
    return 0


def cmd_lemma_grid(cfg: RunConfig) -> int:
    _double_only(cfg)
    p = cfg.params.p
    t_steps, z_max = cfg.options["t_steps"], cfg.options["z_max"]
    r_steps, angles = cfg.options["r_steps"], cfg.options["angles"]
    if t_steps < 1 or r_steps < 2 or angles < 1 or not z_max > 0:
        raise InputError("lemma-grid needs t-steps >= 1, r-steps >= 2, angles >= 1, z-max > 0")
    t = np.linspace(0.0, 1.0, t_steps + 1)
    r = np.linspace(0.0, z_max, r_steps)
    theta = 2 * np.pi * np.arange(angles) / angles
    z = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    scale = 1 + np.abs(z) ** p

    def one(ti):
        m = pointwise_lemma_check(z, ti, p) / scale
        k = int(np.argmin(m))
        return ti, float(m[k]), float(z[k].real), float(z[k].imag)

    with _executor(cfg) as ex:
        rows = list((ex.map if ex is not None else map)(one, t))
    worst = min(rows, key=lambda row: row[1])
    summary = {"params": {"p": p}, "t_steps": t_steps, "z_max": z_max,
               "min_scaled_margin": worst[1], "argmin_t": worst[0],
               "argmin_z": [worst[2], worst[3]], "holds": worst[1] >= -1e-14}
    _emit(cfg, render_table("lemma-grid", ["t", "min_scaled_margin", "argmin_re_z", "argmin_im_z"],
                            rows, summary, cfg.fmt))
    return 0 if summary["holds"] else 2


HANDLERS = {"verify": cmd_verify, "weights": cmd_weights, "opnorm": cmd_opnorm,
            "sharpness": cmd_sharpness, "bridge": cmd_bridge, "lemma-grid": cmd_lemma_grid}


# argument parsing -----------------------------------------------------------

def _default_threads() -> int:
    raw = os.environ.get("BIRMANLAB_THREADS", "1")
    try:
        return int(raw)
    except ValueError:
        return 0  # rejected by RunConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="birmanlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=2.0)
    common.add_argument("--ell", type=int, default=1)
    common.add_argument("--alpha", type=float, default=0.0)
    common.add_argument("--output", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $BIRMANLAB_THREADS or 1)")
    common.add_argument("--precision", choices=("double", "extended"), default="double")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="check one inequality on a sequence file")
    s.add_argument("--ineq", choices=INEQUALITIES, required=True)
    s.add_argument("--input", dest="input_path", required=True)

    s = sub.add_parser("weights", parents=[common], help="improved vs classical weights")
    s.add_argument("--variant", choices=("negative_alpha", "copson"), default=None,
                   help="default: negative_alpha for alpha < 0, else copson")
    s.add_argument("--n-max", type=int, default=1000)

    s = sub.add_parser("opnorm", parents=[common], help="truncated Hardy operator norms")
    s.add_argument("--sizes", default="100,1000,10000")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=10_000)

    s = sub.add_parser("sharpness", parents=[common], help="Rayleigh quotient sweep and fit")
    s.add_argument("--grid", default="1e2:1e7:logsteps=11")
    s.add_argument("--kind", choices=("birman", "copson"), default="birman")
    s.add_argument("--mode", choices=("continuous", "discrete"), default="continuous")
    s.add_argument("--order", type=int, default=None)

    s = sub.add_parser("bridge", parents=[common], help="discrete-to-continuous convergence")
    s.add_argument("--grid", default="256,512,1024,2048,4096")
    s.add_argument("--mode", choices=("lemma", "riemann"), default="lemma")
    s.add_argument("--function", choices=("plateau", "bump"), default="plateau")
    s.add_argument("--plateau-n", type=float, default=4.0)
    s.add_argument("--kind", choices=("birman", "copson"), default="birman")

    s = sub.add_parser("lemma-grid", parents=[common], help="pointwise lemma on a (t, z) grid")
    s.add_argument("--t-steps", type=int, default=200)
    s.add_argument("--z-max", type=float, default=3.0)
    s.add_argument("--r-steps", type=int, default=101)
    s.add_argument("--angles", type=int, default=72)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    threads = args.threads if args.threads is not None else _default_threads()
    try:
        params = IneqParams(args.p, args.ell, args.alpha)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    opts = {k: v for k, v in vars(args).items()
            if k not in ("command", "p", "ell", "alpha", "output", "fmt", "threads",
                         "precision", "input_path", "grid", "sizes")}
    grid = None
    if args.command == "opnorm":
        grid = parse_grid(args.sizes, integer=True)
    elif args.command == "sharpness":
        grid = parse_grid(args.grid)
    elif args.command == "bridge":
        grid = parse_grid(args.grid, integer=True)
    if args.command == "weights" and opts["variant"] is None:
        opts["variant"] = "negative_alpha" if args.alpha < 0 else "copson"
    return RunConfig(args.command, params, getattr(args, "input_path", None), grid,
                     args.output, args.fmt, threads, args.precision, opts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return HANDLERS[cfg.command](cfg)
    except (InputError, ValueError) as exc:
        print(f"birmanlab {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
