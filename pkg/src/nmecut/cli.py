"""Command-line runner: ``nmecut {overhead,verify,mub-check,estimate,sweep}``.

JSON records carry ``schema_version`` and, under ``spec``, the resolved arguments. Exit codes:
0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import __version__
from .entangle import SchmidtVector, overhead_baseline, overhead_nme, overhead_table, robustness_pure
from .estimator import EstimatorConfig, estimate, exact_value
from .mub import audit
from .qcore import PauliString, PureState, random_state
from .qpd import qpd_baseline, qpd_nme, qpd_streamlined, verify_identity

SCHEMA_VERSION = 1
OUTPUT_ENV = "NMECUT_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2
MAX_GRID = 64


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def parse_schmidt(text: str, n: int | None = None) -> SchmidtVector:
    """``maximal``, ``separable`` or a comma list (renormalized, sorted)."""
    text = text.strip().lower()
    if text in ("maximal", "separable"):
        if n is None:
            raise UsageError(f"--schmidt {text} needs --n")
        return getattr(SchmidtVector, text)(n)
    try:
        vals = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse Schmidt vector {text!r}") from None
    if not np.all(np.isfinite(vals)) or np.any(vals < 0):
        raise UsageError("Schmidt coefficients must be finite and nonnegative")
    if vals.size & (vals.size - 1) or (n is not None and vals.size != 1 << n):
        raise UsageError(f"Schmidt vector length {vals.size} does not match n")
    try:
        sv = SchmidtVector.from_values(vals)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if abs(np.dot(sv.alpha, sv.alpha) - 1) > 1e-6:
        raise UsageError("Schmidt vector could not be normalized")
    return sv


def parse_state(text: str, n: int) -> PureState:
    """``plus^n``, ``zero^n``, ``random:<seed>`` or a comma list of amplitudes."""
    t = text.strip().lower()
    d = 1 << n
    if t.startswith("plus"):
        return PureState(np.full(d, 1 / math.sqrt(d)))
    if t.startswith("zero"):
        v = np.zeros(d)
        v[0] = 1
        return PureState(v)
    if t.startswith("random:"):
        return random_state(n, np.random.default_rng(int(t.split(":", 1)[1])))
    try:
        amps = np.array([complex(v.replace(" ", "").replace("i", "j")) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse input state {text!r}") from None
    if amps.size != d or np.linalg.norm(amps) == 0:
        raise UsageError(f"input state needs {d} amplitudes")
    return PureState.from_vector(amps)


def parse_observable(text: str, n: int) -> PauliString:
    try:
        p = PauliString(text)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if p.n != n:
        raise UsageError(f"observable {text} has {p.n} qubits, expected {n}")
    return p


def schmidt_for_robustness(n: int, r: float) -> SchmidtVector:
    """Schmidt vector ``(1, t, ..., t)`` (normalized) with robustness ``r``."""
    d = 1 << n
    if not 0 <= r <= d - 1:
        raise UsageError(f"R={r} outside [0, {d - 1}]")
    if r == 0:
        return SchmidtVector.separable(n)
    if r >= d - 1 - 1e-12:
        return SchmidtVector.maximal(n)

    def excess(t):
        a = np.r_[1.0, np.full(d - 1, t)]
        return robustness_pure(a / np.linalg.norm(a)) - r

    t = brentq(excess, 0.0, 1.0, xtol=1e-15)
    return SchmidtVector.from_values(np.r_[1.0, np.full(d - 1, t)])


def _build_qpd(args):
    n = args.n
    if getattr(args, "streamlined", None) is not None:
        ne = args.streamlined
        alpha = parse_schmidt(args.schmidt, ne) if (args.schmidt and ne) else None
        if ne and alpha is None:
            raise UsageError("--streamlined n_e > 0 needs --schmidt of length 2^n_e")
        try:
            q = qpd_streamlined(n, ne, alpha)
        except ValueError as e:
            raise UsageError(str(e)) from None
        return q, {"builder": "streamlined", "n_e": ne,
                   "schmidt": None if alpha is None else alpha.alpha.tolist()}
    if getattr(args, "baseline", False) or not args.schmidt:
        return qpd_baseline(n), {"builder": "baseline"}
    alpha = parse_schmidt(args.schmidt, n)
    return qpd_nme(n, alpha), {"builder": "nme", "schmidt": alpha.alpha.tolist(),
                               "robustness": robustness_pure(alpha)}


def _check_n(n, hi=4):
    if n is None or not 1 <= n <= hi:
        raise UsageError(f"--n must be in [1, {hi}]")


# ---------------------------------------------------------------------------
# Commands; each returns (exit code, record or rows)
# ---------------------------------------------------------------------------


def cmd_overhead(args):
    if args.table:
        ns = [int(v) for v in args.ns.split(",")]
        rs = [float(v) for v in args.rs.split(",")]
        rows = [{"n": n, "R": r, "gamma": g, "gamma_nme": gr,
                 "gamma_formula": "2^(n+1)-1", "gamma_nme_formula": "2^(n+1)/(R+1)-1"}
                for n, r, g, gr in overhead_table(ns, rs)]
        return EXIT_OK, rows
    _check_n(args.n, 12)
    if args.schmidt:
        alpha = parse_schmidt(args.schmidt, args.n)
        r = robustness_pure(alpha)
        spec_extra = {"schmidt": alpha.alpha.tolist()}
    elif args.robustness is not None:
        r = args.robustness
        spec_extra = {}
    else:
        raise UsageError("overhead needs --table, --robustness or --schmidt")
    try:
        g = overhead_nme(args.n, r)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return EXIT_OK, {"n": args.n, "R": r, "gamma": overhead_baseline(args.n), "gamma_nme": g, **spec_extra}


def cmd_verify(args):
    _check_n(args.n)
    q, info = _build_qpd(args)
    rep = verify_identity(q)
    rep["tol"] = args.tol
    rep["status"] = "ok" if rep["max_abs_error"] <= args.tol else "failed"
    rep.update(info)
    return (EXIT_OK if rep["status"] == "ok" else EXIT_VERIFY), rep


def cmd_mub_check(args):
    _check_n(args.n)
    rep = audit(args.n)
    ok = all(v <= args.tol for v in rep.values())
    return (EXIT_OK if ok else EXIT_VERIFY), {
        "n": args.n, "tol": args.tol, "checks": rep, "status": "ok" if ok else "failed"}


def _config(args):
    try:
        return EstimatorConfig(args.shots, args.seed, args.mode, args.workers)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_estimate(args):
    _check_n(args.n)
    q, info = _build_qpd(args)
    psi = parse_state(args.input, args.n)
    obs = parse_observable(args.observable, args.n)
    res = estimate(q, psi, obs, _config(args))
    exact = exact_value(psi, obs)
    rec = res.as_dict()
    rec.update(info)
    rec.update({"n": args.n, "exact": exact, "abs_error": abs(res.estimate - exact),
                "kappa_squared": q.kappa ** 2})
    return EXIT_OK, rec


def cmd_sweep(args):
    _check_n(args.n)
    if not 2 <= args.grid <= MAX_GRID:
        raise UsageError(f"--grid must be in [2, {MAX_GRID}]")
    d = 1 << args.n
    psi = parse_state(args.input, args.n)
    obs = parse_observable(args.observable, args.n)
    cfg = _config(args)
    exact = exact_value(psi, obs)
    rows = []
    for r in np.linspace(0, d - 1, args.grid):
        alpha = schmidt_for_robustness(args.n, float(r))
        q = qpd_nme(args.n, alpha)
        res = estimate(q, psi, obs, cfg)
        rows.append({
            "R": float(r),
            "kappa_theory": overhead_nme(args.n, float(r)),
            "kappa_empirical": math.sqrt(res.second_moment),
            "estimate": res.estimate,
            "true_value": exact,
            "abs_error": abs(res.estimate - exact),
        })
    return EXIT_OK, rows


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _clean(x):
    """Replace non-finite floats by status strings so JSON never holds NaN."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "undefined"
        if math.isinf(x):
            return "infinite"
        return x
    if isinstance(x, np.integer):
        return int(x)
    return x


def render(payload, fmt: str, spec: dict) -> str:
    if fmt == "csv":
        rows = payload if isinstance(payload, list) else [payload]
        flat = [{k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in _clean(r).items()}
                for r in rows]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(flat[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(flat)
        return buf.getvalue()
    body = {"schema_version": SCHEMA_VERSION, "version": __version__, "spec": spec}
    if isinstance(payload, list):
        body["rows"] = payload
    else:
        body.update(payload)
    return json.dumps(_clean(body), indent=2, allow_nan=False) + "\n"


def _default_format(command: str, args) -> str:
    if command == "sweep" or (command == "overhead" and args.table):
        return "csv"
    return "json"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nmecut", description="Wire cutting with non-maximally entangled states.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--output", help=f"output file (default: stdout, or ${OUTPUT_ENV}/<command>.<ext>)")

    def qpd_args(sp):
        sp.add_argument("--n", type=int, required=True)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--baseline", action="store_true")
        g.add_argument("--streamlined", type=int, metavar="N_E")
        sp.add_argument("--schmidt", help="comma list, 'maximal' or 'separable'")

    def mc_args(sp):
        sp.add_argument("--observable", required=True)
        sp.add_argument("--input", default="plus^n")
        sp.add_argument("--shots", type=int, default=100_000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--mode", choices=("trajectory", "density"), default="trajectory")
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("overhead", help="sampling overhead formulas")
    sp.add_argument("--table", action="store_true")
    sp.add_argument("--ns", default="1,2,3")
    sp.add_argument("--rs", default="0,0.25,0.5,1,3,7")
    sp.add_argument("--n", type=int)
    sp.add_argument("--robustness", type=float)
    sp.add_argument("--schmidt")
    common(sp)

    sp = sub.add_parser("verify", help="check a decomposition reconstructs the identity")
    qpd_args(sp)
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp)

    sp = sub.add_parser("mub-check", help="audit the mutually unbiased bases")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp)

    sp = sub.add_parser("estimate", help="Monte Carlo estimate through a cut")
    qpd_args(sp)
    mc_args(sp)
    common(sp)

    sp = sub.add_parser("sweep", help="overhead and estimate along an R grid")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--grid", type=int, default=9)
    mc_args(sp)
    common(sp)
    return p


COMMANDS = {
    "overhead": cmd_overhead,
    "verify": cmd_verify,
    "mub-check": cmd_mub_check,
    "estimate": cmd_estimate,
    "sweep": cmd_sweep,
}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    spec = {k: v for k, v in vars(args).items() if k not in ("output", "format")}
    try:
        code, payload = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"nmecut: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    fmt = args.format or _default_format(args.command, args)
    text = render(payload, fmt, spec)
    target = args.output
    if target is None and os.environ.get(OUTPUT_ENV):
        target = str(Path(os.environ[OUTPUT_ENV]) / f"{args.command}.{fmt}")
    if target:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text, encoding="utf-8")
    stdout.write(text)
    return code


def main():
    sys.exit(run())
