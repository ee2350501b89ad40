"""Command-line front end.

Every subcommand validates its configuration before computing and writes
its outputs atomically.  Exit codes: 0 success, 2 configuration error,
3 identity failure, 4 ratio-window breach.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import JacobiSpecError
from .jacobi import (
    GridFunction,
    JacobiParams,
    SpectralFunction,
    build_quadrature,
    coefficients,
    eval_phi,
)
from .littlewood_paley import g_fractional, g_function
from .multipliers import LIBRARY_NAMES, mihlin_check, multiplier_library, riesz, riesz_adjoint
from .semigroups import heat_kernel, poisson_kernel_series, poisson_kernel_subordinated
from .spaces import (
    config_hash,
    make_suite,
    potential_norm_H,
    reports_to_csv,
    reports_to_json,
    atomic_write,
    sobolev_norm_W,
    tl_norm_F,
    tl_norm_T,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
    verify_theoremZ,
)
from .vexp import parse_exponent

EXIT_CONFIG, EXIT_IDENTITY, EXIT_WINDOW = 2, 3, 4

DEFAULTS = {
    "alpha": 0.0,
    "beta": 0.0,
    "gamma": 0.5,
    "k": 1,
    "r": 1,
    "p": "const:2",
    "order": 2048,
    "grid": 256,
    "seed": 0,
    "degrees": "8,16,32,64",
    "n_random": 20,
    "threads": None,
}


class ConfigError(Exception):
    pass


def _kv(text: str) -> dict:
    """``"n=3,t=0.5"`` -> ``{"n": "3", "t": "0.5"}``."""
    out = {}
    for part in filter(None, text.split(",")):
        key, sep, val = part.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value, got {part!r}")
        out[key.strip()] = val.strip()
    return out


def _num(x):
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"not a number: {x!r}") from None
    return int(v) if v.is_integer() and "." not in str(x) and "e" not in str(x).lower() else v


def _resolve(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(loaded) - set(DEFAULTS) - {"out"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["threads"] is None:
        cfg["threads"] = int(os.environ.get("JS_THREADS", "1"))
    return cfg


def _params(cfg) -> JacobiParams:
    try:
        return JacobiParams(float(cfg["alpha"]), float(cfg["beta"]))
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _exponent(cfg):
    try:
        return parse_exponent(str(cfg["p"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _quad(cfg):
    order = int(cfg["order"])
    if order < 64 or order % 64:
        raise ConfigError(f"--order must be a positive multiple of 64, got {order}")
    return build_quadrature(order)


def _fmt(x) -> str:
    if isinstance(x, (complex, np.complexfloating)):
        return "%.16e%+.16ej" % (x.real, x.imag)
    if isinstance(x, (float, np.floating)):
        return "%.16e" % x
    return str(x)


def _table(header, rows, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out):
    if out and out != "-":
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _recorded(cfg):
    # thread count never changes results, so it stays out of the hash
    return {k: v for k, v in cfg.items() if k != "threads"}


def _meta_comment(cfg):
    return f"version={__version__} config_hash={config_hash(_recorded(cfg))} seed={cfg['seed']}"


def _theta_grid(n: int) -> np.ndarray:
    if n < 1:
        raise ConfigError("--grid must be positive")
    return (np.arange(n) + 0.5) * np.pi / n


# --- test functions -------------------------------------------------------------


def _func(spec: str, params: JacobiParams, cfg):
    """A test function by name: ``mode:n``, ``random:degree``, ``const:c``, ``cos:k``, ``bump``."""
    name, _, arg = spec.partition(":")
    try:
        if name == "mode":
            return SpectralFunction.mode(params, int(arg))
        if name == "random":
            suite = make_suite(params, int(arg or 16), int(cfg["seed"]), n_random=1, decays=(1.0,), single_max=-1)
            return suite.functions[0][1]
        if name in ("const", "cos", "bump"):
            quad = _quad(cfg)
            if name == "const":
                vals = np.full(quad.nodes.size, float(arg or 1.0))
            elif name == "cos":
                vals = np.cos(int(arg or 1) * quad.nodes)
            else:
                th = quad.nodes
                vals = np.exp(-1.0 / (th * (np.pi - th)))
            return coefficients(GridFunction(quad, vals), params, quad.max_modes())
    except ValueError as exc:
        raise ConfigError(f"bad function spec {spec!r}: {exc}") from None
    raise ConfigError(f"unknown function {spec!r}; use mode:N, random:DEG, const:C, cos:K or bump")


# --- subcommands ----------------------------------------------------------------


def cmd_eval(args, cfg):
    params = _params(cfg)
    chosen = [x for x in (args.phi, args.lam, args.heat_kernel, args.poisson_kernel, args.multiplier) if x]
    if len(chosen) != 1:
        raise ConfigError("eval needs exactly one of --phi, --lambda, --heat-kernel, --poisson-kernel, --multiplier")
    if args.phi:
        n = int(_kv(args.phi).get("n", -1))
        if n < 0:
            raise ConfigError("--phi needs n=<nonnegative integer>")
        theta = _theta_grid(int(cfg["grid"]))
        vals = eval_phi(params, n, theta)
        return _table(["theta", f"phi_{n}"], zip(theta, vals), [_meta_comment(cfg)])
    if args.lam:
        n = int(_kv(args.lam).get("n", 0))
        return _table(["n", "lambda"], [(i, params.lam(i)) for i in range(n + 1)], [_meta_comment(cfg)])
    if args.heat_kernel or args.poisson_kernel:
        return _kernel_text(params, cfg, "heat" if args.heat_kernel else "poisson", _kv(args.heat_kernel or args.poisson_kernel))
    kv = _kv(args.multiplier)
    name = kv.pop("name", None)
    if name not in LIBRARY_NAMES:
        raise ConfigError(f"--multiplier needs name=<one of {', '.join(LIBRARY_NAMES)}>")
    m = _multiplier(name, params, kv)
    n = int(cfg["grid"])
    vals = m.on_spectrum(params, n - 1)
    return _table(["n", "lambda", "m"], zip(range(n), params.lam(np.arange(n)), vals), [_meta_comment(cfg)])


def _multiplier(name, params, kv):
    kw = {}
    for key, val in kv.items():
        if key == "signs":
            kw[key] = [float(s) for s in val.split(";")]
        else:
            kw[key] = _num(val)
    try:
        return multiplier_library(name, params, **kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _kernel_text(params, cfg, kind, kv):
    try:
        t = float(kv.get("t", "nan"))
    except ValueError:
        raise ConfigError("kernel needs t=<positive number>") from None
    if not t > 0:
        raise ConfigError("kernel needs t=<positive number>")
    theta = _theta_grid(int(cfg["grid"]))
    method = kv.get("method", "series")
    if kind == "heat":
        K = heat_kernel(params, t, theta)
    elif method == "subordinated":
        K = poisson_kernel_subordinated(params, t, theta)
    else:
        K = poisson_kernel_series(params, t, theta)
    comments = [
        _meta_comment(cfg),
        f"kind={K.kind} t={t} n_terms={K.n_terms}",
        f"symmetry max|K-K^T| = {K.asymmetry():.3e} ({'ok' if K.asymmetry() <= 1e-8 else 'FAIL'})",
    ]
    header = ["theta"] + [f"{x:.17g}" for x in theta]
    rows = [[th, *row] for th, row in zip(theta, K.values)]
    return _table(header, rows, comments)


def cmd_coeffs(args, cfg):
    params = _params(cfg)
    f = _func(args.func, params, cfg)
    n = f.coeffs.size if args.n_max is None else args.n_max + 1
    return _table(["n", "lambda", "c_n"], zip(range(n), params.lam(np.arange(n)), f.padded(n)[:n]), [_meta_comment(cfg)])


def cmd_kernel(args, cfg):
    kind = "heat" if args.kind == "heat" else "poisson"
    kv = {"t": str(args.t), "method": "subordinated" if args.kind == "poisson-subordinated" else "series"}
    return _kernel_text(_params(cfg), cfg, kind, kv)


def cmd_riesz(args, cfg):
    params = _params(cfg)
    if not params.fractional_ok:
        raise ConfigError("Riesz transforms need alpha + beta != -1")
    k = int(cfg["k"])
    if k < 1:
        raise ConfigError("--k must be >= 1")
    f = _func(args.func, params, cfg)
    rf = riesz(f, k)
    back = riesz_adjoint(rf, k)
    n = f.coeffs.size
    rows = zip(range(n), f.padded(n)[:n], rf.padded(n)[:n], back.padded(n)[:n])
    return _table(["n", "c_n", "Rk_c_n", "RkstarRk_c_n"], rows, [_meta_comment(cfg), f"k={k} target=({params.alpha + k},{params.beta + k})"])


def cmd_multiplier(args, cfg):
    params = _params(cfg)
    kv = _kv(args.params or "")
    m = _multiplier(args.name, params, kv)
    if args.mihlin is not None:
        table = mihlin_check(m, args.mihlin)
        return _table(["ell", "sup"], sorted(table.items()), [_meta_comment(cfg), f"multiplier={args.name}"])
    n = int(cfg["grid"])
    return _table(["n", "lambda", "m"], zip(range(n), params.lam(np.arange(n)), m.on_spectrum(params, n - 1)), [_meta_comment(cfg)])


def cmd_gfunc(args, cfg):
    params = _params(cfg)
    f = _func(args.func, params, cfg)
    quad = _quad(cfg)
    gamma = float(cfg["gamma"])
    if args.fractional:
        g = g_fractional(f, gamma, quad)
        label = f"g^{gamma}"
    else:
        k = int(cfg["k"])
        if not 0 < gamma < k:
            raise ConfigError(f"g^{{gamma,k}} needs 0 < gamma < k (gamma={gamma}, k={k})")
        g = g_function(f, gamma, k, quad)
        label = f"g^{gamma},{k}"
    return _table(["theta", label], zip(quad.nodes, g.values), [_meta_comment(cfg)])


def cmd_norms(args, cfg):
    params = _params(cfg)
    if not params.fractional_ok:
        raise ConfigError("norms need alpha + beta != -1")
    p = _exponent(cfg)
    quad = _quad(cfg)
    gamma, k = float(cfg["gamma"]), int(cfg["k"])
    if not 0 < gamma < k:
        raise ConfigError(f"T-norm needs 0 < gamma < k (gamma={gamma}, k={k})")
    f = _func(args.func, params, cfg)
    rows = [
        ("W", k, sobolev_norm_W(f, k, p, quad)),
        ("H", gamma, potential_norm_H(f, gamma, p, quad)),
        ("T", gamma, tl_norm_T(f, gamma, k, p, quad)),
        ("F", gamma, tl_norm_F(f, gamma, p, None, quad)),
    ]
    return _table(["norm", "order", "value"], rows, [_meta_comment(cfg), f"p={p.name}"])


def _degrees(cfg):
    try:
        degs = [int(x) for x in str(cfg["degrees"]).split(",") if x]
    except ValueError:
        raise ConfigError(f"bad --degrees {cfg['degrees']!r}") from None
    if not degs or min(degs) < 1:
        raise ConfigError("--degrees must be positive integers")
    return degs


def cmd_verify(args, cfg):
    params = _params(cfg)
    if not params.fractional_ok:
        raise ConfigError("theorem harnesses need alpha + beta != -1")
    p = _exponent(cfg)
    gamma, k, r = float(cfg["gamma"]), int(cfg["k"]), int(cfg["r"])
    which = args.theorem
    if which == "theorem1" and k < 1:
        raise ConfigError("theorem1 needs k >= 1")
    if which == "theorem2" and not 0 < gamma < k:
        raise ConfigError(f"theorem2 needs 0 < gamma < k (gamma={gamma}, k={k})")
    if which == "theoremZ" and not 0 < gamma < r:
        raise ConfigError(f"theoremZ needs 0 < gamma < r (gamma={gamma}, r={r})")
    if which == "theorem3" and not gamma > 0:
        raise ConfigError("theorem3 needs gamma > 0")
    degrees = _degrees(cfg)
    quad = _quad(cfg)
    if quad.max_modes() < max(degrees):
        raise ConfigError(f"--order {quad.order} resolves degree <= {quad.max_modes()}, need {max(degrees)}")
    out_prefix = args.out or which
    seed = int(cfg["seed"])

    def run(deg):
        suite = make_suite(params, deg, seed, int(cfg["n_random"]))
        if which == "theorem1":
            return verify_theorem1(suite, k, p, quad)
        if which == "theorem2":
            return verify_theorem2(suite, gamma, k, p, quad)
        if which == "theorem3":
            return verify_theorem3(suite, gamma, p, None, quad)
        return verify_theoremZ(suite, gamma, r, p)

    threads = max(1, int(cfg["threads"]))
    with ThreadPoolExecutor(threads) as pool:
        reports = list(pool.map(run, degrees))
    csv_text = reports_to_csv(reports, _recorded(cfg), seed)
    json_text = reports_to_json(reports, _recorded(cfg), seed)
    atomic_write(out_prefix + ".csv", csv_text)
    atomic_write(out_prefix + ".json", json_text)
    lines = []
    ident_ok = all(rep.identities_ok for rep in reports)
    window_ok = all(rep.window_ok for rep in reports)
    for deg, rep in zip(degrees, reports):
        s = rep.summary
        win = f"[{s['r_min']:.6g}, {s['r_max']:.6g}] spread {s['spread']:.4g}" if "r_min" in s else "n/a"
        ids = ", ".join(f"{name}={err:.2e}" for name, err in rep.identities.items())
        lines.append(f"{which} degree={deg}: ratio window {win}; identities {ids}")
    lines.append(f"wrote {out_prefix}.csv and {out_prefix}.json")
    lines.append("note: the ratio window r_max/r_min < 100 is a policy threshold, not a constant from the theory")
    code = 0 if ident_ok and window_ok else (EXIT_IDENTITY if not ident_ok else EXIT_WINDOW)
    return "\n".join(lines) + "\n", code


def cmd_selftest(args, cfg):
    from .checks import run_selftest

    results = run_selftest(quick=args.quick)
    rows = [(r.name, r.error, r.tol, "pass" if r.passed else "FAIL") for r in results]
    text = _table(["check", "error", "tol", "status"], rows, [_meta_comment(cfg), f"quick={bool(args.quick)}"])
    if args.out:
        atomic_write(args.out, text)
    width = max(len(r.name) for r in results)
    summary = "\n".join(
        f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  err={r.error:.2e} tol={r.tol:.0e} ({r.seconds:.1f}s)"
        for r in results
    )
    code = 0 if all(r.passed for r in results) else EXIT_IDENTITY
    return summary + "\n", code


# --- parser ------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *keys):
    p.add_argument("--config", help="JSON file of defaults (flags override)")
    p.add_argument("--threads", type=int, help="worker pool size (env JS_THREADS)")
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    for key in keys:
        if key == "gamma":
            p.add_argument("--gamma", type=float)
        elif key in ("k", "r", "order", "grid", "n_random"):
            p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int)
        elif key == "p":
            p.add_argument("--p", help="exponent preset: const:P, two:P1,P2, sin, linear, log")
        elif key == "degrees":
            p.add_argument("--degrees", help="comma-separated suite degrees")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jacobispec", description="Jacobi spectral calculus toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate phi_n, eigenvalues, kernels or multipliers")
    _common(p, "grid")
    p.add_argument("--phi", metavar="n=N")
    p.add_argument("--lambda", dest="lam", metavar="n=N")
    p.add_argument("--heat-kernel", metavar="t=T")
    p.add_argument("--poisson-kernel", metavar="t=T[,method=subordinated]")
    p.add_argument("--multiplier", metavar="name=NAME,key=val,...")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("coeffs", help="expansion coefficients of a test function")
    _common(p, "order")
    p.add_argument("--func", default="bump")
    p.add_argument("--n-max", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_coeffs)

    p = sub.add_parser("kernel", help="heat or Poisson kernel matrix")
    _common(p, "grid")
    p.add_argument("--kind", choices=["heat", "poisson", "poisson-subordinated"], default="heat")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_kernel)

    p = sub.add_parser("riesz", help="Riesz transform coefficients")
    _common(p, "k", "order")
    p.add_argument("--func", default="random:16")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_riesz)

    p = sub.add_parser("multiplier", help="tabulate a library multiplier or its Mihlin sups")
    _common(p, "grid")
    p.add_argument("--name", required=True, choices=LIBRARY_NAMES)
    p.add_argument("--params", help="key=val,... (signs as s0;s1;...)")
    p.add_argument("--mihlin", type=int, metavar="ELL_MAX")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_multiplier)

    p = sub.add_parser("gfunc", help="square function on the grid")
    _common(p, "gamma", "k", "order")
    p.add_argument("--func", default="random:16")
    p.add_argument("--fractional", action="store_true", help="g^gamma instead of g^{gamma,k}")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_gfunc)

    p = sub.add_parser("norms", help="W, H, T and F norms of a test function")
    _common(p, "gamma", "k", "p", "order")
    p.add_argument("--func", default="random:16")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_norms)

    p = sub.add_parser("verify", help="run a theorem harness")
    p.add_argument("theorem", choices=["theorem1", "theoremZ", "theorem2", "theorem3"])
    _common(p, "gamma", "k", "r", "p", "order", "degrees", "n_random")
    p.add_argument("--out", help="output prefix (default: theorem name)")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("selftest", help="run the invariant suite")
    _common(p)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--out", help="also write the pass/fail table as CSV")
    p.set_defaults(handler=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        result = args.handler(args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (JacobiSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text, code = result if isinstance(result, tuple) else (result, 0)
    if args.command in ("verify", "selftest"):
        sys.stdout.write(text)
    else:
        _emit(text, getattr(args, "out", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
