"""Command-line entry point: `hadamard {eval,star,cycle,verify,oracle}`."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path as FsPath


from . import __version__
from . import cycles as cy
from .errors import DomainError, HadamardKitError, NumericError
from .functions import FunctionDef, eval_series, function_from_record, series_hadamard, taylor_coeffs
from .hadamard import GridResult, hadamard_eval, hadamard_grid, localized_product, pohlen_eval
from .quadrature import DEFAULT_TOL
from .sphere_sets import (
    convolvable,
    is_proper,
    parse_extended,
    set_product,
    star_eligible,
    starset_from_record,
    strongly_convolvable,
)

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _trailer("UsageError", message, EXIT_USAGE)
        sys.exit(EXIT_USAGE)


def _trailer(kind: str, message: str, code: int) -> None:
    print(f"error: {message}", file=sys.stderr)
    print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)


# ---------------------------------------------------------------------------
# Config handling
# ---------------------------------------------------------------------------


def _complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        re_, im_ = x
        return complex(parse_extended(re_), parse_extended(im_))
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    return complex(x)


def _single_z(v) -> complex:
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return _complex(v)
    if isinstance(v, list):
        return _complex(v[0])
    return _complex(v)


def _finite(name: str, x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite")
    return x


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _tolerance(cfg: dict, override: float | None) -> float:
    tol = float(override if override is not None else cfg.get("tol", DEFAULT_TOL))
    if not 0 < tol <= 1e-2:
        raise ValueError(f"tol must lie in (0, 1e-2], got {tol}")
    return tol


def _resolve_sets(cfg: dict) -> dict:
    return {name: starset_from_record(rec).with_label(name) for name, rec in cfg.get("sets", {}).items()}


def _resolve_functions(cfg: dict) -> dict:
    return {name: function_from_record(rec) for name, rec in cfg.get("functions", {}).items()}


def _lookup(table: dict, name, kind: str):
    if isinstance(name, dict) or (isinstance(name, str) and name.startswith("preset:")):
        return starset_from_record(name)
    try:
        return table[name]
    except KeyError:
        raise ValueError(f"unknown {kind} {name!r}; defined: {sorted(table)}") from None


def grid_points(cfg: dict) -> list[complex]:
    """Explicit `z` list and/or a polar `grid` {center, radii, count | angles, offset}."""
    pts = [_complex(z) for z in cfg.get("z", [])]
    g = cfg.get("grid")
    if g:
        center = _complex(g.get("center", 0))
        if "angles" in g:
            angles = [_finite("angle", float(parse_extended(a))) for a in g["angles"]]
        else:
            n = int(g.get("count", 12))
            off = float(parse_extended(g.get("offset", 0.0)))
            angles = [off + 2 * math.pi * k / n for k in range(n)]
        for r in g.get("radii", [1.0]):
            r = _finite("radius", float(parse_extended(r)))
            pts.extend(center + r * complex(math.cos(a), math.sin(a)) for a in angles)
    for z in pts:
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"grid point {z!r} is not finite")
    return pts


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _write(path: str | None, text: str) -> None:
    if path:
        FsPath(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _manifest(args, cfg, extra: dict) -> dict:
    return {
        "tool": "hadamard-kit",
        "version": __version__,
        "command": args.command,
        "config_path": getattr(args, "config", None),
        "inputs": cfg,
        "seed": args.seed,
        "threads": args.threads,
        **extra,
    }


def _write_manifest(out: str | None, manifest: dict) -> None:
    if out:
        FsPath(out + ".manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")


def cmd_eval(args) -> int:
    t0 = time.perf_counter()
    cfg = load_config(args.config)
    tol = _tolerance(cfg, args.tol)
    margin = float(cfg.get("margin", cy.DEFAULT_MARGIN))
    sets = _resolve_sets(cfg)
    funcs = _resolve_functions(cfg)
    prod = cfg.get("product", {})
    f1 = _lookup(funcs, prod.get("f1"), "function")
    f2 = _lookup(funcs, prod.get("f2"), "function")
    pts = grid_points(cfg)
    if not pts:
        raise ValueError("config has no evaluation points (`z` or `grid`)")
    method = cfg.get("method", "generalized")
    t_setup = time.perf_counter() - t0
    if "localized" in cfg:
        loc = cfg["localized"]
        res = localized_product(f1, f2, _lookup(sets, loc["U"], "set"), _lookup(sets, loc["V"], "set"), pts,
                                tol=tol, margin=margin, threads=args.threads)
        eps_used = res.cycle_used.eps
    elif "K" in cfg:
        res = hadamard_grid(f1, f2, _lookup(sets, cfg["K"], "set"), pts, tol=tol, margin=margin,
                            threads=args.threads)
        eps_used = res.cycle_used.eps
    else:
        if method not in ("generalized", "pohlen"):
            raise ValueError("method must be 'generalized' or 'pohlen'")
        runs = []
        for z in pts:
            if method == "pohlen":
                runs.append(pohlen_eval(f1, f2, z, tol, cfg.get("ambiguous", "cc+"), margin))
            else:
                runs.append(hadamard_eval(f1, f2, z, tol, margin=margin))
        res = GridResult(pts, [r.value for r in runs], runs[-1].cycle, [r.error_estimate for r in runs])
        eps_used = [r.cycle.eps for r in runs]
    t_eval = time.perf_counter() - t0 - t_setup
    _write(args.out, res.to_csv())
    if args.dump_cycle:
        FsPath(args.dump_cycle).write_text(json.dumps(res.cycle_used.to_record()) + "\n", encoding="utf-8")
    _write_manifest(args.out, _manifest(args, cfg, {
        "tolerances": {"quadrature_tol": tol, "margin": margin, "synthesis_eps": eps_used,
                       "max_arc_step": cy.MAX_ARC_STEP, "window_pad": cy.WINDOW_PAD},
        "method": "localized" if "localized" in cfg else ("shared" if "K" in cfg else method),
        "cycle_hash": res.cycle_used.digest(),
        "points": len(pts),
        "timings": {"setup_s": t_setup, "evaluate_s": t_eval},
    }))
    return EXIT_OK


def cmd_star(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    sets = _resolve_sets(cfg)
    names = cfg.get("star") or list(sets)[:2]
    pair = [_lookup(sets, n, "set") for n in names] if names else []
    pair += [starset_from_record(s) for s in (args.set or [])]
    if len(pair) != 2:
        raise UsageError("star needs exactly two sets (config `star` list or two --set flags)")
    s1, s2 = pair
    report = {
        "S1": s1.to_record(),
        "S2": s2.to_record(),
        "proper": [is_proper(s1), is_proper(s2)],
        "convolvable": convolvable(s1, s2),
        "star_eligible": star_eligible(s1, s2),
        "strongly_convolvable": strongly_convolvable(s1, s2),
        "product": set_product(s1, s2).to_record(),
    }
    _write(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def cmd_cycle(args) -> int:
    cfg = load_config(args.config)
    margin = float(cfg.get("margin", cy.DEFAULT_MARGIN))
    sets = _resolve_sets(cfg)
    funcs = _resolve_functions(cfg)
    if "product" in cfg:
        prod = cfg["product"]
        S1 = _lookup(funcs, prod.get("f1"), "function").singular
        S2 = _lookup(funcs, prod.get("f2"), "function").singular
    else:
        n1, n2 = cfg["pair"]
        S1, S2 = _lookup(sets, n1, "set"), _lookup(sets, n2, "set")
    if "K" in cfg:
        spec = cy.shared_winding_spec(S1, S2, _lookup(sets, cfg["K"], "set"), margin)
    else:
        z = _single_z(cfg["z"])
        if cfg.get("method") == "pohlen":
            spec = cy.pohlen_winding_spec(S1, S2, z, margin, cfg.get("ambiguous", "cc+"))
        else:
            spec = cy.hadamard_winding_spec(S1, S2, z, margin)
    eps = cfg.get("eps")
    c = cy.synthesize_cycle(spec, eps=None if eps is None else float(eps))
    rep = cy.certify(c, spec)
    report = {
        "ok": rep.ok,
        "n_probes": rep.n_probes,
        "violations": [[str(p), r, g] for p, r, g in rep.violations],
        "eps": c.eps,
        "n_paths": len(c.terms),
        "n_vertices": c.n_vertices,
        "cycle_hash": c.digest(),
        "windings": dict(zip(spec.labels, spec.windings)),
        "zero_winding": spec.zero_winding,
    }
    if args.dump_cycle:
        FsPath(args.dump_cycle).write_text(json.dumps(c.to_record()) + "\n", encoding="utf-8")
    _write(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_OK if rep.ok else EXIT_NUMERIC


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suite

    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES) + ['all']}")
    reports = run_suite(args.suite, seed=args.seed)
    ok = all(r.ok for r in reports)
    body = {"ok": ok, "seed": args.seed, "suites": [r.to_record() for r in reports]}
    _write(args.out, json.dumps(body, indent=2) + "\n")
    for r in reports:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.suite} ({r.seconds:.1f}s)", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_oracle(args) -> int:
    f = FunctionDef.from_text(args.expr)
    a = taylor_coeffs(f, args.r, args.n)
    body: dict = {"expr": args.expr, "r": args.r, "coeffs": [[c.real, c.imag] for c in a]}
    if args.expr2:
        g = FunctionDef.from_text(args.expr2)
        c = series_hadamard(a, taylor_coeffs(g, args.r2 or args.r, args.n))
        body["expr2"] = args.expr2
        body["product_coeffs"] = [[x.real, x.imag] for x in c]
        if args.z is not None:
            z = _complex(args.z)
            v = complex(eval_series(c, z))
            body["z"] = [z.real, z.imag]
            body["series_value"] = [v.real, v.imag]
    _write(args.out, json.dumps(body, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _default_threads() -> int:
    raw = os.environ.get("HADAMARD_KIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--tol", type=float, help="quadrature tolerance, in (0, 1e-2]")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized probes and suites")
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads for grid evaluation (env HADAMARD_KIT_THREADS)")

    p = _Parser(prog="hadamard", description="Generalized Hadamard products on C* by certified contour integration.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common], help="evaluate f1 * f2 on points or a grid")
    e.add_argument("--config", required=True)
    e.add_argument("--dump-cycle", help="write the (last) cycle used as JSON")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("star", parents=[common], help="star product and eligibility of two sets")
    s.add_argument("--config")
    s.add_argument("--set", action="append", help="set record or preset, e.g. 'preset:ray(pi,1)'")
    s.set_defaults(func=cmd_star)

    c = sub.add_parser("cycle", parents=[common], help="synthesize, certify and dump a cycle")
    c.add_argument("--config", required=True)
    c.add_argument("--dump-cycle")
    c.set_defaults(func=cmd_cycle)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", help="series-oracle, dilog, defect, residue, pohlen, homology, "
                                 "shared-cycle, sets, quadrature, localized or all")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", parents=[common], help="Taylor coefficients and coefficient-wise products")
    o.add_argument("kind", choices=["taylor", "series"])
    o.add_argument("--expr", required=True)
    o.add_argument("--expr2")
    o.add_argument("--r", type=float, default=0.5, help="radius of the sampling circle")
    o.add_argument("--r2", type=float)
    o.add_argument("--n", type=int, default=16)
    o.add_argument("--z")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.command == "oracle" and args.kind == "series" and not args.expr2:
        parser.error("oracle series needs --expr2")
    try:
        return args.func(args)
    except UsageError as exc:
        _trailer("UsageError", str(exc), EXIT_USAGE)
        return EXIT_USAGE
    except DomainError as exc:
        _trailer(type(exc).__name__, str(exc), EXIT_DOMAIN)
        return EXIT_DOMAIN
    except NumericError as exc:
        _trailer(type(exc).__name__, str(exc), EXIT_NUMERIC)
        return EXIT_NUMERIC
    except HadamardKitError as exc:
        _trailer(type(exc).__name__, str(exc), EXIT_DOMAIN)
        return EXIT_DOMAIN
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        _trailer("ConfigError", f"{type(exc).__name__}: {exc}", EXIT_DOMAIN)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
