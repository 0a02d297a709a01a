"""Command-line front end: simulate, search, measure, bench, range.

Every command requires an explicit --seed and writes its outputs next to
a '<out>.meta.json' sidecar recording the tool version, the seed and the
resolved parameters, so a run can be reproduced from its artifacts alone.
Exit codes: 0 success, 2 usage or invalid arguments, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .bench import (TrialGrid, mcb_grid, range_distribution, run_grid,
                    save_bench_csv, save_bench_json, save_range_csv)
from .golden import GssParams, golden_section, iterative_gss
from .harmonic import (HmcParams, edge_measures, harmonic_bisection_search,
                       mc_hitting_oracle, save_measures_csv)
from .mcb import McbParams, mcb_search
from .paths import (BRIDGE, CAUCHY, fill_dyadic, load_grid_csv, load_walk_csv,
                    new_bridge, save_grid_csv, simulate_cauchy)
from .rng import derive_seed
from .scmap import ScSolverError, WalkPolygon

KIND_ALIASES = {"bridge": BRIDGE, "brownian_bridge": BRIDGE, "cauchy": CAUCHY}
STRATEGY_ALIASES = {"max": "max_measure", "sample": "sample_measure"}


def _require_positive(value: int, flag: str) -> None:
    # grids need at least one dyadic split; level 0 is a usage error
    if value < 1:
        raise ValueError(f"{flag} must be >= 1, got {value}")


def _parse_int_list(text: str) -> list[int]:
    """'1..8' -> [1, ..., 8]; '1,3,5' -> [1, 3, 5]; '4' -> [4]."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty range '{text}'")
        return list(range(lo, hi + 1))
    return [int(p) for p in text.split(",") if p.strip()]


def _meta(args, **extra) -> dict:
    skip = {"func", "config"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    meta = {"tool": "pathmin", "version": __version__, "command": args.command,
            "seed": args.seed, "params": params}
    meta.update(extra)
    return meta


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_simulate(args) -> int:
    _require_positive(args.level, "--level")
    kind = KIND_ALIASES[args.kind]
    if kind == BRIDGE:
        grid = fill_dyadic(args.seed, args.level)
    else:
        grid = simulate_cauchy(args.seed, args.level)
    save_grid_csv(grid, args.out, extra_meta=_meta(args))
    gm = grid.grid_min
    print(f"{kind} level {args.level}: {len(grid.times)} points, "
          f"grid min {gm.value:.6g} at t = {gm.time:.6g} -> {args.out}")
    return 0


def cmd_search(args) -> int:
    extras: dict = {}
    if args.method in ("naive-gss", "iter-gss"):
        if args.path:
            grid = load_grid_csv(args.path)
        else:
            _require_positive(args.level, "--level")
            grid = fill_dyadic(derive_seed(args.seed, 0), args.level)
        gss = GssParams(epsilon=args.epsilon, max_iters=args.max_iters)
        if args.method == "naive-gss":
            rep = golden_section(grid, (0.0, 1.0), gss, seed=args.seed)
        else:
            rep = iterative_gss(grid, args.m, gss, seed=args.seed)
        gm = grid.grid_min
        extras = {"grid_min": {"time": gm.time, "value": gm.value},
                  "error_vs_grid_min": rep.min_value - gm.value}
    elif args.method == "mcb":
        if args.path:
            grid = load_grid_csv(args.path)
        else:
            _require_positive(args.l, "--l")
            kind = KIND_ALIASES[args.kind]
            if kind == BRIDGE:
                grid = fill_dyadic(derive_seed(args.seed, 0), args.l)
            else:
                grid = simulate_cauchy(derive_seed(args.seed, 0), args.l)
        rep = mcb_search(grid, McbParams(r=args.r, g=args.g,
                                         seed=derive_seed(args.seed, 1)))
        rep.seed = args.seed
        gm = grid.grid_min
        extras = {"grid_min": {"time": gm.time, "value": gm.value},
                  "error_vs_grid_min": rep.min_value - gm.value}
    elif args.method == "harmonic":
        if args.path:
            path = load_grid_csv(args.path)
        else:
            path = new_bridge(derive_seed(args.seed, 0))
        strategy = STRATEGY_ALIASES.get(args.strategy, args.strategy)
        hp = HmcParams(beta=args.beta, strategy=strategy, solver=args.solver,
                       seed=derive_seed(args.seed, 1))
        rep = harmonic_bisection_search(path, args.budget, hp)
        rep.seed = args.seed
    else:
        raise ValueError(f"unknown search method '{args.method}'")
    payload = rep.to_dict()
    payload.update(extras)
    payload["meta"] = _meta(args)
    _write_json(args.out, payload)
    print(f"{args.method}: min {rep.min_value:.6g} at t = {rep.argmin_t:.6g} "
          f"({rep.queries} queries) -> {args.out}")
    return 0


def _load_polygon(args) -> WalkPolygon:
    if args.walk:
        times, values = load_walk_csv(args.walk)
    else:
        n = args.walk_nodes
        if n < 2:
            raise ValueError("--walk-nodes must be >= 2")
        path = new_bridge(derive_seed(args.seed, 100))
        times = np.arange(n + 1) / float(n)
        values = np.array([path.query(t) for t in times])
    return WalkPolygon(times=times, values=values, beta=args.beta)


def cmd_measure(args) -> int:
    poly = _load_polygon(args)
    em = edge_measures(poly, solver=args.solver)
    oracle = None
    if args.oracle is not None:
        _require_positive(args.oracle, "--oracle")
        oracle = mc_hitting_oracle(poly, walkers=args.oracle, dt=args.dt,
                                   depth=args.depth,
                                   seed=derive_seed(args.seed, 1))
    save_measures_csv(em, args.out, extra_meta=_meta(args), oracle=oracle)
    top = int(np.argmax(em.weights))
    line = (f"{poly.n_edges} edges, beta = {poly.beta}: heaviest edge {top + 1} "
            f"on [{em.times[top]:.6g}, {em.times[top + 1]:.6g}] "
            f"w = {em.weights[top]:.6g}")
    if oracle is not None:
        line += f" (mc {oracle.weights[top]:.6g} +- {oracle.stderr[top]:.6g})"
    print(f"{line} -> {args.out}")
    return 0


def cmd_bench(args) -> int:
    gss = GssParams(epsilon=args.epsilon, max_iters=args.max_iters)
    if args.method in ("mcb", "mcb-cauchy"):
        if not args.n:
            raise ValueError("--n is required for bisection benchmarks")
        ns = _parse_int_list(args.n)
        cells = [{"l": n, "r": n, "g": 2 ** n} for n in ns]
    elif args.method == "iter-gss":
        if not args.m:
            raise ValueError("--m is required for iter-gss benchmarks")
        cells = [{"m": m} for m in _parse_int_list(args.m)]
    else:
        cells = [{}]
    grid = TrialGrid(method=args.method, cells=cells, trials=args.trials,
                     seed=args.seed, level=args.level, gss=gss)
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    rows = run_grid(grid, threads=threads)
    save_bench_csv(rows, args.out)
    save_bench_json(rows, f"{args.out}.json", meta=_meta(args))
    _write_json(f"{args.out}.meta.json", _meta(args))
    flagged = sum(r.flagged for r in rows)
    print(f"{args.method}: {len(rows)} cells x {args.trials} trials"
          + (f", {flagged} flagged" if flagged else "") + f" -> {args.out}")
    return 0


def cmd_range(args) -> int:
    _require_positive(args.level, "--level")
    kind = KIND_ALIASES[args.kind]
    rd = range_distribution(kind, args.level, args.paths, bins=args.bins,
                            seed=args.seed)
    save_range_csv(rd, args.out)
    med = float(np.median(rd.ranges))
    _write_json(f"{args.out}.meta.json",
                _meta(args, mean_range=rd.mean_range, median_range=med))
    print(f"{kind} level {args.level}: {args.paths} paths, mean range "
          f"{rd.mean_range:.6g}, median {med:.6g} -> {args.out}")
    return 0


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathmin",
        description="Query-budgeted minimum search on stochastic paths.")
    parser.add_argument("--version", action="version", version=f"pathmin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, required=True,
                       help="root seed; all randomness derives from it")
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--config", default=None,
                       help="JSON file of defaults; explicit flags win")

    p = sub.add_parser("simulate", help="simulate one grid path and write it as CSV")
    common(p)
    p.add_argument("--kind", choices=sorted(KIND_ALIASES), default="bridge")
    p.add_argument("--level", type=int, default=10, help="dyadic grid level")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("search", help="run one budgeted minimum search")
    common(p)
    p.add_argument("--method", choices=["naive-gss", "iter-gss", "mcb", "harmonic"],
                   required=True)
    p.add_argument("--path", default=None,
                   help="grid CSV to search instead of simulating one")
    p.add_argument("--level", type=int, default=10, help="grid level for GSS methods")
    p.add_argument("--m", type=int, default=3, help="iter-gss: 2**m panels")
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--kind", choices=sorted(KIND_ALIASES), default="bridge",
                   help="mcb: path kind")
    p.add_argument("--l", type=int, default=10, help="mcb: grid level")
    p.add_argument("--r", type=int, default=10, help="mcb: descent depth")
    p.add_argument("--g", type=int, default=1024, help="mcb: descent count")
    p.add_argument("--budget", type=int, default=33, help="harmonic: query budget")
    p.add_argument("--beta", type=float, default=1.0, help="harmonic: amplitude")
    p.add_argument("--strategy", default="max_measure",
                   choices=["max_measure", "sample_measure", "max", "sample"])
    p.add_argument("--solver", choices=["full", "perturbative"], default="full",
                   help="harmonic: pre-vertex solver")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("measure", help="harmonic edge weights of a walk polygon")
    common(p)
    p.add_argument("--walk", default=None, help="CSV of walk nodes (t,value)")
    p.add_argument("--walk-nodes", type=int, default=6,
                   help="edges of a synthetic bridge walk when --walk is absent")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--solver", choices=["full", "perturbative"], default="full")
    p.add_argument("--oracle", type=int, default=None, metavar="N",
                   help="also run the random-walk oracle with N walkers and "
                        "append mc_weight,mc_stderr columns")
    p.add_argument("--dt", type=float, default=1e-4, help="oracle near-field step")
    p.add_argument("--depth", type=float, default=10.0, help="oracle start depth")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("bench", help="accuracy/runtime grid over one method")
    common(p)
    p.add_argument("--method", choices=["naive-gss", "iter-gss", "mcb", "mcb-cauchy"],
                   required=True)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--level", type=int, default=10, help="grid level for GSS methods")
    p.add_argument("--n", default=None,
                   help="mcb cells, e.g. '1..8' or '2,4,6' (l = r = n, g = 2**n)")
    p.add_argument("--m", default=None, help="iter-gss cells, e.g. '0..4'")
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: all cores); results do not "
                        "depend on it")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("range", help="range statistics of simulated paths")
    common(p)
    p.add_argument("--kind", choices=sorted(KIND_ALIASES), default="bridge")
    p.add_argument("--level", type=int, default=10)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--bins", type=int, default=60)
    p.set_defaults(func=cmd_range)

    if defaults:
        # subparsers parse into a fresh namespace, so config-supplied
        # defaults must be installed on every one of them
        parser.set_defaults(**defaults)
        for sp in sub.choices.values():
            sp.set_defaults(**defaults)
    return parser


def _extract_config(argv: list[str]) -> dict:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            break
        if tok.startswith("--config="):
            path = tok.split("=", 1)[1]
            break
    else:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("--config must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        config = _extract_config(argv)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser(config or None)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ScSolverError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
