"""``prlocal`` command line: estimate, gen-hard, scaling, acceptance.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import generators
from .baselines import bippr, chernoff_walks, plain_mc
from .exact import exact_pagerank
from .graph import DirectedGraph, GraphError, OracleSession, QueryCounts, load_edge_list
from .hard_instances import InfeasibleParameters, build_hard_family, verify_family
from .rounding_push import (DEFAULT_BUDGET_CONST, DEFAULT_POLYLOG_POWER, AlgoParams,
                            adaptive_estimate, compute_params, rounding_push_run)

ALGOS = ("rounding_push", "adaptive", "plain_mc", "bippr", "exact")
EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- config

def parse_config_text(text: str) -> dict:
    """JSON object, or flat ``key=value`` lines (``#`` comments allowed)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        if not isinstance(data, dict):
            raise UsageError("JSON config must be an object")
        return data
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = _coerce(value)
    return out


def _coerce(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    if value.lower() in ("true", "false"):
        return value.lower() == "true"
    return value


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------- graphs

def _kv(spec: str) -> dict:
    out = {}
    for part in filter(None, spec.split(",")):
        if "=" not in part:
            raise UsageError(f"generator argument {part!r} is not key=value")
        k, v = part.split("=", 1)
        out[k.strip()] = _coerce(v.strip())
    return out


def graph_from_spec(spec: str) -> tuple[DirectedGraph, Optional[int]]:
    """Build a graph from ``name[:k=v,...]``; also returns a natural target.

    Names: ``self_loop``, ``two_cycle``, ``chain3``, ``regular`` (n, d, seed),
    ``random_out`` (n, max_out, seed) and ``hard`` (n, m, delta_in,
    delta_out, alpha, p, seed, index) whose target is the family's ``t``.
    """
    name, _, rest = spec.partition(":")
    kw = _kv(rest)
    try:
        if name == "self_loop":
            return generators.self_loop(), 0
        if name == "two_cycle":
            return generators.two_cycle(), 0
        if name == "chain3":
            return generators.chain3(), 2
        if name == "regular":
            return generators.random_regular(int(kw["n"]), int(kw.get("d", 2)),
                                             int(kw.get("seed", 0))), None
        if name == "random_out":
            return generators.random_out_graph(int(kw["n"]), int(kw.get("max_out", 3)),
                                               int(kw.get("seed", 0))), None
        if name == "hard":
            n = int(kw["n"])
            din = int(kw.get("delta_in", kw.get("d", 4)))
            fam = build_hard_family(n, int(kw.get("m", 2 * n)), din,
                                    int(kw.get("delta_out", din)), float(kw.get("alpha", 0.5)),
                                    int(kw.get("p", 2)), seed=int(kw.get("seed", 0)))
            idx = int(kw.get("index", fam.p))
            return fam.graphs[idx], fam.t
    except KeyError as exc:
        raise UsageError(f"generator {name!r} needs argument {exc.args[0]!r}") from None
    raise UsageError(f"unknown generator {name!r}")


# ---------------------------------------------------------------- estimate

@dataclasses.dataclass
class TrialSpec:
    graph: DirectedGraph
    algo: str
    alpha: float
    target: int
    seed: int
    budget_const: float
    polylog_power: float
    r_max: Optional[float]
    n_walks: Optional[int]
    overrides: dict


def trial_seeds(seed: int, trials: int) -> list[int]:
    return [int(c.generate_state(1)[0]) for c in np.random.SeedSequence(seed).spawn(trials)]


def _params(spec: TrialSpec) -> Optional[AlgoParams]:
    if not spec.overrides:
        return None
    g = spec.graph
    base = compute_params(g.n, g.m, g.delta_in, g.delta_out, spec.alpha)
    return dataclasses.replace(base, **spec.overrides)


def run_trial(spec: TrialSpec) -> dict:
    g, t, alpha = spec.graph, spec.target, spec.alpha
    session = OracleSession(g, seed=spec.seed)
    if spec.algo == "exact":
        rep = {"estimate": float(exact_pagerank(g, alpha)[t]),
               "queries": QueryCounts().as_dict(), "elapsed_ms": 0.0}
    elif spec.algo == "adaptive":
        rep = adaptive_estimate(session, t, g.n, g.m, g.delta_in, g.delta_out, alpha,
                                budget_const=spec.budget_const,
                                polylog_power=spec.polylog_power,
                                params=_params(spec)).to_json()
    elif spec.algo == "rounding_push":
        params = _params(spec) or compute_params(g.n, g.m, g.delta_in, g.delta_out, alpha)
        rep = rounding_push_run(session, t, params.with_r_max(spec.r_max)).to_json()
    elif spec.algo == "plain_mc":
        rep = plain_mc(session, t, alpha, spec.n_walks).to_json()
    else:
        rep = bippr(session, t, alpha, spec.r_max, spec.n_walks).to_json()
    rep["seed"] = spec.seed
    return rep


def _default_walks(algo: str, n: int, alpha: float, r_max: Optional[float]) -> Optional[int]:
    if algo == "plain_mc":
        return chernoff_walks(n, alpha)
    if algo == "bippr":
        # residues are at most r_max, which shrinks the variance roughly by that factor
        return max(1, math.ceil(chernoff_walks(n, alpha) * r_max))
    return None


def build_trials(cfg: dict) -> tuple[list[TrialSpec], DirectedGraph]:
    algo = cfg.get("algo", "adaptive")
    if algo not in ALGOS:
        raise UsageError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")
    sources = [k for k in ("graph", "gen") if cfg.get(k)]
    if len(sources) != 1:
        raise UsageError("give exactly one graph source: --graph FILE or --gen SPEC")
    if cfg.get("graph"):
        g, natural = load_edge_list(cfg["graph"]), None
    else:
        g, natural = graph_from_spec(cfg["gen"])
    alpha = float(cfg.get("alpha", 0.5))
    if not 0.0 < alpha < 1.0:
        raise UsageError(f"alpha must lie in (0, 1), got {alpha}")
    target = cfg.get("target")
    target = int(target) if target is not None else (natural if natural is not None else 0)
    if not 0 <= target < g.n:
        raise UsageError(f"target {target} outside [0, {g.n})")
    trials = int(cfg.get("trials", 1))
    if trials < 1:
        raise UsageError("trials must be >= 1")
    r_max = cfg.get("r_max")
    r_max = float(r_max) if r_max is not None else None
    if algo == "rounding_push" and r_max is None:
        raise UsageError("rounding_push needs --r-max (use adaptive when pi(t) is unknown)")
    if algo == "bippr" and r_max is None:
        r_max = 1.0 / math.sqrt(g.n)
    if r_max is not None and not r_max > 0:
        raise UsageError("r_max must be positive")
    fields = {f.name for f in dataclasses.fields(AlgoParams)} - {"alpha", "gamma", "r_max"}
    overrides = {k: cfg[k] for k in fields if k in cfg}
    n_walks = cfg.get("n_walks")
    n_walks = int(n_walks) if n_walks is not None else _default_walks(algo, g.n, alpha, r_max)
    seed = int(cfg["seed"])
    specs = [TrialSpec(g, algo, alpha, target, s,
                       float(cfg.get("budget_const", DEFAULT_BUDGET_CONST)),
                       float(cfg.get("polylog_power", DEFAULT_POLYLOG_POWER)),
                       r_max, n_walks, overrides)
             for s in trial_seeds(seed, trials)]
    return specs, g


def run_trials(specs: list[TrialSpec], jobs: int) -> list[dict]:
    if jobs <= 1 or len(specs) == 1:
        return [run_trial(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_trial, specs))


def _flat(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            for k2, v2 in v.items():
                out[f"{k}.{k2}"] = v2
        elif isinstance(v, list):
            out[k] = ";".join(map(str, v))
        else:
            out[k] = v
    return out


def write_rows(rows: list[dict], fmt: str, fh) -> None:
    if fmt == "jsonl":
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
        return
    flat = [_flat(r) for r in rows]
    cols: list[str] = []
    for r in flat:
        cols.extend(k for k in r if k not in cols)
    writer = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)


def cmd_estimate(cfg: dict) -> list[dict]:
    specs, g = build_trials(cfg)
    reports = run_trials(specs, int(cfg.get("jobs", 1)))
    exact = float(exact_pagerank(g, specs[0].alpha)[specs[0].target])
    rows = []
    fails = 0
    for i, (spec, rep) in enumerate(zip(specs, reports)):
        failed = abs(rep["estimate"] - exact) >= exact / 2
        fails += failed
        rows.append({"trial": i, "algo": spec.algo, "target": spec.target, "seed": rep["seed"],
                     "estimate": rep["estimate"], "queries": rep["queries"],
                     "elapsed_ms": rep["elapsed_ms"], "exact": exact, "failed": failed})
    rows.append({"summary": True, "algo": specs[0].algo, "target": specs[0].target,
                 "trials": len(specs), "exact": exact,
                 "mean_estimate": float(np.mean([r["estimate"] for r in reports])),
                 "mean_queries": float(np.mean([r["queries"]["total"] for r in reports])),
                 "failure_fraction": fails / len(specs)})
    return rows


# ---------------------------------------------------------------- scaling

def cmd_scaling(sizes: list[int], d: int, alpha: float, trials: int, seed: int,
                algos: list[str], budget_const: float = DEFAULT_BUDGET_CONST
                ) -> tuple[list[dict], dict[str, float]]:
    if len(sizes) < 3:
        raise UsageError("scaling needs at least 3 sizes")
    if sorted(sizes) != list(sizes) or len(set(sizes)) != len(sizes):
        raise UsageError("sizes must be strictly ascending")
    for a in algos:
        if a not in ("adaptive", "plain_mc", "bippr"):
            raise UsageError(f"scaling supports adaptive, plain_mc and bippr, not {a!r}")
    rows = []
    means: dict[str, list[float]] = {a: [] for a in algos}
    for n in sizes:
        g = generators.random_regular(n, d, seed=seed + n)
        seeds = trial_seeds(seed + n, trials)
        for a in algos:
            r_max = 1.0 / math.sqrt(n) if a == "bippr" else None
            qs = []
            for i, s in enumerate(seeds):
                spec = TrialSpec(g, a, alpha, (i * 7919) % n, s, budget_const,
                                 DEFAULT_POLYLOG_POWER, r_max, _default_walks(a, n, alpha, r_max), {})
                qs.append(run_trial(spec)["queries"]["total"])
            mean = float(np.mean(qs))
            stderr = float(np.std(qs, ddof=1) / math.sqrt(len(qs))) if len(qs) > 1 else 0.0
            means[a].append(mean)
            rows.append({"algo": a, "n": n, "mean_queries": mean, "stderr": stderr,
                         "trials": trials})
    slopes = {a: float(np.polyfit(np.log(sizes), np.log(v), 1)[0]) for a, v in means.items()}
    for r in rows:
        r["slope"] = slopes[r["algo"]]
    return rows, slopes


# ---------------------------------------------------------------- argparse

def _seed_default() -> Optional[int]:
    env = os.environ.get("PRLOCAL_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"PRLOCAL_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prlocal", description="Local PageRank estimation toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="run an estimator for one target node")
    est.add_argument("--config", help="JSON or key=value file; flags override it")
    est.add_argument("--graph", help="edge-list file")
    est.add_argument("--gen", help="generator spec, e.g. regular:n=1024,d=2,seed=11")
    est.add_argument("--algo")
    est.add_argument("--alpha", type=float)
    est.add_argument("--target", type=int)
    est.add_argument("--trials", type=int)
    est.add_argument("--seed", type=int)
    est.add_argument("--jobs", type=int)
    est.add_argument("--budget-const", type=float)
    est.add_argument("--r-max", type=float)
    est.add_argument("--n-walks", type=int)
    est.add_argument("--out")
    est.add_argument("--format", choices=("jsonl", "csv"))

    gh = sub.add_parser("gen-hard", help="write a hard instance family")
    gh.add_argument("--n", type=int, required=True)
    gh.add_argument("--m", type=int, help="edge count (default 2n)")
    gh.add_argument("--delta-in", type=int, required=True)
    gh.add_argument("--delta-out", type=int, help="default: same as --delta-in")
    gh.add_argument("--alpha", type=float, default=0.5)
    gh.add_argument("--p", type=int, default=2)
    gh.add_argument("--seed", type=int)
    gh.add_argument("--v-const", type=float, default=1.0)
    gh.add_argument("--y-const", type=float, default=1.0)
    gh.add_argument("--no-complete-y", action="store_true",
                    help="keep |Y| at its ceiling instead of a full tree")
    gh.add_argument("--verify", action="store_true", help="also report exact separation ratios")
    gh.add_argument("--outdir", required=True)

    sc = sub.add_parser("scaling", help="mean queries versus n on random regular graphs")
    sc.add_argument("--sizes", required=True, help="comma-separated, ascending, >= 3 values")
    sc.add_argument("--d", type=int, default=2)
    sc.add_argument("--alpha", type=float, default=0.5)
    sc.add_argument("--trials", type=int, default=10)
    sc.add_argument("--seed", type=int)
    sc.add_argument("--algos", default="adaptive,plain_mc")
    sc.add_argument("--budget-const", type=float, default=DEFAULT_BUDGET_CONST)
    sc.add_argument("--out", help="CSV path (default stdout)")

    acc = sub.add_parser("acceptance", help="run the acceptance criteria")
    acc.add_argument("--only", help="comma-separated criterion numbers")
    return ap


def _open_out(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _dispatch(args) -> int:
    if args.command == "estimate":
        cfg = load_config(args.config)
        for key in ("graph", "gen", "algo", "alpha", "target", "trials", "seed", "jobs",
                    "budget_const", "r_max", "n_walks", "out", "format"):
            value = getattr(args, key)
            if value is not None:
                cfg[key] = value
        if cfg.get("seed") is None:
            env = _seed_default()
            cfg["seed"] = env if env is not None else 0
        rows = cmd_estimate(cfg)
        fh, close = _open_out(cfg.get("out"))
        try:
            write_rows(rows, cfg.get("format", "jsonl"), fh)
        finally:
            if close:
                fh.close()
        return EXIT_OK

    if args.command == "gen-hard":
        seed = args.seed if args.seed is not None else (_seed_default() or 0)
        fam = build_hard_family(args.n, args.m if args.m is not None else 2 * args.n,
                                args.delta_in,
                                args.delta_out if args.delta_out is not None else args.delta_in,
                                args.alpha, args.p, seed=seed, v_const=args.v_const,
                                y_const=args.y_const, complete_y_tree=not args.no_complete_y)
        paths = fam.export(args.outdir)
        summary = {"files": [str(p) for p in paths], "manifest": fam.manifest()}
        if args.verify:
            summary["verification"] = verify_family(fam).as_dict()
        print(json.dumps(summary, indent=2, sort_keys=True))
        return EXIT_OK

    if args.command == "scaling":
        try:
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"bad --sizes {args.sizes!r}") from None
        seed = args.seed if args.seed is not None else (_seed_default() or 0)
        rows, slopes = cmd_scaling(sizes, args.d, args.alpha, args.trials, seed,
                                   [a.strip() for a in args.algos.split(",") if a.strip()],
                                   args.budget_const)
        fh, close = _open_out(args.out)
        try:
            write_rows(rows, "csv", fh)
        finally:
            if close:
                fh.close()
        if close:
            print(json.dumps({"slopes": slopes}, sort_keys=True))
        return EXIT_OK

    from .acceptance import CRITERIA, run_all
    selected = None
    if args.only:
        try:
            selected = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise UsageError(f"bad --only {args.only!r}") from None
        unknown = [k for k in selected if k not in CRITERIA]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}")
    results = run_all(selected)
    return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except (UsageError, InfeasibleParameters, GraphError, json.JSONDecodeError) as exc:
        print(f"prlocal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"prlocal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, (FileNotFoundError, ValueError)) else EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"prlocal: runtime failure: {exc!r}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
