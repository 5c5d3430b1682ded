"""``heatlab <task> --config path [--out path] [--threads k]`` and ``heatlab validate``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from itertools import product
from fractions import Fraction
from typing import Any, Callable

from . import rational
from .config import TASKS, ExperimentConfig, horosphere_cut, load
from .constructions import (
    HorosphereWitnessSearch,
    level_density,
    level_gaps,
    tower_cut_ratio,
    tower_level_mass,
    tower_level_mass_lumped,
)
from .errors import (
    BudgetExceeded,
    ConfigError,
    HeatlabError,
    NumericalError,
    SearchCapExceeded,
    SpecError,
)
from .expansion import (
    DEFAULT_SEARCH_CAP,
    claim_bound,
    exact_profile,
    folner_translate_search,
    sweep_profile,
    witness_from_partition,
)
from .graphs import Graph, Lattice
from .heat import flattening_curve, heat_kernel, monte_carlo_kernel
from .report import Report, write_csv
from .stationarity import ALGORITHM_TAG, cesaro_distribution, stationarity_deficit

EXIT_OK, EXIT_OTHER, EXIT_CONFIG, EXIT_BUDGET, EXIT_NUMERICAL = 0, 1, 2, 3, 4

Csv = tuple[list[str], list[list[Any]]] | None
Runner = Callable[[ExperimentConfig, Graph, str, int], tuple[dict[str, Any], Csv]]


def _num(x) -> str | float:
    return rational.fmt(x) if isinstance(x, (Fraction, int)) else float(x)


def _task_heat(cfg, g, root, threads):
    n = cfg.get("n")
    if cfg.get("method", "exact") == "monte-carlo":
        mu = monte_carlo_kernel(g, root, n, cfg.get("trials"), cfg.seed, threads)
        extra = {"trials": cfg.get("trials"), "seed": cfg.seed}
    else:
        mu = heat_kernel(g, root, n, lazy=cfg.get("lazy", False), mode=cfg.get("mode", "exact"), budget=cfg.get("budget"))
        extra = {}
    records = [json.loads(line) for line in mu.to_jsonl().splitlines()]
    rows = [[r["v"], _num(mu[r["v"]])] for r in records]
    return {"n": n, "support_size": len(mu), "total": _num(mu.total()), "measure": records, **extra}, (["v", "mass"], rows)


def _task_flatten(cfg, g, root, threads):
    curve = flattening_curve(g, root, cfg.get("N"), lazy=cfg.get("lazy", False), mode=cfg.get("mode", "exact"), budget=cfg.get("budget"))
    c = [_num(x) for x in curve.values]
    rows = [[n, x] for n, x in enumerate(c)]
    return {
        "N": cfg.get("N"),
        "c": c,
        "non_increasing": curve.is_non_increasing(),
        "violations": curve.violations(),
    }, (["n", "c_n"], rows)


def _task_expansion(cfg, g, root, threads):
    ns = cfg.get("ns") or [cfg.get("n")]
    policy = cfg.get("policy", "support-only")
    boundary = cfg.get("boundary", "inner")
    cap = cfg.get("cap", DEFAULT_SEARCH_CAP)
    profile = []
    rows = []
    for n in ns:
        mu = heat_kernel(g, root, n, lazy=cfg.get("lazy", False), budget=cfg.get("budget"))
        entry: dict[str, Any] = {"n": n, "support_size": len(mu)}
        if cfg.get("sweep", False) or len(mu) > cap:
            w = sweep_profile(g, mu, n=n, mode=boundary)
            entry.update(method="sweep", h_star=None, sweep_ratio=_num(w.ratio), witness=w.to_json())
        else:
            h, w = exact_profile(g, mu, policy, cap, boundary, n=n, threads=threads)
            entry.update(method="exhaustive", h_star=_num(h), witness=w.to_json())
        profile.append(entry)
        rows.append([n, entry["h_star"] if entry["h_star"] is not None else entry["sweep_ratio"], entry["method"]])
    first = profile[0]
    out = {"policy": policy, "boundary": boundary, "profile": profile}
    if len(profile) == 1 and first["h_star"] is not None:
        out["h_star"] = first["h_star"]
    return out, (["n", "h_star", "method"], rows)


def _task_witness(cfg, g, root, threads):
    cut = horosphere_cut(g, cfg.get("cut"), "cut")
    w = witness_from_partition(
        g, root, cfg.get("n"), cut.selects(g), cfg.get("guard"),
        epsilon=cut.epsilon, lazy=cfg.get("lazy", False), budget=cfg.get("budget"),
    )
    return {"cut": cut.to_json(), "witness": w.to_json(), "ratio": _num(w.ratio)}, None


def _task_folner(cfg, g, root, threads):
    if cfg.get("F") is not None:
        F = cfg.get("F")
    else:
        if not isinstance(g, Lattice):
            raise ConfigError("box", "box shorthand needs a lattice graph")
        side = cfg.get("box")
        F = [",".join(map(str, p)) for p in product(range(side), repeat=g.dim)]
    w = folner_translate_search(g, F, cfg.get("n"), lazy=cfg.get("lazy", False), budget=cfg.get("budget"))
    return {"witness": w.to_json(), "ratio": _num(w.ratio)}, None


def _task_horosphere(cfg, g, root, threads):
    cut = horosphere_cut(g, cfg.get("cut"), "cut")
    search = HorosphereWitnessSearch(g, cut, cfg.get("n_max"))
    found, log = search.run(odd_only=cfg.get("odd_only", False))
    L = cfg.get("levels", 10_000)
    gaps = level_gaps(cut, -(L // 2), L - L // 2 - 1)
    bound = claim_bound(g.max_degree, cut.epsilon)
    out: dict[str, Any] = {
        "cut": cut.to_json(),
        "bound": bound,
        "density": float(level_density(cut, L)),
        "density_levels": L,
        "max_gap": max(gaps) if gaps else None,
        "distinct_gaps": sorted(set(gaps)),
        "ambiguous_levels": search.ambiguous,
        "witness": found.to_json() if found else None,
        "ratio": _num(found.ratio) if found else None,
        "ratio_float": float(found.ratio) if found else None,
        "log": log,
    }
    rows = [[r["n"], r["status"], r.get("ratio", ""), r.get("mass_S", "")] for r in log]
    return out, (["n", "status", "ratio", "mass_S"], rows)


def _task_tower(cfg, g, root, threads):
    k = cfg.get("k")
    lazy = cfg.get("lazy", False)
    if cfg.get("method", "exact") == "monte-carlo":
        raise ConfigError("method", "tower task is exact only")
    levels = tower_level_mass(g, root, k, lazy=lazy)
    lumped = tower_level_mass_lumped(g, root, k, lazy=lazy)
    out: dict[str, Any] = {
        "k": k,
        "level_mass": {str(m): _num(x) for m, x in levels.items()},
        "lumped_agrees": levels == lumped,
        "max_level_mass": float(max(levels.values())),
    }
    if cfg.get("j") is not None:
        mass, mass_b, ratio = tower_cut_ratio(g, root, k, cfg.get("j"), lazy=lazy)
        out["cut"] = {"j": cfg.get("j"), "mass_S": _num(mass), "mass_boundary": _num(mass_b), "ratio": _num(ratio)}
    rows = [[m, _num(x), float(x)] for m, x in levels.items()]
    return out, (["level", "mass", "mass_float"], rows)


def _task_stationarity(cfg, g, root, threads):
    deco = None
    if cfg.get("decoration") is not None:
        deco = horosphere_cut(g, cfg.get("decoration"), "decoration").selects(g)
    args = (g, root, cfg.get("N"), cfg.get("r"), cfg.get("trials"), cfg.seed)
    dist = cesaro_distribution(*args, decoration=deco, threads=threads, budget=cfg.get("budget"))
    tv, bound = stationarity_deficit(*args, decoration=deco, threads=threads, budget=cfg.get("budget"))
    types = [{"code": k, "p": dist.probs[k], "count": dist.counts[k]} for k in sorted(dist.probs)]
    out = {
        "N": cfg.get("N"),
        "r": cfg.get("r"),
        "trials": cfg.get("trials"),
        "seed": cfg.seed,
        "algorithm": ALGORITHM_TAG,
        "types": types,
        "tv": tv,
        "bound": bound,
    }
    return out, (["code", "p", "count"], [[t["code"], t["p"], t["count"]] for t in types])


RUNNERS: dict[str, Runner] = {
    "heat": _task_heat,
    "flatten": _task_flatten,
    "expansion": _task_expansion,
    "witness": _task_witness,
    "folner": _task_folner,
    "horosphere": _task_horosphere,
    "tower": _task_tower,
    "stationarity": _task_stationarity,
}
assert set(RUNNERS) == set(TASKS)


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> tuple[Report, Csv]:
    g = cfg.build_graph()
    root = cfg.root(g)
    start = time.perf_counter()
    try:
        payload, table = RUNNERS[cfg.task](cfg, g, root, threads)
    except HeatlabError as exc:
        exc.args = (f"{cfg.task}: {exc}",) if exc.args else exc.args
        raise
    results = {"task": cfg.task, "graph": cfg.graph.to_dict(), "root": root, **payload}
    mode = "float" if cfg.get("mode") == "float" or cfg.get("method") == "monte-carlo" or cfg.task == "stationarity" else "exact"
    report = Report(cfg.raw, results, mode, time.perf_counter() - start, threads)
    report.validate()
    return report, table


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ConfigError, SpecError)):
        return EXIT_CONFIG
    if isinstance(exc, (BudgetExceeded, SearchCapExceeded)):
        return EXIT_BUDGET
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_OTHER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for task in TASKS:
        p = sub.add_parser(task, help=f"run a {task} experiment")
        p.add_argument("--config", required=True)
        p.add_argument("--out", help="report path (default: config 'out' or stdout)")
        p.add_argument("--threads", type=int, default=1)
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("--config", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config)
        if args.command == "validate":
            print(f"ok: {cfg.task} on {cfg.graph.family}")
            return EXIT_OK
        if cfg.task != args.command:
            raise ConfigError("task", f"config task is {cfg.task!r} but command is {args.command!r}")
        if args.threads < 1:
            raise ConfigError("--threads", "must be at least 1")
        report, table = run_experiment(cfg, args.threads)
    except HeatlabError as exc:
        print(f"heatlab: error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except Exception as exc:  # surfaced with context, never swallowed silently
        print(f"heatlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OTHER
    out = args.out or cfg.get("out")
    if out:
        report.write(out)
    else:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    if table is not None and cfg.get("csv"):
        write_csv(cfg.get("csv"), *table)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
