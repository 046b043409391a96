"""Monte Carlo audits of the quantitative guarantees behind each stage.

Each experiment runs seeded independent trials (optionally across a worker
pool) and writes a line-oriented v1 report: per-trial rows plus aggregates.
Rows are ordered by trial index regardless of completion order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from random import Random

from .connecting import (ConnectParams, build_in_cascade, build_out_cascade,
                         connect, find_heavy)
from .digraph import Digraph, derive_seed, gen_extremal, gen_random_semidegree, iter_bits
from .errors import ConnectFailure, ConstructionFailure
from .oracle import bf_count_absorbers
from .paths import is_rs_path
from .pathcover import greedy_path_cover
from .pipeline import PipelineConfig, find_rs_hamiltonian
from .report import write_report
from .reservoir import desk_certificate_threshold, sample_reservoir
from .errors import ReservoirFailure, CoverFailure

LEMMAS = ("connect", "absorber-count", "reservoir", "cover", "pipeline")


@dataclass(frozen=True)
class ExperimentSpec:
    lemma: str
    n: int = 200
    gamma: float = 0.1
    delta: float = 0.77
    trials: int = 50
    seed: int = 0
    pairs: int = 10            # arc pairs per trial (connect)
    reservoir_frac: float = 0.05
    reservoir_retries: int = 3
    paper_certificate: bool = True
    extremal_k: int | None = None
    paper_scale: bool = False
    jobs: int = 1
    out: str = "report.txt"

    def __post_init__(self):
        if self.lemma not in LEMMAS:
            raise ValueError(f"unknown lemma target {self.lemma!r}; pick from {LEMMAS}")
        if self.trials < 1:
            raise ValueError("trial count must be >= 1")


def _instance(spec: ExperimentSpec, trial: int) -> Digraph:
    if spec.extremal_k is not None:
        return gen_extremal(spec.extremal_k)
    return gen_random_semidegree(spec.n, spec.delta, derive_seed(spec.seed, 7000 + trial))


def _random_disjoint_arcs(d: Digraph, rng: Random):
    for _ in range(10_000):
        a = rng.randrange(d.n)
        outs = d.out_masks[a]
        if not outs:
            continue
        b = rng.choice([v for v in iter_bits(outs)])
        c = rng.randrange(d.n)
        if c in (a, b):
            continue
        cand = d.out_masks[c] & ~((1 << a) | (1 << b) | (1 << c))
        if not cand:
            continue
        dd = rng.choice([v for v in iter_bits(cand)])
        return (a, b), (c, dd)
    raise ValueError("could not sample disjoint arcs")


def _trial_connect(spec: ExperimentSpec, trial: int) -> tuple:
    d = _instance(spec, trial)
    rng = Random(derive_seed(spec.seed, 9000 + trial))
    params = ConnectParams(gamma=spec.gamma)
    ok = 0
    verified = 0
    orders = []
    heavy_levels = []
    for _ in range(spec.pairs):
        ab, cd = _random_disjoint_arcs(d, rng)
        co = build_out_cascade(d, ab, params)
        ci = build_in_cascade(d, cd, params)
        for casc in (co, ci):
            h = find_heavy(casc, d.n, spec.gamma)
            heavy_levels.append(h[0] if h else -1)
        try:
            path = connect(d, ab, cd, params)
        except ConnectFailure:
            continue
        ok += 1
        orders.append(len(path))
        if is_rs_path(d, path):
            verified += 1
    level_cap = math.ceil(1 / spec.gamma) + 1
    shallow = sum(1 for h in heavy_levels if 0 < h <= level_cap)
    return (trial, derive_seed(spec.seed, 7000 + trial), spec.pairs, ok, verified,
            max(orders) if orders else 0, shallow, len(heavy_levels))


def _trial_absorbers(spec: ExperimentSpec, trial: int) -> tuple:
    d = _instance(spec, trial)
    counts = [bf_count_absorbers(d, v) for v in range(d.n)]
    bound = math.ceil(6 * spec.gamma ** 3 * d.n ** 4)
    return (trial, derive_seed(spec.seed, 7000 + trial), min(counts), bound,
            1 if min(counts) >= bound else 0)


def _trial_reservoir(spec: ExperimentSpec, trial: int) -> tuple:
    d = _instance(spec, trial)
    size = max(1, round(spec.reservoir_frac * d.n))
    thr = None if spec.paper_certificate else desk_certificate_threshold(size)
    try:
        res = sample_reservoir(d, 0, size, spec.gamma,
                               derive_seed(spec.seed, 8000 + trial),
                               spec.reservoir_retries, threshold=thr)
        return (trial, size, res.threshold, 1, res.retries_used, res.size)
    except ReservoirFailure as e:
        return (trial, size, e.threshold, 0, spec.reservoir_retries, e.worst_degree)


def _trial_cover(spec: ExperimentSpec, trial: int) -> tuple:
    d = _instance(spec, trial)
    path_budget = max(2, round(0.04 * d.n))
    leftover_budget = max(3, round(0.02 * d.n))
    try:
        cov = greedy_path_cover(d, path_budget, leftover_budget,
                                derive_seed(spec.seed, 8500 + trial))
        return (trial, 1, len(cov.paths), len(cov.leftover), path_budget, leftover_budget)
    except CoverFailure as e:
        return (trial, 0, e.paths, e.leftover, path_budget, leftover_budget)


def _trial_pipeline(spec: ExperimentSpec, trial: int) -> tuple:
    d = _instance(spec, trial)
    cfg = PipelineConfig(gamma=spec.gamma, seed=derive_seed(spec.seed, 100 + trial),
                         paper_scale=spec.paper_scale)
    try:
        rep = find_rs_hamiltonian(d, cfg)
    except ValueError as e:
        return (trial, 0, "precondition", 0)
    stage = rep.failure_stage or "-"
    return (trial, 1 if rep.success else 0, stage, len(rep.attempts))


_TRIALS = {
    "connect": (_trial_connect,
                ["trial", "seed", "pairs", "ok", "verified", "order_max",
                 "heavy_shallow", "cascades"]),
    "absorber-count": (_trial_absorbers,
                       ["trial", "seed", "min_count", "bound", "meets_bound"]),
    "reservoir": (_trial_reservoir,
                  ["trial", "size", "threshold", "certified", "retries", "worst"]),
    "cover": (_trial_cover,
              ["trial", "ok", "paths", "leftover", "path_budget", "leftover_budget"]),
    "pipeline": (_trial_pipeline, ["trial", "ok", "failure_stage", "attempts"]),
}


def _aggregate(lemma: str, rows: list[tuple]) -> dict[str, str]:
    agg = {"trials": str(len(rows))}
    if lemma == "connect":
        pairs = sum(r[2] for r in rows)
        ok = sum(r[3] for r in rows)
        verified = sum(r[4] for r in rows)
        orders = [r[5] for r in rows if r[5]]
        shallow = sum(r[6] for r in rows)
        cascades = sum(r[7] for r in rows)
        agg["success_rate"] = f"{ok / max(1, pairs):.6f}"
        agg["verified_rate"] = f"{verified / max(1, ok):.6f}" if ok else "0.000000"
        agg["order_max"] = str(max(orders) if orders else 0)
        agg["order_p50"] = str(sorted(orders)[len(orders) // 2] if orders else 0)
        agg["heavy_shallow_rate"] = f"{shallow / max(1, cascades):.6f}"
    elif lemma == "absorber-count":
        agg["all_meet_bound"] = str(int(all(r[4] for r in rows)))
        agg["min_count"] = str(min(r[2] for r in rows))
        agg["bound"] = str(rows[0][3]) if rows else "0"
    elif lemma == "reservoir":
        certified = [r for r in rows if r[3]]
        agg["certified_rate"] = f"{len(certified) / len(rows):.6f}"
        agg["retries_max"] = str(max((r[4] for r in certified), default=0))
    elif lemma == "cover":
        agg["ok_rate"] = f"{sum(r[1] for r in rows) / len(rows):.6f}"
        agg["paths_max"] = str(max(r[2] for r in rows))
        agg["leftover_max"] = str(max(r[3] for r in rows))
    elif lemma == "pipeline":
        agg["success_rate"] = f"{sum(r[1] for r in rows) / len(rows):.6f}"
        fails: dict[str, int] = {}
        for r in rows:
            if not r[1]:
                fails[r[2]] = fails.get(r[2], 0) + 1
        for stage, k in sorted(fails.items()):
            agg[f"failures_{stage}"] = str(k)
    return agg


def run_experiment(spec: ExperimentSpec) -> dict:
    """Run all trials, write the report, and return the parsed aggregates."""
    fn, columns = _TRIALS[spec.lemma]
    indices = list(range(spec.trials))
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_pool_entry, [(spec, i) for i in indices]))
    else:
        rows = [fn(spec, i) for i in indices]
    rows.sort(key=lambda r: r[0])
    agg = _aggregate(spec.lemma, rows)
    params = {
        "n": str(spec.n), "gamma": str(spec.gamma), "delta": str(spec.delta),
        "trials": str(spec.trials), "seed": str(spec.seed),
    }
    if spec.lemma == "connect":
        params["pairs"] = str(spec.pairs)
    if spec.lemma == "reservoir":
        params["reservoir_frac"] = str(spec.reservoir_frac)
        params["certificate"] = "paper" if spec.paper_certificate else "desk"
    if spec.extremal_k is not None:
        params["extremal_k"] = str(spec.extremal_k)
    write_report(spec.out, spec.lemma, params, columns, rows, agg)
    return agg


def _pool_entry(args):
    spec, trial = args
    fn, _ = _TRIALS[spec.lemma]
    return fn(spec, trial)
