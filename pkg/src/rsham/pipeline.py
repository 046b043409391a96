"""End-to-end assembly of a certified reverse-square Hamiltonian cycle.

Stage order: absorber family -> absorbing path P_A -> reservoir (protected
set = V(P_A)) -> greedy path cover of the rest -> stitch all cover paths and
P_A (last) into one long path with reservoir-routed connectors -> close the
cycle with one more reservoir connection -> absorb every vertex still
outside (cover leftover plus unused reservoir) into P_A.

The asymptotic constants behind each stage are computed and logged next to
the working-size overrides actually used, and the final cycle is returned
only after full verification; any stage failure produces a structured
report and a retry with a derived seed.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, asdict

from .absorbing import absorb, build_absorbing_path, sample_family
from .connecting import ConnectParams
from .digraph import Digraph, derive_seed, iter_bits, mask_of
from .errors import ConstructionFailure
from .pathcover import greedy_path_cover
from .paths import (concat, first_end_arc, is_rs_path, last_end_arc,
                    rs_cycle_violation, rs_path_violation)
from .reservoir import (Reservoir, desk_certificate_threshold,
                        paper_certificate_threshold, reservoir_connect,
                        sample_reservoir)

REPORT_SCHEMA = "run-report/v1"


@dataclass(frozen=True)
class PipelineConfig:
    """All tunables of an assembly run.

    ``paper_scale`` switches every constant to its asymptotic formula; the
    remaining fields are the working-size overrides used otherwise.
    """

    gamma: float = 0.1
    seed: int = 0
    paper_scale: bool = False
    family_frac: float = 0.12          # expected family size / n
    family_retries: int = 12
    coverage_floor: int = 1
    reservoir_frac: float = 0.05
    reservoir_retries: int = 25
    cover_path_frac: float = 0.06      # budget / cover-set size
    cover_leftover_frac: float = 0.03  # budget / n
    global_retries: int = 4
    min_n: int = 30

    def __post_init__(self):
        if not 0 < self.gamma <= 1 / 6:
            raise ValueError("gamma must lie in (0, 1/6]")
        for name in ("family_retries", "reservoir_retries", "global_retries", "min_n"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("family_frac", "reservoir_frac", "cover_path_frac",
                     "cover_leftover_frac"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def paper_values(self, n: int) -> dict[str, float]:
        g = self.gamma
        return {
            "reservoir_size": math.ceil(g ** 7 * n / 2),
            "absorbing_path_order_cap": 20 * g ** 3 * n,
            "tuple_inclusion_probability": g ** 4 / n ** 3,
            "chain_connector_order_cap": 8 / g,
            "reservoir_connector_order_cap": 16 / g,
            "reservoir_forbidden_budget": g ** 8 * n,
            "coverage_floor": g ** 7 * n,
            "cover_paths_cap": g ** 10 * n,
            "cover_leftover_cap": g ** 7 * n / 2,
        }

    def desk_values(self, n: int) -> dict[str, float]:
        r = max(1, round(self.reservoir_frac * n))
        return {
            "reservoir_size": r,
            "reservoir_certificate_floor": desk_certificate_threshold(r),
            "family_target": max(4, round(self.family_frac * n)),
            "coverage_floor": self.coverage_floor,
            "chain_connector_order_cap": min(math.ceil(8 / self.gamma), n),
            "reservoir_connector_order_cap": min(math.ceil(16 / self.gamma), r + 4),
            "reservoir_forbidden_budget": r,
            "cover_leftover_budget": max(3, round(self.cover_leftover_frac * n)),
        }


@dataclass
class RunReport:
    """Append-only record of one ``find_rs_hamiltonian`` invocation."""

    schema: str = REPORT_SCHEMA
    n: int = 0
    gamma: float = 0.0
    seed: int = 0
    paper_scale: bool = False
    paper_values: dict = field(default_factory=dict)
    desk_values: dict = field(default_factory=dict)
    attempts: list = field(default_factory=list)
    outcome: str = "failed"
    failure_stage: str | None = None
    cycle: tuple[int, ...] | None = None

    @property
    def success(self) -> bool:
        return self.outcome == "cycle"

    def to_json(self) -> str:
        doc = asdict(self)
        doc["cycle"] = list(self.cycle) if self.cycle is not None else None
        return json.dumps(doc, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        doc = json.loads(text)
        if doc.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"unknown report schema {doc.get('schema')!r}")
        cyc = doc.get("cycle")
        doc["cycle"] = tuple(cyc) if cyc is not None else None
        return cls(**doc)


def validate_run(d: Digraph, cycle) -> bool:
    """True iff ``cycle`` is a reverse-square Hamiltonian cycle of ``d``."""
    if cycle is None:
        return False
    seq = tuple(cycle)
    if len(seq) != d.n or set(seq) != set(range(d.n)):
        return False
    try:
        return rs_cycle_violation(d, seq) is None
    except ValueError:
        return False


class _StageClock:
    def __init__(self, record: list):
        self.record = record

    def stage(self, name: str, **stats):
        self.record.append({"stage": name, "ok": True, **stats})

    def fail(self, name: str, reason: str):
        self.record.append({"stage": name, "ok": False, "reason": reason})


def _attempt(d: Digraph, cfg: PipelineConfig, aseed: int, stages: list) -> tuple[int, ...]:
    n = d.n
    g = cfg.gamma
    clock = _StageClock(stages)
    connect_params = ConnectParams(gamma=g)

    t0 = time.monotonic()
    if cfg.paper_scale:
        fam = sample_family(d, g, derive_seed(aseed, 1), cfg.family_retries,
                            paper_scale=True)
    else:
        fam = sample_family(d, g, derive_seed(aseed, 1), cfg.family_retries,
                            target_size=max(4, round(cfg.family_frac * n)),
                            coverage_floor=cfg.coverage_floor)
    clock.stage("family", size=fam.size, coverage_min=min(fam.coverage),
                elapsed=round(time.monotonic() - t0, 4))

    t0 = time.monotonic()
    apath = build_absorbing_path(d, fam, connect_params)
    if cfg.paper_scale and apath.order >= 20 * g ** 3 * n:
        raise ConstructionFailure(
            f"absorbing path order {apath.order} >= {20 * g ** 3 * n:.1f}")
    clock.stage("absorbing-path", order=apath.order,
                elapsed=round(time.monotonic() - t0, 4))

    t0 = time.monotonic()
    pa_mask = apath.vertex_mask()
    if cfg.paper_scale:
        size = max(1, math.ceil(g ** 7 * n / 2))
        thr = paper_certificate_threshold(size, g)
    else:
        size = max(1, round(cfg.reservoir_frac * n))
        size = min(size, n - apath.order)
        thr = desk_certificate_threshold(size)
    if size < 1:
        raise ConstructionFailure("no vertices left for the reservoir")
    res = sample_reservoir(d, pa_mask, size, g, derive_seed(aseed, 2),
                           cfg.reservoir_retries, threshold=thr)
    clock.stage("reservoir", size=res.size, threshold=res.threshold,
                retries=res.retries_used, elapsed=round(time.monotonic() - t0, 4))

    t0 = time.monotonic()
    cover_scope = d.full_mask & ~pa_mask & ~res.verts
    scope_size = cover_scope.bit_count()
    if cfg.paper_scale:
        path_budget = max(1, math.floor(g ** 10 * n))
        leftover_budget = max(0, math.floor(g ** 7 * n / 2))
    else:
        path_budget = max(2, round(cfg.cover_path_frac * scope_size))
        leftover_budget = max(3, round(cfg.cover_leftover_frac * n))
    if scope_size == 0:
        cover_paths: tuple = ()
        leftover: frozenset[int] = frozenset()
    else:
        cov = greedy_path_cover(d, path_budget, leftover_budget,
                                derive_seed(aseed, 3), vertices=cover_scope,
                                connect_params=connect_params)
        cover_paths, leftover = cov.paths, cov.leftover
    clock.stage("cover", paths=len(cover_paths), leftover=len(leftover),
                elapsed=round(time.monotonic() - t0, 4))

    t0 = time.monotonic()
    order_paths = list(cover_paths) + [apath.path]
    running = order_paths[0]
    connector_orders = []
    for nxt in order_paths[1:]:
        q = reservoir_connect(d, res, last_end_arc(running), first_end_arc(nxt),
                              connect_params)
        connector_orders.append(len(q))
        running = concat(concat(running, q), nxt)
        violation = rs_path_violation(d, running)
        if violation is not None:
            raise RuntimeError(f"stitched path missing arc {violation}")
    closing = reservoir_connect(d, res, last_end_arc(running),
                                first_end_arc(running), connect_params)
    connector_orders.append(len(closing))
    cycle = running + closing[2:-2]
    violation = rs_cycle_violation(d, cycle)
    if violation is not None:
        raise RuntimeError(f"closed cycle missing arc {violation}")
    clock.stage("stitch", connectors=len(connector_orders),
                connector_order_max=max(connector_orders),
                reservoir_used=res.used_count,
                elapsed=round(time.monotonic() - t0, 4))

    t0 = time.monotonic()
    cyc_mask = mask_of(cycle)
    targets = sorted(set(leftover) | set(iter_bits(res.verts & ~cyc_mask)))
    free = len(apath.free_members())
    if len(targets) > free:
        raise ConstructionFailure(
            f"{len(targets)} vertices to absorb but only {free} free members")
    absorbed = absorb(d, apath, targets)
    pa_start = len(running) - apath.order
    assert running[pa_start:] == apath.path
    final = running[:pa_start] + absorbed.path + closing[2:-2]
    violation = rs_cycle_violation(d, final)
    if violation is not None:
        raise RuntimeError(f"final cycle missing arc {violation}")
    if not validate_run(d, final):
        raise ConstructionFailure("final cycle is not Hamiltonian")
    if res.used_count > res.size:
        raise RuntimeError("reservoir usage exceeded its budget")
    clock.stage("absorb", targets=len(targets),
                elapsed=round(time.monotonic() - t0, 4))
    return final


def find_rs_hamiltonian(d: Digraph, cfg: PipelineConfig | None = None) -> RunReport:
    """Run the assembly; the report carries the cycle on success.

    Retries the whole construction with a derived seed up to
    ``cfg.global_retries`` times before reporting failure; never returns a
    partial result.
    """
    cfg = cfg or PipelineConfig()
    if d.n < cfg.min_n:
        raise ValueError(f"pipeline needs n >= {cfg.min_n}, got {d.n}")
    report = RunReport(n=d.n, gamma=cfg.gamma, seed=cfg.seed,
                       paper_scale=cfg.paper_scale,
                       paper_values=cfg.paper_values(d.n),
                       desk_values=cfg.desk_values(d.n))
    for attempt in range(cfg.global_retries):
        aseed = derive_seed(cfg.seed, 100 + attempt)
        stages: list = []
        record = {"attempt": attempt, "seed": aseed, "stages": stages}
        report.attempts.append(record)
        try:
            cycle = _attempt(d, cfg, aseed, stages)
        except (ConstructionFailure, ValueError) as e:
            failed_stage = _infer_stage(stages)
            stages.append({"stage": failed_stage, "ok": False, "reason": str(e)})
            record["outcome"] = "failed"
            report.failure_stage = failed_stage
            continue
        record["outcome"] = "cycle"
        report.outcome = "cycle"
        report.cycle = cycle
        report.failure_stage = None
        return report
    return report


_STAGE_ORDER = ("family", "absorbing-path", "reservoir", "cover", "stitch", "absorb")


def _infer_stage(stages: list) -> str:
    done = {s["stage"] for s in stages if s.get("ok")}
    for name in _STAGE_ORDER:
        if name not in done:
            return name
    return "verify"
