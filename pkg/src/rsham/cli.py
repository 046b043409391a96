"""Command-line front door.

Subcommands: gen, verify, find, connect, experiment.  Exit codes are a
stable contract: 0 success/PASS, 1 FAIL or definite absence, 2 search budget
exhausted, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace

from .connecting import ConnectParams, connect_avoiding, connect
from .digraph import (Digraph, gen_extremal, gen_random_semidegree, load_graph,
                      min_semi_degree, save_graph)
from .errors import ConnectFailure, ConstructionFailure, InfeasibleDegreeError
from .experiments import ExperimentSpec, run_experiment
from .oracle import ABSENT, EXHAUSTED, FOUND, SearchBudget, bf_rs_hamiltonian_cycle
from .paths import (absorber_violation, rs_cycle_violation, rs_path_violation,
                    square_cycle_violation)
from .pipeline import PipelineConfig, find_rs_hamiltonian, validate_run

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    top = _Parser(prog="rsham",
                  description="reverse-square Hamiltonian cycles in dense digraphs")
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[], help="generate a digraph file")
    gsub = g.add_subparsers(dest="kind", required=True)
    ge = gsub.add_parser("extremal", help="tight construction with no k disjoint 3-cycles")
    ge.add_argument("--k", type=int, required=True)
    ge.add_argument("--out", required=True)
    gr = gsub.add_parser("random", help="seeded random digraph with a semi-degree floor")
    gr.add_argument("--n", type=int, required=True)
    gr.add_argument("--delta", type=float, required=True)
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("--margin", type=float, default=0.05)
    gr.add_argument("--out", required=True)
    gc = gsub.add_parser("complete", help="complete digraph")
    gc.add_argument("--n", type=int, required=True)
    gc.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="check a vertex sequence against a graph")
    v.add_argument("--graph", required=True)
    v.add_argument("--kind", choices=["path", "cycle", "square-cycle", "absorber"],
                   required=True)
    v.add_argument("--seq", required=True,
                   help="space-separated vertex ids; for absorber: a b c d v")

    f = sub.add_parser("find", help="search for a reverse-square Hamiltonian cycle")
    f.add_argument("--graph", required=True)
    f.add_argument("--method", choices=["oracle", "pipeline"], required=True)
    f.add_argument("--gamma", type=float, default=0.1)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--config", help="JSON file of pipeline settings")
    f.add_argument("--paper-scale", action="store_true")
    f.add_argument("--max-nodes", type=int, default=20_000_000)
    f.add_argument("--time-cap", type=float, default=120.0)
    f.add_argument("--out", help="write the run report (pipeline) as JSON")

    c = sub.add_parser("connect", help="connect two disjoint arcs by a short path")
    c.add_argument("--graph", required=True)
    c.add_argument("--ab", required=True, help="tail head of the first end-arc")
    c.add_argument("--cd", required=True, help="tail head of the last end-arc")
    c.add_argument("--gamma", type=float, default=0.1)
    c.add_argument("--avoid", default="", help="space-separated forbidden vertices")

    e = sub.add_parser("experiment", help="run a Monte Carlo audit and write a report")
    e.add_argument("--lemma", required=True,
                   choices=["connect", "absorber-count", "reservoir", "cover", "pipeline"])
    e.add_argument("--n", type=int, default=200)
    e.add_argument("--gamma", type=float, default=0.1)
    e.add_argument("--delta", type=float, default=0.77)
    e.add_argument("--trials", type=int, default=50)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--pairs", type=int, default=10)
    e.add_argument("--reservoir-frac", type=float, default=0.05)
    e.add_argument("--desk-certificate", action="store_true",
                   help="use the working-size reservoir certificate")
    e.add_argument("--extremal-k", type=int)
    e.add_argument("--paper-scale", action="store_true")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--config", help="JSON file of ExperimentSpec overrides")
    e.add_argument("--out", required=True)
    return top


def _parse_seq(text: str, parser: _Parser) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split())
    except ValueError:
        parser.error(f"sequence {text!r} is not whitespace-separated integers")


def _cmd_gen(args, parser) -> int:
    if args.kind == "extremal":
        if args.k < 1:
            parser.error("--k must be positive")
        d = gen_extremal(args.k)
        meta = {"generator": "extremal", "k": args.k}
    elif args.kind == "random":
        try:
            d = gen_random_semidegree(args.n, args.delta, args.seed, args.margin)
        except (InfeasibleDegreeError, ValueError) as e:
            parser.error(str(e))
        meta = {"generator": "random", "n": args.n, "delta": args.delta,
                "seed": args.seed, "margin": args.margin}
    else:
        if args.n < 1:
            parser.error("--n must be positive")
        d = Digraph.complete(args.n)
        meta = {"generator": "complete", "n": args.n}
    save_graph(d, args.out, meta)
    print(f"wrote {args.out}: n={d.n} m={d.arc_count()} semi-degree={min_semi_degree(d)}")
    return EXIT_PASS


def _cmd_verify(args, parser) -> int:
    d = load_graph(args.graph)
    seq = _parse_seq(args.seq, parser)
    try:
        if args.kind == "path":
            violation = rs_path_violation(d, seq)
        elif args.kind == "cycle":
            violation = rs_cycle_violation(d, seq)
        elif args.kind == "square-cycle":
            violation = square_cycle_violation(d, seq)
        else:
            if len(seq) != 5:
                parser.error("absorber check needs exactly 5 ids: a b c d v")
            violation = absorber_violation(d, seq[:4], seq[4])
    except ValueError as e:
        parser.error(str(e))
    if violation is None:
        print("PASS")
        return EXIT_PASS
    print(f"FAIL missing arc {violation[0]}->{violation[1]}")
    return EXIT_FAIL


def _load_pipeline_config(args) -> PipelineConfig:
    cfg = PipelineConfig(gamma=args.gamma, seed=args.seed,
                         paper_scale=args.paper_scale)
    if args.config:
        doc = json.loads(open(args.config).read())
        known = {f.name for f in fields(PipelineConfig)}
        bad = set(doc) - known
        if bad:
            raise ValueError(f"unknown pipeline settings: {sorted(bad)}")
        cfg = replace(cfg, **doc)
    return cfg


def _cmd_find(args, parser) -> int:
    d = load_graph(args.graph)
    if args.method == "oracle":
        budget = SearchBudget(args.max_nodes, args.time_cap)
        res = bf_rs_hamiltonian_cycle(d, budget)
        if res.status == FOUND:
            verdict = validate_run(d, res.witness)
            print("cycle " + " ".join(map(str, res.witness)))
            print("PASS" if verdict else "FAIL")
            return EXIT_PASS if verdict else EXIT_FAIL
        if res.status == ABSENT:
            print("ABSENT (search space exhausted)")
            return EXIT_FAIL
        print("BUDGET-EXHAUSTED")
        return EXIT_BUDGET
    try:
        cfg = _load_pipeline_config(args)
        rep = find_rs_hamiltonian(d, cfg)
    except ValueError as e:
        print(f"FAIL {e}")
        return EXIT_FAIL
    if args.out:
        open(args.out, "w").write(rep.to_json() + "\n")
    if rep.success:
        print("cycle " + " ".join(map(str, rep.cycle)))
        print("PASS" if validate_run(d, rep.cycle) else "FAIL")
        return EXIT_PASS
    print(f"FAIL stage={rep.failure_stage} attempts={len(rep.attempts)}")
    return EXIT_FAIL


def _cmd_connect(args, parser) -> int:
    d = load_graph(args.graph)
    ab = _parse_seq(args.ab, parser)
    cd = _parse_seq(args.cd, parser)
    if len(ab) != 2 or len(cd) != 2:
        parser.error("--ab and --cd each need exactly two vertex ids")
    avoid = _parse_seq(args.avoid, parser) if args.avoid.strip() else ()
    try:
        path = connect_avoiding(d, ab, cd, avoid, ConnectParams(gamma=args.gamma)) \
            if avoid else connect(d, ab, cd, ConnectParams(gamma=args.gamma))
    except ValueError as e:
        parser.error(str(e))
    except ConnectFailure as e:
        print(f"FAIL {e}")
        return EXIT_FAIL
    print("path " + " ".join(map(str, path)))
    print("PASS")
    return EXIT_PASS


def _cmd_experiment(args, parser) -> int:
    overrides = {}
    if args.config:
        overrides = json.loads(open(args.config).read())
    spec = ExperimentSpec(
        lemma=args.lemma, n=args.n, gamma=args.gamma, delta=args.delta,
        trials=args.trials, seed=args.seed, pairs=args.pairs,
        reservoir_frac=args.reservoir_frac,
        paper_certificate=not args.desk_certificate,
        extremal_k=args.extremal_k, paper_scale=args.paper_scale,
        jobs=args.jobs, out=args.out, **overrides)
    agg = run_experiment(spec)
    for k, v in agg.items():
        print(f"{k}={v}")
    print(f"wrote {args.out}")
    return EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args, parser)
        if args.command == "verify":
            return _cmd_verify(args, parser)
        if args.command == "find":
            return _cmd_find(args, parser)
        if args.command == "connect":
            return _cmd_connect(args, parser)
        return _cmd_experiment(args, parser)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionFailure as e:
        print(f"FAIL {e}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
