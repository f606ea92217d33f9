"""Command-line front end.

Exit codes: 0 claim holds, 1 counterexample found, 2 usage or input error,
3 a cycle-detection or game budget ran out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import sweep
from .analysis import activity
from .assignment import AssignmentFalsified, NotCompliant, build_assignment, check_assignment_lemmas
from .bipartite import NotBalancedBipartite, verify_bipartite_lemmas, verify_theorem2
from .engine import DEFAULT_MAX_ROUNDS, BudgetExceeded, ConfigError, check_config, find_cycle, format_config, parse_config, simulate
from .graph import FAMILIES, GraphError, bipartite_sides, enumerate_connected, generate, parse_graph

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
CLAIM_CHOICES = ("theorem1", "conjecture1", "theorem2", "stabilization", "lemmas")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def load_graph(spec: str):
    """A graph file path, or ``family:p1,p2`` such as ``cycle:4``."""
    if ":" in spec and not Path(spec).exists():
        kind, _, params = spec.partition(":")
        try:
            values = [int(x) for x in params.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad family parameters in {spec!r}") from None
        return generate(kind, values)
    try:
        text = Path(spec).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read graph file {spec!r}: {exc.strerror}") from None
    return parse_graph(text, name=Path(spec).stem)


def load_config(g, text: str):
    try:
        return check_config(g, parse_config(text))
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None


def _report_exit(report) -> int:
    if report.failures:
        return EXIT_FAIL
    if report.incomplete:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_simulate(args) -> int:
    g = load_graph(args.graph)
    sigma = load_config(g, args.config)
    for t, cfg in enumerate(simulate(g, sigma, args.rounds)):
        print(f"{t}: {format_config(cfg)}")
    return EXIT_OK


def cmd_period(args) -> int:
    g = load_graph(args.graph)
    sigma = load_config(g, args.config)
    s = find_cycle(g, sigma, max_rounds=args.max_rounds, low_memory=args.low_memory)
    print(f"t0={s.t0} T={s.period} activity={activity(s)}")
    return EXIT_OK


def cmd_assign(args) -> int:
    g = load_graph(args.graph)
    sigma = load_config(g, args.config)
    s = find_cycle(g, sigma, max_rounds=args.max_rounds)
    try:
        a = build_assignment(g, s)
    except NotCompliant as exc:
        print(f"error: not compliant: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssignmentFalsified as exc:
        print(f"error: assignment construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = a.to_dict()
    lemmas = check_assignment_lemmas(g, s)
    out["lemmas"] = lemmas.to_dict(timing=False)
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK if lemmas.passed else EXIT_FAIL


def cmd_staircase(args) -> int:
    g = load_graph(args.graph)
    res = sweep.staircase(g, args.samples, seed=args.seed, max_rounds=args.max_rounds,
                          battery=not args.no_battery, workers=args.threads)
    text = res.to_csv()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(res.report.to_json(timing=not args.no_timing))
    return _report_exit(res.report)


def _graphs_for(args):
    if args.graph:
        return [load_graph(g) for g in args.graph]
    return sweep.default_graphs(args.n_max)


def cmd_verify(args) -> int:
    claim = args.claim
    battery = not args.no_battery
    if claim == "theorem2":
        a = args.a
        if a is None:
            if not args.graph:
                raise UsageError("theorem2 needs --a or a K_{a,a} --graph")
            sides = bipartite_sides(load_graph(args.graph[0]))
            if sides is None or sides[0] != sides[1]:
                raise UsageError("theorem2 needs a balanced complete bipartite graph")
            a = sides[0]
        report = verify_theorem2(a, mode=args.mode, samples=args.samples, seed=args.seed, battery=battery,
                                 max_rounds=args.max_rounds, workers=args.threads)
    elif claim == "lemmas" and args.a is not None:
        report = verify_bipartite_lemmas(args.a, battery=battery, workers=args.threads)
    elif claim == "lemmas":
        report = sweep.verify_assignment_sweep(_graphs_for(args), battery=battery,
                                               max_rounds=args.max_rounds, workers=args.threads)
    else:
        report = sweep.verify_range(claim, _graphs_for(args), mode=args.mode, samples=args.samples,
                                    seed=args.seed, battery=battery, max_rounds=args.max_rounds,
                                    workers=args.threads, max_games=args.max_games)
    print(report.to_json(timing=not args.no_timing))
    return _report_exit(report)


def cmd_enumerate(args) -> int:
    for g in enumerate_connected(args.n, dedup=args.dedup):
        sys.stdout.write(g.to_text())
        print()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chipfire", description="Parallel chip-firing games: simulation and claim checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    graph_help = f"graph file, or family:params with family in {', '.join(FAMILIES)}"

    def game(sp):
        sp.add_argument("--graph", required=True, help=graph_help)
        sp.add_argument("--config", required=True, help="comma list of chip counts, or @file")

    sp = sub.add_parser("simulate", help="print the configuration after each round")
    game(sp)
    sp.add_argument("--rounds", type=int, default=10)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("period", help="print transient length, period and activity")
    game(sp)
    sp.add_argument("--max-rounds", type=int, default=DEFAULT_MAX_ROUNDS)
    sp.add_argument("--low-memory", action="store_true", help="use Brent's algorithm")
    sp.set_defaults(func=cmd_period)

    sp = sub.add_parser("assign", help="build and certify the chip assignment of a compliant game")
    game(sp)
    sp.add_argument("--max-rounds", type=int, default=DEFAULT_MAX_ROUNDS)
    sp.set_defaults(func=cmd_assign)

    sp = sub.add_parser("staircase", help="activity against chip total, as CSV")
    sp.add_argument("--graph", required=True, help=graph_help)
    sp.add_argument("--samples", type=int, default=50, help="samples per total")
    sp.add_argument("--seed", default="0")
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.add_argument("--max-rounds", type=int, default=100_000)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--no-battery", action="store_true")
    sp.add_argument("--no-timing", action="store_true", help="omit elapsed_ms from the report")
    sp.set_defaults(func=cmd_staircase)

    sp = sub.add_parser("verify", help="check a claim and print a JSON report")
    sp.add_argument("--claim", required=True, choices=CLAIM_CHOICES)
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--n-max", type=int, default=5, help="all connected graphs up to this many vertices")
    src.add_argument("--graph", action="append", help=graph_help + " (repeatable)")
    sp.add_argument("--a", type=int, help="side size of K_{a,a} for theorem2 and lemmas")
    sp.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", default="0")
    sp.add_argument("--max-rounds", type=int, default=100_000)
    sp.add_argument("--max-games", type=int, help="stop after this many games (report flagged incomplete)")
    sp.add_argument("--threads", type=int)
    sp.add_argument("--no-battery", action="store_true")
    sp.add_argument("--no-timing", action="store_true", help="omit elapsed_ms from the report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("enumerate", help="print connected graphs on n vertices in the file format")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--dedup", action="store_true", help="one graph per isomorphism class")
    sp.set_defaults(func=cmd_enumerate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GraphError, ConfigError, NotBalancedBipartite, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
