"""Command-line entry point.

Exit codes: 0 success, 2 configuration or input error, 3 infeasible instance
(single-instance subcommands only).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .assignment import solve_assignment, solve_assignment_pruned
from .errors import ConfigError, Infeasible, KarpPatchError, ParseError, SchemaError, Stuck, TooLarge
from .graph import CostKind, CostModel, Topology, generate_instance, load_instance, save_instance
from .harness import ExperimentConfig, emit, run_experiment
from .oracles import brute_force_ap, held_karp_atsp
from .patching import patch_to_tour, permutation_to_cover, verify_tour

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 2, 3


def _read_instance(path: str):
    try:
        return load_instance(Path(path).read_bytes())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(path).write_bytes(data)


def cmd_gen(args) -> int:
    g = generate_instance(args.n, args.alpha, CostModel(args.cost_model, args.seed), args.topology)
    _write(args.out, save_instance(g))
    return EXIT_OK


def cmd_solve(args) -> int:
    g = _read_instance(args.infile)
    report = None
    if args.cutoff is not None:
        try:
            report = solve_assignment_pruned(g, args.cutoff)
        except Infeasible:
            print(f"pruned instance infeasible at cutoff {args.cutoff}, solving unpruned", file=sys.stderr)
    if report is None:
        report = solve_assignment(g)
    cover = permutation_to_cover(g, report.matching.phi)
    print(f"v_ap {report.matching.cost:.12g}")
    print(f"max_edge_cost {report.max_matched_cost:.12g}")
    print(f"nu_c {len(cover.cycles)}")
    if args.trace:
        trace = {
            "phi": list(report.matching.phi),
            "cost": report.matching.cost,
            "sum_inv_delta": report.sum_inv_delta,
            "augmentations": [vars(s) for s in report.trace],
        }
        _write(args.trace, json.dumps(trace, indent=1).encode())
    return EXIT_OK


def cmd_patch(args) -> int:
    g = _read_instance(args.infile)
    report = solve_assignment(g)
    cover = permutation_to_cover(g, report.matching.phi)
    try:
        tour, trace = patch_to_tour(g, cover)
    except Stuck as exc:
        print(f"stuck with {len(exc.cover.cycles)} cycles after {len(exc.trace)} patches", file=sys.stderr)
        if args.trace:
            _write(args.trace, json.dumps(exc.trace.to_json(), indent=1).encode())
        return EXIT_INFEASIBLE
    v_tour = verify_tour(g, tour)
    print(f"v_tour {v_tour:.12g}")
    print(f"ratio {v_tour / report.matching.cost:.12g}")
    if args.trace:
        _write(args.trace, json.dumps(trace.to_json(), indent=1).encode())
        print(f"trace {args.trace}")
    return EXIT_OK


def cmd_exact(args) -> int:
    g = _read_instance(args.infile)
    wanted = [name for name, flag in (("ap", args.ap), ("atsp", args.atsp)) if flag] or ["ap", "atsp"]
    infeasible = False
    for name in wanted:
        res = brute_force_ap(g) if name == "ap" else held_karp_atsp(g)
        if res.feasible:
            print(f"{name} {res.value:.12g} {' '.join(map(str, res.witness))}")
        else:
            print(f"{name} infeasible")
            infeasible = True
    return EXIT_INFEASIBLE if infeasible else EXIT_OK


def cmd_experiment(args) -> int:
    config = ExperimentConfig(
        n=args.n,
        alpha=args.alpha,
        trials=args.trials,
        seed=args.seed,
        cost_model=args.cost_model,
        topology=args.topology,
        prune=args.prune or args.cutoff is not None,
        cutoff=args.cutoff,
        check=args.check,
        format=args.format,
        parallel=args.parallel,
        timing=not args.no_timing,
    )
    summary, records = run_experiment(config)
    _write(args.out, emit(records, config.format))
    if args.summary:
        _write(args.summary, json.dumps(summary.to_dict(), indent=1).encode())
    print(
        f"trials {summary.trials} ok {summary.ok} infeasible {summary.infeasible} "
        f"stuck {summary.stuck} prune_fallback {summary.prune_fallback}",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="karp-patch", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def instance_opts(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--alpha", type=float, required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--topology", choices=[t.value for t in Topology], default="complete")
        sp.add_argument("--cost-model", choices=[c.value for c in CostKind], default="uniform01")

    sp = sub.add_parser("gen", help="generate a random instance")
    instance_opts(sp)
    sp.add_argument("--out", required=True, help="output file, '-' for stdout")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("solve", help="solve the assignment problem")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--cutoff", type=float, help="ignore arcs costing more than this")
    sp.add_argument("--trace", help="write the augmentation trace as JSON")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("patch", help="solve AP and patch the cycle cover into a tour")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--trace", help="write the patch trace as JSON")
    sp.set_defaults(func=cmd_patch)

    sp = sub.add_parser("exact", help="exact AP / ATSP values for small instances")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--ap", action="store_true")
    sp.add_argument("--atsp", action="store_true")
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("experiment", help="run seeded trials and emit per-trial records")
    instance_opts(sp)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--prune", action="store_true", help="prune arcs above (ln n)^4/n before solving")
    sp.add_argument("--cutoff", type=float, help="explicit prune cutoff (implies --prune)")
    sp.add_argument("--check", action="store_true", help="cross-check pruned and exact optima")
    sp.add_argument("--parallel", type=int, default=1)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--no-timing", action="store_true", help="record wall_ms as 0 for byte-stable output")
    sp.add_argument("--summary", help="write the aggregate summary as JSON")
    sp.add_argument("--out", required=True, help="output file, '-' for stdout")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ParseError, SchemaError, TooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KarpPatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
