"""Command line entry point.

Players and coalitions are 1-based on the command line (``--reveal 1,2``).
Exit status is 0 on success, 2 on invalid input and 3 when a request
exceeds a size limit.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys

from .analysis import (
    audit_gap_supermodularity, check_criterion, criterion_coefficient, criterion_probe,
)
from .core import KnownSet, SizeLimit, format_coalition, load_game, parse_coalition
from .gap import game_bounds, gap_closed_form, shapley, utopian_game
from .generators import KINDS, POLICY_STREAM, Distribution, rng_for
from .harness import load_config, run_experiment
from .policies import POLICY_NAMES, default_kappa, make_policy, run_trajectory, size_limit_for

EXIT_INVALID, EXIT_SIZE = 2, 3


def _dist_params(args) -> dict:
    params = {}
    if args.fixed_owner is not None:
        params["fixed_owner"] = args.fixed_owner - 1
    if args.density is not None:
        params["density"] = args.density
    return params


def cmd_generate(args, out) -> None:
    dist = Distribution(args.kind, args.n, _dist_params(args))
    for j in range(args.count):
        out.write(json.dumps(dist.sample(args.seed, j).to_json()) + "\n")


def cmd_gap(args, out) -> None:
    g = load_game(args.game)
    known = KnownSet.of(g.n, [parse_coalition(r) for r in args.reveal])
    bp = game_bounds(g, known)
    report = {
        "n": g.n,
        "revealed": [format_coalition(s) for s in known.revealed()],
        "gap": gap_closed_form(g, known),
        "delta": bp.delta.tolist(),
        "lower": bp.lower.tolist(),
        "upper": bp.upper.tolist(),
        "utopian_shapley": [float(shapley(utopian_game(g, known, i))[i]) for i in range(g.n)],
    }
    out.write(json.dumps(report, indent=2) + "\n")


def cmd_run(args, out) -> None:
    size_limit_for(args.policy, args.n)
    dist = Distribution(args.dist, args.n, _dist_params(args))
    kappa = default_kappa(args.n) if args.kappa is None else args.kappa
    digest = hashlib.sha256(json.dumps(
        {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    ).encode()).hexdigest()
    sink = open(args.out, "w", encoding="utf-8", newline="") if args.out else out
    try:
        sink.write(f"# config_sha256={digest} seed={args.seed}\n")
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["trial", "step", "revealed_bitmask", "gap"])
        policy = None
        for j in range(args.trials):
            game = dist.sample(args.seed, j)
            if policy is None or args.policy == "random":
                policy = make_policy(args.policy, dist, args.t, kappa, args.seed)
            traj = run_trajectory(policy, game, args.t, rng_for(args.seed, j, POLICY_STREAM))
            revealed = [0] + traj.revealed
            for step, value in enumerate(traj.gaps):
                writer.writerow([j, step, revealed[step], repr(float(value))])
    finally:
        if sink is not out:
            sink.close()


def cmd_audit(args, out) -> None:
    g = load_game(args.game)
    report = {}
    probes = []
    if args.criterion:
        witness = check_criterion(g)
        report["criterion"] = {
            "coefficient": str(criterion_coefficient(g.n)),
            "witness": None if witness is None else [i + 1 for i in witness],
        }
        if witness is not None:
            probes.append(criterion_probe(witness))
    exhaustive = args.budget is None
    audit = audit_gap_supermodularity(
        g, exhaustive=exhaustive, budget=args.budget or 0, seed=args.seed,
        max_extra=None if args.full else 4, probes=probes,
    )
    report.update(audit.to_json())
    out.write(json.dumps(report, indent=2) + "\n")


def cmd_experiment(args, out) -> None:
    cfg = load_config(args.config)
    result = run_experiment(cfg, out_dir=args.out_dir)
    out.write(json.dumps({"csv": str(result.csv_path), "svg": str(result.svg_path)}) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="utopian-gap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def dist_options(p):
        p.add_argument("--fixed-owner", type=int, help="1-based owner for factory kinds")
        p.add_argument("--density", type=float, help="unanimity density for totally_monotonic")

    p = sub.add_parser("generate", help="sample games as JSON lines")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    dist_options(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("gap", help="bounds, gap and utopian payoffs of a game")
    p.add_argument("--game", required=True)
    p.add_argument("--reveal", action="append", default=[], metavar="1,2,...",
                   help="a revealed coalition; repeat for several")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("run", help="run a policy over sampled games and write a CSV")
    p.add_argument("--policy", required=True, choices=POLICY_NAMES)
    p.add_argument("--dist", required=True, choices=KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--kappa", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--out", help="CSV path; stdout if omitted")
    dist_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("audit", help="search for a supermodularity violation of the gap")
    p.add_argument("--game", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="scan all quads (default)")
    mode.add_argument("--budget", type=int, help="check this many random quads instead")
    p.add_argument("--criterion", action="store_true", help="also test the pair-excess criterion")
    p.add_argument("--full", action="store_true", help="no cap on the base-set size")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("experiment", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", help="override the config's out_dir")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except SizeLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())
