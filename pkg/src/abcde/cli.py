"""Command line entry point: ``abcde {solve,gen,bench,oracle}``."""

import argparse
import json
import sys
from pathlib import Path

from .bench.experiment import emit_plot_data, load_plan, run_experiment, AXES
from .bench.generators import CoefficientSpec, TopologyConfig, generate_problem, problem_metadata
from .engines import ENGINES, run_engine
from .exceptions import ContractViolation, ProtocolError, ReplicaDivergence
from .io import load_problem, save_problem
from .model import IntervalDomain
from .oracle import DEFAULT_GRID_CAP, grid_search
from .solver.config import VARIANTS, SolverConfig


def _cmd_solve(args):
    inst = load_problem(args.problem)
    cfg = SolverConfig(
        S=args.S,
        M=args.M,
        max_iter=args.iters,
        time_limit=args.time_limit,
        seed=args.seed,
        variant=args.algo,
    )
    trace = run_engine(inst, cfg, args.engine)
    if args.trace:
        trace.write_csv(args.trace, {"problem": str(args.problem), "engine": args.engine})
    out = {
        "utility": trace.utility,
        "iterations": len(trace),
        "assignment": [float(v) for v in trace.assignment],
    }
    print(json.dumps(out))


def _cmd_gen(args):
    topo = TopologyConfig(
        kind=args.topology, n=args.n, p=args.p, m_edges=args.m, k=args.k, rewire=args.rewire, seed=args.seed
    )
    coeff = CoefficientSpec(args.coeff_lo, args.coeff_hi)
    domain = IntervalDomain(args.lb, args.ub)
    inst = generate_problem(topo, coeff, domain)
    save_problem(inst, args.out, problem_metadata(topo, coeff, domain))
    print(f"wrote {args.out}: n={inst.n}, constraints={inst.m}")


def _cmd_bench(args):
    plan = load_plan(args.plan)
    result = run_experiment(plan, args.out)
    out = Path(args.out)
    for axis in AXES:
        if axis == "S-vs-utility" and len(plan.S) < 2 or axis == "M-vs-utility" and len(plan.M) < 2:
            continue
        for variant in plan.variants:
            emit_plot_data(result, axis, out / f"plot_{axis}_{variant}.csv", variant=variant)
    print(f"wrote {len(result.runs)} traces and aggregate.csv to {out}")


def _cmd_oracle(args):
    inst = load_problem(args.problem)
    point, utility = grid_search(inst, args.resolution, cap=args.cap)
    print(json.dumps({"utility": utility, "assignment": [float(v) for v in point]}))


def build_parser():
    parser = argparse.ArgumentParser(prog="abcde", description="Bee-colony C-DCOP solver and benchmark tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the solver on a problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--algo", choices=VARIANTS, default="abcd-e")
    p.add_argument("--S", type=int, default=100)
    p.add_argument("--M", type=int, default=10)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--time-limit", type=float, default=None, help="wall-clock budget in seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=ENGINES, default="distributed")
    p.add_argument("--trace", help="write the anytime trace CSV here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("gen", help="generate a random quadratic instance")
    p.add_argument("--topology", choices=("er", "ba", "ws"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--rewire", type=float, default=0.5)
    p.add_argument("--coeff-lo", type=float, default=-5.0)
    p.add_argument("--coeff-hi", type=float, default=5.0)
    p.add_argument("--lb", type=float, default=-10.0)
    p.add_argument("--ub", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="run an experiment plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("oracle", help="brute-force grid optimum")
    p.add_argument("--problem", required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_GRID_CAP)
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ContractViolation, ProtocolError, ReplicaDivergence, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"abcde {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
