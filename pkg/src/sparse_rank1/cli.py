"""Command-line front end.

Subcommands: ``gen`` (synthetic tensors to .sten), ``approx`` (one of the
four algorithms), ``refine`` (approximation + AM), ``oracle`` (tiny
instances), ``cluster`` (full STC pipeline), ``bench`` (spec file to CSV).
Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .approx import brute_force_oracle, run_algorithm
from .bench import parse_spec_file, run_spec_to_csv
from .cluster import StcConfig, stack_samples, stc_pipeline
from .errors import InputError, NumericalError
from .factors import SparsityBudget
from .generate import gen_cluster_synthetic, gen_sparse_cp
from .refine import AmConfig, am_l0, am_l1, random_feasible
from .sten import read_sten, write_sten
from .tensor import DenseTensor

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _budget_arg(text: str) -> SparsityBudget:
    return SparsityBudget(int(v) for v in text.split(","))


def _load_tensor(path: str) -> DenseTensor:
    if not Path(path).exists():
        raise InputError(f"no such file: {path}")
    return read_sten(path)


def _result_payload(result) -> dict:
    return {
        "value": result.value,
        "weight_lambda": result.weight_lambda,
        "algorithm": result.algorithm,
        "support_sizes": list(result.factors.support_sizes()),
        "factors": [f.tolist() for f in result.factors],
    }


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_gen(args) -> int:
    if args.kind == "sparse-cp":
        shape = tuple(int(v) for v in args.shape.split(","))
        t = gen_sparse_cp(shape, args.rank, args.sr, args.seed)
        write_sten(t, args.out or "tensor.sten")
    else:
        samples, truth = gen_cluster_synthetic(args.n, args.sigma, args.mu, args.seed)
        write_sten(stack_samples(samples), args.out or "samples.sten")
        if args.labels_out:
            lines = ["sample_index,label"]
            lines += [f"{i + 1},{lab}" for i, lab in enumerate(truth.labels)]
            Path(args.labels_out).write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_approx(args) -> int:
    t = _load_tensor(args.input)
    result = run_algorithm(args.alg, t, _budget_arg(args.budget))
    _emit(_result_payload(result), args.out)
    return EXIT_OK


def cmd_refine(args) -> int:
    t = _load_tensor(args.input)
    budget = _budget_arg(args.budget)
    if args.init == "random":
        init = random_feasible(t.shape, budget, args.seed)
    else:
        init = run_algorithm(args.init, t, budget).factors
    if args.model == "l0":
        cfg = AmConfig(tol=args.tol, max_sweeps=args.max_sweeps)
        result, trace = am_l0(t, budget, init, cfg)
        payload = _result_payload(result)
    else:
        cfg = AmConfig(tol=args.tol, max_sweeps=args.max_sweeps, model="l1", rho=args.rho)
        factors, value, trace = am_l1(t, init, cfg)
        payload = {
            "penalized_objective": value,
            "factors": [f.tolist() for f in factors],
        }
    payload["sweeps"] = trace.sweeps_used
    payload["converged"] = trace.converged
    _emit(payload, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    t = _load_tensor(args.input)
    result = brute_force_oracle(t, _budget_arg(args.budget), args.restarts)
    _emit(_result_payload(result), args.out)
    return EXIT_OK


def _load_samples(args):
    if args.dir:
        paths = sorted(Path(args.dir).glob("*.sten"))
        if not paths:
            raise InputError(f"no .sten files in {args.dir}")
        return [read_sten(p) for p in paths]
    stacked = _load_tensor(args.input)
    n = stacked.shape[-1]
    arr = stacked.to_array()
    return [DenseTensor.from_array(arr[..., i]) for i in range(n)]


def cmd_cluster(args) -> int:
    samples = _load_samples(args)
    budget_grid = ()
    if args.budgets:
        budget_grid = tuple(
            tuple(int(v) for v in chunk.split(",")) + (len(samples),)
            for chunk in args.budgets.split(";")
        )
    config = StcConfig(
        rank_grid=tuple(int(v) for v in args.ranks.split(",")),
        budget_grid=budget_grid,
        init_alg=args.init,
        am=AmConfig(tol=args.tol, max_sweeps=args.max_sweeps),
        k_candidates=tuple(int(v) for v in args.k_candidates.split(",")),
        fixed_k=args.k,
        seed=args.seed,
    )
    assignment, model, score = stc_pipeline(samples, config)
    lines = ["sample_index,label"]
    lines += [f"{i + 1},{lab}" for i, lab in enumerate(assignment.labels)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    print(
        f"# rank={model.rank} budget={tuple(model.budget)} bic={score.value:.6g} "
        f"k={assignment.k}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_bench(args) -> int:
    spec = parse_spec_file(args.spec)
    if args.seed is not None:
        from dataclasses import replace

        spec = replace(spec, seed=args.seed)
    out = run_spec_to_csv(spec, args.out)
    print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-rank1",
        description="Sparse tensor best rank-1 approximation toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--out", default=None)
        p.add_argument("--tol", type=float, default=1e-5)
        p.add_argument("--max-sweeps", type=int, default=2000)

    p = sub.add_parser("gen", help="generate synthetic data as .sten")
    p.add_argument("--kind", choices=["sparse-cp", "cluster"], required=True)
    p.add_argument("--shape", default="20,20,20", help="sparse-cp mode sizes")
    p.add_argument("--rank", type=int, default=10)
    p.add_argument("--sr", type=float, default=0.7)
    p.add_argument("--n", type=int, default=20, help="cluster sample count")
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--labels-out", default=None)
    common(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("approx", help="run one approximation algorithm")
    p.add_argument("--alg", choices=list("ABCD"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--budget", required=True, help="comma-separated caps r_1,...,r_d")
    common(p)
    p.set_defaults(fn=cmd_approx)

    p = sub.add_parser("refine", help="approximation + alternating maximization")
    p.add_argument("--model", choices=["l0", "l1"], default="l0")
    p.add_argument("--init", choices=["A", "B", "C", "D", "random"], default="D")
    p.add_argument("--rho", type=float, default=0.2)
    p.add_argument("--input", required=True)
    p.add_argument("--budget", required=True)
    common(p)
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("oracle", help="brute-force lower bound on tiny instances")
    p.add_argument("--input", required=True)
    p.add_argument("--budget", required=True)
    p.add_argument("--restarts", type=int, default=20)
    common(p)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("cluster", help="sparse tensor clustering pipeline")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--dir", default=None, help="directory of equal-shape .sten files")
    group.add_argument("--input", default=None, help="one stacked .sten")
    p.add_argument("--ranks", default="4,6")
    p.add_argument("--budgets", default=None,
                   help="semicolon-separated per-mode caps, e.g. '7,7;8,8'")
    p.add_argument("--k-candidates", default="3,4,5,6")
    p.add_argument("--k", type=int, default=None, help="fixed cluster count")
    p.add_argument("--init", choices=["A", "B", "C", "D", "random"], default="D")
    common(p)
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("bench", help="run an experiment spec file to CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
