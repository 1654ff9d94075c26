"""Command-line entry point: ``rank``, ``verify`` and ``sweep``.

Exit codes: 0 success, 1 usage or input error, 2 power method hit
``--max-iters`` (rank), 3 a verification trial failed (verify).  Only the
declared output format goes to stdout; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager

import numpy as np

from .core import DENSE_CAP, DEFAULT_ALPHA, GoogleOperator, PatchPolicy, build_transition
from .eigen import eigenvalues_dense, second_modulus
from .errors import PageRankError
from .ingest import RandomInstanceSpec, parse_edge_list, parse_vector, random_instance, write_rank_result
from .errors import InsufficientTraceError
from .solver import DEFAULT_MAX_ITERS, DEFAULT_TOL, SolverConfig, estimate_rate, power_method
from .spectral import verify_theorem

log = logging.getLogger("pagerank_spectral")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_VERIFY_FAILED = 3

# fast-contracting instances leave too few ratios above the default floor;
# sweep then accepts rounding-limited ratios over a shorter window
SWEEP_FALLBACK_FLOOR = 1e-12
SWEEP_FALLBACK_WINDOW = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _alpha(text: str) -> float:
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must satisfy 0 < alpha < 1, got {text}")
    return a


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def _positive_int(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pagerank-spectral",
        description="PageRank by power iteration and numerical checks of the Google-matrix spectrum.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt_default):
        p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA,
                       help="damping factor in (0, 1); 0.85 is a convention, not a derived value")
        p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                       help="power-method 1-norm stopping threshold / verifier tolerance "
                            "(default %(default)g, a convention)")
        p.add_argument("--max-iters", type=_positive_int, default=DEFAULT_MAX_ITERS)
        p.add_argument("--input", help="edge list (source target [weight] per line)")
        p.add_argument("--output", help="output file (default stdout)")
        p.add_argument("--format", choices=["json", "csv", "tsv"], default=fmt_default)
        p.add_argument("--dangling", choices=[p.value for p in PatchPolicy], default="uniform",
                       help="patch for nodes without out-links")
        p.add_argument("--v-file", help="personalization vector, one float per line, summing to 1")

    rank = sub.add_parser("rank", help="compute PageRank scores for an edge list")
    common(rank, "csv")

    verify = sub.add_parser("verify", help="check eig(A) = {1, alpha*lambda_2, ...} on random instances")
    common(verify, "csv")
    verify.add_argument("--n", type=_positive_int, default=10)
    verify.add_argument("--trials", type=_positive_int, default=20)
    verify.add_argument("--seed", type=int, default=0)

    sweep = sub.add_parser("sweep", help="measured vs predicted convergence rate over an alpha grid")
    common(sweep, "csv")
    sweep.add_argument("--n", type=_positive_int, default=10)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--alpha-min", type=_alpha, default=0.5)
    sweep.add_argument("--alpha-max", type=_alpha, default=0.95)
    sweep.add_argument("--steps", type=int, default=10)
    return parser


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def _load_problem(args):
    """Transition matrix and personalization vector from --input / --v-file."""
    g = parse_edge_list(_read_text(args.input))
    P = build_transition(g, args.dangling)
    v = parse_vector(_read_text(args.v_file), g.n) if args.v_file else None
    return P, v


def cmd_rank(args) -> int:
    if not args.input:
        raise PageRankError("rank requires --input")
    P, v = _load_problem(args)
    op = GoogleOperator(P, args.alpha, v)
    result = power_method(op, cfg=SolverConfig(tol=args.tol, max_iters=args.max_iters))
    with _output(args.output) as out:
        out.write(write_rank_result(result, args.format))
    if not result.converged:
        log.warning("not converged after %d iterations", result.iterations)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


_VERIFY_COLUMNS = ["trial", "n", "alpha", "block_defect", "structure_defect", "teleport_defect",
                   "eig_multiset_defect", "lambda2_modulus", "passed"]


def cmd_verify(args) -> int:
    if args.input:
        P, v = _load_problem(args)
        if P.n > DENSE_CAP:
            raise PageRankError(f"n={P.n} exceeds the dense cap {DENSE_CAP}")
        instances = [(0, P, v)]
    else:
        if args.n > DENSE_CAP:
            raise PageRankError(f"--n {args.n} exceeds the dense cap {DENSE_CAP}")
        instances = []
        for t in range(args.trials):
            P, v = random_instance(RandomInstanceSpec(args.n, args.seed + t))
            instances.append((t, P, v))

    rows = []
    for t, P, v in instances:
        rep = verify_theorem(P, args.alpha, v, tol=args.tol)
        rows.append({
            "trial": t,
            "n": rep.n,
            "alpha": rep.alpha,
            "block_defect": rep.block_defect,
            "structure_defect": rep.max_structure_defect,
            "teleport_defect": max(rep.teleport_defect, rep.w1_defect),
            "eig_multiset_defect": rep.eig_multiset_defect,
            "lambda2_modulus": rep.lambda2_modulus,
            "passed": rep.passed,
        })
    with _output(args.output) as out:
        if args.format == "json":
            out.write(json.dumps(rows) + "\n")
        else:
            sep = "," if args.format == "csv" else "\t"
            out.write(sep.join(_VERIFY_COLUMNS) + "\n")
            for row in rows:
                out.write(sep.join(_cell(row[c]) for c in _VERIFY_COLUMNS) + "\n")
    failed = sum(not r["passed"] for r in rows)
    print(f"verify: {len(rows) - failed}/{len(rows)} trials passed", file=sys.stderr)
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return repr(x)
    return str(x)


def cmd_sweep(args) -> int:
    if args.steps < 1 or args.alpha_min > args.alpha_max:
        raise PageRankError("empty alpha grid: need --steps >= 1 and --alpha-min <= --alpha-max")
    if args.input:
        P, v = _load_problem(args)
    else:
        P, v = random_instance(RandomInstanceSpec(args.n, args.seed))
    lam2 = None
    if P.n <= DENSE_CAP:
        probe = GoogleOperator(P, 0.5, v)
        lam2 = second_modulus(eigenvalues_dense(P.to_dense(probe.v)))
    # a point mass keeps the transient visible even when v is itself a fixed point
    x0 = np.zeros(P.n)
    x0[0] = 1.0
    rows = []
    for alpha in np.linspace(args.alpha_min, args.alpha_max, args.steps):
        op = GoogleOperator(P, float(alpha), v)
        res = power_method(op, x0, SolverConfig(tol=args.tol, max_iters=args.max_iters))
        rate = res.estimated_rate
        if rate is None:
            try:
                rate = estimate_rate(res.trace, SWEEP_FALLBACK_WINDOW, SWEEP_FALLBACK_FLOOR)
            except InsufficientTraceError:
                log.warning("alpha=%g: too few iterations to estimate a rate", alpha)
        rows.append({
            "alpha": float(alpha),
            "iterations": res.iterations,
            "estimated_rate": rate,
            "predicted_rate": None if lam2 is None else float(alpha) * lam2,
        })
    columns = ["alpha", "iterations", "estimated_rate", "predicted_rate"]
    with _output(args.output) as out:
        if args.format == "json":
            out.write(json.dumps(rows) + "\n")
        else:
            sep = "," if args.format == "csv" else "\t"
            out.write(sep.join(columns) + "\n")
            for row in rows:
                out.write(sep.join(_cell(row[c]) for c in columns) + "\n")
    return EXIT_OK


COMMANDS = {"rank": cmd_rank, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except BrokenPipeError:
        # downstream reader closed early (e.g. `| head`); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (PageRankError, OSError) as exc:
        print(f"pagerank-spectral {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
