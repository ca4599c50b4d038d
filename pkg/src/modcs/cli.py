"""``modcs`` command line.

Exit codes: 0 success / recoverable, 1 usage error, 2 numerical or I/O
failure, 3 valid run but not recoverable, 4 experiment finished with a
failed tolerance check.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from modcs import lp as _lp
from modcs.experiments import ExperimentConfig, gen_uniform_matrix, run_example1, run_example2
from modcs.io import read_matrix_csv, write_json, write_matrix_csv
from modcs.numkit import IndexSet, SeededStream, SignPattern, columns, rank
from modcs.probability import (
    CheckerKind,
    Scenario,
    SpaceTooLarge,
    exact_probability,
    mc_probability,
)
from modcs.recovery import DEFAULT_RECOVERY_TOL, InfeasibleSystem
from modcs.snc import DEFAULT_MARGIN_TOL, EnumerationTooLarge, SncInstance, check_by_solving, check_snc

EXIT_OK, EXIT_USAGE, EXIT_FAILURE, EXIT_NOT_RECOVERABLE, EXIT_TOLERANCE = 0, 1, 2, 3, 4

log = logging.getLogger("modcs")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise SystemExit(EXIT_OK if status == 0 else EXIT_USAGE)


def _indices(text: str, n: int, what: str) -> IndexSet:
    text = text.strip()
    if not text:
        return IndexSet(n)
    try:
        members = [int(tok) for tok in text.split(",")]
        return IndexSet.of(n, members)
    except ValueError as exc:
        raise UsageError(f"--{what}: {exc}") from None


def _seed(args) -> int:
    if args.seed is not None:
        seed = args.seed
    elif os.environ.get("MODCS_SEED"):
        try:
            seed = int(os.environ["MODCS_SEED"])
        except ValueError:
            raise UsageError("MODCS_SEED must be an integer") from None
    else:
        raise UsageError("a seed is required (--seed or MODCS_SEED)")
    if not 0 <= seed < 2**64:
        raise UsageError("seed must fit in 64 unsigned bits")
    return seed


def _load_matrix(path):
    try:
        return read_matrix_csv(path)
    except OSError as exc:
        raise OSError(f"cannot read matrix {path}: {exc.strerror or exc}") from exc


def cmd_gen_matrix(args) -> int:
    if args.rows < 1 or args.cols < 1:
        raise UsageError("--rows and --cols must be positive")
    if not args.lo < args.hi:
        raise UsageError("--lo must be smaller than --hi")
    A = gen_uniform_matrix(args.rows, args.cols, args.lo, args.hi, SeededStream(_seed(args)))
    write_matrix_csv(args.out, A)
    return EXIT_OK


def cmd_check(args) -> int:
    A = _load_matrix(args.matrix)
    n = A.shape[1]
    support = _indices(args.support, n, "support")
    known = _indices(args.known, n, "known")
    delta = support.difference(known)
    if set(args.signs) - {"+", "-"}:
        raise UsageError("--signs must be a string of '+' and '-'")
    if len(args.signs) != len(delta):
        raise UsageError(f"--signs has {len(args.signs)} entries, support minus known has {len(delta)}")
    signs = SignPattern(delta, tuple(1 if c == "+" else -1 for c in args.signs))
    if args.method == "snc":
        tol = DEFAULT_MARGIN_TOL if args.tol is None else args.tol
        report = check_snc(SncInstance(A, known, delta, signs), tol).to_json()
    else:
        tol = DEFAULT_RECOVERY_TOL if args.tol is None else args.tol
        ok = check_by_solving(A, known, delta, signs, tol=tol,
                              known_true=known.intersection(support))
        report = {
            "recoverable": ok,
            "rank_ok": rank(columns(A, known)) == len(known),
            "worst_margin": None,
            "worst_subset": None,
            "subsets_checked": 0,
            "marginal": False,
        }
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK if report["recoverable"] else EXIT_NOT_RECOVERABLE


def cmd_prob(args) -> int:
    A = _load_matrix(args.matrix)
    try:
        scenario = Scenario(A.shape[1], args.ell, args.p, args.p1)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    checker = None if args.checker == "auto" else CheckerKind(args.checker)
    if args.mode == "exact":
        est = exact_probability(A, scenario, checker, cap=args.cap)
    else:
        if args.samples is None or args.samples < 1:
            raise UsageError("mc needs --samples >= 1")
        est = mc_probability(A, scenario, args.samples, _seed(args), checker)
    if args.out:
        write_json(args.out, est.to_json())
    print(repr(est.value))
    return EXIT_OK


def cmd_experiment(args) -> int:
    seed = _seed(args)
    if args.which == "fig1":
        kw = {} if args.trials is None else {"empirical_trials": args.trials}
        cfg = ExperimentConfig.example1(seed, scale=args.scale, **kw)
        run_example1(cfg, args.out_dir)
    else:
        cfg = ExperimentConfig.example2(seed, scale=args.scale, case_budget=args.budget)
        run_example2(cfg, args.out_dir)
    with open(os.path.join(args.out_dir, "summary.json")) as fh:
        summary = json.load(fh)
    return EXIT_OK if summary["all_passed"] else EXIT_TOLERANCE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modcs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-matrix", help="write a seeded uniform random matrix as CSV")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--lo", type=float, default=-0.5)
    g.add_argument("--hi", type=float, default=0.5)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_matrix)

    c = sub.add_parser("check", help="certify exact recovery of one sign pattern")
    c.add_argument("--matrix", required=True)
    c.add_argument("--support", required=True, help="comma-separated 0-based support indices")
    c.add_argument("--known", default="", help="comma-separated known-support indices")
    c.add_argument("--signs", default="", help="'+'/'-' per index of support minus known, ascending")
    c.add_argument("--method", choices=["snc", "solve"], default="snc")
    c.add_argument("--tol", type=float)
    c.set_defaults(func=cmd_check)

    def prob_args(q, mode=None):
        q.add_argument("--matrix", required=True)
        q.add_argument("--ell", type=int, required=True)
        q.add_argument("--p", type=int, required=True)
        q.add_argument("--p1", type=int, required=True)
        q.add_argument("--samples", type=int)
        q.add_argument("--seed", type=int)
        q.add_argument("--checker", choices=["auto", "snc", "solve"], default="auto")
        q.add_argument("--cap", type=int, default=10**8, help="largest quad space to exhaust")
        q.add_argument("--out")
        q.set_defaults(func=cmd_prob)
        if mode:
            q.set_defaults(mode=mode)

    p = sub.add_parser("prob", help="recovery probability, exact or Monte Carlo")
    p.add_argument("mode", choices=["exact", "mc"])
    prob_args(p)
    prob_args(sub.add_parser("prob-exact", help="same as 'prob exact'"), "exact")
    prob_args(sub.add_parser("prob-mc", help="same as 'prob mc'"), "mc")

    e = sub.add_parser("experiment", help="reproduce a simulation study")
    e.add_argument("which", choices=["fig1", "fig2"])
    e.add_argument("--seed", type=int)
    e.add_argument("--scale", choices=["reduced", "full"], default="reduced")
    e.add_argument("--out-dir", required=True)
    e.add_argument("--trials", type=int, help="override empirical trials per point (fig1)")
    e.add_argument("--budget", type=float, help="wall-clock seconds per case (fig2)")
    e.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"modcs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        # malformed input files and I/O problems
        print(f"modcs: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (_lp.LpError, InfeasibleSystem, SpaceTooLarge, EnumerationTooLarge) as exc:
        print(f"modcs: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as exc:  # noqa: BLE001 - exit-code contract is total
        print(f"modcs: internal error: {exc!r}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
