"""Command-line front end: enumerate, decide, verify, simulate, count-splits.

Exit codes: 0 success or pass, 1 not conserving or verification failure,
2 usage or parse error, 3 budget refusal.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .engine import enumerate_catalog, is_number_conserving, orbit_representatives
from .errors import BudgetExceeded, NCCAError
from .harness import (
    DEFAULT_BUDGET,
    default_geometry,
    run_trajectory,
    verify_exhaustive,
    verify_sampled,
    verify_window,
)
from .lattice import GridGeometry
from .localfn import Configuration, LocalFunction, from_wolfram_code
from .neighborhood import StateSet
from .records import RuleRecord, read_records, write_records
from .split import count_splits, enumerate_splits

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _state_set(dim: int, qstar: int) -> StateSet:
    if not 1 <= dim <= 4:
        raise UsageError(f"--dim must be between 1 and 4, got {dim}")
    if qstar < 1:
        raise UsageError(f"--qstar must be at least 1, got {qstar}")
    return StateSet.upto(qstar)


def _load_rules(args) -> list[LocalFunction]:
    if args.eca is not None:
        return [from_wolfram_code(args.eca)]
    try:
        with open(args.lut, encoding="utf-8") as fh:
            rules = [r.to_rule() for r in read_records(fh)]
    except OSError as exc:
        raise UsageError(f"cannot read {args.lut}: {exc.strerror}") from None
    if not rules:
        raise UsageError(f"{args.lut} holds no rule records")
    return rules


def _parse_sides(text: str | None, d: int) -> GridGeometry:
    if text is None:
        return default_geometry(d)
    try:
        sides = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise UsageError(f"--sides must be comma-separated integers, got {text!r}") from None
    if len(sides) != d:
        raise UsageError(f"--sides gives {len(sides)} sides for a {d}-dimensional rule")
    return GridGeometry(sides)


def _add_rule_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--eca", type=int, help="elementary rule by Wolfram code (0-255)")
    src.add_argument("--lut", help="JSON-lines file of rule records")


def cmd_enumerate(args, out) -> int:
    Q = _state_set(args.dim, args.qstar)
    entries = list(enumerate_catalog(args.dim, Q, workers=args.workers))
    records = [RuleRecord.from_rule(e.rule, split=e.h.recipes, coeffs=e.coeffs) for e in entries]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            write_records(records, fh)
    print(f"{len(records)} rules", file=out)
    if args.per_split:
        counts = {h: 0 for h in enumerate_splits(args.dim, Q)}
        for e in entries:
            counts[e.h] += 1
        for h, n in counts.items():
            print(f"{h}\t{n}", file=out)
    if args.orbits:
        reps = orbit_representatives([e.rule for e in entries], args.dim)
        print(f"{len(reps)} orbits", file=out)
    return EXIT_OK


def cmd_decide(args, out) -> int:
    status = EXIT_OK
    for f in _load_rules(args):
        verdict = is_number_conserving(f)
        if verdict:
            dec = verdict.decomposition
            coeffs = verdict.perturbation.vector.tolist()
            g = "zero perturbation" if not any(coeffs) else f"g = {coeffs}"
            print(f"NC; h = {dec.h}; {g}", file=out)
            continue
        status = EXIT_FAIL
        if verdict.violations:
            why = "; ".join(str(v) for v in verdict.violations)
        else:
            why = f"residual is not a perturbation at N = {list(verdict.witness.states)}"
        print(f"not NC; {why}", file=out)
    return status


def cmd_verify(args, out) -> int:
    status = EXIT_OK
    for f in _load_rules(args):
        geometry = _parse_sides(args.sides, f.d)
        if args.mode == "exhaustive":
            report = verify_exhaustive(f, geometry, budget=args.budget)
        elif args.mode == "window":
            report = verify_window(f, geometry, radius=args.radius, shape=args.shape, budget=args.budget)
        else:
            report = verify_sampled(f, geometry, trials=args.trials, seed=args.seed)
        print(json.dumps(report.to_dict(), separators=(",", ":")), file=out)
        if not report.passed:
            status = EXIT_FAIL
    return status


def _load_init(path: str) -> Configuration:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(obj, dict) or "sides" not in obj or "cells" not in obj:
        raise UsageError("initial configuration needs 'sides' and 'cells'")
    return Configuration(GridGeometry(tuple(obj["sides"])), np.asarray(obj["cells"], dtype=np.int64))


def cmd_simulate(args, out) -> int:
    rules = _load_rules(args)
    if len(rules) != 1:
        raise UsageError("simulate takes exactly one rule")
    x0 = _load_init(args.init)
    for t, (x, s) in enumerate(run_trajectory(rules[0], x0, args.steps)):
        row = {"step": t, "sigma": s}
        if args.dump:
            row["cells"] = x.cells.tolist()
        print(json.dumps(row, separators=(",", ":")), file=out)
    return EXIT_OK


def cmd_count_splits(args, out) -> int:
    Q = _state_set(args.dim, args.qstar)
    print(count_splits(args.dim, Q), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncca", description="Number-conserving cellular automata toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list every number-conserving rule")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--qstar", type=int, required=True, help="largest state; states are 0..qstar")
    p.add_argument("--per-split", action="store_true", help="print rule counts per split function")
    p.add_argument("--orbits", action="store_true", help="print the number of symmetry orbits")
    p.add_argument("--out", help="write the catalog as JSON lines")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("decide", help="decide number conservation")
    _add_rule_source(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("verify", help="brute-force conservation check on a torus")
    p.add_argument("--mode", choices=("exhaustive", "window", "sampled"), required=True)
    p.add_argument("--sides", help="torus sides n1,n2,... (default depends on the dimension)")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--shape", choices=("box", "cross"), default="box", help="window shape")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    _add_rule_source(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="iterate a rule and report the state sum per step")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--init", required=True, help='JSON file {"sides": [...], "cells": [...]}')
    p.add_argument("--dump", action="store_true", help="include the configuration at every step")
    _add_rule_source(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("count-splits", help="number of split functions")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--qstar", type=int, required=True)
    p.set_defaults(func=cmd_count_splits)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, NCCAError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
