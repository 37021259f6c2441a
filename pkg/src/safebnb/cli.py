"""Command-line interface: ``solve`` one problem or ``compare`` strategies.

Exit codes: 0 when a run ends optimal or proven infeasible, 2 when the
budget runs out, 1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .corpus import corpus_dir
from .problem import ParseError, load_problem
from .report import report_to_json, rows_to_csv, summary_row, table_to_dict
from .solver import BUDGET_STATUS, SolverConfig, Strategy, branch_and_bound

__all__ = ["main", "build_parser", "cmd_solve", "cmd_compare"]

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_solver_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--eps", type=float, default=1e-6, help="target gap U - L (default 1e-6)")
    sp.add_argument("--nb-starts", type=int, default=20, help="local-search starts at the root")
    sp.add_argument("--max-nodes", type=int, default=100_000)
    sp.add_argument("--max-seconds", type=float, default=60.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, default=None, help="write the structured report here")
    sp.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(prog="safebnb", description="Safe interval branch and bound.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve one problem file")
    sp.add_argument("problem", type=Path)
    sp.add_argument("--strategy", choices=[s.value for s in Strategy], default="S3")
    sp.add_argument("--no-log", action="store_true", help="omit the per-iteration log from the report")
    _add_solver_flags(sp)

    cp = sub.add_parser("compare", help="run several strategies over a directory of problems")
    cp.add_argument("corpus", type=Path, nargs="?", default=None, help="directory of .prob files (default: bundled corpus)")
    cp.add_argument("--strategies", default="S1,S2,S3,S4,S5", help="comma-separated list")
    _add_solver_flags(cp)
    return ap


def _config(args, strategy: str) -> SolverConfig:
    return SolverConfig(
        eps=args.eps,
        strategy=Strategy(strategy),
        nb_starts=args.nb_starts,
        max_nodes=args.max_nodes,
        max_seconds=args.max_seconds,
        seed=args.seed,
    )


def _fmt(x: float) -> str:
    return f"{x:.12g}" if math.isfinite(x) else str(x)


def cmd_solve(args) -> int:
    try:
        p = load_problem(args.problem)
        cfg = _config(args, args.strategy)
    except (OSError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    r = branch_and_bound(p, config=cfg)
    print(f"problem   {p.name}")
    print(f"strategy  {r.strategy.value}{'  (unsafe)' if r.unsafe else ''}")
    print(f"status    {r.status}")
    print(f"[L, U]    [{_fmt(r.L)}, {_fmt(r.U)}]")
    print(f"nodes     {r.nodes}   proofs {r.proof_successes}/{r.proof_attempts}   time {r.wall_time:.3f}s")
    if args.out is not None:
        if args.format == "json":
            text = report_to_json(r, include_log=not args.no_log)
        else:
            text = rows_to_csv([summary_row(r)])
        args.out.write_text(text, encoding="utf-8")
    return EXIT_BUDGET if r.status == BUDGET_STATUS else EXIT_OK


def cmd_compare(args) -> int:
    directory = corpus_dir() if args.corpus is None else args.corpus
    files = sorted(Path(directory).glob("*.prob")) if Path(directory).is_dir() else []
    if not files:
        print(f"error: no .prob files in {directory}", file=sys.stderr)
        return EXIT_INPUT
    try:
        strategies = [Strategy(s.strip()).value for s in args.strategies.split(",") if s.strip()]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rows = []
    for path in files:
        try:
            p = load_problem(path)
        except (OSError, ParseError, ValueError) as exc:
            rows += [summary_row(None, path.stem, s, str(exc)) for s in strategies]
            continue
        for s in strategies:
            try:
                r = branch_and_bound(p, config=_config(args, s))
                rows.append(summary_row(r))
            except Exception as exc:  # recorded per row; the run continues
                rows.append(summary_row(None, p.name, s, f"{type(exc).__name__}: {exc}"))
    print(rows_to_csv(rows), end="")
    if args.out is not None:
        if args.format == "json":
            text = json.dumps(table_to_dict(rows), indent=2, allow_nan=False)
        else:
            text = rows_to_csv(rows)
        args.out.write_text(text, encoding="utf-8")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return cmd_solve(args)
    return cmd_compare(args)
