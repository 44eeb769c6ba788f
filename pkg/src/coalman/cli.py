"""Command-line entry point.

Subcommands::

    coalman gen        random instance JSON
    coalman solve      configuration-LP pipeline on an instance file
    coalman compare    algorithm comparison grid, CSV + summary
    coalman lowerbound REVERSE lower-bound family
    coalman gap        natural-LP integrality gap

Exit codes: 0 success, 1 usage or input error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .baselines import ExactLimitError, claim1_instance, exact_bruteforce, reverse
from .core import (
    ContractError,
    ProblemInstance,
    ScoringVector,
    beta_of,
    decide_win,
    g_alpha,
    max_nonpreferred_score,
    p_final_score,
)
from .experiments import CSV_COLUMNS, TIMING_COLUMNS, ExperimentGrid, GridPoint, run_grid, summarize, to_csv
from .lp import EPS_LP, SolverError, min_feasible_T, natural_lp_value
from .rounding import round_best_of

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_instance(path: str) -> ProblemInstance:
    """Read an instance file; malformed JSON reports line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    try:
        return ProblemInstance.from_dict(data)
    except (ContractError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: invalid instance: {exc}") from exc


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def solve_report(instance: ProblemInstance, mode: str, seed: int = 0, repeats: int | None = None,
                 d: float = 1.0, tol: float = EPS_LP, max_columns: int | None = None,
                 natural_lp: bool = False) -> dict:
    """Run the whole pipeline and collect a JSON-serializable report."""
    t_clp, solution = min_feasible_T(instance, mode, max_columns=max_columns, tol=tol)
    report = round_best_of(solution, instance, repeats, seed=seed, mode=mode)
    beta = beta_of(instance.m, d)
    g = g_alpha(instance.alpha, beta)
    mult = instance.k if mode == "ucm" else instance.total_weight
    out = {
        "mode": mode,
        "m": instance.m,
        "k": instance.k,
        "t_clp": t_clp,
        "achieved": report.achieved,
        "per_repeat": list(report.per_repeat),
        "repeats": len(report.per_repeat),
        "seed": seed,
        "beta": beta,
        "g_alpha": g,
        "guarantee": t_clp + mult * g,
        "reverse": max_nonpreferred_score(instance, reverse(instance)),
        "matrix": report.matrix.to_dict(),
        "p_score": None,
        "win": None,
    }
    if instance.sigma_p is not None:
        out["p_score"] = p_final_score(instance)
        out["win"] = decide_win(instance, report.matrix)
    if natural_lp:
        out["natural_lp"] = round(natural_lp_value(instance), 6)
    return out


def cmd_gen(args) -> int:
    from .experiments import gen_uniform

    inst = gen_uniform(args.n, args.m, args.k, args.mode, args.seed)
    _write(inst.to_json() + "\n", args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    if args.mode == "ucm" and not inst.is_unweighted:
        raise UsageError("ucm mode needs unit weights; use --mode wcm")
    if args.natural_lp and not inst.is_unweighted:
        raise UsageError("--natural-lp needs an unweighted instance")
    rep = solve_report(inst, args.mode, args.seed, args.repeats, args.d, args.tol,
                       args.max_columns, args.natural_lp)
    _write(_dump(rep), args.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.k is not None and len(args.k) != len(args.m):
        raise UsageError("--k needs one value per --m")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.k is None:
        grid = ExperimentGrid.default(args.mode, args.m, args.trials, args.seed, args.repeats)
    else:
        pts = [GridPoint(m, k, args.n if args.n else 2 * k, args.trials, args.mode, args.seed)
               for m, k in zip(args.m, args.k)]
        grid = ExperimentGrid(pts, args.repeats)
    if args.n:
        grid.points = [GridPoint(p.m, p.k, args.n, p.trials, p.mode, p.seed) for p in grid.points]
    grid.exact = not args.no_exact
    records = run_grid(grid, args.workers)
    try:
        _write(to_csv(records, args.timings), args.output)
        summary = summarize(records)
        if args.summary:
            _write(_dump(summary), args.summary)
    except OSError as exc:
        raise UsageError(f"cannot write output: {exc}") from exc
    for row in summary:
        print(
            f"{row['mode']} m={row['m']} k={row['k']} trials={row['trials']}: "
            f"clp==t_clp {row['clp_equals_t_clp']}, clp<{row['competitor']} {row['clp_better']}, "
            f"{row['competitor']}<clp {row['competitor_better']}",
            file=sys.stderr if args.output in (None, "-") else sys.stdout,
        )
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    rows = []
    for t in args.t:
        inst, strategy = claim1_instance(t)
        t_clp, sol = min_feasible_T(inst, "ucm")
        rep = round_best_of(sol, inst, args.repeats, seed=args.seed)
        rows.append({
            "t": t,
            "m": inst.m,
            "reverse": max_nonpreferred_score(inst, reverse(inst)),
            "construction": max_nonpreferred_score(inst, strategy),
            "t_clp": t_clp,
            "clp": rep.achieved,
        })
    _write(_dump(rows), args.output)
    return EXIT_OK


def cmd_gap(args) -> int:
    rows = []
    for m in args.m:
        inst = ProblemInstance.unweighted(ScoringVector.borda(m), [0] * m, 1, sigma_p=0)
        frac = natural_lp_value(inst)
        row = {"m": m, "natural_lp": round(frac, 6), "t_star": None, "gap": None}
        try:
            t_star = exact_bruteforce(inst, {"m": max(6, m), "k": 1}).t_star
            row["t_star"] = t_star
            row["gap"] = round(t_star - frac, 6)
        except ExactLimitError:
            pass
        rows.append(row)
    _write(_dump(rows), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coalman", description="Coalitional manipulation of positional scoring rules.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log cutting-plane progress")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a random instance (Borda, uniform ballots)")
    g.add_argument("--n", type=int, required=True, help="non-manipulator ballots")
    g.add_argument("--m", type=int, required=True, help="non-preferred candidates")
    g.add_argument("--k", type=int, required=True, help="manipulators")
    g.add_argument("--mode", choices=("ucm", "wcm"), default="ucm")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="configuration LP + rounding on an instance file")
    s.add_argument("instance")
    s.add_argument("--mode", choices=("ucm", "wcm"), default="ucm")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--repeats", type=int, default=None, help="rounding repeats (default m)")
    s.add_argument("--d", type=float, default=1.0, help="constant in beta = d*sqrt(m ln m)")
    s.add_argument("--tol", type=float, default=EPS_LP, help="LP feasibility tolerance")
    s.add_argument("--max-columns", type=int, default=None, help="column cap per candidate")
    s.add_argument("--natural-lp", action="store_true", help="also report the natural LP optimum")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser(
        "compare",
        help="comparison grid",
        description="Columns: " + ",".join(CSV_COLUMNS)
        + f" (with --timings also {','.join(TIMING_COLUMNS)}). Scores are integers, "
        "times use 6 decimals, absent values are empty.",
    )
    c.add_argument("--mode", choices=("ucm", "wcm"), default="ucm")
    c.add_argument("--m", type=int, nargs="+", default=[9, 16, 25, 36])
    c.add_argument("--k", type=int, nargs="+", default=None, help="default floor(sqrt(m))")
    c.add_argument("--n", type=int, default=None, help="default 2k")
    c.add_argument("--trials", type=int, default=20)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--repeats", type=int, default=None)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--no-exact", action="store_true", help="skip the exact oracle")
    c.add_argument("--timings", action="store_true", help="add wall-time columns")
    c.add_argument("--summary", help="write summary JSON here")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compare)

    lb = sub.add_parser("lowerbound", help="REVERSE vs the k=3, m=3t construction")
    lb.add_argument("--t", type=int, nargs="+", default=[1, 2, 3, 4])
    lb.add_argument("--seed", type=int, default=0)
    lb.add_argument("--repeats", type=int, default=None)
    lb.add_argument("-o", "--output")
    lb.set_defaults(func=cmd_lowerbound)

    gp = sub.add_parser("gap", help="natural LP vs integral optimum, sigma=0, k=1")
    gp.add_argument("--m", type=int, nargs="+", default=[5, 10])
    gp.add_argument("-o", "--output")
    gp.set_defaults(func=cmd_gap)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"coalman: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContractError as exc:
        print(f"coalman: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"coalman: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
