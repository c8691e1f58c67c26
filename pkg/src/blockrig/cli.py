"""Command-line experiment runner.

Every subcommand is a pure function of its arguments: all randomness
flows from an explicit seed, no timestamps are written, and rerunning
with the same configuration yields byte-identical artifacts.  Results go
to stdout and, with --out, to a CSV or JSON file that embeds the full
configuration and the tool version.  Report commands (census,
repeat-decay, tensor-k-bench) additionally render a figure next to the
delimited output when --plot is given.

Exact rational values are printed as reduced fractions with a 6-decimal
approximation beside them; the fraction is authoritative.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__, f2, formats, games, rigidity, tensork, tm
from .errors import BlockrigError, BudgetExceededError

__all__ = ["main", "run_command"]

BUDGET_ENV = "BLOCKRIG_BUDGET"


def _default_budget(fallback: int) -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else fallback


def _frac(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def _approx(v) -> str:
    return "" if v is None else f"{float(v):.6f}"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return _frac(v)
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _config_dict(args: argparse.Namespace) -> Dict:
    skip = {"func", "columns", "out", "plot"}
    return {
        k: _frac(v) if isinstance(v, Fraction) else v
        for k, v in sorted(vars(args).items())
        if k not in skip and v is not None
    }


def _emit(
    args: argparse.Namespace,
    rows: Sequence[Dict],
    stdout_lines: Sequence[str],
) -> None:
    """Print the result lines, then write the artifact file if requested."""
    for line in stdout_lines:
        print(line)
    out = getattr(args, "out", None)
    if not out:
        return
    config = _config_dict(args)
    columns = args.columns
    if getattr(args, "format", "csv") == "json":
        doc = {
            "tool": "blockrig",
            "version": __version__,
            "config": config,
            "columns": list(columns),
            "rows": [{c: _cell(row.get(c)) for c in columns} for row in rows],
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        lines = [
            f"# blockrig {__version__}",
            f"# config {json.dumps(config, sort_keys=True)}",
            ",".join(columns),
        ]
        for row in rows:
            lines.append(",".join(_cell(row.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    with open(out, "w", encoding="ascii") as fh:
        fh.write(text)


def _parse_fraction(s: str) -> Fraction:
    return Fraction(s)


def _parse_sets(specs: Sequence[str]) -> List[Tuple[int, ...]]:
    """Each set is comma-separated indices, e.g. ``0,1 1,2 2,0``."""
    return [tuple(int(tok) for tok in spec.split(",")) for spec in specs]


def _parse_int_list(s: str) -> List[int]:
    return [int(tok) for tok in s.split(",")]


# --- subcommand handlers ---


def _cmd_rank(args) -> int:
    with open(args.matrix, "r", encoding="ascii") as fh:
        m = f2.parse_matrix(fh.read())
    r = f2.rank(m)
    args.columns = ("rows", "cols", "rank")
    _emit(args, [{"rows": m.rows, "cols": m.cols, "rank": r}], [f"rank {r}"])
    return 0


def _cmd_rigid_matrix(args) -> int:
    with open(args.matrix, "r", encoding="ascii") as fh:
        a = f2.parse_matrix(fh.read())
    budget = args.budget or _default_budget(rigidity.DEFAULT_MATRIX_BUDGET)
    if args.block_n:
        layout = f2.BlockLayout(n=args.block_n, k=a.rows // args.block_n)
        res = rigidity.is_block_rigid_matrix(a, layout, args.r, args.s, budget=budget)
    else:
        res = rigidity.is_matrix_rigid(a, args.r, args.s, budget=budget)
    row = {
        "rigid": res.rigid,
        "r": args.r,
        "s": args.s,
        "candidates": res.candidates,
        "witness_b": f2.serialize(res.witness.b) if res.witness else None,
        "witness_c": f2.serialize(res.witness.c) if res.witness else None,
    }
    args.columns = ("rigid", "r", "s", "candidates", "witness_b", "witness_c")
    verdict = "rigid" if res.rigid else "NOT rigid"
    lines = [f"{verdict} (r={args.r}, s={args.s}; {res.candidates} candidates tried)"]
    if res.witness:
        lines.append(f"witness B rows: {f2.serialize(res.witness.b)}")
        lines.append(f"witness C rows: {f2.serialize(res.witness.c)}")
    _emit(args, [row], lines)
    return 0


def _cmd_rigid_function(args) -> int:
    f = formats.load_truth_table(args.table)
    budget = args.budget or _default_budget(rigidity.DEFAULT_FUNCTION_BUDGET)
    if args.block_n:
        res = rigidity.is_block_rigid_function(
            f, args.block_n, args.r, args.s, budget=budget
        )
    else:
        res = rigidity.is_function_rigid(f, args.r, args.s, budget=budget)
    cert = json.dumps(res.certificate.to_json(), sort_keys=True) if res.certificate else None
    row = {
        "rigid": res.rigid,
        "r": _cell(args.r),
        "s": args.s,
        "worst_views": ";".join(",".join(map(str, v)) for v in res.worst_views.sets),
        "worst_value": res.worst_value,
        "worst_value_approx": float(res.worst_value),
        "certificate": cert,
    }
    args.columns = (
        "rigid", "r", "s", "worst_views", "worst_value", "worst_value_approx",
        "certificate",
    )
    verdict = "rigid" if res.rigid else "NOT rigid"
    lines = [
        f"{verdict} (r={args.r}, s={args.s})",
        f"worst family {row['worst_views']} "
        f"value {_frac(res.worst_value)} ({_approx(res.worst_value)})",
    ]
    _emit(args, [row], lines)
    return 0


def _cmd_census(args) -> int:
    budget = args.budget or _default_budget(rigidity.DEFAULT_FUNCTION_BUDGET)
    res = rigidity.rigidity_census(
        args.k, args.r, args.s, mode=args.mode, count=args.count,
        seed=args.seed, budget=budget,
    )
    rows = [
        {"index": i, "worst_value": v, "worst_value_approx": float(v)}
        for i, v in enumerate(res.values)
    ]
    args.columns = ("index", "worst_value", "worst_value_approx")
    frac = res.rigid_fraction
    lines = [
        f"{res.rigid_count} of {res.total} functions rigid "
        f"({_frac(frac)} = {_approx(frac)}) [mode={res.mode}]"
    ]
    _emit(args, rows, lines)
    if args.plot:
        from . import plots

        plots.plot_census_histogram(
            [float(v) for v in res.values], res.rigid_count, res.total, args.plot,
            title=f"census k={args.k} r={args.r} s={args.s}",
        )
        print(f"figure written to {args.plot}")
    return 0


def _cmd_game_value(args) -> int:
    game = formats.load_game(args.game)
    budget_ex = args.budget or _default_budget(games.DEFAULT_EXHAUSTIVE_BUDGET)
    budget_bb = args.budget or _default_budget(games.DEFAULT_BNB_BUDGET)
    if args.method == "exhaustive":
        report = games.value_exhaustive(game, budget_ex)
    elif args.method == "bnb":
        report = games.value_branch_and_bound(game, budget_bb)
    else:
        report = games.value_exact(game, budget_ex, budget_bb)
    row = {
        "value": report.value,
        "value_approx": float(report.value),
        "method": report.method,
        "nodes": report.nodes,
        "prunes": report.prunes,
    }
    args.columns = ("value", "value_approx", "method", "nodes", "prunes")
    _emit(args, [row], [_frac(report.value)])
    return 0


def _cmd_repeat_decay(args) -> int:
    game = formats.load_game(args.game)
    budget_ex = args.budget or _default_budget(games.DEFAULT_EXHAUSTIVE_BUDGET)
    budget_bb = args.budget or _default_budget(games.DEFAULT_BNB_BUDGET)
    rows = games.repetition_decay_experiment(game, args.n_max, budget_ex, budget_bb)
    out_rows = []
    lines = []
    for row in rows:
        out_rows.append(
            {
                "n": row["n"],
                "lower": row["lower"],
                "lower_approx": float(row["lower"]),
                "exact": row["exact"],
                "exact_approx": None if row["exact"] is None else float(row["exact"]),
                "upper": row["upper"],
                "upper_approx": float(row["upper"]),
                "exponent_exact": row["exponent_exact"],
                "exponent_upper": row["exponent_upper"],
            }
        )
        exact = "-" if row["exact"] is None else _frac(row["exact"])
        lines.append(
            f"n={row['n']} lower {_frac(row['lower'])} exact {exact} "
            f"upper {_frac(row['upper'])}"
        )
    args.columns = (
        "n", "lower", "lower_approx", "exact", "exact_approx",
        "upper", "upper_approx", "exponent_exact", "exponent_upper",
    )
    _emit(args, out_rows, lines)
    if args.plot:
        from . import plots

        plots.plot_repeat_decay(rows, args.plot, title="repeated value decay")
        print(f"figure written to {args.plot}")
    return 0


def _report_game(args, game: games.IndependentGame) -> int:
    budget_ex = args.budget or _default_budget(games.DEFAULT_EXHAUSTIVE_BUDGET)
    budget_bb = args.budget or _default_budget(games.DEFAULT_BNB_BUDGET)
    if args.repeat > 1:
        game = games.repeat(game, args.repeat)
    try:
        report = games.value_exact(game, budget_ex, budget_bb)
        value, method = report.value, report.method
    except BudgetExceededError as exc:
        # marginals stay cheap; report them with the value left blank
        value, method = None, f"over budget ({exc.size} table bits)"
    marginals = [
        games.player_marginal_value(game, j) for j in range(game.players)
    ]
    row = {
        "repeat": args.repeat,
        "value": value,
        "value_approx": None if value is None else float(value),
        "marginals": ";".join(_frac(m) for m in marginals),
        "method": method,
    }
    args.columns = ("repeat", "value", "value_approx", "marginals", "method")
    if value is None:
        lines = [f"value not computed: {method}"]
    else:
        lines = [f"value {_frac(value)} ({_approx(value)})"]
    for j, m in enumerate(marginals):
        lines.append(f"marginal player {j}: {_frac(m)} ({_approx(m)})")
    _emit(args, [row], lines)
    return 0


def _cmd_transpose_game(args) -> int:
    game = games.build_transpose_game(args.n, _parse_sets(args.sets))
    return _report_game(args, game)


def _cmd_product_game(args) -> int:
    game = games.build_product_game(
        args.n, _parse_sets(args.s_sets), _parse_sets(args.t_sets)
    )
    return _report_game(args, game)


def _read_word(inline: Optional[str], path: Optional[str]) -> str:
    if path:
        with open(path, "r", encoding="ascii") as fh:
            return fh.read().strip()
    return inline or ""


def _cmd_tm_run(args) -> int:
    with open(args.machine, "r", encoding="ascii") as fh:
        machine = formats.parse_machine(fh.read())
    input_str = _read_word(args.input, args.input_file)
    advice_str = _read_word(args.advice, args.advice_file)
    trace = tm.run(machine, input_str, advice_str, step_limit=args.step_limit)
    row = {
        "steps": trace.steps,
        "halted": trace.halted,
        "output": trace.output,
        "b": args.b,
        "segments": None,
        "block_respecting": None,
        "first_violation": None,
    }
    lines = [f"steps {trace.steps} halted {str(trace.halted).lower()}"]
    lines.append(f"output {trace.output}" if trace.output else "output (empty)")
    st = None
    if args.b:
        st = tm.segment(trace, args.b)
        ok, violation = tm.is_block_respecting(st)
        row["segments"] = st.a
        row["block_respecting"] = ok
        row["first_violation"] = violation
        lines.append(
            f"b={args.b}: {st.a} segments, block-respecting {str(ok).lower()}"
            + ("" if ok else f" (first violation at step {violation})")
        )
    args.columns = (
        "steps", "halted", "output", "b", "segments",
        "block_respecting", "first_violation",
    )
    _emit(args, [row], lines)
    if args.trace_out:
        doc = formats.trace_to_json(trace, segmented=st, stride=args.trace_stride)
        with open(args.trace_out, "w", encoding="ascii") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"trace written to {args.trace_out}")
    return 0


def _cmd_tm_graph(args) -> int:
    with open(args.machine, "r", encoding="ascii") as fh:
        machine = formats.parse_machine(fh.read())
    input_str = _read_word(args.input, args.input_file)
    advice_str = _read_word(args.advice, args.advice_file)
    trace = tm.run(machine, input_str, advice_str, step_limit=args.step_limit)
    st = tm.segment(trace, args.b)
    graph = tm.computation_graph(st)
    max_pred, mean_pred = tm.predecessor_profile(graph)
    lines = [
        f"a {graph.a} edges {len(graph.edges)}",
        f"predecessors max {max_pred} mean {_frac(mean_pred)} ({_approx(mean_pred)})",
    ]
    sep_str = None
    if args.separator_budget:
        j_set, (sep_max, sep_mean) = tm.greedy_separator(graph, args.separator_budget)
        sep_str = ",".join(map(str, j_set))
        lines.append(
            f"separator J {sep_str} -> max {sep_max} mean "
            f"{_frac(sep_mean)} ({_approx(sep_mean)})"
        )
    rows = [
        {"src": i, "dst": j, "a": graph.a, "max_pred": max_pred,
         "mean_pred": mean_pred, "separator": sep_str}
        for i, j in sorted(graph.edges)
    ]
    args.columns = ("src", "dst", "a", "max_pred", "mean_pred", "separator")
    _emit(args, rows, lines)
    return 0


def _cmd_tensor_k_bench(args) -> int:
    machine = tensork.gen_tensor_k_machine(args.k)
    rng = random.Random(args.seed)
    rows = []
    lines = []
    c_k = tensork.step_bound_constant(args.k)
    for n in args.n:
        steps_max = 0
        for _ in range(args.trials):
            f = rigidity.random_function(rng, args.k)
            x = "".join(rng.choice("01") for _ in range(n * args.k))
            trace = tm.run(
                machine,
                tensork.encode_tensor_input(f, x, n),
                step_limit=args.step_limit,
            )
            expected = tensork.tensor_k_reference(f, x, n)
            if trace.output != expected:
                print(f"MISMATCH at k={args.k} n={n}", file=sys.stderr)
                return 1
            steps_max = max(steps_max, trace.steps)
        bound = tensork.machine_step_bound(args.k, n)
        rows.append(
            {
                "k": args.k,
                "n": n,
                "trials": args.trials,
                "steps": steps_max,
                "steps_per_n": steps_max / n,
                "step_bound": bound,
                "c_k": c_k,
                "within_bound": steps_max <= bound,
            }
        )
        lines.append(
            f"k={args.k} n={n} steps {steps_max} "
            f"({steps_max / n:.6f}/row, bound {bound})"
        )
    args.columns = (
        "k", "n", "trials", "steps", "steps_per_n", "step_bound", "c_k",
        "within_bound",
    )
    _emit(args, rows, lines)
    if args.plot:
        from . import plots

        plots.plot_tensor_k_bench(rows, args.plot, title=f"tensor_k bench k={args.k}")
        print(f"figure written to {args.plot}")
    return 0


# --- parser ---


def _add_artifact_args(p: argparse.ArgumentParser, plot: bool = False) -> None:
    p.add_argument("--out", help="artifact file path (CSV or JSON)")
    p.add_argument(
        "--format", choices=("csv", "json"), default="csv",
        help="artifact format (default csv)",
    )
    if plot:
        p.add_argument("--plot", help="also render a PNG figure to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockrig",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"blockrig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "rank", help="GF(2) rank of a matrix file",
        epilog="CSV columns: rows, cols, rank.",
    )
    p.add_argument("--matrix", required=True, help="matrix file (header + 0/1 rows)")
    _add_artifact_args(p)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser(
        "rigid-matrix", help="exact (r, s) matrix rigidity verdict",
        epilog=(
            "CSV columns: rigid, r, s, candidates (corrections tried), "
            "witness_b / witness_c (row-major serializations, empty when rigid)."
        ),
    )
    p.add_argument("--matrix", required=True)
    p.add_argument("--r", type=int, required=True, help="rank bound")
    p.add_argument("--s", type=int, required=True, help="ones per row of C")
    p.add_argument("--block-n", type=int, help="block length for block rigidity")
    p.add_argument("--budget", type=int, help=f"candidate budget (or ${BUDGET_ENV})")
    _add_artifact_args(p)
    p.set_defaults(func=_cmd_rigid_matrix)

    p = sub.add_parser(
        "rigid-function", help="exact (r, s) function rigidity via game values",
        epilog=(
            "CSV columns: rigid, r, s, worst_views (semicolon-joined sets), "
            "worst_value (fraction), worst_value_approx, certificate (JSON, "
            "empty when rigid)."
        ),
    )
    p.add_argument("--table", required=True, help="truth-table file")
    p.add_argument("--r", type=_parse_fraction, required=True, help="rational threshold exponent")
    p.add_argument("--s", type=int, required=True, help="view size")
    p.add_argument("--block-n", type=int, help="block length; verdict on the lift")
    p.add_argument("--budget", type=int, help=f"search budget (or ${BUDGET_ENV})")
    _add_artifact_args(p)
    p.set_defaults(func=_cmd_rigid_function)

    p = sub.add_parser(
        "census", help="fraction of k-bit functions that are (r, s)-rigid",
        epilog=(
            "CSV columns: index (enumeration or draw order), worst_value "
            "(fraction), worst_value_approx."
        ),
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=_parse_fraction, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    p.add_argument("--count", type=int, default=0, help="sample size (sample mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, help=f"search budget (or ${BUDGET_ENV})")
    _add_artifact_args(p, plot=True)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser(
        "game-value", help="exact value of a game file",
        epilog="CSV columns: value (fraction), value_approx, method, nodes, prunes.",
    )
    p.add_argument("--game", required=True, help="game JSON file")
    p.add_argument("--method", choices=("auto", "exhaustive", "bnb"), default="auto")
    p.add_argument("--budget", type=int, help=f"table-bit budget (or ${BUDGET_ENV})")
    _add_artifact_args(p)
    p.set_defaults(func=_cmd_game_value)

    p = sub.add_parser(
        "repeat-decay", help="repeated-value decay table for a game file",
        epilog=(
            "CSV columns: n, lower / exact / upper (fractions; exact empty "
            "when over budget) with *_approx, exponent_exact, exponent_upper."
        ),
    )
    p.add_argument("--game", required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--budget", type=int, help=f"table-bit budget (or ${BUDGET_ENV})")
    _add_artifact_args(p, plot=True)
    p.set_defaults(func=_cmd_repeat_decay)

    p = sub.add_parser(
        "transpose-game", help="value and marginals of a transpose game",
        epilog=(
            "Sets are comma-joined row indices, one argument per player. "
            "CSV columns: repeat, value, value_approx, marginals "
            "(semicolon-joined fractions), method."
        ),
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sets", nargs="+", required=True)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--budget", type=int, help=f"table-bit budget (or ${BUDGET_ENV})")
    _add_artifact_args(p)
    p.set_defaults(func=_cmd_transpose_game)

    p = sub.add_parser(
        "product-game", help="value and marginals of a matrix-product game",
        epilog=(
            "CSV columns: repeat, value, value_approx, marginals "
            "(semicolon-joined fractions), method."
        ),
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s-sets", nargs="+", required=True)
    p.add_argument("--t-sets", nargs="+", required=True)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--budget", type=int, help=f"table-bit budget (or ${BUDGET_ENV})")
    _add_artifact_args(p)
    p.set_defaults(func=_cmd_product_game)

    p = sub.add_parser(
        "tm-run", help="run a machine file on an input word",
        epilog=(
            "CSV columns: steps, halted, output, b, segments, "
            "block_respecting, first_violation (the last four empty "
            "without --b)."
        ),
    )
    p.add_argument("--machine", required=True)
    p.add_argument("--input", help="input word")
    p.add_argument("--input-file", help="file holding the input word")
    p.add_argument("--advice", help="advice word")
    p.add_argument("--advice-file", help="file holding the advice word")
    p.add_argument("--step-limit", type=int, default=tm.DEFAULT_STEP_LIMIT)
    p.add_argument("--b", type=int, help="segment length for block analysis")
    p.add_argument("--trace-out", help="write the full trace as JSON here")
    p.add_argument("--trace-stride", type=int, default=1, help="position downsampling")
    _add_artifact_args(p)
    p.set_defaults(func=_cmd_tm_run)

    p = sub.add_parser(
        "tm-graph", help="computation graph of a segmented run",
        epilog=(
            "CSV columns: src, dst (one edge per row), a, max_pred, "
            "mean_pred, separator (comma-joined removal order, empty "
            "without --separator-budget)."
        ),
    )
    p.add_argument("--machine", required=True)
    p.add_argument("--input", help="input word")
    p.add_argument("--input-file", help="file holding the input word")
    p.add_argument("--advice", help="advice word")
    p.add_argument("--advice-file", help="file holding the advice word")
    p.add_argument("--step-limit", type=int, default=tm.DEFAULT_STEP_LIMIT)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--separator-budget", type=int, help="greedy separator size")
    _add_artifact_args(p)
    p.set_defaults(func=_cmd_tm_graph)

    p = sub.add_parser(
        "tensor-k-bench", help="benchmark the generated tensor machine",
        epilog=(
            "CSV columns: k, n, trials, steps (max over trials), "
            "steps_per_n, step_bound, c_k, within_bound."
        ),
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=_parse_int_list, required=True, help="comma list, e.g. 4,8,16,32")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-limit", type=int, default=tm.DEFAULT_STEP_LIMIT)
    _add_artifact_args(p, plot=True)
    p.set_defaults(func=_cmd_tensor_k_bench)

    return parser


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (BlockrigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command())
