"""On-disk formats: truth tables, machine programs, game descriptions,
trace exports.

Truth-table file: line 1 is the arity k, line 2 holds 2^k whitespace
separated k-bit binary strings in ascending input-index order; within
each string, coordinate 1 comes first (LSB-first, as everywhere in the
package).

Machine file: a header (work_tapes / alphabet / blank / start / halt),
then one rule per line:

    state reads -> next_state writes moves [emit SYM]

where reads is a string of one symbol per readable tape (input, advice,
work tapes; '*' matches anything), writes one symbol per work tape ('*'
keeps the cell), and moves is a string over L/S/R per readable tape.

Game file: JSON with "t", "views" (0-based bit index lists), and either
explicit per-player "targets"/"answer_lens" or a "kind" of gs / transpose
/ product with its parameters.
"""

from __future__ import annotations

import json
from typing import List, Tuple

from . import games
from .errors import DimensionError
from .rigidity import BooleanFunction
from .tm import MachineSpec, Rule, RunTrace, SegmentedTrace

__all__ = [
    "parse_truth_table",
    "format_truth_table",
    "load_truth_table",
    "parse_machine",
    "format_machine",
    "load_game",
    "game_from_json",
    "game_to_json",
    "trace_to_json",
]

_MOVES = {"L": -1, "S": 0, "R": 1}
_MOVE_CHARS = {v: k for k, v in _MOVES.items()}


def parse_truth_table(text: str) -> BooleanFunction:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ValueError("truth-table file needs an arity line and an entry line")
    k = int(lines[0].strip())
    words = " ".join(lines[1:]).split()
    if len(words) != 1 << k:
        raise DimensionError(f"expected {1 << k} entries, got {len(words)}")
    table = []
    for wstr in words:
        if len(wstr) != k or any(ch not in "01" for ch in wstr):
            raise ValueError(f"bad table entry {wstr!r}")
        table.append(sum(int(ch) << i for i, ch in enumerate(wstr)))
    return BooleanFunction(k, tuple(table))


def format_truth_table(f: BooleanFunction) -> str:
    entries = " ".join(
        "".join(str((v >> i) & 1) for i in range(f.k)) for v in f.table
    )
    return f"{f.k}\n{entries}\n"


def load_truth_table(path: str) -> BooleanFunction:
    with open(path, "r", encoding="ascii") as fh:
        return parse_truth_table(fh.read())


def parse_machine(text: str) -> MachineSpec:
    header = {}
    rules: List[Rule] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            rules.append(_parse_rule(line, int(header["work_tapes"])))
        else:
            key, _, value = line.partition(" ")
            header[key] = value.strip()
    for key in ("work_tapes", "alphabet", "blank", "start", "halt"):
        if key not in header:
            raise ValueError(f"machine header missing {key!r}")
    return MachineSpec(
        work_tapes=int(header["work_tapes"]),
        alphabet=tuple(header["alphabet"]),
        blank=header["blank"],
        start=header["start"],
        halt=header["halt"],
        rules=tuple(rules),
    )


def _parse_rule(line: str, work_tapes: int) -> Rule:
    left, _, right = line.partition("->")
    lparts = left.split()
    rparts = right.split()
    if len(lparts) != 2:
        raise ValueError(f"bad rule left-hand side: {line!r}")
    state, reads = lparts
    if len(rparts) < 3:
        raise ValueError(f"bad rule right-hand side: {line!r}")
    next_state, writes, moves = rparts[0], rparts[1], rparts[2]
    emit = None
    if len(rparts) > 3:
        if len(rparts) != 5 or rparts[3] != "emit":
            raise ValueError(f"bad emit clause: {line!r}")
        emit = rparts[4]
    n_read = 2 + work_tapes
    if len(reads) != n_read or len(moves) != n_read or len(writes) != work_tapes:
        raise ValueError(f"rule arity does not match work_tapes: {line!r}")
    return Rule(
        state=state,
        reads=tuple(reads),
        next_state=next_state,
        writes=tuple(writes),
        moves=tuple(_MOVES[c] for c in moves),
        emit=emit,
    )


def format_machine(machine: MachineSpec) -> str:
    lines = [
        f"work_tapes {machine.work_tapes}",
        f"alphabet {''.join(machine.alphabet)}",
        f"blank {machine.blank}",
        f"start {machine.start}",
        f"halt {machine.halt}",
    ]
    for rule in machine.rules:
        moves = "".join(_MOVE_CHARS[m] for m in rule.moves)
        line = (
            f"{rule.state} {''.join(rule.reads)} -> "
            f"{rule.next_state} {''.join(rule.writes)} {moves}"
        )
        if rule.emit is not None:
            line += f" emit {rule.emit}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def game_from_json(obj: dict, base_dir: str = ".") -> games.IndependentGame:
    kind = obj.get("kind", "explicit")
    if kind == "gs":
        import os

        f = load_truth_table(os.path.join(base_dir, obj["truth_table"]))
        return games.build_gs(f, [tuple(s) for s in obj["views"]])
    if kind == "transpose":
        return games.build_transpose_game(obj["n"], [tuple(s) for s in obj["sets"]])
    if kind == "product":
        return games.build_product_game(
            obj["n"],
            [tuple(s) for s in obj["s_sets"]],
            [tuple(s) for s in obj["t_sets"]],
        )
    if kind == "explicit":
        return games.IndependentGame(
            t=obj["t"],
            views=tuple(tuple(v) for v in obj["views"]),
            answer_lens=tuple(obj["answer_lens"]),
            targets=tuple(tuple(t) for t in obj["targets"]),
        )
    raise ValueError(f"unknown game kind {kind!r}")


def game_to_json(game: games.IndependentGame) -> dict:
    return {
        "kind": "explicit",
        "t": game.t,
        "views": [list(v) for v in game.views],
        "answer_lens": list(game.answer_lens),
        "targets": [list(t) for t in game.targets],
    }


def load_game(path: str) -> games.IndependentGame:
    import os

    with open(path, "r", encoding="ascii") as fh:
        obj = json.load(fh)
    return game_from_json(obj, base_dir=os.path.dirname(path) or ".")


def trace_to_json(
    trace: RunTrace,
    segmented: SegmentedTrace | None = None,
    stride: int = 1,
) -> dict:
    """JSON export of a run; positions optionally downsampled by stride."""
    obj = {
        "steps": trace.steps,
        "halted": trace.halted,
        "output": trace.output,
        "position_stride": stride,
        "positions": [list(p) for p in trace.positions[::stride]],
    }
    if segmented is not None:
        obj["b"] = segmented.b
        obj["a"] = segmented.a
        obj["visited_blocks"] = [
            [sorted(blocks) for blocks in per_segment]
            for per_segment in segmented.visited
        ]
        obj["end_states"] = list(segmented.end_states)
    return obj
