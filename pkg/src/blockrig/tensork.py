"""The tensor-evaluation problem: encoding, reference evaluator, and a
generated multi-tape machine solving it in O(n * k * 2^k) steps.

An instance is a truth table followed by a block-major input vector; the
expected output applies the table to each of the n rows in place.  The
generated machine has k hardwired and uses k + 2 work tapes: one holds the
copied truth table, one a unary row counter, and one per block for
deinterleaving; the same per-block tapes receive the output bits in place
and are flushed block-major to the output tape at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .errors import DimensionError
from .rigidity import BooleanFunction, tensor_lift
from .tm import WILDCARD, MachineSpec, Rule

__all__ = [
    "encode_tensor_input",
    "decode_tensor_input",
    "tensor_k_reference",
    "gen_tensor_k_machine",
    "machine_step_bound",
    "step_bound_constant",
    "encoded_length",
    "MAX_MACHINE_K",
]

MAX_MACHINE_K = 4

def encoded_length(k: int, n: int) -> int:
    return (1 << k) * k + n * k


def step_bound_constant(k: int) -> int:
    """Per-k constant C_k with steps <= C_k * n * k * 2^k for all n >= 1.

    Phase-by-phase accounting of the generated machine: table copy and
    rewinds cost at most 4L + 4k + 13 steps (L = k*2^k), the per-row work
    at most 2L + 7k + 5 steps; dividing the fixed part by n >= 1 gives
    the constant below.  Deliberately generous, never assumed tight.
    """
    big_l = k * (1 << k)
    return 6 + -(-(11 * k + 18) // big_l)


def encode_tensor_input(f: BooleanFunction, x: str, n: int) -> str:
    """Truth table first (entries in ascending input index, each entry
    LSB-first), then the block-major input bits."""
    if len(x) != n * f.k:
        raise DimensionError(f"input needs {n * f.k} bits, got {len(x)}")
    if any(ch not in "01" for ch in x):
        raise ValueError("input must be an ASCII 0/1 string")
    table_part = "".join(
        "".join(str((entry >> j) & 1) for j in range(f.k)) for entry in f.table
    )
    return table_part + x


def decode_tensor_input(encoded: str, k: int) -> Tuple[BooleanFunction, str, int]:
    table_len = (1 << k) * k
    if len(encoded) < table_len or (len(encoded) - table_len) % k:
        raise DimensionError("encoded length does not fit the arity")
    table = tuple(
        sum(int(encoded[v * k + j]) << j for j in range(k)) for v in range(1 << k)
    )
    x = encoded[table_len:]
    return BooleanFunction(k, table), x, len(x) // k


def tensor_k_reference(f: BooleanFunction, x: str, n: int) -> str:
    """Direct oracle: delegate to the tensor-lift evaluator."""
    if len(x) != n * f.k:
        raise DimensionError(f"input needs {n * f.k} bits, got {len(x)}")
    packed = sum(1 << i for i, ch in enumerate(x) if ch == "1")
    y = tensor_lift(f, n)(packed)
    return "".join(str((y >> i) & 1) for i in range(n * f.k))


def machine_step_bound(k: int, n: int) -> int:
    """Generator-reported step bound for the machine below."""
    return step_bound_constant(k) * n * k * (1 << k)


def gen_tensor_k_machine(k: int) -> MachineSpec:
    """Machine that reads an encoded instance and writes the tensor-lifted
    output, for the hardwired arity k and any row count n >= 1.

    Work tapes: 0 = truth table, 1 = unary row counter, 2+j = block j.
    Phases: copy the table; count n; deinterleave the blocks; per row,
    look the row value up in the table and write the output bits back onto
    the block tapes in place; finally flush the block tapes block-major.
    """
    if not 1 <= k <= MAX_MACHINE_K:
        raise DimensionError(f"k must be between 1 and {MAX_MACHINE_K}")
    w = k + 2
    n_read = 2 + w
    table_len = (1 << k) * k
    tape_t = 0
    tape_c = 1

    def blk(j: int) -> int:
        return 2 + j

    rules: List[Rule] = []

    def rule(state, next_state, reads=None, writes=None, moves=None, emit=None):
        rd = [WILDCARD] * n_read
        for tape, sym in (reads or {}).items():
            rd[tape] = sym
        wr = [WILDCARD] * w
        for tape, sym in (writes or {}).items():
            wr[tape] = sym
        mv = [0] * n_read
        for tape, m in (moves or {}).items():
            mv[tape] = m
        rules.append(
            Rule(
                state=state,
                reads=tuple(rd),
                next_state=next_state,
                writes=tuple(wr),
                moves=tuple(mv),
                emit=emit,
            )
        )

    # Readable-tape indices: 0 = input, 1 = advice, 2 + i = work tape i.
    def rt(work_tape: int) -> int:
        return 2 + work_tape

    # Phase A: copy the truth table to tape T, counting with states.
    for c in range(table_len):
        nxt = f"copy_{c + 1}" if c + 1 < table_len else "rewt0"
        for sym in "01":
            rule(
                f"copy_{c}",
                nxt,
                reads={0: sym},
                writes={tape_t: sym},
                moves={0: 1, rt(tape_t): 1},
            )
    rule("rewt0", "rewt", moves={rt(tape_t): -1})
    for sym in "01":
        rule("rewt", "rewt", reads={rt(tape_t): sym}, moves={rt(tape_t): -1})
    rule("rewt", "cnt_0", reads={rt(tape_t): "_"}, moves={rt(tape_t): 1})

    # Phase B: one counter mark per k input cells; then rewind the input
    # to the start of the vector part and the counter to its start.
    for c in range(k):
        nxt = f"cnt_{(c + 1) % k}"
        if c == k - 1:
            for sym in "01":
                rule(
                    f"cnt_{c}",
                    nxt,
                    reads={0: sym},
                    writes={tape_c: "1"},
                    moves={0: 1, rt(tape_c): 1},
                )
        else:
            for sym in "01":
                rule(f"cnt_{c}", nxt, reads={0: sym}, moves={0: 1})
    rule("cnt_0", "rewi", reads={0: "_"}, moves={0: -1})
    for sym in "01":
        rule("rewi", "rewi", reads={0: sym}, moves={0: -1})
    rule("rewi", "fwdi_0", reads={0: "_"}, moves={0: 1})
    for c in range(table_len):
        nxt = f"fwdi_{c + 1}" if c + 1 < table_len else "rewc0"
        rule(f"fwdi_{c}", nxt, moves={0: 1})
    rule("rewc0", "rewc", moves={rt(tape_c): -1})
    rule("rewc", "rewc", reads={rt(tape_c): "1"}, moves={rt(tape_c): -1})
    rule("rewc", "dei_0", reads={rt(tape_c): "_"}, moves={rt(tape_c): 1})

    # Phase C: deinterleave block j onto its tape, n cells per block,
    # metered by the counter; rewind block tape and counter together.
    for j in range(k):
        for sym in "01":
            rule(
                f"dei_{j}",
                f"dei_{j}",
                reads={rt(tape_c): "1", 0: sym},
                writes={blk(j): sym},
                moves={0: 1, rt(blk(j)): 1, rt(tape_c): 1},
            )
        rule(
            f"dei_{j}",
            f"deirl_{j}",
            reads={rt(tape_c): "_"},
            moves={rt(blk(j)): -1, rt(tape_c): -1},
        )
        after = f"dei_{j + 1}" if j + 1 < k else "row"
        for sym in "01":
            rule(
                f"deirl_{j}",
                f"deirl_{j}",
                reads={rt(blk(j)): sym},
                moves={rt(blk(j)): -1, rt(tape_c): -1},
            )
        rule(
            f"deirl_{j}",
            after,
            reads={rt(blk(j)): "_"},
            moves={rt(blk(j)): 1, rt(tape_c): 1},
        )

    # Phase D: per row, read all block bits at once, seek the table entry,
    # read f(v), write the output bits back in place, advance.
    rule("row", "outrw0", reads={rt(blk(0)): "_"})
    for v in range(1 << k):
        reads = {rt(blk(j)): str((v >> j) & 1) for j in range(k)}
        target = f"seek_{v * k}" if v else "read_0_0"
        rule("row", target, reads=reads)
    for r in range(1, (1 << k) * k):
        nxt = f"seek_{r - 1}" if r > 1 else "read_0_0"
        rule(f"seek_{r}", nxt, moves={rt(tape_t): 1})
    for idx in range(k):
        for bits in range(1 << idx):
            for sym in "01":
                y = bits | (int(sym) << idx)
                if idx + 1 < k:
                    nxt = f"read_{y}_{idx + 1}"
                else:
                    nxt = f"trew0_{y}"
                rule(
                    f"read_{bits}_{idx}",
                    nxt,
                    reads={rt(tape_t): sym},
                    moves={rt(tape_t): 1},
                )
    for y in range(1 << k):
        rule(f"trew0_{y}", f"trew_{y}", moves={rt(tape_t): -1})
        for sym in "01":
            rule(f"trew_{y}", f"trew_{y}", reads={rt(tape_t): sym}, moves={rt(tape_t): -1})
        rule(
            f"trew_{y}",
            "row",
            reads={rt(tape_t): "_"},
            writes={blk(j): str((y >> j) & 1) for j in range(k)},
            moves={rt(tape_t): 1, **{rt(blk(j)): 1 for j in range(k)}},
        )

    # Phase E: rewind the block tapes in lockstep, then flush them to the
    # output tape block-major.
    rule("outrw0", "outrwl", moves={rt(blk(j)): -1 for j in range(k)})
    for sym in "01":
        rule(
            "outrwl",
            "outrwl",
            reads={rt(blk(0)): sym},
            moves={rt(blk(j)): -1 for j in range(k)},
        )
    rule(
        "outrwl",
        "emit_0",
        reads={rt(blk(0)): "_"},
        moves={rt(blk(j)): 1 for j in range(k)},
    )
    for j in range(k):
        for sym in "01":
            rule(
                f"emit_{j}",
                f"emit_{j}",
                reads={rt(blk(j)): sym},
                moves={rt(blk(j)): 1},
                emit=sym,
            )
        after = f"emit_{j + 1}" if j + 1 < k else "done"
        rule(f"emit_{j}", after, reads={rt(blk(j)): "_"})

    return MachineSpec(
        work_tapes=w,
        alphabet=("0", "1", "_"),
        blank="_",
        start="copy_0",
        halt="done",
        rules=tuple(rules),
    )
