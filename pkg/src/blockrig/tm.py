"""Deterministic multi-tape Turing machine simulation and block-level
instrumentation.

Tape roster: one read-only input tape, one read-only advice tape, one
write-only one-way output tape, and w >= 1 work tapes.  Tapes are two-way
infinite with integer cell indices; input and advice are written starting
at cell 0.  Blocks of size b are the intervals [m*b, (m+1)*b).

Transitions are given as rules with optional '*' wildcards in read
patterns (match anything) and write positions (leave unchanged); the
first matching rule in declaration order applies, which keeps the machine
deterministic while avoiding enumeration of all symbol combinations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .errors import (
    DimensionError,
    MachineError,
    StepLimitExceededError,
    UndefinedTransitionError,
)

__all__ = [
    "Rule",
    "MachineSpec",
    "RunTrace",
    "SegmentedTrace",
    "ComputationGraph",
    "ComputationSummary",
    "run",
    "segment",
    "is_block_respecting",
    "computation_graph",
    "computation_graph_bruteforce",
    "predecessor_profile",
    "greedy_separator",
    "summary_extract",
    "log_star",
    "DEFAULT_STEP_LIMIT",
]

DEFAULT_STEP_LIMIT = 1_000_000

WILDCARD = "*"
_MOVE_CHARS = {-1: "L", 0: "S", 1: "R"}
_MOVE_VALUES = {v: k for k, v in _MOVE_CHARS.items()}


@dataclass(frozen=True)
class Rule:
    """One transition rule.

    ``reads``: one symbol or '*' per readable tape (input, advice, then
    work tapes).  ``writes``: one symbol or '*' per work tape.  ``moves``:
    -1/0/+1 per readable tape.  ``emit``: symbol appended to the output
    tape, or None.
    """

    state: str
    reads: Tuple[str, ...]
    next_state: str
    writes: Tuple[str, ...]
    moves: Tuple[int, ...]
    emit: Optional[str] = None

    def matches(self, symbols: Tuple[str, ...]) -> bool:
        return all(p == WILDCARD or p == s for p, s in zip(self.reads, symbols))


@dataclass(frozen=True)
class MachineSpec:
    """Program of a deterministic multi-tape machine."""

    work_tapes: int
    alphabet: Tuple[str, ...]
    blank: str
    start: str
    halt: str
    rules: Tuple[Rule, ...]

    def __post_init__(self):
        if self.work_tapes < 1:
            raise DimensionError("at least one work tape required")
        if self.blank not in self.alphabet:
            raise MachineError("blank symbol must be in the alphabet")
        n_read = 2 + self.work_tapes
        for rule in self.rules:
            if len(rule.reads) != n_read or len(rule.moves) != n_read:
                raise MachineError(f"rule for {rule.state!r} has wrong arity")
            if len(rule.writes) != self.work_tapes:
                raise MachineError(f"rule for {rule.state!r} has wrong write arity")
            if any(m not in (-1, 0, 1) for m in rule.moves):
                raise MachineError("moves must be -1, 0, or +1")

    @property
    def n_tapes(self) -> int:
        """input + advice + work tapes + output."""
        return 3 + self.work_tapes

    def states(self) -> Tuple[str, ...]:
        seen = {self.start, self.halt}
        for rule in self.rules:
            seen.add(rule.state)
            seen.add(rule.next_state)
        return tuple(sorted(seen))

    def rules_by_state(self) -> Dict[str, List[Rule]]:
        by: Dict[str, List[Rule]] = {}
        for rule in self.rules:
            by.setdefault(rule.state, []).append(rule)
        return by


@dataclass(frozen=True)
class RunTrace:
    """Instrumented run: per-step states and head positions.

    ``positions[t]`` holds the heads after t steps, in tape order input,
    advice, work_1..work_w, output (the output head equals the number of
    symbols emitted so far).  ``writes`` logs (step, work_tape_index,
    cell, symbol) for every work-tape write.
    """

    work_tapes: int
    steps: int
    states: Tuple[str, ...]
    positions: Tuple[Tuple[int, ...], ...]
    output: str
    halted: bool
    writes: Tuple[Tuple[int, int, int, str], ...]
    input_str: str
    advice_str: str
    blank: str

    @property
    def n_tapes(self) -> int:
        return 3 + self.work_tapes


def run(
    machine: MachineSpec,
    input_str: str,
    advice_str: str = "",
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> RunTrace:
    """Deterministic run; identical arguments give identical traces."""
    for s in input_str + advice_str:
        if s not in machine.alphabet:
            raise MachineError(f"symbol {s!r} not in the machine alphabet")
    w = machine.work_tapes
    by_state = machine.rules_by_state()
    work: List[Dict[int, str]] = [dict() for _ in range(w)]
    heads = [0] * (2 + w)  # input, advice, work tapes
    output: List[str] = []
    state = machine.start
    states = [state]
    positions = [tuple(heads) + (0,)]
    writes: List[Tuple[int, int, int, str]] = []

    def read_cell(fixed: str, pos: int) -> str:
        return fixed[pos] if 0 <= pos < len(fixed) else machine.blank

    steps = 0
    while state != machine.halt:
        if steps >= step_limit:
            raise StepLimitExceededError(step_limit)
        symbols = (
            read_cell(input_str, heads[0]),
            read_cell(advice_str, heads[1]),
        ) + tuple(
            work[i].get(heads[2 + i], machine.blank) for i in range(w)
        )
        rule = None
        for cand in by_state.get(state, ()):
            if cand.matches(symbols):
                rule = cand
                break
        if rule is None:
            raise UndefinedTransitionError(state, symbols)
        steps += 1
        for i in range(w):
            sym = rule.writes[i]
            if sym != WILDCARD:
                work[i][heads[2 + i]] = sym
                writes.append((steps, i, heads[2 + i], sym))
        if rule.emit is not None:
            output.append(rule.emit)
        for i in range(2 + w):
            heads[i] += rule.moves[i]
        state = rule.next_state
        states.append(state)
        positions.append(tuple(heads) + (len(output),))

    return RunTrace(
        work_tapes=w,
        steps=steps,
        states=tuple(states),
        positions=tuple(positions),
        output="".join(output),
        halted=True,
        writes=tuple(writes),
        input_str=input_str,
        advice_str=advice_str,
        blank=machine.blank,
    )


@dataclass(frozen=True)
class SegmentedTrace:
    """A run cut into time segments of length b.

    Segment i (1-based) covers times (i-1)*b <= t < min(i*b, steps); the
    visited blocks per tape are the blocks of the head positions at those
    times.  The final configuration at t = steps is not attributed to any
    segment.
    """

    trace: RunTrace
    b: int
    a: int
    visited: Tuple[Tuple[FrozenSet[int], ...], ...]  # [segment][tape]
    end_states: Tuple[str, ...]
    end_positions: Tuple[Tuple[int, ...], ...]


def segment(trace: RunTrace, b: int) -> SegmentedTrace:
    if b < 1:
        raise DimensionError("block size must be positive")
    steps = trace.steps
    a = max(1, -(-steps // b))
    visited = []
    end_states = []
    end_positions = []
    for i in range(a):
        lo = i * b
        hi = min((i + 1) * b, steps)
        per_tape: List[Set[int]] = [set() for _ in range(trace.n_tapes)]
        for t in range(lo, hi):
            for tape, pos in enumerate(trace.positions[t]):
                per_tape[tape].add(pos // b)
        visited.append(tuple(frozenset(s) for s in per_tape))
        end_states.append(trace.states[hi])
        end_positions.append(trace.positions[hi])
    return SegmentedTrace(
        trace=trace,
        b=b,
        a=a,
        visited=tuple(visited),
        end_states=tuple(end_states),
        end_positions=tuple(end_positions),
    )


def is_block_respecting(st: SegmentedTrace) -> Tuple[bool, Optional[int]]:
    """True iff no head changes block except at step indices divisible by b.

    Returns the first violating step otherwise.  All tapes participate,
    including the output tape.
    """
    b = st.b
    trace = st.trace
    for t in range(1, trace.steps + 1):
        if t % b == 0:
            continue
        before = trace.positions[t - 1]
        after = trace.positions[t]
        for tape in range(trace.n_tapes):
            if before[tape] // b != after[tape] // b:
                return False, t
    return True, None


@dataclass(frozen=True)
class ComputationGraph:
    """DAG on time segments 1..a with consecutive and block-revisit edges."""

    a: int
    edges: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        for i, j in self.edges:
            if not 1 <= i < j <= self.a:
                raise DimensionError(f"edge ({i}, {j}) out of range")

    def successors(self) -> Dict[int, List[int]]:
        succ: Dict[int, List[int]] = {v: [] for v in range(1, self.a + 1)}
        for i, j in sorted(self.edges):
            succ[i].append(j)
        return succ

    @classmethod
    def path(cls, a: int) -> "ComputationGraph":
        return cls(a, frozenset((i, i + 1) for i in range(1, a)))


def computation_graph(st: SegmentedTrace) -> ComputationGraph:
    """Edges (i, j): consecutive segments, or some tape block visited in
    both i and j but in no segment strictly between."""
    edges: Set[Tuple[int, int]] = {(i, i + 1) for i in range(1, st.a)}
    n_tapes = st.trace.n_tapes
    for tape in range(n_tapes):
        visits: Dict[int, List[int]] = {}
        for seg in range(1, st.a + 1):
            for blk in st.visited[seg - 1][tape]:
                visits.setdefault(blk, []).append(seg)
        for segs in visits.values():
            for prev, nxt in zip(segs, segs[1:]):
                if prev < nxt:
                    edges.add((prev, nxt))
    return ComputationGraph(st.a, frozenset(edges))


def computation_graph_bruteforce(st: SegmentedTrace) -> ComputationGraph:
    """Independent quadratic pairwise scan; test oracle for the above."""
    edges: Set[Tuple[int, int]] = set()
    for i in range(1, st.a + 1):
        for j in range(i + 1, st.a + 1):
            if j == i + 1:
                edges.add((i, j))
                continue
            for tape in range(st.trace.n_tapes):
                shared = st.visited[i - 1][tape] & st.visited[j - 1][tape]
                for blk in shared:
                    if all(
                        blk not in st.visited[l - 1][tape] for l in range(i + 1, j)
                    ):
                        edges.add((i, j))
    return ComputationGraph(st.a, frozenset(edges))


def predecessor_profile(
    g: ComputationGraph, j_set: Sequence[int] = ()
) -> Tuple[int, Fraction]:
    """(max, mean) predecessor counts over V without J, in the induced
    subgraph; a predecessor is any vertex with a directed path to v."""
    removed = set(j_set)
    if not removed <= set(range(1, g.a + 1)):
        raise DimensionError("J contains vertices outside the graph")
    alive = [v for v in range(1, g.a + 1) if v not in removed]
    if not alive:
        return 0, Fraction(0)
    succ = g.successors()
    counts = {v: 0 for v in alive}
    for src in alive:
        # Forward DFS within the induced subgraph; src contributes to
        # every reachable vertex.
        stack = [src]
        seen = {src}
        while stack:
            u = stack.pop()
            for nxt in succ[u]:
                if nxt in removed or nxt in seen:
                    continue
                seen.add(nxt)
                counts[nxt] += 1
                stack.append(nxt)
    values = [counts[v] for v in alive]
    return max(values), Fraction(sum(values), len(values))


def greedy_separator(
    g: ComputationGraph, budget: int
) -> Tuple[Tuple[int, ...], Tuple[int, Fraction]]:
    """Remove, budget times, the vertex whose removal reduces the max
    predecessor count the most (ties to the lowest index).

    Returns the removal set J in removal order and the profile after
    removal.  Empirical companion to the separator existence result; no
    optimality claimed.
    """
    if budget > g.a:
        raise DimensionError("budget exceeds vertex count")
    j_list: List[int] = []
    for _ in range(budget):
        best_v = None
        best_max = None
        for v in range(1, g.a + 1):
            if v in j_list:
                continue
            cand_max, _ = predecessor_profile(g, j_list + [v])
            if best_max is None or cand_max < best_max:
                best_max = cand_max
                best_v = v
        assert best_v is not None
        j_list.append(best_v)
    return tuple(j_list), predecessor_profile(g, j_list)


@dataclass(frozen=True)
class ComputationSummary:
    """End-of-segment states and head positions, plus block transcriptions
    for the selected segments.

    ``transcriptions[(segment, tape, block)]`` is the content (length b)
    of that block at the end of the segment.  Bit-size accounting, kept
    exact and documented: each state costs ceil(log2(#states)) bits, each
    head position ceil(log2(2*steps+1)) bits (positions are bounded by
    the step count), each transcription b*ceil(log2(#alphabet)) bits plus
    one position-sized block index.
    """

    a: int
    b: int
    selected: Tuple[int, ...]
    end_states: Tuple[str, ...]
    end_positions: Tuple[Tuple[int, ...], ...]
    transcriptions: Tuple[Tuple[int, int, int, str], ...]  # (segment, tape, block, content)
    bit_size: int


def summary_extract(
    st: SegmentedTrace,
    j_set: Sequence[int],
    n_states: int = 2,
    n_alphabet: int = 3,
) -> ComputationSummary:
    """Build the computation summary for the selected segments J."""
    selected = tuple(sorted(set(j_set)))
    if any(not 1 <= seg <= st.a for seg in selected):
        raise DimensionError("J contains segments outside the trace")
    trace = st.trace
    b = st.b
    transcriptions: List[Tuple[int, int, int, str]] = []
    # Replay work-tape writes incrementally up to each segment end.
    tape_state: List[Dict[int, str]] = [dict() for _ in range(trace.work_tapes)]
    write_idx = 0
    writes = trace.writes
    output_prefix_len = 0

    def cell(tape: int, pos: int) -> str:
        if tape == 0:
            return trace.input_str[pos] if 0 <= pos < len(trace.input_str) else trace.blank
        if tape == 1:
            return trace.advice_str[pos] if 0 <= pos < len(trace.advice_str) else trace.blank
        if tape == trace.n_tapes - 1:
            return (
                trace.output[pos]
                if 0 <= pos < output_prefix_len
                else trace.blank
            )
        return tape_state[tape - 2].get(pos, trace.blank)

    for seg in selected:
        end_time = min(seg * b, trace.steps)
        while write_idx < len(writes) and writes[write_idx][0] <= end_time:
            _, wt, pos, sym = writes[write_idx]
            tape_state[wt][pos] = sym
            write_idx += 1
        output_prefix_len = trace.positions[end_time][trace.n_tapes - 1]
        for tape in range(trace.n_tapes):
            for blk in sorted(st.visited[seg - 1][tape]):
                content = "".join(cell(tape, blk * b + off) for off in range(b))
                transcriptions.append((seg, tape, blk, content))

    state_bits = _bits_for(max(n_states, len(set(trace.states))))
    pos_bits = _bits_for(2 * trace.steps + 1)
    sym_bits = _bits_for(n_alphabet)
    bit_size = (
        st.a * state_bits
        + st.a * trace.n_tapes * pos_bits
        + len(transcriptions) * (b * sym_bits + pos_bits)
    )
    return ComputationSummary(
        a=st.a,
        b=b,
        selected=selected,
        end_states=st.end_states,
        end_positions=st.end_positions,
        transcriptions=tuple(transcriptions),
        bit_size=bit_size,
    )


def _bits_for(n: int) -> int:
    return max(1, (n - 1).bit_length())


def log_star(n: int) -> int:
    """Iterated-log count: least l with log2 applied l times to n at most 1.

    Computed exactly by comparing against the tower 1, 2, 4, 16, 65536, ...
    """
    if n < 1:
        raise ValueError("log_star is defined for n >= 1")
    tower = 1
    count = 0
    while n > tower:
        tower = 1 << tower
        count += 1
    return count
