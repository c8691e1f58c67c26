import random
from fractions import Fraction

import pytest

from blockrig import formats, tensork, tm
from blockrig.errors import (
    DimensionError,
    MachineError,
    StepLimitExceededError,
    UndefinedTransitionError,
)
from blockrig.rigidity import BooleanFunction
from blockrig.tm import ComputationGraph, MachineSpec, Rule

COPY_MACHINE = """
work_tapes 1
alphabet 01_
blank _
start go
halt done
go 0** -> go * RSS emit 0
go 1** -> go * RSS emit 1
go _** -> done * SSS
"""


def copier():
    return formats.parse_machine(COPY_MACHINE)


def traced_tensor_runs(count, seed=0):
    """Seeded tensor-machine traces for graph tests."""
    rng = random.Random(seed)
    machine = tensork.gen_tensor_k_machine(2)
    traces = []
    for _ in range(count):
        n = rng.choice([2, 4, 8])
        f = BooleanFunction(2, tuple(rng.getrandbits(2) for _ in range(4)))
        x = "".join(rng.choice("01") for _ in range(2 * n))
        traces.append(tm.run(machine, tensork.encode_tensor_input(f, x, n)))
    return traces


class TestRun:
    def test_copy_machine(self):
        trace = tm.run(copier(), "10110")
        assert trace.halted
        assert trace.output == "10110"
        assert trace.steps == 6

    def test_trace_shape(self):
        trace = tm.run(copier(), "01")
        assert len(trace.states) == trace.steps + 1
        assert len(trace.positions) == trace.steps + 1
        # output head equals emitted length at every step
        for t, pos in enumerate(trace.positions):
            assert pos[-1] == min(t, len(trace.output))

    def test_rejects_bad_symbols(self):
        with pytest.raises(MachineError):
            tm.run(copier(), "102")

    def test_undefined_transition(self):
        machine = MachineSpec(
            work_tapes=1,
            alphabet=("0", "1", "_"),
            blank="_",
            start="go",
            halt="done",
            rules=(
                Rule("go", ("0", "*", "*"), "go", ("*",), (1, 0, 0), None),
            ),
        )
        with pytest.raises(UndefinedTransitionError):
            tm.run(machine, "01")

    def test_step_limit(self):
        machine = MachineSpec(
            work_tapes=1,
            alphabet=("0", "1", "_"),
            blank="_",
            start="go",
            halt="done",
            rules=(Rule("go", ("*", "*", "*"), "go", ("*",), (0, 0, 0), None),),
        )
        with pytest.raises(StepLimitExceededError):
            tm.run(machine, "0", step_limit=10)

    def test_first_matching_rule_wins(self):
        machine = MachineSpec(
            work_tapes=1,
            alphabet=("0", "1", "_"),
            blank="_",
            start="go",
            halt="done",
            rules=(
                Rule("go", ("*", "*", "*"), "done", ("*",), (0, 0, 0), "1"),
                Rule("go", ("0", "*", "*"), "done", ("*",), (0, 0, 0), "0"),
            ),
        )
        assert tm.run(machine, "0").output == "1"

    def test_advice_tape_is_readable(self):
        machine = MachineSpec(
            work_tapes=1,
            alphabet=("0", "1", "_"),
            blank="_",
            start="go",
            halt="done",
            rules=(
                Rule("go", ("*", "1", "*"), "done", ("*",), (0, 0, 0), "1"),
                Rule("go", ("*", "_", "*"), "done", ("*",), (0, 0, 0), "0"),
            ),
        )
        assert tm.run(machine, "", "1").output == "1"
        assert tm.run(machine, "").output == "0"

    def test_work_tape_writes_logged(self):
        machine = MachineSpec(
            work_tapes=1,
            alphabet=("0", "1", "_"),
            blank="_",
            start="go",
            halt="done",
            rules=(Rule("go", ("*", "*", "*"), "done", ("1",), (0, 0, 1), None),),
        )
        trace = tm.run(machine, "")
        assert trace.writes == ((1, 0, 0, "1"),)

    def test_deterministic(self):
        a = tm.run(copier(), "0101")
        b = tm.run(copier(), "0101")
        assert a == b


class TestSegment:
    def test_segment_count(self):
        trace = tm.run(copier(), "10110")  # 6 steps
        st = tm.segment(trace, 4)
        assert st.a == 2
        assert tm.segment(trace, 6).a == 1
        assert tm.segment(trace, 100).a == 1

    def test_empty_run_has_one_segment(self):
        machine = MachineSpec(
            work_tapes=1,
            alphabet=("0", "1", "_"),
            blank="_",
            start="done",
            halt="done",
            rules=(),
        )
        st = tm.segment(tm.run(machine, ""), 3)
        assert st.a == 1

    def test_visited_blocks_of_copier(self):
        trace = tm.run(copier(), "0" * 6)  # input head sweeps 0..6
        st = tm.segment(trace, 3)
        # segment 1 covers times 0..2: input positions 0,1,2 -> block 0
        assert st.visited[0][0] == frozenset({0})
        # segment 2 covers times 3..5: positions 3,4,5 -> block 1
        assert st.visited[1][0] == frozenset({1})

    def test_end_states_and_positions(self):
        trace = tm.run(copier(), "01")  # 3 steps
        st = tm.segment(trace, 3)
        assert st.end_states == (trace.states[3],)
        assert st.end_positions == (trace.positions[3],)

    def test_block_size_positive(self):
        with pytest.raises(DimensionError):
            tm.segment(tm.run(copier(), "0"), 0)


class TestBlockRespecting:
    def test_copier_respects_block_sized_segments(self):
        trace = tm.run(copier(), "0" * 6)
        ok, violation = tm.is_block_respecting(tm.segment(trace, 3))
        assert ok and violation is None

    def test_turnaround_mid_segment_violates(self):
        # sweep right three cells then back; the return crossing falls at
        # an odd step, which b=2 forbids
        rules = []
        for i in range(3):
            rules.append(Rule(f"r{i}", ("*", "*", "*"), f"r{i + 1}", ("*",), (1, 0, 0), None))
        for i in range(3):
            nxt = f"l{i + 1}" if i < 2 else "done"
            rules.append(Rule(f"l{i}", ("*", "*", "*"), nxt, ("*",), (-1, 0, 0), None))
        rules.append(Rule("r3", ("*", "*", "*"), "l0", ("*",), (-1, 0, 0), None))
        machine = MachineSpec(
            work_tapes=1,
            alphabet=("0", "1", "_"),
            blank="_",
            start="r0",
            halt="done",
            rules=tuple(rules),
        )
        trace = tm.run(machine, "0000")
        st = tm.segment(trace, 2)
        ok, violation = tm.is_block_respecting(st)
        assert not ok
        assert violation is not None and violation % 2 != 0


class TestComputationGraph:
    def test_path_graph(self):
        g = ComputationGraph.path(4)
        assert g.edges == frozenset({(1, 2), (2, 3), (3, 4)})

    def test_consecutive_edges_always_present(self):
        for trace in traced_tensor_runs(5, seed=1):
            st = tm.segment(trace, 8)
            g = tm.computation_graph(st)
            for i in range(1, st.a):
                assert (i, i + 1) in g.edges

    def test_matches_bruteforce(self):
        for trace in traced_tensor_runs(8, seed=2):
            for b in (4, 8, 16):
                st = tm.segment(trace, b)
                assert tm.computation_graph(st) == tm.computation_graph_bruteforce(st)

    def test_rejects_bad_edges(self):
        with pytest.raises(DimensionError):
            ComputationGraph(a=2, edges=frozenset({(1, 3)}))


class TestPredecessorProfile:
    def test_path_profile(self):
        a = 6
        g = ComputationGraph.path(a)
        mx, mean = tm.predecessor_profile(g)
        assert mx == a - 1
        assert mean == Fraction(sum(range(a)), a)

    def test_removal_cuts_the_path(self):
        g = ComputationGraph.path(5)
        mx, mean = tm.predecessor_profile(g, [3])
        assert mx == 1
        assert mean == Fraction(1, 2)

    def test_rejects_foreign_vertices(self):
        with pytest.raises(DimensionError):
            tm.predecessor_profile(ComputationGraph.path(3), [7])


class TestGreedySeparator:
    def test_path_budget_one(self):
        j, (mx, _) = tm.greedy_separator(ComputationGraph.path(5), 1)
        assert j == (3,)
        assert mx == 1

    def test_monotone_in_budget(self):
        g = ComputationGraph.path(9)
        prev = tm.predecessor_profile(g)[0]
        for budget in (1, 2, 3):
            _, (mx, _) = tm.greedy_separator(g, budget)
            assert mx <= prev
            prev = mx

    def test_budget_cap(self):
        with pytest.raises(DimensionError):
            tm.greedy_separator(ComputationGraph.path(3), 4)


class TestSummary:
    def test_transcribes_visited_blocks(self):
        trace = tm.run(copier(), "011010")
        st = tm.segment(trace, 3)
        summary = tm.summary_extract(st, [1, 2], n_states=2, n_alphabet=3)
        assert summary.selected == (1, 2)
        # the input tape blocks carry the input word itself
        contents = {
            (seg, blk): content
            for seg, tape, blk, content in summary.transcriptions
            if tape == 0
        }
        assert contents[(1, 0)] == "011"
        assert contents[(2, 1)] == "010"

    def test_bit_accounting(self):
        trace = tm.run(copier(), "0101")
        st = tm.segment(trace, 2)
        summary = tm.summary_extract(st, [1], n_states=4, n_alphabet=3)
        state_bits = 2
        pos_bits = (2 * trace.steps + 1 - 1).bit_length()
        sym_bits = 2
        expect = (
            st.a * state_bits
            + st.a * trace.n_tapes * pos_bits
            + len(summary.transcriptions) * (st.b * sym_bits + pos_bits)
        )
        assert summary.bit_size == expect

    def test_rejects_foreign_segments(self):
        trace = tm.run(copier(), "01")
        st = tm.segment(trace, 2)
        with pytest.raises(DimensionError):
            tm.summary_extract(st, [9])


class TestLogStar:
    def test_known_values(self):
        assert tm.log_star(1) == 0
        assert tm.log_star(2) == 1
        assert tm.log_star(4) == 2
        assert tm.log_star(16) == 3
        assert tm.log_star(65536) == 4

    def test_tower_boundaries(self):
        assert tm.log_star(3) == 2
        assert tm.log_star(5) == 3
        assert tm.log_star(65537) == 5

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            tm.log_star(0)
