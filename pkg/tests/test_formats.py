import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from blockrig import formats, games, tensork, tm
from blockrig.errors import DimensionError
from blockrig.rigidity import BooleanFunction

SWAP = BooleanFunction(2, (0, 2, 1, 3))


@hst.composite
def functions(draw, max_k=3):
    k = draw(hst.integers(1, max_k))
    table = tuple(draw(hst.integers(0, (1 << k) - 1)) for _ in range(1 << k))
    return BooleanFunction(k, table)


class TestTruthTables:
    def test_format_by_hand(self):
        assert formats.format_truth_table(SWAP) == "2\n00 01 10 11\n"

    def test_entries_are_lsb_first(self):
        f = formats.parse_truth_table("2\n10 00 00 00\n")
        assert f.table[0] == 1  # "10" is coordinate 1 set, coordinate 2 clear

    @settings(max_examples=60, deadline=None)
    @given(functions())
    def test_round_trip(self, f):
        assert formats.parse_truth_table(formats.format_truth_table(f)) == f

    def test_wrong_entry_count(self):
        with pytest.raises(DimensionError):
            formats.parse_truth_table("2\n00 01\n")

    def test_load(self, tmp_path):
        p = tmp_path / "f.tt"
        p.write_text(formats.format_truth_table(SWAP))
        assert formats.load_truth_table(str(p)) == SWAP


class TestMachines:
    def test_round_trip_generated(self):
        for k in (1, 2):
            machine = tensork.gen_tensor_k_machine(k)
            assert formats.parse_machine(formats.format_machine(machine)) == machine

    def test_comments_and_blank_lines_ignored(self):
        text = formats.format_machine(tensork.gen_tensor_k_machine(1))
        noisy = "# a comment\n\n" + text.replace("\n", "\n# note\n", 1)
        assert formats.parse_machine(noisy) == tensork.gen_tensor_k_machine(1)

    def test_emit_clause(self):
        machine = formats.parse_machine(
            "work_tapes 1\nalphabet 01_\nblank _\nstart s\nhalt h\n"
            "s *** -> h * SSS emit 1\n"
        )
        assert machine.rules[0].emit == "1"

    def test_bad_rule_arity(self):
        with pytest.raises(ValueError):
            formats.parse_machine(
                "work_tapes 1\nalphabet 01_\nblank _\nstart s\nhalt h\n"
                "s ** -> h * SS\n"
            )

    def test_missing_header(self):
        with pytest.raises(ValueError):
            formats.parse_machine("work_tapes 1\nalphabet 01_\n")


class TestGameFiles:
    def test_explicit_round_trip(self):
        g = games.build_gs(SWAP, [(0,), (1,)])
        again = formats.game_from_json(formats.game_to_json(g))
        assert again == g

    def test_gs_kind(self, tmp_path):
        (tmp_path / "f.tt").write_text(formats.format_truth_table(SWAP))
        obj = {"kind": "gs", "truth_table": "f.tt", "views": [[0], [1]]}
        g = formats.game_from_json(obj, base_dir=str(tmp_path))
        assert g == games.build_gs(SWAP, [(0,), (1,)])

    def test_transpose_kind(self):
        obj = {"kind": "transpose", "n": 2, "sets": [[0], [1]]}
        assert formats.game_from_json(obj) == games.build_transpose_game(
            2, [(0,), (1,)]
        )

    def test_product_kind(self):
        obj = {
            "kind": "product",
            "n": 2,
            "s_sets": [[0], [1]],
            "t_sets": [[1], [0]],
        }
        assert formats.game_from_json(obj) == games.build_product_game(
            2, [(0,), (1,)], [(1,), (0,)]
        )

    def test_load_resolves_relative_paths(self, tmp_path):
        (tmp_path / "f.tt").write_text(formats.format_truth_table(SWAP))
        p = tmp_path / "game.json"
        p.write_text(
            json.dumps({"kind": "gs", "truth_table": "f.tt", "views": [[0], [1]]})
        )
        assert formats.load_game(str(p)) == games.build_gs(SWAP, [(0,), (1,)])

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            formats.game_from_json({"kind": "mystery"})


class TestTraceExport:
    def test_basic_fields(self):
        machine = tensork.gen_tensor_k_machine(1)
        f = BooleanFunction(1, (1, 0))
        trace = tm.run(machine, tensork.encode_tensor_input(f, "0110", 4))
        doc = formats.trace_to_json(trace)
        assert doc["steps"] == trace.steps
        assert doc["output"] == trace.output
        assert len(doc["positions"]) == trace.steps + 1
        json.dumps(doc)  # serializable as-is

    def test_stride_downsamples(self):
        machine = tensork.gen_tensor_k_machine(1)
        f = BooleanFunction(1, (0, 1))
        trace = tm.run(machine, tensork.encode_tensor_input(f, "01", 2))
        doc = formats.trace_to_json(trace, stride=4)
        assert len(doc["positions"]) == len(trace.positions[::4])

    def test_segmented_fields(self):
        machine = tensork.gen_tensor_k_machine(1)
        f = BooleanFunction(1, (1, 0))
        trace = tm.run(machine, tensork.encode_tensor_input(f, "0110", 4))
        st = tm.segment(trace, 8)
        doc = formats.trace_to_json(trace, segmented=st)
        assert doc["a"] == st.a and doc["b"] == 8
        assert len(doc["visited_blocks"]) == st.a
        json.dumps(doc)
