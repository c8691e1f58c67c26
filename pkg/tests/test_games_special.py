"""Transpose and matrix-product games, checked against direct counting."""

import random
from fractions import Fraction
from itertools import product

import pytest

from blockrig import f2, games
from blockrig.errors import DimensionError


def transpose_oracle(n, sets):
    """Value by naive enumeration over per-player answer tables."""
    game = games.build_transpose_game(n, sets)
    per_player = []
    for j in range(n):
        entries = game.table_entries(j)
        per_player.append(list(product(range(1 << n), repeat=entries)))
    best = 0
    for tables in product(*per_player):
        wins = 0
        for q in range(1 << game.t):
            if all(
                tables[j][game.view_assignment(j, q)] == game.targets[j][q]
                for j in range(n)
            ):
                wins += 1
        best = max(best, wins)
    return Fraction(best, 1 << game.t)


class TestTransposeGame:
    def test_targets_are_columns(self):
        g = games.build_transpose_game(2, [(0,), (1,)])
        # X row-major: bit (i, j) at i*n + j; player j answers column j
        for q in range(16):
            for j in range(2):
                expect = sum(((q >> (i * 2 + j)) & 1) << i for i in range(2))
                assert g.targets[j][q] == expect

    def test_views_cover_selected_rows(self):
        g = games.build_transpose_game(2, [(0,), (1,)])
        assert g.views == ((0, 1), (2, 3))

    def test_distinct_row_singletons_value(self):
        # each player sees a different row; frozen from the enumeration oracle
        for sets in ([(0,), (1,)], [(1,), (0,)]):
            assert transpose_oracle(2, sets) == Fraction(1, 2)
            assert games.value_exact(
                games.build_transpose_game(2, sets)
            ).value == Fraction(1, 2)

    def test_shared_row_singletons_value(self):
        # both players see the same row; the oracle gives only 1/4
        for sets in ([(0,), (0,)], [(1,), (1,)]):
            assert transpose_oracle(2, sets) == Fraction(1, 4)
            assert games.value_exact(
                games.build_transpose_game(2, sets)
            ).value == Fraction(1, 4)

    def test_all_marginals_are_half(self):
        for sets in ([(0,), (1,)], [(1,), (0,)], [(0,), (0,)], [(1,), (1,)]):
            g = games.build_transpose_game(2, sets)
            for j in range(2):
                assert games.player_marginal_value(g, j) == Fraction(1, 2)

    def test_set_validation(self):
        with pytest.raises(DimensionError):
            games.build_transpose_game(2, [(0,)])
        with pytest.raises(DimensionError):
            games.build_transpose_game(2, [(0, 1), (0, 1)])  # s must be < n
        with pytest.raises(DimensionError):
            games.build_transpose_game(2, [(0,), (5,)])


class TestProductGame:
    def test_targets_are_product_rows(self):
        g = games.build_product_game(2, [(0,), (1,)], [(0,), (1,)])
        nn = 4
        for q in range(1 << 8):
            x = f2.deserialize(
                "".join(str((q >> b) & 1) for b in range(nn)), 2, 2
            )
            y = f2.deserialize(
                "".join(str((q >> (nn + b)) & 1) for b in range(nn)), 2, 2
            )
            z = f2.mat_mul(x, y)
            for j in range(2):
                assert g.targets[j][q] == z.row_words[j]

    def test_views_cover_both_factors(self):
        g = games.build_product_game(2, [(0,), (1,)], [(1,), (0,)])
        assert g.views[0] == (0, 1, 6, 7)  # row 0 of X, row 1 of Y
        assert g.views[1] == (2, 3, 4, 5)

    def test_marginal_by_majority(self):
        g = games.build_product_game(2, [(0,), (1,)], [(0,), (1,)])
        # frozen from the majority-decoding computation
        assert games.player_marginal_value(g, 0) == Fraction(5, 8)

    def test_full_information_marginal(self):
        # a player who sees its own X row and all of Y knows its answer,
        # so the decoding bound should hit 1 on an (n-1)-set variant
        g = games.build_product_game(3, [(0,), (1,), (2,)], [(0, 1), (1, 2), (0, 2)])
        assert g.t == 18
        v = games.player_marginal_value(g, 0)
        assert v < 1  # row 2 of Y is hidden from player 0

    def test_seeded_small_value(self):
        # the n=2 game needs 64 joint table bits; make sure the budget
        # guard fires instead of an open-ended search
        from blockrig.errors import BudgetExceededError

        g = games.build_product_game(2, [(0,), (1,)], [(0,), (1,)])
        assert g.joint_table_bits() == 64
        with pytest.raises(BudgetExceededError):
            games.value_exhaustive(g)
        with pytest.raises(BudgetExceededError):
            games.value_branch_and_bound(g)


class TestRepeatedSpecialGames:
    def test_transpose_repeat_bounds_sandwich(self):
        g = games.build_transpose_game(2, [(1,), (0,)])
        lower, upper = games.repeated_value_bounds(g, 2)
        assert lower == Fraction(1, 4)
        assert upper == Fraction(1, 4)
