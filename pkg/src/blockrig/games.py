"""Independent multiplayer games with exact value computation.

A game draws t uniform question bits; each player sees a fixed subset of
them and must reproduce a deterministic target answer.  The verifier
accepts iff every player is correct, so each question has a unique
accepting answer per player.  Values are exact rationals: number of
winning questions over 2^t.

Bit indices are 0-based throughout; index 0 is the least significant bit
of a packed question.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple

from . import f2
from .errors import BudgetExceededError, DimensionError

__all__ = [
    "IndependentGame",
    "PureStrategy",
    "ValueReport",
    "build_gs",
    "repeat",
    "strategy_value",
    "value_exhaustive",
    "value_branch_and_bound",
    "value_exact",
    "player_marginal_value",
    "repeated_value_bounds",
    "add_observer_player",
    "build_transpose_game",
    "build_product_game",
    "repetition_decay_experiment",
    "DEFAULT_EXHAUSTIVE_BUDGET",
    "DEFAULT_BNB_BUDGET",
    "MAX_QUESTION_BITS",
]

DEFAULT_EXHAUSTIVE_BUDGET = 24  # joint strategy-table bits for plain enumeration
DEFAULT_BNB_BUDGET = 40  # joint strategy-table bits for branch and bound
MAX_QUESTION_BITS = 24  # 2^t questions are materialized


@dataclass(frozen=True)
class IndependentGame:
    """t uniform question bits, per-player views and target answers.

    ``targets[j][q]`` is the unique accepting answer (packed int of
    ``answer_lens[j]`` bits) for player j on question q.
    """

    t: int
    views: Tuple[Tuple[int, ...], ...]
    answer_lens: Tuple[int, ...]
    targets: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.t < 0 or self.t > MAX_QUESTION_BITS:
            raise BudgetExceededError("question bits", self.t, MAX_QUESTION_BITS)
        if not (len(self.views) == len(self.answer_lens) == len(self.targets)):
            raise DimensionError("per-player field lengths disagree")
        for view in self.views:
            if any(b < 0 or b >= self.t for b in view):
                raise DimensionError("view bit index out of range")
            if list(view) != sorted(set(view)):
                raise DimensionError("views must be sorted and duplicate-free")
        for a, table in zip(self.answer_lens, self.targets):
            if len(table) != 1 << self.t:
                raise DimensionError("target table must cover every question")
            if any(ans >> a for ans in table):
                raise DimensionError("target answer wider than answer length")

    @property
    def players(self) -> int:
        return len(self.views)

    def view_assignment(self, player: int, q: int) -> int:
        """Index of the viewed bits of q, LSB-first over ascending indices."""
        va = 0
        for pos, b in enumerate(self.views[player]):
            va |= ((q >> b) & 1) << pos
        return va

    def table_entries(self, player: int) -> int:
        return 1 << len(self.views[player])

    def joint_table_bits(self) -> int:
        return sum(a * (1 << len(v)) for a, v in zip(self.answer_lens, self.views))


@dataclass(frozen=True)
class PureStrategy:
    """One answer table per player, indexed by view assignment."""

    tables: Tuple[Tuple[int, ...], ...]

    def check_shape(self, game: IndependentGame) -> None:
        if len(self.tables) != game.players:
            raise DimensionError("wrong number of player tables")
        for j, table in enumerate(self.tables):
            if len(table) != game.table_entries(j):
                raise DimensionError(f"player {j} table has wrong size")
            if any(ans >> game.answer_lens[j] for ans in table):
                raise DimensionError(f"player {j} answer too wide")


@dataclass(frozen=True)
class ValueReport:
    value: Fraction
    strategy: PureStrategy
    nodes: int
    prunes: int
    method: str


def build_gs(f, sets: Sequence[Sequence[int]]) -> IndependentGame:
    """Game for a boolean function: player j sees the view bits and must
    answer coordinate j of f."""
    k = f.k
    if len(sets) != k:
        raise DimensionError(f"need {k} view sets, got {len(sets)}")
    views = tuple(tuple(sorted(s)) for s in sets)
    targets = tuple(
        tuple((f.table[q] >> j) & 1 for q in range(1 << k)) for j in range(k)
    )
    return IndependentGame(t=k, views=views, answer_lens=(1,) * k, targets=targets)


def repeat(game: IndependentGame, n: int) -> IndependentGame:
    """n-fold parallel repetition with block-major bit layout.

    Question bit b of the base game becomes bits b*n .. b*n+n-1 of the
    repeated game (coordinate i of copy b at b*n+i); answers likewise.
    A repeated question is won only if all n coordinates are correct.
    """
    if n < 1:
        raise DimensionError("repetition count must be positive")
    t2 = game.t * n
    if t2 > MAX_QUESTION_BITS:
        raise BudgetExceededError("repeated question bits", t2, MAX_QUESTION_BITS)
    views2 = tuple(
        tuple(b * n + i for b in view for i in range(n)) for view in game.views
    )
    answer_lens2 = tuple(a * n for a in game.answer_lens)
    targets2 = []
    for j, table in enumerate(game.targets):
        a = game.answer_lens[j]
        col = []
        for q2 in range(1 << t2):
            ans2 = 0
            for i in range(n):
                q = 0
                for b in range(game.t):
                    q |= ((q2 >> (b * n + i)) & 1) << b
                ans = table[q]
                for l in range(a):
                    ans2 |= ((ans >> l) & 1) << (l * n + i)
            col.append(ans2)
        targets2.append(tuple(col))
    return IndependentGame(t=t2, views=views2, answer_lens=answer_lens2, targets=tuple(targets2))


def strategy_value(game: IndependentGame, strat: PureStrategy) -> Fraction:
    """Exact winning probability of a pure strategy."""
    strat.check_shape(game)
    wins = 0
    for q in range(1 << game.t):
        if all(
            strat.tables[j][game.view_assignment(j, q)] == game.targets[j][q]
            for j in range(game.players)
        ):
            wins += 1
    return Fraction(wins, 1 << game.t)


def _question_masks(game: IndependentGame) -> List[List[List[int]]]:
    """masks[j][va][ans] = bitmask over questions q with view assignment va
    for player j and target answer ans."""
    masks = []
    for j in range(game.players):
        per = [[0] * (1 << game.answer_lens[j]) for _ in range(game.table_entries(j))]
        for q in range(1 << game.t):
            per[game.view_assignment(j, q)][game.targets[j][q]] |= 1 << q
        masks.append(per)
    return masks


def value_exhaustive(game: IndependentGame, budget: int = DEFAULT_EXHAUSTIVE_BUDGET) -> ValueReport:
    """Plain enumeration of every joint pure strategy, in lexicographic
    order of the joint table (player index, then view-assignment order).

    Returns the lexicographically smallest optimal strategy.
    """
    bits = game.joint_table_bits()
    if bits > budget:
        raise BudgetExceededError("joint strategy-table bits", bits, budget)
    masks = _question_masks(game)
    p = game.players
    best_wins = -1
    best_tables: Optional[Tuple[Tuple[int, ...], ...]] = None
    nodes = 0
    prefix: List[Tuple[int, ...]] = []

    def rec(j: int, qmask: int):
        nonlocal best_wins, best_tables, nodes
        if j == p:
            nodes += 1
            wins = qmask.bit_count()
            if wins > best_wins:
                best_wins = wins
                best_tables = tuple(prefix)
            return
        n_vals = 1 << game.answer_lens[j]
        for table in product(range(n_vals), repeat=game.table_entries(j)):
            m = 0
            for va, ans in enumerate(table):
                m |= masks[j][va][ans]
            prefix.append(table)
            rec(j + 1, qmask & m)
            prefix.pop()

    rec(0, (1 << (1 << game.t)) - 1)
    assert best_tables is not None
    return ValueReport(
        value=Fraction(best_wins, 1 << game.t),
        strategy=PureStrategy(best_tables),
        nodes=nodes,
        prunes=0,
        method="exhaustive",
    )


def value_branch_and_bound(game: IndependentGame, budget: int = DEFAULT_BNB_BUDGET) -> ValueReport:
    """Exact value by depth-first search over table entries with an
    admissible bound (won + still-undecided questions).

    Entry order: players by index, entries by ascending view assignment,
    values ascending; incumbent replaced only on strict improvement, so
    the reported optimum is the lexicographically smallest optimal table.
    """
    bits = game.joint_table_bits()
    if bits > budget:
        raise BudgetExceededError("joint strategy-table bits", bits, budget)
    p = game.players
    entry_order = [(j, va) for j in range(p) for va in range(game.table_entries(j))]
    # For each entry, the questions it decides.
    buckets: dict[Tuple[int, int], List[int]] = {e: [] for e in entry_order}
    n_questions = 1 << game.t
    unresolved = [0] * n_questions
    for q in range(n_questions):
        for j in range(p):
            buckets[(j, game.view_assignment(j, q))].append(q)
            unresolved[q] += 1
    lost = [False] * n_questions
    state = {"won": 0, "undecided": n_questions, "nodes": 0, "prunes": 0}
    best_wins = -1
    best_flat: Optional[List[int]] = None
    flat: List[int] = []

    def assign(entry: Tuple[int, int], value: int) -> List[Tuple[int, bool]]:
        j, _ = entry
        changes = []
        for q in buckets[entry]:
            unresolved[q] -= 1
            if lost[q]:
                changes.append((q, False))
                continue
            if game.targets[j][q] != value:
                lost[q] = True
                state["undecided"] -= 1
                changes.append((q, True))
            else:
                if unresolved[q] == 0:
                    state["won"] += 1
                    state["undecided"] -= 1
                changes.append((q, False))
        return changes

    def undo(entry: Tuple[int, int], changes: List[Tuple[int, bool]]) -> None:
        for q, newly_lost in changes:
            if newly_lost:
                lost[q] = False
                state["undecided"] += 1
            elif not lost[q] and unresolved[q] == 0:
                state["won"] -= 1
                state["undecided"] += 1
            unresolved[q] += 1

    def rec(depth: int):
        nonlocal best_wins, best_flat
        state["nodes"] += 1
        if state["won"] + state["undecided"] <= best_wins:
            state["prunes"] += 1
            return
        if depth == len(entry_order):
            if state["won"] > best_wins:
                best_wins = state["won"]
                best_flat = list(flat)
            return
        entry = entry_order[depth]
        j, _ = entry
        for value in range(1 << game.answer_lens[j]):
            changes = assign(entry, value)
            flat.append(value)
            rec(depth + 1)
            flat.pop()
            undo(entry, changes)

    rec(0)
    assert best_flat is not None
    tables = []
    pos = 0
    for j in range(p):
        e = game.table_entries(j)
        tables.append(tuple(best_flat[pos : pos + e]))
        pos += e
    return ValueReport(
        value=Fraction(best_wins, n_questions),
        strategy=PureStrategy(tuple(tables)),
        nodes=state["nodes"],
        prunes=state["prunes"],
        method="branch-and-bound",
    )


def value_exact(
    game: IndependentGame,
    exhaustive_budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
    bnb_budget: int = DEFAULT_BNB_BUDGET,
) -> ValueReport:
    """Exact game value; plain enumeration for small joint tables, branch
    and bound (still exact) up to the larger budget."""
    bits = game.joint_table_bits()
    if bits <= exhaustive_budget:
        return value_exhaustive(game, exhaustive_budget)
    return value_branch_and_bound(game, bnb_budget)


def player_marginal_value(game: IndependentGame, player: int) -> Fraction:
    """Best single-player success probability, by majority decoding.

    For each view assignment, the player answers the most common target
    among consistent questions; no strategy enumeration involved.
    """
    counts: dict[Tuple[int, int], int] = {}
    for q in range(1 << game.t):
        key = (game.view_assignment(player, q), game.targets[player][q])
        counts[key] = counts.get(key, 0) + 1
    best: dict[int, int] = {}
    for (va, _), c in counts.items():
        best[va] = max(best.get(va, 0), c)
    return Fraction(sum(best.values()), 1 << game.t)


def repeated_value_bounds(
    game: IndependentGame,
    n: int,
    exhaustive_budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
    bnb_budget: int = DEFAULT_BNB_BUDGET,
) -> Tuple[Fraction, Fraction]:
    """(lower, upper) for the n-fold repeated value.

    Lower: play each coordinate independently with an optimal base
    strategy.  Upper: any single player must be right in all coordinates;
    their per-coordinate optimum factorizes across independent copies.
    """
    base = value_exact(game, exhaustive_budget, bnb_budget).value
    lower = base**n
    upper = min(player_marginal_value(game, j) for j in range(game.players)) ** n
    return lower, upper


def add_observer_player(game: IndependentGame) -> IndependentGame:
    """Add a player who sees every question bit and must answer 0.

    Makes the accept predicate a deterministic function of the players'
    queries without changing the value.
    """
    return IndependentGame(
        t=game.t,
        views=game.views + (tuple(range(game.t)),),
        answer_lens=game.answer_lens + (1,),
        targets=game.targets + ((0,) * (1 << game.t),),
    )


def build_transpose_game(n: int, sets: Sequence[Sequence[int]]) -> IndependentGame:
    """n players; the question is an n x n matrix X in row-major order;
    player j sees the rows indexed by its set and must answer column j."""
    _check_row_sets(n, sets)
    t = n * n
    if t > MAX_QUESTION_BITS:
        raise BudgetExceededError("question bits", t, MAX_QUESTION_BITS)
    views = tuple(
        tuple(sorted(r * n + c for r in s for c in range(n))) for s in sets
    )
    targets = []
    for j in range(n):
        col = []
        for q in range(1 << t):
            col.append(sum(((q >> (i * n + j)) & 1) << i for i in range(n)))
        targets.append(tuple(col))
    return IndependentGame(t=t, views=views, answer_lens=(n,) * n, targets=tuple(targets))


def build_product_game(
    n: int, s_sets: Sequence[Sequence[int]], t_sets: Sequence[Sequence[int]]
) -> IndependentGame:
    """n players; the question is (X, Y) row-major; player j sees rows
    S_j of X and rows T_j of Y and must answer row j of XY over GF(2)."""
    _check_row_sets(n, s_sets)
    _check_row_sets(n, t_sets)
    t = 2 * n * n
    if t > MAX_QUESTION_BITS:
        raise BudgetExceededError("question bits", t, MAX_QUESTION_BITS)
    nn = n * n
    views = tuple(
        tuple(
            sorted(
                [r * n + c for r in s for c in range(n)]
                + [nn + r * n + c for r in tt for c in range(n)]
            )
        )
        for s, tt in zip(s_sets, t_sets)
    )
    products = []
    for q in range(1 << t):
        x = f2.deserialize(
            "".join(str((q >> b) & 1) for b in range(nn)), n, n, "row-major"
        )
        y = f2.deserialize(
            "".join(str((q >> (nn + b)) & 1) for b in range(nn)), n, n, "row-major"
        )
        products.append(f2.mat_mul(x, y))
    targets = tuple(
        tuple(z.row_words[j] for z in products) for j in range(n)
    )
    return IndependentGame(t=t, views=views, answer_lens=(n,) * n, targets=targets)


def _check_row_sets(n: int, sets: Sequence[Sequence[int]]) -> None:
    if len(sets) != n:
        raise DimensionError(f"need {n} row sets, got {len(sets)}")
    sizes = {len(set(s)) for s in sets}
    if len(sizes) != 1:
        raise DimensionError("row sets must share one size")
    (s,) = sizes
    if not 1 <= s < n:
        raise DimensionError(f"set size {s} must satisfy 1 <= s < {n}")
    for st in sets:
        if any(r < 0 or r >= n for r in st):
            raise DimensionError("row index out of range")


def repetition_decay_experiment(
    game: IndependentGame,
    n_max: int,
    exhaustive_budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
    bnb_budget: int = DEFAULT_BNB_BUDGET,
) -> List[dict]:
    """Per-n rows of lower/exact/upper repeated values with implied decay
    exponents; infeasible exact cells are left absent (None).

    The exponent of a value v at repetition n is log(v) / (n*log(v1)),
    v1 the base value; it is absent when v1 is 0 or 1 or v is 0.
    """
    base = value_exact(game, exhaustive_budget, bnb_budget).value

    def exponent(v: Optional[Fraction], n: int) -> Optional[float]:
        if v is None or v == 0 or base in (0, 1):
            return None
        return math.log(v) / (n * math.log(base))

    rows = []
    for n in range(1, n_max + 1):
        lower = base**n
        upper = min(
            player_marginal_value(game, j) for j in range(game.players)
        ) ** n
        exact: Optional[Fraction]
        try:
            exact = value_exact(repeat(game, n), exhaustive_budget, bnb_budget).value
        except BudgetExceededError:
            exact = None
        rows.append(
            {
                "n": n,
                "lower": lower,
                "exact": exact,
                "upper": upper,
                "exponent_exact": exponent(exact, n),
                "exponent_upper": exponent(upper, n),
            }
        )
    return rows
