"""Rigidity and block rigidity for matrices and boolean functions.

A matrix is not (r, s)-rigid when it splits into a rank-<=r part plus a
part with at most s ones per row.  A function is not (r, s)-rigid when on
a large input set every output coordinate is computed from s viewed
inputs; the largest achievable agreement set is exactly a game value, so
function verdicts are reduced to exact game solving.  Also houses the
tensor lift, certificate amplification, censuses, and the conversions
between decompositions and width/degree-bounded depth-2 circuits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, List, Optional, Sequence, Tuple

from . import f2, games
from .errors import BudgetExceededError, DimensionError, InvalidWitnessError
from .f2 import BitMatrix, BlockLayout

__all__ = [
    "BooleanFunction",
    "ViewFamily",
    "MatrixDecomposition",
    "NonRigidityCertificate",
    "Depth2Circuit",
    "MatrixRigidityResult",
    "FunctionRigidityResult",
    "value_below_threshold",
    "is_matrix_rigid",
    "is_block_rigid_matrix",
    "tensor_lift",
    "is_function_rigid",
    "is_block_rigid_function",
    "amplify_nonrigidity",
    "rigidity_census",
    "CensusResult",
    "depth2_from_decomposition",
    "rank_factor",
    "nonrigidity_from_depth2",
    "all_view_families",
    "random_function",
    "linear_function",
    "DEFAULT_MATRIX_BUDGET",
    "DEFAULT_FUNCTION_BUDGET",
]

DEFAULT_MATRIX_BUDGET = 5_000_000  # candidate sparse corrections per search
DEFAULT_FUNCTION_BUDGET = 10_000_000  # view families times joint strategies


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of f: {0,1}^k -> {0,1}^k.

    ``table[x]`` is the packed output for the input whose coordinate 1 is
    the LSB of x.
    """

    k: int
    table: Tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise DimensionError("arity must be positive")
        if len(self.table) != 1 << self.k:
            raise DimensionError(f"table needs {1 << self.k} entries")
        if any(v >> self.k for v in self.table):
            raise DimensionError("table entry wider than arity")

    def __call__(self, x: int) -> int:
        if x < 0 or x >> self.k:
            raise DimensionError(f"input {x} does not fit {self.k} bits")
        return self.table[x]

    @classmethod
    def identity(cls, k: int) -> "BooleanFunction":
        return cls(k, tuple(range(1 << k)))


def linear_function(a: BitMatrix) -> BooleanFunction:
    """The function x -> A x for a square matrix."""
    if a.rows != a.cols:
        raise DimensionError("linear function needs a square matrix")
    return BooleanFunction(a.rows, tuple(f2.mat_vec(a, x) for x in range(1 << a.rows)))


def random_function(rng: random.Random, k: int) -> BooleanFunction:
    return BooleanFunction(k, tuple(rng.getrandbits(k) for _ in range(1 << k)))


@dataclass(frozen=True)
class ViewFamily:
    """k sets of size s over the ground set {0,..,k-1} (one per output)."""

    k: int
    s: int
    sets: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if not 1 <= self.s < self.k:
            raise DimensionError(f"need 1 <= s < k, got s={self.s}, k={self.k}")
        if len(self.sets) != self.k:
            raise DimensionError(f"need {self.k} sets")
        for st in self.sets:
            if len(set(st)) != self.s or tuple(sorted(st)) != st:
                raise DimensionError("each set must be sorted, distinct, of size s")
            if any(i < 0 or i >= self.k for i in st):
                raise DimensionError("set element out of range")


def all_view_families(k: int, s: int):
    """All view families in lexicographic order (sets sorted, families
    compared elementwise)."""
    subsets = list(combinations(range(k), s))
    for sets in product(subsets, repeat=k):
        yield ViewFamily(k, s, tuple(sets))


@dataclass(frozen=True)
class MatrixDecomposition:
    """A = B + C split; validated against a target, never assumed."""

    b: BitMatrix
    c: BitMatrix

    def __post_init__(self):
        if self.b.rows != self.c.rows or self.b.cols != self.c.cols:
            raise DimensionError("B and C must have equal dimensions")

    def validate(self, a: BitMatrix, r: int, s: int, layout: Optional[BlockLayout] = None) -> None:
        """Check recomposition, rank bound, and (block-)row sparsity."""
        if f2.mat_add(self.b, self.c) != a:
            raise InvalidWitnessError("B + C does not recompose A")
        got_rank = f2.rank(self.b)
        if got_rank > r:
            raise InvalidWitnessError(f"rank(B) = {got_rank} exceeds {r}")
        if layout is None:
            sparsity = f2.row_sparsity(self.c)
        else:
            sparsity = f2.block_row_sparsity(self.c, layout)
        if sparsity > s:
            raise InvalidWitnessError(f"sparsity of C = {sparsity} exceeds {s}")


@dataclass(frozen=True)
class MatrixRigidityResult:
    rigid: bool
    witness: Optional[MatrixDecomposition]
    candidates: int


@dataclass(frozen=True)
class NonRigidityCertificate:
    """Views plus local functions witnessing a large agreement set.

    ``n`` is the block length (1 for plain, per-coordinate rigidity).
    ``locals_[j]`` maps the packed restriction of the input to the viewed
    blocks (block-major, LSB-first) to the j-th output block.
    ``agreement_count`` is the number of inputs on which the local
    composition reproduces the function.
    """

    k: int
    n: int
    s: int
    views: Tuple[Tuple[int, ...], ...]
    locals_: Tuple[Tuple[int, ...], ...]
    agreement_count: int

    def __post_init__(self):
        if len(self.views) != self.k or len(self.locals_) != self.k:
            raise DimensionError(f"need {self.k} views and local tables")
        for view, table in zip(self.views, self.locals_):
            if len(view) != self.s or tuple(sorted(set(view))) != view:
                raise DimensionError("views must be sorted size-s index sets")
            if len(table) != 1 << (self.n * self.s):
                raise DimensionError("local table has wrong size")
            if any(v >> self.n for v in table):
                raise DimensionError("local output wider than block length")

    def restriction(self, x: int, view: Tuple[int, ...]) -> int:
        """Pack the viewed blocks of x, block-major over ascending view order."""
        z = 0
        for pos, blk in enumerate(view):
            z |= ((x >> (blk * self.n)) & ((1 << self.n) - 1)) << (pos * self.n)
        return z

    def local_output(self, x: int) -> int:
        out = 0
        for j in range(self.k):
            out |= self.locals_[j][self.restriction(x, self.views[j])] << (j * self.n)
        return out

    def recount(self, evaluate: Callable[[int], int]) -> int:
        """Exact recount of the agreement set against an evaluator."""
        total_bits = self.n * self.k
        return sum(
            1 for x in range(1 << total_bits) if evaluate(x) == self.local_output(x)
        )

    def validate(self, evaluate: Callable[[int], int]) -> None:
        got = self.recount(evaluate)
        if got != self.agreement_count:
            raise InvalidWitnessError(
                f"agreement recount {got} != recorded {self.agreement_count}"
            )

    def agreement_fraction(self) -> Fraction:
        return Fraction(self.agreement_count, 1 << (self.n * self.k))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "s": self.s,
            "views": [list(v) for v in self.views],
            "locals": [list(t) for t in self.locals_],
            "agreement_count": self.agreement_count,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NonRigidityCertificate":
        return cls(
            k=obj["k"],
            n=obj["n"],
            s=obj["s"],
            views=tuple(tuple(v) for v in obj["views"]),
            locals_=tuple(tuple(t) for t in obj["locals"]),
            agreement_count=obj["agreement_count"],
        )


@dataclass(frozen=True)
class FunctionRigidityResult:
    rigid: bool
    worst_views: ViewFamily
    worst_value: Fraction
    certificate: Optional[NonRigidityCertificate]


def value_below_threshold(value: Fraction, r: Fraction) -> bool:
    """Exact test of value < 2^(-r) for nonnegative rational r."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("rigidity parameter r must be nonnegative")
    # value < 2^(-p/q)  <=>  value^q * 2^p < 1  (both sides nonnegative)
    return value**r.denominator * (1 << r.numerator) < 1


def _row_patterns(cols: int, s: int) -> List[int]:
    """All row masks with at most s ones, by weight then position."""
    pats = []
    for w in range(min(s, cols) + 1):
        for sub in combinations(range(cols), w):
            pats.append(sum(1 << j for j in sub))
    return pats


def is_matrix_rigid(
    a: BitMatrix, r: int, s: int, budget: int = DEFAULT_MATRIX_BUDGET
) -> MatrixRigidityResult:
    """Exact search over all corrections C with at most s ones per row.

    Not rigid iff some such C makes rank(A + C) <= r; the returned
    decomposition (B = A + C, C) is revalidated before return.
    """
    if a.rows != a.cols:
        raise DimensionError("rigidity is defined for square matrices")
    n = a.rows
    patterns = _row_patterns(n, s)
    total = len(patterns) ** n
    if total > budget:
        raise BudgetExceededError("candidate corrections", total, budget)
    candidates = 0
    for rows in product(patterns, repeat=n):
        candidates += 1
        c = BitMatrix(n, n, rows)
        b = f2.mat_add(a, c)
        if f2.rank(b) <= r:
            witness = MatrixDecomposition(b=b, c=c)
            witness.validate(a, r, s)
            return MatrixRigidityResult(rigid=False, witness=witness, candidates=candidates)
    return MatrixRigidityResult(rigid=True, witness=None, candidates=candidates)


def is_block_rigid_matrix(
    a: BitMatrix,
    layout: BlockLayout,
    r: int,
    s: int,
    budget: int = DEFAULT_MATRIX_BUDGET,
) -> MatrixRigidityResult:
    """Exact block-rigidity search: block-support patterns first, then all
    fillings of the supported blocks."""
    n, k = layout.n, layout.k
    if a.rows != layout.total or a.cols != layout.total:
        raise DimensionError("matrix does not match block layout")
    support_patterns = list(product(_block_supports(k, s), repeat=k))
    entries_per_block = n * n
    total = sum(
        1 << (entries_per_block * sum(len(sup) for sup in pattern))
        for pattern in support_patterns
    )
    if total > budget:
        raise BudgetExceededError("candidate corrections", total, budget)
    candidates = 0
    for pattern in support_patterns:
        slots = [(bi, bj) for bi in range(k) for bj in pattern[bi]]
        for filling in range(1 << (entries_per_block * len(slots))):
            candidates += 1
            c = _build_block_correction(layout, slots, filling)
            b = f2.mat_add(a, c)
            if f2.rank(b) <= r:
                witness = MatrixDecomposition(b=b, c=c)
                witness.validate(a, r, s, layout=layout)
                return MatrixRigidityResult(
                    rigid=False, witness=witness, candidates=candidates
                )
    return MatrixRigidityResult(rigid=True, witness=None, candidates=candidates)


def _block_supports(k: int, s: int) -> List[Tuple[int, ...]]:
    sups = []
    for w in range(min(s, k) + 1):
        sups.extend(combinations(range(k), w))
    return sups


def _build_block_correction(
    layout: BlockLayout, slots: Sequence[Tuple[int, int]], filling: int
) -> BitMatrix:
    n = layout.n
    words = [0] * layout.total
    for idx, (bi, bj) in enumerate(slots):
        block_bits = (filling >> (idx * n * n)) & ((1 << (n * n)) - 1)
        for i in range(n):
            row_bits = (block_bits >> (i * n)) & ((1 << n) - 1)
            words[bi * n + i] |= row_bits << (bj * n)
    return BitMatrix(layout.total, layout.total, tuple(words))


def tensor_lift(f: BooleanFunction, n: int) -> Callable[[int], int]:
    """Evaluator applying f to each of the n rows of a block-major input.

    Input bit (i, j) lives at position j*n + i; output likewise.
    """
    if n < 1:
        raise DimensionError("n must be positive")
    k = f.k

    def evaluate(x: int) -> int:
        if x >> (n * k):
            raise DimensionError(f"input has bits beyond length {n * k}")
        y = 0
        for i in range(n):
            v = 0
            for j in range(k):
                v |= ((x >> (j * n + i)) & 1) << j
            out = f.table[v]
            for j in range(k):
                y |= ((out >> j) & 1) << (j * n + i)
        return y

    evaluate.input_len = n * k  # type: ignore[attr-defined]
    return evaluate


def _certificate_from_strategy(
    f: BooleanFunction, family: ViewFamily, report: games.ValueReport
) -> NonRigidityCertificate:
    cert = NonRigidityCertificate(
        k=f.k,
        n=1,
        s=family.s,
        views=family.sets,
        locals_=report.strategy.tables,
        agreement_count=int(report.value * (1 << f.k)),
    )
    cert.validate(f)
    return cert


def is_function_rigid(
    f: BooleanFunction,
    r: Fraction,
    s: int,
    budget: int = DEFAULT_FUNCTION_BUDGET,
) -> FunctionRigidityResult:
    """f is (r, s)-rigid iff every view family's game value is < 2^(-r).

    Sweeps all families in lexicographic order; ties for the worst value
    keep the earlier family, so reports are deterministic.
    """
    k = f.k
    n_families = _binom(k, s) ** k
    cost = n_families * (1 << (k * (1 << s)))
    if cost > budget:
        raise BudgetExceededError("families x joint strategies", cost, budget)
    worst_family = None
    worst_report = None
    for family in all_view_families(k, s):
        report = games.value_exact(games.build_gs(f, family.sets))
        if worst_report is None or report.value > worst_report.value:
            worst_family = family
            worst_report = report
    assert worst_family is not None and worst_report is not None
    rigid = value_below_threshold(worst_report.value, Fraction(r))
    certificate = None
    if not rigid:
        certificate = _certificate_from_strategy(f, worst_family, worst_report)
    return FunctionRigidityResult(
        rigid=rigid,
        worst_views=worst_family,
        worst_value=worst_report.value,
        certificate=certificate,
    )


def is_block_rigid_function(
    f: BooleanFunction,
    n: int,
    r: Fraction,
    s: int,
    budget: int = DEFAULT_FUNCTION_BUDGET,
) -> FunctionRigidityResult:
    """The lift of f is (r, s)-block-rigid iff every view family's n-fold
    repeated game value is < 2^(-r)."""
    k = f.k
    table_bits = k * n * (1 << (n * s))
    n_families = _binom(k, s) ** k
    if table_bits > 62 or n_families * (1 << min(table_bits, 62)) > budget:
        raise BudgetExceededError(
            "families x repeated joint strategies",
            n_families * (1 << min(table_bits, 62)),
            budget,
        )
    worst_family = None
    worst_report = None
    for family in all_view_families(k, s):
        base = games.build_gs(f, family.sets)
        report = games.value_exact(games.repeat(base, n))
        if worst_report is None or report.value > worst_report.value:
            worst_family = family
            worst_report = report
    assert worst_family is not None and worst_report is not None
    rigid = value_below_threshold(worst_report.value, Fraction(r))
    certificate = None
    if not rigid:
        certificate = NonRigidityCertificate(
            k=k,
            n=n,
            s=s,
            views=worst_family.sets,
            locals_=worst_report.strategy.tables,
            agreement_count=int(worst_report.value * (1 << (n * k))),
        )
        certificate.validate(tensor_lift(f, n))
    return FunctionRigidityResult(
        rigid=rigid,
        worst_views=worst_family,
        worst_value=worst_report.value,
        certificate=certificate,
    )


def amplify_nonrigidity(
    f: BooleanFunction,
    cert: NonRigidityCertificate,
    n: int,
    validate_budget: int = 1 << 20,
) -> NonRigidityCertificate:
    """Lift a certificate for f to one for the n-fold tensor lift.

    The lifted locals act coordinatewise, so the agreement set is the
    n-fold product of the base agreement set and its count is exactly
    (base count)^n.  Revalidated by exact recount when small enough.
    """
    if cert.n != 1 or cert.k != f.k:
        raise InvalidWitnessError("certificate does not fit the base function")
    cert.validate(f)
    s = cert.s
    lifted_locals = []
    for table in cert.locals_:
        big = []
        for z in range(1 << (n * s)):
            out = 0
            for i in range(n):
                v = 0
                for pos in range(s):
                    v |= ((z >> (pos * n + i)) & 1) << pos
                out |= table[v] << i
            big.append(out)
        lifted_locals.append(tuple(big))
    lifted = NonRigidityCertificate(
        k=cert.k,
        n=n,
        s=s,
        views=cert.views,
        locals_=tuple(lifted_locals),
        agreement_count=cert.agreement_count**n,
    )
    if 1 << (n * cert.k) <= validate_budget:
        lifted.validate(tensor_lift(f, n))
    return lifted


@dataclass(frozen=True)
class CensusResult:
    total: int
    rigid_count: int
    mode: str
    values: Tuple[Fraction, ...]  # worst game value per examined function

    @property
    def rigid_fraction(self) -> Fraction:
        return Fraction(self.rigid_count, self.total)


def rigidity_census(
    k: int,
    r: Fraction,
    s: int,
    mode: str = "exhaustive",
    count: int = 0,
    seed: int = 0,
    budget: int = DEFAULT_FUNCTION_BUDGET,
) -> CensusResult:
    """Fraction of functions {0,1}^k -> {0,1}^k that are (r, s)-rigid.

    Exhaustive mode enumerates every function; sample mode draws ``count``
    functions from a Mersenne Twister generator seeded with ``seed``
    (bit-stable across platforms), so runs reproduce exactly.
    """
    per_function = _binom(k, s) ** k * (1 << (k * (1 << s)))
    if mode == "exhaustive":
        n_functions = (1 << k) ** (1 << k)
        if n_functions * per_function > budget:
            raise BudgetExceededError(
                "functions x per-function cost", n_functions * per_function, budget
            )
        functions = (
            BooleanFunction(k, tab)
            for tab in product(range(1 << k), repeat=1 << k)
        )
        total = n_functions
    elif mode == "sample":
        if count < 1:
            raise ValueError("sample mode needs count >= 1")
        if count * per_function > budget:
            raise BudgetExceededError(
                "functions x per-function cost", count * per_function, budget
            )
        rng = random.Random(seed)
        functions = (random_function(rng, k) for _ in range(count))
        total = count
    else:
        raise ValueError(f"unknown census mode {mode!r}")
    rigid_count = 0
    values = []
    for fn in functions:
        res = is_function_rigid(fn, r, s, budget=budget)
        values.append(res.worst_value)
        if res.rigid:
            rigid_count += 1
    return CensusResult(
        total=total, rigid_count=rigid_count, mode=mode, values=tuple(values)
    )


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


@dataclass(frozen=True)
class Depth2Circuit:
    """Two layers: w middle gates over all inputs, then outputs combining
    their direct wires with the middle values.

    ``middles[t]`` is a full truth table (tuple over 2^n_in inputs).
    ``outputs[i]`` is (direct_wires, table) where the table index packs
    the direct bits (ascending wire order, LSB first) followed by the w
    middle bits.
    """

    n_in: int
    middles: Tuple[Tuple[int, ...], ...]
    outputs: Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]

    def __post_init__(self):
        for table in self.middles:
            if len(table) != 1 << self.n_in:
                raise DimensionError("middle gate table has wrong size")
        for wires, table in self.outputs:
            if tuple(sorted(set(wires))) != wires:
                raise DimensionError("direct wires must be sorted and distinct")
            if len(table) != 1 << (len(wires) + self.width):
                raise DimensionError("output gate table has wrong size")

    @property
    def width(self) -> int:
        return len(self.middles)

    @property
    def degree(self) -> int:
        return max((len(w) for w, _ in self.outputs), default=0)

    def middle_values(self, x: int) -> int:
        h = 0
        for t, table in enumerate(self.middles):
            h |= table[x] << t
        return h

    def evaluate(self, x: int) -> int:
        h = self.middle_values(x)
        y = 0
        for i, (wires, table) in enumerate(self.outputs):
            idx = 0
            for pos, b in enumerate(wires):
                idx |= ((x >> b) & 1) << pos
            idx |= h << len(wires)
            y |= table[idx] << i
        return y


def rank_factor(b: BitMatrix, r: int) -> Tuple[BitMatrix, BitMatrix]:
    """Factor B = B1 * B2 with inner dimension rank(B) <= r.

    B2 collects the reduced-echelon basis rows; coefficients for each row
    of B are read off at the pivot columns.
    """
    got = f2.rank(b)
    if got > r:
        raise InvalidWitnessError(f"rank {got} exceeds allowed {r}")
    # Reduced row echelon form with pivot bookkeeping.
    work = list(b.row_words)
    pivots: List[int] = []
    basis: List[int] = []
    rr = 0
    for col in range(b.cols):
        pivot = None
        for i in range(rr, len(work)):
            if (work[i] >> col) & 1:
                pivot = i
                break
        if pivot is None:
            continue
        work[rr], work[pivot] = work[pivot], work[rr]
        for i in range(len(work)):
            if i != rr and ((work[i] >> col) & 1):
                work[i] ^= work[rr]
        pivots.append(col)
        rr += 1
    basis = work[:rr]
    b2 = BitMatrix(rr, b.cols, tuple(basis))
    coeff_words = []
    for w in b.row_words:
        cw = 0
        for l, col in enumerate(pivots):
            cw |= ((w >> col) & 1) << l
        coeff_words.append(cw)
    b1 = BitMatrix(b.rows, rr, tuple(coeff_words))
    if f2.mat_mul(b1, b2) != b:
        raise InvalidWitnessError("rank factorization failed to recompose")
    return b1, b2


def depth2_from_decomposition(
    a: BitMatrix, b1: BitMatrix, b2: BitMatrix, c: BitMatrix
) -> Depth2Circuit:
    """Circuit for x -> A x from A = B1*B2 + C: middle gates compute B2*x,
    output i xors (B1 row i) . h with the parity of its direct wires."""
    if a.rows != a.cols:
        raise DimensionError("need a square target matrix")
    n = a.rows
    if f2.mat_add(f2.mat_mul(b1, b2), c) != a:
        raise InvalidWitnessError("B1*B2 + C does not recompose A")
    w = b1.cols
    middles = tuple(
        tuple(f2.mat_vec(b2, x) >> t & 1 for x in range(1 << n)) for t in range(w)
    )
    outputs = []
    for i in range(n):
        wires = tuple(j for j in range(n) if c.entry(i, j))
        coeff = b1.row_words[i]
        table = []
        for idx in range(1 << (len(wires) + w)):
            direct = idx & ((1 << len(wires)) - 1)
            h = idx >> len(wires)
            bit = (direct.bit_count() + (coeff & h).bit_count()) & 1
            table.append(bit)
        outputs.append((wires, tuple(table)))
    circuit = Depth2Circuit(n_in=n, middles=middles, outputs=tuple(outputs))
    for x in range(1 << n):
        if circuit.evaluate(x) != f2.mat_vec(a, x):
            raise InvalidWitnessError("circuit disagrees with A on some input")
    return circuit


def nonrigidity_from_depth2(
    circuit: Depth2Circuit, budget: int = 1 << 20
) -> Tuple[NonRigidityCertificate, int]:
    """Certificate with parameters (width, degree) from a depth-2 circuit.

    Fix the most common middle-layer value vector; on its fiber each
    output depends only on its direct wires.  Returns the certificate and
    the fiber size (>= 2^(n_in - width) by pigeonhole).  Views smaller
    than the degree are padded with the smallest unused indices.
    """
    n = circuit.n_in
    if len(circuit.outputs) != n:
        raise DimensionError("certificate extraction needs as many outputs as inputs")
    if (1 << n) > budget:
        raise BudgetExceededError("inputs to scan", 1 << n, budget)
    fibers: dict[int, int] = {}
    for x in range(1 << n):
        h = circuit.middle_values(x)
        fibers[h] = fibers.get(h, 0) + 1
    # Largest fiber; ties to the smallest middle-value vector.
    h0 = min(fibers, key=lambda h: (-fibers[h], h))
    fiber_size = fibers[h0]
    d = circuit.degree
    views = []
    locals_ = []
    for i, (wires, table) in enumerate(circuit.outputs):
        padded = list(wires)
        nxt = 0
        while len(padded) < d:
            if nxt not in padded:
                padded.append(nxt)
            nxt += 1
        padded.sort()
        positions = [padded.index(b) for b in wires]
        local = []
        for z in range(1 << d):
            direct = 0
            for pos, p in enumerate(positions):
                direct |= ((z >> p) & 1) << pos
            local.append(table[direct | (h0 << len(wires))])
        views.append(tuple(padded))
        locals_.append(tuple(local))
    truth = tuple(circuit.evaluate(x) for x in range(1 << n))
    cert = NonRigidityCertificate(
        k=n,
        n=1,
        s=d,
        views=tuple(views),
        locals_=tuple(locals_),
        agreement_count=sum(
            1
            for x in range(1 << n)
            if truth[x]
            == sum(
                locals_[i][_restrict_bits(x, views[i])] << i for i in range(n)
            )
        ),
    )
    cert.validate(lambda x: truth[x])
    if cert.agreement_count < fiber_size:
        raise InvalidWitnessError("agreement set smaller than the fiber")
    return cert, fiber_size


def _restrict_bits(x: int, view: Tuple[int, ...]) -> int:
    z = 0
    for pos, b in enumerate(view):
        z |= ((x >> b) & 1) << pos
    return z
