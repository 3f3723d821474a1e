"""Closed-form bounds on per(I - A), the matrices that attain them, and the
sequence-optimization steps behind the fixed-sum bound.

Notation: ``s`` is the entry sum, ``e`` the greatest even integer <= s.  For A
doubly substochastic with sum s, and either n even or s <= n - 1,

    max per(I - A) = 2^(e/2) * (1 + ((s - e)/2)^2),

attained by M2 + ... + M2 + S2 + 0 (block diagonal).  For odd n and
s in (n - 1, n] only conjectures exist; ``conjecture_values`` evaluates them
under both the literal and the self-consistent reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from permlab.errors import PreconditionError
from permlab.matrix import M2, Matrix, as_fraction, direct_sum, make_matrix, row_sums, zeros
from permlab.permanent import per_i_minus

# equality point of (s^2 - 5s + 12)/4 and 6 - 2s, i.e. the root of s^2 + 3s - 12
OMEGA3_THRESHOLD = (-3 + math.sqrt(57)) / 2


@dataclass(frozen=True)
class BoundReport:
    n: int
    s: Fraction
    e: int
    value: Fraction
    source: str
    witness: Matrix | None
    hypotheses_met: bool
    reading: str | None = None  # literal | consistent, conjectures only
    supremum: bool = False
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "s", as_fraction(self.s))
        object.__setattr__(self, "value", as_fraction(self.value))


def greatest_even_le(s) -> int:
    return 2 * math.floor(as_fraction(s) / 2)


def fixed_sum_value(s) -> Fraction:
    """2^(e/2) * (1 + ((s - e)/2)^2)."""
    s = as_fraction(s)
    e = greatest_even_le(s)
    return 2 ** (e // 2) * (1 + ((s - e) / 2) ** 2)


def malek_bound(n: int) -> Fraction:
    if n < 1:
        raise PreconditionError("order must be positive")
    return Fraction(2 ** (n // 2))


def _theorem_applies(n: int, s: Fraction) -> bool:
    return n % 2 == 0 or s <= n - 1


def theorem_bound(n: int, s) -> BoundReport:
    s = as_fraction(s)
    if n < 1 or not 0 <= s <= n:
        raise PreconditionError(f"need n >= 1 and 0 <= s <= n, got n={n}, s={s}")
    met = _theorem_applies(n, s)
    return BoundReport(
        n=n,
        s=s,
        e=greatest_even_le(s),
        value=fixed_sum_value(s),
        source="fixed-sum maximum over doubly substochastic matrices",
        witness=construct_extremal(n, s) if met else None,
        hypotheses_met=met,
        note="" if met else "n odd and s > n - 1: formula evaluated outside its hypotheses",
    )


def subdefect_bound(n: int, k: int) -> BoundReport:
    """Supremum of per(I - A) over the sub-defect class k, i.e. sums in [n-k, n-k+1).

    The sum is taken as min(n - k + 1, n): for k = 0 the class is the doubly
    stochastic slice s = n, and n + 1 would fall outside every admissible sum.
    """
    lo = 1 if n % 2 else 0
    if n < 1 or not lo <= k <= n:
        raise PreconditionError(f"sub-defect must lie in [{lo}, {n}] for n={n}, got {k}")
    s = Fraction(min(n - k + 1, n))
    met = n % 2 == 0 or k > 1
    return BoundReport(
        n=n,
        s=s,
        e=greatest_even_le(s),
        value=fixed_sum_value(s),
        source="sub-defect supremum",
        witness=None,
        hypotheses_met=met,
        supremum=k > 0,
        note="" if met else "n odd and k = 1 is not covered",
    )


def s2_block(x) -> Matrix:
    x = as_fraction(x)
    return make_matrix(2, [[0, x], [x, 0]])


def construct_extremal(n: int, s) -> Matrix:
    """M2^(e/2) + S2 + 0_(n-e-2); S2 and the zero block are dropped when empty."""
    s = as_fraction(s)
    if n < 1 or not 0 <= s <= n:
        raise PreconditionError(f"need 0 <= s <= n, got n={n}, s={s}")
    if not _theorem_applies(n, s):
        raise PreconditionError(
            f"n={n} odd with s={s} > n-1: no proven extremal matrix; use the numerical search"
        )
    e = greatest_even_le(s)
    blocks = [M2] * (e // 2)
    if s > e:
        blocks.append(s2_block((s - e) / 2))
    used = sum(b.n for b in blocks)
    if used < n:
        blocks.append(zeros(n - used))
    return direct_sum(blocks)


def m3_block(t) -> Matrix:
    return make_matrix(3, [[0, 1, 0], [1, 0, 0], [0, as_fraction(t), 0]])


def construct_rowsub_odd(n: int, s) -> Matrix:
    """M2^((n-3)/2) + M3 with M3 = (0 1 0; 1 0 0; 0 s-(n-1) 0).

    Row substochastic with per(I - A) = 2^((n-1)/2), but the second column of
    M3 sums to s - n + 2 > 1, so it is not doubly substochastic.
    """
    s = as_fraction(s)
    if n < 3 or n % 2 == 0:
        raise PreconditionError(f"n must be odd and >= 3, got {n}")
    if not n - 1 < s <= n:
        raise PreconditionError(f"need n-1 < s <= n, got s={s}")
    return direct_sum([M2] * ((n - 3) // 2) + [m3_block(s - (n - 1))])


def omega3_a0(s) -> Matrix:
    s = as_fraction(s)
    h = Fraction(1, 2)
    return make_matrix(3, [[0, h, s / 2 - 1], [h, 0, h], [s / 2 - 1, h, 0]])


def omega3_a1(s) -> Matrix:
    s = as_fraction(s)
    return make_matrix(3, [[0, 1, 0], [1, 0, 0], [0, 0, s - 2]])


def omega3_a0_value(s) -> Fraction:
    s = as_fraction(s)
    return (s * s - 5 * s + 12) / 4


def omega3_a1_value(s) -> Fraction:
    return 6 - 2 * as_fraction(s)


def omega3_candidates(s) -> tuple[Matrix, Matrix, Fraction, Fraction]:
    s = as_fraction(s)
    if not 2 < s <= 3:
        raise PreconditionError(f"need 2 < s <= 3, got {s}")
    return omega3_a0(s), omega3_a1(s), omega3_a0_value(s), omega3_a1_value(s)


def above_omega3_threshold(s) -> bool:
    """s > (-3 + sqrt(57))/2, decided exactly."""
    s = as_fraction(s)
    return 2 * s + 3 > 0 and (2 * s + 3) ** 2 > 57


def circulant3(x) -> Matrix:
    x = as_fraction(x)
    if not 0 <= x <= 1:
        raise PreconditionError(f"need 0 <= x <= 1, got {x}")
    y = 1 - x
    return make_matrix(3, [[0, x, y], [y, 0, x], [x, y, 0]])


# -- sequence lemmas ------------------------------------------------------------


@dataclass(frozen=True)
class SequenceProfile:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(as_fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(not 0 <= v <= 1 for v in vals):
            raise PreconditionError(f"profile entries must lie in [0, 1]: {vals}")
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise PreconditionError(f"profile must be nonincreasing: {vals}")

    @property
    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    @classmethod
    def of(cls, values: Sequence) -> SequenceProfile:
        """Sort into nonincreasing order first."""
        return cls(tuple(sorted((as_fraction(v) for v in values), reverse=True)))


def sequence_objective(z: SequenceProfile) -> Fraction:
    """1 + sum over nonempty index sets of the product of squares.

    Computed through elementary symmetric polynomials of z_i^2; it equals
    prod(1 + z_i^2).
    """
    elem = [Fraction(1)]  # elem[k] = e_k of the squares seen so far
    for v in z.values:
        sq = v * v
        elem = [elem[k] + (sq * elem[k - 1] if k else 0) for k in range(len(elem))] + [sq * elem[-1]]
    return sum(elem, Fraction(0))


def sequence_shift(z: SequenceProfile) -> SequenceProfile:
    """Move eps = min(1 - z_1, z_n) from the smallest entry to the largest."""
    v = list(z.values)
    if len(v) < 2:
        raise PreconditionError("need at least two entries")
    if not (0 < v[-1] and v[0] < 1):
        raise PreconditionError(f"need 0 < z_n and z_1 < 1, got {tuple(v)}")
    eps = min(1 - v[0], v[-1])
    v[0] += eps
    v[-1] -= eps
    return SequenceProfile.of(v)


def sequence_ascend(z: SequenceProfile) -> tuple[SequenceProfile, int]:
    """Shift the strictly fractional part of z until at most one entry is fractional.

    Returns the fixed point and the number of shifts applied.
    """
    vals = list(z.values)
    shifts = 0
    while True:
        active = [i for i, v in enumerate(vals) if 0 < v < 1]
        if len(active) < 2:
            return SequenceProfile.of(vals), shifts
        sub = sequence_shift(SequenceProfile(tuple(vals[i] for i in active)))
        for i, v in zip(active, sub.values):
            vals[i] = v
        vals = sorted(vals, reverse=True)
        shifts += 1


def sequence_max(s_bar, length: int) -> tuple[Fraction, SequenceProfile]:
    """Max of prod(1 + z_i^2) over [0, 1]^length with sum s_bar: 2^floor * (1 + frac^2)."""
    s_bar = as_fraction(s_bar)
    if s_bar < 0 or s_bar > length:
        raise PreconditionError(f"need 0 <= s_bar <= length, got {s_bar} > {length}")
    whole = math.floor(s_bar)
    frac = s_bar - whole
    vals = [Fraction(1)] * whole
    if len(vals) < length:
        vals.append(frac)
    vals += [Fraction(0)] * (length - len(vals))
    return 2**whole * (1 + frac * frac), SequenceProfile(tuple(vals))


# -- row-sum labeling bound -----------------------------------------------------


def perfect_matchings(items: Sequence[int]):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k, other in enumerate(rest):
        for m in perfect_matchings(rest[:k] + rest[k + 1:]):
            yield [(first, other)] + m


def labeling_bound(a: Matrix, pairing: Sequence[tuple[int, int]] | None = None, exhaustive_max_n: int = 10) -> Fraction:
    """prod over pairs (1 + x_a x_b) with x the row sums of A.

    Without a pairing: the maximum over all perfect matchings when n is at most
    ``exhaustive_max_n`` (an upper bound on per(I - A) for row substochastic A),
    otherwise row sums sorted nonincreasing and paired neighbour to neighbour.
    """
    if a.n % 2:
        raise PreconditionError("labeling bound needs even order")
    x = row_sums(a)

    def value(pairs):
        return math.prod((1 + x[p] * x[q] for p, q in pairs), start=Fraction(1))

    if pairing is not None:
        pairs = [tuple(int(v) for v in p) for p in pairing]
        flat = sorted(v for p in pairs for v in p)
        if any(len(p) != 2 for p in pairs) or flat != list(range(a.n)):
            raise PreconditionError(f"not a perfect matching of 0..{a.n - 1}: {pairing}")
        return value(pairs)
    if a.n <= exhaustive_max_n:
        return max(value(m) for m in perfect_matchings(range(a.n)))
    order = sorted(range(a.n), key=lambda i: (-x[i], i))
    return value(list(zip(order[0::2], order[1::2])))


# -- conjectures ----------------------------------------------------------------

HALF_CIRCULANT = circulant3(Fraction(1, 2))


def omega3_conjectured(s, literal: bool = False) -> Fraction:
    s = as_fraction(s)
    if above_omega3_threshold(s):
        return omega3_a0_value(s)
    return 6 - 4 * s if literal else omega3_a1_value(s)


def _omega3_witness(s) -> Matrix:
    return omega3_a0(s) if above_omega3_threshold(s) else omega3_a1(s)


COPY_NOTE = (
    "literal block form uses (n-1)/2 copies of M2 plus a 3x3 block, which has order n+2; "
    "no witness of order n matches it"
)
BRANCH_NOTE = "literal lower branch 6-4s disagrees with the candidate value 6-2s whose crossover defines the threshold"


def conjecture_values(kind: str, n: int | None = None, s=None) -> tuple[BoundReport, BoundReport]:
    """Evaluate a conjecture; returns (literal, consistent) reports.

    The consistent reading uses (n-3)/2 copies of M2 so the witness has order n,
    and 6 - 2s as the lower omega_3 branch.  Neither reading is a theorem:
    ``hypotheses_met`` is always False.
    """
    if kind == "odd_stochastic":
        if n is None or n < 3 or n % 2 == 0:
            raise PreconditionError(f"odd_stochastic needs odd n >= 3, got {n}")
        s = Fraction(n)
        c = Fraction(3, 2)
        literal = BoundReport(n, s, greatest_even_le(s), 2 ** ((n - 1) // 2) * 3,
                              "odd-order doubly stochastic conjecture", None, False, "literal", note=COPY_NOTE)
        witness = direct_sum([M2] * ((n - 3) // 2) + [HALF_CIRCULANT])
        consistent = BoundReport(n, s, greatest_even_le(s), 2 ** ((n - 3) // 2) * c,
                                 "odd-order doubly stochastic conjecture", witness, False, "consistent")
        return literal, consistent
    if kind == "omega3":
        s = as_fraction(s)
        if not 2 < s <= 3:
            raise PreconditionError(f"omega3 needs 2 < s <= 3, got {s}")
        e = greatest_even_le(s)
        lit_val = omega3_conjectured(s, literal=True)
        literal = BoundReport(3, s, e, lit_val, "piecewise omega_3 conjecture", None, False, "literal",
                              note=BRANCH_NOTE if not above_omega3_threshold(s) else "")
        consistent = BoundReport(3, s, e, omega3_conjectured(s), "piecewise omega_3 conjecture",
                                 _omega3_witness(s), False, "consistent")
        return literal, consistent
    if kind == "odd_substochastic":
        s = as_fraction(s)
        if n is None or n < 3 or n % 2 == 0:
            raise PreconditionError(f"odd_substochastic needs odd n >= 3, got {n}")
        if not n - 1 < s <= n:
            raise PreconditionError(f"need n-1 < s <= n, got s={s}")
        sp = s - n + 3
        c = omega3_conjectured(sp)
        e = greatest_even_le(s)
        literal = BoundReport(n, s, e, 2 ** ((n - 1) // 2) * c, "odd-order fixed-sum conjecture", None, False,
                              "literal", note=COPY_NOTE)
        witness = direct_sum([M2] * ((n - 3) // 2) + [_omega3_witness(sp)])
        consistent = BoundReport(n, s, e, 2 ** ((n - 3) // 2) * c, "odd-order fixed-sum conjecture", witness,
                                 False, "consistent")
        return literal, consistent
    raise PreconditionError(f"unknown conjecture kind {kind!r}")


def certify_witness(report: BoundReport) -> bool:
    """per(I - witness) == value exactly."""
    if report.witness is None:
        return False
    return per_i_minus(report.witness) == report.value
