"""Permanent evaluators.

Three routes to the same number:

* ``permanent_naive`` -- the defining sum over all n! permutations (oracle);
* ``permanent_ryser`` -- Ryser's inclusion-exclusion written level by level, exact,
  returning the per-level partial sums;
* ``permanent_gray``  -- compiled float kernel for the search loop.

Exact routes clear denominators first and work on Python integers, which is far
faster than Fraction arithmetic in the inner loops.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np

from permlab import _kernels
from permlab.errors import DimensionError, OrderGuardError, PreconditionError
from permlab.matrix import Matrix, i_minus, is_doubly_substochastic

NAIVE_MAX_N = 9
RYSER_MAX_N = 14
GRAY_MAX_N = 30

# subsets are enumerated exhaustively when 2^n is at most this
SIGN_EXHAUSTIVE_LIMIT = 1 << 16
SIGN_SAMPLE_SEED = 20160901


def _integer_form(a: Matrix) -> tuple[list[list[int]], int]:
    """Return (integer rows, D) with a = rows / D."""
    d = 1
    for r in a.entries:
        for v in r:
            d = math.lcm(d, v.denominator)
    rows = [[v.numerator * (d // v.denominator) for v in r] for r in a.entries]
    return rows, d


def permanent_naive(a: Matrix, max_n: int = NAIVE_MAX_N) -> Fraction:
    if a.n > max_n:
        raise OrderGuardError("permanent_naive", a.n, max_n)
    rows, d = _integer_form(a)
    n = a.n
    total = 0
    for p in permutations(range(n)):
        prod = 1
        for i in range(n):
            prod *= rows[i][p[i]]
            if not prod:
                break
        total += prod
    return Fraction(total, d**n)


@dataclass(frozen=True)
class RyserTrace:
    """``per_level_sums[m]`` is (-1)^m times the sum of S(A_m) over all m-column replacements."""

    per_level_sums: tuple[Fraction, ...]
    total: Fraction


def _ryser_levels(rows: list[list[int]]) -> list[int]:
    n = len(rows)
    row_total = [sum(r) for r in rows]
    cols = [[rows[i][j] for i in range(n)] for j in range(n)]
    levels = [0] * n
    # sums[mask] = row sums with the columns in mask zeroed
    sums: list[list[int] | None] = [None] * (1 << n)
    sums[0] = row_total
    for mask in range(1 << n):
        if mask:
            low = mask & -mask
            j = low.bit_length() - 1
            prev = sums[mask ^ low]
            c = cols[j]
            sums[mask] = [prev[i] - c[i] for i in range(n)]
        m = mask.bit_count()
        if m == n:
            continue
        prod = 1
        for v in sums[mask]:
            prod *= v
            if not prod:
                break
        levels[m] += prod
    return [(-1) ** m * s for m, s in enumerate(levels)]


def permanent_ryser(a: Matrix, max_n: int = RYSER_MAX_N) -> RyserTrace:
    if a.n > max_n:
        raise OrderGuardError("permanent_ryser", a.n, max_n)
    rows, d = _integer_form(a)
    scale = d**a.n
    levels = _ryser_levels(rows)
    return RyserTrace(tuple(Fraction(v, scale) for v in levels), Fraction(sum(levels), scale))


def permanent(a: Matrix, max_n: int = RYSER_MAX_N) -> Fraction:
    return permanent_ryser(a, max_n).total


def permanent_gray(a, max_n: int = GRAY_MAX_N) -> float:
    """Float permanent; accepts a Matrix or anything numpy can turn into a square array."""
    arr = a.to_numpy() if isinstance(a, Matrix) else np.array(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("permanent_gray: non-finite entries")
    if arr.shape[0] > max_n:
        raise OrderGuardError("permanent_gray", arr.shape[0], max_n)
    return float(_kernels.gray_permanent(np.ascontiguousarray(arr)))


def per_i_minus(a: Matrix, max_n: int = RYSER_MAX_N) -> Fraction:
    """per(I - A), exact."""
    if a.n > max_n:
        raise OrderGuardError("permanent_ryser", a.n, max_n)
    rows, d = _integer_form(a)
    # D(I - A) in integers, so no intermediate rational matrix is built
    for i, r in enumerate(rows):
        for j in range(a.n):
            r[j] = -r[j]
        r[i] += d
    return Fraction(sum(_ryser_levels(rows)), d**a.n)


def determinant(a: Matrix) -> Fraction:
    """Exact determinant via Bareiss fraction-free elimination."""
    rows, d = _integer_form(a)
    n = a.n
    m = [r[:] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return Fraction(sign * m[n - 1][n - 1], d**n)


@dataclass(frozen=True)
class SignStructureReport:
    """Row-sum sign checks on P = I - A for doubly substochastic A.

    ``replaced_row_nonpos`` holds ``(subset, i, ok)`` for every checked subset
    and every replaced index ``i`` in it.  ``level_sign_ok[m]`` says whether
    every checked product at level ``m`` has sign (-1)^m (or is zero).
    """

    row_sum_nonneg: tuple[bool, ...]
    replaced_row_nonpos: tuple[tuple[tuple[int, ...], int, bool], ...]
    level_sign_ok: tuple[bool, ...]
    exhaustive: bool

    @property
    def ok(self) -> bool:
        return (
            all(self.row_sum_nonneg)
            and all(f for _, _, f in self.replaced_row_nonpos)
            and all(self.level_sign_ok)
        )


def _sample_subsets(n: int, count: int, seed: int) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        m = rng.randint(1, n - 1)
        out.append(tuple(sorted(rng.sample(range(n), m))))
    return out


def check_sign_structure(a: Matrix, subset_samples: int = 4096, seed: int = SIGN_SAMPLE_SEED) -> SignStructureReport:
    if not is_doubly_substochastic(a):
        raise PreconditionError("check_sign_structure requires a doubly substochastic matrix")
    n = a.n
    rows, _ = _integer_form(i_minus(a))
    row_total = [sum(r) for r in rows]
    exhaustive = (1 << n) <= SIGN_EXHAUSTIVE_LIMIT
    if exhaustive:
        subsets = [c for m in range(1, n) for c in combinations(range(n), m)]
    else:
        subsets = _sample_subsets(n, subset_samples, seed)

    level_ok = [True] * n
    level_ok[0] = all(v >= 0 for v in row_total) and math.prod(row_total) >= 0
    replaced = []
    for subset in subsets:
        sums = [row_total[i] - sum(rows[i][j] for j in subset) for i in range(n)]
        for i in subset:
            replaced.append((subset, i, sums[i] <= 0))
        prod = math.prod(sums)
        m = len(subset)
        if prod != 0 and (prod > 0) != (m % 2 == 0):
            level_ok[m] = False
    return SignStructureReport(
        row_sum_nonneg=tuple(v >= 0 for v in row_total),
        replaced_row_nonpos=tuple(replaced),
        level_sign_ok=tuple(level_ok),
        exhaustive=exhaustive,
    )
