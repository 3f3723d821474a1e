"""Random exact matrices from the classes the package works with.

These are sampling conveniences for tests and fixtures; none of them is a
uniform law on its class.  All take a ``numpy.random.Generator`` so callers
control reproducibility.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from permlab.errors import PreconditionError
from permlab.matrix import Matrix, make_matrix


def _frac(rng: np.random.Generator, denom: int, lo: int = 0) -> Fraction:
    return Fraction(int(rng.integers(lo, denom + 1)), denom)


def random_nonnegative(n: int, rng: np.random.Generator, denom: int = 8, max_num: int = 8) -> Matrix:
    return make_matrix(n, [[Fraction(int(rng.integers(0, max_num + 1)), denom) for _ in range(n)] for _ in range(n)])


def _sparse_weights(n: int, rng: np.random.Generator, density: float) -> list[int]:
    w = [int(rng.integers(1, 10)) if rng.random() < density else 0 for _ in range(n)]
    return w


def random_row_substochastic(
    n: int, rng: np.random.Generator, denom: int = 12, zero_diagonal: bool = False
) -> Matrix:
    rows = []
    density = float(rng.uniform(0.2, 1.0))
    for i in range(n):
        w = _sparse_weights(n, rng, density)
        if zero_diagonal:
            w[i] = 0
        total = sum(w)
        target = _frac(rng, denom)
        if rng.random() < 0.3:
            target = Fraction(1)
        rows.append([Fraction(0)] * n if total == 0 else [target * x / total for x in w])
    return make_matrix(n, rows)


def random_permutation(n: int, rng: np.random.Generator, derangement: bool = False) -> list[int]:
    if derangement and n < 2:
        raise PreconditionError("no derangement of a single point")
    while True:
        p = [int(x) for x in rng.permutation(n)]
        if not derangement or all(p[i] != i for i in range(n)):
            return p


def random_doubly_stochastic(n: int, rng: np.random.Generator, terms: int = 3, zero_diagonal: bool = False) -> Matrix:
    """Rational convex combination of random permutation matrices."""
    weights = [int(rng.integers(1, 7)) for _ in range(terms)]
    total = sum(weights)
    acc = [[Fraction(0)] * n for _ in range(n)]
    for w in weights:
        p = random_permutation(n, rng, derangement=zero_diagonal)
        for i in range(n):
            acc[i][p[i]] += Fraction(w, total)
    return make_matrix(n, acc)


def random_doubly_substochastic(n: int, rng: np.random.Generator, denom: int = 12) -> Matrix:
    density = float(rng.uniform(0.2, 1.0))
    raw = [_sparse_weights(n, rng, density) for _ in range(n)]
    c = max([sum(r) for r in raw] + [sum(col) for col in zip(*raw)])
    if c == 0:
        return make_matrix(n, raw)
    u = _frac(rng, denom, lo=1)
    if rng.random() < 0.3:
        u = Fraction(1)
    return make_matrix(n, [[u * x / c for x in r] for r in raw])


def _weights_with_sum(k: int, s: Fraction, rng: np.random.Generator, denom: int) -> list[Fraction]:
    """k weights in [0, 1] summing to s (requires s <= k)."""
    w = [s / k] * k
    for _ in range(2 * k):
        i, j = (int(x) for x in rng.choice(k, size=2, replace=False)) if k > 1 else (0, 0)
        if i == j:
            break
        room = min(w[i], 1 - w[j])
        amt = room * _frac(rng, denom)
        w[i] -= amt
        w[j] += amt
    return w


def random_omega_s(
    n: int,
    s,
    rng: np.random.Generator,
    terms: int = 3,
    zero_diagonal: bool = False,
    denom: int = 6,
) -> Matrix:
    """Doubly substochastic matrix with entry sum exactly ``s``.

    Convex combination of weighted partial permutation matrices, each with
    total ``s``; convexity of the slice keeps the result inside it.
    """
    s = Fraction(s)
    if not 0 <= s <= n:
        raise PreconditionError(f"need 0 <= s <= n, got s={s}, n={n}")
    if zero_diagonal and n == 1 and s > 0:
        raise PreconditionError("a 1x1 zero-diagonal matrix has sum 0")
    mix = [int(rng.integers(1, 5)) for _ in range(terms)]
    mix_total = sum(mix)
    acc = [[Fraction(0)] * n for _ in range(n)]
    kmin = max(1, math.ceil(s))
    for m in mix:
        if s == 0:
            break
        k = int(rng.integers(kmin, n + 1))
        p = random_permutation(n, rng, derangement=zero_diagonal and n > 1)
        rows = sorted(int(x) for x in rng.choice(n, size=k, replace=False))
        for r, w in zip(rows, _weights_with_sum(k, s, rng, denom)):
            acc[r][p[r]] += Fraction(m, mix_total) * w
    return make_matrix(n, acc)


def random_functional(
    n: int, rng: np.random.Generator, weights: tuple = (), density: float = 0.8, denom: int = 8
) -> Matrix:
    """Zero diagonal, at most one positive entry per row, entries in (0, 1]."""
    rows = [[Fraction(0)] * n for _ in range(n)]
    if n == 1:
        return make_matrix(1, rows)
    for i in range(n):
        if rng.random() >= density:
            continue
        j = int(rng.integers(0, n - 1))
        j = j if j < i else j + 1
        if weights:
            rows[i][j] = Fraction(weights[int(rng.integers(0, len(weights)))])
        else:
            rows[i][j] = _frac(rng, denom, lo=1)
    return make_matrix(n, rows)


def blend(a: Matrix, b: Matrix, t) -> Matrix:
    """t*a + (1-t)*b."""
    t = Fraction(t)
    return make_matrix(a.n, [[t * x + (1 - t) * y for x, y in zip(r, q)] for r, q in zip(a.entries, b.entries)])
