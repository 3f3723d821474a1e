"""Matrix surgeries that never decrease per(I - A).

* ``epsilon_shift``     move mass from a diagonal entry to another entry of its row;
* ``zero_diagonalize``  repeat the shift until the diagonal is empty;
* ``concentrate_rows``  merge the positive entries of each row into one;
* ``pair_up``           rebuild a functional matrix as 2x2 antidiagonal blocks.

The first three preserve every row sum.  Each returns a step log; steps carry
exact before/after values of per(I - A) when the order is small enough to
evaluate them (``certify_max_n``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from permlab.errors import InfeasibleError, OrderGuardError, PreconditionError
from permlab.matrix import (
    Matrix,
    as_fraction,
    col_sums,
    has_zero_diagonal,
    i_minus,
    is_doubly_substochastic,
    is_functional,
    is_nonnegative,
    is_row_substochastic,
    make_matrix,
)
from permlab.permanent import per_i_minus, permanent

CERTIFY_MAX_N = 10
CONCENTRATE_MAX_N = 10

Preserve = Literal["row_substochastic", "doubly_substochastic"]


@dataclass(frozen=True)
class TransformStep:
    kind: str  # epsilon_shift | row_concentrate | pair_up
    indices: tuple[tuple[int, int], ...]  # (source, target) positions
    epsilon: Fraction
    per_before: Fraction | None = None
    per_after: Fraction | None = None


def epsilon_shift(a: Matrix, i: int, j: int, eps) -> Matrix:
    eps = as_fraction(eps)
    if i == j:
        raise PreconditionError("epsilon_shift needs i != j")
    if not is_nonnegative(a):
        raise PreconditionError("epsilon_shift needs a nonnegative matrix")
    if not 0 < eps <= a[i, i]:
        raise PreconditionError(f"need 0 < eps <= a[{i},{i}] = {a[i, i]}, got {eps}")
    return a.replace({(i, i): a[i, i] - eps, (i, j): a[i, j] + eps})


def _certified(kind, idx, eps, before: Matrix, after: Matrix, certify: bool, per_before=None) -> TransformStep:
    if not certify:
        return TransformStep(kind, idx, eps)
    pb = per_i_minus(before) if per_before is None else per_before
    return TransformStep(kind, idx, eps, pb, per_i_minus(after))


def zero_diagonalize(
    a: Matrix, preserve: Preserve = "row_substochastic", certify_max_n: int = CERTIFY_MAX_N
) -> tuple[Matrix, list[TransformStep]]:
    """Empty the diagonal by epsilon shifts.

    Row mode sends each diagonal entry to the largest off-diagonal entry of its
    row (lowest column on ties).  Doubly mode fills the off-diagonal columns
    with the most slack first, splitting when one column cannot take it all.
    """
    if preserve == "row_substochastic":
        if not is_row_substochastic(a):
            raise PreconditionError("input is not row substochastic")
    elif preserve == "doubly_substochastic":
        if not is_doubly_substochastic(a):
            raise PreconditionError("input is not doubly substochastic")
    else:
        raise PreconditionError(f"unknown class to preserve: {preserve!r}")

    certify = a.n <= certify_max_n
    steps: list[TransformStep] = []
    cur = a
    for i in range(a.n):
        d = cur[i, i]
        if d == 0:
            continue
        if a.n == 1:
            raise InfeasibleError("row 0: a 1x1 matrix has no off-diagonal column")
        if preserve == "row_substochastic":
            row = cur.entries[i]
            j = max((j for j in range(a.n) if j != i), key=lambda j: (row[j], -j))
            moves = [(j, d)]
        else:
            slack = [1 - c for c in col_sums(cur)]
            if sum(slack[j] for j in range(a.n) if j != i) < d:
                raise InfeasibleError(
                    f"row {i}: diagonal mass {d} exceeds the column slack available off the diagonal"
                )
            moves = []
            left = d
            order = sorted((j for j in range(a.n) if j != i), key=lambda j: (-slack[j], j))
            for j in order:
                if left == 0:
                    break
                amt = min(left, slack[j])
                if amt > 0:
                    moves.append((j, amt))
                    left -= amt
        for j, amt in moves:
            nxt = epsilon_shift(cur, i, j, amt)
            steps.append(_certified("epsilon_shift", ((i, i), (i, j)), amt, cur, nxt, certify,
                                    steps[-1].per_after if steps and certify else None))
            cur = nxt
    return cur, steps


def concentrate_rows(a: Matrix, max_n: int = CONCENTRATE_MAX_N) -> tuple[Matrix, list[TransformStep]]:
    """Leave at most one positive entry per row without lowering per(I - A).

    per(I - A) is linear in row k, so moving eps from a[k, i] to a[k, j]
    changes it by eps * (per(P(k|i)) - per(P(k|j))) with P = I - A.  All mass
    of row k goes to the positive column with the smallest such minor (lowest
    column on ties); every move is then non-decreasing.
    """
    if a.n > max_n:
        raise OrderGuardError("concentrate_rows", a.n, max_n)
    if not is_row_substochastic(a):
        raise PreconditionError("input is not row substochastic")
    if not has_zero_diagonal(a):
        raise PreconditionError("input must have zero diagonal (run zero_diagonalize first)")
    steps: list[TransformStep] = []
    cur = a
    per_cur = per_i_minus(cur)
    for k in range(a.n):
        pos = [j for j, v in enumerate(cur.entries[k]) if v > 0]
        if len(pos) < 2:
            continue
        p = i_minus(cur)
        minors = {c: permanent(p.minor(k, c)) for c in pos}
        target = min(pos, key=lambda c: (minors[c], c))
        for c in pos:
            if c == target:
                continue
            eps = cur[k, c]
            nxt = cur.replace({(k, c): Fraction(0), (k, target): cur[k, target] + eps})
            per_next = per_i_minus(nxt)
            steps.append(TransformStep("row_concentrate", ((k, c), (k, target)), eps, per_cur, per_next))
            cur, per_cur = nxt, per_next
    return cur, steps


def _positives(a: Matrix) -> list[Fraction]:
    return [v for r in a.entries for v in r if v > 0]


def is_canonical_pairs(a: Matrix) -> bool:
    """True when A is (0 x1; x2 0) + ... + 0 with every listed block fully positive."""
    n = a.n
    t = 0
    while 2 * t + 1 < n and a[2 * t, 2 * t + 1] > 0 and a[2 * t + 1, 2 * t] > 0:
        t += 1
    for i in range(n):
        for j in range(n):
            in_block = i < 2 * t and j < 2 * t and i // 2 == j // 2 and i != j
            if not in_block and a[i, j] != 0:
                return False
    return True


def _block_matrix(n: int, pairs: list[tuple[Fraction, Fraction]]) -> Matrix:
    rows = [[Fraction(0)] * n for _ in range(n)]
    for b, (x, y) in enumerate(pairs):
        rows[2 * b][2 * b + 1] = x
        rows[2 * b + 1][2 * b] = y
    return make_matrix(n, rows)


def _pair_value(pairs) -> Fraction:
    return math.prod((1 + x * y for x, y in pairs), start=Fraction(1))


def pair_up(a: Matrix) -> Matrix:
    """Block form with per(I - out) >= per(I - A).

    Positives are sorted nonincreasing and paired neighbour to neighbour, which
    maximizes prod(1 + x*y) over pairings.  With an odd count, the unpaired
    entry is split in half over its own 2x2 block; it is chosen to maximize the
    resulting product.  Inputs already in block form are returned unchanged.
    """
    if not is_functional(a):
        raise PreconditionError("pair_up needs zero diagonal, row sums <= 1 and at most one positive per row")
    xs = sorted(_positives(a), reverse=True)
    if len(xs) % 2 == 0:
        if is_canonical_pairs(a):
            return a
        return _block_matrix(a.n, list(zip(xs[0::2], xs[1::2])))
    if len(xs) + 1 > a.n:
        raise PreconditionError(
            f"{len(xs)} positive entries in order {a.n}: no room for the split block"
        )
    best = None
    for k in range(len(xs)):
        rest = xs[:k] + xs[k + 1:]
        pairs = list(zip(rest[0::2], rest[1::2])) + [(xs[k] / 2, xs[k] / 2)]
        value = _pair_value(pairs)
        if best is None or value > best[0]:
            best = (value, pairs)
    return _block_matrix(a.n, best[1])
