"""Exact square matrices over the rationals, plus the class predicates used everywhere else.

Matrices are immutable; every operation returns a new value.  The text format
used for fixtures is::

    3
    0 1/2 1/2
    1/2 0 1/2
    1/2 1/2 0

i.e. the order on the first line followed by ``n`` rows of ``n`` rational tokens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from permlab.errors import DimensionError, PermlabError, PreconditionError

Scalar = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational, str)):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise DimensionError(f"non-finite entry {x!r}")
        return Fraction(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"cannot interpret {x!r} as a rational")


@dataclass(frozen=True)
class Matrix:
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.entries

    def __add__(self, other: Matrix) -> Matrix:
        _same_order(self, other)
        return Matrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: Matrix) -> Matrix:
        _same_order(self, other)
        return Matrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def scale(self, c) -> Matrix:
        c = as_fraction(c)
        return Matrix(tuple(tuple(c * a for a in r) for r in self.entries))

    def replace(self, updates: dict[tuple[int, int], Fraction]) -> Matrix:
        """Copy with the given ``(i, j) -> value`` entries overwritten."""
        rows = [list(r) for r in self.entries]
        for (i, j), v in updates.items():
            rows[i][j] = as_fraction(v)
        return Matrix(tuple(tuple(r) for r in rows))

    def minor(self, row: int, col: int) -> Matrix:
        """Delete one row and one column."""
        return Matrix(
            tuple(
                tuple(v for j, v in enumerate(r) if j != col)
                for i, r in enumerate(self.entries)
                if i != row
            )
        )

    def submatrix(self, keep: Sequence[int]) -> Matrix:
        return Matrix(tuple(tuple(self.entries[i][j] for j in keep) for i in keep))

    def transpose(self) -> Matrix:
        return Matrix(tuple(zip(*self.entries)))

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.entries], dtype=np.float64)

    def to_strings(self) -> list[list[str]]:
        return [[_fmt(v) for v in r] for r in self.entries]

    def __str__(self) -> str:
        return format_matrix(self)


def _same_order(a: Matrix, b: Matrix) -> None:
    if a.n != b.n:
        raise DimensionError(f"order mismatch: {a.n} vs {b.n}")


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def make_matrix(n: int, entries: Iterable[Iterable]) -> Matrix:
    """Build an ``n x n`` matrix; no normalization is applied."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DimensionError(f"order must be a positive integer, got {n!r}")
    rows = [list(r) for r in entries]
    if len(rows) != n or any(len(r) != n for r in rows):
        shape = f"{len(rows)} rows of lengths {[len(r) for r in rows]}"
        raise DimensionError(f"expected {n}x{n} entries, got {shape}")
    return Matrix(tuple(tuple(as_fraction(v) for v in r) for r in rows))


def from_rows(rows: Iterable[Iterable]) -> Matrix:
    rows = [list(r) for r in rows]
    return make_matrix(len(rows), rows)


def from_numpy(a: np.ndarray, max_denominator: int | None = None) -> Matrix:
    """Exact conversion of a float array; optionally snapped with ``limit_denominator``."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionError("non-finite entries")
    if max_denominator is None:
        conv = Fraction
    else:
        def conv(x):
            return Fraction(x).limit_denominator(max_denominator)
    return Matrix(tuple(tuple(conv(float(v)) for v in r) for r in a))


def identity(n: int) -> Matrix:
    return make_matrix(n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])


def zeros(n: int) -> Matrix:
    return make_matrix(n, [[0] * n for _ in range(n)])


def ones(n: int) -> Matrix:
    return make_matrix(n, [[1] * n for _ in range(n)])


def i_minus(a: Matrix) -> Matrix:
    return Matrix(tuple(tuple(1 - v if i == j else -v for j, v in enumerate(r)) for i, r in enumerate(a.entries)))


M2 = make_matrix(2, [[0, 1], [1, 0]])


def sigma(a: Matrix) -> Fraction:
    return sum((v for r in a.entries for v in r), Fraction(0))


def row_sums(a: Matrix) -> list[Fraction]:
    return [sum(r, Fraction(0)) for r in a.entries]


def col_sums(a: Matrix) -> list[Fraction]:
    return [sum(c, Fraction(0)) for c in zip(*a.entries)]


@dataclass(frozen=True)
class ClassificationReport:
    nonnegative: bool
    row_substochastic: bool
    doubly_substochastic: bool
    doubly_stochastic: bool
    zero_diagonal: bool
    at_most_one_positive_per_row: bool
    sigma: Fraction
    sub_defect: int | None


def sub_defect(a: Matrix) -> int:
    """ceil(n - sigma(A)); only defined on doubly substochastic matrices."""
    if not is_doubly_substochastic(a):
        raise PreconditionError("sub-defect is defined only for doubly substochastic matrices")
    return math.ceil(a.n - sigma(a))


def is_nonnegative(a: Matrix) -> bool:
    return all(v >= 0 for r in a.entries for v in r)


def is_row_substochastic(a: Matrix) -> bool:
    return is_nonnegative(a) and all(r <= 1 for r in row_sums(a))


def is_doubly_substochastic(a: Matrix) -> bool:
    return is_row_substochastic(a) and all(c <= 1 for c in col_sums(a))


def is_doubly_stochastic(a: Matrix) -> bool:
    return is_nonnegative(a) and all(r == 1 for r in row_sums(a)) and all(c == 1 for c in col_sums(a))


def has_zero_diagonal(a: Matrix) -> bool:
    return all(a.entries[i][i] == 0 for i in range(a.n))


def positives_per_row(a: Matrix) -> list[int]:
    return [sum(1 for v in r if v > 0) for r in a.entries]


def is_functional(a: Matrix) -> bool:
    """Row substochastic, zero diagonal, at most one positive entry per row."""
    return is_row_substochastic(a) and has_zero_diagonal(a) and max(positives_per_row(a)) <= 1


def classify(a: Matrix) -> ClassificationReport:
    ds = is_doubly_substochastic(a)
    return ClassificationReport(
        nonnegative=is_nonnegative(a),
        row_substochastic=is_row_substochastic(a),
        doubly_substochastic=ds,
        doubly_stochastic=is_doubly_stochastic(a),
        zero_diagonal=has_zero_diagonal(a),
        at_most_one_positive_per_row=max(positives_per_row(a)) <= 1,
        sigma=sigma(a),
        sub_defect=math.ceil(a.n - sigma(a)) if ds else None,
    )


def direct_sum(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise DimensionError("direct_sum needs at least one block")
    n = sum(b.n for b in blocks)
    rows: list[list[Fraction]] = []
    offset = 0
    for b in blocks:
        for r in b.entries:
            rows.append([Fraction(0)] * offset + list(r) + [Fraction(0)] * (n - offset - b.n))
        offset += b.n
    return make_matrix(n, rows)


def _check_perm(p: Sequence[int], n: int, name: str) -> list[int]:
    p = [int(x) for x in p]
    if len(p) != n or sorted(p) != list(range(n)):
        raise PreconditionError(f"{name} is not a permutation of 0..{n - 1}: {p}")
    return p


def permute(a: Matrix, row_perm: Sequence[int], col_perm: Sequence[int]) -> Matrix:
    """Return P A Q: row ``i`` of the result is row ``row_perm[i]`` of ``a``,
    column ``j`` is column ``col_perm[j]``."""
    rp = _check_perm(row_perm, a.n, "row_perm")
    cp = _check_perm(col_perm, a.n, "col_perm")
    return Matrix(tuple(tuple(a.entries[rp[i]][cp[j]] for j in range(a.n)) for i in range(a.n)))


# -- text format --------------------------------------------------------------


class MatrixFormatError(PermlabError, ValueError):
    pass


def parse_matrix(text: str) -> Matrix:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MatrixFormatError("empty matrix text")
    try:
        (n_tok,) = lines[0]
        n = int(n_tok)
    except ValueError:
        raise MatrixFormatError(f"first line must hold the order, got {' '.join(lines[0])!r}") from None
    try:
        rows = [[Fraction(tok) for tok in ln] for ln in lines[1:]]
    except (ValueError, ZeroDivisionError) as exc:
        raise MatrixFormatError(f"bad rational token: {exc}") from None
    try:
        return make_matrix(n, rows)
    except DimensionError as exc:
        raise MatrixFormatError(str(exc)) from None


def format_matrix(a: Matrix) -> str:
    return "\n".join([str(a.n)] + [" ".join(r) for r in a.to_strings()]) + "\n"


def load_matrix(path: str | Path) -> Matrix:
    return parse_matrix(Path(path).read_text())


def save_matrix(a: Matrix, path: str | Path) -> None:
    Path(path).write_text(format_matrix(a))
