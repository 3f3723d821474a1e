"""Deterministic invariant suite over built-in fixtures.

Every check uses fixed seeds and exact arithmetic, so two runs of the same
build produce identical reports.  Sizes are kept small enough for the whole
suite to finish in a few seconds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from permlab import bounds, cycles, matrix, permanent, sampling, serialize, transforms
from permlab.errors import PermlabError

SEED = 20160901


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    cases: int
    detail: str = ""


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _rng(offset: int) -> np.random.Generator:
    return np.random.default_rng(SEED + offset)


def _oracle_agreement():
    rng = _rng(1)
    for _ in range(60):
        a = sampling.random_nonnegative(int(rng.integers(1, 6)), rng)
        if permanent.permanent(a) != permanent.permanent_naive(a):
            return False, 60, f"Ryser and naive disagree on {a.to_strings()}"
    return True, 60, ""


def _block_example():
    a = bounds.construct_extremal(9, 5)
    p = matrix.i_minus(a)
    got = {
        "naive": permanent.permanent_naive(p),
        "ryser": permanent.permanent(p),
        "cycles": cycles.per_via_cycles(a),
    }
    gray = permanent.permanent_gray(p)
    ok = all(v == 5 for v in got.values()) and abs(gray - 5) < 1e-12
    return ok, 1, "" if ok else f"values {got}, gray {gray}"


def _extremal_witnesses():
    count = 0
    for n in (2, 4, 6, 9):
        top = n if n % 2 == 0 else n - 1
        for k in range(2 * top + 1):
            s = Fraction(k, 2)
            rep = bounds.theorem_bound(n, s)
            count += 1
            if not rep.hypotheses_met or not bounds.certify_witness(rep):
                return False, count, f"witness fails at n={n}, s={s}"
            if not matrix.is_doubly_substochastic(rep.witness) or matrix.sigma(rep.witness) != s:
                return False, count, f"witness outside the class at n={n}, s={s}"
    return True, count, ""


def _dominance():
    rng = _rng(2)
    count = 0
    for n, s in ((4, Fraction(3)), (4, Fraction(4)), (5, Fraction(5, 2)), (6, Fraction(9, 2))):
        bound = bounds.theorem_bound(n, s).value
        for _ in range(15):
            a = sampling.random_omega_s(n, s, rng)
            count += 1
            if permanent.per_i_minus(a) > bound:
                return False, count, f"bound exceeded by {a.to_strings()}"
    return True, count, ""


def _classical_bounds():
    rng = _rng(3)
    for t in range(80):
        n = int(rng.integers(1, 7))
        a = sampling.random_row_substochastic(n, rng)
        p = matrix.i_minus(a)
        per, det = permanent.permanent(p), permanent.determinant(p)
        if not per >= det >= 0 or per > bounds.malek_bound(n):
            return False, t + 1, f"violated by {a.to_strings()}"
    return True, 80, ""


def _epsilon_shifts():
    rng = _rng(4)
    count = 0
    while count < 60:
        n = int(rng.integers(2, 6))
        a = sampling.random_row_substochastic(n, rng)
        diag = [i for i in range(n) if a[i, i] > 0]
        if not diag:
            continue
        i = diag[int(rng.integers(0, len(diag)))]
        j = int(rng.integers(0, n - 1))
        j = j if j < i else j + 1
        eps = a[i, i] * Fraction(int(rng.integers(1, 5)), 4)
        b = transforms.epsilon_shift(a, i, j, eps)
        count += 1
        if permanent.per_i_minus(b) < permanent.per_i_minus(a) or matrix.row_sums(b) != matrix.row_sums(a):
            return False, count, f"shift ({i},{j},{eps}) lowers the value on {a.to_strings()}"
    return True, count, ""


def _concentration():
    rng = _rng(5)
    for t in range(25):
        n = int(rng.integers(2, 6))
        a = sampling.random_row_substochastic(n, rng, zero_diagonal=True)
        c, steps = transforms.concentrate_rows(a)
        if permanent.per_i_minus(c) < permanent.per_i_minus(a) or matrix.sigma(c) != matrix.sigma(a):
            return False, t + 1, f"concentrate_rows failed on {a.to_strings()}"
        if not matrix.is_functional(c) or any(st.per_after < st.per_before for st in steps):
            return False, t + 1, f"bad step log on {a.to_strings()}"
    return True, 25, ""


def _sequence_lemmas():
    rng = _rng(6)
    for t in range(60):
        k = int(rng.integers(2, 7))
        z = bounds.SequenceProfile.of([Fraction(int(rng.integers(1, 16)), 16) for _ in range(k)])
        if bounds.sequence_objective(bounds.sequence_shift(z)) <= bounds.sequence_objective(z):
            return False, t + 1, f"shift does not increase the objective at {z.values}"
        fixed, _ = bounds.sequence_ascend(z)
        value, maximizer = bounds.sequence_max(z.total, k)
        if fixed != maximizer or bounds.sequence_objective(fixed) != value:
            return False, t + 1, f"ascent from {z.values} ends at {fixed.values}"
    return True, 60, ""


def _cycle_formula():
    weights = (Fraction(1, 2), Fraction(1))
    count = 0
    for n in range(1, 4):
        choices = [[None] + [(j, w) for j in range(n) if j != i for w in weights] for i in range(n)]
        for edges in itertools.product(*choices):
            rows = [[Fraction(0)] * n for _ in range(n)]
            for i, e in enumerate(edges):
                if e:
                    rows[i][e[0]] = e[1]
            a = matrix.make_matrix(n, rows)
            count += 1
            if cycles.per_via_cycles(a) != permanent.per_i_minus(a):
                return False, count, f"cycle product differs on {a.to_strings()}"
    return True, count, ""


def _rowsub_odd():
    count = 0
    for n in (3, 5):
        for s in (Fraction(2 * n - 1, 2), Fraction(n)):
            a = bounds.construct_rowsub_odd(n, s)
            count += 1
            if permanent.per_i_minus(a) != 2 ** ((n - 1) // 2) or matrix.is_doubly_substochastic(a):
                return False, count, f"odd-order witness fails at n={n}, s={s}"
    return True, count, ""


def _omega3():
    ok = permanent.per_i_minus(bounds.circulant3(Fraction(1, 2))) == Fraction(3, 2)
    for s in (Fraction(9, 4), Fraction(5, 2), Fraction(3)):
        a0, a1, v0, v1 = bounds.omega3_candidates(s)
        ok = ok and permanent.per_i_minus(a0) == v0 and permanent.per_i_minus(a1) == v1
    return ok, 4, ""


def _sign_structure():
    count = 0
    for n, s in ((4, Fraction(3)), (5, Fraction(7, 2)), (6, Fraction(6))):
        count += 1
        if not permanent.check_sign_structure(bounds.construct_extremal(n, s), subset_samples=256).ok:
            return False, count, f"sign structure fails at n={n}, s={s}"
    return True, count, ""


def _round_trips():
    objs = [
        bounds.theorem_bound(9, 5),
        *bounds.conjecture_values("odd_substochastic", 5, Fraction(9, 2)),
        matrix.classify(bounds.construct_extremal(6, 5)),
        cycles.decompose(bounds.construct_extremal(9, 5)),
        bounds.subdefect_bound(9, 4),
    ]
    for o in objs:
        if serialize.loads(type(o), serialize.dumps(o)) != o:
            return False, len(objs), f"{type(o).__name__} does not round-trip"
    return True, len(objs), ""


CHECKS: tuple[tuple[str, Callable], ...] = (
    ("ryser_matches_naive", _oracle_agreement),
    ("block_example_value_5", _block_example),
    ("extremal_witnesses_certified", _extremal_witnesses),
    ("fixed_sum_bound_dominates", _dominance),
    ("classical_bounds", _classical_bounds),
    ("epsilon_shift_monotone", _epsilon_shifts),
    ("concentrate_rows_monotone", _concentration),
    ("sequence_lemmas", _sequence_lemmas),
    ("cycle_product_formula", _cycle_formula),
    ("odd_order_rowsub_witness", _rowsub_odd),
    ("omega3_values", _omega3),
    ("sign_structure", _sign_structure),
    ("json_round_trip", _round_trips),
)


def run_all() -> VerifyReport:
    results = []
    for name, check in CHECKS:
        try:
            ok, cases, detail = check()
        except PermlabError as exc:
            ok, cases, detail = False, 0, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, ok, cases, detail))
    return VerifyReport(tuple(results))
