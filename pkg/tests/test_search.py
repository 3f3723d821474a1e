import itertools
from fractions import Fraction

import numpy as np
import oracles
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from permlab.bounds import HALF_CIRCULANT, construct_extremal, theorem_bound
from permlab.errors import OrderGuardError, PreconditionError
from permlab.matrix import make_matrix
from permlab.permanent import per_i_minus
from permlab.search import (
    SearchConfig,
    evidence_report,
    exhaustive_omega3,
    maximize,
    omega3_sweep,
    repair,
    violation,
)

SMALL = dict(restarts=6, steps_per_restart=3000)


def exact_violation(m: np.ndarray, s: float) -> Fraction:
    """Constraint violation computed on the exact binary values of the entries."""
    a = [[Fraction(float(x)) for x in row] for row in m]
    n = len(a)
    worst = Fraction(0)
    for i in range(n):
        worst = max(worst, abs(a[i][i]), *(-x for x in a[i]), sum(a[i]) - 1,
                    sum(a[k][i] for k in range(n)) - 1)
    return max(worst, abs(sum(map(sum, a)) - Fraction(s)))


def test_repair_keeps_feasible_input():
    m = construct_extremal(6, 4).to_numpy()
    out, ok = repair(m, 4.0)
    assert ok and np.array_equal(out, m)


def test_repair_ones_to_m2():
    out, ok = repair(np.ones((2, 2)), 2.0)
    assert ok and np.array_equal(out, np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_repair_perturbed_extremal(rng):
    m = construct_extremal(6, 4).to_numpy() + rng.normal(scale=0.05, size=(6, 6))
    out, ok = repair(m, 4.0)
    assert ok and violation(out, 4.0) <= 1e-12


def test_repair_rejects_bad_input():
    with pytest.raises(PreconditionError):
        repair(np.array([[0.0, np.nan], [1.0, 0.0]]), 1.0)
    with pytest.raises(PreconditionError):
        repair(np.ones((2, 3)), 1.0)
    with pytest.raises(PreconditionError):
        repair(np.ones((2, 2)), 1.0, "stochastic")


@given(
    st.integers(2, 7).flatmap(lambda n: st.tuples(
        arrays(np.float64, (n, n), elements=st.floats(-2, 3)),
        st.floats(0, n),
    ))
)
def test_repair_flag_is_accurate(case):
    m, s = case
    out, ok = repair(m, s)
    if ok:
        assert exact_violation(out, s) <= Fraction(1, 10**11)
        # the float check and the exact check agree up to rounding
        assert violation(out, s) <= 1e-12


def test_config_validation():
    with pytest.raises(PreconditionError):
        SearchConfig(n=3, s=4.0)
    with pytest.raises(PreconditionError):
        SearchConfig(n=3, s=2.0, matrix_class="doubly_stochastic")
    with pytest.raises(PreconditionError):
        SearchConfig(n=3, s=2.0, tolerance=0)
    with pytest.raises(PreconditionError):
        SearchConfig(n=3, s=2.0, step_decay=1.5)
    with pytest.raises(PreconditionError):
        SearchConfig(n=3, s=2.0, seed=-1)
    cfg = SearchConfig(n=4, s=3.0).resolved()
    assert (cfg.restarts, cfg.steps_per_restart) == (64, 20000)
    assert 0 < cfg.step_decay < 1
    assert SearchConfig(n=9, s=5.0).resolved().steps_per_restart == 60000


def test_order_refusal():
    with pytest.raises(OrderGuardError):
        maximize(SearchConfig(n=13, s=5.0))


def test_result_is_reproducible_and_schedule_free():
    cfg = SearchConfig(n=4, s=3.0, seed=7, **SMALL)
    a = maximize(cfg, threads=1)
    b = maximize(cfg, threads=4)
    assert a == b
    assert a.best_restart == max(range(6), key=lambda r: (a.per_restart_bests[r], -r))
    assert a.best_value == pytest.approx(max(a.per_restart_bests), abs=1e-12)


def test_result_fields():
    res = maximize(SearchConfig(n=4, s=2.5, **SMALL))
    assert res.feasible and res.violation <= 1e-11
    assert res.formula_value == float(theorem_bound(4, Fraction(5, 2)).value)
    assert res.formula_source == "theorem"
    assert res.gap == res.best_value - res.formula_value
    assert abs(float(res.exact_value) - res.best_value) < 1e-4
    assert len(res.per_restart_bests) == 6 and res.evaluations > 6


@pytest.mark.parametrize("n,s", [(2, 1.5), (4, 2.0), (4, 3.5), (5, 3.0), (6, 4.5)])
def test_search_never_beats_the_theorem(n, s):
    res = maximize(SearchConfig(n=n, s=s, **SMALL))
    assert res.formula_source == "theorem"
    assert res.best_value <= res.formula_value + 1e-9


def test_odd_order_reference_is_conjectural():
    res = maximize(SearchConfig(n=3, s=2.5, **SMALL))
    assert res.formula_source.startswith("conjecture")
    assert res.formula_value == pytest.approx(23 / 16)


def test_omega3_default_search():
    res = maximize(SearchConfig(n=3, s=3.0, matrix_class="doubly_stochastic"))
    assert 1.5 - 1e-6 <= res.best_value <= 1.5 + 1e-9


@pytest.mark.slow
def test_doubly_stochastic_order_4():
    res = maximize(SearchConfig(n=4, s=4.0, matrix_class="doubly_stochastic"))
    assert 4 - 1e-5 <= res.best_value <= 4 + 1e-9


@pytest.mark.slow
@pytest.mark.parametrize("n,s", [(4, 3.0), (6, 5.0), (9, 5.0)])
def test_search_recovers_constructions(n, s):
    res = maximize(SearchConfig(n=n, s=s))
    target = float(theorem_bound(n, Fraction(s)).value)
    assert abs(res.best_value - target) <= 1e-4
    assert res.best_value <= target + 1e-9


# -- exhaustive n = 3 ---------------------------------------------------------------


def test_exhaustive_omega3_at_3():
    r = exhaustive_omega3(3)
    assert r.best_value == Fraction(3, 2) and r.best_matrix == HALF_CIRCULANT
    assert r.candidate_values == (Fraction(3, 2), 0)


def test_exhaustive_omega3_at_2():
    r = exhaustive_omega3(2)
    assert r.candidate_values == (Fraction(3, 2), 2)
    assert r.best_value == 2


def test_exhaustive_omega3_guards():
    with pytest.raises(PreconditionError):
        exhaustive_omega3(3, Fraction(1, 32))
    with pytest.raises(PreconditionError):
        exhaustive_omega3(3, Fraction(3, 8))
    with pytest.raises(PreconditionError):
        exhaustive_omega3(Fraction(7, 2))


def brute_omega3(s: Fraction, m: int, evaluate) -> Fraction:
    vals = [Fraction(k, m) for k in range(m + 1)]
    best = None
    for x01, x02, x10, x12, x20, x21 in itertools.product(vals, repeat=6):
        rows = [x01 + x02, x10 + x12, x20 + x21]
        cols = [x10 + x20, x01 + x21, x02 + x12]
        if max(rows + cols) > 1 or 2 * abs(sum(rows) - s) > Fraction(1, m):
            continue
        v = evaluate(make_matrix(3, [[0, x01, x02], [x10, 0, x12], [x20, x21, 0]]))
        best = v if best is None or v > best else best
    return best


@pytest.mark.parametrize("s", [Fraction(9, 4), Fraction(5, 2), Fraction(11, 4), Fraction(3)])
def test_exhaustive_matches_brute_force(s):
    assert exhaustive_omega3(s, Fraction(1, 4)).best_value == brute_omega3(s, 4, per_i_minus)


def test_exhaustive_matches_sympy_on_coarse_grid():
    for s in (Fraction(5, 2), Fraction(3)):
        assert exhaustive_omega3(s, Fraction(1, 2)).best_value == brute_omega3(s, 2, oracles.per_i_minus)


def test_omega3_sweep_notes():
    rep = omega3_sweep([Fraction(11, 4), Fraction(3)])
    assert len(rep.rows) == 2
    assert any("6-4s" in n for n in rep.notes) and any("n+2" in n for n in rep.notes)


def test_evidence_report_small_budget():
    rep = evidence_report(3, [3.0], restarts=4, steps_per_restart=3000)
    (row,) = rep.rows
    assert row.conjectured_grid == row.conjectured_formula == Fraction(3, 2)
    assert row.observed == pytest.approx(1.5, abs=1e-6)
    rep5 = evidence_report(5, [5.0], restarts=2, steps_per_restart=500)
    assert rep5.rows[0].conjectured_formula == 3 == rep5.rows[0].conjectured_grid
    with pytest.raises(PreconditionError):
        evidence_report(4, [4.0])
    with pytest.raises(PreconditionError):
        evidence_report(5, [3.5])


def test_grid_point_above_two_candidate_envelope():
    q, t = Fraction(1, 4), Fraction(3, 4)
    a = make_matrix(3, [[0, q, q], [q, 0, t], [q, t, 0]])
    assert oracles.per_i_minus(a) == per_i_minus(a) == Fraction(51, 32)
    r = exhaustive_omega3(Fraction(5, 2))
    assert r.envelope == Fraction(23, 16) and r.best_value >= Fraction(51, 32)
