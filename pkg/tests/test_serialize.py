import json
from fractions import Fraction

import numpy as np
import pytest
from conftest import generators, nonnegative_matrices
from hypothesis import given
from hypothesis import strategies as st

from permlab import sampling
from permlab.bounds import conjecture_values, subdefect_bound, theorem_bound
from permlab.cycles import build_graph, decompose
from permlab.matrix import Matrix, classify
from permlab.permanent import check_sign_structure, permanent_ryser
from permlab.search import SearchConfig, SearchResult, evidence_report, maximize, omega3_sweep
from permlab.serialize import DecodeError, dumps, from_jsonable, loads, to_jsonable
from permlab.transforms import zero_diagonalize
from permlab.verify import VerifyReport, run_all


def round_trip(obj):
    text = dumps(obj)
    back = loads(type(obj), text)
    assert back == obj
    assert dumps(back) == text
    assert json.loads(text) == to_jsonable(obj)


def test_rationals_are_strings():
    d = to_jsonable(theorem_bound(9, 5))
    assert d["value"] == "5/1" and d["s"] == "5/1"
    assert d["witness"][4][5] == "1/2"


@given(st.integers(1, 9), st.integers(0, 18))
def test_bound_reports_round_trip(n, k2):
    round_trip(theorem_bound(n, Fraction(min(k2, 2 * n), 2)))


def test_other_bound_reports_round_trip():
    round_trip(subdefect_bound(9, 4))
    for r in conjecture_values("odd_substochastic", 5, Fraction(9, 2)):
        round_trip(r)


@given(nonnegative_matrices())
def test_classification_round_trips(a):
    round_trip(classify(a))
    round_trip(permanent_ryser(a))


@given(st.integers(1, 8), generators)
def test_graph_reports_round_trip(n, rng):
    a = sampling.random_functional(n, rng)
    round_trip(decompose(a))
    round_trip(build_graph(a))


def test_step_logs_and_sign_reports_round_trip(rng):
    _, steps = zero_diagonalize(sampling.random_row_substochastic(4, rng))
    for s in steps:
        round_trip(s)
    round_trip(check_sign_structure(sampling.random_doubly_substochastic(4, rng)))


def test_search_reports_round_trip():
    res = maximize(SearchConfig(n=3, s=2.5, restarts=2, steps_per_restart=300))
    round_trip(res)
    assert to_jsonable(res)["config"]["class"] == "doubly_substochastic_fixed_sum"
    round_trip(omega3_sweep([Fraction(5, 2)]))
    round_trip(evidence_report(3, [3.0], restarts=1, steps_per_restart=200))
    round_trip(run_all())


def test_floats_round_trip_exactly():
    res = maximize(SearchConfig(n=4, s=3.3, restarts=1, steps_per_restart=200))
    back = loads(SearchResult, dumps(res))
    assert np.array_equal(back.best_matrix, res.best_matrix) and back.best_value == res.best_value


def test_config_documents():
    cfg = loads(SearchConfig, '{"n": 3, "s": 3, "class": "doubly_stochastic", "seed": 5}')
    assert cfg == SearchConfig(n=3, s=3.0, matrix_class="doubly_stochastic", seed=5)
    for bad in ('{"n": 3}', '{"n": 3, "s": 2, "klass": 1}', '{"n": "3", "s": 2}', "[1]", "{"):
        with pytest.raises(DecodeError):
            loads(SearchConfig, bad)


def test_decoder_rejects_floats_for_rationals():
    with pytest.raises(DecodeError):
        from_jsonable(Matrix, [[0.5]])
    with pytest.raises(DecodeError):
        loads(VerifyReport, '{"checks": [{"name": "x", "passed": 1, "cases": 1}]}')
