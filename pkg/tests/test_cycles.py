from fractions import Fraction

import pytest
from conftest import generators
from hypothesis import given
from hypothesis import strategies as st

from permlab import sampling
from permlab.bounds import construct_extremal
from permlab.cycles import Cycle, WeightedDigraph, build_graph, decompose, find_cycles, per_via_cycles
from permlab.errors import PreconditionError
from permlab.matrix import M2, make_matrix, zeros
from permlab.permanent import per_i_minus
from permlab.transforms import pair_up

Q = Fraction(1, 4)


def three_cycle(a, b, c, n=3):
    rows = [[Fraction(0)] * n for _ in range(n)]
    rows[0][1], rows[1][2], rows[2][0] = a, b, c
    return make_matrix(n, rows)


def test_build_graph_examples():
    assert build_graph(zeros(3)).out_edge == (None, None, None)
    assert build_graph(M2).out_edge == ((1, 1), (0, 1))
    g = build_graph(three_cycle(Q, Q, Q))
    assert [e[0] for e in g.out_edge] == [1, 2, 0]


@pytest.mark.parametrize(
    "rows, row",
    [
        ([[1, 0], [0, 0]], 0),  # diagonal
        ([[0, 0, 0], [Q, 0, Q], [0, 0, 0]], 1),  # two positives
        ([[0, 0], [-Q, 0]], 1),  # negative
        ([[0, 2], [0, 0]], 0),  # row sum over 1
    ],
)
def test_build_graph_names_offending_row(rows, row):
    with pytest.raises(PreconditionError, match=f"row {row}"):
        build_graph(make_matrix(len(rows), rows))


def test_find_cycles_examples():
    assert find_cycles(build_graph(zeros(4))).cycles == ()
    path = WeightedDigraph(3, ((1, Q), (2, Q), None))
    assert find_cycles(path).cycles == ()
    x = [Fraction(1, 2), Fraction(1, 3), Fraction(3, 4), Fraction(1, 5)]
    a = make_matrix(4, [[0, x[0], 0, 0], [x[1], 0, 0, 0], [0, 0, 0, x[2]], [0, 0, x[3], 0]])
    cycles = decompose(a).cycles
    assert cycles == (Cycle((0, 1), x[0] * x[1]), Cycle((2, 3), x[2] * x[3]))


def test_cycles_start_at_smallest_vertex():
    a = make_matrix(4, [[0, 0, 0, 0], [0, 0, 0, Q], [0, Q, 0, 0], [0, 0, Q, 0]])
    (c,) = decompose(a).cycles
    assert c.vertices == (1, 3, 2) and c.length == 3


def test_tail_into_cycle_counts_once():
    # 0 -> 1 -> 2 -> 1: one 2-cycle, vertex 0 is a tail
    a = make_matrix(3, [[0, Q, 0], [0, 0, Q], [0, Q, 0]])
    assert decompose(a).cycles == (Cycle((1, 2), Q * Q),)


def test_per_via_cycles_examples():
    assert per_via_cycles(make_matrix(3, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])) == 1
    a, b, c = Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)
    assert per_via_cycles(three_cycle(a, b, c)) == 1 - a * b * c
    assert per_via_cycles(construct_extremal(9, 5)) == 5


@given(st.integers(1, 12), generators)
def test_cycle_formula_matches_ryser(n, rng):
    a = sampling.random_functional(n, rng)
    assert per_via_cycles(a) == per_i_minus(a)


@given(st.integers(2, 8), generators)
def test_cycles_vertex_disjoint_and_long(n, rng):
    cycles = decompose(sampling.random_functional(n, rng, density=1.0)).cycles
    seen = [v for c in cycles for v in c.vertices]
    assert len(seen) == len(set(seen))
    assert all(c.length >= 2 for c in cycles)


@given(st.integers(2, 8), generators)
def test_removing_a_cycle_factors_out(n, rng):
    a = sampling.random_functional(n, rng, density=1.0)
    total = per_i_minus(a)
    for c in decompose(a).cycles:
        keep = [i for i in range(n) if i not in c.vertices]
        rest = per_i_minus(a.submatrix(keep)) if keep else Fraction(1)
        assert total == rest * c.factor


@given(st.integers(2, 8), generators)
def test_pairing_dominates_cycle_value(n, rng):
    a = sampling.random_functional(n, rng)
    xs = sorted((v for r in a.entries for v in r if v > 0), reverse=True)
    if len(xs) % 2 == 0:
        bound = Fraction(1)
        for x, y in zip(xs[0::2], xs[1::2]):
            bound *= 1 + x * y
        assert per_via_cycles(a) <= bound
    elif len(xs) + 1 <= n:
        assert per_via_cycles(a) < per_via_cycles(pair_up(a))
