"""Functional-digraph view of zero-diagonal matrices with at most one positive entry per row.

For such A, per(I - A) factors over the directed cycles of its graph: each
cycle C of length l contributes (1 + (-1)^l * w(C)), where w(C) is the product
of the weights around the cycle; vertices off every cycle contribute 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from permlab.errors import PreconditionError
from permlab.matrix import Matrix


@dataclass(frozen=True)
class WeightedDigraph:
    n: int
    out_edge: tuple[tuple[int, Fraction] | None, ...]


@dataclass(frozen=True)
class Cycle:
    vertices: tuple[int, ...]
    weight_product: Fraction

    @property
    def length(self) -> int:
        return len(self.vertices)

    @property
    def factor(self) -> Fraction:
        return 1 + (-1) ** self.length * self.weight_product


@dataclass(frozen=True)
class CycleDecomposition:
    cycles: tuple[Cycle, ...]


def build_graph(a: Matrix) -> WeightedDigraph:
    out: list[tuple[int, Fraction] | None] = []
    for i, row in enumerate(a.entries):
        if any(v.numerator < 0 for v in row):
            raise PreconditionError(f"row {i} has a negative entry")
        if row[i].numerator:
            raise PreconditionError(f"row {i} has a nonzero diagonal entry")
        pos = [j for j, v in enumerate(row) if v.numerator]
        if len(pos) > 1:
            raise PreconditionError(f"row {i} has {len(pos)} positive entries")
        if pos and row[pos[0]] > 1:
            raise PreconditionError(f"row {i} sums to more than 1")
        out.append((pos[0], row[pos[0]]) if pos else None)
    return WeightedDigraph(a.n, tuple(out))


def find_cycles(g: WeightedDigraph) -> CycleDecomposition:
    # three-colour walk; out-degree <= 1 means each walk is a simple path
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * g.n
    cycles = []
    for start in range(g.n):
        path = []
        v: int | None = start
        while v is not None and colour[v] == WHITE:
            colour[v] = GREY
            path.append(v)
            edge = g.out_edge[v]
            v = edge[0] if edge else None
        if v is not None and colour[v] == GREY:
            cyc = path[path.index(v):]
            k = cyc.index(min(cyc))
            cyc = cyc[k:] + cyc[:k]
            w = math.prod((g.out_edge[u][1] for u in cyc), start=Fraction(1))
            cycles.append(Cycle(tuple(cyc), w))
        for u in path:
            colour[u] = BLACK
    cycles.sort(key=lambda c: c.vertices[0])
    return CycleDecomposition(tuple(cycles))


def decompose(a: Matrix) -> CycleDecomposition:
    return find_cycles(build_graph(a))


def per_via_cycles(a: Matrix) -> Fraction:
    """per(I - A) as the product of cycle factors."""
    return math.prod((c.factor for c in decompose(a).cycles), start=Fraction(1))
