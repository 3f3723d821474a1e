"""Independent reference computations for the test suite (sympy and brute force)."""

from fractions import Fraction
from itertools import product

import sympy as sp

from permlab.matrix import Matrix


def _sym(a: Matrix) -> sp.Matrix:
    return sp.Matrix([[sp.Rational(v.numerator, v.denominator) for v in row] for row in a.entries])


def _frac(x) -> Fraction:
    x = sp.Rational(x)
    return Fraction(int(x.p), int(x.q))


def per(a: Matrix) -> Fraction:
    return _frac(_sym(a).per())


def per_i_minus(a: Matrix) -> Fraction:
    return _frac((sp.eye(a.n) - _sym(a)).per())


def det(a: Matrix) -> Fraction:
    return _frac(_sym(a).det())


def sequence_grid_max(total: Fraction, length: int, denom: int) -> Fraction:
    """max prod(1 + z_i^2) over z in ({0, 1/denom, ..., 1})^length with sum = total."""
    target = total * denom
    best = None
    for ks in product(range(denom + 1), repeat=length):
        if sum(ks) != target:
            continue
        v = Fraction(1)
        for k in ks:
            v *= 1 + Fraction(k, denom) ** 2
        best = v if best is None or v > best else best
    return best
