"""Exact grid maxima of per(I - A) over zero-diagonal 3x3 doubly substochastic A.

Prints one row per s with the grid maximum, both closed-form candidates,
their envelope and the excess of the grid maximum over it.

    python scripts/omega3_grid.py --step 1/8
"""
import argparse
from fractions import Fraction

from permlab.search import grid_points, omega3_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lo", type=Fraction, default=Fraction(17, 8))
    p.add_argument("--hi", type=Fraction, default=Fraction(3))
    p.add_argument("--step", type=Fraction, default=Fraction(1, 8))
    args = p.parse_args()

    rep = omega3_sweep(grid_points(args.lo, args.hi, args.step), args.step)
    print(f"{'s':>6} {'points':>7} {'grid max':>10} {'a0':>8} {'a1':>8} {'envelope':>9} {'excess':>8}")
    for r in rep.rows:
        a0, a1 = r.candidate_values
        print(f"{str(r.s):>6} {r.points:>7} {float(r.best_value):>10.5f} {float(a0):>8.5f} {float(a1):>8.5f} "
              f"{float(r.envelope):>9.5f} {float(r.excess):>8.4f}")
    print(f"\nlargest excess: {float(rep.max_excess):.4f}")
    worst = max(rep.rows, key=lambda r: r.excess)
    print(f"maximizer at s={worst.s}:")
    for row in worst.best_matrix.to_strings():
        print("   ", " ".join(f"{v:>5}" for v in row))
    for note in rep.notes:
        print("note:", note)


if __name__ == "__main__":
    main()
