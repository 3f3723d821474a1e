"""Search evidence for odd n at s in (n-1, n], next to the conjectured values.

    python scripts/odd_evidence.py --n 5 --restarts 16 --steps 20000
"""
import argparse

from permlab.search import evidence_report, grid_points


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=5, choices=(3, 5, 7))
    p.add_argument("--points", type=int, default=4, help="number of s values in (n-1, n]")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--seed", type=int, default=20160901)
    args = p.parse_args()

    step = 1 / args.points
    s_grid = [float(s) for s in grid_points(args.n - 1 + step, args.n, step)]
    rep = evidence_report(args.n, s_grid, seed=args.seed, restarts=args.restarts, steps_per_restart=args.steps)
    print(f"{'s':>6} {'search':>10} {'block grid':>11} {'conj grid':>10} {'conj formula':>13} {'literal':>9}")
    for r in rep.rows:
        print(f"{r.s:>6.3f} {r.observed:>10.6f} {float(r.block_grid):>11.6f} {float(r.conjectured_grid):>10.6f} "
              f"{float(r.conjectured_formula):>13.6f} {float(r.conjectured_literal):>9.4f}")
    for note in rep.notes:
        print("note:", note)


if __name__ == "__main__":
    main()
