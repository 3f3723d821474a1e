"""Check that random-restart search recovers the known fixed-sum maxima.

For each (n, s) the target is 2^(e/2) (1 + ((s - e)/2)^2), e the greatest even
integer <= s. Runs with the default budget unless --restarts/--steps are given.

    python scripts/recovery.py --cases 4:3 6:5 9:5
"""
import argparse
import time
from fractions import Fraction

from permlab.bounds import theorem_bound
from permlab.search import SearchConfig, maximize


def parse_case(text: str) -> tuple[int, Fraction]:
    n, s = text.split(":")
    return int(n), Fraction(s)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cases", nargs="+", type=parse_case,
                   default=[(4, Fraction(3)), (4, Fraction(7, 2)), (6, Fraction(5)), (9, Fraction(5))])
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--seed", type=int, default=20160901)
    args = p.parse_args()

    print(f"{'n':>3} {'s':>5} {'target':>10} {'found':>12} {'gap':>10} {'hits':>6} {'secs':>6}")
    for n, s in args.cases:
        cfg = SearchConfig(n=n, s=float(s), restarts=args.restarts, steps_per_restart=args.steps, seed=args.seed)
        t0 = time.perf_counter()
        res = maximize(cfg)
        dt = time.perf_counter() - t0
        target = float(theorem_bound(n, s).value)
        hits = sum(abs(v - target) < 1e-4 for v in res.per_restart_bests)
        print(f"{n:>3} {str(s):>5} {target:>10.6f} {res.best_value:>12.9f} {res.best_value - target:>10.2e} "
              f"{hits:>3}/{len(res.per_restart_bests):<2} {dt:>6.1f}")


if __name__ == "__main__":
    main()
