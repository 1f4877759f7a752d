"""Census of the extreme self-joinings of small ergodic systems.

For each uniform n-cycle (and optionally every pair of cycles) prints the
number of vertices of the joining polytope, how many are graph joinings of
powers of T, and whether anything else appears.

    python scripts/self_joining_census.py --max-n 8
    python scripts/self_joining_census.py --pairs --max-n 5
"""

import argparse
import time

from joinlab.core import cycle_system
from joinlab.joinings import enumerate_vertices, is_disjoint, joining_polytope
from joinlab.relative import classify_self_joinings, common_factors


def census(max_n: int) -> None:
    print(f"{'n':>3} {'vertices':>8} {'powers':>6} {'other':>5} {'factors':>7} {'secs':>6}")
    for n in range(1, max_n + 1):
        t = cycle_system(n)
        start = time.perf_counter()
        report = classify_self_joinings(t)
        pairs = common_factors(t, t)
        elapsed = time.perf_counter() - start
        print(f"{n:>3} {len(report.vertices):>8} {report.count('power'):>6} "
              f"{report.count('other'):>5} {len(pairs):>7} {elapsed:>6.2f}")


def pair_table(max_n: int) -> None:
    print("vertex counts of J(n-cycle, m-cycle); '*' marks disjoint pairs")
    print("     " + "".join(f"{m:>5}" for m in range(1, max_n + 1)))
    for n in range(1, max_n + 1):
        cells = []
        for m in range(1, max_n + 1):
            t, s = cycle_system(n), cycle_system(m)
            count = len(enumerate_vertices(joining_polytope(t, s)))
            cells.append(f"{count}{'*' if is_disjoint(t, s) else ''}".rjust(5))
        print(f"{n:>5}" + "".join(cells))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-n", type=int, default=6)
    parser.add_argument("--pairs", action="store_true", help="tabulate J(T,S) over pairs of cycles")
    args = parser.parse_args()
    if args.pairs:
        pair_table(args.max_n)
    else:
        census(args.max_n)


if __name__ == "__main__":
    main()
