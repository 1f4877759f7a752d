"""Correlation decay for two-state chains with varying stay probability.

For each stay probability q prints |μ(A ∩ T^-n B) - μ(A)μ(B)| at a few n,
the spectral certificate |2q - 1|, and the Ornstein verdict for θ.

    python scripts/mixing_table.py --stay 1/2 3/4 9/10 1 0 --theta 2
"""

import argparse
from fractions import Fraction

from joinlab.asymptotics import correlation, cylinder, markov_shift, ornstein_check, spectral_certificate
from joinlab.errors import Reducible


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--stay", nargs="+", default=["1/2", "3/4", "9/10", "99/100", "0"])
    parser.add_argument("--steps", nargs="+", type=int, default=[1, 5, 10, 20, 50])
    parser.add_argument("--theta", default="2")
    args = parser.parse_args()

    a = cylinder("0")
    header = f"{'q':>7} {'cert':>6} " + " ".join(f"{'n=' + str(n):>10}" for n in args.steps) + "  ornstein"
    print(header)
    for text in args.stay:
        q = Fraction(text)
        try:
            chain = markov_shift([[q, 1 - q], [1 - q, q]])
        except Reducible:
            print(f"{text:>7}  reducible chain, skipped")
            continue
        target = Fraction(1, 4)
        devs = [float(abs(correlation(chain, a, a, n) - target)) for n in args.steps]
        verdict = ornstein_check(chain, a, a, Fraction(args.theta), max(args.steps))
        print(f"{text:>7} {spectral_certificate(chain):>6.3f} "
              + " ".join(f"{d:>10.3e}" for d in devs)
              + f"  {'ok' if verdict.satisfied else 'violated'} (limsup {verdict.limsup})")


if __name__ == "__main__":
    main()
