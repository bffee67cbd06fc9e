"""Closed form vs brute force for the quadratic sums over the oracle grid.

Default: every (b, d, x) shape with rotating (a, c) and seed pairs.
--full: the exhaustive product (about 1e7 cases; hours on one core).
"""

import argparse
import itertools
import time
from fractions import Fraction

from fibsum.errors import VanishingDenominator
from fibsum.runner import pmap
from fibsum.sequences import Seed
from fibsum.sums import QuadForm, QuadSumSpec, delta1, delta2, quad_brute_prefix, quad_sum_closed

XS = [Fraction(v) for v in ("1", "-1", "2", "3", "1/2", "1/3", "-2", "-3", "-1/2", "-1/3")]
SEEDS = [Seed(0, 1), Seed(2, 1), Seed(1, 1), Seed(3, -2)]
PAIRS = list(itertools.product(SEEDS, SEEDS))


def jobs(full: bool):
    for idx, (b, d, x) in enumerate(itertools.product(range(-3, 4), range(-3, 4), XS)):
        if full:
            for (a, c), (g, h) in itertools.product(itertools.product(range(-2, 3), repeat=2), PAIRS):
                yield a, b, c, d, x, g, h
        else:
            for i in range(5):
                g, h = PAIRS[(5 * idx + i) % 16]
                yield -2 + i, b, -2 + (i + idx) % 5, d, x, g, h


def check(job):
    a, b, c, d, x, g, h = job
    if delta1(b, d, x) * delta2(b, d, x) == 0:
        try:
            quad_sum_closed(QuadSumSpec(a, b, c, d, x, 0, 3, g, h))
        except VanishingDenominator:
            return 0, 0, 1
        return 0, 1, 1
    form = QuadForm(a, b, c, d, x, g, h)
    brute = quad_brute_prefix(QuadSumSpec(a, b, c, d, x, 0, 0, g, h), 8)
    bad = sum(form.closed(m, n) != brute[m][n] for m in range(6) for n in range(9))
    return 54, bad, 0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    start = time.perf_counter()
    results = pmap(check, list(jobs(args.full)), args.workers)
    cases, bad, singular = (sum(col) for col in zip(*results))
    print(f"cases={cases} mismatches={bad} singular_shapes={singular} time={time.perf_counter() - start:.1f}s")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
