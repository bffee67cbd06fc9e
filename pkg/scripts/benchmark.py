"""Timing of the main hot paths on this machine."""

import time
from fractions import Fraction

from fibsum.catalog import catalog_verify, shipped_catalog
from fibsum.identities import run_identity_grid
from fibsum.sequences import fl_fast
from fibsum.sums import QuadSumSpec, quad_sum_brute, quad_sum_closed


def timed(label, fn):
    start = time.perf_counter()
    fn()
    print(f"{label:40s} {time.perf_counter() - start:8.3f}s")


def main():
    timed("F(10^6) by fast doubling", lambda: fl_fast(10**6))
    timed("F(10^7) by fast doubling", lambda: fl_fast(10**7))
    spec = QuadSumSpec(1, 2, -1, 3, Fraction(1, 3), 5, 200)
    timed("quad closed m=5 n=200", lambda: quad_sum_closed(spec))
    timed("quad brute m=5 n=200", lambda: quad_sum_brute(spec))
    timed("core identity grid radius 4", lambda: run_identity_grid(None, 4))
    timed("catalog verify grid 3", lambda: catalog_verify(shipped_catalog(), 3))


if __name__ == "__main__":
    main()
