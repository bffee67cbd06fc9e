"""Verify the identity catalog and print per-record results.

--all-seeds checks every seed combination (125 for three-slot records)
instead of the covering array.
"""

import argparse
import itertools
import time

from fibsum import catalog as cat


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--file")
    ap.add_argument("--grid", type=int, default=3)
    ap.add_argument("--section", action="append")
    ap.add_argument("--all-seeds", action="store_true")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    records = cat.load_catalog(args.file) if args.file else cat.shipped_catalog()
    if args.section:
        records = [r for r in records if r.section in args.section]
    if args.all_seeds:
        cat.seed_assignments = _full_product
    start = time.perf_counter()
    report = cat.catalog_verify(records, args.grid, workers=args.workers)
    print("\n".join(report.lines()))
    checks = sum(r.passed for r in report.results)
    print(f"{len(records)} records, {checks} checks, failing={report.failing}, {time.perf_counter() - start:.1f}s")
    raise SystemExit(0 if report.ok else 1)


def _full_product(letters, seeds=cat.STANDARD_SEEDS):
    return [dict(zip(letters, combo)) for combo in itertools.product(seeds, repeat=len(letters))]


if __name__ == "__main__":
    main()
