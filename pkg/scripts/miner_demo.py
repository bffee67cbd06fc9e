"""Run the miner on a few reductions and print what it finds."""

import argparse
import time

from fibsum.miner import MinerProblem, mine, terms_from_expr

DEMOS = [
    (1, "F[q+2] - F[q+1]", 1),
    (1, "F[q+3] + F[q]", 1),
    (1, "F[q+4] - F[q+2]", 1),
    (1, "F[q+3] - F[q-3]", 1),
    (2, "F[q1+1]*F[q2+1] - F[q1+1]*F[q2-1]", 1),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--offsets", type=int, default=3, help="offset radius")
    ap.add_argument("--mode", choices=("solve", "enum"), default="solve")
    args = ap.parse_args()
    for p, text, budget in DEMOS:
        lo = -args.offsets if p == 1 else -1
        hi = args.offsets if p == 1 else 2
        problem = MinerProblem(p, terms_from_expr(text, p), budget, offsets=(lo, hi), mode=args.mode)
        start = time.perf_counter()
        sols = mine(problem)
        took = time.perf_counter() - start
        found = "; ".join(s.to_text(p) for s in sols) or "nothing"
        print(f"{text}  ->  {found}   ({took:.2f}s)")


if __name__ == "__main__":
    main()
