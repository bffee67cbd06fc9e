"""Search for shorter combinations of products of shifted Fibonacci numbers.

A problem is a left side  sum_k a_k prod_j F[q_j + c_kj]  and a term budget.
Candidates for the right side are sets of offset vectors; their coefficients
are either solved for exactly (SOLVE) or drawn from a small rational range
(ENUMERATE).  Anything that matches on the small q grid is only a candidate
until it also matches at random large q.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import FibsumError
from .expr import Bin, Expr, Neg, Num, Seq, Sym, parse
from .runner import pmap
from .sequences import fib

Term = tuple[Fraction, tuple[int, ...]]

DENOMINATORS = (1, 2, 4, 5, 10, 20, 25)
SAMPLE_BOUND = 40


@dataclass(frozen=True)
class MinerProblem:
    p: int
    lhs_terms: tuple[Term, ...]
    budget: int
    offsets: tuple[int, int] = (-2, 2)
    grid: tuple[int, int] = (-2, 2)
    mode: str = "solve"
    coeffs: tuple[int, int] = (-2, 2)
    samples: int = 20
    rng_seed: int = 0

    def __post_init__(self):
        terms = tuple((Fraction(a), tuple(c)) for a, c in self.lhs_terms)
        object.__setattr__(self, "lhs_terms", terms)
        if self.p < 1:
            raise ValueError("factor count p must be >= 1")
        if not terms:
            raise ValueError("left side needs at least one term")
        if any(len(c) != self.p for _, c in terms):
            raise ValueError(f"every offset vector needs {self.p} entries")
        if self.budget < 1:
            raise ValueError("term budget must be >= 1")
        if self.offsets[0] > self.offsets[1] or self.grid[0] > self.grid[1]:
            raise ValueError("offset and grid ranges must be nonempty")
        if self.mode not in ("solve", "enum"):
            raise ValueError(f"mode must be 'solve' or 'enum', got {self.mode!r}")

    def grid_points(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.product(range(self.grid[0], self.grid[1] + 1), repeat=self.p))

    def offset_vectors(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.offsets[0], self.offsets[1] + 1), repeat=self.p))


@dataclass(frozen=True, order=True)
class MinerSolution:
    rhs_terms: tuple[Term, ...]
    grid_size: int = field(default=0, compare=False)
    confirmed: int = field(default=0, compare=False)

    def to_text(self, p: int) -> str:
        return terms_to_text(self.rhs_terms, p)

    def to_json(self) -> dict:
        return {
            "terms": [{"coeff": str(b), "offsets": list(d)} for b, d in self.rhs_terms],
            "grid_size": self.grid_size,
            "confirmed": self.confirmed,
        }


@dataclass(frozen=True)
class CandidateVerdict:
    ok: bool
    stage: str | None = None  # "grid" or "sample" when a counterexample was found
    q: tuple[int, ...] | None = None
    lhs: Fraction | None = None
    rhs: Fraction | None = None


def _product(q: tuple[int, ...], offsets: tuple[int, ...]) -> int:
    out = 1
    for qj, dj in zip(q, offsets):
        out *= fib(qj + dj)
    return out


@lru_cache(maxsize=None)
def _cached_vector(offsets: tuple[int, ...], points: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    return tuple(_product(q, offsets) for q in points)


def eval_product_vector(offsets, points, cache: bool = True) -> tuple[int, ...]:
    """prod_j F[q_j + d_j] at every grid point q."""
    offsets = tuple(offsets)
    points = tuple(tuple(q) for q in points)
    if cache:
        return _cached_vector(offsets, points)
    return tuple(_product(q, offsets) for q in points)


def combine(terms, q) -> Fraction:
    return sum((Fraction(a) * _product(q, c) for a, c in terms), Fraction(0))


def sample_points(p: int, count: int, rng_seed: int = 0) -> list[tuple[int, ...]]:
    rng = random.Random(rng_seed)
    return [tuple(rng.randint(-SAMPLE_BOUND, SAMPLE_BOUND) for _ in range(p)) for _ in range(count)]


def verify_candidate(lhs, rhs, points, samples: int = 20, rng_seed: int = 0) -> CandidateVerdict:
    """Exact check on the grid, then at random q with |q_j| <= 40.  No caching."""
    lhs, rhs = tuple(lhs), tuple(rhs)
    p = len((lhs or rhs)[0][1])
    for stage, qs in (("grid", points), ("sample", sample_points(p, samples, rng_seed))):
        for q in qs:
            q = tuple(q)
            left, right = combine(lhs, q), combine(rhs, q)
            if left != right:
                return CandidateVerdict(False, stage, q, left, right)
    return CandidateVerdict(True)


def solve_exact(columns: list[tuple[int, ...]], target: tuple) -> list[Fraction] | None:
    """Unique solution of sum_i b_i * columns[i] = target, or None.

    Gaussian elimination over the rationals; None when the system is
    inconsistent or the columns are linearly dependent.
    """
    n = len(columns)
    rows = [[Fraction(col[r]) for col in columns] + [Fraction(target[r])] for r in range(len(target))]
    pivot_row = 0
    for col in range(n):
        pick = next((r for r in range(pivot_row, len(rows)) if rows[r][col] != 0), None)
        if pick is None:
            return None
        rows[pivot_row], rows[pick] = rows[pick], rows[pivot_row]
        lead = rows[pivot_row]
        inv = 1 / lead[col]
        lead[:] = [v * inv for v in lead]
        for r, row in enumerate(rows):
            if r != pivot_row and row[col] != 0:
                f = row[col]
                row[:] = [v - f * w for v, w in zip(row, lead)]
        pivot_row += 1
    if any(row[n] != 0 for row in rows[pivot_row:]):
        return None
    return [rows[i][n] for i in range(n)]


def coefficient_values(lo: int, hi: int) -> list[Fraction]:
    values = {Fraction(i, den) for den in DENOMINATORS for i in range(lo, hi + 1)}
    values.discard(Fraction(0))
    return sorted(values)


def _canonical(coeffs, offsets) -> tuple[Term, ...]:
    return tuple(sorted((Fraction(b), d) for b, d in zip(coeffs, offsets) if b != 0))


def _search_chunk(args) -> list[tuple[Term, ...]]:
    problem, combos, cache = args
    points = problem.grid_points()
    target = lhs_vector(problem, points, cache)
    coeff_values = coefficient_values(*problem.coeffs) if problem.mode == "enum" else None
    found = []
    for combo in combos:
        cols = [eval_product_vector(d, points, cache) for d in combo]
        if coeff_values is None:
            b = solve_exact(cols, target)
            if b is not None and all(v != 0 for v in b):
                found.append(_canonical(b, combo))
            continue
        for b in itertools.product(coeff_values, repeat=len(combo)):
            if all(sum(bi * col[i] for bi, col in zip(b, cols)) == target[i] for i in range(len(points))):
                found.append(_canonical(b, combo))
    return found


def lhs_vector(problem: MinerProblem, points, cache: bool = True) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * len(points)
    for a, c in problem.lhs_terms:
        for i, v in enumerate(eval_product_vector(c, points, cache)):
            out[i] += a * v
    return tuple(out)


def mine(problem: MinerProblem, cache: bool = True, workers: int | None = 1) -> list[MinerSolution]:
    """All verified right sides with at most `budget` nonzero terms, sorted."""
    vectors = problem.offset_vectors()
    combos = [c for size in range(1, problem.budget + 1) for c in itertools.combinations(vectors, size)]
    chunk = max(1, len(combos) // (4 * max(1, workers or 1)))
    chunks = [(problem, combos[i : i + chunk], cache) for i in range(0, len(combos), chunk)]
    results = pmap(_search_chunk, chunks, workers) if workers != 1 else [_search_chunk(c) for c in chunks]
    points = problem.grid_points()
    out = set()
    for rhs in itertools.chain.from_iterable(results):
        verdict = verify_candidate(problem.lhs_terms, rhs, points, problem.samples, problem.rng_seed)
        if verdict.ok:
            out.add(MinerSolution(rhs, len(points), problem.samples))
    return sorted(out, key=lambda s: (len(s.rhs_terms), s.rhs_terms))


class NotAProductSum(FibsumError):
    exit_code = 2


def q_names(p: int) -> list[str]:
    return ["q"] if p == 1 else [f"q{j}" for j in range(1, p + 1)]


def _index_offset(index: Expr, names: list[str]) -> tuple[int, int]:
    """(slot, offset) for an index of the form q_j + c or q_j - c."""
    if isinstance(index, Sym) and index.name in names:
        return names.index(index.name), 0
    if isinstance(index, Bin) and index.op in "+-" and isinstance(index.left, Sym) and isinstance(index.right, Num):
        if index.left.name in names and index.right.value.denominator == 1:
            c = int(index.right.value)
            return names.index(index.left.name), c if index.op == "+" else -c
    raise NotAProductSum(f"index must look like q+c, got {index!r}")


def _expand(e: Expr, names: list[str]) -> dict[tuple, Fraction]:
    # keys are sorted tuples of (slot, offset) factors
    if isinstance(e, Num):
        return {(): e.value}
    if isinstance(e, Seq):
        if e.letter != "F":
            raise NotAProductSum("only F factors can be mined")
        return {(_index_offset(e.index, names),): Fraction(1)}
    if isinstance(e, Neg):
        return {k: -v for k, v in _expand(e.operand, names).items()}
    if isinstance(e, Bin):
        left, right = _expand(e.left, names), _expand(e.right, names)
        out: dict[tuple, Fraction] = {}
        if e.op == "*":
            for (k1, v1), (k2, v2) in itertools.product(left.items(), right.items()):
                key = tuple(sorted(k1 + k2))
                out[key] = out.get(key, 0) + v1 * v2
        else:
            sign = 1 if e.op == "+" else -1
            out.update(left)
            for k, v in right.items():
                out[k] = out.get(k, 0) + sign * v
        return {k: v for k, v in out.items() if v != 0}
    raise NotAProductSum(f"unsupported construct {type(e).__name__}")


def terms_from_expr(text: str, p: int) -> tuple[Term, ...]:
    """Read 'F[q+2] - F[q+1]' (p=1) or 'F[q1+2]*F[q2] - ...' into (coeff, offsets) terms."""
    names = q_names(p)
    terms = []
    for key, coeff in sorted(_expand(parse(text), names).items()):
        slots = [slot for slot, _ in key]
        if slots != list(range(p)):
            raise NotAProductSum(f"each term needs exactly one F factor per q_j, got {key}")
        terms.append((coeff, tuple(off for _, off in key)))
    if not terms:
        raise NotAProductSum("left side is identically zero")
    return tuple(terms)


def terms_to_text(terms, p: int) -> str:
    names = q_names(p)
    out = ""
    for b, d in terms:
        factors = "*".join(f"F[{n}{o:+d}]" if o else f"F[{n}]" for n, o in zip(names, d))
        mag = abs(b)
        body = factors if mag == 1 else f"{mag}*{factors}"
        if not out:
            out = body if b > 0 else f"-{body}"
        else:
            out += f" + {body}" if b > 0 else f" - {body}"
    return out or "0"
