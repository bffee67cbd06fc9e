"""Closed forms for finite weighted sums of products of Fibonacci-like terms.

The quadratic sums ``sum_{k=0}^n x^k k^m G_{a+bk} H_{c+dk}`` (m <= 5) are
assembled from the building block ``Q2(v, w)``; the cubic sums use the four
explicit three-factor closed forms.  Every closed form has a brute-force
twin here so the two can be compared term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import exact_pow
from .errors import UnknownRecord, UnsupportedLimit, VanishingDenominator
from .sequences import FIB, Seed, binom, lucas, seq_table, term


def _sign(e: int) -> int:
    return -1 if e & 1 else 1


def delta1(b: int, d: int, x) -> Fraction:
    """1 - L_{b+d} x + (-1)^{b+d} x^2."""
    x = Fraction(x)
    return 1 - lucas(b + d) * x + _sign(b + d) * x * x


def delta2(b: int, d: int, x) -> Fraction:
    """1 - (-1)^d L_{b-d} x + (-1)^{b-d} x^2."""
    x = Fraction(x)
    return 1 - _sign(d) * lucas(b - d) * x + _sign(b - d) * x * x


@dataclass(frozen=True)
class QuadSumSpec:
    """sum_{k=0}^n x^k k^m G_{a+bk} H_{c+dk}."""

    a: int
    b: int
    c: int
    d: int
    x: Fraction = Fraction(1)
    m: int = 0
    n: int = 0
    gseed: Seed = FIB
    hseed: Seed = FIB

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        if not 0 <= self.m <= 5:
            raise ValueError("weight power m must lie in 0..5")
        if self.n < 0:
            raise ValueError("upper limit n must be >= 0")


# Finite-sum assembly: the sum equals
#   - sum_j c_j [ poly_j(n) x^{n+j} Q2(j, n+j) - e_j x^{j-1} Q2(j, j-1) ]
# with one (c_j, poly_j, e_j) row per j = 1..m+1.  Polynomials are ascending
# coefficient lists in n.
QUAD_WEIGHT_TABLE: dict[int, list[tuple[int, tuple[int, ...], int]]] = {
    0: [(1, (1,), 1)],
    1: [(1, (1, 1), 0), (1, (1,), 1)],
    2: [(1, (1, 2, 1), 0), (1, (3, 2), 1), (2, (1,), 1)],
    3: [(1, (1, 3, 3, 1), 0), (1, (7, 9, 3), 1), (6, (2, 1), 1), (6, (1,), 1)],
    4: [
        (1, (1, 4, 6, 4, 1), 0),
        (1, (15, 28, 18, 4), 1),
        (2, (25, 24, 6), 7),
        (12, (5, 2), 3),
        (24, (1,), 1),
    ],
    5: [
        (1, (1, 5, 10, 10, 5, 1), 0),
        (1, (31, 75, 70, 30, 5), 1),
        (10, (18, 25, 12, 2), 3),
        (30, (13, 10, 2), 5),
        (120, (3, 1), 2),
        (120, (1,), 1),
    ],
}


def _poly(coeffs: Sequence[int], n: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * n + c
    return acc


class QuadForm:
    """Q2 machinery for one choice of offsets, weight and seeds.

    Instances cache powers of the two deltas and Q2 values, so evaluating
    many (m, n) pairs for the same sum shape is cheap.
    """

    def __init__(self, a: int, b: int, c: int, d: int, x, gseed: Seed = FIB, hseed: Seed = FIB):
        self.a, self.b, self.c, self.d = a, b, c, d
        self.x = Fraction(x)
        self.G = seq_table(gseed)
        self.H = seq_table(hseed)
        self.d1 = delta1(b, d, self.x)
        self.d2 = delta2(b, d, self.x)
        self._sgn = _sign(b + d + 1)
        self._coef: dict[int, tuple[Fraction, Fraction]] = {}
        self._q2: dict[tuple[int, int], Fraction] = {}
        self._const: dict[int, Fraction] = {}
        self._xpow = [Fraction(1)]
        self._tail_terms: dict[tuple[int, int], Fraction] = {}

    @classmethod
    def from_spec(cls, spec: QuadSumSpec) -> "QuadForm":
        return cls(spec.a, spec.b, spec.c, spec.d, spec.x, spec.gseed, spec.hseed)

    def check(self):
        if self.d1 == 0 and self.d2 == 0:
            raise VanishingDenominator("delta1 and delta2")
        if self.d1 == 0:
            raise VanishingDenominator("delta1")
        if self.d2 == 0:
            raise VanishingDenominator("delta2")

    def p2_scaled(self, v: int, w: int, shift: int = 0) -> int:
        """P2(v, w) times den(x)^v, an integer; ``shift`` moves a and c together."""
        num, den = self.x.numerator, self.x.denominator
        G, H = self.G, self.H
        ga = self.a + shift + self.b * w
        hc = self.c + shift + self.d * w
        total = 0
        xk = 1  # (sgn * num)^k
        step = self._sgn * num
        for k in range(v + 1):
            total += math.comb(v, k) * xk * den ** (v - k) * G[ga - self.b * k] * H[hc - self.d * k]
            xk *= step
        return total

    def p2(self, v: int, w: int, shift: int = 0) -> Fraction:
        return Fraction(self.p2_scaled(v, w, shift), self.x.denominator**v)

    def _coefficients(self, v: int) -> tuple[Fraction, Fraction]:
        got = self._coef.get(v)
        if got is None:
            self.check()
            inv1 = 1 / self.d1**v
            inv2 = 1 / self.d2**v
            scale = 5 * self.x.denominator**v
            got = ((2 * inv1 + 3 * inv2) / scale, (inv1 - inv2) / scale)
            self._coef[v] = got
        return got

    def q2(self, v: int, w: int) -> Fraction:
        key = (v, w)
        got = self._q2.get(key)
        if got is None:
            c0, c1 = self._coefficients(v)
            got = c0 * self.p2_scaled(v, w) + c1 * (self.p2_scaled(v, w, -1) + self.p2_scaled(v, w, 1))
            self._q2[key] = got
        return got

    def xpow(self, e: int) -> Fraction:
        pw = self._xpow
        while len(pw) <= e:
            pw.append(pw[-1] * self.x)
        return pw[e]

    def tail(self, m: int, n: int) -> Fraction:
        """The n-dependent part; the finite sum is ``constant(m) - tail(m, n)``."""
        total = Fraction(0)
        for j, (cj, poly, _) in enumerate(QUAD_WEIGHT_TABLE[m], start=1):
            pv = _poly(poly, n)
            if pv:
                t = self._tail_terms.get((j, n))
                if t is None:
                    t = self._tail_terms[(j, n)] = self.xpow(n + j) * self.q2(j, n + j)
                total += cj * pv * t
        return total

    def constant(self, m: int) -> Fraction:
        got = self._const.get(m)
        if got is None:
            got = Fraction(0)
            for j, (cj, _, ej) in enumerate(QUAD_WEIGHT_TABLE[m], start=1):
                if ej:
                    got += cj * ej * self.xpow(j - 1) * self.q2(j, j - 1)
            self._const[m] = got
        return got

    def closed(self, m: int, n: int) -> Fraction:
        return self.constant(m) - self.tail(m, n)


def p2(v: int, w: int, spec: QuadSumSpec, shift: int = 0) -> Fraction:
    """P2(v, w); ``shift=-1``/``+1`` give the variants with a, c moved together."""
    return QuadForm.from_spec(spec).p2(v, w, shift)


def q2(v: int, w: int, spec: QuadSumSpec) -> Fraction:
    return QuadForm.from_spec(spec).q2(v, w)


def quad_sum_closed(spec: QuadSumSpec) -> Fraction:
    """Closed form of the quadratic weighted sum; raises VanishingDenominator."""
    form = QuadForm.from_spec(spec)
    form.check()
    return form.closed(spec.m, spec.n)


def weighted_sum_brute(
    x,
    m: int,
    n: int,
    factors: Iterable[tuple[Seed, int, int]],
    binomial: bool = False,
) -> Fraction:
    """sum_{k=0}^n [C(n,k)] x^k k^m prod_i S_i(offset_i + slope_i k), term by term."""
    factors = list(factors)
    x = Fraction(x)
    total = Fraction(0)
    xk = Fraction(1)
    for k in range(n + 1):
        t = xk * k**m
        if binomial:
            t *= binom(n, k)
        for seed, off, slope in factors:
            t *= term(seed, off + slope * k)
        total += t
        xk *= x
    return total


def quad_sum_brute(spec: QuadSumSpec) -> Fraction:
    return weighted_sum_brute(
        spec.x, spec.m, spec.n, [(spec.gseed, spec.a, spec.b), (spec.hseed, spec.c, spec.d)]
    )


def quad_brute_prefix(spec: QuadSumSpec, n_max: int) -> list[list[Fraction]]:
    """Partial sums ``out[m][n]`` for all m in 0..5 and n in 0..n_max in one pass."""
    x = spec.x
    G, H = seq_table(spec.gseed), seq_table(spec.hseed)
    out = [[Fraction(0)] * (n_max + 1) for _ in range(6)]
    acc = [Fraction(0)] * 6
    xk = Fraction(1)
    for k in range(n_max + 1):
        base = xk * G[spec.a + spec.b * k] * H[spec.c + spec.d * k]
        kp = 1
        for m in range(6):
            acc[m] += base * kp
            out[m][k] = acc[m]
            kp *= k
        xk *= x
    return out


# --------------------------------------------------------------------------
# d = b and d = -b
# --------------------------------------------------------------------------


def quadspec_closed(spec: QuadSumSpec, v: int, w: int) -> Fraction:
    """Q2(v, w) through the structured forms available when d = b or d = -b."""
    a, b, c, d, x = spec.a, spec.b, spec.c, spec.d, spec.x
    G, H = seq_table(spec.gseed), seq_table(spec.hseed)
    form = QuadForm.from_spec(spec)
    pv = form.p2(v, w)
    if d == b:
        d1 = 1 - lucas(2 * b) * x + x * x
        base = 1 - _sign(b) * x
        d2 = base * base
        if (d1 == 0 or d2 == 0) and v > 0:
            raise VanishingDenominator("delta1" if d1 == 0 else "delta2")
        mix = 3 * G[a] * H[c] - G[a - 1] * H[c - 1] - G[a + 1] * H[c + 1]
        return pv / d1**v + Fraction(1, 5) * (1 / d2**v - 1 / d1**v) * _sign(b * w) * base**v * mix
    if d == -b:
        base = 1 - x
        d1 = base * base
        d2 = 1 - _sign(b) * lucas(2 * b) * x + x * x
        if (d1 == 0 or d2 == 0) and v > 0:
            raise VanishingDenominator("delta1" if d1 == 0 else "delta2")
        mix = 2 * G[a] * H[c] + G[a - 1] * H[c - 1] + G[a + 1] * H[c + 1]
        return pv / d2**v + Fraction(1, 5) * (1 / d1**v - 1 / d2**v) * base**v * mix
    raise ValueError("quadspec_closed requires d = b or d = -b")


def _alternating_parallel_sum(G, H, p: int, q: int, n: int) -> Fraction:
    # sum_{k=0}^n (-1)^k G_{p+k} H_{q+k}
    return Fraction(
        _sign(n) * (G[p + n] * H[q + n] + G[p + n + 1] * H[q + n + 1])
        + n * (3 * G[p] * H[q] - G[p - 1] * H[q - 1] - G[p + 1] * H[q + 1])
        + 4 * G[p] * H[q]
        - G[p + 1] * H[q + 1],
        5,
    )


def _opposite_shift_sum(G, H, p: int, q: int, n: int) -> Fraction:
    # sum_{k=0}^n G_{p+k} H_{q-k}
    return Fraction(
        G[p + n] * H[q - n]
        - G[p + n + 1] * H[q - n - 1]
        + n * (2 * G[p] * H[q] + G[p - 1] * H[q - 1] + G[p + 1] * H[q + 1])
        + 4 * G[p] * H[q]
        + G[p + 1] * H[q - 1],
        5,
    )


def quad_special(spec: QuadSumSpec) -> Fraction:
    """Explicit values at the singular weights with known limit formulas.

    Covered: b = d = 1 at x = -1, and b = -d = +-1 at x = 1, both for m = 0.
    Anything else raises UnsupportedLimit.
    """
    G, H = seq_table(spec.gseed), seq_table(spec.hseed)
    b, d, x = spec.b, spec.d, spec.x
    if spec.m == 0:
        if b == d == 1 and x == -1:
            return _alternating_parallel_sum(G, H, spec.a, spec.c, spec.n)
        if b == 1 and d == -1 and x == 1:
            return _opposite_shift_sum(G, H, spec.a, spec.c, spec.n)
        if b == -1 and d == 1 and x == 1:
            # G_{a-k} H_{c+k} is the same sum with the factors swapped
            return _opposite_shift_sum(H, G, spec.c, spec.a, spec.n)
    raise UnsupportedLimit(
        f"no explicit limit formula for b={b}, d={d}, x={x}, m={spec.m}"
    )


def quad_sum(spec: QuadSumSpec) -> Fraction:
    """Closed form, falling back to the explicit singular-weight formulas."""
    try:
        return quad_sum_closed(spec)
    except VanishingDenominator:
        return quad_special(spec)


# --------------------------------------------------------------------------
# Independent route for F*F through Lucas numbers
# --------------------------------------------------------------------------


def z_sum_ff(a: int, b: int, c: int, d: int, x, n: int) -> Fraction:
    """sum_{k=0}^n x^k F_{a+bk} F_{c+dk} as Z1 + Z2.

    Uses 5 F_u F_v = L_{u+v} - (-1)^v L_{u-v} and the telescoped sum
    (1 - L_B y + (-1)^B y^2) sum_k y^k L_{A+Bk}
        = y^{n+1} [(-1)^B L_{A+Bn} y - L_{A+B(n+1)}] - [(-1)^B L_{A-B} y - L_A].
    """
    x = Fraction(x)
    d1, d2 = delta1(b, d, x), delta2(b, d, x)
    if d1 == 0:
        raise VanishingDenominator("delta1")
    if d2 == 0:
        raise VanishingDenominator("delta2")
    s, t = b + d, b - d
    xn1 = x ** (n + 1)
    z1 = (
        xn1 * (_sign(s) * lucas(a + c + s * n) * x - lucas(a + c + s * (n + 1)))
        - (_sign(s) * lucas(a + c - s) * x - lucas(a + c))
    ) / (5 * d1)
    z2 = (
        -_sign(c)
        * (
            xn1 * _sign(d * (n + 1)) * (_sign(b) * lucas(a - c + t * n) * x - lucas(a - c + t * (n + 1)))
            - (_sign(b) * lucas(a - c - t) * x - lucas(a - c))
        )
        / (5 * d2)
    )
    return z1 + z2


# --------------------------------------------------------------------------
# Cubic sums
# --------------------------------------------------------------------------

CUBIC_VARIANTS = {
    "+k+k+k": (1, 1, 1),
    "+k+k-k": (1, 1, -1),
    "+k-k-k": (1, -1, -1),
    "+2k+2k+2k": (2, 2, 2),
}
_VARIANT_ALIASES = {"1": "+k+k+k", "2": "+k+k-k", "3": "+k-k-k", "4": "+2k+2k+2k"}


def cubic_variant(name: str) -> str:
    name = _VARIANT_ALIASES.get(name, name.replace("−", "-"))
    if name not in CUBIC_VARIANTS:
        raise ValueError(f"unknown cubic variant {name!r}")
    return name


def cubic_coefficients(variant: str, x) -> tuple[Fraction, Fraction, Fraction]:
    """(A, B, D): the two x-polynomial coefficients and the denominator."""
    x = Fraction(x)
    x2 = x * x
    if variant in ("+k+k+k", "+k-k-k"):
        return x2 * (x + 3), 3 * x - 1, (1 + x - x2) * (1 - 4 * x - x2)
    if variant == "+k+k-k":
        return x2 * (x - 3), -(3 * x + 1), (1 - x - x2) * (1 + 4 * x - x2)
    if variant == "+2k+2k+2k":
        return x2 * (x - 21), 21 * x - 1, (1 - 3 * x + x2) * (1 - 18 * x + x2)
    raise ValueError(f"unknown cubic variant {variant!r}")


@dataclass(frozen=True)
class CubicSumSpec:
    """sum_{k=0}^n x^k G_{p+s1 k} H_{q+s2 k} K_{r+s3 k} for a variant's slopes."""

    p: int
    q: int
    r: int
    variant: str = "+k+k+k"
    x: Fraction = Fraction(1)
    n: int = 0
    gseed: Seed = FIB
    hseed: Seed = FIB
    kseed: Seed = FIB

    def __post_init__(self):
        object.__setattr__(self, "variant", cubic_variant(self.variant))
        object.__setattr__(self, "x", Fraction(self.x))
        if self.n < 0:
            raise ValueError("upper limit n must be >= 0")

    @property
    def slopes(self) -> tuple[int, int, int]:
        return CUBIC_VARIANTS[self.variant]

    def product(self, j: int) -> int:
        """G H K at step j along the variant's slopes (j may be negative)."""
        s1, s2, s3 = self.slopes
        return term(self.gseed, self.p + s1 * j) * term(self.hseed, self.q + s2 * j) * term(self.kseed, self.r + s3 * j)


def cubic_sum_closed(spec: CubicSumSpec) -> Fraction:
    x = spec.x
    A, B, D = cubic_coefficients(spec.variant, x)
    if D == 0:
        raise VanishingDenominator("cubic denominator")
    T = spec.product
    n = spec.n
    x2 = x * x
    top = x ** (n + 1) * (A * T(n) + B * T(n + 1) + x2 * T(n - 1) - x * T(n + 2))
    bottom = A * T(-1) + B * T(0) + x2 * T(-2) - x * T(1)
    return (top - bottom) / D


def cubic_sum_brute(spec: CubicSumSpec) -> Fraction:
    s1, s2, s3 = spec.slopes
    return weighted_sum_brute(
        spec.x,
        0,
        spec.n,
        [(spec.gseed, spec.p, s1), (spec.hseed, spec.q, s2), (spec.kseed, spec.r, s3)],
    )


# --------------------------------------------------------------------------
# Binomial-coefficient sums (data-driven through the identity catalog)
# --------------------------------------------------------------------------

BINOMIAL_SECTIONS = ("13", "14")


def binom_sum_closed(record, params: dict, seeds: dict | None = None) -> Fraction:
    """Right-hand side of a binomial-coefficient catalog identity.

    ``record`` is an IdentityRecord or its id such as ``"13.01"``.  Seed
    slots not given in ``seeds`` default to FIB.
    """
    from . import catalog

    if isinstance(record, str):
        record = catalog.find_record(record, sections=BINOMIAL_SECTIONS)
    elif record.section not in BINOMIAL_SECTIONS:
        raise UnknownRecord(f"{record.id} is not a binomial-coefficient identity")
    slots = {letter: FIB for letter in record.letters if letter in "GHK"}
    slots.update(seeds or {})
    return record.eval_rhs(params, slots)
