"""Infinite weighted series of Fibonacci-like products as exact rationals.

The value of a series is its closed form, a rational function of x.  The
convergence check only guards the meaning of that value: inside the radius
the partial sums tend to it, outside they do not.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv
from mpmath.libmp import to_rational

from .errors import DivergentSeries, Indeterminate, VanishingDenominator
from .sequences import FIB, Seed, seq_table
from .sums import CubicSumSpec, QuadForm, QuadSumSpec, cubic_coefficients, cubic_variant

GUARD = Fraction(1, 10**15)
_DIGITS = 64

# Cubic variants: growth exponent s in |x| * phi^s < 1.
CUBIC_SLOPE = {"+k+k+k": 3, "+k+k-k": 3, "+k-k-k": 3, "+2k+2k+2k": 6}

# sum_k x^k k^m G H = sum_j coeff_j x^(j-1) Q2(j, j-1)
SERIES_COEFFS: dict[int, dict[int, int]] = {
    0: {1: 1},
    1: {2: 1},
    2: {2: 1, 3: 2},
    3: {2: 1, 3: 6, 4: 6},
    4: {2: 1, 3: 14, 4: 36, 5: 24},
    5: {2: 1, 3: 30, 4: 150, 5: 240, 6: 120},
}


def converges_slope(s: int, x) -> bool:
    """Is |x| * phi^s < 1?  Raises Indeterminate within the relative guard band."""
    x = abs(Fraction(x))
    if x == 0:
        return True
    saved = iv.dps
    iv.dps = _DIGITS
    try:
        phi = (1 + iv.sqrt(5)) / 2
        val = iv.mpf(x.numerator) / x.denominator * phi**s
        lo, hi = (Fraction(*map(int, to_rational(end))) for end in val._mpi_)
    finally:
        iv.dps = saved
    if hi < 1 - GUARD:
        return True
    if lo > 1 + GUARD:
        return False
    raise Indeterminate(f"|x| phi^{s} is within {float(GUARD)} of 1 for x={x}")


def converges(b: int, d: int, x) -> bool:
    return converges_slope(abs(b) + abs(d), x)


def _require(s: int, x) -> None:
    if not converges_slope(s, x):
        raise DivergentSeries(f"series diverges: |x| phi^{s} >= 1 for x={x}")


@dataclass(frozen=True)
class SeriesSpec:
    """sum_{k>=0} x^k k^m G_{a+bk} H_{c+dk}."""

    a: int
    b: int
    c: int
    d: int
    x: Fraction
    m: int = 0
    gseed: Seed = FIB
    hseed: Seed = FIB

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        if not 0 <= self.m <= 5:
            raise ValueError("weight power m must lie in 0..5")

    def partial(self, n: int) -> QuadSumSpec:
        return QuadSumSpec(self.a, self.b, self.c, self.d, self.x, self.m, n, self.gseed, self.hseed)


def _form(spec: SeriesSpec) -> QuadForm:
    form = QuadForm(spec.a, spec.b, spec.c, spec.d, spec.x, spec.gseed, spec.hseed)
    form.check()
    return form


def quad_series(spec: SeriesSpec) -> Fraction:
    """Exact value of the infinite quadratic series."""
    _require(abs(spec.b) + abs(spec.d), spec.x)
    form = _form(spec)
    x = spec.x
    return sum((c * x ** (j - 1) * form.q2(j, j - 1) for j, c in SERIES_COEFFS[spec.m].items()), Fraction(0))


def quad_series_tail(spec: SeriesSpec, n: int) -> Fraction:
    """What the infinite series adds beyond the partial sum up to n."""
    return _form(spec).tail(spec.m, n)


def quad_gf_forms(p: int, q: int, direction: str, x, gseed: Seed = FIB, hseed: Seed = FIB) -> Fraction:
    """Two-term rational forms of sum x^k G_{p+k} H_{q+-k}."""
    x = Fraction(x)
    _require(2, x)
    G, H = seq_table(gseed), seq_table(hseed)
    direction = direction.replace("−", "-")
    if direction == "++":
        d0 = 1 - 3 * x + x * x
        d1 = (1 + x) * d0
        if d1 == 0:
            raise VanishingDenominator("1 - 3x + x^2" if d0 == 0 else "1 + x")
        mix = 3 * G[p] * H[q] - G[p - 1] * H[q - 1] - G[p + 1] * H[q + 1]
        return (G[p] * H[q] - x * G[p - 1] * H[q - 1]) / d0 - x * mix / d1
    if direction == "+-":
        d0 = 1 + 3 * x + x * x
        d1 = (1 - x) * d0
        if d1 == 0:
            raise VanishingDenominator("1 + 3x + x^2" if d0 == 0 else "1 - x")
        mix = 2 * G[p] * H[q] + G[p - 1] * H[q - 1] + G[p + 1] * H[q + 1]
        return (G[p] * H[q] - x * G[p - 1] * H[q + 1]) / d0 + x * mix / d1
    raise ValueError(f"direction must be '++' or '+-', got {direction!r}")


def cubic_gf(variant: str, p: int, q: int, r: int, x, gseed: Seed = FIB, hseed: Seed = FIB, kseed: Seed = FIB) -> Fraction:
    """Exact value of sum_{k>=0} x^k G H K along the variant's slopes."""
    variant = cubic_variant(variant)
    x = Fraction(x)
    _require(CUBIC_SLOPE[variant], x)
    A, B, D = cubic_coefficients(variant, x)
    if D == 0:
        raise VanishingDenominator("cubic denominator")
    T = CubicSumSpec(p, q, r, variant, x, 0, gseed, hseed, kseed).product
    return -(A * T(-1) + B * T(0) + x * x * T(-2) - x * T(1)) / D
