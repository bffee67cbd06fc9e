import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibsum.catalog import find_record
from fibsum.errors import UnknownRecord, UnsupportedLimit, VanishingDenominator
from fibsum.sequences import FIB, LUCAS, STANDARD_SEEDS, Seed, fib, gen_at, lucas
from fibsum.sums import (
    CUBIC_VARIANTS,
    QUAD_WEIGHT_TABLE,
    CubicSumSpec,
    QuadForm,
    QuadSumSpec,
    binom_sum_closed,
    cubic_coefficients,
    cubic_sum_brute,
    cubic_sum_closed,
    delta1,
    delta2,
    p2,
    q2,
    quad_brute_prefix,
    quad_special,
    quad_sum,
    quad_sum_brute,
    quad_sum_closed,
    quadspec_closed,
    weighted_sum_brute,
    z_sum_ff,
)

def nonzero_rationals(max_abs: int, max_den: int):
    return st.builds(
        lambda num, den, sign: sign * Fraction(num, den),
        st.integers(1, max_abs * max_den),
        st.integers(1, max_den),
        st.sampled_from((1, -1)),
    ).filter(lambda v: abs(v) <= max_abs)


XS = [Fraction(v) for v in ("1", "-1", "2", "3", "1/2", "1/3", "-2", "-3", "-1/2", "-1/3")]
F = Fraction


def direct(x, m, n, a, b, c, d, g=FIB, h=FIB):
    """Plain-loop oracle that shares nothing with the engine."""
    total = Fraction(0)
    for k in range(n + 1):
        total += Fraction(x) ** k * k**m * gen_at(g, a + b * k) * gen_at(h, c + d * k)
    return total


# -- deltas --------------------------------------------------------------------


def test_delta_examples():
    assert delta1(1, 1, 1) == -1
    assert delta1(0, 0, F(1, 2)) == F(1, 4)
    assert delta2(2, 1, 1) == 1
    assert delta2(1, 0, F(1, 3)) == F(5, 9)


@given(st.fractions(max_denominator=50), st.integers(-6, 6))
def test_delta_squares(x, b):
    assert delta1(1, -1, x) == (1 - x) ** 2
    assert delta2(b, b, x) == (1 - (-1) ** (b % 2) * x) ** 2


# -- P2 / Q2 -------------------------------------------------------------------


def test_p2_examples():
    spec = QuadSumSpec(0, 1, 0, 1, 1)
    assert p2(1, 0, spec) == -1
    assert p2(1, 1, QuadSumSpec(0, 1, 0, 0, 2)) == 0
    for w in range(-3, 4):
        s = QuadSumSpec(2, -1, 1, 3, F(2, 7), gseed=LUCAS, hseed=Seed(3, -2))
        assert p2(0, w, s) == gen_at(LUCAS, 2 - w) * gen_at(Seed(3, -2), 1 + 3 * w)


def test_q2_vanishing_denominator_names_the_delta():
    with pytest.raises(VanishingDenominator) as err:
        q2(1, 0, QuadSumSpec(0, 1, 0, 1, -1))
    assert err.value.which == "delta2"
    with pytest.raises(VanishingDenominator) as err:
        q2(1, 0, QuadSumSpec(0, 1, 0, -1, 1))
    assert err.value.which == "delta1"
    with pytest.raises(VanishingDenominator) as err:
        q2(1, 0, QuadSumSpec(0, 0, 0, 0, 1))
    assert err.value.which == "delta1 and delta2"


def test_q2_first_term_identity():
    spec = QuadSumSpec(0, 1, 0, 1, F(1, 2))
    assert -F(1, 2) * q2(1, 1, spec) + q2(1, 0, spec) == 0


def test_q2_with_constant_second_factor():
    spec = QuadSumSpec(0, 1, 2, 0, F(1, 2), 0, 7)
    assert quad_sum_closed(spec) == direct(F(1, 2), 0, 7, 0, 1, 2, 0)


# -- finite sums ------------------------------------------------------------------


def test_closed_examples():
    # listed terms 0 + 1/2 + 1/4 + 4/8 + 9/16 + 25/32 + 64/64
    assert quad_sum_closed(QuadSumSpec(0, 1, 0, 1, F(1, 2), 0, 6)) == F(115, 32)
    spec = QuadSumSpec(1, 2, 0, -1, F(-1, 3), 3, 5, FIB, LUCAS)
    assert quad_sum_closed(spec) == quad_sum_brute(spec) == direct(F(-1, 3), 3, 5, 1, 2, 0, -1, FIB, LUCAS)


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.sampled_from(XS[4:6]), st.integers(1, 5))
def test_weighted_sum_vanishes_at_zero_limit(a, b, c, d, x, m):
    spec = QuadSumSpec(a, b, c, d, x, m, 0)
    assert quad_sum_closed(spec) == 0 == quad_sum_brute(spec)


def test_brute_examples():
    assert quad_sum_brute(QuadSumSpec(0, 1, 0, 1, 1, 0, 3)) == 6
    assert quad_sum_brute(QuadSumSpec(0, 1, 5, -1, -1, 0, 2)) == -1


def test_weight_table_rows_against_brute_small_n():
    # catches transcription slips in the weight polynomials
    for m in QUAD_WEIGHT_TABLE:
        for n in range(4):
            for x in (F(1, 2), F(-2), F(3)):
                spec = QuadSumSpec(1, 2, -1, 1, x, m, n, Seed(3, -2), LUCAS)
                assert quad_sum_closed(spec) == direct(x, m, n, 1, 2, -1, 1, Seed(3, -2), LUCAS)


def test_oracle_grid_slice():
    """One seed pair per shape; the acceptance suite runs the larger grid."""
    pairs = list(itertools.product(STANDARD_SEEDS[:4], repeat=2))
    rng = random.Random(11)
    for b, d in itertools.product(range(-3, 4), repeat=2):
        for x in XS:
            a, c = rng.randint(-2, 2), rng.randint(-2, 2)
            g, h = rng.choice(pairs)
            singular = delta1(b, d, x) * delta2(b, d, x) == 0
            form = QuadForm(a, b, c, d, x, g, h)
            pre = quad_brute_prefix(QuadSumSpec(a, b, c, d, x, 0, 0, g, h), 5)
            for m in (0, 2, 5):
                for n in (0, 3, 5):
                    spec = QuadSumSpec(a, b, c, d, x, m, n, g, h)
                    if singular:
                        with pytest.raises(VanishingDenominator):
                            quad_sum_closed(spec)
                    else:
                        assert form.closed(m, n) == pre[m][n]


def test_brute_prefix_matches_single_sums():
    spec = QuadSumSpec(-1, 2, 1, -3, F(-1, 2), 0, 0, LUCAS, Seed(1, 1))
    pre = quad_brute_prefix(spec, 6)
    for m in range(6):
        for n in range(7):
            assert pre[m][n] == direct(spec.x, m, n, -1, 2, 1, -3, LUCAS, Seed(1, 1))


@settings(max_examples=150)
@given(
    st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4),
    nonzero_rationals(4, 7),
    st.integers(0, 5), st.integers(0, 12),
    st.sampled_from(STANDARD_SEEDS), st.sampled_from(STANDARD_SEEDS),
)
def test_closed_equals_brute_random(a, b, c, d, x, m, n, g, h):
    spec = QuadSumSpec(a, b, c, d, x, m, n, g, h)
    if delta1(b, d, x) * delta2(b, d, x) == 0:
        with pytest.raises(VanishingDenominator):
            quad_sum_closed(spec)
    else:
        assert quad_sum_closed(spec) == quad_sum_brute(spec)


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.sampled_from(XS), st.integers(0, 5), st.integers(1, 10))
def test_telescoping(a, b, c, d, x, m, n):
    s1 = quad_sum_brute(QuadSumSpec(a, b, c, d, x, m, n))
    s0 = quad_sum_brute(QuadSumSpec(a, b, c, d, x, m, n - 1))
    assert s1 - s0 == x**n * n**m * fib(a + b * n) * fib(c + d * n)


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.sampled_from(XS[4:]), st.integers(0, 5), st.integers(0, 8), st.sampled_from(STANDARD_SEEDS))
def test_constant_second_factor_reduces_to_single_sequence(a, b, c, x, m, n, h):
    if delta1(b, 0, x) * delta2(b, 0, x) == 0:
        return
    spec = QuadSumSpec(a, b, c, 0, x, m, n, LUCAS, h)
    single = weighted_sum_brute(x, m, n, [(LUCAS, a, b)])
    assert quad_sum_closed(spec) == gen_at(h, c) * single


# -- singular weights ----------------------------------------------------------------


def test_special_examples():
    assert quad_special(QuadSumSpec(0, 1, 0, 1, -1, 0, 4)) == 5
    assert quad_special(QuadSumSpec(0, 1, 0, -1, 1, 0, 3)) == 4
    for s, t in itertools.product(STANDARD_SEEDS, repeat=2):
        for x, d in ((-1, 1), (1, -1)):
            spec = QuadSumSpec(2, 1, -1, d, x, 0, 0, s, t)
            assert quad_special(spec) == gen_at(s, 2) * gen_at(t, -1)


def test_special_matches_brute_everywhere_covered():
    for s, t in itertools.product(STANDARD_SEEDS, repeat=2):
        for a, c in itertools.product(range(-3, 4), repeat=2):
            for b, d, x in ((1, 1, -1), (1, -1, 1), (-1, 1, 1)):
                for n in range(0, 9):
                    spec = QuadSumSpec(a, b, c, d, x, 0, n, s, t)
                    assert quad_sum(spec) == quad_sum_brute(spec)


def test_uncovered_singular_cases_are_refused():
    for spec in (
        QuadSumSpec(0, 1, 0, 1, -1, 1, 3),
        QuadSumSpec(0, -1, 0, -1, -1, 0, 3),
        QuadSumSpec(0, 2, 0, 2, 1, 0, 3),
        QuadSumSpec(0, 2, 0, -2, 1, 0, 3),
    ):
        with pytest.raises(UnsupportedLimit):
            quad_sum(spec)


def test_dispatcher_uses_closed_form_when_regular():
    spec = QuadSumSpec(1, 1, 2, 1, F(1, 2), 3, 7, LUCAS, FIB)
    assert quad_sum(spec) == quad_sum_closed(spec)


def test_quadspec_agrees_with_q2():
    for a, c in itertools.product(range(-2, 3), repeat=2):
        for s, t in itertools.product(STANDARD_SEEDS, repeat=2):
            spec = QuadSumSpec(a, 1, c, 1, F(1, 2), gseed=s, hseed=t)
            for v in (1, 2):
                for w in (0, 1):
                    assert quadspec_closed(spec, v, w) == q2(v, w, spec)
            spec = QuadSumSpec(a, 1, c, -1, 2, gseed=s, hseed=t)
            for v in (1, 2, 3):
                for w in (-1, 0, 2):
                    assert quadspec_closed(spec, v, w) == q2(v, w, spec)
            assert quadspec_closed(spec, 0, 2) == gen_at(s, a + 2) * gen_at(t, c - 2)


def test_quadspec_mirror_example_through_first_sum():
    spec = QuadSumSpec(0, 1, 0, -1, 2)
    value = quadspec_closed(spec, 1, 0) - 2**6 * quadspec_closed(spec, 1, 6)
    assert value == quad_sum_brute(QuadSumSpec(0, 1, 0, -1, 2, 0, 5))


# -- Lucas route ----------------------------------------------------------------------


def test_z_route_examples():
    assert z_sum_ff(0, 1, 0, 1, F(1, 2), 6) == F(115, 32)
    assert z_sum_ff(0, 1, 1, 0, F(1, 3), 4) == sum(F(1, 3) ** k * fib(k) for k in range(5))
    assert z_sum_ff(0, 3, 0, -2, F(1, 5), 0) == 0


@settings(max_examples=300)
@given(
    st.integers(-6, 6), st.integers(-5, 5), st.integers(-6, 6), st.integers(-5, 5),
    nonzero_rationals(5, 9), st.integers(0, 12),
)
def test_z_route_equals_brute(a, b, c, d, x, n):
    if delta1(b, d, x) * delta2(b, d, x) == 0:
        with pytest.raises(VanishingDenominator):
            z_sum_ff(a, b, c, d, x, n)
        return
    assert z_sum_ff(a, b, c, d, x, n) == direct(x, 0, n, a, b, c, d)


# -- cubic ----------------------------------------------------------------------------


def test_cubic_examples():
    assert cubic_sum_closed(CubicSumSpec(0, 0, 0, "+k+k+k", 1, 3)) == 10
    assert cubic_sum_brute(CubicSumSpec(0, 0, 0, "+k+k+k", 1, 3)) == 10
    assert cubic_sum_closed(CubicSumSpec(0, 0, 0, "+2k+2k+2k", 1, 2)) == 28 == F(fib(15) - 12 * fib(5) + 10, 20)
    assert cubic_sum_brute(CubicSumSpec(0, 0, 0, "+k+k-k", -1, 2)) == -2
    for v in CUBIC_VARIANTS:
        spec = CubicSumSpec(1, -2, 2, v, F(2, 3), 0, LUCAS, Seed(1, 1), Seed(-1, 4))
        assert cubic_sum_closed(spec) == cubic_sum_brute(spec) == lucas(1) * gen_at(Seed(1, 1), -2) * gen_at(Seed(-1, 4), 2)


def test_cubic_aliases_and_denominators():
    assert CubicSumSpec(0, 0, 0, "1", 1, 1).variant == "+k+k+k"
    assert CubicSumSpec(0, 0, 0, "4", 1, 1).variant == "+2k+2k+2k"
    assert cubic_coefficients("+k+k+k", 1)[2] == -4
    with pytest.raises(ValueError):
        CubicSumSpec(0, 0, 0, "+3k", 1, 1)


def test_cubic_grid():
    xs = XS + [F(1, 4)]
    triples = list(itertools.product(STANDARD_SEEDS, repeat=3))
    i = 0
    for v in CUBIC_VARIANTS:
        for p, q, r in itertools.product(range(-2, 3), repeat=3):
            for x in xs:
                g, h, k = triples[i % len(triples)]
                i += 1
                if cubic_coefficients(v, x)[2] == 0:
                    continue
                for n in range(0, 9, 4):
                    spec = CubicSumSpec(p, q, r, v, x, n, g, h, k)
                    assert cubic_sum_closed(spec) == cubic_sum_brute(spec)


# -- binomial sums via the catalog ----------------------------------------------------------


def test_binomial_examples():
    assert binom_sum_closed("13.01", {"p": 0, "q": 0, "n": 2}) == 3
    for s, t in itertools.product(STANDARD_SEEDS, repeat=2):
        assert binom_sum_closed("13.01", {"p": 1, "q": -2, "n": 0}, {"G": s, "H": t}) == gen_at(s, 1) * gen_at(t, -2)
    assert binom_sum_closed("14.01", {"p": 0, "q": 0, "r": 0, "n": 3}) == 14
    assert binom_sum_closed(find_record("14.01"), {"p": 0, "q": 0, "r": 0, "n": 3}) == 14
    with pytest.raises(UnknownRecord):
        binom_sum_closed("11.01", {"p": 0, "q": 0, "n": 1})
    with pytest.raises(UnknownRecord):
        binom_sum_closed("13.99", {})


def test_power_sum_forms_agree():
    forms = [find_record(i) for i in ("07.01", "07.02", "07.05", "12.08", "12.09")]
    for n in range(13):
        values = {r.eval_rhs({"n": n}) for r in forms}
        assert values == {sum(fib(k) ** 3 for k in range(n + 1))}
