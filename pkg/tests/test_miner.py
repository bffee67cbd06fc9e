import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibsum.miner import (
    MinerProblem,
    NotAProductSum,
    coefficient_values,
    eval_product_vector,
    mine,
    solve_exact,
    terms_from_expr,
    terms_to_text,
    verify_candidate,
)

F = Fraction


def texts(solutions, p=1):
    return [s.to_text(p) for s in solutions]


def test_recurrence_contraction():
    problem = MinerProblem(1, terms_from_expr("F[q+2] - F[q+1]", 1), budget=1, offsets=(-3, 3))
    assert texts(mine(problem)) == ["F[q]"]


def test_two_terms_to_one():
    lhs = terms_from_expr("F[q+3] + F[q]", 1)
    for mode in ("solve", "enum"):
        sols = mine(MinerProblem(1, lhs, budget=1, offsets=(-3, 3), mode=mode))
        assert texts(sols) == ["2*F[q+2]"]


def test_two_factor_identity_product():
    lhs = terms_from_expr("F[q1+1]*F[q2+1] - F[q1+1]*F[q2-1]", 2)
    sols = mine(MinerProblem(2, lhs, budget=1, offsets=(-1, 1)))
    assert texts(sols, 2) == ["F[q1+1]*F[q2]"]


def test_budget_too_small_gives_nothing():
    # F[q]^... here F[q+3] is not a single multiple of any F[q+d] with |d| <= 1
    lhs = terms_from_expr("F[q+3]", 1)
    assert mine(MinerProblem(1, lhs, budget=1, offsets=(-1, 1))) == []
    sols = mine(MinerProblem(1, lhs, budget=2, offsets=(-1, 1)))
    assert "2*F[q+1] + F[q]" in texts(sols) or "F[q] + 2*F[q+1]" in texts(sols)


def test_counterexample_on_grid():
    lhs = terms_from_expr("F[q+2]", 1)
    rhs = ((F(2), (0,)),)
    verdict = verify_candidate(lhs, rhs, [(1,), (2,)])
    assert not verdict.ok and verdict.stage == "grid" and verdict.q == (2,)


def test_counterexample_only_at_samples():
    # F[q+2] = 2 F[q] holds at q = 1 only
    lhs = terms_from_expr("F[q+2]", 1)
    rhs = ((F(2), (0,)),)
    verdict = verify_candidate(lhs, rhs, [(1,)])
    assert not verdict.ok and verdict.stage == "sample"
    assert abs(verdict.q[0]) <= 40 and verdict.lhs != verdict.rhs


def test_emitted_solutions_survive_reverification():
    lhs = terms_from_expr("F[q+3] - F[q-1]", 1)
    problem = MinerProblem(1, lhs, budget=2, offsets=(-3, 3))
    sols = mine(problem)
    assert sols
    for s in sols:
        assert verify_candidate(lhs, s.rhs_terms, problem.grid_points(), samples=20, rng_seed=12345).ok
        assert s.confirmed == 20


def test_cache_is_transparent():
    lhs = terms_from_expr("F[q1+2]*F[q2] + F[q1]*F[q2+1]", 2)
    problem = MinerProblem(2, lhs, budget=2, offsets=(-1, 2))
    assert mine(problem, cache=True) == mine(problem, cache=False)
    pts = problem.grid_points()
    assert eval_product_vector((1, -1), pts, True) == eval_product_vector((1, -1), pts, False)


def test_deterministic():
    lhs = terms_from_expr("F[q+3] + F[q]", 1)
    problem = MinerProblem(1, lhs, budget=2, offsets=(-2, 3), rng_seed=7)
    assert [s.to_json() for s in mine(problem)] == [s.to_json() for s in mine(problem)]


def test_solve_exact():
    assert solve_exact([(1, 0), (0, 1)], (3, 4)) == [3, 4]
    assert solve_exact([(1, 1), (2, 2)], (3, 3)) is None
    assert solve_exact([(1, 1)], (1, 2)) is None
    assert solve_exact([(2, 4, 6)], (1, 2, 3)) == [F(1, 2)]


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=3), st.data())
def test_solve_exact_recovers_planted_solution(cols, data):
    coeffs = data.draw(st.lists(st.fractions(-5, 5, max_denominator=7), min_size=len(cols), max_size=len(cols)))
    target = tuple(sum(c * col[i] for c, col in zip(coeffs, cols)) for i in range(3))
    got = solve_exact([tuple(c) for c in cols], target)
    if got is not None:
        assert got == coeffs


def test_coefficient_values():
    vals = coefficient_values(-1, 1)
    assert F(0) not in vals
    assert {F(1), F(-1), F(1, 25), F(-1, 20)} <= set(vals)
    assert vals == sorted(vals)


def test_terms_from_expr():
    assert terms_from_expr("F[q+2] - F[q+1]", 1) == ((F(-1), (1,)), (F(1), (2,)))
    assert terms_from_expr("2*F[q1-1]*F[q2] + F[q2]*F[q1-1]", 2) == ((F(3), (-1, 0)),)
    assert terms_from_expr("(F[q] + F[q+1]) * 1/2", 1) == ((F(1, 2), (0,)), (F(1, 2), (1,)))
    for bad, p in [("L[q]", 1), ("F[2*q]", 1), ("F[q1]", 2), ("F[q] - F[q]", 1), ("F[q]^2", 1), ("F[r]", 1)]:
        with pytest.raises(NotAProductSum):
            terms_from_expr(bad, p)


def test_terms_to_text_round_trip():
    terms = ((F(-1, 2), (0, 3)), (F(1), (-2, 0)), (F(-3), (1, 1)))
    assert set(terms_from_expr(terms_to_text(terms, 2), 2)) == set(terms)
    assert terms_to_text(((F(-1), (-1,)), (F(3), (1,))), 1) == "-F[q-1] + 3*F[q+1]"


def test_problem_validation():
    with pytest.raises(ValueError):
        MinerProblem(0, ((1, ()),), 1)
    with pytest.raises(ValueError):
        MinerProblem(1, ((1, (0, 0)),), 1)
    with pytest.raises(ValueError):
        MinerProblem(1, ((1, (0,)),), 0)
    with pytest.raises(ValueError):
        MinerProblem(1, ((1, (0,)),), 1, mode="guess")


def test_reductions_are_fast():
    for text, expected in (("F[q+2] - F[q+1]", "F[q]"), ("F[q+3] + F[q]", "2*F[q+2]")):
        start = time.perf_counter()
        sols = mine(MinerProblem(1, terms_from_expr(text, 1), budget=1, offsets=(-3, 3)))
        assert time.perf_counter() - start < 10
        assert expected in texts(sols)
