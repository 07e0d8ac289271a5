from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chiralgerbe.errors import ConsistencyError, SimplicityViolationError, TruncationError
from chiralgerbe.genus import (FixedPointDatum, GenusInput, char_ext, char_sym,
                               character_series, example_input, genus_trace,
                               local_contribution, pbw_count, pbw_matches_character,
                               theta_f, theta_quotient, torus_fixed_points)
from chiralgerbe.kernel import UQSeries, series_mul

LAMBDAS = [2, 3, 5, Fraction(1, 2), -2]
lambdas = st.fractions(min_value=-9, max_value=9, max_denominator=5).filter(
    lambda v: v not in (0, 1))


def row(series, b):
    return dict(series.q_level(b))


def test_char_sym_and_ext_examples():
    assert char_sym([2], (1, 0, 1), 3) == UQSeries(3, {(0, 0): 1, (0, 1): 2, (0, 2): 4, (0, 3): 8})
    assert char_ext([2], (1, 2, 1), 3) == UQSeries(3, {(0, 0): 1, (2, 1): 2})
    assert char_ext([], (1, 2, 1), 3) == UQSeries.constant(3)
    with pytest.raises(TruncationError):
        char_sym([2], (1, 2, 0), 3)


@settings(max_examples=20, deadline=None)
@given(st.lists(lambdas, min_size=1, max_size=2), st.integers(1, 2), st.integers(-2, 2))
def test_sym_times_ext_of_minus_x_is_one(lams, b, a):
    s = char_sym(lams, (1, a, b), 6)
    e = char_ext(lams, (-1, a, b), 6)
    assert series_mul(s, e) == UQSeries.constant(6)


def test_theta_quotient_leading_row():
    assert row(theta_quotient(2, 0), 0) == {1: 2, -1: -1}


@pytest.mark.parametrize("lam", LAMBDAS)
def test_theta_quotient_is_one_at_u_one(lam):
    assert theta_quotient(lam, 8).at_u_equals_one() == UQSeries.constant(8)


def test_theta_f_multiplicative():
    assert theta_f([2, 3], 5) == series_mul(theta_quotient(2, 5), theta_quotient(3, 5))


def test_local_contribution_leading_row():
    assert row(local_contribution(FixedPointDatum((2,)), 0), 0) == {1: 2, -1: -1}


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("lam", LAMBDAS)
def test_local_contribution_equals_theta(lam, d):
    eig = (lam,) if d == 1 else (lam, lam * 3)
    fp = FixedPointDatum(eig)
    assert local_contribution(fp, 8) == theta_f(fp.eigenvalues, 8)


@settings(max_examples=10, deadline=None)
@given(st.lists(lambdas, min_size=1, max_size=2))
def test_local_contribution_equals_theta_random(lams):
    fp = FixedPointDatum(tuple(lams))
    assert local_contribution(fp, 4) == theta_f(fp.eigenvalues, 4)


def test_simplicity_enforced():
    with pytest.raises(SimplicityViolationError):
        FixedPointDatum((1,))
    with pytest.raises(SimplicityViolationError):
        theta_quotient(1, 3)
    with pytest.raises(SimplicityViolationError):
        example_input("p1", [1], 3)
    with pytest.raises(SimplicityViolationError):
        FixedPointDatum((0, 2))


def test_torus_fixed_points():
    pts = torus_fixed_points([1, 2, 3])
    assert [p.eigenvalues for p in pts] == [
        (2, 3), (Fraction(1, 2), Fraction(3, 2)), (Fraction(1, 3), Fraction(2, 3))]


@pytest.mark.parametrize("name,lams,count", [("p1", [2], 2), ("p2", [2, 3], 3)])
def test_genus_at_y_one_counts_fixed_points(name, lams, count):
    res = genus_trace(example_input(name, lams, 8))
    assert res.agree
    assert res.series.at_u_equals_one() == UQSeries.constant(8, count)


def test_p1_genus_leading_row():
    res = genus_trace(example_input("p1", [2], 4))
    assert row(res.series, 0) == {1: 1, -1: 1}
    assert genus_trace(example_input("p1", [2], 0)).series.order == 0


def test_genus_two_paths_detect_mismatch(monkeypatch):
    import chiralgerbe.genus as g
    data = example_input("p1", [3], 3)
    monkeypatch.setattr(g, "theta_f", lambda e, n: UQSeries.constant(n))
    with pytest.raises(ConsistencyError):
        g.genus_trace(data)


def test_genus_input_validation():
    with pytest.raises(ValueError):
        GenusInput(1, (), 3)
    with pytest.raises(ValueError):
        GenusInput(1, ((2,), (2, 3)), 3)


def test_pbw_q1_row_for_d1():
    counts = pbw_count(1, 1)
    assert {c: counts[1, c] for c in (-1, 0, 1, 2)} == {-1: 1, 0: 3, 1: 3, 2: 1}
    assert sum(v for (w, _), v in counts.items() if w == 1) == 8
    assert {c: counts[0, c] for c in (0, 1)} == {0: 1, 1: 1}
    series = character_series(1, 1)
    assert row(series, 1) == {-2: 1, 0: 3, 2: 3, 4: 1}


@pytest.mark.parametrize("d,cap", [(1, 3), (2, 2), (1, 4), (2, 3)])
def test_pbw_matches_character(d, cap):
    ok, got, expected = pbw_matches_character(d, cap)
    assert ok, (got, expected)


def test_pbw_cap():
    with pytest.raises(TruncationError):
        pbw_count(3, 2)
