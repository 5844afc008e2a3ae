import numpy as np
import pytest
from hypothesis import given, strategies as st

from arithfwd.timegrid import DayCountBasis, build_grid, year_fraction


@pytest.mark.parametrize("days,expected", [(90, 0.25), (0, 0.0), (360, 1.0)])
def test_year_fraction(days, expected):
    assert year_fraction(days, DayCountBasis(360)) == expected


def test_year_fraction_rejects_negative_days():
    with pytest.raises(ValueError):
        year_fraction(-1)


@pytest.mark.parametrize(
    "start,end,K,total",
    [(30, 120, 90, 0.25), (360, 540, 180, 0.5), (0, 1, 1, 1 / 360)],
)
def test_build_grid_examples(start, end, K, total):
    g = build_grid(start, end, DayCountBasis(360))
    assert g.K == K
    assert np.all(g.fractions == 1 / 360)
    assert g.total == pytest.approx(total, rel=1e-14)
    assert g.times[0] == start / 360
    assert g.times[-1] == end / 360


@pytest.mark.parametrize("start,end", [(10, 10), (20, 10)])
def test_build_grid_rejects_empty_period(start, end):
    with pytest.raises(ValueError, match="end_day"):
        build_grid(start, end)


def test_basis_must_be_positive():
    with pytest.raises(ValueError):
        DayCountBasis(0)


def test_midpoint_index_is_ceil_half():
    assert build_grid(0, 90).midpoint_index() == 45
    assert build_grid(0, 91).midpoint_index() == 46


@given(st.integers(0, 2000), st.integers(1, 400), st.sampled_from([360, 365]))
def test_disjoint_cover(start, length, denom):
    g = build_grid(start, start + length, DayCountBasis(denom))
    ulp = np.spacing(g.times[1:])
    assert np.all(np.diff(g.times) > 0)
    assert np.all(np.abs(np.diff(g.times) - g.fractions) <= 4 * ulp)
    assert g.total == np.sum(g.fractions)
    assert abs(g.total - length / denom) <= 4 * length * np.spacing(1.0 / denom) + np.spacing(g.total)


def test_grid_is_deterministic():
    a, b = build_grid(30, 120), build_grid(30, 120)
    assert a.times.tobytes() == b.times.tobytes()
    assert a.fractions.tobytes() == b.fractions.tobytes()
    assert a.total == b.total
