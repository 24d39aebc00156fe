from fractions import Fraction

import pytest

from core.errors import CurveNotCarriedError
from core.geodesics import (
    CurveProfile, FamilyTableRow, PlacedCurve, curve_intersection_minus, curve_intersection_plus, period_grid,
    place_at_boundary, q_length_bound, roof_profile, sup_min_over_grid, systole_profile
)
from core.intervals import RationalInterval, exp, log, nth_root, sqrt
from core.measures import TangentialMeasure, TransverseMeasure, curve_as_measure
from core.pa_engine import assemble, certify_pa
from core.tracks import closed_trainpath


# --- интервалы ----------------------------------------------------------------

def test_interval_arithmetic():
    a, b = RationalInterval(1, 2), RationalInterval(-1, 3)
    assert a * b == RationalInterval(-2, 6)
    assert a / RationalInterval(2, 4) == RationalInterval(Fraction(1, 4), 1)
    assert a - a == RationalInterval(-1, 1)
    assert RationalInterval(2, 3) ** 2 == RationalInterval(4, 9)
    with pytest.raises(ZeroDivisionError):
        a / b
    with pytest.raises(ValueError):
        RationalInterval(2, 1)


def test_transcendental_bounds_are_sound():
    tol = Fraction(1, 10**15)
    e = exp(1, tol)
    assert e.width <= tol
    assert 1 in log(e, tol)
    assert 0 in log(1, tol)
    root = sqrt(2, tol)
    assert root.lo ** 2 <= 2 <= root.hi ** 2
    assert 2 in nth_root(RationalInterval.point(8), 3)
    with pytest.raises(ValueError):
        log(RationalInterval(0, 1))


# --- пересечения и оценки ------------------------------------------------------

def test_curve_intersections(g1m2):
    a1, a2, a3 = (closed_trainpath(g1m2, c) for c in ([1, 3], [1, 4, 2, 5], [2, 6]))
    assert curve_intersection_plus(g1m2, curve_as_measure(g1m2, a3), a1) == 0
    assert curve_intersection_plus(g1m2, curve_as_measure(g1m2, a2), a1) == 1
    assert curve_intersection_minus(g1m2, TangentialMeasure(g1m2, (1,) * 6), a2) == 4


def test_q_length_bound():
    assert q_length_bound(1, 1, 1) == RationalInterval(4, 4)
    assert q_length_bound(1, 4, 2) == RationalInterval(8, 8)


def test_sup_min_over_grid_single_curve():
    one = RationalInterval.point(1)
    curve = CurveProfile("c", 0, 0, one, one, RationalInterval.point(4))
    alpha = RationalInterval.point(4)
    bound = sup_min_over_grid([curve], (Fraction(1), Fraction(2), Fraction(4)), alpha)
    assert bound == RationalInterval(Fraction(17, 2), Fraction(17, 2))


def test_period_grid_is_increasing():
    grid = period_grid(RationalInterval.point(4), 8)
    assert grid[0] == 1 and grid[-1] == 4
    assert all(a < b for a, b in zip(grid, grid[1:]))


# --- профили на периоде φ ------------------------------------------------------

def test_roof_profile(phi):
    seq = phi.seq
    mu_start = (2, 2, 1, 1, 1, 1)
    mu_end = TransverseMeasure(seq.end, tuple(mu_start[phi.iso(b) - 1] for b in seq.end.branches))
    roof = roof_profile(seq, mu_end)
    assert roof.a_values[0] == 1
    assert len(roof.ratios) == len(seq)
    assert all(1 <= ratio <= 2 for ratio in roof.ratios)

    product = Fraction(1)
    for ratio in roof.ratios:
        product *= ratio
    assert product == roof.total_ratio

    with pytest.raises(CurveNotCarriedError):
        roof_profile(seq, TransverseMeasure(seq.tracks[1], (0,) * 6))


def test_systole_profile(phi, g1m2):
    cert = certify_pa(phi)
    placed = [
        PlacedCurve("a1", closed_trainpath(g1m2, [1, 3]), 0),
        PlacedCurve("a3", closed_trainpath(g1m2, [2, 6]), 0),
    ]
    profile = systole_profile(cert, phi, placed, grid_steps=16)
    assert profile.dilatation == cert.dilatation
    assert 0 < profile.period_log.lo <= profile.period_log.hi
    assert 0 < profile.sup_min_bound.lo <= profile.sup_min_bound.hi
    for curve in profile.curves:
        assert curve.i_plus.lo > 0 and curve.i_minus.lo > 0
        assert curve.floor.lo > 0


def test_translates_move_intersections(phi, g1m2):
    cert = certify_pa(phi)
    curve = closed_trainpath(g1m2, [1, 3])
    base, later = systole_profile(cert, phi, [PlacedCurve("a1", curve, 0),
                                              PlacedCurve("a1+1", curve, 0, translate=1)]).curves
    assert later.i_plus.hi < base.i_plus.lo
    assert later.i_minus.lo > base.i_minus.hi


def test_curve_on_wrong_track_is_rejected(phi, g1m2):
    cert = certify_pa(phi)
    with pytest.raises(CurveNotCarriedError):
        systole_profile(cert, phi, [PlacedCurve("a1", closed_trainpath(g1m2, [1, 3]), 3)])


def test_place_at_boundary(phi, g1m2):
    assembly = assemble([phi, phi])
    placed = place_at_boundary(assembly, closed_trainpath(g1m2, [1, 3]), 0, "a1")
    assert placed.time_index == 0
    assert placed.curve.branch_cycle == (1, 3)
    later = place_at_boundary(assembly, closed_trainpath(g1m2, [1, 3]), 1, "a1")
    assert later.time_index == 6
    assert later.curve.track == assembly.period.seq.tracks[6]


def test_family_row_properties():
    row = FamilyTableRow(param=1, alpha_lo=Fraction(2), alpha_hi=Fraction(3),
                         period_log_lo=Fraction(1, 2), period_log_hi=Fraction(1),
                         supmin_lo=Fraction(4), supmin_hi=Fraction(5))
    assert row.dilatation == RationalInterval(2, 3)
    assert row.period_length == RationalInterval(Fraction(1, 2), 1)
    assert row.sup_min_bound == RationalInterval(4, 5)
    assert row.notes == []
