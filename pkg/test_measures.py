import random
from fractions import Fraction

import pytest

from conftest import FIXTURES
from core.errors import MeasureError, NotMaximalError
from core.formats import parse_track
from core.measures import (
    NormalizedPair, TangentialMeasure, TransverseMeasure, curve_as_measure, integral_ray, is_recurrent,
    is_transversely_recurrent_proxy, normalize, pairing, switch_violations, triangle_violations
)
from core.simplex import solve_lp
from core.tracks import closed_trainpath

CURVES = {"a1": [1, 3], "a2": [1, 4, 2, 5], "a3": [2, 6]}


def _curve_measures(track):
    return {name: curve_as_measure(track, closed_trainpath(track, cycle)) for name, cycle in CURVES.items()}


def test_switch_condition_is_enforced(g1m2):
    with pytest.raises(MeasureError):
        TransverseMeasure(g1m2, (1, 1, 1, 1, 1, 1))
    with pytest.raises(MeasureError):
        TransverseMeasure(g1m2, (1, 0, 1, 0, 0))
    assert switch_violations(g1m2, (2, 2, 1, 1, 1, 1)) == []


def test_curve_measures_add_up(g1m2):
    measures = _curve_measures(g1m2)
    assert measures["a1"].weights == (1, 0, 1, 0, 0, 0)
    total = measures["a1"] + measures["a2"] + measures["a3"]
    assert total.weights == (2, 2, 1, 1, 1, 1)
    assert total.is_positive


@pytest.mark.parametrize("seed", [1, 5, 42])
def test_nonnegative_combinations_stay_in_cone(g1m2, seed):
    rng = random.Random(seed)
    measures = _curve_measures(g1m2)
    combination = TransverseMeasure(g1m2, (0,) * 6)
    for measure in measures.values():
        combination = combination + measure.scaled(Fraction(rng.randint(0, 20), rng.randint(1, 7)))
    assert switch_violations(g1m2, combination.weights) == []

    nu = TangentialMeasure(g1m2, tuple(Fraction(rng.randint(0, 9)) for _ in range(6)))
    expected = sum(pairing(m, nu) for m in measures.values())
    assert pairing(measures["a1"] + measures["a2"] + measures["a3"], nu) == expected


def test_normalize(g1m2):
    mu = TransverseMeasure(g1m2, (2, 2, 1, 1, 1, 1))
    unit, omega = normalize(mu)
    assert omega == 8
    assert unit.total == 1
    with pytest.raises(MeasureError):
        normalize(TransverseMeasure(g1m2, (0,) * 6))


def test_normalized_pair(g1m2):
    mu = TransverseMeasure(g1m2, (2, 2, 1, 1, 1, 1))
    pair = NormalizedPair.from_measures(mu, TangentialMeasure(g1m2, (1,) * 6))
    assert pair.lam.total == 1
    assert pairing(pair.lam, pair.nu) == 1


def test_pairing_needs_same_track(g1m2, g0m7):
    with pytest.raises(MeasureError):
        pairing(TransverseMeasure(g1m2, (2, 2, 1, 1, 1, 1)), TangentialMeasure(g0m7, (1,) * 24))


def test_integral_ray():
    assert integral_ray([Fraction(1, 2), Fraction(1, 3), 0]) == (3, 2, 0)
    assert integral_ray([2, 4, 6]) == (1, 2, 3)


def test_recurrence(g1m2, g0m7):
    for track in (g1m2, g0m7):
        recurrent, witness = is_recurrent(track)
        assert recurrent
        assert witness.is_positive
        assert witness.total == 1

    recurrent, witness = is_recurrent(parse_track(FIXTURES / "nonrec.ttk"))
    assert not recurrent and witness is None


def test_transverse_recurrence_proxy(g0m7, g1m2):
    ok, nu = is_transversely_recurrent_proxy(g0m7)
    assert ok and nu.is_positive
    assert triangle_violations(g0m7, nu.weights) == []
    with pytest.raises(NotMaximalError):
        is_transversely_recurrent_proxy(g1m2)


def test_solve_lp_optimum():
    result = solve_lp([1, 1], a_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert result.status == "optimal"
    assert result.x == [Fraction(8, 5), Fraction(6, 5)]
    assert result.value == Fraction(14, 5)


def test_solve_lp_infeasible_and_unbounded():
    assert solve_lp([1], a_eq=[[1], [1]], b_eq=[1, 2]).status == "infeasible"
    assert solve_lp([1], a_ub=[[-1]], b_ub=[0]).status == "unbounded"
