from fractions import Fraction

import pytest

from agents.bundles import parse_bundle
from conftest import FIXTURES
from core.errors import (
    CertificationError, ConvergenceError, FixtureIncoherenceError, MeasureError, NotPrimitiveError
)
from core.formats import parse_sequence
from core.intervals import RationalInterval
from core.matrices import CarryingMatrix
from core.measures import pairing, triangle_violations
from core.moves import SplitSequence, carrying_matrix
from core.pa_engine import (
    assemble, certify_pa, close_sequence, collatz_wielandt, declared_period, invariant_check, perron_frobenius,
    period_matrix, positivity_power, power, rotate, twist_period
)
from core.tracks import closed_trainpath, validate

GOLDEN_SQUARE = CarryingMatrix(((1, 1), (1, 2)))


def _golden_sign(x: Fraction) -> int:
    """Знак x² - 3x + 1; корень (3 + √5)/2 между точками разного знака"""
    value = x * x - 3 * x + 1
    return (value > 0) - (value < 0)


def test_positivity_power():
    assert positivity_power(GOLDEN_SQUARE) == 1
    assert positivity_power(CarryingMatrix(((1, 1), (1, 0)))) == 2
    assert positivity_power(CarryingMatrix.identity(2)) is None


def test_collatz_wielandt_brackets():
    bracket = collatz_wielandt(GOLDEN_SQUARE, [1, 1])
    assert bracket == RationalInterval(2, 3)


def test_power_iteration_on_golden_matrix():
    result = perron_frobenius(GOLDEN_SQUARE, [1, 1], Fraction(1, 10**9))
    assert result.interval.width <= Fraction(1, 10**9)
    assert _golden_sign(result.interval.lo) <= 0 <= _golden_sign(result.interval.hi)
    for earlier, later in zip(result.history, result.history[1:]):
        assert later in earlier


def test_power_iteration_gives_up():
    with pytest.raises(ConvergenceError):
        perron_frobenius(GOLDEN_SQUARE, [1, 1], Fraction(1, 10**30), max_iter=3)


def test_phi_is_certified(phi):
    cert = certify_pa(phi)
    assert cert.dilatation.lo > 1
    assert cert.dilatation.width <= Fraction(1, 10**12)
    assert cert.float_check_ok
    assert cert.positivity_power == positivity_power(period_matrix(phi))
    assert cert.lambda_plus.total == 1
    assert pairing(cert.lambda_plus, cert.lambda_minus) == 1
    assert cert.power_dilatation.overlaps(cert.dilatation)

    report = invariant_check(cert, phi)
    assert report.passed, report.violations


def test_perturbed_eigenvector_fails_sandwich(phi):
    cert = certify_pa(phi)
    perturbed = list(cert.lambda_plus.weights)
    perturbed[0] += Fraction(1, 10**6)
    assert not invariant_check(cert, phi, lambda_plus=perturbed).plus_sandwich

    scaled = [3 * w for w in cert.lambda_plus.weights]
    assert invariant_check(cert, phi, lambda_plus=scaled).passed


def test_cube_has_cubed_dilatation(phi, phi_cubed):
    alpha = certify_pa(phi).dilatation
    cubed = certify_pa(phi_cubed).dilatation
    assert cubed.overlaps(alpha ** 3)


def test_reducible_loop_is_not_primitive():
    bad = parse_sequence(FIXTURES / "bad_loop.seq").period
    assert positivity_power(period_matrix(bad)) is None
    with pytest.raises(NotPrimitiveError):
        certify_pa(bad)


def test_empty_loop_is_not_primitive(g1m2):
    empty = close_sequence(SplitSequence(g1m2))
    assert empty is not None and empty.iso.is_identity
    with pytest.raises(NotPrimitiveError):
        certify_pa(empty)


def test_wrong_declared_iso(phi):
    with pytest.raises(FixtureIncoherenceError):
        declared_period(phi.seq, [1, 2, 3, 4, 5, 6])


def test_assembly_boundaries(phi):
    assembly = assemble([phi, phi, phi])
    assert [index for index, _ in assembly.boundaries] == [0, 6, 12, 18]
    assert assembly.boundaries[0][1].is_identity
    assert assembly.period.iso.branch_map == (3, 6, 2, 4, 5, 1)
    assert len(power(phi, 2)) == 12


def test_rotation_keeps_dilatation(phi):
    rotated = rotate(phi, 2)
    assert rotated.start == phi.seq.tracks[2]
    assert certify_pa(rotated).dilatation.overlaps(certify_pa(phi).dilatation)


def test_escaping_interval_is_rejected():
    """Матрица с отрицательным элементом: второй интервал [12/5, 8/3] не лежит в [5/2, 3]"""
    matrix = CarryingMatrix(((1, 1), (-1, 3)))
    assert collatz_wielandt(matrix, [1, 2]) == RationalInterval(Fraction(5, 2), 3)
    with pytest.raises(CertificationError, match="вышел за предыдущий"):
        perron_frobenius(matrix, [1, 2], Fraction(1, 10**6))


def test_bad_tangential_vector_is_a_certification_error(phi, monkeypatch):
    def reject(track, weights):
        raise MeasureError("нарушено неравенство треугольника")

    monkeypatch.setattr("core.pa_engine.TangentialMeasure", reject)
    with pytest.raises(CertificationError, match="пару мер"):
        certify_pa(phi)


def test_twist_period_only_adds_weight(g1m2):
    ps = twist_period(g1m2, closed_trainpath(g1m2, [1, 3]))
    matrix = carrying_matrix(ps.seq)
    identity = CarryingMatrix.identity(matrix.size)
    assert matrix != identity
    assert all(a >= b for row, ref in zip(matrix.rows, identity.rows) for a, b in zip(row, ref))
    assert matrix.determinant() == 1


def test_loop_on_maximal_track_certifies():
    bundle = parse_bundle(FIXTURES / "max_g1m2")
    report = validate(bundle.track)
    assert report.maximal
    assert report.census == {"punctured monogon": 2, "triangle": 2}

    ps = bundle.loop("phi")
    assert len(ps) == 26
    assert positivity_power(period_matrix(ps)) is not None
    cert = certify_pa(ps, Fraction(1, 10**12))
    assert cert.dilatation.lo > 1
    assert cert.lambda_minus.is_positive
    assert triangle_violations(ps.start, cert.lambda_minus.weights) == []
    assert invariant_check(cert, ps).passed
