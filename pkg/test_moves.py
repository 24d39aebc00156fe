import random
from fractions import Fraction

import pytest

from core.errors import CollapseError, NotTightError, SplitTieError, WrongRoleError
from core.matrices import CarryingMatrix
from core.measures import TransverseMeasure, is_recurrent
from core.moves import (
    Move, SplitSequence, carrying_matrix, collapse, elementary_matrix, is_tight, lambda_split,
    matrix_min_weight_bound, min_weight_bound, shift, split, transport, twist_sequence
)
from core.pa_engine import period_matrix, power, twist_period
from core.tracks import BranchRole, branch_roles, closed_trainpath, isomorphism, validate


def test_split_one_right(g1m2):
    new_track, matrix = split(g1m2, 1, "R")
    assert new_track.switch_by_id(1).side_a == ((3, 1),)
    assert new_track.switch_by_id(1).side_b == ((4, 0), (1, 0))
    assert matrix == elementary_matrix(6, 1, (4, 5))


@pytest.mark.parametrize("seed", [3, 17, 99])
def test_split_collapse_roundtrip(g1m2, g0m7, seed):
    rng = random.Random(seed)
    for track in (g1m2, g0m7):
        large = [b for b, role in branch_roles(track).items() if role is BranchRole.LARGE]
        e = rng.choice(large)
        side = rng.choice("LR")
        new_track, _ = split(track, e, side)
        report = validate(new_track)
        assert report.valid, report.violations
        assert report.census == validate(track).census
        assert collapse(new_track, Move.split(e, side)) == track


def test_wrong_roles(g1m2):
    with pytest.raises(WrongRoleError):
        split(g1m2, 3, "R")
    with pytest.raises(WrongRoleError):
        shift(g1m2, 1)
    with pytest.raises(CollapseError):
        collapse(g1m2, Move.shift(1))
    with pytest.raises(ValueError):
        split(g1m2, 1, "X")


def test_elementary_matrix():
    assert elementary_matrix(3, 1, [2, 3]).rows == ((1, 1, 1), (0, 1, 0), (0, 0, 1))


def test_lambda_split_follows_measure(g1m2):
    mu = TransverseMeasure(g1m2, (3, 2, 2, 1, 1, 1))
    side, new_track, preimage = lambda_split(g1m2, mu, 1)
    assert side == "R"
    assert preimage.weights == (1, 2, 2, 1, 1, 1)
    _, matrix = split(g1m2, 1, side)
    assert matrix.apply(preimage.weights) == mu.weights


def test_lambda_split_tie(g1m2):
    with pytest.raises(SplitTieError):
        lambda_split(g1m2, TransverseMeasure(g1m2, (2, 2, 1, 1, 1, 1)), 1)


def test_sequence_matrices(phi):
    seq = phi.seq
    assert len(seq) == 6
    assert len(seq.tracks) == 7
    full = carrying_matrix(seq)
    assert seq.prefix_matrices()[-1] == full
    assert seq.suffix_matrices()[0] == full
    assert seq.matrix_between(0, 3) @ seq.matrix_between(3, 6) == full
    assert carrying_matrix(SplitSequence(seq.start)) == CarryingMatrix.identity(6)


def test_subsequence_glues_back(phi):
    seq = phi.seq
    assert (seq.sub(0, 2) + seq.sub(2, 6)).moves == seq.moves


def test_transport_matches_matrix(phi):
    seq = phi.seq
    mu_start = (2, 2, 1, 1, 1, 1)
    mu_end = TransverseMeasure(seq.end, tuple(mu_start[phi.iso(b) - 1] for b in seq.end.branches))
    assert transport(seq, mu_end, len(seq)) == mu_end
    assert transport(seq, mu_end, 0).weights == carrying_matrix(seq).apply(mu_end.weights)
    middle = transport(seq, mu_end, 3)
    assert middle.track == seq.tracks[3]
    assert seq.matrix_between(0, 3).apply(middle.weights) == transport(seq, mu_end, 0).weights


def test_cube_of_phi_is_tight(phi, phi_cubed):
    assert is_tight(phi_cubed.seq) == period_matrix(phi_cubed).is_positive
    assert period_matrix(power(phi, 3)) == period_matrix(phi) ** 3
    assert is_tight(phi_cubed.seq)
    bound = min_weight_bound(phi_cubed.seq)
    assert 0 < bound <= Fraction(1, 6)


def test_min_weight_bound_needs_tightness(g1m2):
    with pytest.raises(NotTightError):
        min_weight_bound(SplitSequence(g1m2, (Move.split(1, "R"),)))
    assert matrix_min_weight_bound(CarryingMatrix(((1, 1), (1, 1)))) == Fraction(1, 4)


def test_twist_along_a1(g1m2):
    curve = closed_trainpath(g1m2, [1, 3])
    assert twist_sequence(g1m2, curve).moves == (Move.split(1, "R"),)
    assert twist_period(g1m2, curve).iso.branch_map == (3, 2, 1, 4, 5, 6)


def test_shift_twice_returns_the_track(g0m7):
    assert branch_roles(g0m7)[2] is BranchRole.MIXED
    once = shift(g0m7, 2)
    assert once != g0m7
    assert validate(once).census == validate(g0m7).census
    iso = isomorphism(g0m7, shift(once, 2))
    assert iso is not None and iso.is_identity


def test_matrix_between_matches_stepwise_columns(phi_cubed, rng):
    seq = phi_cubed.seq
    p = seq.start.branch_count
    for _ in range(5):
        i, j, k = sorted(rng.randint(0, len(seq)) for _ in range(3))
        assert seq.matrix_between(i, k) == seq.matrix_between(i, j) @ seq.matrix_between(j, k)
        for b in range(p):
            vector = tuple(int(row == b) for row in range(p))
            for matrix in reversed(seq.elementary[i:k]):
                vector = matrix.apply(vector)
            assert vector == seq.matrix_between(i, k).column(b)


def test_prefix_matrices_are_unimodular(phi_cubed):
    assert all(m.determinant() in (1, -1) for m in phi_cubed.seq.prefix_matrices())
    assert period_matrix(phi_cubed).determinant() in (1, -1)


def test_tightness_survives_extension(phi):
    tight = [is_tight(power(phi, n).seq) for n in range(1, 6)]
    assert tight[-1]
    first = tight.index(True)
    assert all(tight[first:])
    prefixes = power(phi, 5).seq.prefix_matrices()
    first = next(i for i, m in enumerate(prefixes) if m.is_positive)
    assert all(m.is_positive for m in prefixes[first:])


def test_recurrence_witness_transports_to_start(phi_cubed):
    seq = phi_cubed.seq
    recurrent, witness = is_recurrent(seq.end)
    assert recurrent
    for i in (0, len(seq) // 2, len(seq)):
        carried = transport(seq, witness, i)
        assert carried.track == seq.tracks[i]
        assert min(carried.weights) > 0
