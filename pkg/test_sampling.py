import random

import pytest

from conftest import FIXTURES
from core.errors import MeasureError, NotTightError
from core.formats import parse_track
from core.measures import is_recurrent
from core.moves import Move, SplitSequence, carrying_matrix
from core.sampling import MeasureSampler, lambda_trajectory, min_weight_stats, roof_ratio_stats


def test_sampled_measures_are_positive(g0m7, rng):
    sampler = MeasureSampler(g0m7, rng)
    for _ in range(10):
        mu = sampler.sample()
        assert mu.track == g0m7
        assert mu.is_positive


def test_sampler_needs_recurrence():
    track = parse_track(FIXTURES / "nonrec.ttk")
    assert not is_recurrent(track)[0]
    with pytest.raises(MeasureError):
        MeasureSampler(track, random.Random(0))


def test_lambda_trajectory_carries_back(g1m2, rng):
    mu = MeasureSampler(g1m2, rng).sample()
    seq, mu_end, _ = lambda_trajectory(mu, rng, 12)
    assert seq.start == g1m2
    assert mu_end.track == seq.end
    assert carrying_matrix(seq).apply(mu_end.weights) == mu.weights


@pytest.mark.parametrize("name", ["g1m2.ttk", "g0m7.ttk"])
def test_roof_ratios_are_bounded(name, rng):
    stats = roof_ratio_stats(parse_track(FIXTURES / name), rng, 25, max_length=20)
    assert stats.trajectories == 25
    assert stats.violations == []
    assert 1 <= stats.low <= stats.high <= 2


def test_same_seed_same_statistics(g1m2, seed):
    first = roof_ratio_stats(g1m2, random.Random(seed), 10, max_length=10)
    second = roof_ratio_stats(g1m2, random.Random(seed), 10, max_length=10)
    assert (first.splits, first.low, first.high) == (second.splits, second.low, second.high)


def test_min_weight_respects_beta(phi_cubed, rng):
    stats = min_weight_stats(phi_cubed.seq, rng, 200)
    assert stats.below == 0
    assert stats.beta * stats.p <= stats.low
    assert stats.high <= stats.ceiling


def test_min_weight_needs_tight_sequence(g1m2, rng):
    with pytest.raises(NotTightError):
        min_weight_stats(SplitSequence(g1m2, (Move.split(1, "R"),)), rng, 1)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["g1m2.ttk", "g0m7.ttk"])
def test_roof_ratios_over_thousand_trajectories(name, rng):
    stats = roof_ratio_stats(parse_track(FIXTURES / name), rng, 1000, max_length=50)
    assert stats.trajectories == 1000
    assert stats.violations == []


@pytest.mark.slow
def test_min_weight_over_ten_thousand_measures(phi_cubed, rng):
    stats = min_weight_stats(phi_cubed.seq, rng, 10_000)
    assert stats.samples == 10_000
    assert stats.below == 0
    assert stats.beta * stats.p <= stats.low <= stats.high <= stats.ceiling
