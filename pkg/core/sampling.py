"""
Случайные меры и случайные λ-траектории для статистических проверок.

Меры строятся как целые положительные комбинации небольшого набора
образующих: свидетеля рекуррентности самого трека и свидетелей его
случайных потомков, перенесенных обратно. Все веса точные.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from core.errors import MeasureError, SplitTieError, WrongRoleError
from core.geodesics import roof_profile
from core.measures import TransverseMeasure, is_recurrent, normalize
from core.moves import Move, SplitSequence, lambda_split, min_weight_bound, transport
from core.tracks import BranchRole, TrainTrack, branch_roles

logger = logging.getLogger(__name__)


def _large_branches(track: TrainTrack) -> List[int]:
    return [b for b, role in branch_roles(track).items() if role is BranchRole.LARGE]


def random_splits(track: TrainTrack, rng: random.Random, length: int) -> SplitSequence:
    """Случайная последовательность расщеплений: ветвь и сторона выбираются равновероятно"""
    moves: List[Move] = []
    current = SplitSequence(track)
    while len(moves) < length:
        large = _large_branches(current.end)
        rng.shuffle(large)
        for e in large:
            move = Move.split(e, rng.choice("LR"))
            try:
                current = current.then([move])
            except WrongRoleError:
                continue
            moves.append(move)
            break
        else:
            break
    return current


class MeasureSampler:
    """
    Генератор случайных мер на треке.

    Args:
        track: рекуррентный трек
        rng: генератор случайных чисел
        pool_size: число случайных потомков, дающих образующие
        depth: длина случайной последовательности до потомка
        max_coeff: верхняя граница коэффициентов комбинации

    Raises:
        MeasureError: если трек не рекуррентен
    """

    def __init__(self, track: TrainTrack, rng: random.Random, pool_size: int = 6,
                 depth: int = 6, max_coeff: int = 20):
        recurrent, witness = is_recurrent(track)
        if not recurrent:
            raise MeasureError("на нерекуррентном треке нет положительных мер")
        self.track = track
        self.rng = rng
        self.max_coeff = max_coeff
        self.pool: List[Tuple[int, ...]] = [witness.integral_weights()]
        for _ in range(pool_size):
            seq = random_splits(track, rng, rng.randint(1, depth))
            ok, end_witness = is_recurrent(seq.end)
            if not ok:
                continue
            carried = transport(seq, TransverseMeasure(seq.end, end_witness.integral_weights()), 0)
            self.pool.append(carried.integral_weights())
        logger.debug(f"образующих мер: {len(self.pool)}")

    def sample(self) -> TransverseMeasure:
        """Случайная строго положительная мера: свидетель входит с коэффициентом >= 1"""
        coeffs = [self.rng.randint(1, self.max_coeff)]
        coeffs += [self.rng.randint(0, self.max_coeff) for _ in self.pool[1:]]
        weights = [sum(c * g[b] for c, g in zip(coeffs, self.pool)) for b in range(self.track.branch_count)]
        return TransverseMeasure(self.track, tuple(Fraction(w) for w in weights))


@dataclass
class TrajectoryStats:
    """Сводка по отношениям крыши для серии λ-траекторий"""
    trajectories: int = 0
    splits: int = 0
    ties: int = 0
    low: Optional[Fraction] = None
    high: Optional[Fraction] = None
    violations: List[str] = field(default_factory=list)

    def add(self, index: int, ratios: Tuple[Fraction, ...]):
        self.trajectories += 1
        self.splits += len(ratios)
        for step, ratio in enumerate(ratios, 1):
            self.low = ratio if self.low is None else min(self.low, ratio)
            self.high = ratio if self.high is None else max(self.high, ratio)
            if not 1 <= ratio <= 2:
                self.violations.append(f"траектория {index}, шаг {step}: отношение {ratio}")


def lambda_trajectory(mu: TransverseMeasure, rng: random.Random,
                      length: int) -> Tuple[SplitSequence, TransverseMeasure, int]:
    """
    Случайная λ-траектория: на каждом шаге расщепляется случайная большая ветвь
    в сторону, заданную мерой. Ветви с ничьей пропускаются.

    Returns:
        (последовательность, прообраз μ на ее конце, число ничьих)
    """
    start = mu.track
    moves: List[Move] = []
    ties = 0
    while len(moves) < length:
        large = _large_branches(mu.track)
        rng.shuffle(large)
        for e in large:
            try:
                side, _, mu = lambda_split(mu.track, mu, e)
            except SplitTieError:
                ties += 1
                continue
            except WrongRoleError:
                continue
            moves.append(Move.split(e, side))
            break
        else:
            break
    return SplitSequence(start, tuple(moves)), mu, ties


def roof_ratio_stats(track: TrainTrack, rng: random.Random, count: int,
                     max_length: int = 50) -> TrajectoryStats:
    """Отношения крыши по count случайным λ-траекториям длины не больше max_length"""
    sampler = MeasureSampler(track, rng)
    stats = TrajectoryStats()
    for index in range(count):
        seq, mu_end, ties = lambda_trajectory(sampler.sample(), rng, rng.randint(1, max_length))
        stats.ties += ties
        stats.add(index, roof_profile(seq, mu_end).ratios if len(seq) else ())
    logger.info(f"траекторий {stats.trajectories}, расщеплений {stats.splits}, "
                f"отношения в [{stats.low}, {stats.high}]")
    return stats


@dataclass
class MinWeightStats:
    """Минимальные веса перенесенных и нормированных мер против границы β"""
    beta: Fraction
    p: int
    samples: int = 0
    low: Optional[Fraction] = None
    high: Optional[Fraction] = None
    below: int = 0

    @property
    def ceiling(self) -> Fraction:
        """Минимальный вес нормированной меры не больше 1/p"""
        return Fraction(1, self.p)


def min_weight_stats(seq: SplitSequence, rng: random.Random, count: int) -> MinWeightStats:
    """
    Переносит count случайных мер с конца tight последовательности на начало,
    нормирует на полный вес 1 и сравнивает минимальный вес с β.

    Raises:
        NotTightError: если последовательность не tight
    """
    beta = min_weight_bound(seq)
    sampler = MeasureSampler(seq.end, rng)
    stats = MinWeightStats(beta=beta, p=seq.start.branch_count)
    for _ in range(count):
        carried, _ = normalize(transport(seq, sampler.sample(), 0))
        weight = min(carried.weights)
        stats.samples += 1
        stats.low = weight if stats.low is None else min(stats.low, weight)
        stats.high = weight if stats.high is None else max(stats.high, weight)
        if weight < beta:
            stats.below += 1
    logger.info(f"мер {stats.samples}: минимальный вес в [{stats.low}, {stats.high}], β = {beta}")
    return stats
