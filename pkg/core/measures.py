"""
Конусы мер на трейн-треке: трансверсальные меры V(τ), тангенциальные меры
V*(τ), спаривание и проверки рекуррентности.

Все вычисления точные (Fraction).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

from core.errors import MeasureError, NotMaximalError
from core.simplex import solve_lp
from core.tracks import EmbeddedCurve, TrainTrack, complementary_regions, validate

logger = logging.getLogger(__name__)


def _as_weights(track: TrainTrack, weights: Sequence) -> Tuple[Fraction, ...]:
    values = tuple(Fraction(w) for w in weights)
    if len(values) != track.branch_count:
        raise MeasureError(f"ожидалось {track.branch_count} весов, получено {len(values)}")
    negative = [b for b, w in enumerate(values, 1) if w < 0]
    if negative:
        raise MeasureError(f"отрицательные веса на ветвях {negative}")
    return values


def switch_violations(track: TrainTrack, weights: Sequence[Fraction]) -> List[int]:
    """Стрелки, в которых нарушено условие: вес стороны A = сумме весов стороны B"""
    bad = []
    for sw in track.switches:
        side_a = sum(weights[b - 1] for b, _ in sw.side_a)
        side_b = sum(weights[b - 1] for b, _ in sw.side_b)
        if side_a != side_b:
            bad.append(sw.id)
    return bad


def triangle_violations(track: TrainTrack, weights: Sequence[Fraction]) -> List[str]:
    """Нарушенные неравенства треугольника в непроколотых областях с тремя каспами"""
    bad = []
    for region in complementary_regions(track):
        if region.punctured or region.cusps != 3:
            continue
        totals = [sum(weights[b - 1] for b in side) for side in region.sides]
        for i in range(3):
            if totals[i] > totals[(i + 1) % 3] + totals[(i + 2) % 3]:
                start = region.boundary[0]
                bad.append(f"область у шага {start[0]}.{start[1]}: сторона {i} весит {totals[i]}, "
                           f"больше {totals[(i + 1) % 3]} + {totals[(i + 2) % 3]}")
    return bad


@dataclass(frozen=True)
class TransverseMeasure:
    """Трансверсальная мера: неотрицательные веса с условиями в стрелках"""
    track: TrainTrack
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        weights = _as_weights(self.track, self.weights)
        bad = switch_violations(self.track, weights)
        if bad:
            raise MeasureError(f"нарушено условие стрелки в стрелках {bad}")
        object.__setattr__(self, "weights", weights)

    def __getitem__(self, branch: int) -> Fraction:
        return self.weights[branch - 1]

    @property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def is_positive(self) -> bool:
        return all(w > 0 for w in self.weights)

    def scaled(self, factor) -> "TransverseMeasure":
        return TransverseMeasure(self.track, tuple(w * Fraction(factor) for w in self.weights))

    def __add__(self, other: "TransverseMeasure") -> "TransverseMeasure":
        if other.track != self.track:
            raise MeasureError("сложение мер на разных треках")
        return TransverseMeasure(self.track, tuple(a + b for a, b in zip(self.weights, other.weights)))

    def integral_weights(self) -> Tuple[int, ...]:
        """Примитивный целочисленный вектор на том же луче"""
        return integral_ray(self.weights)


@dataclass(frozen=True)
class TangentialMeasure:
    """Тангенциальная мера: неотрицательные веса с неравенствами треугольника"""
    track: TrainTrack
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        weights = _as_weights(self.track, self.weights)
        bad = triangle_violations(self.track, weights)
        if bad:
            raise MeasureError("нарушено неравенство треугольника: " + "; ".join(bad))
        object.__setattr__(self, "weights", weights)

    def __getitem__(self, branch: int) -> Fraction:
        return self.weights[branch - 1]

    @property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def is_positive(self) -> bool:
        return all(w > 0 for w in self.weights)

    def scaled(self, factor) -> "TangentialMeasure":
        return TangentialMeasure(self.track, tuple(w * Fraction(factor) for w in self.weights))

    def __add__(self, other: "TangentialMeasure") -> "TangentialMeasure":
        if other.track != self.track:
            raise MeasureError("сложение мер на разных треках")
        return TangentialMeasure(self.track, tuple(a + b for a, b in zip(self.weights, other.weights)))


@dataclass(frozen=True)
class NormalizedPair:
    """Пара (λ, ν) с ω(λ) = 1 и <λ, ν> = 1"""
    lam: TransverseMeasure
    nu: TangentialMeasure

    def __post_init__(self):
        if self.lam.total != 1:
            raise MeasureError(f"полный вес λ равен {self.lam.total}, а не 1")
        value = pairing(self.lam, self.nu)
        if value != 1:
            raise MeasureError(f"<λ, ν> = {value}, а не 1")

    @classmethod
    def from_measures(cls, lam: TransverseMeasure, nu: TangentialMeasure) -> "NormalizedPair":
        lam, _ = normalize(lam)
        value = pairing(lam, nu)
        if value == 0:
            raise MeasureError("<λ, ν> = 0, нормировка невозможна")
        return cls(lam=lam, nu=nu.scaled(1 / value))


def integral_ray(weights: Sequence[Fraction]) -> Tuple[int, ...]:
    denominators = reduce(lcm, (Fraction(w).denominator for w in weights), 1)
    ints = [int(Fraction(w) * denominators) for w in weights]
    common = reduce(gcd, ints, 0) or 1
    return tuple(v // common for v in ints)


def _positive_lp(track: TrainTrack, a_eq: List[List[int]], a_ub: List[List[int]]) -> Optional[Tuple[Fraction, ...]]:
    """
    max t при w_b - t - s_b = 0, Σ w = 1 и дополнительных ограничениях на w.
    Переменные: w_1..w_p, t, s_1..s_p.
    """
    p = track.branch_count
    width = 2 * p + 1
    rows, rhs = [], []
    for row in a_eq:
        rows.append(list(row) + [0] * (p + 1))
        rhs.append(0)
    rows.append([1] * p + [0] * (p + 1))
    rhs.append(1)
    for b in range(p):
        row = [0] * width
        row[b] = 1
        row[p] = -1
        row[p + 1 + b] = -1
        rows.append(row)
        rhs.append(0)
    ub_rows = [list(row) + [0] * (p + 1) for row in a_ub]

    c = [0] * width
    c[p] = 1
    result = solve_lp(c, rows, rhs, ub_rows, [0] * len(ub_rows))
    if result.status != 'optimal' or result.value <= 0:
        logger.debug(f"положительное решение не найдено: статус {result.status}, t* = {result.value}")
        return None
    return tuple(result.x[:p])


def is_recurrent(track: TrainTrack) -> Tuple[bool, Optional[TransverseMeasure]]:
    """
    Проверка рекуррентности: существует ли строго положительная трансверсальная мера.

    Returns:
        (True, свидетель) или (False, None)
    """
    p = track.branch_count
    a_eq = []
    for sw in track.switches:
        row = [0] * p
        for b, _ in sw.side_a:
            row[b - 1] += 1
        for b, _ in sw.side_b:
            row[b - 1] -= 1
        a_eq.append(row)
    witness = _positive_lp(track, a_eq, [])
    if witness is None:
        return False, None
    return True, TransverseMeasure(track, witness)


def is_transversely_recurrent_proxy(track: TrainTrack) -> Tuple[bool, Optional[TangentialMeasure]]:
    """
    Заменитель трансверсальной рекуррентности: существует ли строго положительная
    тангенциальная мера.

    Raises:
        NotMaximalError: если трек не максимален
    """
    if not validate(track).maximal:
        raise NotMaximalError("проверка тангенциальных мер требует максимального трека")
    p = track.branch_count
    a_ub = []
    for region in complementary_regions(track):
        if region.punctured or region.cusps != 3:
            continue
        counts = []
        for side in region.sides:
            row = [0] * p
            for b in side:
                row[b - 1] += 1
            counts.append(row)
        for i in range(3):
            a_ub.append([x - y - z for x, y, z in zip(counts[i], counts[(i + 1) % 3], counts[(i + 2) % 3])])
    witness = _positive_lp(track, [], a_ub)
    if witness is None:
        return False, None
    return True, TangentialMeasure(track, witness)


def pairing(mu: TransverseMeasure, nu: TangentialMeasure) -> Fraction:
    """<μ, ν> = Σ_b μ(b) ν(b)"""
    if mu.track != nu.track:
        raise MeasureError("спаривание мер на разных треках")
    return sum((a * b for a, b in zip(mu.weights, nu.weights)), Fraction(0))


def normalize(mu: TransverseMeasure) -> Tuple[TransverseMeasure, Fraction]:
    """
    Нормировка на полный вес 1.

    Raises:
        MeasureError: для нулевой меры
    """
    omega = mu.total
    if omega == 0:
        raise MeasureError("нулевую меру нельзя нормировать")
    return mu.scaled(1 / omega), omega


def curve_as_measure(track: TrainTrack, curve: EmbeddedCurve) -> TransverseMeasure:
    """Считающая мера кривой: 1 на ветвях цикла, 0 на остальных"""
    if curve.track != track:
        raise MeasureError("кривая задана на другом треке")
    members = set(curve.branch_cycle)
    return TransverseMeasure(track, tuple(Fraction(int(b in members)) for b in track.branches))
