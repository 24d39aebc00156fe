"""
Периодические последовательности расщеплений и сертификаты псевдо-Аносова.

Период задается последовательностью ходов и изоморфизмом σ конечного трека
на начальный. Матрица периода C = A · P(σ) действует на конусе V(τ(0));
если некоторая степень C положительна, отображение псевдо-Аносово, а
степенной метод в целых числах дает интервал для растяжения с границами
Коллатца-Виландта.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from core.config import settings
from core.errors import (
    CertificationError, ConvergenceError, FixtureIncoherenceError, MeasureError, NotPrimitiveError
)
from core.intervals import RationalInterval, nth_root
from core.matrices import CarryingMatrix
from core.measures import NormalizedPair, TangentialMeasure, TransverseMeasure, integral_ray, is_recurrent
from core.moves import SplitSequence, carrying_matrix, twist_sequence
from core.tracks import (
    EmbeddedCurve, TrackIsomorphism, TrainTrack, all_isomorphisms, check_isomorphism, isomorphism, relabel
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PeriodicSequence:
    """Последовательность ходов, замкнутая изоморфизмом iso: seq.end -> seq.start"""
    seq: SplitSequence
    iso: TrackIsomorphism

    def __post_init__(self):
        if relabel(self.seq.end, self.iso) != self.seq.start:
            raise FixtureIncoherenceError("изоморфизм не переводит конечный трек в начальный")

    @property
    def order(self) -> int:
        return self.iso.order

    @property
    def start(self):
        return self.seq.start

    def __len__(self) -> int:
        return len(self.seq)


def close_sequence(seq: SplitSequence) -> Optional[PeriodicSequence]:
    """Замыкание последовательности изоморфизмом конца на начало, если он существует"""
    iso = isomorphism(seq.end, seq.start)
    if iso is None:
        logger.debug(f"последовательность из {len(seq)} ходов не замыкается")
        return None
    return PeriodicSequence(seq, iso)


def declared_period(seq: SplitSequence, branch_map: Sequence[int]) -> PeriodicSequence:
    """
    Период с заявленной перестановкой ветвей.

    Raises:
        FixtureIncoherenceError: если изоморфизма с такой перестановкой нет
    """
    iso = check_isomorphism(seq.end, seq.start, branch_map)
    if iso is None:
        raise FixtureIncoherenceError(f"нет изоморфизма конца на начало с перестановкой {list(branch_map)}")
    return PeriodicSequence(seq, iso)


def twist_period(track: TrainTrack, curve: EmbeddedCurve) -> PeriodicSequence:
    """
    Твист Дена вдоль кривой как период, в направлении, заданном треком:
    в семействе ζ_u = φ²ψ^{-u} это ψ^{-1}. Естественный изоморфизм сохраняет
    номера всех ветвей вне кривой; среди таких берется фиксирующий больше всего.

    Raises:
        FixtureIncoherenceError: конец твиста не изоморфен началу естественным образом
    """
    seq = twist_sequence(track, curve)
    members = set(curve.branch_cycle)
    best = None
    for iso in all_isomorphisms(seq.end, track):
        if any(iso(b) != b for b in track.branches if b not in members):
            continue
        if best is None or iso.fixed_count > best.fixed_count:
            best = iso
    if best is None:
        raise FixtureIncoherenceError(f"твист вдоль {list(curve.branch_cycle)} не возвращается к треку")
    return PeriodicSequence(seq, best)


@dataclass(frozen=True)
class LoopAssembly:
    """Склеенный период и границы блоков: (индекс хода, ρ: τ(индекс) -> τ)"""
    period: PeriodicSequence
    boundaries: Tuple[Tuple[int, TrackIsomorphism], ...]


def assemble(blocks: Sequence[PeriodicSequence]) -> LoopAssembly:
    """
    Склейка периодов с общим начальным треком τ.

    Ходы каждого блока переименовываются через ρ⁻¹, где ρ отождествляет
    текущий трек с τ; после блока ρ <- σ_блока ∘ ρ.
    """
    if not blocks:
        raise ValueError("пустой список блоков")
    base = blocks[0].start
    rho = TrackIsomorphism.identity(base)
    moves = []
    boundaries = [(0, rho)]
    for i, block in enumerate(blocks):
        if block.start != base:
            raise FixtureIncoherenceError(f"блок {i} начинается не с общего трека")
        back = rho.inverse()
        moves.extend(move.renamed(back) for move in block.seq.moves)
        rho = block.iso.compose(rho)
        boundaries.append((len(moves), rho))
    seq = SplitSequence(base, tuple(moves))
    return LoopAssembly(declared_period(seq, rho.branch_map), tuple(boundaries))


def concatenate(blocks: Sequence[PeriodicSequence]) -> PeriodicSequence:
    return assemble(blocks).period


def power(ps: PeriodicSequence, n: int) -> PeriodicSequence:
    if n < 1:
        raise ValueError(f"степень периода должна быть положительной, получено {n}")
    return concatenate([ps] * n)


def rotate(ps: PeriodicSequence, j: int) -> PeriodicSequence:
    """Тот же период, начатый с трека τ(j)"""
    j %= max(len(ps), 1)
    if j == 0:
        return ps
    back = ps.iso.inverse()
    head = tuple(move.renamed(back) for move in ps.seq.moves[:j])
    seq = SplitSequence(ps.seq.tracks[j], ps.seq.moves[j:] + head)
    return declared_period(seq, ps.iso.branch_map)


def period_matrix(ps: PeriodicSequence) -> CarryingMatrix:
    """C = A · P, P[b][σ(b)] = 1: самоотображение V(τ(0))"""
    return carrying_matrix(ps.seq) @ CarryingMatrix.permutation(ps.iso.branch_map)


def positivity_power(matrix: CarryingMatrix) -> Optional[int]:
    """Наименьшее n <= (p-1)² + 1 с положительной Cⁿ"""
    bound = (matrix.size - 1) ** 2 + 1
    current = matrix
    for n in range(1, bound + 1):
        if current.is_positive:
            return n
        current = current @ matrix
    return None


@dataclass(frozen=True)
class EigenBracket:
    """Результат степенного метода: интервал для собственного числа и вектор"""
    interval: RationalInterval
    vector: Tuple[int, ...]
    iterations: int
    history: Tuple[RationalInterval, ...]


def collatz_wielandt(matrix: CarryingMatrix, vector: Sequence) -> RationalInterval:
    """[min (Cv)_b / v_b, max (Cv)_b / v_b] для положительного v"""
    image = matrix.apply(vector)
    ratios = [Fraction(w) / Fraction(v) for w, v in zip(image, vector)]
    return RationalInterval(min(ratios), max(ratios))


def perron_frobenius(matrix: CarryingMatrix, start: Sequence[int],
                     tol: Optional[Fraction] = None, max_iter: Optional[int] = None) -> EigenBracket:
    """
    Степенной метод в целых числах с интервалами Коллатца-Виландта.
    Для неотрицательной матрицы интервал каждого шага лежит в предыдущем.

    Raises:
        ConvergenceError: ширина не достигла tol за max_iter шагов
        CertificationError: интервал шага вышел за предыдущий
    """
    tol = settings.tol if tol is None else Fraction(tol)
    max_iter = settings.max_iter if max_iter is None else max_iter
    vector = integral_ray(start)
    if min(vector) <= 0:
        raise ValueError("степенной метод требует строго положительного начального вектора")

    raw = collatz_wielandt(matrix, vector)
    current = raw
    history = [current]
    for iteration in range(max_iter + 1):
        # сэндвич выполняется для интервала последнего вектора
        if raw.width <= tol:
            return EigenBracket(raw, vector, iteration, tuple(history))
        vector = integral_ray(matrix.apply(vector))
        raw = collatz_wielandt(matrix, vector)
        if raw not in current:
            raise CertificationError(f"интервал {raw} вышел за предыдущий {current} на шаге {iteration + 1}")
        if raw.width == current.width:
            logger.debug(f"ширина интервала не уменьшилась на шаге {iteration + 1}")
        current = raw
        history.append(current)
    raise ConvergenceError(f"степенной метод не сошелся за {max_iter} шагов (ширина {float(raw.width):.3g})")


class CertificateRecord(BaseModel):
    """Сериализуемая запись сертификата (формат cert v1)"""
    p: int
    sigma: List[int]
    matrix: List[List[int]]
    positivity_power: Optional[int]
    alpha_lo: Fraction
    alpha_hi: Fraction
    lambda_plus: List[Fraction]
    lambda_minus: List[Fraction]

    model_config = {"arbitrary_types_allowed": True}


@dataclass(frozen=True)
class PACertificate:
    matrix: CarryingMatrix
    sigma: TrackIsomorphism
    positivity_power: Optional[int]
    dilatation: RationalInterval
    lambda_plus: TransverseMeasure
    lambda_minus: TangentialMeasure
    power_dilatation: RationalInterval
    float_dilatation: float
    iterations: int
    history: Tuple[RationalInterval, ...] = field(repr=False, default=())

    @property
    def float_check_ok(self) -> bool:
        slack = 1e-9 * max(1.0, self.float_dilatation)
        lo, hi = self.dilatation.to_floats()
        return lo - slack <= self.float_dilatation <= hi + slack

    def to_record(self) -> CertificateRecord:
        return CertificateRecord(
            p=self.matrix.size,
            sigma=list(self.sigma.branch_map),
            matrix=[list(row) for row in self.matrix.rows],
            positivity_power=self.positivity_power,
            alpha_lo=self.dilatation.lo,
            alpha_hi=self.dilatation.hi,
            lambda_plus=list(self.lambda_plus.weights),
            lambda_minus=list(self.lambda_minus.weights)
        )


def spectral_radius_float(matrix: CarryingMatrix) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(matrix.to_float()))))


def certify_pa(ps: PeriodicSequence, tol: Optional[Fraction] = None,
               max_iter: Optional[int] = None) -> PACertificate:
    """
    Сертификат псевдо-Аносова для периода.

    Raises:
        NotPrimitiveError: ни одна степень C до границы Виландта не положительна
        ConvergenceError: степенной метод не сошелся
        CertificationError: нет положительной меры или α_lo <= 1
    """
    tol = settings.tol if tol is None else Fraction(tol)
    matrix = period_matrix(ps)
    n = positivity_power(matrix)
    if n is None:
        raise NotPrimitiveError(
            f"ни одна степень матрицы периода до {(matrix.size - 1) ** 2 + 1} не положительна")
    logger.info(f"матрица периода положительна в степени {n}")

    recurrent, witness = is_recurrent(ps.start)
    if not recurrent:
        raise CertificationError("начальный трек не рекуррентен")
    start = witness.integral_weights()

    plus = perron_frobenius(matrix, start, tol / 2, max_iter)
    minus = perron_frobenius(matrix.transpose(), [1] * matrix.size, tol / 2, max_iter)
    alpha = plus.interval.hull(minus.interval)
    if alpha.lo <= 1:
        raise CertificationError(f"интервал растяжения {alpha} не отделен от 1")

    try:
        pair = NormalizedPair.from_measures(
            TransverseMeasure(ps.start, plus.vector),
            TangentialMeasure(ps.start, minus.vector)
        )
    except MeasureError as e:
        raise CertificationError(f"собственные векторы не задают пару мер на τ(0): {e}")

    ell = ps.order
    if ell == 1:
        root = alpha
    else:
        bracket = perron_frobenius(matrix ** ell, start, tol / 2, max_iter)
        root = nth_root(bracket.interval, ell, tol)
    if not root.overlaps(alpha):
        logger.warning(f"корень из спектра C^{ell} {root} не пересекает {alpha}")

    return PACertificate(
        matrix=matrix,
        sigma=ps.iso,
        positivity_power=n,
        dilatation=alpha,
        lambda_plus=pair.lam,
        lambda_minus=pair.nu,
        power_dilatation=root,
        float_dilatation=spectral_radius_float(matrix),
        iterations=max(plus.iterations, minus.iterations),
        history=plus.history
    )


class InvariantReport(BaseModel):
    plus_sandwich: bool
    minus_sandwich: bool
    plus_positive: bool
    minus_positive: bool
    violations: List[str] = []

    @property
    def passed(self) -> bool:
        return not self.violations


def sandwich_violations(matrix: CarryingMatrix, vector: Sequence, interval: RationalInterval) -> List[int]:
    """Ветви b, для которых (Cv)_b не лежит в interval · v_b"""
    image = matrix.apply([Fraction(v) for v in vector])
    return [b for b, (w, v) in enumerate(zip(image, vector), 1)
            if not interval.lo * v <= w <= interval.hi * v]


def invariant_check(cert: PACertificate, ps: PeriodicSequence,
                    lambda_plus: Optional[Sequence] = None,
                    lambda_minus: Optional[Sequence] = None) -> InvariantReport:
    """
    Повторная проверка сертификата в точной арифметике. Векторы можно
    подменить, чтобы проверить произвольный кандидат.
    """
    matrix = period_matrix(ps)
    plus = list(cert.lambda_plus.weights if lambda_plus is None else lambda_plus)
    minus = list(cert.lambda_minus.weights if lambda_minus is None else lambda_minus)

    violations = []
    if matrix.rows != cert.matrix.rows:
        violations.append("матрица сертификата не совпадает с матрицей периода")
    bad_plus = sandwich_violations(matrix, plus, cert.dilatation)
    bad_minus = sandwich_violations(matrix.transpose(), minus, cert.dilatation)
    if bad_plus:
        violations.append(f"C·λ⁺ вне интервала на ветвях {bad_plus}")
    if bad_minus:
        violations.append(f"Cᵀ·λ⁻ вне интервала на ветвях {bad_minus}")
    plus_positive = all(Fraction(v) > 0 for v in plus)
    minus_positive = all(Fraction(v) > 0 for v in minus)
    if not plus_positive:
        violations.append("λ⁺ не строго положительна")
    if not minus_positive:
        violations.append("λ⁻ не строго положительна")
    return InvariantReport(
        plus_sandwich=not bad_plus,
        minus_sandwich=not bad_minus,
        plus_positive=plus_positive,
        minus_positive=minus_positive,
        violations=violations
    )
