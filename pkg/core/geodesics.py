"""
Функции крыши, пересечения с кривыми и строгие верхние оценки q-длин
вдоль замкнутой орбиты, заданной периодом.

Время параметризуется переменной s = e^t ∈ [1, α]. Для кривой γ
с числами пересечения i⁺, i⁻ оценка длины L(γ, s) = 2(s·i⁺ + i⁻/s)
выпукла по s, поэтому максимум на отрезке сетки достигается в его концах.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel

from core.config import settings
from core.errors import CurveNotCarriedError, NotATrainpathError, NotEmbeddedError
from core.intervals import RationalInterval, exp, log, sqrt
from core.matrices import CarryingMatrix
from core.measures import TangentialMeasure, TransverseMeasure, curve_as_measure, pairing
from core.moves import SplitSequence
from core.pa_engine import LoopAssembly, PACertificate, PeriodicSequence
from core.tracks import EmbeddedCurve, TrainTrack, closed_trainpath

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoofProfile:
    a_values: Tuple[Fraction, ...]
    ratios: Tuple[Fraction, ...]

    def times(self, tol: Optional[Fraction] = None) -> List[RationalInterval]:
        """t(i) = log a(i)"""
        return [log(a, tol) for a in self.a_values]

    @property
    def total_ratio(self) -> Fraction:
        return self.a_values[-1]


def roof_profile(seq: SplitSequence, mu: TransverseMeasure) -> RoofProfile:
    """
    a(i) = ω(μ₀)/ω(μ_i), где μ_i - перенос μ с конца на τ(i);
    ρ(i) = a(i+1)/a(i) ∈ [1, 2] для расщеплений и 1 для сдвигов.
    """
    if mu.track != seq.end:
        raise CurveNotCarriedError("мера не лежит на конечном треке последовательности")
    totals = [sum(matrix.apply(mu.weights), Fraction(0)) for matrix in seq.suffix_matrices()]
    if totals[0] == 0:
        raise ValueError("нулевая мера не определяет функцию крыши")
    a_values = tuple(totals[0] / w for w in totals)
    ratios = tuple(totals[i] / totals[i + 1] for i in range(len(totals) - 1))
    return RoofProfile(a_values=a_values, ratios=ratios)


def _check_curve(track: TrainTrack, curve: EmbeddedCurve):
    if curve.track != track:
        raise CurveNotCarriedError(f"кривая {list(curve.branch_cycle)} задана на другом треке")


def curve_intersection_plus(track: TrainTrack, mu, curve: EmbeddedCurve):
    """
    i(μ, γ) = ½ Σ μ(b) по концам чужих ветвей на стрелках кривой.
    mu может быть мерой или вектором (в том числе из интервалов).
    """
    _check_curve(track, curve)
    weights = mu.weights if isinstance(mu, TransverseMeasure) else tuple(mu)
    total = sum((weights[end[0] - 1] for end, _ in curve.off_ends), Fraction(0))
    return total / 2


def curve_intersection_minus(track: TrainTrack, nu: TangentialMeasure, curve: EmbeddedCurve) -> Fraction:
    """Σ_{b∈γ} ν(b) = <curve_as_measure(γ), ν>"""
    _check_curve(track, curve)
    return pairing(curve_as_measure(track, curve), nu)


def q_length_bound(i_plus, i_minus, s: Fraction) -> RationalInterval:
    """L = 2(s·i⁺ + i⁻/s) в точке s > 0"""
    s = Fraction(s)
    return (RationalInterval.coerce(i_plus) * s + RationalInterval.coerce(i_minus) / s) * 2


@dataclass(frozen=True)
class PlacedCurve:
    """Кривая на треке τ(time_index) периода, сдвинутая на translate периодов"""
    name: str
    curve: EmbeddedCurve
    time_index: int
    translate: int = 0


@dataclass(frozen=True)
class CurveProfile:
    name: str
    time_index: int
    translate: int
    i_plus: RationalInterval
    i_minus: RationalInterval
    floor: RationalInterval

    def bound(self, s: Fraction) -> RationalInterval:
        return q_length_bound(self.i_plus, self.i_minus, s)

    def minimizer(self, tol: Optional[Fraction] = None) -> Optional[Fraction]:
        """Рациональная точка около s* = sqrt(i⁻/i⁺)"""
        if self.i_plus.mid <= 0:
            return None
        return sqrt(self.i_minus.mid / self.i_plus.mid, tol).mid


@dataclass(frozen=True)
class SystoleProfile:
    curves: Tuple[CurveProfile, ...]
    grid: Tuple[Fraction, ...]
    sup_min_bound: RationalInterval
    period_log: RationalInterval
    dilatation: RationalInterval


def _placed_terms(cert: PACertificate, ps: PeriodicSequence, placed: PlacedCurve,
                  suffixes: Sequence[CarryingMatrix], prefixes: Sequence[CarryingMatrix],
                  tol: Optional[Fraction]) -> CurveProfile:
    i = placed.time_index
    if not 0 <= i <= len(ps.seq):
        raise CurveNotCarriedError(f"момент {i} вне периода длины {len(ps.seq)}")
    track = ps.seq.tracks[i]
    if placed.curve.track != track:
        raise CurveNotCarriedError(f"кривая {placed.name} не лежит на треке τ({i})")

    alpha = cert.dilatation
    # λ⁺ на τ(i): A_{i..N} P λ⁺ / α
    on_end = [cert.lambda_plus[ps.iso(b)] for b in track.branches]
    raw_plus = curve_intersection_plus(track, suffixes[i].apply(on_end), placed.curve)
    i_plus = RationalInterval.point(raw_plus) / alpha

    nu_i = prefixes[i].apply_left(cert.lambda_minus.weights)
    i_minus = RationalInterval.point(sum((nu_i[b - 1] for b in placed.curve.branch_cycle), Fraction(0)))

    if placed.translate:
        shift = alpha ** abs(placed.translate)
        if placed.translate > 0:
            i_plus, i_minus = i_plus / shift, i_minus * shift
        else:
            i_plus, i_minus = i_plus * shift, i_minus / shift

    floor = sqrt(i_plus * i_minus, tol) * 4
    return CurveProfile(placed.name, i, placed.translate, i_plus, i_minus, floor)


def period_grid(alpha: RationalInterval, steps: int, tol: Optional[Fraction] = None) -> Tuple[Fraction, ...]:
    """
    Рациональная сетка 1 = s_0 < ... < s_N = α_hi, близкая к α^{j/N}.
    Точки сетки сами по себе точны; приближенность шага на строгость не влияет.
    """
    log_alpha = log(alpha.mid, tol).mid
    points = [Fraction(1)]
    for j in range(1, steps):
        value = exp(log_alpha * Fraction(j, steps), tol).mid
        if points[-1] < value < alpha.hi:
            points.append(value)
    points.append(alpha.hi)
    return tuple(points)


def sup_min_over_grid(curves: Sequence[CurveProfile], grid: Sequence[Fraction], alpha: RationalInterval,
                      extra_points: Sequence[Fraction] = ()) -> RationalInterval:
    """
    Строгий интервал для sup_s min_γ L(γ, s) по s ∈ [1, α].

    Верхняя граница: max по отрезкам сетки min_γ max(L(s_j), L(s_{j+1})) (выпуклость L).
    Нижняя граница: max по точкам s <= α_lo из сетки и extra_points min_γ L_lo(s).
    """
    if not curves:
        raise ValueError("пустое семейство кривых")
    hi = max(
        min(max(c.bound(a).hi, c.bound(b).hi) for c in curves)
        for a, b in zip(grid, grid[1:])
    )
    inner = [s for s in list(grid) + list(extra_points) if 1 <= s <= alpha.lo]
    lo = max(min(c.bound(s).lo for c in curves) for s in inner)
    return RationalInterval(min(lo, hi), hi)


def systole_profile(cert: PACertificate, ps: PeriodicSequence, curves: Sequence[PlacedCurve],
                    grid_steps: Optional[int] = None, tol: Optional[Fraction] = None) -> SystoleProfile:
    """
    Профиль оценок q-длин семейства кривых на одном периоде.

    Raises:
        CurveNotCarriedError: кривая не лежит на треке своего момента
    """
    grid_steps = settings.grid_steps if grid_steps is None else grid_steps
    suffixes = ps.seq.suffix_matrices()
    prefixes = ps.seq.prefix_matrices()
    profiles = tuple(_placed_terms(cert, ps, placed, suffixes, prefixes, tol) for placed in curves)

    grid = period_grid(cert.dilatation, grid_steps, tol)
    minimizers = [m for m in (c.minimizer(tol) for c in profiles) if m is not None]
    clamped = [min(max(m, Fraction(1)), cert.dilatation.lo) for m in minimizers]
    bound = sup_min_over_grid(profiles, grid, cert.dilatation, clamped)
    logger.info(f"sup min L = {bound} по {len(grid)} точкам сетки и {len(profiles)} кривым")
    return SystoleProfile(
        curves=profiles,
        grid=grid,
        sup_min_bound=bound,
        period_log=log(cert.dilatation, tol),
        dilatation=cert.dilatation
    )


class FamilyTableRow(BaseModel):
    """Строка таблицы семейства (параметр u или k)"""
    param: int
    alpha_lo: Fraction
    alpha_hi: Fraction
    period_log_lo: Fraction
    period_log_hi: Fraction
    supmin_lo: Fraction
    supmin_hi: Fraction
    positivity_power: Optional[int] = None
    square_positive: Optional[bool] = None
    intersection_lo: Optional[Fraction] = None
    intersection_hi: Optional[Fraction] = None
    notes: List[str] = []

    model_config = {"arbitrary_types_allowed": True}

    @property
    def dilatation(self) -> RationalInterval:
        return RationalInterval(self.alpha_lo, self.alpha_hi)

    @property
    def period_length(self) -> RationalInterval:
        return RationalInterval(self.period_log_lo, self.period_log_hi)

    @property
    def sup_min_bound(self) -> RationalInterval:
        return RationalInterval(self.supmin_lo, self.supmin_hi)


def place_at_boundary(assembly: LoopAssembly, curve: EmbeddedCurve, boundary: int,
                      name: str, translate: int = 0) -> PlacedCurve:
    """
    Кривая базового трека τ, перенесенная на трек границы блока:
    на τ(i) она проходит ветви ρ⁻¹(b).
    """
    index, rho = assembly.boundaries[boundary]
    back = rho.inverse()
    track = assembly.period.seq.tracks[index]
    try:
        moved = closed_trainpath(track, [back(b) for b in curve.branch_cycle])
    except (NotATrainpathError, NotEmbeddedError) as e:
        raise CurveNotCarriedError(f"кривая {name} не переносится на τ({index}): {e}")
    return PlacedCurve(name=name, curve=moved, time_index=index, translate=translate)
