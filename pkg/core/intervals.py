"""
Рациональные интервалы и строгие оценки трансцендентных функций.

Арифметика интервалов точная (Fraction). Экспонента, логарифм и корень
считаются интервальным контекстом mpmath с удвоением точности, результат
переводится обратно в рациональные границы без потери строгости.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from mpmath import iv
from mpmath.libmp import from_rational, round_ceiling, round_floor, to_rational

from core.config import settings

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

MAX_BITS = 8192


@dataclass(frozen=True)
class RationalInterval:
    """Замкнутый интервал [lo, hi] с рациональными концами"""
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"пустой интервал [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value: Number) -> "RationalInterval":
        return cls(Fraction(value), Fraction(value))

    @classmethod
    def coerce(cls, value) -> "RationalInterval":
        return value if isinstance(value, RationalInterval) else cls.point(value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, value) -> bool:
        if isinstance(value, RationalInterval):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= Fraction(value) <= self.hi

    def overlaps(self, other: "RationalInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(max(self.lo, other.lo), min(self.hi, other.hi))

    def __add__(self, other) -> "RationalInterval":
        other = RationalInterval.coerce(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> "RationalInterval":
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other) -> "RationalInterval":
        return self + (-RationalInterval.coerce(other))

    def __rsub__(self, other) -> "RationalInterval":
        return RationalInterval.coerce(other) - self

    def __mul__(self, other) -> "RationalInterval":
        other = RationalInterval.coerce(other)
        products = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError(f"деление на интервал {self}, содержащий 0")
        return RationalInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other) -> "RationalInterval":
        return self * RationalInterval.coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "RationalInterval":
        return RationalInterval.coerce(other) * self.reciprocal()

    def __pow__(self, n: int) -> "RationalInterval":
        if n < 0:
            return (self ** -n).reciprocal()
        if self.lo >= 0:
            return RationalInterval(self.lo ** n, self.hi ** n)
        result = RationalInterval.point(1)
        for _ in range(n):
            result = result * self
        return result

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"

    def to_floats(self) -> tuple:
        return float(self.lo), float(self.hi)


def _to_iv(x: RationalInterval, bits: int):
    lo = from_rational(x.lo.numerator, x.lo.denominator, bits, round_floor)
    hi = from_rational(x.hi.numerator, x.hi.denominator, bits, round_ceiling)
    return iv.make_mpf((lo, hi))


def _from_iv(value) -> RationalInterval:
    a, b = value._mpi_
    return RationalInterval(Fraction(*to_rational(a)), Fraction(*to_rational(b)))


def _evaluate(fn: Callable, x: RationalInterval, tol: Optional[Fraction], label: str) -> RationalInterval:
    """
    Строгая оценка fn(x) с удвоением точности, пока ширина результата
    больше tol и продолжает заметно уменьшаться.
    """
    tol = settings.tol if tol is None else Fraction(tol)
    bits = settings.interval_bits
    saved = iv.prec
    previous = None
    try:
        while True:
            iv.prec = bits
            result = _from_iv(fn(_to_iv(x, bits)))
            if result.width <= tol:
                return result
            if previous is not None and previous.width - result.width <= tol:
                # ширина определяется шириной аргумента
                return result
            if bits >= MAX_BITS:
                logger.warning(f"{label}{x}: точность {bits} бит, ширина {float(result.width):.3g}")
                return result
            previous = result
            bits *= 2
    finally:
        iv.prec = saved


def exp(x, tol: Optional[Fraction] = None) -> RationalInterval:
    return _evaluate(iv.exp, RationalInterval.coerce(x), tol, "exp")


def log(x, tol: Optional[Fraction] = None) -> RationalInterval:
    x = RationalInterval.coerce(x)
    if x.lo <= 0:
        raise ValueError(f"логарифм неположительного интервала {x}")
    return _evaluate(iv.log, x, tol, "log")


def sqrt(x, tol: Optional[Fraction] = None) -> RationalInterval:
    x = RationalInterval.coerce(x)
    if x.lo < 0:
        raise ValueError(f"корень из интервала {x} с отрицательной частью")
    return _evaluate(iv.sqrt, x, tol, "sqrt")


def _root_below(value: Fraction, n: int, tol: Fraction) -> Fraction:
    """Рациональное r <= value^(1/n) не дальше чем на tol от точного корня"""
    lo, hi = Fraction(0), max(Fraction(1), value)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid ** n <= value:
            lo = mid
        else:
            hi = mid
    return lo


def _root_above(value: Fraction, n: int, tol: Fraction) -> Fraction:
    lo, hi = Fraction(0), max(Fraction(1), value)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid ** n >= value:
            hi = mid
        else:
            lo = mid
    return hi


def nth_root(x: RationalInterval, n: int, tol: Optional[Fraction] = None) -> RationalInterval:
    """Интервал, содержащий корни n-й степени всех точек x >= 0 (двоичный поиск)"""
    if n < 1:
        raise ValueError(f"степень корня должна быть положительной, получено {n}")
    if x.lo < 0:
        raise ValueError(f"корень из интервала {x} с отрицательной частью")
    if n == 1:
        return x
    tol = settings.tol if tol is None else Fraction(tol)
    return RationalInterval(_root_below(x.lo, n, tol / 2), _root_above(x.hi, n, tol / 2))
