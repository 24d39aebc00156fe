"""
Точный двухфазный симплекс-метод в рациональных числах (правило Бленда).

Решает задачу  max c·x  при  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
Нужен для проверок рекуррентности, где размер задачи не превышает
нескольких десятков переменных.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LPResult:
    """Результат линейной программы"""
    status: str  # optimal | infeasible | unbounded
    x: Optional[List[Fraction]] = None
    value: Optional[Fraction] = None


class SimplexTableau:
    """Симплекс-таблица: строки ограничений и строка стоимости (последняя)"""

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.cost: List[Fraction] = [Fraction(0)] * (len(rows[0]) if rows else 0)
        self.value = Fraction(0)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.cost)

    def set_objective(self, c: Sequence[Fraction]):
        """Строка приведенных стоимостей для max c·x в текущем базисе"""
        self.cost = [-Fraction(v) for v in c] + [Fraction(0)] * (self.n - len(c))
        self.value = Fraction(0)
        for i, j in enumerate(self.basis):
            f = self.cost[j]
            if f != 0:
                self.cost = [a - f * b for a, b in zip(self.cost, self.rows[i])]
                self.value -= f * self.rhs[i]

    def pivot(self, i: int, j: int):
        piv = self.rows[i][j]
        self.rows[i] = [v / piv for v in self.rows[i]]
        self.rhs[i] /= piv
        for k in range(self.m):
            if k != i and self.rows[k][j] != 0:
                f = self.rows[k][j]
                self.rows[k] = [a - f * b for a, b in zip(self.rows[k], self.rows[i])]
                self.rhs[k] -= f * self.rhs[i]
        f = self.cost[j]
        if f != 0:
            self.cost = [a - f * b for a, b in zip(self.cost, self.rows[i])]
            self.value -= f * self.rhs[i]
        self.basis[i] = j

    def bland_primal_step(self, allowed: int) -> str:
        entering = [j for j in range(allowed) if self.cost[j] < 0]
        if not entering:
            return 'optimal'
        j = entering[0]
        candidates = [(self.rhs[i] / self.rows[i][j], self.basis[i], i)
                      for i in range(self.m) if self.rows[i][j] > 0]
        if not candidates:
            return 'unbounded'
        _, _, i = min(candidates)
        self.pivot(i, j)
        return 'go_on'

    def bland_primal(self, allowed: int) -> str:
        while True:
            ret = self.bland_primal_step(allowed)
            if ret in ('optimal', 'unbounded'):
                return ret

    def drop_row(self, i: int):
        del self.rows[i]
        del self.rhs[i]
        del self.basis[i]


def solve_lp(c: Sequence, a_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
             a_ub: Sequence[Sequence] = (), b_ub: Sequence = ()) -> LPResult:
    """
    Максимизация c·x на многограннике с неотрицательными переменными.

    Args:
        c: коэффициенты целевой функции (длина n)
        a_eq, b_eq: ограничения-равенства
        a_ub, b_ub: ограничения-неравенства вида <=

    Returns:
        LPResult со статусом и оптимальной точкой (только исходные n переменных)
    """
    n = len(c)
    n_slack = len(a_ub)
    raw_rows, raw_rhs = [], []
    for row, b in zip(a_eq, b_eq):
        raw_rows.append([Fraction(v) for v in row] + [Fraction(0)] * n_slack)
        raw_rhs.append(Fraction(b))
    for k, (row, b) in enumerate(zip(a_ub, b_ub)):
        slack = [Fraction(0)] * n_slack
        slack[k] = Fraction(1)
        raw_rows.append([Fraction(v) for v in row] + slack)
        raw_rhs.append(Fraction(b))

    width = n + n_slack
    m = len(raw_rows)
    if m == 0:
        if any(Fraction(v) > 0 for v in c):
            return LPResult(status='unbounded')
        return LPResult(status='optimal', x=[Fraction(0)] * n, value=Fraction(0))

    # Фаза 1: искусственные переменные на каждую строку, правые части >= 0
    rows, rhs = [], []
    for i, (row, b) in enumerate(zip(raw_rows, raw_rhs)):
        sign = -1 if b < 0 else 1
        artificial = [Fraction(0)] * m
        artificial[i] = Fraction(1)
        rows.append([sign * v for v in row] + artificial)
        rhs.append(sign * b)
    tableau = SimplexTableau(rows, rhs, basis=list(range(width, width + m)))
    tableau.set_objective([Fraction(0)] * width + [Fraction(-1)] * m)
    tableau.bland_primal(tableau.n)
    if tableau.value != 0:
        logger.debug(f"LP недопустима: остаток фазы 1 = {-tableau.value}")
        return LPResult(status='infeasible')

    # Вывод искусственных переменных из базиса; вырожденные строки избыточны
    i = 0
    while i < tableau.m:
        if tableau.basis[i] >= width:
            pivot_col = next((j for j in range(width) if tableau.rows[i][j] != 0), None)
            if pivot_col is None:
                tableau.drop_row(i)
                continue
            tableau.pivot(i, pivot_col)
        i += 1
    tableau.rows = [row[:width] for row in tableau.rows]
    tableau.cost = tableau.cost[:width]

    # Фаза 2
    tableau.set_objective([Fraction(v) for v in c] + [Fraction(0)] * n_slack)
    status = tableau.bland_primal(width)
    if status == 'unbounded':
        return LPResult(status='unbounded')

    x = [Fraction(0)] * width
    for i, j in enumerate(tableau.basis):
        x[j] = tableau.rhs[i]
    return LPResult(status='optimal', x=x[:n], value=tableau.value)
