"""Целочисленные матрицы переноса (точная арифметика через numpy dtype=object)."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class CarryingMatrix:
    """
    Неотрицательная целочисленная матрица: строки - ветви раннего трека,
    столбцы - ветви позднего. Переводит меры позднего трека в меры раннего.
    """
    rows: Tuple[Tuple[int, ...], ...]

    @classmethod
    def identity(cls, p: int) -> "CarryingMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(p)) for i in range(p)))

    @classmethod
    def from_array(cls, array: np.ndarray) -> "CarryingMatrix":
        return cls(tuple(tuple(int(v) for v in row) for row in array))

    @classmethod
    def permutation(cls, images: Sequence[int]) -> "CarryingMatrix":
        """P с P[b][σ(b)] = 1"""
        p = len(images)
        return cls(tuple(tuple(int(images[i] == j + 1) for j in range(p)) for i in range(p)))

    @property
    def size(self) -> int:
        return len(self.rows)

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=object)

    def __matmul__(self, other: "CarryingMatrix") -> "CarryingMatrix":
        return CarryingMatrix.from_array(self.as_array().dot(other.as_array()))

    def __pow__(self, n: int) -> "CarryingMatrix":
        result = CarryingMatrix.identity(self.size)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def transpose(self) -> "CarryingMatrix":
        return CarryingMatrix(tuple(zip(*self.rows)))

    def apply(self, vector: Sequence) -> Tuple:
        """Произведение матрицы на вектор-столбец (точно)"""
        return tuple(sum((a * v for a, v in zip(row, vector)), type(vector[0])(0)) for row in self.rows)

    def apply_left(self, vector: Sequence) -> Tuple:
        """Произведение вектора-строки на матрицу"""
        return self.transpose().apply(vector)

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    @property
    def min_entry(self) -> int:
        return min(min(row) for row in self.rows)

    @property
    def max_column_sum(self) -> int:
        return max(sum(self.column(j)) for j in range(self.size))

    @property
    def is_positive(self) -> bool:
        return self.min_entry >= 1

    @property
    def nonzero_count(self) -> int:
        return sum(1 for row in self.rows for v in row if v != 0)

    def determinant(self) -> int:
        """Точный определитель (алгоритм Барейса)"""
        a = [list(row) for row in self.rows]
        n, sign, prev = self.size, 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def to_float(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)
