"""
Элементарные ходы на трейн-треках: сдвиги, расщепления, коллапсы,
нумерованные последовательности расщеплений и их матрицы переноса.

Локальная модель расщепления: у большой ветви e стрелка конца 0 имеет
сторону B = [d, a], стрелка конца 1 имеет сторону B = [b, c]. Правое
расщепление оставляет победителями a и c, левое b и d. Диагональ e'
сохраняет номер e и идет от стрелки конца 0 к стрелке конца 1.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from core.errors import (
    CollapseError, FixtureIncoherenceError, MeasureError, NotTightError, SplitTieError, WrongRoleError
)
from core.matrices import CarryingMatrix
from core.measures import TransverseMeasure
from core.tracks import (
    BranchRole, EmbeddedCurve, End, Switch, TrackIsomorphism, TrainTrack, branch_roles
)

logger = logging.getLogger(__name__)


class MoveKind(Enum):
    SPLIT_RIGHT = "R"
    SPLIT_LEFT = "L"
    SHIFT = "shift"


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    branch: int

    @classmethod
    def split(cls, branch: int, side: str) -> "Move":
        return cls(MoveKind.SPLIT_RIGHT if side == "R" else MoveKind.SPLIT_LEFT, branch)

    @classmethod
    def shift(cls, branch: int) -> "Move":
        return cls(MoveKind.SHIFT, branch)

    @property
    def is_split(self) -> bool:
        return self.kind is not MoveKind.SHIFT

    @property
    def side(self) -> str:
        return self.kind.value

    def renamed(self, iso: TrackIsomorphism) -> "Move":
        # сторона расщепления не зависит от ориентации ветви
        return Move(self.kind, iso(self.branch))

    def __str__(self) -> str:
        if self.is_split:
            return f"split {self.branch} {self.side}"
        return f"shift {self.branch}"


@dataclass(frozen=True)
class SplitFrame:
    """Окрестность большой ветви: две стрелки и концы a, b, c, d"""
    start: Switch
    finish: Switch
    a: End
    b: End
    c: End
    d: End


def split_frame(track: TrainTrack, e: int) -> SplitFrame:
    if not 1 <= e <= track.branch_count or branch_roles(track)[e] is not BranchRole.LARGE:
        raise WrongRoleError(f"ветвь {e} не является большой")
    s0, _, _ = track.locate((e, 0))
    s1, _, _ = track.locate((e, 1))
    if not (s0.is_generic and s1.is_generic):
        raise WrongRoleError(f"ветвь {e} примыкает к негенерической стрелке")
    d, a = s0.side_b
    b, c = s1.side_b
    return SplitFrame(start=s0, finish=s1, a=a, b=b, c=c, d=d)


def _rebuild(track: TrainTrack, replaced: Sequence[Switch], moved_branch: int) -> TrainTrack:
    """Новый трек с замененными стрелками; метки проколов переносятся по сторонам неподвижных ветвей"""
    ids = {sw.id for sw in replaced}
    switches = [sw for sw in track.switches if sw.id not in ids] + list(replaced)
    marks = []
    for mark in track.puncture_marks:
        region = next(r for r in track.regions if r.boundary[0] == mark)
        marks.append(min(step for step in region.boundary if step[0] != moved_branch))
    return TrainTrack(
        surface=track.surface,
        branch_count=track.branch_count,
        switches=tuple(switches),
        puncture_marks=tuple(marks)
    )


def elementary_matrix(p: int, k: int, losers: Iterable[int]) -> CarryingMatrix:
    """E = I + Σ по проигравшим i матричной единицы [k, i] (столбец i = e_i + e_k)"""
    rows = [[int(i == j) for j in range(p)] for i in range(p)]
    for loser in losers:
        rows[k - 1][loser - 1] += 1
    return CarryingMatrix(tuple(tuple(row) for row in rows))


def split(track: TrainTrack, e: int, side: str) -> Tuple[TrainTrack, CarryingMatrix]:
    """
    Правое (R) или левое (L) расщепление большой ветви e.

    Returns:
        (новый трек, элементарная матрица нового трека в старый)

    Raises:
        WrongRoleError: если e не большая ветвь
    """
    if side not in ("R", "L"):
        raise ValueError(f"сторона расщепления должна быть R или L, получено {side!r}")
    f = split_frame(track, e)
    if side == "R":
        new_start = Switch(f.start.id, (f.a,), (f.b, (e, 0)))
        new_finish = Switch(f.finish.id, (f.c,), (f.d, (e, 1)))
        losers = (f.b[0], f.d[0])
    else:
        new_start = Switch(f.start.id, (f.d,), ((e, 0), f.c))
        new_finish = Switch(f.finish.id, (f.b,), ((e, 1), f.a))
        losers = (f.a[0], f.c[0])
    new_track = _rebuild(track, (new_start, new_finish), e)
    logger.debug(f"split {e} {side}: проигравшие {losers}")
    return new_track, elementary_matrix(track.branch_count, e, losers)


def shift(track: TrainTrack, m: int) -> TrainTrack:
    """
    Сдвиг вдоль смешанной ветви m: малая стрелка переезжает через большую.
    Нумерация сохраняется, матрица переноса тождественна.
    """
    roles = branch_roles(track)
    if not 1 <= m <= track.branch_count or roles[m] is not BranchRole.MIXED:
        raise WrongRoleError(f"ветвь {m} не является смешанной")
    large_end = next(end for end in ((m, 0), (m, 1)) if track.locate(end)[1] == "A")
    small_end = (m, 1 - large_end[1])
    big, _, _ = track.locate(large_end)
    small, _, _ = track.locate(small_end)
    if big.id == small.id or not (big.is_generic and small.is_generic):
        raise WrongRoleError(f"сдвиг вдоль ветви {m} не определен")
    (z,) = small.side_a
    x, y = big.side_b
    if small.side_b[0] == small_end:
        w = small.side_b[1]
        new_small = Switch(small.id, (z,), (x, small_end))
        new_big = Switch(big.id, (large_end,), (y, w))
    else:
        w = small.side_b[0]
        new_small = Switch(small.id, (z,), (small_end, y))
        new_big = Switch(big.id, (large_end,), (w, x))
    return _rebuild(track, (new_small, new_big), m)


def collapse(track: TrainTrack, move: Move) -> TrainTrack:
    """
    Обращение расщепления: collapse(split(t, e, side), Move.split(e, side)) == t.

    Raises:
        CollapseError: если ход не расщепление или трек не имеет нужной формы
    """
    if not move.is_split:
        raise CollapseError(f"ход '{move}' не является расщеплением")
    e = move.branch
    t0, side0, pos0 = track.locate((e, 0))
    t1, side1, pos1 = track.locate((e, 1))
    if side0 != "B" or side1 != "B" or not (t0.is_generic and t1.is_generic) or t0.id == t1.id:
        raise CollapseError(f"ветвь {e} не является диагональю расщепления")
    if move.side == "R" and pos0 == 1 and pos1 == 1:
        (a,), (b, _) = t0.side_a, t0.side_b
        (c,), (d, _) = t1.side_a, t1.side_b
    elif move.side == "L" and pos0 == 0 and pos1 == 0:
        (d,), (_, c) = t0.side_a, t0.side_b
        (b,), (_, a) = t1.side_a, t1.side_b
    else:
        raise CollapseError(f"положение ветви {e} не соответствует расщеплению {move.side}")
    restored = (Switch(t0.id, ((e, 0),), (d, a)), Switch(t1.id, ((e, 1),), (b, c)))
    return _rebuild(track, restored, e)


def apply_move(track: TrainTrack, move: Move) -> Tuple[TrainTrack, CarryingMatrix]:
    if move.is_split:
        return split(track, move.branch, move.side)
    return shift(track, move.branch), CarryingMatrix.identity(track.branch_count)


def lambda_split(track: TrainTrack, mu: TransverseMeasure, e: int) -> Tuple[str, TrainTrack, TransverseMeasure]:
    """
    Расщепление, согласованное с мерой: правое при μ(a) > μ(b), левое при μ(b) > μ(a).

    Returns:
        (сторона, новый трек, прообраз μ на новом треке)

    Raises:
        SplitTieError: при μ(a) = μ(b)
    """
    if mu.track != track:
        raise MeasureError("мера задана на другом треке")
    if mu.total == 0:
        raise MeasureError("λ-расщепление нулевой меры")
    f = split_frame(track, e)
    weight_a, weight_b = mu[f.a[0]], mu[f.b[0]]
    if weight_a == weight_b:
        raise SplitTieError(f"ничья в ветви {e}: μ(a) = μ(b) = {weight_a}")
    side = "R" if weight_a > weight_b else "L"
    new_track, _ = split(track, e, side)
    weights = list(mu.weights)
    weights[e - 1] = abs(weight_a - weight_b)
    return side, new_track, TransverseMeasure(new_track, tuple(weights))


@dataclass(frozen=True, eq=False)
class SplitSequence:
    """Нумерованная последовательность ходов с промежуточными треками и матрицами"""
    start: TrainTrack
    moves: Tuple[Move, ...] = ()

    tracks: Tuple[TrainTrack, ...] = field(init=False, repr=False)
    elementary: Tuple[CarryingMatrix, ...] = field(init=False, repr=False)

    def __post_init__(self):
        moves = tuple(self.moves)
        tracks, matrices = [self.start], []
        for i, move in enumerate(moves):
            try:
                new_track, matrix = apply_move(tracks[-1], move)
            except WrongRoleError as e:
                raise WrongRoleError(f"ход {i + 1} ('{move}'): {e}") from e
            tracks.append(new_track)
            matrices.append(matrix)
        object.__setattr__(self, "moves", moves)
        object.__setattr__(self, "tracks", tuple(tracks))
        object.__setattr__(self, "elementary", tuple(matrices))

    @property
    def end(self) -> TrainTrack:
        return self.tracks[-1]

    def __len__(self) -> int:
        return len(self.moves)

    def matrix_between(self, i: int, j: int) -> CarryingMatrix:
        """A_{i..j}: перенос мер с τ(j) на τ(i)"""
        result = CarryingMatrix.identity(self.start.branch_count)
        for matrix in self.elementary[i:j]:
            result = result @ matrix
        return result

    def prefix_matrices(self) -> List[CarryingMatrix]:
        """[A_{0..0}, A_{0..1}, ..., A_{0..n}]"""
        result = [CarryingMatrix.identity(self.start.branch_count)]
        for matrix in self.elementary:
            result.append(result[-1] @ matrix)
        return result

    def suffix_matrices(self) -> List[CarryingMatrix]:
        """[A_{0..n}, A_{1..n}, ..., A_{n..n}]"""
        result = [CarryingMatrix.identity(self.start.branch_count)]
        for matrix in reversed(self.elementary):
            result.append(matrix @ result[-1])
        return list(reversed(result))

    def then(self, moves: Iterable[Move]) -> "SplitSequence":
        return SplitSequence(self.start, self.moves + tuple(moves))

    def __add__(self, other: "SplitSequence") -> "SplitSequence":
        if other.start != self.end:
            raise ValueError("начало второй последовательности не совпадает с концом первой")
        return self.then(other.moves)

    def sub(self, i: int, j: int) -> "SplitSequence":
        return SplitSequence(self.tracks[i], self.moves[i:j])


def carrying_matrix(seq: SplitSequence) -> CarryingMatrix:
    """Упорядоченное произведение элементарных матриц (пустая последовательность -> I)"""
    return seq.matrix_between(0, len(seq))


def is_tight(seq: SplitSequence) -> bool:
    return carrying_matrix(seq).is_positive


def matrix_min_weight_bound(matrix: CarryingMatrix) -> Fraction:
    """β = min(A) / (p · max colsum(A))"""
    return Fraction(matrix.min_entry, matrix.size * matrix.max_column_sum)


def min_weight_bound(seq: SplitSequence) -> Fraction:
    """
    Нижняя граница минимального веса ветви для любой меры, перенесенной
    с конца последовательности и нормированной на начальном треке.

    Raises:
        NotTightError: если последовательность не tight
    """
    matrix = carrying_matrix(seq)
    if not matrix.is_positive:
        raise NotTightError(f"матрица содержит нулевые элементы (min = {matrix.min_entry})")
    return matrix_min_weight_bound(matrix)


def transport(seq: SplitSequence, mu: TransverseMeasure, i: int = 0) -> TransverseMeasure:
    """Перенос меры с конца последовательности на трек τ(i)"""
    if mu.track != seq.end:
        raise MeasureError("мера не лежит на конечном треке последовательности")
    return TransverseMeasure(seq.tracks[i], seq.matrix_between(i, len(seq)).apply(mu.weights))


def _winning_side(track: TrainTrack, e: int, members: set) -> str:
    f = split_frame(track, e)
    if f.a[0] in members and f.c[0] in members:
        return "R"
    if f.b[0] in members and f.d[0] in members:
        return "L"
    raise FixtureIncoherenceError(f"кривая не пересекает ветвь {e} по диагонали")


def twist_sequence(track: TrainTrack, curve: EmbeddedCurve) -> SplitSequence:
    """
    Последовательность расщеплений, реализующая твист Дена вдоль кривой.

    Раундами расщепляются все большие ветви кривой в сторону, где ветви кривой
    побеждают; всего n_left · n_right расщеплений. Номера ветвей кривой
    сохраняются.

    Raises:
        FixtureIncoherenceError: если кривая не пересекает свои большие ветви по диагонали
    """
    if curve.track != track:
        raise FixtureIncoherenceError("кривая задана на другом треке")
    total = curve.left_count * curve.right_count
    if total == 0:
        raise FixtureIncoherenceError(f"кривая {list(curve.branch_cycle)} ограничивает проколотый диск")
    members = set(curve.branch_cycle)
    moves: List[Move] = []
    current = track
    while len(moves) < total:
        large = [b for b in sorted(members) if branch_roles(current)[b] is BranchRole.LARGE]
        if not large:
            raise FixtureIncoherenceError(f"на кривой {list(curve.branch_cycle)} нет больших ветвей")
        for b in large:
            if len(moves) == total:
                break
            if branch_roles(current)[b] is not BranchRole.LARGE:
                continue
            side = _winning_side(current, b, members)
            current, _ = split(current, b, side)
            moves.append(Move.split(b, side))
    logger.debug(f"твист вдоль {list(curve.branch_cycle)}: {' '.join(map(str, moves))}")
    return SplitSequence(track, tuple(moves))
