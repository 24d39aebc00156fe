"""
Комбинаторная модель трейн-трека: стрелки, ветви, дополнительные области,
вложенные кривые и поиск изоморфизмов.

Соглашения:
    * конец ветви (branch, end), end ∈ {0, 1};
    * шаг границы (b, x) означает сторону ветви b, лежащую слева при
      движении от конца x к концу 1 - x;
    * порядок стороны B стрелки задан слева направо при взгляде со стороны A,
      порядок стороны A слева направо при взгляде со стороны B.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from core.errors import MalformedTrackError, NotATrainpathError, NotEmbeddedError

logger = logging.getLogger(__name__)

End = Tuple[int, int]
Step = Tuple[int, int]


@dataclass(frozen=True)
class SurfaceSig:
    """Тип поверхности: род и число проколов"""
    genus: int
    punctures: int

    def __post_init__(self):
        if self.genus < 0 or self.punctures < 0:
            raise MalformedTrackError(f"некорректная поверхность: g={self.genus}, m={self.punctures}")
        if self.complexity < 2:
            raise MalformedTrackError(
                f"сложность 3g-3+m = {self.complexity} < 2 для поверхности S_{self.genus},{self.punctures}")

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.punctures

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.punctures


@dataclass(frozen=True)
class Switch:
    """Стрелка: сторона A и сторона B, каждая упорядочена"""
    id: int
    side_a: Tuple[End, ...]
    side_b: Tuple[End, ...]

    @property
    def is_generic(self) -> bool:
        return len(self.side_a) == 1 and len(self.side_b) == 2

    @property
    def ends(self) -> Tuple[End, ...]:
        return self.side_a + self.side_b

    def side_of(self, end: End) -> Tuple[str, int]:
        if end in self.side_a:
            return "A", self.side_a.index(end)
        return "B", self.side_b.index(end)


class BranchRole(Enum):
    LARGE = "large"
    MIXED = "mixed"
    SMALL = "small"


@dataclass(frozen=True)
class Region:
    """Компонента дополнения трека, заданная циклом шагов границы"""
    boundary: Tuple[Step, ...]
    cusps: int
    punctures: int
    sides: Tuple[Tuple[int, ...], ...]

    @property
    def punctured(self) -> bool:
        return self.punctures > 0

    @property
    def euler_characteristic(self) -> int:
        return 1 - self.punctures

    @property
    def index(self) -> Fraction:
        return Fraction(self.euler_characteristic) - Fraction(self.cusps, 2)

    @property
    def kind(self) -> str:
        if self.punctures == 0 and self.cusps == 3:
            return "triangle"
        if self.punctures == 1 and self.cusps == 1:
            return "punctured monogon"
        prefix = f"{self.punctures}-punctured" if self.punctures else "unpunctured"
        return f"{prefix} {self.cusps}-cusp disc"


@dataclass(frozen=True, eq=False)
class TrainTrack:
    """
    Нумерованный трейн-трек.

    Ветви нумеруются 1..branch_count. Метки проколов хранятся в канонической
    форме: минимальный шаг границы своей области.
    """
    surface: SurfaceSig
    branch_count: int
    switches: Tuple[Switch, ...]
    puncture_marks: Tuple[Step, ...] = ()

    _location: Dict[End, Tuple[Switch, str, int]] = field(init=False, repr=False, compare=False)
    _cycles: Tuple[Tuple[Tuple[Step, ...], Tuple[int, ...]], ...] = field(init=False, repr=False, compare=False)
    _step_cycle: Dict[Step, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = self.branch_count
        if p < 1:
            raise MalformedTrackError(f"число ветвей должно быть положительным, получено {p}")

        switches = tuple(sorted(self.switches, key=lambda s: s.id))
        ids = [s.id for s in switches]
        if len(set(ids)) != len(ids):
            raise MalformedTrackError(f"повторяющиеся идентификаторы стрелок: {ids}")

        location: Dict[End, Tuple[Switch, str, int]] = {}
        for sw in switches:
            if not sw.side_a or not sw.side_b:
                raise MalformedTrackError(f"стрелка {sw.id} имеет пустую сторону")
            for side, ends in (("A", sw.side_a), ("B", sw.side_b)):
                for pos, end in enumerate(ends):
                    b, e = end
                    if not 1 <= b <= p or e not in (0, 1):
                        raise MalformedTrackError(f"стрелка {sw.id}: конец {b}.{e} вне диапазона ветвей 1..{p}")
                    if end in location:
                        raise MalformedTrackError(
                            f"конец {b}.{e} встречается дважды (стрелки {location[end][0].id} и {sw.id})")
                    location[end] = (sw, side, pos)
        missing = [f"{b}.{e}" for b in range(1, p + 1) for e in (0, 1) if (b, e) not in location]
        if missing:
            raise MalformedTrackError(f"концы ветвей не размещены ни в одной стрелке: {', '.join(missing)}")

        object.__setattr__(self, "switches", switches)
        object.__setattr__(self, "_location", location)

        cycles = []
        step_cycle: Dict[Step, int] = {}
        for b in range(1, p + 1):
            for x in (0, 1):
                if (b, x) in step_cycle:
                    continue
                steps, cusp_flags = [], []
                step = (b, x)
                while step not in step_cycle:
                    step_cycle[step] = len(cycles)
                    steps.append(step)
                    step, cusp = self._next_step(step)
                    cusp_flags.append(cusp)
                cycles.append((tuple(steps), tuple(cusp_flags)))
        object.__setattr__(self, "_cycles", tuple(cycles))
        object.__setattr__(self, "_step_cycle", step_cycle)

        marks = []
        for step in self.puncture_marks:
            b, x = step
            if not 1 <= b <= p or x not in (0, 1):
                raise MalformedTrackError(f"метка прокола {b}.{x} вне диапазона ветвей")
            marks.append(cycles[step_cycle[(b, x)]][0][0])
        object.__setattr__(self, "puncture_marks", tuple(sorted(marks)))

    def _next_step(self, step: Step) -> Tuple[Step, bool]:
        """Следующий шаг границы области и флаг касп-угла между ними"""
        b, x = step
        sw, side, pos = self._location[(b, 1 - x)]
        if side == "A":
            if pos + 1 < len(sw.side_a):
                return sw.side_a[pos + 1], True
            return sw.side_b[0], False
        if pos + 1 < len(sw.side_b):
            return sw.side_b[pos + 1], True
        return sw.side_a[0], False

    # --- доступ к структуре -------------------------------------------------

    @property
    def branches(self) -> range:
        return range(1, self.branch_count + 1)

    def locate(self, end: End) -> Tuple[Switch, str, int]:
        """Стрелка, сторона и позиция конца ветви"""
        return self._location[end]

    def switch_by_id(self, switch_id: int) -> Switch:
        for sw in self.switches:
            if sw.id == switch_id:
                return sw
        raise KeyError(switch_id)

    def region_key(self, step: Step) -> Step:
        """Канонический (минимальный) шаг области, содержащей данный шаг"""
        return self._cycles[self._step_cycle[step]][0][0]

    @property
    def regions(self) -> Tuple[Region, ...]:
        marks = list(self.puncture_marks)
        result = []
        for steps, cusp_flags in self._cycles:
            sides, current = [], []
            for step, cusp in zip(steps, cusp_flags):
                current.append(step[0])
                if cusp:
                    sides.append(tuple(current))
                    current = []
            if current and sides:
                # хвост до первого каспа принадлежит первой стороне
                sides[0] = tuple(current) + sides[0]
            elif current:
                sides.append(tuple(current))
            result.append(Region(
                boundary=steps,
                cusps=sum(cusp_flags),
                punctures=marks.count(steps[0]),
                sides=tuple(sides)
            ))
        return tuple(result)

    # --- равенство ---------------------------------------------------------

    def signature(self):
        """Значение трека без учета идентификаторов стрелок"""
        return (
            self.surface,
            self.branch_count,
            frozenset((sw.side_a, sw.side_b) for sw in self.switches),
            self.puncture_marks,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrainTrack):
            return NotImplemented
        return self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())


class ValidationReport(BaseModel):
    """Результат проверки трека"""
    generic: bool
    connected: bool
    maximal: bool
    region_count: int
    census: Dict[str, int]
    index_sum: Fraction
    euler_characteristic: int
    closed_euler_characteristic: int
    violations: List[str]

    model_config = {"arbitrary_types_allowed": True}

    @property
    def valid(self) -> bool:
        return not self.violations


def _is_connected(track: TrainTrack) -> bool:
    parent = {sw.id: sw.id for sw in track.switches}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in track.branches:
        u = find(track.locate((b, 0))[0].id)
        v = find(track.locate((b, 1))[0].id)
        parent[u] = v
    return len({find(x) for x in parent}) == 1


def validate(track: TrainTrack) -> ValidationReport:
    """
    Проверка трека: генеричность, перепись областей, индексное тождество.

    Returns:
        ValidationReport; структурные ошибки выбрасываются еще конструктором
        TrainTrack (MalformedTrackError)
    """
    violations = []
    non_generic = [sw.id for sw in track.switches if not sw.is_generic]
    for sw_id in non_generic:
        violations.append(f"стрелка {sw_id} не трехвалентна (|A|=1, |B|=2)")

    connected = _is_connected(track)
    if not connected:
        violations.append("трек несвязен")

    regions = complementary_regions(track)
    census: Dict[str, int] = {}
    for region in regions:
        census[region.kind] = census.get(region.kind, 0) + 1
        where = f"{region.boundary[0][0]}.{region.boundary[0][1]}"
        if region.punctures > 1:
            violations.append(f"область у шага {where} содержит {region.punctures} проколов")
        elif region.punctures == 0 and region.cusps <= 2:
            violations.append(f"запрещенная область у шага {where}: непроколотый диск с {region.cusps} каспами")
        elif region.punctures == 1 and region.cusps == 0:
            violations.append(f"запрещенная область у шага {where}: проколотый диск без каспов")

    if len(track.puncture_marks) != track.surface.punctures:
        violations.append(
            f"меток проколов {len(track.puncture_marks)}, ожидается {track.surface.punctures}")

    index_sum = sum((r.index for r in regions), Fraction(0))
    chi = track.surface.euler_characteristic
    if index_sum != chi:
        violations.append(f"индексная сумма {index_sum} ≠ χ = {chi}")

    closed_chi = len(track.switches) - track.branch_count + len(regions)
    if closed_chi != 2 - 2 * track.surface.genus:
        violations.append(f"s - p + r = {closed_chi} не совпадает с 2 - 2g = {2 - 2 * track.surface.genus}")

    maximal = not violations and all(r.kind in ("triangle", "punctured monogon") for r in regions)
    logger.debug(f"validate: {len(regions)} областей, индекс {index_sum}, нарушений {len(violations)}")

    return ValidationReport(
        generic=not non_generic,
        connected=connected,
        maximal=maximal,
        region_count=len(regions),
        census=census,
        index_sum=index_sum,
        euler_characteristic=chi,
        closed_euler_characteristic=closed_chi,
        violations=violations
    )


def complementary_regions(track: TrainTrack) -> List[Region]:
    return list(track.regions)


def branch_roles(track: TrainTrack) -> Dict[int, BranchRole]:
    """Тип ветви по ее полуветвям: полуветвь large, если стоит одна на своей стороне"""
    def is_large(end: End) -> bool:
        sw, side, _ = track.locate(end)
        return side == "A" and len(sw.side_a) == 1

    roles = {}
    for b in track.branches:
        large = is_large((b, 0)) + is_large((b, 1))
        roles[b] = (BranchRole.SMALL, BranchRole.MIXED, BranchRole.LARGE)[large]
    return roles


# --- вложенные кривые -------------------------------------------------------

@dataclass(frozen=True)
class EmbeddedCurve:
    """
    Вложенный замкнутый трейн-путь.

    traversal хранит ориентированные шаги (ветвь, начальный конец);
    off_ends перечисляет концы чужих ветвей на стрелках кривой вместе со
    стороной кривой ("L" или "R"), на которую они выходят. Ветвь, оба конца
    которой лежат на кривой, входит дважды: по off_ends с кратностью
    считаются r и i(μ, γ); incident_off_branches - то же без кратностей.
    """
    track: TrainTrack
    branch_cycle: Tuple[int, ...]
    traversal: Tuple[Step, ...]
    off_ends: Tuple[Tuple[End, str], ...]

    @property
    def incident_off_branches(self) -> FrozenSet[int]:
        return frozenset(end[0] for end, _ in self.off_ends)

    @property
    def r(self) -> int:
        return len(self.off_ends)

    @property
    def left_count(self) -> int:
        return sum(1 for _, side in self.off_ends if side == "L")

    @property
    def right_count(self) -> int:
        return sum(1 for _, side in self.off_ends if side == "R")

    def on_track(self, track: TrainTrack) -> "EmbeddedCurve":
        """Та же последовательность ветвей на другом (изоморфном по номерам) треке"""
        return closed_trainpath(track, list(self.branch_cycle))


def _walk(track: TrainTrack, cycle: Sequence[int], x0: int) -> Optional[List[Step]]:
    steps = [(cycle[0], x0)]
    n = len(cycle)
    for i in range(1, n + 1):
        b, x = steps[-1]
        sw, side, _ = track.locate((b, 1 - x))
        target = cycle[i % n]
        opposite = sw.side_b if side == "A" else sw.side_a
        candidates = [end for end in opposite if end[0] == target]
        if not candidates:
            return None
        if i == n:
            return steps if (cycle[0], x0) in candidates else None
        steps.append(candidates[0])
    return None


def closed_trainpath(track: TrainTrack, cycle: Sequence[int]) -> EmbeddedCurve:
    """
    Построение вложенной кривой по циклу ветвей.

    Raises:
        NotEmbeddedError: ветвь встречается в цикле дважды
        NotATrainpathError: цикл нарушает касательную структуру или r < 2
    """
    cycle = list(cycle)
    if not cycle:
        raise NotATrainpathError("пустой цикл")
    for b in cycle:
        if not 1 <= b <= track.branch_count:
            raise NotATrainpathError(f"ветвь {b} отсутствует в треке")
    if len(set(cycle)) != len(cycle):
        repeated = sorted({b for b in cycle if cycle.count(b) > 1})
        raise NotEmbeddedError(f"цикл проходит ветви {repeated} более одного раза")

    steps = _walk(track, cycle, 0) or _walk(track, cycle, 1)
    if steps is None:
        raise NotATrainpathError(f"цикл {cycle} не является гладким трейн-путем")

    members = set(cycle)
    off_ends = []
    n = len(steps)
    for i, (b, x) in enumerate(steps):
        arrive = (b, 1 - x)
        sw, side, pos = track.locate(arrive)
        leave = steps[(i + 1) % n]
        for end in sw.ends:
            if end[0] in members:
                continue
            end_side, end_pos = sw.side_of(end)
            if side == "A":
                # идем от A к B: слева те концы B, что стоят раньше выходного
                _, leave_pos = sw.side_of(leave)
                is_left = end_side == "B" and end_pos < leave_pos
            else:
                is_left = end_side == "B" and end_pos > pos
            off_ends.append((end, "L" if is_left else "R"))

    if len(off_ends) < 2:
        raise NotATrainpathError(f"кривая {cycle} пересекает меньше двух ветвей (r={len(off_ends)})")

    return EmbeddedCurve(
        track=track,
        branch_cycle=tuple(cycle),
        traversal=tuple(steps),
        off_ends=tuple(off_ends)
    )


def check_subtrack(track: TrainTrack, branches: Iterable[int]) -> List[str]:
    """
    Проверка, что множество ветвей образует гладкий подтрек.

    Returns:
        список нарушений (пустой, если подтрек корректен)
    """
    members = set(branches)
    problems = []
    for b in sorted(members):
        if not 1 <= b <= track.branch_count:
            problems.append(f"ветвь {b} отсутствует в треке")
    for sw in track.switches:
        used_a = [end for end in sw.side_a if end[0] in members]
        used_b = [end for end in sw.side_b if end[0] in members]
        if (used_a or used_b) and not (used_a and used_b):
            problems.append(f"подтрек не гладкий в стрелке {sw.id}")
    return problems


# --- изоморфизмы -----------------------------------------------------------

@dataclass(frozen=True)
class TrackIsomorphism:
    """
    Изоморфизм треков t1 -> t2: ветвь b переходит в branch_map[b-1];
    ветви из flips меняют ориентацию.
    """
    branch_map: Tuple[int, ...]
    flips: FrozenSet[int] = frozenset()
    switch_map: Tuple[Tuple[int, int], ...] = ()

    def __call__(self, branch: int) -> int:
        return self.branch_map[branch - 1]

    def image_end(self, end: End) -> End:
        b, e = end
        return self(b), e ^ (b in self.flips)

    @property
    def fixed_count(self) -> int:
        return sum(1 for i, b in enumerate(self.branch_map, 1) if i == b)

    @property
    def is_identity(self) -> bool:
        return self.fixed_count == len(self.branch_map)

    @property
    def order(self) -> int:
        """Порядок перестановки ветвей: НОК длин циклов"""
        seen, result = set(), 1
        for start in range(1, len(self.branch_map) + 1):
            if start in seen:
                continue
            length, b = 0, start
            while b not in seen:
                seen.add(b)
                b = self(b)
                length += 1
            result = lcm(result, length)
        return result

    def inverse(self) -> "TrackIsomorphism":
        inv = [0] * len(self.branch_map)
        for i, b in enumerate(self.branch_map, 1):
            inv[b - 1] = i
        return TrackIsomorphism(
            branch_map=tuple(inv),
            flips=frozenset(self(b) for b in self.flips),
            switch_map=tuple(sorted((v, u) for u, v in self.switch_map))
        )

    def compose(self, first: "TrackIsomorphism") -> "TrackIsomorphism":
        """Композиция self ∘ first (сначала first)"""
        flips = frozenset(
            b for b in range(1, len(first.branch_map) + 1)
            if (b in first.flips) ^ (first(b) in self.flips)
        )
        outer = dict(self.switch_map)
        return TrackIsomorphism(
            branch_map=tuple(self(first(b)) for b in range(1, len(first.branch_map) + 1)),
            flips=flips,
            switch_map=tuple(sorted((u, outer.get(v, v)) for u, v in first.switch_map))
        )

    @classmethod
    def identity(cls, track: TrainTrack) -> "TrackIsomorphism":
        return cls(
            branch_map=tuple(track.branches),
            switch_map=tuple((sw.id, sw.id) for sw in track.switches)
        )

    @classmethod
    def from_permutation(cls, images: Sequence[int]) -> "TrackIsomorphism":
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{list(images)} не является перестановкой 1..{len(images)}")
        return cls(branch_map=tuple(images))


def _propagate(t1: TrainTrack, t2: TrainTrack, start: Switch, image: Switch) -> Optional[TrackIsomorphism]:
    end_map: Dict[End, End] = {}
    sw_map: Dict[int, int] = {}
    used = set()
    queue = deque([(start, image)])
    while queue:
        u, v = queue.popleft()
        if u.id in sw_map:
            if sw_map[u.id] != v.id:
                return None
            continue
        if v.id in used or len(u.side_a) != len(v.side_a) or len(u.side_b) != len(v.side_b):
            return None
        sw_map[u.id] = v.id
        used.add(v.id)
        for eu, ev in zip(u.ends, v.ends):
            for a, b in ((eu, ev), ((eu[0], 1 - eu[1]), (ev[0], 1 - ev[1]))):
                if a in end_map and end_map[a] != b:
                    return None
                end_map[a] = b
            other_u = (eu[0], 1 - eu[1])
            other_v = (ev[0], 1 - ev[1])
            queue.append((t1.locate(other_u)[0], t2.locate(other_v)[0]))

    if len(sw_map) != len(t1.switches):
        return None
    images = [end_map[(b, 0)][0] for b in t1.branches]
    if len(set(images)) != len(images):
        return None
    iso = TrackIsomorphism(
        branch_map=tuple(images),
        flips=frozenset(b for b in t1.branches if end_map[(b, 0)][1] == 1),
        switch_map=tuple(sorted(sw_map.items()))
    )

    mapped_marks = sorted(t2.region_key(iso.image_end(step)) for step in t1.puncture_marks)
    if tuple(mapped_marks) != t2.puncture_marks:
        return None
    return iso


def all_isomorphisms(t1: TrainTrack, t2: TrainTrack) -> Iterator[TrackIsomorphism]:
    """Все изоморфизмы t1 -> t2 в детерминированном порядке"""
    if (t1.surface != t2.surface or t1.branch_count != t2.branch_count
            or len(t1.switches) != len(t2.switches)):
        return
    start = t1.switches[0]
    for candidate in t2.switches:
        iso = _propagate(t1, t2, start, candidate)
        if iso is not None:
            yield iso


def isomorphism(t1: TrainTrack, t2: TrainTrack) -> Optional[TrackIsomorphism]:
    """
    Изоморфизм t1 -> t2, фиксирующий наибольшее число номеров ветвей.

    Returns:
        TrackIsomorphism или None; при t1 == t2 первым возвращается тождество
    """
    best = None
    for iso in all_isomorphisms(t1, t2):
        if best is None or iso.fixed_count > best.fixed_count:
            best = iso
    return best


def check_isomorphism(t1: TrainTrack, t2: TrainTrack, branch_map: Sequence[int]) -> Optional[TrackIsomorphism]:
    """Найти изоморфизм t1 -> t2 с заданной перестановкой ветвей"""
    for iso in all_isomorphisms(t1, t2):
        if iso.branch_map == tuple(branch_map):
            return iso
    return None


def relabel(track: TrainTrack, iso: TrackIsomorphism) -> TrainTrack:
    """Перенумерация трека изоморфизмом; relabel(t1, isomorphism(t1, t2)) == t2"""
    switch_ids = dict(iso.switch_map)
    switches = tuple(
        Switch(
            id=switch_ids.get(sw.id, sw.id),
            side_a=tuple(iso.image_end(e) for e in sw.side_a),
            side_b=tuple(iso.image_end(e) for e in sw.side_b)
        )
        for sw in track.switches
    )
    return TrainTrack(
        surface=track.surface,
        branch_count=track.branch_count,
        switches=switches,
        puncture_marks=tuple(iso.image_end(step) for step in track.puncture_marks)
    )


def mirror(track: TrainTrack) -> TrainTrack:
    """Зеркальный трек: все порядки сторон обращены, левые стороны становятся правыми"""
    return TrainTrack(
        surface=track.surface,
        branch_count=track.branch_count,
        switches=tuple(
            Switch(id=sw.id, side_a=tuple(reversed(sw.side_a)), side_b=tuple(reversed(sw.side_b)))
            for sw in track.switches
        ),
        puncture_marks=tuple((b, 1 - x) for b, x in track.puncture_marks)
    )
