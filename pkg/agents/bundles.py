"""
Загрузка наборов фикстур (bundle 1) с проверкой при загрузке.

Формат bundle.txt:
    bundle 1
    track <файл>
    subtrack <имя> <ветви...>
    curve <имя> <ветви...>
    loop <имя> <подтрек> twists <кривые...>
    loop <имя> file <seq-файл>
    role <роль> <кривая>
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Union

from core.errors import SemanticValidationError, TrackSyntaxError
from core.formats import CurveEntry, embed_curve, parse_sequence, parse_track
from core.pa_engine import PeriodicSequence, concatenate, twist_period
from core.tracks import EmbeddedCurve, TrainTrack, check_subtrack, validate

logger = logging.getLogger(__name__)


@dataclass
class FixtureBundle:
    """Трек, подтреки, кривые, периоды и роли кривых одного набора"""
    path: Path
    track: TrainTrack
    subtracks: Dict[str, FrozenSet[int]] = field(default_factory=dict)
    curves: Dict[str, EmbeddedCurve] = field(default_factory=dict)
    loops: Dict[str, PeriodicSequence] = field(default_factory=dict)
    loop_supports: Dict[str, Optional[str]] = field(default_factory=dict)
    roles: Dict[str, str] = field(default_factory=dict)
    notes: str = ""

    def curve_for(self, role: str) -> EmbeddedCurve:
        if role not in self.roles:
            raise SemanticValidationError("bundle-role", f"в наборе {self.path} нет роли '{role}'")
        return self.curves[self.roles[role]]

    def loop(self, name: str) -> PeriodicSequence:
        if name not in self.loops:
            raise SemanticValidationError("bundle-loop", f"в наборе {self.path} нет периода '{name}'")
        return self.loops[name]


class _BundleReader:
    def __init__(self, path: Path):
        self.path = path
        self.base = path.parent
        self.bundle: Optional[FixtureBundle] = None
        self._twists: Dict[str, PeriodicSequence] = {}

    def _require_track(self, line: int) -> FixtureBundle:
        if self.bundle is None:
            raise TrackSyntaxError("строка track должна идти первой", str(self.path), line)
        return self.bundle

    def _fresh(self, kind: str, table: Dict, name: str, line: int):
        if name in table:
            raise TrackSyntaxError(f"{kind} '{name}' объявлен повторно", str(self.path), line)

    def _int(self, token: str, line: int) -> int:
        try:
            return int(token)
        except ValueError:
            raise TrackSyntaxError(f"ожидалось целое число, получено '{token}'", str(self.path), line)

    def read_track(self, tokens: List[str], line: int):
        if self.bundle is not None or len(tokens) != 2:
            raise TrackSyntaxError("формат: track <файл>, ровно одна строка", str(self.path), line)
        track = parse_track(self.base / tokens[1])
        report = validate(track)
        if not report.valid:
            raise SemanticValidationError("track-valid", "; ".join(report.violations))
        self.bundle = FixtureBundle(path=self.path, track=track)

    def read_subtrack(self, tokens: List[str], line: int):
        bundle = self._require_track(line)
        if len(tokens) < 3:
            raise TrackSyntaxError("формат: subtrack <имя> <ветви...>", str(self.path), line)
        name = tokens[1]
        self._fresh("подтрек", bundle.subtracks, name, line)
        branches = frozenset(self._int(t, line) for t in tokens[2:])
        problems = check_subtrack(bundle.track, branches)
        if problems:
            raise SemanticValidationError("subtrack", f"{name}: " + "; ".join(problems))
        bundle.subtracks[name] = branches

    def read_curve(self, tokens: List[str], line: int):
        bundle = self._require_track(line)
        if len(tokens) < 3:
            raise TrackSyntaxError("формат: curve <имя> <ветви...>", str(self.path), line)
        name = tokens[1]
        self._fresh("кривая", bundle.curves, name, line)
        entry = CurveEntry(name=name, time_index=0, cycle=tuple(self._int(t, line) for t in tokens[2:]))
        bundle.curves[name] = embed_curve(bundle.track, entry)

    def _twist(self, name: str) -> PeriodicSequence:
        if name not in self._twists:
            self._twists[name] = twist_period(self.bundle.track, self.bundle.curves[name])
        return self._twists[name]

    def read_loop(self, tokens: List[str], line: int):
        bundle = self._require_track(line)
        if len(tokens) < 4:
            raise TrackSyntaxError("формат: loop <имя> <подтрек> twists <кривые...> | loop <имя> file <seq>",
                                   str(self.path), line)
        name = tokens[1]
        self._fresh("период", bundle.loops, name, line)
        if tokens[2] == "file":
            parsed = parse_sequence(self.base / tokens[3])
            if parsed.period is None:
                raise SemanticValidationError("loop-iso", f"{tokens[3]}: нет строки iso")
            if parsed.seq.start != bundle.track:
                raise SemanticValidationError("loop-track", f"{tokens[3]}: период начинается не с трека набора")
            bundle.loops[name] = parsed.period
            bundle.loop_supports[name] = None
            return

        support, keyword, words = tokens[2], tokens[3], tokens[4:]
        if keyword != "twists" or not words:
            raise TrackSyntaxError("формат: loop <имя> <подтрек> twists <кривые...>", str(self.path), line)
        if support not in bundle.subtracks:
            raise SemanticValidationError("loop-support", f"{name}: неизвестный подтрек '{support}'")
        for word in words:
            if word not in bundle.curves:
                raise SemanticValidationError("loop-curve", f"{name}: неизвестная кривая '{word}'")
            outside = set(bundle.curves[word].branch_cycle) - bundle.subtracks[support]
            if outside:
                raise SemanticValidationError(
                    "loop-support", f"{name}: кривая {word} выходит из {support} по ветвям {sorted(outside)}")
        bundle.loops[name] = concatenate([self._twist(word) for word in words])
        bundle.loop_supports[name] = support
        logger.debug(f"период {name}: {len(bundle.loops[name])} расщеплений")

    def read_role(self, tokens: List[str], line: int):
        bundle = self._require_track(line)
        if len(tokens) != 3:
            raise TrackSyntaxError("формат: role <роль> <кривая>", str(self.path), line)
        if tokens[2] not in bundle.curves:
            raise SemanticValidationError("bundle-role", f"роль {tokens[1]}: неизвестная кривая '{tokens[2]}'")
        bundle.roles[tokens[1]] = tokens[2]


def parse_bundle(path: Union[str, Path]) -> FixtureBundle:
    """
    Загрузка набора: path - каталог с bundle.txt или сам файл.

    Raises:
        TrackSyntaxError: синтаксис
        SemanticValidationError: нарушен структурный инвариант (имя в сообщении)
    """
    path = Path(path)
    if path.is_dir():
        path = path / "bundle.txt"
    reader = _BundleReader(path)
    handlers = {
        "track": reader.read_track,
        "subtrack": reader.read_subtrack,
        "curve": reader.read_curve,
        "loop": reader.read_loop,
        "role": reader.read_role,
    }

    lines = [(n, raw.split("#", 1)[0].split()) for n, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1)]
    lines = [(n, tokens) for n, tokens in lines if tokens]
    if not lines or lines[0][1] != ["bundle", "1"]:
        raise TrackSyntaxError("ожидался заголовок 'bundle 1'", str(path), lines[0][0] if lines else 1)
    for number, tokens in lines[1:]:
        handler = handlers.get(tokens[0])
        if handler is None:
            raise TrackSyntaxError(f"неизвестное ключевое слово '{tokens[0]}'", str(path), number)
        handler(tokens, number)
    if reader.bundle is None:
        raise TrackSyntaxError("нет строки track", str(path), lines[-1][0])

    notes = path.parent / "NOTES.md"
    if notes.exists():
        reader.bundle.notes = notes.read_text(encoding="utf-8")
    logger.info(f"набор {path}: {len(reader.bundle.curves)} кривых, {len(reader.bundle.loops)} периодов")
    return reader.bundle
