"""
Текстовые форматы ttk: треки (ttk 1), последовательности (seq v1),
меры, файлы кривых, сертификаты (cert v1) и CSV таблиц семейств.

Канонические файлы переживают цикл parse -> serialize байт в байт.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor, ceil
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from core.config import parse_rational
from core.errors import (
    MalformedTrackError, MeasureError, NotATrainpathError, NotEmbeddedError,
    SemanticValidationError, TrackSyntaxError, TrainTrackError, WrongRoleError
)
from core.geodesics import FamilyTableRow
from core.intervals import RationalInterval
from core.measures import TransverseMeasure
from core.moves import Move, SplitSequence
from core.pa_engine import CertificateRecord, PeriodicSequence, declared_period
from core.tracks import EmbeddedCurve, SurfaceSig, Switch, TrainTrack, closed_trainpath

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_END = re.compile(r"^\((\d+)\.([01])\)$")

CSV_HEADER = "param,alpha_lo,alpha_hi,period_log_lo,period_log_hi,supmin_lo,supmin_hi"


def _lines(text: str) -> List[Tuple[int, List[str]]]:
    """Непустые строки без комментариев с номерами"""
    result = []
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            result.append((number, line.split()))
    return result


def _int(token: str, path: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise TrackSyntaxError(f"ожидалось целое число, получено '{token}'", path, line)


def _rational(token: str, path: str, line: int) -> Fraction:
    try:
        return parse_rational(token)
    except (ValueError, ZeroDivisionError):
        raise TrackSyntaxError(f"ожидалось рациональное число, получено '{token}'", path, line)


def _header(lines, expected: Sequence[str], path: str) -> List[str]:
    if not lines:
        raise TrackSyntaxError("пустой файл", path, 1)
    number, tokens = lines[0]
    if tokens[:len(expected)] != list(expected):
        raise TrackSyntaxError(f"ожидался заголовок '{' '.join(expected)}'", path, number)
    return tokens[len(expected):]


def _read(path: PathLike) -> str:
    return Path(path).read_text(encoding="utf-8")


# --- треки --------------------------------------------------------------------

def parse_track_text(text: str, path: str = "<string>") -> TrainTrack:
    """
    Разбор трека формата ttk 1.

    Raises:
        TrackSyntaxError: ошибка синтаксиса с номером строки
        SemanticValidationError: структура трека некорректна
    """
    lines = _lines(text)
    rest = _header(lines, ["ttk", "1"], path)
    if rest:
        raise TrackSyntaxError("лишние токены в заголовке", path, lines[0][0])

    surface, branch_count = None, None
    switches, marks = [], []
    for number, tokens in lines[1:]:
        keyword = tokens[0]
        if keyword == "surface":
            if len(tokens) != 3:
                raise TrackSyntaxError("формат: surface <g> <m>", path, number)
            try:
                surface = SurfaceSig(_int(tokens[1], path, number), _int(tokens[2], path, number))
            except MalformedTrackError as e:
                raise SemanticValidationError("surface", str(e))
        elif keyword == "branches":
            if len(tokens) != 2:
                raise TrackSyntaxError("формат: branches <p>", path, number)
            branch_count = _int(tokens[1], path, number)
        elif keyword == "sw":
            if branch_count is None:
                raise TrackSyntaxError("строка sw до строки branches", path, number)
            switches.append(_parse_switch(tokens, branch_count, path, number))
        elif keyword == "punct":
            if branch_count is None:
                raise TrackSyntaxError("строка punct до строки branches", path, number)
            marks.append(_parse_mark(tokens, branch_count, path, number))
        else:
            raise TrackSyntaxError(f"неизвестное ключевое слово '{keyword}'", path, number)

    if surface is None or branch_count is None:
        raise TrackSyntaxError("нет строки surface или branches", path, len(text.splitlines()) or 1)
    try:
        return TrainTrack(surface=surface, branch_count=branch_count,
                          switches=tuple(switches), puncture_marks=tuple(marks))
    except MalformedTrackError as e:
        raise SemanticValidationError("track-structure", str(e))


def _parse_end(token: str, branch_count: int, path: str, line: int):
    match = _END.match(token)
    if not match:
        raise TrackSyntaxError(f"некорректный конец ветви '{token}'", path, line)
    b, e = int(match.group(1)), int(match.group(2))
    if not 1 <= b <= branch_count:
        raise TrackSyntaxError(f"ветвь {b} вне диапазона 1..{branch_count}", path, line)
    return b, e


def _parse_switch(tokens: List[str], branch_count: int, path: str, line: int) -> Switch:
    if len(tokens) < 6 or tokens[2] != "A" or "B" not in tokens[3:]:
        raise TrackSyntaxError("формат: sw <id> A <концы> B <концы>", path, line)
    switch_id = _int(tokens[1], path, line)
    split_at = tokens.index("B", 3)
    side_a = tuple(_parse_end(t, branch_count, path, line) for t in tokens[3:split_at])
    side_b = tuple(_parse_end(t, branch_count, path, line) for t in tokens[split_at + 1:])
    if not side_a or not side_b:
        raise TrackSyntaxError(f"стрелка {switch_id} с пустой стороной", path, line)
    return Switch(switch_id, side_a, side_b)


def _parse_mark(tokens: List[str], branch_count: int, path: str, line: int):
    if len(tokens) != 3 or tokens[2] not in ("L", "R"):
        raise TrackSyntaxError("формат: punct <b>.<x> L|R", path, line)
    b, x = _parse_end(f"({tokens[1]})", branch_count, path, line)
    return (b, x) if tokens[2] == "L" else (b, 1 - x)


def parse_track(path: PathLike) -> TrainTrack:
    return parse_track_text(_read(path), str(path))


def _format_end(end) -> str:
    return f"({end[0]}.{end[1]})"


def serialize_track(track: TrainTrack) -> str:
    lines = [
        "ttk 1",
        f"surface {track.surface.genus} {track.surface.punctures}",
        f"branches {track.branch_count}",
    ]
    for sw in track.switches:
        side_a = " ".join(_format_end(e) for e in sw.side_a)
        side_b = " ".join(_format_end(e) for e in sw.side_b)
        lines.append(f"sw {sw.id} A {side_a} B {side_b}")
    for b, x in track.puncture_marks:
        lines.append(f"punct {b}.{x} L")
    return "\n".join(lines) + "\n"


# --- последовательности -------------------------------------------------------

@dataclass(frozen=True)
class SequenceFile:
    """Разобранный файл seq v1: ссылка на трек, последовательность и, если задан, период"""
    track_ref: str
    seq: SplitSequence
    period: Optional[PeriodicSequence] = None

    @property
    def declared_iso(self) -> Optional[Tuple[int, ...]]:
        return None if self.period is None else self.period.iso.branch_map


def parse_sequence_text(text: str, track: TrainTrack, path: str = "<string>") -> SequenceFile:
    """
    Разбор seq v1 на уже загруженном треке.

    Raises:
        TrackSyntaxError: ошибка синтаксиса
        SemanticValidationError: ход неприменим или заявленный изоморфизм не существует
    """
    lines = _lines(text)
    rest = _header(lines, ["seq"], path)
    if len(rest) != 1:
        raise TrackSyntaxError("формат: seq <файл трека>", path, lines[0][0])

    moves, iso, iso_line = [], None, None
    for number, tokens in lines[1:]:
        if iso is not None:
            raise TrackSyntaxError("строка iso должна быть последней", path, number)
        keyword = tokens[0]
        if keyword == "split":
            if len(tokens) != 3 or tokens[2] not in ("L", "R"):
                raise TrackSyntaxError("формат: split <ветвь> L|R", path, number)
            moves.append(Move.split(_branch(tokens[1], track, path, number), tokens[2]))
        elif keyword == "shift":
            if len(tokens) != 2:
                raise TrackSyntaxError("формат: shift <ветвь>", path, number)
            moves.append(Move.shift(_branch(tokens[1], track, path, number)))
        elif keyword == "iso":
            iso = [_int(t, path, number) for t in tokens[1:]]
            iso_line = number
            if sorted(iso) != list(track.branches):
                raise TrackSyntaxError(f"iso не является перестановкой 1..{track.branch_count}", path, number)
        else:
            raise TrackSyntaxError(f"неизвестное ключевое слово '{keyword}'", path, number)

    try:
        seq = SplitSequence(track, tuple(moves))
    except WrongRoleError as e:
        raise SemanticValidationError("move-role", str(e))
    period = None
    if iso is not None:
        try:
            period = declared_period(seq, iso)
        except TrainTrackError as e:
            raise SemanticValidationError("declared-iso", f"{path}:{iso_line}: {e}")
    return SequenceFile(track_ref=rest[0], seq=seq, period=period)


def _branch(token: str, track: TrainTrack, path: str, line: int) -> int:
    b = _int(token, path, line)
    if not 1 <= b <= track.branch_count:
        raise TrackSyntaxError(f"ветвь {b} вне диапазона 1..{track.branch_count}", path, line)
    return b


def _referenced_track(path: Path, text: str, header: str) -> TrainTrack:
    lines = _lines(text)
    rest = _header(lines, [header], str(path))
    if not rest:
        raise TrackSyntaxError(f"формат: {header} <файл трека>", str(path), lines[0][0])
    return parse_track(path.parent / rest[0])


def parse_sequence(path: PathLike) -> SequenceFile:
    """Файл трека ищется относительно файла последовательности"""
    path = Path(path)
    text = _read(path)
    track = _referenced_track(path, text, "seq")
    return parse_sequence_text(text, track, str(path))


def serialize_sequence(track_ref: str, moves: Iterable[Move], iso: Optional[Sequence[int]] = None) -> str:
    lines = [f"seq {track_ref}"] + [str(move) for move in moves]
    if iso is not None:
        lines.append("iso " + " ".join(str(b) for b in iso))
    return "\n".join(lines) + "\n"


# --- меры ---------------------------------------------------------------------

def parse_measure_text(text: str, track: TrainTrack, path: str = "<string>") -> TransverseMeasure:
    """
    Формат:
        measure <файл трека>
        weights w_1 ... w_p
    """
    lines = _lines(text)
    _header(lines, ["measure"], path)
    weights = None
    for number, tokens in lines[1:]:
        if tokens[0] != "weights":
            raise TrackSyntaxError(f"неизвестное ключевое слово '{tokens[0]}'", path, number)
        weights = [_rational(t, path, number) for t in tokens[1:]]
        if len(weights) != track.branch_count:
            raise TrackSyntaxError(f"ожидалось {track.branch_count} весов, получено {len(weights)}", path, number)
    if weights is None:
        raise TrackSyntaxError("нет строки weights", path, lines[-1][0])
    try:
        return TransverseMeasure(track, tuple(weights))
    except MeasureError as e:
        raise SemanticValidationError("switch-condition", str(e))


def parse_measure(path: PathLike, track: Optional[TrainTrack] = None) -> TransverseMeasure:
    path = Path(path)
    text = _read(path)
    if track is None:
        track = _referenced_track(path, text, "measure")
    return parse_measure_text(text, track, str(path))


def serialize_measure(track_ref: str, mu: TransverseMeasure) -> str:
    return f"measure {track_ref}\nweights {' '.join(str(w) for w in mu.weights)}\n"


# --- кривые -------------------------------------------------------------------

@dataclass(frozen=True)
class CurveEntry:
    name: str
    time_index: int
    cycle: Tuple[int, ...]


def parse_curves_text(text: str, path: str = "<string>") -> Tuple[str, List[CurveEntry]]:
    """Формат: curves <трек>, далее curve <имя> <момент> <ветви...>"""
    lines = _lines(text)
    rest = _header(lines, ["curves"], path)
    if len(rest) != 1:
        raise TrackSyntaxError("формат: curves <файл трека>", path, lines[0][0])
    entries, names = [], set()
    for number, tokens in lines[1:]:
        if tokens[0] != "curve" or len(tokens) < 4:
            raise TrackSyntaxError("формат: curve <имя> <момент> <ветви...>", path, number)
        name = tokens[1]
        if name in names:
            raise TrackSyntaxError(f"кривая '{name}' объявлена повторно", path, number)
        names.add(name)
        entries.append(CurveEntry(
            name=name,
            time_index=_int(tokens[2], path, number),
            cycle=tuple(_int(t, path, number) for t in tokens[3:])
        ))
    return rest[0], entries


def parse_curves(path: PathLike) -> Tuple[str, List[CurveEntry]]:
    return parse_curves_text(_read(path), str(path))


def embed_curve(track: TrainTrack, entry: CurveEntry) -> EmbeddedCurve:
    try:
        return closed_trainpath(track, entry.cycle)
    except (NotATrainpathError, NotEmbeddedError) as e:
        raise SemanticValidationError("trainpath", f"кривая {entry.name}: {e}")


def serialize_curves(track_ref: str, entries: Iterable[CurveEntry]) -> str:
    lines = [f"curves {track_ref}"]
    for entry in entries:
        lines.append(f"curve {entry.name} {entry.time_index} {' '.join(map(str, entry.cycle))}")
    return "\n".join(lines) + "\n"


# --- сертификаты --------------------------------------------------------------

def serialize_certificate(record: CertificateRecord) -> str:
    power = "none" if record.positivity_power is None else str(record.positivity_power)
    lines = [
        "cert v1",
        f"p {record.p}",
        "sigma " + " ".join(map(str, record.sigma)),
    ]
    lines += ["row " + " ".join(map(str, row)) for row in record.matrix]
    lines += [
        f"positivity_power {power}",
        f"alpha {record.alpha_lo} {record.alpha_hi}",
        "lambda_plus " + " ".join(map(str, record.lambda_plus)),
        "lambda_minus " + " ".join(map(str, record.lambda_minus)),
    ]
    return "\n".join(lines) + "\n"


def parse_certificate_text(text: str, path: str = "<string>") -> CertificateRecord:
    lines = _lines(text)
    _header(lines, ["cert", "v1"], path)
    fields: Dict[str, object] = {"matrix": []}
    for number, tokens in lines[1:]:
        key, values = tokens[0], tokens[1:]
        if key == "p":
            fields["p"] = _int(values[0], path, number)
        elif key == "sigma":
            fields["sigma"] = [_int(v, path, number) for v in values]
        elif key == "row":
            fields["matrix"].append([_int(v, path, number) for v in values])
        elif key == "positivity_power":
            fields["positivity_power"] = None if values == ["none"] else _int(values[0], path, number)
        elif key == "alpha":
            if len(values) != 2:
                raise TrackSyntaxError("формат: alpha <lo> <hi>", path, number)
            fields["alpha_lo"], fields["alpha_hi"] = (_rational(v, path, number) for v in values)
        elif key in ("lambda_plus", "lambda_minus"):
            fields[key] = [_rational(v, path, number) for v in values]
        else:
            raise TrackSyntaxError(f"неизвестное поле '{key}'", path, number)
    missing = {"p", "sigma", "positivity_power", "alpha_lo", "lambda_plus", "lambda_minus"} - set(fields)
    if missing:
        raise TrackSyntaxError(f"нет полей {sorted(missing)}", path, lines[-1][0])
    return CertificateRecord(**fields)


def parse_certificate(path: PathLike) -> CertificateRecord:
    return parse_certificate_text(_read(path), str(path))


# --- таблицы семейств ---------------------------------------------------------

def _outward(value: Fraction, upward: bool, digits: int = 18) -> str:
    """Десятичная запись с округлением наружу до digits знаков после запятой"""
    scaled = value * 10 ** digits
    n = ceil(scaled) if upward else floor(scaled)
    sign = "-" if n < 0 else ""
    whole, frac = divmod(abs(n), 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def family_csv(rows: Iterable[FamilyTableRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join([
            str(row.param),
            _outward(row.alpha_lo, False), _outward(row.alpha_hi, True),
            _outward(row.period_log_lo, False), _outward(row.period_log_hi, True),
            _outward(row.supmin_lo, False), _outward(row.supmin_hi, True),
        ]))
    return "\n".join(lines) + "\n"


def parse_family_csv(text: str) -> List[Dict[str, Fraction]]:
    lines = text.strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise TrackSyntaxError("неверный заголовок CSV", "<csv>", 1)
    columns = CSV_HEADER.split(",")
    return [
        {name: Fraction(value) for name, value in zip(columns, line.split(","))}
        for line in lines[1:]
    ]


def format_interval(interval: RationalInterval, digits: int = 12) -> str:
    """[lo, hi] в десятичной записи, округленной наружу"""
    return f"[{_outward(interval.lo, False, digits)}, {_outward(interval.hi, True, digits)}]"
