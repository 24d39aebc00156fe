"""
ttk: командная строка для исчисления трейн-треков.

Коды выхода: 0 - успех (сертификат получен), 2 - сертификация не удалась,
1 - ошибка использования или структурная ошибка входных данных.
"""

import argparse
import logging
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

from agents.bundles import parse_bundle
from agents.twist_agent import TwistFamilyAgent
from agents.zeta_agent import ZetaFamilyAgent
from core.config import configure_logging, parse_rational, settings
from core.errors import CertificationError, CurveNotCarriedError, SemanticValidationError, TrainTrackError
from core.formats import (
    CurveEntry, SequenceFile, embed_curve, family_csv, format_interval, parse_curves, parse_measure,
    parse_sequence, parse_track, serialize_certificate, serialize_sequence, serialize_track
)
from core.geodesics import PlacedCurve, roof_profile, systole_profile
from core.measures import TransverseMeasure
from core.moves import carrying_matrix, is_tight, min_weight_bound
from core.pa_engine import PeriodicSequence, certify_pa, invariant_check, twist_period
from core.sampling import min_weight_stats, roof_ratio_stats
from core.run_state import RunPhase, RunState
from core.trace import tracer
from core.tracks import isomorphism, mirror, validate

logger = logging.getLogger(__name__)

FIXTURES = Path(__file__).resolve().parent / "fixtures"
DEFAULT_BUNDLES = {"twist": FIXTURES / "twist_g1m2", "zeta": FIXTURES / "zeta_g3m1"}
DEFAULT_RANGES = {"twist": "0..3", "zeta": "1..4"}


class UsageError(TrainTrackError):
    """Неверные аргументы командной строки"""
    pass


def parse_range(text: str) -> range:
    """'a..b' -> range(a, b + 1)"""
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"диапазон должен иметь вид a..b, получено '{text}'")
    if not sep or a > b:
        raise UsageError(f"диапазон должен иметь вид a..b с a <= b, получено '{text}'")
    return range(a, b + 1)


def _load_sequence(path: str, state: RunState) -> SequenceFile:
    started = time.time()
    parsed = parse_sequence(path)
    state.add_step(RunPhase.LOAD, f"seq {path}",
                   {"moves": len(parsed.seq), "periodic": parsed.period is not None},
                   time.time() - started)
    return parsed


def _require_period(parsed: SequenceFile, path: str) -> PeriodicSequence:
    if parsed.period is None:
        raise SemanticValidationError("declared-iso", f"{path}: для этой команды нужна строка iso")
    return parsed.period


def _certify(ps: PeriodicSequence, state: RunState, tol: Optional[Fraction]):
    started = time.time()
    cert = certify_pa(ps, tol)
    report = invariant_check(cert, ps)
    state.add_step(RunPhase.CERTIFY, "certify_pa",
                   {"alpha": format_interval(cert.dilatation), "iterations": cert.iterations},
                   time.time() - started)
    if not report.passed:
        raise CertificationError("; ".join(report.violations))
    if not cert.float_check_ok:
        tracer.trace_warning(f"numpy дает {cert.float_dilatation}, вне {format_interval(cert.dilatation)}")
    state.certified = True
    return cert


# --- команды ------------------------------------------------------------------

def cmd_validate(args, state: RunState) -> int:
    started = time.time()
    track = parse_track(args.track)
    report = validate(track)
    state.add_step(RunPhase.LOAD, f"validate {args.track}", {"regions": report.region_count},
                   time.time() - started)
    census = ", ".join(f"{kind}: {count}" for kind, count in sorted(report.census.items()))
    tracer.line(f"surface S_{track.surface.genus},{track.surface.punctures}  "
                f"switches {len(track.switches)}  branches {track.branch_count}")
    tracer.line(f"regions {report.region_count} ({census})")
    tracer.line(f"index sum {report.index_sum}  chi {report.euler_characteristic}")
    tracer.line(f"maximal {'yes' if report.maximal else 'no'}")
    chiral = isomorphism(track, mirror(track)) is None
    tracer.line(f"amphichiral {'no' if chiral else 'yes'}")
    if not report.valid:
        raise SemanticValidationError("track-valid", "; ".join(report.violations))
    return 0


def cmd_run(args, state: RunState) -> int:
    parsed = _load_sequence(args.seq, state)
    tracer.line(serialize_track(parsed.seq.end).rstrip("\n"))
    return 0


def cmd_matrix(args, state: RunState) -> int:
    parsed = _load_sequence(args.seq, state)
    matrix = carrying_matrix(parsed.seq)
    width = max(len(str(x)) for row in matrix.rows for x in row)
    for row in matrix.rows:
        tracer.line(" ".join(str(x).rjust(width) for x in row))
    return 0


def cmd_tight(args, state: RunState) -> int:
    parsed = _load_sequence(args.seq, state)
    tight = is_tight(parsed.seq)
    tracer.line(f"tight {'yes' if tight else 'no'}")
    if tight:
        tracer.line(f"min_weight_bound {min_weight_bound(parsed.seq)}")
    return 0


def cmd_pa(args, state: RunState) -> int:
    parsed = _load_sequence(args.seq, state)
    cert = _certify(_require_period(parsed, args.seq), state, args.tol)
    tracer.line(serialize_certificate(cert.to_record()).rstrip("\n"))
    return 0


def _measure_on_end(parsed: SequenceFile, path: str) -> TransverseMeasure:
    """Мера задается на конечном треке или, для периода, на начальном (переносится через σ)"""
    mu = parse_measure(path)
    if mu.track == parsed.seq.end:
        return mu
    if parsed.period is not None and mu.track == parsed.seq.start:
        sigma = parsed.period.iso
        return TransverseMeasure(parsed.seq.end, tuple(mu[sigma(b)] for b in parsed.seq.end.branches))
    raise CurveNotCarriedError(f"{path}: мера задана не на конечном треке последовательности")


def cmd_roof(args, state: RunState) -> int:
    parsed = _load_sequence(args.seq, state)
    started = time.time()
    roof = roof_profile(parsed.seq, _measure_on_end(parsed, args.measure))
    times = roof.times(args.tol)
    state.add_step(RunPhase.PROFILE, "roof", {"total_ratio": str(roof.total_ratio)}, time.time() - started)
    tracer.line(f"{'i':>4}  {'move':<10} {'ratio':<12} t(i)")
    tracer.line(f"{0:>4}  {'-':<10} {'-':<12} {format_interval(times[0])}")
    for i, (move, ratio) in enumerate(zip(parsed.seq.moves, roof.ratios), 1):
        tracer.line(f"{i:>4}  {str(move):<10} {str(ratio):<12} {format_interval(times[i])}")
    return 0


def _placed_curves(ps: PeriodicSequence, entries: List[CurveEntry]) -> List[PlacedCurve]:
    placed = []
    for entry in entries:
        if not 0 <= entry.time_index <= len(ps):
            raise CurveNotCarriedError(f"кривая {entry.name}: момент {entry.time_index} вне периода длины {len(ps)}")
        curve = embed_curve(ps.seq.tracks[entry.time_index], entry)
        placed.append(PlacedCurve(name=entry.name, curve=curve, time_index=entry.time_index))
    return placed


def cmd_systole(args, state: RunState) -> int:
    parsed = _load_sequence(args.seq, state)
    ps = _require_period(parsed, args.seq)
    _, entries = parse_curves(args.curves)
    cert = _certify(ps, state, args.tol)

    started = time.time()
    profile = systole_profile(cert, ps, _placed_curves(ps, entries), args.grid, args.tol)
    state.add_step(RunPhase.PROFILE, "systole", {"curves": len(entries), "grid": len(profile.grid)},
                   time.time() - started)
    for curve in profile.curves:
        tracer.line(f"curve {curve.name} t={curve.time_index}  i+ {format_interval(curve.i_plus)}  "
                    f"i- {format_interval(curve.i_minus)}  floor {format_interval(curve.floor)}")
    tracer.line(f"dilatation {format_interval(profile.dilatation)}")
    tracer.line(f"period_log {format_interval(profile.period_log)}")
    tracer.line(f"sup_min {format_interval(profile.sup_min_bound)}")
    return 0


def cmd_family(args, state: RunState) -> int:
    fixture = Path(args.fixture) if args.fixture else DEFAULT_BUNDLES[args.kind]
    values = parse_range(args.range or DEFAULT_RANGES[args.kind])

    started = time.time()
    bundle = parse_bundle(fixture)
    state.add_step(RunPhase.LOAD, f"bundle {fixture}", {"loops": len(bundle.loops)}, time.time() - started)

    agent_class = TwistFamilyAgent if args.kind == "twist" else ZetaFamilyAgent
    agent = agent_class(bundle, args.tol, args.grid, state)
    rows = agent.run(values)
    state.certified = True
    logger.info(f"family {args.kind}: {agent.stats}")

    text = family_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        state.add_step(RunPhase.REPORT, f"csv {args.out}", {"rows": len(rows)}, 0.0)
        tracer.trace_success(f"{len(rows)} строк записано в {args.out}")
    else:
        table = [line.split(",") for line in text.splitlines()]
        widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
        for row in table:
            tracer.line("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    return 0


def cmd_twist(args, state: RunState) -> int:
    track = parse_track(args.track)
    _, entries = parse_curves(args.curves)
    by_name = {entry.name: entry for entry in entries}
    if args.curve not in by_name:
        raise UsageError(f"в {args.curves} нет кривой '{args.curve}'")

    started = time.time()
    ps = twist_period(track, embed_curve(track, by_name[args.curve]))
    state.add_step(RunPhase.TRANSFORM, f"twist {args.curve}", {"splits": len(ps)}, time.time() - started)
    text = serialize_sequence(Path(args.track).name, ps.seq.moves, ps.iso.branch_map)
    tracer.line(text.rstrip("\n"))
    return 0


def cmd_sample(args, state: RunState) -> int:
    rng = random.Random(args.seed)
    started = time.time()
    if args.kind == "roof":
        track = parse_track(args.source)
        stats = roof_ratio_stats(track, rng, args.count, args.length)
        state.add_step(RunPhase.PROFILE, "roof samples", {"splits": stats.splits}, time.time() - started)
        tracer.line(f"trajectories {stats.trajectories}  splits {stats.splits}  ties {stats.ties}")
        tracer.line(f"ratios [{stats.low}, {stats.high}]")
        tracer.line(f"violations {len(stats.violations)}")
        if stats.violations:
            raise CertificationError("; ".join(stats.violations[:5]))
        return 0

    parsed = _load_sequence(args.source, state)
    stats = min_weight_stats(parsed.seq, rng, args.count)
    state.add_step(RunPhase.PROFILE, "weight samples", {"samples": stats.samples}, time.time() - started)
    tracer.line(f"samples {stats.samples}  beta {stats.beta}")
    tracer.line(f"min weight [{stats.low}, {stats.high}]  ceiling {stats.ceiling}")
    tracer.line(f"below beta {stats.below}")
    if stats.below:
        raise CertificationError(f"{stats.below} мер легче границы {stats.beta}")
    return 0


# --- разбор аргументов --------------------------------------------------------

def _global_flags() -> argparse.ArgumentParser:
    """Глобальные флаги допустимы и до, и после подкоманды"""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="зерно генератора случайных чисел")
    parent.add_argument("--trace", action="store_true", default=argparse.SUPPRESS, help="сводка шагов в конце")
    parent.add_argument("--tol", type=parse_rational, default=argparse.SUPPRESS, help="точность интервалов (a/b^c)")
    parent.add_argument("--grid", type=int, default=argparse.SUPPRESS, help="число шагов сетки на период")
    return parent


def build_parser() -> argparse.ArgumentParser:
    flags = _global_flags()
    parser = argparse.ArgumentParser(prog="ttk", description="Исчисление трейн-треков", parents=[flags])
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("validate", parents=[flags], help="проверка трека и перепись областей")
    sub.add_argument("track")
    sub.set_defaults(handler=cmd_validate)

    for name, handler, text in (("run", cmd_run, "конечный трек последовательности"),
                                ("matrix", cmd_matrix, "матрица переноса"),
                                ("tight", cmd_tight, "tightness и граница минимального веса"),
                                ("pa", cmd_pa, "сертификат псевдо-Аносова")):
        sub = commands.add_parser(name, parents=[flags], help=text)
        sub.add_argument("seq")
        sub.set_defaults(handler=handler)

    sub = commands.add_parser("roof", parents=[flags], help="функция крыши")
    sub.add_argument("seq")
    sub.add_argument("measure")
    sub.set_defaults(handler=cmd_roof)

    sub = commands.add_parser("systole", parents=[flags], help="оценки q-длин кривых на периоде")
    sub.add_argument("seq")
    sub.add_argument("--curves", required=True)
    sub.set_defaults(handler=cmd_systole)

    sub = commands.add_parser("family", parents=[flags], help="таблица семейства twist или zeta")
    sub.add_argument("kind", choices=["twist", "zeta"])
    sub.add_argument("--fixture")
    sub.add_argument("--range")
    sub.add_argument("--out")
    sub.set_defaults(handler=cmd_family)

    sub = commands.add_parser("twist", parents=[flags], help="последовательность твиста вдоль кривой")
    sub.add_argument("track")
    sub.add_argument("curves")
    sub.add_argument("curve")
    sub.set_defaults(handler=cmd_twist)

    sub = commands.add_parser("sample", parents=[flags], help="случайные λ-траектории и минимальные веса")
    sub.add_argument("kind", choices=["roof", "weight"])
    sub.add_argument("source", help="трек для roof, последовательность для weight")
    sub.add_argument("--count", type=int, default=1000)
    sub.add_argument("--length", type=int, default=50, help="наибольшая длина траектории")
    sub.set_defaults(handler=cmd_sample)
    return parser


def _parse(argv: List[str]) -> Tuple[Optional[argparse.Namespace], int]:
    try:
        return build_parser().parse_args(argv), 0
    except SystemExit as e:
        # argparse завершает работу с кодом 2 при ошибке и 0 при --help
        return None, 0 if e.code in (0, None) else 1


def cli_main(argv: Optional[List[str]] = None) -> int:
    args, code = _parse(sys.argv[1:] if argv is None else list(argv))
    if args is None:
        return code
    args.tol = getattr(args, "tol", settings.tol)
    args.grid = getattr(args, "grid", settings.grid_steps)
    trace = getattr(args, "trace", False)
    args.seed = getattr(args, "seed", settings.seed)
    configure_logging()

    state = RunState(command=args.command, arguments={k: str(v) for k, v in vars(args).items() if k != "handler"})
    try:
        code = args.handler(args, state)
    except CertificationError as e:
        state.certified = False
        state.add_error(str(e))
        tracer.trace_error(f"сертификация не удалась: {e}")
        code = 2
    except (TrainTrackError, OSError, ValueError) as e:
        state.add_error(str(e))
        tracer.trace_error(str(e))
        code = 1
    if trace:
        tracer.trace_run_complete(state)
    return code


if __name__ == "__main__":
    sys.exit(cli_main())
