from fractions import Fraction

import pytest

from agents.bundles import parse_bundle
from conftest import FIXTURES
from core.errors import SemanticValidationError, TrackSyntaxError
from core.formats import (
    CSV_HEADER, family_csv, format_interval, parse_certificate_text, parse_curves, parse_family_csv,
    parse_measure, parse_sequence, parse_track_text, serialize_certificate, serialize_curves,
    serialize_measure, serialize_sequence, serialize_track
)
from core.geodesics import FamilyTableRow
from core.intervals import RationalInterval
from core.pa_engine import certify_pa


@pytest.mark.parametrize("name", ["g0m7.ttk", "g1m2.ttk", "nonrec.ttk", "zeta_g3m1/g3m1.ttk"])
def test_canonical_tracks_roundtrip(name):
    text = (FIXTURES / name).read_text(encoding="utf-8")
    assert serialize_track(parse_track_text(text)) == text


@pytest.mark.parametrize("name", ["g1m2_phi.seq", "g1m2_loop.seq", "bad_loop.seq"])
def test_canonical_sequences_roundtrip(name):
    path = FIXTURES / name
    parsed = parse_sequence(path)
    text = serialize_sequence(parsed.track_ref, parsed.seq.moves, parsed.declared_iso)
    assert text == path.read_text(encoding="utf-8")


def test_curves_and_measure_roundtrip():
    track_ref, entries = parse_curves(FIXTURES / "g1m2.curves")
    assert [entry.name for entry in entries] == ["a1", "a2", "a3"]
    assert serialize_curves(track_ref, entries) == (FIXTURES / "g1m2.curves").read_text(encoding="utf-8")

    mu = parse_measure(FIXTURES / "g1m2.measure")
    assert mu.weights == (2, 2, 1, 1, 1, 1)
    assert serialize_measure("g1m2.ttk", mu) == (FIXTURES / "g1m2.measure").read_text(encoding="utf-8")


def test_switch_with_branch_out_of_range():
    text = "ttk 1\nsurface 1 2\nbranches 6\nsw 1 A (7.0) B (5.1) (3.1)\n"
    with pytest.raises(TrackSyntaxError) as info:
        parse_track_text(text, "bad.ttk")
    assert info.value.line == 4


def test_structural_failure_names_invariant():
    text = "ttk 1\nsurface 1 2\nbranches 6\nsw 1 A (1.0) B (5.1) (3.1)\n"
    with pytest.raises(SemanticValidationError) as info:
        parse_track_text(text)
    assert info.value.invariant == "track-structure"


def test_missing_header():
    with pytest.raises(TrackSyntaxError):
        parse_track_text("surface 1 2\n")


def test_bad_move_side(g1m2, tmp_path):
    (tmp_path / "g1m2.ttk").write_text(serialize_track(g1m2), encoding="utf-8")
    (tmp_path / "bad.seq").write_text("seq g1m2.ttk\nsplit 1 X\n", encoding="utf-8")
    with pytest.raises(TrackSyntaxError) as info:
        parse_sequence(tmp_path / "bad.seq")
    assert info.value.line == 2


def test_certificate_roundtrip(phi):
    record = certify_pa(phi).to_record()
    text = serialize_certificate(record)
    assert text.startswith("cert v1\np 6\n")
    parsed = parse_certificate_text(text)
    assert parsed == record
    assert serialize_certificate(parsed) == text


def test_family_csv_rounds_outward():
    row = FamilyTableRow(param=3, alpha_lo=Fraction(1, 3), alpha_hi=Fraction(1, 3),
                         period_log_lo=Fraction(-1, 3), period_log_hi=Fraction(2),
                         supmin_lo=Fraction(1), supmin_hi=Fraction(5, 2))
    text = family_csv([row])
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    fields = lines[1].split(",")
    assert fields[0] == "3"
    assert fields[1] == "0.333333333333333333"
    assert fields[2] == "0.333333333333333334"
    assert fields[3] == "-0.333333333333333334"

    parsed = parse_family_csv(text)[0]
    assert parsed["alpha_lo"] <= Fraction(1, 3) <= parsed["alpha_hi"]
    assert parsed["supmin_hi"] == Fraction(5, 2)


def test_format_interval():
    assert format_interval(RationalInterval(Fraction(1, 3), Fraction(2, 3)), 3) == "[0.333, 0.667]"


def test_bundle_loads_with_validation():
    bundle = parse_bundle(FIXTURES / "zeta_g3m1")
    assert set(bundle.subtracks) == {"sigma0", "sigma1", "sigma2"}
    assert set(bundle.loops) == {"phi0", "phi1", "phi2"}
    assert bundle.curve_for("gamma1").branch_cycle == (5, 15)
    assert bundle.loop_supports["phi0"] == "sigma0"
    assert "S_3,1" in bundle.notes


def test_bundle_with_broken_subtrack(tmp_path):
    source = FIXTURES / "zeta_g3m1"
    (tmp_path / "g3m1.ttk").write_text((source / "g3m1.ttk").read_text(encoding="utf-8"), encoding="utf-8")
    text = (source / "bundle.txt").read_text(encoding="utf-8")
    (tmp_path / "bundle.txt").write_text(text.replace("subtrack sigma1 1 2 3 4 6", "subtrack sigma1 1 2 3 4 6 99"),
                                         encoding="utf-8")
    with pytest.raises(SemanticValidationError) as info:
        parse_bundle(tmp_path)
    assert info.value.invariant == "subtrack"
    assert "ветвь 99" in str(info.value)


def test_bundle_unknown_keyword(tmp_path):
    (tmp_path / "bundle.txt").write_text("bundle 1\nfrobnicate 1\n", encoding="utf-8")
    with pytest.raises(TrackSyntaxError) as info:
        parse_bundle(tmp_path)
    assert info.value.line == 2
