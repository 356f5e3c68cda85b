import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmonizer.core import (
    MAJOR,
    KeyLabel,
    MusicError,
    Pitch,
    transposed_degree,
)
from harmonizer.corpus import (
    CorpusError,
    parse_chorale_text,
    parse_corpus,
    parse_melody_text,
    parse_rock_text,
    quantize_beats,
    serialize_chorale,
    transpose_to_reference,
)

VALID_CHORALE = """\
id: tiny
mode: major
0 | notes=72:1 | key=C | roman=I
1 | notes=74:0.5,76:0.5 | key=C | roman=V
2 | notes=72:1 | key=C | roman=I
"""


def test_parse_valid_chorale():
    ch = parse_chorale_text(VALID_CHORALE, "tiny.txt")
    assert ch.id == "tiny"
    assert ch.mode == "major"
    assert len(ch.events) == 3
    beat, key, chord = ch.events[1]
    assert [p.midi for p, _ in beat.notes] == [74, 76]
    assert key == KeyLabel(0, MAJOR)
    assert chord.to_string() == "V"


def test_parse_reports_location_of_bad_duration():
    bad = VALID_CHORALE.replace("74:0.5,76:0.5", "74:0.5,76:0.4")
    with pytest.raises(CorpusError) as err:
        parse_chorale_text(bad, "tiny.txt")
    assert "tiny.txt:4" in str(err.value)
    assert "0.9" in str(err.value)


def test_parse_reports_bad_key_and_numeral():
    with pytest.raises(CorpusError) as err:
        parse_chorale_text(VALID_CHORALE.replace("key=C", "key=X", 1), "t.txt")
    assert "t.txt:3" in str(err.value)
    with pytest.raises(CorpusError) as err:
        parse_chorale_text(VALID_CHORALE.replace("roman=V", "roman=V99"), "t.txt")
    assert "t.txt:4" in str(err.value)


def test_parse_rejects_out_of_order_beats():
    shuffled = VALID_CHORALE.replace("1 | notes=74", "7 | notes=74")
    with pytest.raises(CorpusError):
        parse_chorale_text(shuffled, "t.txt")


def test_parse_corpus_fixture_counts(data_dir, chorale_corpus):
    # hand count of the fixture files committed under data/chorales
    expected = {
        "fixture-01": 16, "fixture-02": 20, "fixture-03": 16, "fixture-04": 16,
        "fixture-05": 16, "fixture-06": 16, "fixture-07": 12, "fixture-08": 18,
        "fixture-09": 12, "fixture-10": 12,
    }
    assert len(chorale_corpus.chorales) == len(expected)
    for ch in chorale_corpus.chorales:
        assert len(ch.events) == expected[ch.id], ch.id
    # deterministic lexicographic ordering
    assert [ch.id for ch in chorale_corpus.chorales] == sorted(expected)


def test_parse_corpus_empty_directory(tmp_path):
    with pytest.raises(CorpusError):
        parse_corpus(tmp_path, "chorale")


def test_parse_corpus_collects_file_diagnostics(tmp_path):
    (tmp_path / "a.txt").write_text(VALID_CHORALE)
    (tmp_path / "b.txt").write_text(VALID_CHORALE.replace("key=C", "key=Q", 1))
    with pytest.raises(CorpusError) as err:
        parse_corpus(tmp_path, "chorale")
    assert "b.txt:3" in str(err.value)


def test_parse_serialize_parse_fixed_point(chorale_corpus):
    for ch in chorale_corpus.chorales:
        text = serialize_chorale(ch)
        again = parse_chorale_text(text, ch.id)
        assert again == ch
        assert serialize_chorale(again) == text


def test_melody_schema_ignores_annotation_columns():
    melody = parse_melody_text(VALID_CHORALE, "t.txt")
    assert len(melody) == 3
    melody_only = parse_melody_text(
        "0 | notes=72:1\n1 | notes=74:1\n", "m.txt")
    assert [p.midi for p in melody_only.representatives()] == [72, 74]


def test_rock_parse_and_range_check():
    text = """\
id: r
mode: major
0 | key_pc=7 | roman_root_pc=2 | melody_degree_pc=9
1 | key_pc=7 | roman_root_pc=7 | melody_degree_pc=11
"""
    song = parse_rock_text(text, "r.txt")
    beat, key, chord = song.events[0]
    assert key == KeyLabel(7, MAJOR)
    assert chord.to_string() == "V"  # root a fifth above the key
    assert beat.representative.pitch_class == 9
    with pytest.raises(CorpusError) as err:
        parse_rock_text(text.replace("melody_degree_pc=9", "melody_degree_pc=12"),
                        "r.txt")
    assert "r.txt:3" in str(err.value)


# --- beat quantization ---------------------------------------------------

def test_quantize_whole_note_splits_per_beat():
    events = quantize_beats([(0.0, 4.0, 60)])
    assert len(events) == 4
    for ev in events:
        assert [p.midi for p, _ in ev.notes] == [60]
        assert ev.notes[0][1] == pytest.approx(1.0)


def test_quantize_groups_sub_beat_notes():
    events = quantize_beats([(0.0, 0.5, 62), (0.5, 0.5, 64)])
    assert len(events) == 1
    assert [(p.midi, d) for p, d in events[0].notes] == [(62, 0.5), (64, 0.5)]
    assert events[0].representative.midi == 62


def test_quantize_rejects_empty_and_fine_grids():
    with pytest.raises(MusicError):
        quantize_beats([])
    with pytest.raises(MusicError):
        quantize_beats([(0.0, 1.0 / 3.0, 60), (1.0 / 3.0, 2.0 / 3.0, 62)])


def test_quantize_rejects_gaps():
    with pytest.raises(MusicError):
        quantize_beats([(0.0, 0.5, 60), (0.75, 0.25, 62)])


def test_quantize_spanning_note():
    # one and a half beats then a half: the long note appears on both beats
    events = quantize_beats([(0.0, 1.5, 60), (1.5, 0.5, 62)])
    assert len(events) == 2
    assert [(p.midi, d) for p, d in events[1].notes] == [(60, 0.5), (62, 0.5)]


# --- transposition -------------------------------------------------------

def test_transpose_d_major_down_two(chorale_corpus):
    ch = next(c for c in chorale_corpus.chorales if c.id == "fixture-03")
    assert ch.events[0][1] == KeyLabel(2, MAJOR)
    first_pitch = ch.events[0][0].representative.midi
    moved = transpose_to_reference(ch)
    assert moved.events[0][1] == KeyLabel(0, MAJOR)
    assert moved.events[0][0].representative.midi == first_pitch - 2


def test_transpose_identity_when_already_c(chorale_corpus):
    ch = next(c for c in chorale_corpus.chorales if c.id == "fixture-01")
    assert transpose_to_reference(ch) == ch


def test_transpose_is_idempotent(chorale_corpus):
    for ch in chorale_corpus.chorales:
        once = transpose_to_reference(ch)
        assert transpose_to_reference(once) == once


def test_transpose_bflat_style_offset():
    # opening tonic of A# major moves up two semitones to C, preserving a
    # later modulation up a fifth
    text = """\
id: up-two
mode: major
0 | notes=70:1 | key=A# | roman=I
1 | notes=72:1 | key=F | roman=I
"""
    moved = transpose_to_reference(parse_chorale_text(text, "t"))
    assert moved.events[0][1] == KeyLabel(0, MAJOR)
    assert moved.events[1][1] == KeyLabel(7, MAJOR)
    assert moved.events[0][0].representative.midi == 72


def test_transpose_minor_targets_a(chorale_corpus):
    ch = next(c for c in chorale_corpus.chorales if c.id == "fixture-10")
    moved = transpose_to_reference(ch)
    assert moved.events[0][1] == KeyLabel(9, "minor")
    assert moved.mode == "minor"


def test_transpose_preserves_degree_sequences(chorale_corpus):
    for ch in chorale_corpus.chorales:
        moved = transpose_to_reference(ch)
        before = [transposed_degree(beat.representative, key)
                  for beat, key, _ in ch.events]
        after = [transposed_degree(beat.representative, key)
                 for beat, key, _ in moved.events]
        assert before == after


@settings(max_examples=50)
@given(tonic=st.integers(min_value=0, max_value=11))
def test_transpose_offset_is_smallest(tonic):
    text = (f"id: x\nmode: major\n"
            f"0 | notes=70:1 | key={KeyLabel(tonic, MAJOR).to_string()} | roman=I\n"
            f"1 | notes=72:1 | key={KeyLabel(tonic, MAJOR).to_string()} | roman=V\n")
    moved = transpose_to_reference(parse_chorale_text(text, "x"))
    offset = moved.events[0][0].representative.midi - 70
    assert moved.events[0][1].tonic_pc == 0
    assert abs(offset) <= 6
    assert (70 + offset) % 12 == (70 - tonic) % 12
