"""Corpus ingestion: structured-text chorale and rock files, beat
quantization of raw note lists, and transposition to the reference keys.

Chorale files carry one record per beat:

    id: fixture-01
    mode: major
    0 | notes=72:1.0 | key=C | roman=I
    1 | notes=76:0.5,77:0.5 | key=C | roman=I6

Rock files carry one record per measure, all fields integer pitch classes:

    id: rock-01
    mode: major
    0 | key_pc=0 | roman_root_pc=0 | melody_degree_pc=4

Melody files reuse the chorale record grammar with the key/roman columns
absent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .core import (
    MAJOR,
    MODES,
    BeatEvent,
    KeyLabel,
    MelodyLine,
    MusicError,
    Pitch,
    RomanChord,
    transposed_degree,
    triadic_numeral_for_root,
)

GENRES = ("chorale", "rock")

# finest representable subdivision of a beat
GRID = 8


class CorpusError(ValueError):
    """Corpus file problem, carrying file and line diagnostics."""

    def __init__(self, message: str, source: str = "", line: int | None = None):
        self.source = source
        self.line = line
        where = source
        if line is not None:
            where = f"{source}:{line}"
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True)
class AnnotatedChorale:
    """A melody with per-beat key and Roman-numeral annotations."""

    id: str
    mode: str
    events: tuple[tuple[BeatEvent, KeyLabel, RomanChord], ...]

    def __post_init__(self):
        if self.mode not in MODES:
            raise MusicError(f"unknown mode: {self.mode!r}")
        if len(self.events) < 2:
            raise MusicError(f"chorale {self.id!r} has fewer than 2 events")

    def melody(self) -> MelodyLine:
        return MelodyLine(tuple(ev for ev, _, _ in self.events))

    def keys(self) -> list[KeyLabel]:
        return [k for _, k, _ in self.events]

    def chords(self) -> list[RomanChord]:
        return [c for _, _, c in self.events]


@dataclass(frozen=True)
class Corpus:
    chorales: tuple[AnnotatedChorale, ...]
    genre: str

    def select_mode(self, mode: str) -> "Corpus":
        picked = tuple(ch for ch in self.chorales if ch.mode == mode)
        return Corpus(picked, self.genre)


def _parse_note_list(text: str, source: str, line: int) -> tuple[tuple[Pitch, float], ...]:
    notes = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            pitch_s, dur_s = item.split(":")
            notes.append((Pitch(int(pitch_s)), float(dur_s)))
        except (ValueError, MusicError) as exc:
            raise CorpusError(f"bad note entry {item!r}: {exc}", source, line)
    if not notes:
        raise CorpusError("empty note list", source, line)
    return tuple(notes)


def _split_record(raw: str, source: str, line: int) -> tuple[int, dict[str, str]]:
    parts = [p.strip() for p in raw.split("|")]
    try:
        index = int(parts[0])
    except ValueError:
        raise CorpusError(f"record must start with an integer index: {parts[0]!r}",
                          source, line)
    fields = {}
    for part in parts[1:]:
        if "=" not in part:
            raise CorpusError(f"expected field=value, got {part!r}", source, line)
        name, value = part.split("=", 1)
        fields[name.strip()] = value.strip()
    return index, fields


def _iter_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped


def _parse_header(lines, source: str) -> tuple[dict[str, str], list[tuple[int, str]]]:
    header = {}
    records = []
    for lineno, stripped in lines:
        if records:
            records.append((lineno, stripped))
            continue
        if ":" in stripped and "|" not in stripped:
            name, value = stripped.split(":", 1)
            header[name.strip()] = value.strip()
        else:
            records.append((lineno, stripped))
    if not records:
        raise CorpusError("file has no records", source)
    return header, records


def parse_chorale_text(text: str, source: str = "<text>") -> AnnotatedChorale:
    header, records = _parse_header(_iter_lines(text), source)
    mode = header.get("mode", "")
    if mode not in MODES:
        raise CorpusError(f"missing or invalid mode header: {mode!r}", source)
    chorale_id = header.get("id", source)
    events = []
    for expected, (lineno, raw) in enumerate(records):
        index, fields = _split_record(raw, source, lineno)
        if index != expected:
            raise CorpusError(f"beat index {index} out of order, expected {expected}",
                              source, lineno)
        missing = {"notes", "key", "roman"} - fields.keys()
        if missing:
            raise CorpusError(f"missing fields: {sorted(missing)}", source, lineno)
        notes = _parse_note_list(fields["notes"], source, lineno)
        try:
            beat = BeatEvent(index, notes)
            key = KeyLabel.from_string(fields["key"])
            chord = RomanChord.from_string(fields["roman"])
        except MusicError as exc:
            raise CorpusError(str(exc), source, lineno)
        events.append((beat, key, chord))
    try:
        return AnnotatedChorale(chorale_id, mode, tuple(events))
    except MusicError as exc:
        raise CorpusError(str(exc), source)


def parse_rock_text(text: str, source: str = "<text>") -> AnnotatedChorale:
    """Measure-level rock analyses, converted to the same event structure:
    keys become major KeyLabels, chord roots become root-position triads, and
    the melody pitch class is placed in octave 4."""
    header, records = _parse_header(_iter_lines(text), source)
    chorale_id = header.get("id", source)
    events = []
    for expected, (lineno, raw) in enumerate(records):
        index, fields = _split_record(raw, source, lineno)
        if index != expected:
            raise CorpusError(f"measure index {index} out of order, expected {expected}",
                              source, lineno)
        missing = {"key_pc", "roman_root_pc", "melody_degree_pc"} - fields.keys()
        if missing:
            raise CorpusError(f"missing fields: {sorted(missing)}", source, lineno)
        values = {}
        for name in ("key_pc", "roman_root_pc", "melody_degree_pc"):
            try:
                value = int(fields[name])
            except ValueError:
                raise CorpusError(f"{name} must be an integer: {fields[name]!r}",
                                  source, lineno)
            if not 0 <= value <= 11:
                raise CorpusError(f"{name} out of range 0-11: {value}", source, lineno)
            values[name] = value
        key = KeyLabel(values["key_pc"], MAJOR)
        rel_root = (values["roman_root_pc"] - values["key_pc"]) % 12
        chord = triadic_numeral_for_root(rel_root)
        beat = BeatEvent(index, ((Pitch(60 + values["melody_degree_pc"]), 1.0),))
        events.append((beat, key, chord))
    try:
        return AnnotatedChorale(chorale_id, "major", tuple(events))
    except MusicError as exc:
        raise CorpusError(str(exc), source)


def parse_corpus(path: str | Path, genre: str = "chorale") -> Corpus:
    """Parse every file in a directory, in lexicographic filename order.

    Files that fail to parse are all reported together, each with its file
    and line location.
    """
    if genre not in GENRES:
        raise CorpusError(f"unknown genre: {genre!r}")
    directory = Path(path)
    if not directory.is_dir():
        raise CorpusError(f"not a directory: {directory}")
    files = sorted(p for p in directory.iterdir() if p.is_file())
    if not files:
        raise CorpusError(f"no corpus files in {directory}")
    parse = parse_chorale_text if genre == "chorale" else parse_rock_text
    chorales = []
    problems = []
    for p in files:
        try:
            chorales.append(parse(p.read_text(), source=str(p)))
        except CorpusError as exc:
            problems.append(str(exc))
    if problems:
        raise CorpusError("corpus parse failed:\n" + "\n".join(problems))
    return Corpus(tuple(chorales), genre)


def parse_melody_text(text: str, source: str = "<text>") -> MelodyLine:
    """Melody-only schema: the chorale record grammar without key/roman.
    Extra annotation columns are tolerated and ignored."""
    _, records = _parse_header(_iter_lines(text), source)
    events = []
    for expected, (lineno, raw) in enumerate(records):
        index, fields = _split_record(raw, source, lineno)
        if index != expected:
            raise CorpusError(f"beat index {index} out of order, expected {expected}",
                              source, lineno)
        if "notes" not in fields:
            raise CorpusError("missing notes field", source, lineno)
        notes = _parse_note_list(fields["notes"], source, lineno)
        try:
            events.append(BeatEvent(index, notes))
        except MusicError as exc:
            raise CorpusError(str(exc), source, lineno)
    try:
        return MelodyLine(tuple(events))
    except MusicError as exc:
        raise CorpusError(str(exc), source)


def parse_melody_file(path: str | Path) -> MelodyLine:
    p = Path(path)
    return parse_melody_text(p.read_text(), source=str(p))


def parse_rock_melody_text(text: str, source: str = "<text>") -> list[int]:
    """Measure-level melody pitch classes for rock harmonization."""
    _, records = _parse_header(_iter_lines(text), source)
    degrees = []
    for expected, (lineno, raw) in enumerate(records):
        index, fields = _split_record(raw, source, lineno)
        if index != expected:
            raise CorpusError(f"measure index {index} out of order, expected {expected}",
                              source, lineno)
        if "melody_degree_pc" not in fields:
            raise CorpusError("missing melody_degree_pc field", source, lineno)
        try:
            value = int(fields["melody_degree_pc"])
        except ValueError:
            raise CorpusError(f"melody_degree_pc must be an integer", source, lineno)
        if not 0 <= value <= 11:
            raise CorpusError(f"melody_degree_pc out of range 0-11: {value}",
                              source, lineno)
        degrees.append(value)
    return degrees


def parse_rock_melody_file(path: str | Path) -> list[int]:
    p = Path(path)
    return parse_rock_melody_text(p.read_text(), source=str(p))


def _format_duration(d: float) -> str:
    text = f"{d:.6f}".rstrip("0").rstrip(".")
    return text or "0"


def serialize_chorale(chorale: AnnotatedChorale) -> str:
    lines = [f"id: {chorale.id}", f"mode: {chorale.mode}"]
    for beat, key, chord in chorale.events:
        notes = ",".join(f"{p.midi}:{_format_duration(d)}" for p, d in beat.notes)
        lines.append(f"{beat.beat_index} | notes={notes} | key={key.to_string()}"
                     f" | roman={chord.to_string()}")
    return "\n".join(lines) + "\n"


def serialize_melody(melody: MelodyLine, melody_id: str = "melody") -> str:
    lines = [f"id: {melody_id}"]
    for ev in melody.events:
        notes = ",".join(f"{p.midi}:{_format_duration(d)}" for p, d in ev.notes)
        lines.append(f"{ev.beat_index} | notes={notes}")
    return "\n".join(lines) + "\n"


def quantize_beats(raw_notes: list[tuple[float, float, int]]) -> list[BeatEvent]:
    """Group raw (onset, duration, midi) notes, in quarter-note units, into
    per-beat events. Notes longer than a beat repeat on each beat they span;
    notes shorter than a beat are grouped within their beat. Onsets and
    durations must sit on the 1/8-beat grid.
    """
    if not raw_notes:
        raise MusicError("no notes to quantize")
    for onset, duration, midi in raw_notes:
        for value, what in ((onset, "onset"), (duration, "duration")):
            if abs(value * GRID - round(value * GRID)) > 1e-6:
                raise MusicError(
                    f"{what} {value} of note {midi} is finer than 1/{GRID} beat")
        if duration <= 0:
            raise MusicError(f"non-positive duration for note {midi}")
    total_end = max(onset + duration for onset, duration, _ in raw_notes)
    n_beats = math.ceil(round(total_end * GRID) / GRID)
    events = []
    for beat in range(int(n_beats)):
        lo, hi = float(beat), float(beat + 1)
        pieces = []
        for onset, duration, midi in sorted(raw_notes):
            start = max(onset, lo)
            end = min(onset + duration, hi)
            if end - start > 1e-9:
                pieces.append((start, Pitch(midi), end - start))
        if not pieces:
            raise MusicError(f"beat {beat} has no sounding note")
        covered = sum(length for _, _, length in pieces)
        if abs(covered - 1.0) > 1e-9:
            raise MusicError(
                f"beat {beat} is not fully covered: durations sum to {covered}")
        events.append(BeatEvent(beat, tuple((p, length) for _, p, length in pieces)))
    return events


def transpose_to_reference(chorale: AnnotatedChorale) -> AnnotatedChorale:
    """Shift the whole chorale so its opening key tonic lands on C (major)
    or A (minor), by the smallest semitone offset, ties broken downward."""
    target = 0 if chorale.mode == MAJOR else 9
    first_key = chorale.events[0][1]
    delta = (target - first_key.tonic_pc) % 12
    offset = delta if delta < 6 else delta - 12
    if offset == 0:
        return chorale
    events = tuple(
        (BeatEvent(beat.beat_index,
                   tuple((p.transpose(offset), d) for p, d in beat.notes)),
         key.transpose(offset),
         chord)
        for beat, key, chord in chorale.events)
    return AnnotatedChorale(chorale.id, chorale.mode, events)


def key_observation_sequences(corpus: Corpus) -> list[tuple[list[str], list[int]]]:
    """(key labels, melody pitch classes) per chorale, for key-layer training."""
    out = []
    for ch in corpus.chorales:
        hidden = [k.to_string() for k in ch.keys()]
        observed = [beat.representative.pitch_class for beat, _, _ in ch.events]
        out.append((hidden, observed))
    return out


def chord_observation_sequences(corpus: Corpus) -> list[tuple[list[str], list[int]]]:
    """(chord labels, tonic-relative melody degrees) per chorale, for
    chord-layer training."""
    out = []
    for ch in corpus.chorales:
        hidden = [c.to_string() for c in ch.chords()]
        observed = [transposed_degree(beat.representative, key)
                    for beat, key, _ in ch.events]
        out.append((hidden, observed))
    return out
