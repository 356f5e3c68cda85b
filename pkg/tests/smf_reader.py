"""Minimal standalone Standard MIDI File parser, used as the round-trip
oracle for emitted files. Deliberately shares no code with the writer."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ParsedTrack:
    notes: list[tuple[int, int, int, int]] = field(default_factory=list)
    """(pitch, onset_tick, duration_tick, channel), in onset order."""
    tempos: list[tuple[int, int]] = field(default_factory=list)
    """(tick, microseconds per quarter note)."""


@dataclass
class ParsedMidi:
    format: int
    division: int
    tracks: list[ParsedTrack]


def _read_var_len(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    while True:
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos


def _parse_track(data: bytes) -> ParsedTrack:
    track = ParsedTrack()
    pos = 0
    tick = 0
    running_status = None
    open_notes: dict[tuple[int, int], int] = {}
    while pos < len(data):
        delta, pos = _read_var_len(data, pos)
        tick += delta
        status = data[pos]
        if status & 0x80:
            pos += 1
            if status < 0xF0:
                running_status = status
        else:
            if running_status is None:
                raise ValueError("data byte with no running status")
            status = running_status
        if status == 0xFF:
            meta_type = data[pos]
            pos += 1
            length, pos = _read_var_len(data, pos)
            payload = data[pos:pos + length]
            pos += length
            if meta_type == 0x51:
                track.tempos.append((tick, int.from_bytes(payload, "big")))
            if meta_type == 0x2F:
                break
        elif status in (0xF0, 0xF7):
            length, pos = _read_var_len(data, pos)
            pos += length
        else:
            kind = status & 0xF0
            channel = status & 0x0F
            if kind in (0x80, 0x90, 0xA0, 0xB0, 0xE0):
                p1, p2 = data[pos], data[pos + 1]
                pos += 2
            else:
                p1 = data[pos]
                pos += 1
                p2 = None
            if kind == 0x90 and p2 > 0:
                open_notes[(channel, p1)] = tick
            elif kind == 0x80 or (kind == 0x90 and p2 == 0):
                onset = open_notes.pop((channel, p1), None)
                if onset is None:
                    raise ValueError(f"note-off without note-on: pitch {p1}")
                track.notes.append((p1, onset, tick - onset, channel))
    if open_notes:
        raise ValueError(f"unterminated notes: {sorted(open_notes)}")
    track.notes.sort(key=lambda n: (n[1], n[0]))
    return track


def read_midi(path: str | Path) -> ParsedMidi:
    data = Path(path).read_bytes()
    if data[:4] != b"MThd":
        raise ValueError("missing MThd header")
    header_len = struct.unpack(">I", data[4:8])[0]
    fmt, n_tracks, division = struct.unpack(">HHH", data[8:14])
    pos = 8 + header_len
    tracks = []
    for _ in range(n_tracks):
        if data[pos:pos + 4] != b"MTrk":
            raise ValueError("missing MTrk chunk")
        length = struct.unpack(">I", data[pos + 4:pos + 8])[0]
        body = data[pos + 8:pos + 8 + length]
        tracks.append(_parse_track(body))
        pos += 8 + length
    return ParsedMidi(format=fmt, division=division, tracks=tracks)
