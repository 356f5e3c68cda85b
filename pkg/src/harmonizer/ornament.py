"""Probabilistic insertion of non-chord tones into generated voices.

Three ornament types are supported: passing notes filling a third between
consecutive pitches, auxiliary notes decorating a repeated pitch, and
appoggiaturas leaning on strong beats. Each fires independently per beat
with its configured probability, at most one ornament per voice per beat,
and the soprano is never touched. All randomness comes from the seed, so
a fixed seed reproduces output exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import KeyLabel, MusicError, Pitch, diatonic_pcs
from .harmonize import ALTO_RANGE, BASS_RANGE, TENOR_RANGE, Harmonization

STRONG_BEAT_POSITIONS = (0, 2)


@dataclass(frozen=True)
class OrnamentConfig:
    p_passing: float = 0.3
    p_auxiliary: float = 0.15
    p_appoggiatura: float = 0.05
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("p_passing", "p_auxiliary", "p_appoggiatura"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise MusicError(f"{name} must be in [0, 1]: {value}")

    def as_dict(self) -> dict:
        return {"p_passing": self.p_passing, "p_auxiliary": self.p_auxiliary,
                "p_appoggiatura": self.p_appoggiatura}


def diatonic_between(low: int, high: int, key: KeyLabel) -> int | None:
    """The scale tone strictly between two pitches, preferring the one
    nearest the midpoint (lower on ties); None when the gap has no scale
    tone."""
    if low > high:
        low, high = high, low
    pcs = diatonic_pcs(key)
    inside = [m for m in range(low + 1, high) if m % 12 in pcs]
    if not inside:
        return None
    midpoint = (low + high) / 2
    return min(inside, key=lambda m: (abs(m - midpoint), m))


def diatonic_upper_neighbor(pitch: int, key: KeyLabel) -> int | None:
    pcs = diatonic_pcs(key)
    for m in range(pitch + 1, pitch + 4):
        if m % 12 in pcs:
            return m
    return None


def estimate_ornament_rates(corpus) -> OrnamentConfig:
    """Empirical ornament rates from a corpus: for each type, the fraction
    of eligible sites in the melodies that exhibit its pattern. A type with
    no eligible sites gets rate 0."""
    eligible = {"passing": 0, "auxiliary": 0, "appoggiatura": 0}
    exhibited = {"passing": 0, "auxiliary": 0, "appoggiatura": 0}
    for ch in corpus.chorales:
        beats = [ev for ev, _, _ in ch.events]
        reps = [ev.representative.midi for ev in beats]
        for t in range(len(beats)):
            extra = [p.midi for p, _ in beats[t].notes[1:]]
            if t + 1 < len(beats):
                gap = abs(reps[t + 1] - reps[t])
                if gap in (3, 4):
                    eligible["passing"] += 1
                    lo, hi = sorted((reps[t], reps[t + 1]))
                    if any(lo < m < hi for m in extra):
                        exhibited["passing"] += 1
                if reps[t + 1] == reps[t]:
                    eligible["auxiliary"] += 1
                    if any(m != reps[t] and abs(m - reps[t]) <= 2 for m in extra):
                        exhibited["auxiliary"] += 1
            if t % 4 in STRONG_BEAT_POSITIONS:
                eligible["appoggiatura"] += 1
                first = beats[t].notes[0][0].midi
                if len(beats[t].notes) >= 2:
                    second = beats[t].notes[1][0].midi
                    if 1 <= first - second <= 2:
                        exhibited["appoggiatura"] += 1
    def rate(name):
        return exhibited[name] / eligible[name] if eligible[name] else 0.0
    return OrnamentConfig(p_passing=rate("passing"),
                          p_auxiliary=rate("auxiliary"),
                          p_appoggiatura=rate("appoggiatura"))


_VOICES = (
    ("alto", ALTO_RANGE),
    ("tenor", TENOR_RANGE),
    ("bass", BASS_RANGE),
)


def insert_ornaments(h: Harmonization, cfg: OrnamentConfig,
                     key_at_beat=None) -> Harmonization:
    """Return a new harmonization with ornaments inserted into the alto,
    tenor and bass lines. Sites whose inserted pitch would leave the voice
    range or break the vertical order against neighbouring voices are
    skipped silently.
    """
    keys = list(key_at_beat) if key_at_beat is not None else list(h.annotation.keys)
    rng = random.Random(cfg.rng_seed)
    n = len(h.soprano)
    soprano = [ev.representative.midi for ev in h.soprano.events]
    skeleton = {
        "alto": [a.alto.midi for a in h.arrangements],
        "tenor": [a.tenor.midi for a in h.arrangements],
        "bass": [a.bass.midi for a in h.arrangements],
    }
    above = {"alto": soprano, "tenor": skeleton["alto"], "bass": skeleton["tenor"]}
    new_lines = {
        "alto": [list(beat) for beat in h.alto_line],
        "tenor": [list(beat) for beat in h.tenor_line],
        "bass": [list(beat) for beat in h.bass_line],
    }
    meter = h.soprano.meter

    def fits(voice, t, pitch) -> bool:
        lo, hi = dict(_VOICES)[voice]
        if not lo <= pitch <= hi:
            return False
        if pitch > above[voice][t]:
            return False
        below = {"alto": skeleton["tenor"], "tenor": skeleton["bass"]}.get(voice)
        if below is not None and pitch < below[t]:
            return False
        return True

    for voice, _ in _VOICES:
        line = new_lines[voice]
        skel = skeleton[voice]
        for t in range(n):
            cur = skel[t]
            nxt = skel[t + 1] if t + 1 < n else None
            # passing tone filling a third on the way to the next beat
            if nxt is not None and abs(nxt - cur) in (3, 4):
                mid = diatonic_between(cur, nxt, keys[t])
                if mid is not None and fits(voice, t, mid):
                    if rng.random() < cfg.p_passing:
                        line[t] = [(Pitch(cur), 0.5), (Pitch(mid), 0.5)]
                        continue
            # auxiliary tone decorating a repeated pitch
            if nxt is not None and nxt == cur:
                neighbor = diatonic_upper_neighbor(cur, keys[t])
                if neighbor is not None and fits(voice, t, neighbor):
                    if rng.random() < cfg.p_auxiliary:
                        line[t] = [(Pitch(cur), 0.5), (Pitch(neighbor), 0.5)]
                        continue
            # appoggiatura leaning onto a strong beat
            if t % meter in STRONG_BEAT_POSITIONS:
                neighbor = diatonic_upper_neighbor(cur, keys[t])
                if neighbor is not None and fits(voice, t, neighbor):
                    if rng.random() < cfg.p_appoggiatura:
                        line[t] = [(Pitch(neighbor), 0.5), (Pitch(cur), 0.5)]

    return Harmonization(soprano=h.soprano, arrangements=list(h.arrangements),
                         annotation=h.annotation, penalty=h.penalty,
                         violation_log=list(h.violation_log),
                         alto_line=new_lines["alto"],
                         tenor_line=new_lines["tenor"],
                         bass_line=new_lines["bass"])
