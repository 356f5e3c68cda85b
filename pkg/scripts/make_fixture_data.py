"""Regenerate the fixture corpora under data/ from the tables below.

The chorale fixtures are small hand-written progressions that follow the
tonic -> predominant -> dominant grammar; the rock fixtures are blues-style
measure analyses. Running this script rewrites data/ deterministically.
"""

from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data"

# (id, key-per-beat, roman-per-beat, soprano notes per beat)
# a soprano entry is either a MIDI int or a list of (midi, fraction)
CHORALES = [
    ("fixture-01", "major", [
        ("C", "I", 72), ("C", "I6", 76), ("C", "IV", 77), ("C", "V", 74),
        ("C", "I", 72), ("C", "vi", 76), ("C", "ii6", 74), ("C", "V7", 71),
        ("C", "I", 72), ("C", "I", [(67, 0.5), (69, 0.5)]), ("C", "IV", 69),
        ("C", "viio", 74), ("C", "I6", 72), ("C", "ii6", 74), ("C", "V", 79),
        ("C", "I", 72),
    ]),
    ("fixture-02", "major", [
        ("C", "I", 72), ("C", "V6", 74), ("C", "I", 72), ("C", "IV", 77),
        ("C", "ii", 74), ("C", "V", 79), ("G", "I", 74), ("G", "V6", 74),
        ("G", "I", 79), ("G", "IV", 72), ("G", "ii6", 76), ("G", "V7", 78),
        ("G", "I", 79), ("G", "I", 79), ("C", "V", 74), ("C", "I", 76),
        ("C", "IV", 77), ("C", "ii6", 77), ("C", "V", 74), ("C", "I", 72),
    ]),
    ("fixture-03", "major", [
        ("D", "I", 74), ("D", "I6", 78), ("D", "IV", 79), ("D", "V7", 73),
        ("D", "I", 74), ("D", "vi", 71), ("D", "ii6", 76), ("D", "V", 69),
        ("D", "I", 78), ("D", "IV6", 74), ("D", "viio6", 73), ("D", "I", 74),
        ("D", "ii", 76), ("D", "V", 73), ("D", "V7", 76), ("D", "I", 74),
    ]),
    ("fixture-04", "major", [
        ("F", "I", 77), ("F", "vi", 74), ("F", "ii6", 74), ("F", "V", 76),
        ("F", "I", 77), ("F", "I6", 72), ("F", "IV", 74), ("F", "V7", 76),
        ("F", "I", 69), ("F", "IV", 70), ("F", "viio", 70), ("F", "I6", 72),
        ("F", "ii6", 67), ("F", "V", 72), ("F", "V7", 76), ("F", "I", 77),
    ]),
    ("fixture-05", "major", [
        ("C", "I", 72), ("C", "iii", 71), ("C", "IV", 72), ("C", "V", 71),
        ("C", "vi", 72), ("C", "ii6", 74), ("C", "V7", 77), ("C", "I", 76),
        ("C", "I6", 67), ("C", "IV", 69), ("C", "ii", 74), ("C", "V", 74),
        ("C", "I", 72), ("C", "vi", 69), ("C", "V6", 74), ("C", "I", 72),
    ]),
    ("fixture-06", "major", [
        ("C", "I", 72), ("C", "I6", [(76, 0.5), (77, 0.5)]), ("C", "I", 79),
        ("C", "IV", 77), ("C", "viio", 74), ("C", "I6", 72), ("C", "ii65", 72),
        ("C", "V", 71), ("C", "I", 72), ("C", "vi", [(76, 0.5), (74, 0.5)]),
        ("C", "ii", 74), ("C", "V7", [(77, 0.5), (76, 0.5)]), ("C", "I", 76),
        ("C", "IV", [(72, 0.5), (74, 0.5)]), ("C", "V", 74), ("C", "I", 72),
    ]),
    ("fixture-07", "major", [
        ("C", "I", 76), ("C", "IV", 77), ("C", "V", 79), ("C", "I", 72),
        ("G", "I", 74), ("G", "V7", 72), ("G", "I", 71), ("G", "IV", 72),
        ("G", "V", 74), ("G", "I", 79), ("C", "V7", 77), ("C", "I", 76),
    ]),
    ("fixture-08", "major", [
        ("C", "I", 72), ("C", "V42", 74), ("C", "I6", 72), ("C", "V65", 74),
        ("C", "I", 76), ("C", "I6", 67), ("C", "I64", 72), ("C", "V", 74),
        ("C", "V7", 77), ("C", "I", 76), ("C", "vi", [(72, 0.5), (74, 0.5)]),
        ("C", "vi", 72), ("C", "ii65", [(76, 0.5), (74, 0.5)]), ("C", "V", 79),
        ("C", "V42", 71), ("C", "I6", 72), ("C", "V7", 71), ("C", "I", 72),
    ]),
    ("fixture-09", "minor", [
        ("a", "i", 72), ("a", "iv", 74), ("a", "V", 76), ("a", "i", 69),
        ("a", "VI", 77), ("a", "iio6", 74), ("a", "V7", 68), ("a", "i", 69),
        ("a", "iv", 74), ("a", "V", 71), ("a", "V7", 74), ("a", "i", 72),
    ]),
    ("fixture-10", "minor", [
        ("e", "i", 76), ("e", "III", 74), ("e", "iv", 72), ("e", "V", 75),
        ("e", "i", 71), ("e", "VI", 72), ("e", "iio6", 69), ("e", "V7", 69),
        ("e", "i", 67), ("e", "iv", 76), ("e", "V", 78), ("e", "i", 76),
    ]),
]

# (id, key_pc, [(absolute chord root pc, melody pc) per measure])
ROCK_SONGS = [
    ("rock-01", 0, [(0, 0), (0, 4), (0, 7), (0, 4), (5, 5), (5, 9),
                    (0, 0), (0, 7), (7, 7), (5, 5), (0, 4), (0, 0)]),
    ("rock-02", 7, [(7, 7), (7, 11), (0, 0), (0, 4), (7, 7), (7, 2),
                    (2, 2), (0, 0), (7, 11), (7, 7), (2, 9), (7, 7)]),
    ("rock-03", 5, [(5, 5), (10, 10), (0, 0), (5, 9), (5, 5), (10, 2),
                    (0, 4), (5, 5), (10, 10), (10, 2), (0, 0), (5, 5)]),
    ("rock-04", 0, [(0, 0), (9, 9), (5, 5), (7, 7), (0, 4), (10, 10),
                    (5, 9), (0, 0), (0, 7), (5, 5), (7, 2), (0, 0)]),
    ("rock-05", 2, [(2, 2), (7, 7), (2, 6), (9, 9), (7, 11), (2, 9),
                    (9, 1), (2, 2), (2, 6), (7, 7), (9, 9), (2, 2)]),
    ("rock-06", 9, [(9, 9), (9, 1), (2, 2), (4, 4), (9, 9), (2, 6),
                    (4, 8), (9, 9), (9, 1), (2, 2), (4, 11), (9, 9)]),
]

# melody-only fixtures; a beat is a MIDI int or a list of (midi, fraction)
MELODIES = [
    ("m01", [72, 74, 76, 77, 79, 77, 76, 74, 72]),
    ("m02", [76, 74, 72, 74, 76, 76, 77, 76, 74, 72, 74, 71, 72]),
    ("m03", [67, 69, 71, 72, 74, 72, 71, 69, 67]),
    ("m04", [72, 76, 79, 77, 76, 74, 72, 71, 72]),
    ("m05", [79, 77, 76, 74, 72, 74, 76, 72]),
    ("m06", [72, 72, 74, 74, 76, 76, 77, 79, 77, 76, 74, 72]),
    ("m07", [76, 77, 79, 81, 79, 77, 76, 74, 76, 72]),
    ("m08", [67, 72, 71, 69, 67, 69, 71, 72]),
    ("m09", [72, 74, 76, 74, 72, 71, 69, 71, 72]),
    ("m10", [76, 76, 74, 74, 72, 72, 71, 72]),
    ("m11", [74, 76, 78, 79, 78, 76, 74, 72, 71, 72]),
    ("m12", [79, 78, 76, 74, 78, 79, 74, 71, 72]),
    ("m13", [72, [(74, 0.5), (76, 0.5)], 77, 76, 74, [(72, 0.5), (74, 0.5)], 71, 72]),
    ("m14", [69, 71, 72, 74, 76, 74, 72, 71, 69]),
    ("m15", [72, 77, 76, 74, 79, 77, 76, 74, 72]),
    ("m16", [76, 74, 76, 77, 76, 74, 72, 74, 76, 79, 77, 76]),
    ("m17", [71, 72, 74, 76, 74, 72, 71, 69, 72]),
    ("m18", [74, 72, 71, 72, 74, 76, 77, 76, 72]),
    ("m19", [72, 74, 76, 78, 79, 74, 78, 79, 76, 74, 72, 72]),
    ("m20", [79, 76, 77, 74, 76, 72, 74, 71, 72]),
]


def format_notes(entry) -> str:
    if isinstance(entry, int):
        return f"{entry}:1"
    return ",".join(f"{midi}:{frac:g}" for midi, frac in entry)


def main():
    chorale_dir = ROOT / "chorales"
    rock_dir = ROOT / "rock"
    melody_dir = ROOT / "melodies"
    for d in (chorale_dir, rock_dir, melody_dir):
        d.mkdir(parents=True, exist_ok=True)

    for chorale_id, mode, beats in CHORALES:
        lines = [f"id: {chorale_id}", f"mode: {mode}"]
        for t, (key, roman, soprano) in enumerate(beats):
            lines.append(f"{t} | notes={format_notes(soprano)}"
                         f" | key={key} | roman={roman}")
        (chorale_dir / f"{chorale_id}.txt").write_text("\n".join(lines) + "\n")

    for song_id, key_pc, measures in ROCK_SONGS:
        lines = [f"id: {song_id}", "mode: major"]
        for m, (root_pc, melody_pc) in enumerate(measures):
            lines.append(f"{m} | key_pc={key_pc} | roman_root_pc={root_pc}"
                         f" | melody_degree_pc={melody_pc}")
        (rock_dir / f"{song_id}.txt").write_text("\n".join(lines) + "\n")

    for melody_id, beats in MELODIES:
        lines = [f"id: {melody_id}"]
        for t, entry in enumerate(beats):
            lines.append(f"{t} | notes={format_notes(entry)}")
        (melody_dir / f"{melody_id}.txt").write_text("\n".join(lines) + "\n")

    print(f"wrote {len(CHORALES)} chorales, {len(ROCK_SONGS)} rock songs,"
          f" {len(MELODIES)} melodies under {ROOT}")


if __name__ == "__main__":
    main()
