"""Harmonize every fixture melody with both decoders, plus a rock demo tune,
writing MIDI and score documents under build/out/. Expects the models from
scripts/train_models.py."""

from pathlib import Path

from harmonizer.cli import main

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "build" / "models"
OUT = ROOT / "build" / "out"

ROCK_DEMO = [0, 4, 7, 4, 5, 9, 0, 7, 7, 5, 4, 0]


def run():
    OUT.mkdir(parents=True, exist_ok=True)
    model = MODELS / "chorale-major.json"
    if not model.exists():
        raise SystemExit("run scripts/train_models.py first")
    for melody in sorted((ROOT / "data" / "melodies").iterdir()):
        for method in ("viterbi", "posterior"):
            stem = f"{melody.stem}-{method}"
            code = main(["harmonize", "--model", str(model),
                         "--melody", str(melody), "--method", method,
                         "--ornaments", "on", "--seed", "1",
                         "--out-midi", str(OUT / f"{stem}.mid"),
                         "--out-score", str(OUT / f"{stem}.score")])
            if code != 0:
                raise SystemExit(code)
    tune = OUT / "rock-demo-melody.txt"
    tune.write_text("id: rock-demo\n" + "\n".join(
        f"{i} | melody_degree_pc={pc}" for i, pc in enumerate(ROCK_DEMO)) + "\n")
    code = main(["harmonize", "--model", str(MODELS / "rock.json"),
                 "--melody", str(tune), "--pattern", "arpeggio",
                 "--out-midi", str(OUT / "rock-demo.mid"),
                 "--out-score", str(OUT / "rock-demo.prog")])
    if code != 0:
        raise SystemExit(code)
    print(f"wrote harmonizations under {OUT}")


if __name__ == "__main__":
    run()
