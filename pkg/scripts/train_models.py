"""Train all three fixture models (major chorale, minor chorale, rock) into
build/models/. Each run is deterministic and overwrites the previous files."""

from pathlib import Path

from harmonizer.cli import main

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "build" / "models"


def run():
    MODELS.mkdir(parents=True, exist_ok=True)
    chorales = str(ROOT / "data" / "chorales")
    jobs = [
        ["train", "--corpus", chorales, "--genre", "chorale", "--mode", "major",
         "--out", str(MODELS / "chorale-major.json")],
        ["train", "--corpus", chorales, "--genre", "chorale", "--mode", "minor",
         "--out", str(MODELS / "chorale-minor.json")],
        ["train", "--corpus", str(ROOT / "data" / "rock"), "--genre", "rock",
         "--out", str(MODELS / "rock.json")],
    ]
    for argv in jobs:
        code = main(argv)
        if code != 0:
            raise SystemExit(code)


if __name__ == "__main__":
    run()
