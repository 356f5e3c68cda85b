"""Export the labeled transition/emission matrices and group summaries for
every trained model into build/reports/<model>/."""

from pathlib import Path

from harmonizer.cli import main

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "build" / "models"
REPORTS = ROOT / "build" / "reports"


def run():
    if not MODELS.exists():
        raise SystemExit("run scripts/train_models.py first")
    for model in sorted(MODELS.glob("*.json")):
        out_dir = REPORTS / model.stem
        code = main(["export", "--model", str(model), "--out-dir", str(out_dir)])
        if code != 0:
            raise SystemExit(code)


if __name__ == "__main__":
    run()
