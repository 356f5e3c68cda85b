"""Command-line surface: train, harmonize, analyze, export, override.

Exit codes: 0 success, 2 input error, 3 infeasible harmonization,
4 I/O error. Every command is deterministic given its flags; the only
randomness is the ornament RNG behind --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .core import MODES, MusicError
from .corpus import (
    CorpusError,
    parse_corpus,
    parse_melody_file,
    parse_rock_melody_file,
    transpose_to_reference,
    Corpus,
)
from .harmonize import (
    HarmonizeConfig,
    InfeasibleHarmonizationError,
    harmonize_melody,
    to_score_document,
)
from .hmm import (
    DecodeInfeasibleError,
    HmmError,
    ModelBundle,
    apply_override,
    decode_key_chord,
    load_bundle,
    masked_pairs,
    save_bundle,
    train_key_chord_models,
    DEFAULT_ALPHA,
)
from .midiout import export_functional_summary, export_matrices, write_midi
from .ornament import OrnamentConfig, estimate_ornament_rates, insert_ornaments
from .rock import harmonize_rock, render_accompaniment, to_progression_document

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    """Validated run options, merged from defaults, --config file and flags."""

    genre: str = "chorale"
    method: str = "viterbi"
    ornaments: bool = False
    p_passing: float | None = None
    p_auxiliary: float | None = None
    p_appoggiatura: float | None = None
    rng_seed: int = 0
    max_seeds: int | None = None
    tempo_bpm: int | None = None
    mask_enabled: bool | None = None
    pattern: str = "arpeggio"
    drums: bool = True

    def __post_init__(self):
        if self.genre not in ("chorale", "rock"):
            raise MusicError(f"unknown genre: {self.genre!r}")
        if self.method not in ("viterbi", "posterior"):
            raise MusicError(f"unknown method: {self.method!r}")
        if self.pattern not in ("arpeggio", "block"):
            raise MusicError(f"unknown pattern: {self.pattern!r}")
        if self.max_seeds is not None and self.max_seeds < 1:
            raise MusicError(f"max_seeds must be positive: {self.max_seeds}")
        if self.tempo_bpm is not None and not 20 <= self.tempo_bpm <= 400:
            raise MusicError(f"tempo out of range: {self.tempo_bpm}")


def _merge_config(args: argparse.Namespace, fields: list[str]) -> RunConfig:
    """Flags win over config-file values, which win over defaults."""
    file_values = {}
    config_path = getattr(args, "config", None)
    if config_path:
        file_values = json.loads(Path(config_path).read_text())
    values = {}
    for name in fields:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
        elif name in file_values:
            values[name] = file_values[name]
    return RunConfig(**values)


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError(f"expected on|off, got {text!r}")
    return text == "on"


def cmd_train(args) -> int:
    started = time.perf_counter()
    corpus = parse_corpus(args.corpus, args.genre)
    if args.genre == "chorale":
        corpus = corpus.select_mode(args.mode)
        if not corpus.chorales:
            raise CorpusError(f"no {args.mode}-mode chorales in {args.corpus}")
        corpus = Corpus(tuple(transpose_to_reference(ch) for ch in corpus.chorales),
                        corpus.genre)
    mask_enabled = None if not args.no_mask else False
    alpha = DEFAULT_ALPHA if args.alpha is None else args.alpha
    bundle = train_key_chord_models(corpus, mask_enabled=mask_enabled, alpha=alpha)
    if args.genre == "chorale":
        bundle.ornament_rates = estimate_ornament_rates(corpus).as_dict()
    save_bundle(bundle, args.out)
    elapsed = time.perf_counter() - started
    print(f"trained on {len(corpus.chorales)} pieces:"
          f" {len(bundle.key_model.states)} key states,"
          f" {len(bundle.chord_model.states)} chord states")
    print(f"model written to {args.out}")
    print(f"training time: {elapsed:.3f}s")
    return EXIT_OK


def _ornament_config(cfg: RunConfig, bundle: ModelBundle) -> OrnamentConfig:
    defaults = OrnamentConfig()
    rates = bundle.ornament_rates or {}
    def pick(flag, name):
        if flag is not None:
            return flag
        if name in rates:
            return rates[name]
        return getattr(defaults, name)
    return OrnamentConfig(
        p_passing=pick(cfg.p_passing, "p_passing"),
        p_auxiliary=pick(cfg.p_auxiliary, "p_auxiliary"),
        p_appoggiatura=pick(cfg.p_appoggiatura, "p_appoggiatura"),
        rng_seed=cfg.rng_seed)


def cmd_harmonize(args) -> int:
    cfg = _merge_config(args, ["method", "ornaments", "p_passing", "p_auxiliary",
                               "p_appoggiatura", "rng_seed", "max_seeds",
                               "tempo_bpm", "pattern", "drums"])
    bundle = load_bundle(args.model)
    started = time.perf_counter()
    if bundle.genre == "rock":
        degrees = parse_rock_melody_file(args.melody)
        progression = harmonize_rock(bundle.key_model, bundle.chord_model,
                                     degrees, cfg.method)
        score = render_accompaniment(progression, pattern=cfg.pattern,
                                     drums=cfg.drums, melody_degree_pcs=degrees)
        if args.out_midi:
            write_midi(score, args.out_midi, tempo_bpm=cfg.tempo_bpm)
        if args.out_score:
            Path(args.out_score).write_text(to_progression_document(progression))
        elapsed = time.perf_counter() - started
        print(f"harmonized {len(progression)} measures")
        print(f"harmonization time: {elapsed:.3f}s")
        return EXIT_OK
    melody = parse_melody_file(args.melody)
    harmonization = harmonize_melody(bundle.key_model, bundle.chord_model, melody,
                                     cfg.method,
                                     HarmonizeConfig(max_seeds=cfg.max_seeds))
    if cfg.ornaments:
        harmonization = insert_ornaments(harmonization,
                                         _ornament_config(cfg, bundle))
    if args.out_midi:
        write_midi(harmonization, args.out_midi, tempo_bpm=cfg.tempo_bpm)
    if args.out_score:
        Path(args.out_score).write_text(
            to_score_document(harmonization, title=Path(args.melody).stem))
    elapsed = time.perf_counter() - started
    print(f"penalty: {harmonization.penalty:g}")
    if harmonization.violation_log:
        for v in harmonization.violation_log:
            print(f"  beat {v.beat_index}: {v.rule} (weight {v.weight:g})")
    else:
        print("  no violations")
    print(f"harmonization time: {elapsed:.3f}s")
    return EXIT_OK


def cmd_analyze(args) -> int:
    bundle = load_bundle(args.model)
    method = args.method or "viterbi"
    if bundle.genre == "rock":
        degrees = parse_rock_melody_file(args.melody)
        progression = harmonize_rock(bundle.key_model, bundle.chord_model,
                                     degrees, method)
        for i, (key_pc, numeral) in enumerate(progression):
            print(f"{i} | key_pc={key_pc} | roman={numeral}")
        return EXIT_OK
    melody = parse_melody_file(args.melody)
    annotation = decode_key_chord(bundle.key_model, bundle.chord_model,
                                  melody, method)
    for t in range(len(annotation)):
        print(f"{t} | key={annotation.keys[t].to_string()}"
              f" | roman={annotation.chords[t].to_string()}")
    flagged = masked_pairs(bundle.chord_model,
                           [c.to_string() for c in annotation.chords])
    for t, a, b in flagged:
        print(f"# warning: masked transition {a} -> {b} at beat {t}")
    return EXIT_OK


def cmd_export(args) -> int:
    bundle = load_bundle(args.model)
    out_dir = Path(args.out_dir)
    paths = export_matrices(bundle.key_model, out_dir, prefix="key_")
    paths += export_matrices(bundle.chord_model, out_dir, prefix="chord_")
    if bundle.chord_counts:
        paths.append(export_functional_summary(
            bundle.chord_model, bundle.chord_counts,
            out_dir / "functional_summary.csv"))
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_override(args) -> int:
    bundle = load_bundle(args.model)
    if args.layer == "key":
        bundle.key_model = apply_override(bundle.key_model, args.transitions)
    else:
        bundle.chord_model = apply_override(bundle.chord_model, args.transitions)
    save_bundle(bundle, args.out)
    print(f"override applied to {args.layer} layer; model written to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonizer",
        description="Train key/chord transition models and harmonize melodies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="estimate models from an annotated corpus")
    p.add_argument("--corpus", required=True, help="corpus directory")
    p.add_argument("--genre", choices=("chorale", "rock"), default="chorale")
    p.add_argument("--mode", choices=MODES, default="major")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--alpha", type=float, default=None, help="smoothing strength")
    p.add_argument("--no-mask", action="store_true",
                   help="disable the retrogression mask")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("harmonize", help="harmonize a melody file")
    p.add_argument("--model", required=True)
    p.add_argument("--melody", required=True)
    p.add_argument("--method", choices=("viterbi", "posterior"), default=None)
    p.add_argument("--ornaments", type=_on_off, default=None, metavar="on|off")
    p.add_argument("--p-passing", dest="p_passing", type=float, default=None)
    p.add_argument("--p-auxiliary", dest="p_auxiliary", type=float, default=None)
    p.add_argument("--p-appoggiatura", dest="p_appoggiatura", type=float, default=None)
    p.add_argument("--seed", dest="rng_seed", type=int, default=None)
    p.add_argument("--max-seeds", dest="max_seeds", type=int, default=None)
    p.add_argument("--tempo", dest="tempo_bpm", type=int, default=None)
    p.add_argument("--pattern", choices=("arpeggio", "block"), default=None)
    p.add_argument("--drums", type=_on_off, default=None, metavar="on|off")
    p.add_argument("--out-midi", default=None)
    p.add_argument("--out-score", default=None)
    p.add_argument("--config", default=None, help="JSON config file, same keys as flags")
    p.set_defaults(func=cmd_harmonize)

    p = sub.add_parser("analyze", help="print the decoded key/chord progression")
    p.add_argument("--model", required=True)
    p.add_argument("--melody", required=True)
    p.add_argument("--method", choices=("viterbi", "posterior"), default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="export transition/emission matrices")
    p.add_argument("--model", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("override", help="replace a transition matrix from CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--transitions", required=True, help="labeled CSV matrix")
    p.add_argument("--layer", choices=("key", "chord"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_override)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleHarmonizationError, DecodeInfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CorpusError, MusicError, HmmError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
