import json

import pytest

from harmonizer.cli import main

from smf_reader import read_midi


@pytest.fixture(scope="module")
def trained_model(tmp_path_factory, data_dir):
    out = tmp_path_factory.mktemp("models") / "major.json"
    code = main(["train", "--corpus", str(data_dir / "chorales"),
                 "--genre", "chorale", "--mode", "major", "--out", str(out)])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def trained_rock_model(tmp_path_factory, data_dir):
    out = tmp_path_factory.mktemp("models") / "rock.json"
    code = main(["train", "--corpus", str(data_dir / "rock"),
                 "--genre", "rock", "--out", str(out)])
    assert code == 0
    return out


def test_train_reports_sizes(capsys, tmp_path, data_dir):
    out = tmp_path / "m.json"
    code = main(["train", "--corpus", str(data_dir / "chorales"),
                 "--mode", "major", "--out", str(out)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "24 key states" in captured
    assert "17 chord states" in captured
    assert "training time" in captured


def test_train_empty_directory_exits_2(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    code = main(["train", "--corpus", str(empty), "--out",
                 str(tmp_path / "x.json")])
    assert code == 2


def test_train_is_byte_deterministic(tmp_path, data_dir):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["train", "--corpus", str(data_dir / "chorales"),
                     "--mode", "major", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_harmonize_same_seed_same_outputs(tmp_path, trained_model, data_dir):
    melody = data_dir / "melodies" / "m06.txt"
    outputs = []
    for tag in ("one", "two"):
        midi = tmp_path / f"{tag}.mid"
        score = tmp_path / f"{tag}.score"
        code = main(["harmonize", "--model", str(trained_model),
                     "--melody", str(melody), "--ornaments", "on",
                     "--seed", "11", "--out-midi", str(midi),
                     "--out-score", str(score)])
        assert code == 0
        outputs.append((midi.read_bytes(), score.read_bytes()))
    assert outputs[0] == outputs[1]


def test_ornaments_off_equals_zero_rates(tmp_path, trained_model, data_dir):
    melody = data_dir / "melodies" / "m01.txt"
    off = tmp_path / "off.mid"
    zeroed = tmp_path / "zero.mid"
    assert main(["harmonize", "--model", str(trained_model), "--melody",
                 str(melody), "--ornaments", "off",
                 "--out-midi", str(off)]) == 0
    assert main(["harmonize", "--model", str(trained_model), "--melody",
                 str(melody), "--ornaments", "on", "--p-passing", "0",
                 "--p-auxiliary", "0", "--p-appoggiatura", "0",
                 "--out-midi", str(zeroed)]) == 0
    assert off.read_bytes() == zeroed.read_bytes()


def test_harmonize_prints_penalty(capsys, tmp_path, trained_model, data_dir):
    code = main(["harmonize", "--model", str(trained_model),
                 "--melody", str(data_dir / "melodies" / "m03.txt")])
    captured = capsys.readouterr().out
    assert code == 0
    assert "penalty:" in captured
    assert "harmonization time" in captured


def test_analyze_matches_harmonize_annotation(capsys, tmp_path, trained_model,
                                              data_dir):
    melody = data_dir / "melodies" / "m02.txt"
    score_path = tmp_path / "h.score"
    assert main(["harmonize", "--model", str(trained_model), "--melody",
                 str(melody), "--method", "viterbi",
                 "--out-score", str(score_path)]) == 0
    capsys.readouterr()
    assert main(["analyze", "--model", str(trained_model), "--melody",
                 str(melody), "--method", "viterbi"]) == 0
    analyzed = capsys.readouterr().out.strip().splitlines()
    analyzed = [l for l in analyzed if not l.startswith("#")]
    score_lines = [l for l in score_path.read_text().splitlines() if " | " in l]
    assert len(analyzed) == len(score_lines)
    for printed, scored in zip(analyzed, score_lines):
        fields = dict(part.split("=", 1) for part in printed.split(" | ")[1:])
        assert f"key={fields['key']}" in scored
        assert f"roman={fields['roman']}" in scored


def test_config_file_with_flag_precedence(tmp_path, trained_model, data_dir):
    melody = data_dir / "melodies" / "m04.txt"
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"ornaments": True, "rng_seed": 5,
                                  "p_passing": 1.0, "p_auxiliary": 0.0,
                                  "p_appoggiatura": 0.0}))
    from_config = tmp_path / "cfg.mid"
    assert main(["harmonize", "--model", str(trained_model), "--melody",
                 str(melody), "--config", str(config),
                 "--out-midi", str(from_config)]) == 0
    overridden = tmp_path / "flag.mid"
    assert main(["harmonize", "--model", str(trained_model), "--melody",
                 str(melody), "--config", str(config), "--p-passing", "0",
                 "--out-midi", str(overridden)]) == 0
    assert from_config.read_bytes() != overridden.read_bytes()


def test_rock_harmonize_writes_tracks(tmp_path, trained_rock_model):
    melody = tmp_path / "tune.txt"
    melody.write_text("id: tune\n" + "\n".join(
        f"{i} | melody_degree_pc={pc}"
        for i, pc in enumerate([0, 4, 7, 5, 9, 0, 7, 0])) + "\n")
    midi = tmp_path / "tune.mid"
    score = tmp_path / "tune.prog"
    code = main(["harmonize", "--model", str(trained_rock_model),
                 "--melody", str(melody), "--pattern", "block",
                 "--out-midi", str(midi), "--out-score", str(score)])
    assert code == 0
    parsed = read_midi(midi)
    assert len(parsed.tracks) == 5
    assert "key_pc=" in score.read_text()


def test_export_and_identity_override_decode_identical(capsys, tmp_path,
                                                       trained_model, data_dir):
    out_dir = tmp_path / "matrices"
    assert main(["export", "--model", str(trained_model),
                 "--out-dir", str(out_dir)]) == 0
    exported = sorted(p.name for p in out_dir.iterdir())
    assert exported == ["chord_emission.csv", "chord_transition.csv",
                        "functional_summary.csv", "key_emission.csv",
                        "key_transition.csv"]
    override_model = tmp_path / "override.json"
    assert main(["override", "--model", str(trained_model),
                 "--transitions", str(out_dir / "chord_transition.csv"),
                 "--layer", "chord", "--out", str(override_model)]) == 0
    melody = data_dir / "melodies" / "m05.txt"
    capsys.readouterr()
    assert main(["analyze", "--model", str(trained_model),
                 "--melody", str(melody)]) == 0
    before = capsys.readouterr().out
    assert main(["analyze", "--model", str(override_model),
                 "--melody", str(melody)]) == 0
    after = capsys.readouterr().out
    assert before == after


def test_override_dimension_mismatch_exits_2(tmp_path, trained_model):
    out_dir = tmp_path / "m"
    assert main(["export", "--model", str(trained_model),
                 "--out-dir", str(out_dir)]) == 0
    code = main(["override", "--model", str(trained_model),
                 "--transitions", str(out_dir / "chord_transition.csv"),
                 "--layer", "key", "--out", str(tmp_path / "x.json")])
    assert code == 2


def test_harmonize_missing_model_exits_4(tmp_path, data_dir):
    code = main(["harmonize", "--model", str(tmp_path / "nope.json"),
                 "--melody", str(data_dir / "melodies" / "m01.txt")])
    assert code == 4


def test_bad_melody_exits_2(tmp_path, trained_model):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 | notes=72:0.7\n")
    code = main(["harmonize", "--model", str(trained_model),
                 "--melody", str(bad)])
    assert code == 2


def test_infeasible_melody_exits_3(capsys, tmp_path, trained_model):
    # beat 1 sits below the alto range, so no arrangement can be voiced
    low = tmp_path / "low.txt"
    low.write_text("0 | notes=72:1\n1 | notes=45:1\n2 | notes=72:1\n")
    code = main(["harmonize", "--model", str(trained_model),
                 "--melody", str(low)])
    assert code == 3
    assert "beat 1" in capsys.readouterr().err


def test_invalid_run_config_exits_2(tmp_path, trained_model, data_dir):
    code = main(["harmonize", "--model", str(trained_model),
                 "--melody", str(data_dir / "melodies" / "m01.txt"),
                 "--max-seeds", "0"])
    assert code == 2


def test_alpha_flag_changes_model(tmp_path, data_dir):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["train", "--corpus", str(data_dir / "chorales"),
                 "--mode", "major", "--out", str(a)]) == 0
    assert main(["train", "--corpus", str(data_dir / "chorales"),
                 "--mode", "major", "--out", str(b), "--alpha", "1.0"]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_no_mask_flag_drops_mask(tmp_path, data_dir):
    from harmonizer.hmm import load_bundle
    masked = tmp_path / "masked.json"
    unmasked = tmp_path / "unmasked.json"
    assert main(["train", "--corpus", str(data_dir / "chorales"),
                 "--mode", "major", "--out", str(masked)]) == 0
    assert main(["train", "--corpus", str(data_dir / "chorales"),
                 "--mode", "major", "--out", str(unmasked), "--no-mask"]) == 0
    assert load_bundle(masked).chord_model.mask is not None
    assert load_bundle(unmasked).chord_model.mask is None


def test_boosted_override_changes_a_decode(capsys, tmp_path, trained_model,
                                           data_dir):
    import csv

    from harmonizer.hmm import read_transition_csv

    out_dir = tmp_path / "mx"
    assert main(["export", "--model", str(trained_model),
                 "--out-dir", str(out_dir)]) == 0
    labels, matrix = read_transition_csv(out_dir / "chord_transition.csv")
    targets = [j for j, label in enumerate(labels)
               if label[0] in "bvi" or label.startswith("ii")]
    matrix[:, targets] += 0.5
    matrix /= matrix.sum(axis=1, keepdims=True)
    boost_path = tmp_path / "boost.csv"
    with open(boost_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + labels)
        for label, row in zip(labels, matrix):
            writer.writerow([label] + [repr(float(v)) for v in row])
    boosted_model = tmp_path / "boosted.json"
    assert main(["override", "--model", str(trained_model),
                 "--transitions", str(boost_path), "--layer", "chord",
                 "--out", str(boosted_model)]) == 0
    changed = 0
    for melody in sorted((data_dir / "melodies").iterdir()):
        capsys.readouterr()
        assert main(["analyze", "--model", str(trained_model),
                     "--melody", str(melody)]) == 0
        before = capsys.readouterr().out
        assert main(["analyze", "--model", str(boosted_model),
                     "--melody", str(melody)]) == 0
        after = capsys.readouterr().out
        changed += before != after
    assert changed >= 1
