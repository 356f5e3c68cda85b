"""First-order hidden Markov models over labeled finite alphabets.

Provides masked maximum-likelihood estimation from fully annotated
sequences, Viterbi decoding in log space, posterior decoding via the
scaled forward-backward algorithm, transition-matrix overrides, and the
two-stage key-then-chord decode used for harmonization.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    KeyLabel,
    MelodyLine,
    ProgressionAnnotation,
    RomanChord,
    all_keys,
    is_retrogressive,
    transposed_degree,
)

MASK_EPSILON = 1e-6
DEFAULT_ALPHA = 0.01

METHODS = ("viterbi", "posterior")


class HmmError(ValueError):
    pass


class AlphabetError(HmmError):
    """A label outside the declared state or observation alphabet."""


class DecodeInfeasibleError(HmmError):
    """No hidden state can emit some observation."""


@dataclass(frozen=True)
class HmmModel:
    """Trained model: row-stochastic transition and emission matrices, an
    initial distribution, and optional boolean mask of forbidden
    transitions. Treated as immutable after construction."""

    states: tuple
    observations: tuple
    transition: np.ndarray
    emission: np.ndarray
    initial: np.ndarray
    mask: np.ndarray | None = None
    smoothing_alpha: float = 0.0

    def state_index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def observation_index(self) -> dict:
        return {o: i for i, o in enumerate(self.observations)}


def _distribute(raw: np.ndarray, mask_row: np.ndarray | None) -> np.ndarray:
    """Turn non-negative weights into a stochastic row. Masked cells are
    pinned to MASK_EPSILON and the remaining mass is shared by the allowed
    cells in proportion to their weights (uniformly when all weights are
    zero), so masked probabilities never exceed MASK_EPSILON."""
    n = raw.shape[0]
    if mask_row is None:
        mask_row = np.zeros(n, dtype=bool)
    allowed = ~mask_row
    n_masked = int(mask_row.sum())
    if n_masked >= n:
        raise HmmError("a row has every transition masked")
    budget = 1.0 - MASK_EPSILON * n_masked
    out = np.empty(n, dtype=float)
    out[mask_row] = MASK_EPSILON
    total = raw[allowed].sum()
    if total <= 0.0:
        out[allowed] = budget / allowed.sum()
    else:
        out[allowed] = raw[allowed] / total * budget
    return out


def estimate(states, observations, sequences, mask: np.ndarray | None = None,
             alpha: float = DEFAULT_ALPHA) -> HmmModel:
    """Maximum-likelihood estimation with additive smoothing from paired
    (hidden labels, observed labels) sequences. The optional boolean mask
    forbids transitions; forbidden cells end up with probability exactly
    MASK_EPSILON regardless of their counts.
    """
    states = tuple(states)
    observations = tuple(observations)
    if not sequences:
        raise HmmError("empty training set")
    if alpha < 0:
        raise HmmError(f"smoothing alpha must be non-negative: {alpha}")
    s_index = {s: i for i, s in enumerate(states)}
    o_index = {o: i for i, o in enumerate(observations)}
    S, O = len(states), len(observations)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (S, S):
            raise HmmError(f"mask shape {mask.shape} does not match {S} states")
    trans_counts = np.zeros((S, S), dtype=float)
    emit_counts = np.zeros((S, O), dtype=float)
    init_counts = np.zeros(S, dtype=float)
    for hidden, observed in sequences:
        if len(hidden) != len(observed):
            raise HmmError(
                f"paired sequence lengths differ: {len(hidden)} vs {len(observed)}")
        if not hidden:
            raise HmmError("empty sequence in training set")
        try:
            h_idx = [s_index[h] for h in hidden]
        except KeyError as exc:
            raise AlphabetError(f"hidden label not in alphabet: {exc.args[0]!r}")
        try:
            o_idx = [o_index[o] for o in observed]
        except KeyError as exc:
            raise AlphabetError(f"observed label not in alphabet: {exc.args[0]!r}")
        init_counts[h_idx[0]] += 1
        for a, b in zip(h_idx, h_idx[1:]):
            trans_counts[a, b] += 1
        for h, o in zip(h_idx, o_idx):
            emit_counts[h, o] += 1
    transition = np.vstack([
        _distribute(trans_counts[i] + alpha, None if mask is None else mask[i])
        for i in range(S)])
    emission = np.vstack([
        _distribute(emit_counts[i] + alpha, None) for i in range(S)])
    initial = _distribute(init_counts + alpha, None)
    return HmmModel(states, observations, transition, emission, initial,
                    mask=mask, smoothing_alpha=alpha)


def _observation_indices(model: HmmModel, observed) -> list[int]:
    o_index = model.observation_index()
    try:
        return [o_index[o] for o in observed]
    except KeyError as exc:
        raise AlphabetError(f"observation not in alphabet: {exc.args[0]!r}")


def _log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


def viterbi(model: HmmModel, observed) -> list:
    """Most probable hidden label sequence, ties broken toward the lowest
    state index at every backtrack step."""
    if len(observed) == 0:
        raise HmmError("empty observation sequence")
    obs = _observation_indices(model, observed)
    log_t = _log(model.transition)
    log_e = _log(model.emission)
    n = len(obs)
    S = len(model.states)
    score = _log(model.initial) + log_e[:, obs[0]]
    back = np.zeros((n, S), dtype=int)
    for t in range(1, n):
        candidate = score[:, None] + log_t
        back[t] = np.argmax(candidate, axis=0)
        score = candidate[back[t], np.arange(S)] + log_e[:, obs[t]]
        if np.all(np.isneginf(score)):
            raise DecodeInfeasibleError(
                f"no hidden state can generate observation at position {t}")
    if np.all(np.isneginf(score)):
        raise DecodeInfeasibleError("no hidden state can generate the sequence")
    path = [int(np.argmax(score))]
    for t in range(n - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return [model.states[i] for i in path]


def sequence_log_probability(model: HmmModel, hidden, observed) -> float:
    """Joint log probability of a hidden/observed label pair."""
    s_index = model.state_index()
    obs = _observation_indices(model, observed)
    hid = [s_index[h] for h in hidden]
    log_t = _log(model.transition)
    log_e = _log(model.emission)
    total = float(_log(model.initial)[hid[0]] + log_e[hid[0], obs[0]])
    for t in range(1, len(hid)):
        total += float(log_t[hid[t - 1], hid[t]] + log_e[hid[t], obs[t]])
    return total


def posterior_decode(model: HmmModel, observed) -> tuple[list, np.ndarray]:
    """Per-position argmax of the marginal posterior, plus the full n-by-S
    marginal matrix. Uses the scaled forward-backward recursion."""
    if len(observed) == 0:
        raise HmmError("empty observation sequence")
    obs = _observation_indices(model, observed)
    n = len(obs)
    S = len(model.states)
    alpha = np.zeros((n, S))
    scale = np.zeros(n)
    alpha[0] = model.initial * model.emission[:, obs[0]]
    scale[0] = alpha[0].sum()
    if scale[0] == 0.0:
        raise DecodeInfeasibleError("no hidden state can generate observation 0")
    alpha[0] /= scale[0]
    for t in range(1, n):
        alpha[t] = (alpha[t - 1] @ model.transition) * model.emission[:, obs[t]]
        scale[t] = alpha[t].sum()
        if scale[t] == 0.0:
            raise DecodeInfeasibleError(
                f"no hidden state can generate observation at position {t}")
        alpha[t] /= scale[t]
    beta = np.zeros((n, S))
    beta[n - 1] = 1.0
    for t in range(n - 2, -1, -1):
        beta[t] = (model.transition @ (beta[t + 1] * model.emission[:, obs[t + 1]]))
        beta[t] /= scale[t + 1]
    marginals = alpha * beta
    marginals /= marginals.sum(axis=1, keepdims=True)
    labels = [model.states[int(np.argmax(row))] for row in marginals]
    return labels, marginals


def decode(model: HmmModel, observed, method: str = "viterbi") -> list:
    if method == "viterbi":
        return viterbi(model, observed)
    if method == "posterior":
        return posterior_decode(model, observed)[0]
    raise HmmError(f"unknown decode method: {method!r}")


def masked_pairs(model: HmmModel, hidden) -> list[tuple[int, object, object]]:
    """Consecutive pairs in a decoded sequence that cross a masked
    transition. Posterior decoding can produce these; they are reported,
    never repaired."""
    if model.mask is None:
        return []
    s_index = model.state_index()
    out = []
    for t in range(1, len(hidden)):
        if model.mask[s_index[hidden[t - 1]], s_index[hidden[t]]]:
            out.append((t, hidden[t - 1], hidden[t]))
    return out


def build_phrase_mask(chord_labels) -> np.ndarray:
    """Boolean matrix forbidding retrogressive moves between the given
    Roman-numeral labels."""
    chords = [RomanChord.from_string(label) for label in chord_labels]
    n = len(chords)
    mask = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(chords):
        for j, b in enumerate(chords):
            mask[i, j] = is_retrogressive(a, b)
    return mask


def decode_key_chord(key_model: HmmModel, chord_model: HmmModel,
                     melody: MelodyLine, method: str = "viterbi") -> ProgressionAnnotation:
    """Two-stage decode: keys from the melody pitch classes, then chords
    from the melody transposed against the decoded keys."""
    if method not in METHODS:
        raise HmmError(f"unknown decode method: {method!r}")
    melody_pcs = [p.pitch_class for p in melody.representatives()]
    key_labels = decode(key_model, melody_pcs, method)
    keys = tuple(KeyLabel.from_string(k) for k in key_labels)
    chords = decode_chords_given_keys(chord_model, melody, keys, method)
    return ProgressionAnnotation(keys, tuple(chords))


def decode_chords_given_keys(chord_model: HmmModel, melody: MelodyLine,
                             keys, method: str = "viterbi") -> list[RomanChord]:
    """Chord stage alone, with the key sequence supplied by the caller."""
    deltas = [transposed_degree(p, k)
              for p, k in zip(melody.representatives(), keys)]
    chord_labels = decode(chord_model, deltas, method)
    return [RomanChord.from_string(c) for c in chord_labels]


def train_key_chord_models(corpus, mask_enabled: bool | None = None,
                           alpha: float = DEFAULT_ALPHA) -> "ModelBundle":
    """Estimate the paired key and chord models from an annotated corpus.

    The retrogression mask defaults to on for chorale corpora and off for
    rock. Key states are the full 24-key alphabet; chord states are the
    labels observed in the corpus, sorted.
    """
    from .corpus import chord_observation_sequences, key_observation_sequences

    if mask_enabled is None:
        mask_enabled = corpus.genre == "chorale"
    key_states = tuple(k.to_string() for k in all_keys())
    pitch_classes = tuple(range(12))
    key_sequences = key_observation_sequences(corpus)
    chord_sequences = chord_observation_sequences(corpus)
    chord_states = tuple(sorted({label for hidden, _ in chord_sequences
                                 for label in hidden}))
    mask = build_phrase_mask(chord_states) if mask_enabled else None
    key_model = estimate(key_states, pitch_classes, key_sequences, alpha=alpha)
    chord_model = estimate(chord_states, pitch_classes, chord_sequences,
                           mask=mask, alpha=alpha)
    counts = Counter(label for hidden, _ in chord_sequences for label in hidden)
    modes = {ch.mode for ch in corpus.chorales}
    mode = modes.pop() if len(modes) == 1 else "mixed"
    return ModelBundle(genre=corpus.genre, mode=mode, key_model=key_model,
                       chord_model=chord_model, chord_counts=dict(counts))


@dataclass
class ModelBundle:
    """A trained key/chord model pair plus training metadata."""

    genre: str
    mode: str
    key_model: HmmModel
    chord_model: HmmModel
    chord_counts: dict
    ornament_rates: dict | None = None


def _model_to_dict(model: HmmModel) -> dict:
    return {
        "states": list(model.states),
        "observations": list(model.observations),
        "transition": model.transition.tolist(),
        "emission": model.emission.tolist(),
        "initial": model.initial.tolist(),
        "mask": None if model.mask is None else model.mask.astype(int).tolist(),
        "smoothing_alpha": model.smoothing_alpha,
    }


def _model_from_dict(doc: dict) -> HmmModel:
    mask = doc.get("mask")
    return HmmModel(
        states=tuple(doc["states"]),
        observations=tuple(doc["observations"]),
        transition=np.asarray(doc["transition"], dtype=float),
        emission=np.asarray(doc["emission"], dtype=float),
        initial=np.asarray(doc["initial"], dtype=float),
        mask=None if mask is None else np.asarray(mask, dtype=bool),
        smoothing_alpha=float(doc["smoothing_alpha"]),
    )


def save_bundle(bundle: ModelBundle, path: str | Path) -> Path:
    doc = {
        "format": "key-chord-models",
        "version": 1,
        "genre": bundle.genre,
        "mode": bundle.mode,
        "key_model": _model_to_dict(bundle.key_model),
        "chord_model": _model_to_dict(bundle.chord_model),
        "chord_counts": bundle.chord_counts,
        "ornament_rates": bundle.ornament_rates,
    }
    out = Path(path)
    out.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return out


def load_bundle(path: str | Path) -> ModelBundle:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "key-chord-models":
        raise HmmError(f"{path}: not a model file")
    return ModelBundle(
        genre=doc["genre"],
        mode=doc["mode"],
        key_model=_model_from_dict(doc["key_model"]),
        chord_model=_model_from_dict(doc["chord_model"]),
        chord_counts=dict(doc["chord_counts"]),
        ornament_rates=doc.get("ornament_rates"),
    )


def read_transition_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Labeled square matrix from a CSV file with a header row and a label
    column, as produced by the matrix export."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise HmmError(f"{path}: empty matrix file")
    labels = [cell.strip() for cell in rows[0][1:]]
    matrix = np.zeros((len(rows) - 1, len(labels)))
    row_labels = []
    for i, row in enumerate(rows[1:]):
        row_labels.append(row[0].strip())
        if len(row) - 1 != len(labels):
            raise HmmError(f"{path}: row {row[0]!r} has {len(row) - 1} cells,"
                           f" expected {len(labels)}")
        matrix[i] = [float(cell) for cell in row[1:]]
    if row_labels != labels:
        raise HmmError(f"{path}: row and column labels disagree")
    return labels, matrix


def apply_override(model: HmmModel, matrix_file: str | Path) -> HmmModel:
    """Replace the transition matrix with one loaded from a labeled CSV.

    Rows already summing to 1 (within 1e-9) are taken as-is; rows with sums
    in [0.5, 1.5] are renormalized; anything else is rejected, as are
    negative entries and label mismatches. The mask is not re-applied; an
    override is sovereign over the trained structure.
    """
    labels, matrix = read_transition_csv(matrix_file)
    expected = [str(s) for s in model.states]
    if labels != expected:
        raise HmmError(
            f"override labels do not match model states"
            f" ({len(labels)} labels vs {len(expected)} states)")
    for i, label in enumerate(labels):
        row = matrix[i]
        if np.any(row < 0):
            raise HmmError(f"override row {label!r} has negative entries")
        total = row.sum()
        if not 0.5 <= total <= 1.5:
            raise HmmError(
                f"override row {label!r} sums to {total:.6g}, outside [0.5, 1.5]")
        if abs(total - 1.0) > 1e-9:
            matrix[i] = row / total
    return HmmModel(model.states, model.observations, matrix, model.emission,
                    model.initial, mask=None,
                    smoothing_alpha=model.smoothing_alpha)
