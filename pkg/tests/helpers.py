"""Independent oracles and synthetic-corpus builders shared by the tests."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from podcorpus.audio_io import write_wav
from podcorpus.ctc_align import LogProbMatrix, write_ctcm
from podcorpus.textnorm import normalize

UK_LETTERS = "абвгґдеєжзиіїйклмнопрстуфхцчшщьюя"


def log_softmax(x: np.ndarray) -> np.ndarray:
    x = x - x.max(axis=1, keepdims=True)
    return x - np.log(np.exp(x).sum(axis=1, keepdims=True))


def path_score(lp: np.ndarray, tokens, blank: int, frames) -> float:
    """Score of one emission assignment; frames outside the emitted span are free."""
    s = 0.0
    for f, tok in zip(frames, tokens):
        s += float(lp[f, tok])
    for j in range(len(tokens) - 1):
        for t in range(frames[j] + 1, frames[j + 1]):
            s += max(float(lp[t, blank]), float(lp[t, tokens[j]]))
    return s


def brute_force_align(lp: np.ndarray, tokens, blank: int):
    """Enumerate every strictly increasing emission assignment.

    Returns ``(best_score, best_frames, gap_to_runner_up)``.
    """
    lp = np.asarray(lp, dtype=np.float64)
    scored = sorted(
        ((path_score(lp, tokens, blank, fr), fr) for fr in itertools.combinations(range(lp.shape[0]), len(tokens))),
        key=lambda x: -x[0],
    )
    gap = scored[0][0] - scored[1][0] if len(scored) > 1 else math.inf
    return scored[0][0], list(scored[0][1]), gap


def naive_edit_distance(a, b) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    if a[0] == b[0]:
        return naive_edit_distance(a[1:], b[1:])
    return 1 + min(
        naive_edit_distance(a[1:], b),
        naive_edit_distance(a, b[1:]),
        naive_edit_distance(a[1:], b[1:]),
    )


def write_vocab(path: Path, tokens: list[str], blank_id: int = 0) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"#blank_id={blank_id}\n")
        for i, tok in enumerate(tokens):
            fh.write(f"{i}\t{tok}\n")


SYNTH_VOCAB = ["<blk>", " ", "'"] + list(UK_LETTERS)

SENTENCE_POOL = [
    "Привіт, як справи сьогодні?",
    "Сьогодні на вулиці 21 градус тепла.",
    "Ми говоримо про нові технології!",
    "Це дуже цікава і жива розмова…",
    "Дякуємо всім за увагу та до зустрічі.",
    "Наш гість розповість про книжки.",
    "Слухайте подкаст щотижня на радіо.",
    "Чому кіно таке важливе для нас?",
]


@dataclass
class SynthEpisode:
    episode_id: str
    sentences: list[str]
    normalized: list[str]
    # (first_frame, last_frame) of each sentence's emissions
    truth: list[tuple[int, int]]
    frames: int


def synth_episode_matrix(
    normalized: list[str],
    vocab: list[str],
    *,
    stride: int = 3,
    preamble: int = 10,
    gap: int = 15,
    trailing: int = 10,
    peak_logp: float = -0.05,
    frame_duration_s: float = 0.08,
) -> tuple[LogProbMatrix, list[tuple[int, int]]]:
    """One token every ``stride`` frames; every other frame peaks on blank."""
    index = {tok: i for i, tok in enumerate(vocab)}
    V = len(vocab)
    emissions: list[int] = []
    truth = []
    t = preamble
    for k, text in enumerate(normalized):
        if k:
            t += gap
        first = t
        for ch in text:
            emissions.append((t, index[ch]))
            last = t
            t += stride
        truth.append((first, last))
        t = last + 1
    T = t + trailing
    rest = math.log((1.0 - math.exp(peak_logp)) / (V - 1))
    values = np.full((T, V), rest)
    values[:, 0] = peak_logp
    for f, tok in emissions:
        values[f, 0] = rest
        values[f, tok] = peak_logp
    return LogProbMatrix(values, 0, frame_duration_s), truth


def build_synthetic_corpus(root: Path, n_episodes: int = 1, sentences_per_episode: int = 5) -> list[SynthEpisode]:
    """Write transcripts, CTCM logits, WAV audio, vocab and exact hypotheses."""
    for sub in ("transcripts", "logits", "audio"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    write_vocab(root / "vocab.txt", SYNTH_VOCAB)
    episodes = []
    hyps = {}
    rng = np.random.default_rng(1234)
    for e in range(n_episodes):
        ep = f"ep{e:03d}"
        picks = [SENTENCE_POOL[(e + k) % len(SENTENCE_POOL)] for k in range(sentences_per_episode)]
        norm = [normalize(s) for s in picks]
        m, truth = synth_episode_matrix(norm, SYNTH_VOCAB)
        (root / "transcripts" / f"{ep}.txt").write_text(" ".join(picks), encoding="utf-8")
        write_ctcm(m, root / "logits" / f"{ep}.ctcm")
        n_samples = round(m.frames * 0.08 * 16000)
        pcm = rng.integers(-2000, 2000, size=n_samples, dtype=np.int16).astype("<i2").tobytes()
        write_wav(root / "audio" / f"{ep}.wav", pcm)
        for text, (a, b) in zip(norm, truth):
            hyps[f"{ep}_{a}_{b}"] = text
        episodes.append(SynthEpisode(ep, picks, norm, truth, m.frames))
    with open(root / "hypotheses.jsonl", "w", encoding="utf-8") as fh:
        for key in sorted(hyps):
            fh.write(json.dumps({"segment_key": key, "pred_text": hyps[key]}, ensure_ascii=False) + "\n")
    return episodes


def run_all_args(root: Path, out: Path, *extra: str) -> list[str]:
    return [
        "run-all",
        "--transcripts-dir", str(root / "transcripts"),
        "--logits-dir", str(root / "logits"),
        "--audio-dir", str(root / "audio"),
        "--vocab", str(root / "vocab.txt"),
        "--hypotheses", str(root / "hypotheses.jsonl"),
        "--out-dir", str(out),
        "-q",
        *extra,
    ]


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}
