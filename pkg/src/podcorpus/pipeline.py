"""The four pipeline stages and the files they exchange.

Layout produced by ``run_all`` under ``out_dir``::

    sentences/<episode>.jsonl   {"raw_text", "text"} per sentence
    sentences/_meta.json        episodes seen and errors so far
    segments.jsonl              one candidate per line (see SEGMENT_FIELDS)
    segments.meta.json
    kept.jsonl                  candidates that passed, with pred_text/wer/cer
    report.json                 RunReport
    clips/<segment_key>.wav
    train_manifest.jsonl, test_manifest.jsonl, stats.txt, emit_report.json

Every stage processes episodes independently on a thread pool and writes its
outputs sorted by episode id, so results do not depend on ``jobs``.
"""
from __future__ import annotations

import json
import logging
import math
from collections import Counter
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import audio_io
from .config import PipelineConfig
from .ctc_align import LogProbMatrix, align, read_ctcm, stitch
from .errors import PodcorpusError
from .filtering import DropReason, Hypothesis, apply_filter, load_hypotheses
from .manifest import Datapoint, format_stats, split, stats, write_manifest
from .segmenter import AlignedSegment, segment
from .textnorm import DigitRunTooLarge, TransliterationTable, default_table, normalize, split_sentences
from .tokenization import UntokenizableInput, Vocab, load_vocab, tokenize

log = logging.getLogger(__name__)

SENTENCES_META = "_meta.json"
SEGMENT_FIELDS = (
    "segment_key", "episode_id", "text", "raw_text",
    "start_frame", "end_frame", "start_s", "end_s", "score",
)
KEPT_EXTRA_FIELDS = ("pred_text", "wer", "cer")


@dataclass
class EpisodeError:
    episode: str
    stage: str
    error: str

    def to_json(self) -> dict:
        return {"episode": self.episode, "stage": self.stage, "error": self.error}


@dataclass
class StageResult:
    episodes: list[str] = field(default_factory=list)
    errors: list[EpisodeError] = field(default_factory=list)
    upstream_errors: list[EpisodeError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def segment_key(episode_id: str, start_frame: int, end_frame: int) -> str:
    return f"{episode_id}_{start_frame}_{end_frame}"


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_jsonl(rows: Iterable[dict], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, allow_nan=False))
            fh.write("\n")


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _read_meta(path: Path) -> tuple[list[str], list[EpisodeError]]:
    if not path.exists():
        return [], []
    meta = json.loads(path.read_text(encoding="utf-8"))
    return list(meta["episodes"]), [EpisodeError(**e) for e in meta["errors"]]


def _write_meta(path: Path, episodes: list[str], errors: list[EpisodeError]) -> None:
    _dump_json({"episodes": sorted(episodes), "errors": [e.to_json() for e in errors]}, path)


def _map(fn: Callable, items: list, jobs: int) -> list:
    """``fn`` over ``items`` in order; exceptions are returned, not raised."""

    def guarded(item):
        try:
            return fn(item)
        except (PodcorpusError, OSError, ValueError) as exc:
            return exc

    if jobs <= 1 or len(items) <= 1:
        return [guarded(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(guarded, items))


def _ids(directory: Path, pattern: str) -> dict[str, Path]:
    return {p.stem: p for p in sorted(directory.glob(pattern)) if not p.name.startswith("_")}


# -- normalize ---------------------------------------------------------------


def normalize_episode(raw: str, table: TransliterationTable, episode: str = "") -> list[dict]:
    rows = []
    for sentence in split_sentences(raw):
        try:
            text = normalize(sentence, table)
        except DigitRunTooLarge as exc:
            log.warning("event=sentence_dropped episode=%s reason=%r", episode, str(exc))
            text = ""
        rows.append({"raw_text": sentence, "text": text})
    return rows


def run_normalize(transcripts_dir: Path, table: TransliterationTable | None, out_dir: Path, jobs: int = 1) -> StageResult:
    table = table or default_table()
    out_dir.mkdir(parents=True, exist_ok=True)
    sources = _ids(transcripts_dir, "*.txt")
    ids = sorted(sources)

    def work(ep: str) -> int:
        raw = sources[ep].read_bytes().decode("utf-8")
        rows = normalize_episode(raw, table, ep)
        _write_jsonl(rows, out_dir / f"{ep}.jsonl")
        return len(rows)

    result = StageResult(episodes=ids)
    for ep, outcome in zip(ids, _map(work, ids, jobs)):
        if isinstance(outcome, Exception):
            result.errors.append(EpisodeError(ep, "normalize", f"{type(outcome).__name__}: {outcome}"))
            log.error("event=episode_failed stage=normalize episode=%s error=%r", ep, str(outcome))
        else:
            log.info("event=episode_done stage=normalize episode=%s sentences=%d", ep, outcome)
    _write_meta(out_dir / SENTENCES_META, ids, result.errors)
    return result


# -- align -------------------------------------------------------------------


def load_episode_matrix(logits_dir: Path, episode: str) -> LogProbMatrix:
    """``<episode>.ctcm``, or every ``*.ctcm`` in ``<episode>/`` stitched by name."""
    single = logits_dir / f"{episode}.ctcm"
    if single.exists():
        return read_ctcm(single)
    parts = sorted((logits_dir / episode).glob("*.ctcm"))
    if not parts:
        raise FileNotFoundError(f"no logits for episode {episode} in {logits_dir}")
    return stitch([read_ctcm(p) for p in parts])


def _logit_ids(logits_dir: Path) -> set[str]:
    ids = {p.stem for p in logits_dir.glob("*.ctcm")}
    ids.update(p.name for p in logits_dir.iterdir() if p.is_dir() and any(p.glob("*.ctcm")))
    return ids


def align_episode(
    episode: str,
    sentences: list[dict],
    m: LogProbMatrix,
    vocab: Vocab,
    cfg: PipelineConfig,
) -> list[AlignedSegment]:
    if vocab.blank_id != m.blank_id:
        raise PodcorpusError(f"vocab blank id {vocab.blank_id} != matrix blank id {m.blank_id}")
    ids: list[int] = []
    ranges: list[tuple[int, int]] = []
    texts: list[tuple[str, str]] = []
    for i, row in enumerate(sentences):
        start = len(ids)
        try:
            ids.extend(tokenize(row["text"], vocab).ids)
        except UntokenizableInput as exc:
            log.warning("event=sentence_dropped episode=%s sentence=%d reason=%r", episode, i, str(exc))
        ranges.append((start, len(ids)))
        texts.append((row["text"], row["raw_text"]))
    if not ids:
        return []
    result = align(m, ids)
    return segment(result, ranges, m, cfg.scoring, cfg.pad_s, texts)


def segment_row(episode: str, seg: AlignedSegment) -> dict:
    return {
        "segment_key": segment_key(episode, seg.start_frame, seg.end_frame),
        "episode_id": episode,
        "text": seg.text,
        "raw_text": seg.raw_text,
        "start_frame": seg.start_frame,
        "end_frame": seg.end_frame,
        "start_s": seg.start_s,
        "end_s": seg.end_s,
        "score": seg.score + 0.0,
    }


def row_segment(row: dict) -> AlignedSegment:
    return AlignedSegment(
        text=row["text"],
        raw_text=row["raw_text"],
        start_frame=row["start_frame"],
        end_frame=row["end_frame"],
        start_s=row["start_s"],
        end_s=row["end_s"],
        score=row["score"],
    )


def run_align(
    logits_dir: Path,
    sentences_dir: Path,
    vocab: Vocab,
    cfg: PipelineConfig,
    out_path: Path,
) -> StageResult:
    _, upstream = _read_meta(sentences_dir / SENTENCES_META)
    sentence_files = _ids(sentences_dir, "*.jsonl")
    logit_ids = _logit_ids(logits_dir) if logits_dir.is_dir() else set()
    ids = sorted(set(sentence_files) | logit_ids)
    failed_upstream = {e.episode for e in upstream}

    def work(ep: str) -> list[dict]:
        if ep not in sentence_files:
            raise FileNotFoundError(f"no sentence file for episode {ep}")
        if ep not in logit_ids:
            raise FileNotFoundError(f"no logits for episode {ep}")
        sentences = _read_jsonl(sentence_files[ep])
        segs = align_episode(ep, sentences, load_episode_matrix(logits_dir, ep), vocab, cfg) if sentences else []
        return [segment_row(ep, s) for s in segs]

    todo = [ep for ep in ids if ep not in failed_upstream]
    result = StageResult(episodes=todo, upstream_errors=upstream)
    rows: list[dict] = []
    for ep, outcome in zip(todo, _map(work, todo, cfg.jobs)):
        if isinstance(outcome, Exception):
            result.errors.append(EpisodeError(ep, "align", f"{type(outcome).__name__}: {outcome}"))
            log.error("event=episode_failed stage=align episode=%s error=%r", ep, str(outcome))
            continue
        log.info("event=episode_done stage=align episode=%s candidates=%d", ep, len(outcome))
        rows.extend(outcome)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _write_jsonl(rows, out_path)
    ok = [ep for ep in todo if ep not in {e.episode for e in result.errors}]
    _write_meta(meta_path(out_path), ok, upstream + result.errors)
    return result


def meta_path(segments_path: Path) -> Path:
    return segments_path.with_name(segments_path.stem + ".meta.json")


# -- filter ------------------------------------------------------------------


@dataclass
class EpisodeReport:
    candidates: int = 0
    kept: int = 0
    drop_reasons: Counter = field(default_factory=Counter)

    @property
    def dropped(self) -> int:
        return self.candidates - self.kept

    def to_json(self) -> dict:
        return {
            "candidates": self.candidates,
            "kept": self.kept,
            "dropped": self.dropped,
            "drop_reasons": {r.value: self.drop_reasons[r.value] for r in DropReason if self.drop_reasons[r.value]},
        }


@dataclass
class RunReport:
    episodes: dict[str, EpisodeReport] = field(default_factory=dict)
    kept_hours: float = 0.0
    errors: list[EpisodeError] = field(default_factory=list)

    def histogram(self) -> Counter:
        total = Counter()
        for rep in self.episodes.values():
            total.update(rep.drop_reasons)
        return total

    def to_json(self) -> dict:
        return {
            "episodes": {ep: self.episodes[ep].to_json() for ep in sorted(self.episodes)},
            "totals": {
                "candidates": sum(r.candidates for r in self.episodes.values()),
                "kept": sum(r.kept for r in self.episodes.values()),
                "kept_hours": self.kept_hours,
                "drop_reasons": {r.value: self.histogram()[r.value] for r in DropReason if self.histogram()[r.value]},
            },
            "errors": [e.to_json() for e in self.errors],
        }


def filter_segments(
    rows: list[dict], hyps: dict[str, Hypothesis], cfg: PipelineConfig, episodes: Iterable[str] = ()
) -> tuple[list[dict], RunReport]:
    report = RunReport(episodes={ep: EpisodeReport() for ep in episodes})
    kept = []
    durations = []
    for row in rows:
        seg = row_segment(row)
        verdict = apply_filter(seg, hyps.get(row["segment_key"]), cfg.filter)
        rep = report.episodes.setdefault(row["episode_id"], EpisodeReport())
        rep.candidates += 1
        if verdict.kept:
            rep.kept += 1
            durations.append(seg.duration_s)
            kept.append(
                {
                    **row,
                    "pred_text": hyps[row["segment_key"]].pred_text,
                    "wer": verdict.rates.wer,
                    "cer": verdict.rates.cer,
                }
            )
        else:
            rep.drop_reasons.update(r.value for r in verdict.reasons)
    report.kept_hours = math.fsum(durations) / 3600.0
    return kept, report


def run_filter(
    segments_path: Path,
    hypotheses_path: Path | None,
    cfg: PipelineConfig,
    kept_path: Path,
    report_path: Path,
) -> tuple[StageResult, RunReport]:
    episodes, upstream = _read_meta(meta_path(segments_path))
    rows = _read_jsonl(segments_path)
    if hypotheses_path is not None and hypotheses_path.exists():
        hyps = load_hypotheses(hypotheses_path)
    else:
        log.warning("event=no_hypotheses path=%s", hypotheses_path)
        hyps = {}
    kept, report = filter_segments(rows, hyps, cfg, episodes)
    report.errors = list(upstream)
    kept_path.parent.mkdir(parents=True, exist_ok=True)
    _write_jsonl(kept, kept_path)
    _dump_json(report.to_json(), report_path)
    totals = report.to_json()["totals"]
    log.info("event=filter_done candidates=%d kept=%d", totals["candidates"], totals["kept"])
    return StageResult(episodes=sorted(report.episodes), upstream_errors=upstream), report


# -- emit --------------------------------------------------------------------


CLIPS_DIR = "clips"
TRAIN_MANIFEST = "train_manifest.jsonl"
TEST_MANIFEST = "test_manifest.jsonl"


def cut_segment_clips(ep: audio_io.Episode, rows: list[dict], clips_dir: Path) -> list[tuple[dict, audio_io.ClipInfo]]:
    out = []
    for row in rows:
        end_s = min(row["end_s"], ep.duration_s)
        clip = audio_io.cut_clip(ep, row["start_s"], end_s, clips_dir / f"{row['segment_key']}.wav")
        out.append((row, clip))
    return out


def _group(rows: list[dict]) -> dict[str, list[dict]]:
    groups: dict[str, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["episode_id"], []).append(row)
    return groups


def run_emit(kept_path: Path, audio_dir: Path, out_dir: Path, cfg: PipelineConfig) -> StageResult:
    rows = _read_jsonl(kept_path)
    by_episode = _group(rows)
    ids = sorted(by_episode)
    clips_dir = out_dir / CLIPS_DIR
    clips_dir.mkdir(parents=True, exist_ok=True)

    def work(ep_id: str) -> list[Datapoint]:
        ep = audio_io.open_episode(audio_dir / f"{ep_id}.wav", ep_id)
        records = []
        for row, clip in cut_segment_clips(ep, by_episode[ep_id], clips_dir):
            records.append(
                Datapoint(
                    audio_filepath=clip.path.relative_to(out_dir).as_posix(),
                    duration=clip.duration_s,
                    text=row["text"],
                    text_no_processing=row["raw_text"],
                    text_normalized=row["text"],
                    score=row["score"],
                    pred_text=row["pred_text"],
                    wer=row["wer"],
                    cer=row["cer"],
                )
            )
        return records

    result = StageResult(episodes=ids)
    records: list[Datapoint] = []
    for ep_id, outcome in zip(ids, _map(work, ids, cfg.jobs)):
        if isinstance(outcome, Exception):
            result.errors.append(EpisodeError(ep_id, "emit", f"{type(outcome).__name__}: {outcome}"))
            log.error("event=episode_failed stage=emit episode=%s error=%r", ep_id, str(outcome))
            continue
        records.extend(outcome)
    records.sort(key=lambda dp: dp.audio_filepath)
    if records:
        train, test = split(records, cfg.split)
    else:
        log.warning("event=empty_corpus stage=emit")
        train, test = [], []
    write_manifest(train, out_dir / TRAIN_MANIFEST)
    write_manifest(test, out_dir / TEST_MANIFEST)
    corpus = stats({"train": train, "test": test})
    (out_dir / "stats.txt").write_text(format_stats(corpus, decimals=3), encoding="utf-8")
    _dump_json(
        {
            "stats": {k: {"count": v.count, "total_duration_hours": v.total_duration_hours} for k, v in corpus.items()},
            "errors": [e.to_json() for e in result.errors],
        },
        out_dir / "emit_report.json",
    )
    log.info("event=emit_done train=%d test=%d", len(train), len(test))
    return result


# -- run-all -----------------------------------------------------------------


def run_all(cfg: PipelineConfig) -> list[StageResult]:
    p = cfg.paths
    missing = [name for name in ("vocab", "logits_dir", "audio_dir", "transcripts_dir", "out_dir") if getattr(p, name) is None]
    if missing:
        raise PodcorpusError(f"run-all needs paths: {', '.join(missing)}")
    out = p.out_dir
    table = TransliterationTable.from_file(p.transliteration_table) if p.transliteration_table else None
    vocab = load_vocab(p.vocab, cfg.vocab_word_marker)
    results = [run_normalize(p.transcripts_dir, table, out / "sentences", cfg.jobs)]
    results.append(run_align(p.logits_dir, out / "sentences", vocab, cfg, out / "segments.jsonl"))
    results.append(run_filter(out / "segments.jsonl", p.hypotheses_file, cfg, out / "kept.jsonl", out / "report.json")[0])
    results.append(run_emit(out / "kept.jsonl", p.audio_dir, out, cfg))
    return results
