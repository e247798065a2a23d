"""Command-line entry point: ``podcorpus <subcommand>``.

Exit status is 0 only when no episode failed in the stages that ran.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, PipelineConfig, load_config
from .errors import PodcorpusError
from .manifest import format_stats, read_manifest, stats
from .textnorm import TransliterationTable
from .tokenization import load_vocab

log = logging.getLogger("podcorpus")


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity < 0 else logging.DEBUG if verbosity > 0 else logging.INFO
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s level=%(levelname)s logger=%(name)s %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--jobs", type=int, help="worker threads over episodes")
    p.add_argument("--seed", type=int, help="train/test split seed")
    p.add_argument("--by-episode", action="store_true", default=None, help="split whole episodes")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("-q", "--quiet", action="store_true")


def _thresholds(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("filter thresholds")
    g.add_argument("--min-score", type=float)
    g.add_argument("--max-cer", type=float)
    g.add_argument("--max-wer", type=float)
    g.add_argument("--max-edge-cer", type=float)
    g.add_argument("--edge-len", type=int)
    g.add_argument("--min-duration", dest="min_duration_s", type=float)
    g.add_argument("--max-duration", dest="max_duration_s", type=float)


def _alignment(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window-tokens", type=int)
    p.add_argument("--pad", dest="pad_s", type=float, help="boundary padding in seconds")
    p.add_argument("--vocab-word-marker", help="e.g. ▁ for sentencepiece exports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="podcorpus", description="Build filtered ASR training manifests from long recordings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="split and normalize raw transcripts")
    p.add_argument("--transcripts-dir", type=Path)
    p.add_argument("--table", dest="transliteration_table", type=Path)
    p.add_argument("--out-dir", type=Path, required=True, help="sentence files directory")
    _common(p)

    p = sub.add_parser("align", help="align sentences to CTC logits, write candidates")
    p.add_argument("--logits-dir", type=Path)
    p.add_argument("--sentences-dir", type=Path, required=True)
    p.add_argument("--vocab", type=Path)
    p.add_argument("--out", type=Path, required=True, help="segments JSONL")
    _alignment(p)
    _common(p)

    p = sub.add_parser("filter", help="apply score / CER / WER / duration rules")
    p.add_argument("--segments", type=Path, required=True)
    p.add_argument("--hypotheses", dest="hypotheses_file", type=Path)
    p.add_argument("--out", type=Path, required=True, help="kept segments JSONL")
    p.add_argument("--report", type=Path, help="RunReport JSON (default: next to --out)")
    _thresholds(p)
    _common(p)

    p = sub.add_parser("emit", help="cut clips, split, write manifests and stats")
    p.add_argument("--kept", type=Path, required=True)
    p.add_argument("--audio-dir", type=Path)
    p.add_argument("--out-dir", type=Path)
    p.add_argument("--train-fraction", type=float)
    _common(p)

    p = sub.add_parser("run-all", help="normalize, align, filter and emit in one go")
    p.add_argument("--transcripts-dir", type=Path)
    p.add_argument("--table", dest="transliteration_table", type=Path)
    p.add_argument("--logits-dir", type=Path)
    p.add_argument("--audio-dir", type=Path)
    p.add_argument("--vocab", type=Path)
    p.add_argument("--hypotheses", dest="hypotheses_file", type=Path)
    p.add_argument("--out-dir", type=Path)
    p.add_argument("--train-fraction", type=float)
    _alignment(p)
    _thresholds(p)
    _common(p)

    p = sub.add_parser("stats", help="per-split clip counts and hours")
    p.add_argument("manifests", type=Path, nargs="+", help="manifest files; split name is the file stem")
    p.add_argument("--decimals", type=int, default=1)
    return parser


_CONFIG_KEYS = (
    "jobs", "seed", "by_episode", "min_score", "max_cer", "max_wer", "max_edge_cer",
    "edge_len", "min_duration_s", "max_duration_s", "window_tokens", "pad_s",
    "vocab_word_marker", "train_fraction", "transliteration_table", "transcripts_dir",
    "logits_dir", "audio_dir", "vocab", "hypotheses_file", "out_dir",
)


def _config(args: argparse.Namespace) -> PipelineConfig:
    overrides = {k: getattr(args, k) for k in _CONFIG_KEYS if hasattr(args, k)}
    return load_config(args.config, overrides)


def _require(value, flag: str):
    if value is None:
        raise ConfigError(f"{flag} is required (flag or config key)")
    return value


def _stats_name(path: Path) -> str:
    stem = path.stem
    return stem[: -len("_manifest")] if stem.endswith("_manifest") else stem


def _finish(results: list[pipeline.StageResult]) -> int:
    failed = [e for r in results for e in r.errors]
    for e in failed:
        print(f"error: episode {e.episode} ({e.stage}): {e.error}", file=sys.stderr)
    return 1 if failed else 0


def run(args: argparse.Namespace) -> int:
    if args.command == "stats":
        corpus = stats({_stats_name(p): read_manifest(p) for p in args.manifests})
        sys.stdout.write(format_stats(corpus, args.decimals))
        return 0

    cfg = _config(args)
    paths = cfg.paths
    if args.command == "normalize":
        table = TransliterationTable.from_file(paths.transliteration_table) if paths.transliteration_table else None
        res = pipeline.run_normalize(_require(paths.transcripts_dir, "--transcripts-dir"), table, args.out_dir, cfg.jobs)
        return _finish([res])
    if args.command == "align":
        vocab = load_vocab(_require(paths.vocab, "--vocab"), cfg.vocab_word_marker)
        res = pipeline.run_align(_require(paths.logits_dir, "--logits-dir"), args.sentences_dir, vocab, cfg, args.out)
        return _finish([res])
    if args.command == "filter":
        report = args.report or args.out.with_name("report.json")
        res, _ = pipeline.run_filter(args.segments, paths.hypotheses_file, cfg, args.out, report)
        return _finish([res])
    if args.command == "emit":
        res = pipeline.run_emit(
            args.kept, _require(paths.audio_dir, "--audio-dir"), _require(paths.out_dir, "--out-dir"), cfg
        )
        return _finish([res])
    if args.command == "run-all":
        return _finish(pipeline.run_all(cfg))
    raise AssertionError(args.command)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(-1 if getattr(args, "quiet", False) else getattr(args, "verbose", 0))
    try:
        return run(args)
    except (PodcorpusError, OSError) as exc:
        print(f"podcorpus: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
