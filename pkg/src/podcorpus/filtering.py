"""Keep/drop verdicts for segment candidates."""
from __future__ import annotations

import enum
import json
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path

from .errors import PodcorpusError
from .metrics import ErrorRates, error_rates
from .segmenter import AlignedSegment


class DropReason(str, enum.Enum):
    LOW_SCORE = "LowScore"
    HIGH_CER = "HighCer"
    HIGH_WER = "HighWer"
    HIGH_EDGE_CER = "HighEdgeCer"
    TOO_SHORT = "TooShort"
    TOO_LONG = "TooLong"
    MISSING_HYPOTHESIS = "MissingHypothesis"


class HypothesisFileError(PodcorpusError):
    pass


@dataclass(frozen=True)
class FilterConfig:
    min_score: float = -2.0
    max_cer: float = 0.30
    max_wer: float = 0.75
    max_edge_cer: float = 0.60
    edge_len: int = 5
    min_duration_s: float = 1.0
    max_duration_s: float = 20.0

    def __post_init__(self):
        if not self.min_duration_s < self.max_duration_s:
            raise ValueError("min_duration_s must be < max_duration_s")
        if min(self.max_cer, self.max_wer, self.max_edge_cer) < 0:
            raise ValueError("error-rate thresholds must be >= 0")
        if self.edge_len < 1:
            raise ValueError("edge_len must be >= 1")


@dataclass(frozen=True)
class Hypothesis:
    segment_key: str
    pred_text: str


@dataclass(frozen=True)
class FilterVerdict:
    kept: bool
    reasons: tuple[DropReason, ...]
    rates: ErrorRates | None = None


def apply_filter(
    seg: AlignedSegment, hyp: Hypothesis | None, cfg: FilterConfig = FilterConfig()
) -> FilterVerdict:
    """Evaluate every rule and report all violations.

    Score is kept at exactly ``min_score``; durations exactly at either
    limit are dropped.
    """
    reasons = []
    if seg.score < cfg.min_score:
        reasons.append(DropReason.LOW_SCORE)
    rates = None
    if hyp is None:
        reasons.append(DropReason.MISSING_HYPOTHESIS)
    else:
        rates = error_rates(seg.text, hyp.pred_text, cfg.edge_len)
        if rates.cer > cfg.max_cer:
            reasons.append(DropReason.HIGH_CER)
        if rates.wer > cfg.max_wer:
            reasons.append(DropReason.HIGH_WER)
        if rates.cer_edge > cfg.max_edge_cer:
            reasons.append(DropReason.HIGH_EDGE_CER)
    duration = seg.duration_s
    if duration <= cfg.min_duration_s:
        reasons.append(DropReason.TOO_SHORT)
    if duration >= cfg.max_duration_s:
        reasons.append(DropReason.TOO_LONG)
    reasons.sort(key=list(DropReason).index)
    return FilterVerdict(not reasons, tuple(reasons), rates)


def load_hypotheses(path: str | Path) -> dict[str, Hypothesis]:
    """Read a JSON-Lines file of ``{"segment_key", "pred_text"}`` objects."""
    out: dict[str, Hypothesis] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                key, text = obj["segment_key"], obj["pred_text"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise HypothesisFileError(f"{path}:{lineno}: {exc}") from None
            if not isinstance(key, str) or not isinstance(text, str):
                raise HypothesisFileError(f"{path}:{lineno}: fields must be strings")
            if key in out:
                raise HypothesisFileError(f"{path}:{lineno}: duplicate segment_key {key!r}")
            out[key] = Hypothesis(key, text)
    return out


def write_hypotheses(hyps: Mapping[str, str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key in sorted(hyps):
            fh.write(json.dumps({"segment_key": key, "pred_text": hyps[key]}, ensure_ascii=False))
            fh.write("\n")
