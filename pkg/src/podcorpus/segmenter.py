"""Cut an aligned token stream into time-stamped sentence segments."""
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from .ctc_align import AlignmentResult, LogProbMatrix, SegmentScoreConfig, score_segment
from .errors import PodcorpusError

log = logging.getLogger(__name__)

DEFAULT_PAD_S = 0.1


class RangeOutOfBounds(PodcorpusError):
    pass


@dataclass(frozen=True)
class AlignedSegment:
    text: str
    raw_text: str
    start_frame: int
    end_frame: int
    start_s: float
    end_s: float
    score: float

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


def segment(
    result: AlignmentResult,
    sentence_token_ranges: Sequence[tuple[int, int]],
    m: LogProbMatrix,
    cfg: SegmentScoreConfig = SegmentScoreConfig(),
    pad_s: float = DEFAULT_PAD_S,
    texts: Sequence[tuple[str, str]] | None = None,
) -> list[AlignedSegment]:
    """One segment per non-empty token range.

    ``texts`` optionally gives ``(normalized, raw)`` per range. Boundaries are
    padded outward by ``pad_s``, clamped to the matrix duration and to the
    midpoint between neighbouring segments' emission times.
    """
    if pad_s < 0:
        raise ValueError(f"pad_s must be >= 0, got {pad_s}")
    if texts is not None and len(texts) != len(sentence_token_ranges):
        raise ValueError("texts and sentence_token_ranges differ in length")
    n_tokens = len(result.timings)
    prev_end = 0
    kept = []
    for i, (a, b) in enumerate(sentence_token_ranges):
        if a != prev_end or b < a or b > n_tokens:
            raise RangeOutOfBounds(
                f"range {i} = ({a}, {b}) does not continue a partition of {n_tokens} tokens"
            )
        prev_end = b
        if a == b:
            log.warning("sentence %d has no tokens; dropped", i)
            continue
        kept.append(i)

    fd = m.frame_duration_s
    total_s = m.frames * fd
    starts = [result.timings[sentence_token_ranges[i][0]].frame for i in kept]
    ends = [result.timings[sentence_token_ranges[i][1] - 1].frame for i in kept]
    segments = []
    for k, i in enumerate(kept):
        a, b = sentence_token_ranges[i]
        lo = max(0.0, starts[k] * fd - pad_s)
        hi = min(total_s, ends[k] * fd + pad_s)
        if k > 0:
            lo = max(lo, (ends[k - 1] * fd + starts[k] * fd) / 2)
        if k + 1 < len(kept):
            hi = min(hi, (ends[k] * fd + starts[k + 1] * fd) / 2)
        text, raw = texts[i] if texts is not None else ("", "")
        segments.append(
            AlignedSegment(
                text=text,
                raw_text=raw,
                start_frame=starts[k],
                end_frame=ends[k],
                start_s=lo,
                end_s=hi,
                score=score_segment(result.timings[a:b], cfg),
            )
        )
    return segments
