from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import PodcorpusError
from .align import CharTiming


class EmptySegment(PodcorpusError):
    pass


@dataclass(frozen=True)
class SegmentScoreConfig:
    window_tokens: int = 8

    def __post_init__(self):
        if self.window_tokens < 1:
            raise ValueError(f"window_tokens must be >= 1, got {self.window_tokens}")


def score_segment(timings: Sequence[CharTiming], cfg: SegmentScoreConfig = SegmentScoreConfig()) -> float:
    """Worst sliding-window mean of token log-probabilities.

    The window is ``min(cfg.window_tokens, len(timings))`` tokens wide.
    """
    if not timings:
        raise EmptySegment("cannot score a segment without tokens")
    lp = np.fromiter((t.token_logprob for t in timings), dtype=np.float64, count=len(timings))
    w = min(cfg.window_tokens, lp.size)
    csum = np.concatenate(([0.0], np.cumsum(lp)))
    means = (csum[w:] - csum[:-w]) / w
    return min(float(means.min()), 0.0)
