"""Viterbi forced alignment of a token sequence against a CTC matrix.

State ``j`` counts consumed tokens. Per frame the path either stays in ``j``
(emitting blank or repeating token ``j``, whichever scores higher) or
advances to ``j + 1`` by emitting that token. Frames before the first
emission and after the last are free, so text can sit anywhere in long audio.
Ties go to "stay".
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import PodcorpusError
from ..tokenization import TokenSequence
from .matrix import LogProbMatrix


class AlignmentError(PodcorpusError):
    pass


class InfeasibleAlignment(AlignmentError):
    pass


class DimensionMismatch(AlignmentError):
    pass


@dataclass(frozen=True)
class CharTiming:
    token_index: int
    frame: int
    token_logprob: float


@dataclass(frozen=True)
class AlignmentResult:
    timings: tuple[CharTiming, ...]
    path_logprob: float
    trailing_start_frame: int

    @property
    def frames(self) -> list[int]:
        return [t.frame for t in self.timings]


def align(
    m: LogProbMatrix,
    tokens: TokenSequence | Sequence[int],
    backend: str | None = None,
) -> AlignmentResult:
    """Best monotonic emission path for ``tokens`` through ``m``.

    ``backend`` forces ``"native"`` or ``"python"`` kernels; default is
    whichever :mod:`podcorpus.kernels` selected at import.
    """
    ids = tokens.ids if isinstance(tokens, TokenSequence) else tokens
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1 or ids.size == 0:
        raise AlignmentError("token sequence must be a non-empty 1-D sequence")
    if ids.min() < 0 or ids.max() >= m.vocab_size:
        bad = int(ids[(ids < 0) | (ids >= m.vocab_size)][0])
        raise DimensionMismatch(f"token id {bad} outside vocabulary of size {m.vocab_size}")
    if (ids == m.blank_id).any():
        raise AlignmentError(f"token sequence contains the blank id {m.blank_id}")
    if m.frames < ids.size:
        raise InfeasibleAlignment(f"{ids.size} tokens cannot fit in {m.frames} frames")

    kernel = kernels if backend is None else kernels.get_backend(backend)
    frames, score, end_frame = kernel.viterbi_trellis(m.values, ids, m.blank_id)
    if end_frame < 0 or not np.isfinite(score) or (frames < 0).any():
        raise InfeasibleAlignment("no finite-scoring path through the matrix")

    logps = m.values[frames, ids].astype(np.float64)
    timings = tuple(
        CharTiming(i, int(f), float(lp)) for i, (f, lp) in enumerate(zip(frames, logps))
    )
    return AlignmentResult(timings, float(score), int(end_frame) + 1)
