"""WER, CER and edge CER over Levenshtein distance.

Characters are Unicode scalar values and spaces count. Rates are fractions
(0.5 means 50 %) and may exceed 1.
"""
from __future__ import annotations

from collections.abc import Hashable, Sequence
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import PodcorpusError


class EmptyReference(PodcorpusError):
    pass


@dataclass(frozen=True)
class ErrorRates:
    wer: float
    cer: float
    cer_edge_head: float
    cer_edge_tail: float

    @property
    def cer_edge(self) -> float:
        return max(self.cer_edge_head, self.cer_edge_tail)


def edit_distance(a: Sequence[Hashable], b: Sequence[Hashable], backend: str | None = None) -> int:
    """Unit-cost insertions + deletions + substitutions turning ``a`` into ``b``."""
    kernel = kernels if backend is None else kernels.get_backend(backend)
    if kernel is kernels._python or (kernel is kernels and kernels.BACKEND == "python"):
        return kernel.levenshtein(a, b)
    codes: dict[Hashable, int] = {}
    ia = np.fromiter((codes.setdefault(x, len(codes)) for x in a), dtype=np.int64, count=len(a))
    ib = np.fromiter((codes.setdefault(x, len(codes)) for x in b), dtype=np.int64, count=len(b))
    return kernel.levenshtein(ia, ib)


def wer(ref: str, hyp: str) -> float:
    ref_words = ref.split()
    if not ref_words:
        raise EmptyReference("reference has no words")
    return edit_distance(ref_words, hyp.split()) / len(ref_words)


def cer(ref: str, hyp: str) -> float:
    if not ref:
        raise EmptyReference("reference is empty")
    return edit_distance(ref, hyp) / len(ref)


def edge_cer(ref: str, hyp: str, edge_len: int = 5) -> tuple[float, float]:
    """CER of the first ``edge_len`` characters and of the last ``edge_len``.

    Heads are compared with heads and tails with tails; strings shorter than
    ``edge_len`` are used whole.
    """
    if not ref:
        raise EmptyReference("reference is empty")
    head = cer(ref[:edge_len], hyp[:edge_len])
    tail = cer(ref[-edge_len:], hyp[-edge_len:])
    return head, tail


def error_rates(ref: str, hyp: str, edge_len: int = 5) -> ErrorRates:
    head, tail = edge_cer(ref, hyp, edge_len)
    return ErrorRates(wer(ref, hyp), cer(ref, hyp), head, tail)
