"""Reference kernels in numpy / pure Python.

Same contracts as the compiled ``_native`` module. The trellis is vectorised
over the token axis, one numpy step per frame.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np


def viterbi_trellis(
    logp: np.ndarray, tokens: np.ndarray, blank: int
) -> tuple[np.ndarray, float, int]:
    T = logp.shape[0]
    M = tokens.shape[0]
    row = np.full(M + 1, -np.inf)
    row[0] = 0.0
    # one bit per (frame, state); bit j set means state j was entered at that frame
    bits = np.zeros((T, (M + 8) // 8), dtype=np.uint8)
    flags = np.zeros(M + 1, dtype=bool)
    best = -np.inf
    end_frame = -1

    for t in range(T):
        hi = min(M, t + 1)
        lo = max(1, M - (T - 1 - t))
        if lo > hi:
            continue
        frame = logp[t].astype(np.float64)
        tok_lp = frame[tokens[lo - 1 : hi]]
        stay = row[lo : hi + 1] + np.maximum(frame[blank], tok_lp)
        adv = row[lo - 1 : hi] + tok_lp
        won = adv > stay
        row[lo : hi + 1] = np.where(won, adv, stay)
        flags[:] = False
        flags[lo : hi + 1] = won
        bits[t] = np.packbits(flags, bitorder="little")
        if hi == M and row[M] > best:
            best = float(row[M])
            end_frame = t

    frames = np.full(M, -1, dtype=np.int64)
    t, j = end_frame, M
    while j > 0 and t >= 0:
        if bits[t, j >> 3] >> (j & 7) & 1:
            frames[j - 1] = t
            j -= 1
        t -= 1
    return frames, best, end_frame


def levenshtein(a: Sequence, b: Sequence) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    row = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        diag, row[0] = row[0], i
        for j, y in enumerate(b, 1):
            up = row[j]
            row[j] = min(up + 1, row[j - 1] + 1, diag + (x != y))
            diag = up
    return row[-1]
