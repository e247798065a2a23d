# cython: language_level=3
"""Compiled trellis and edit-distance kernels.

Both functions mirror :mod:`podcorpus.kernels._python` exactly; the test
suite runs every kernel test against both.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()


cdef inline double _max(double a, double b) noexcept nogil:
    return a if a > b else b


cdef inline float _maxf(float a, float b) noexcept nogil:
    return a if a > b else b


def viterbi_trellis(const float[:, ::1] logp, const int64_t[::1] tokens, Py_ssize_t blank):
    """Run the banded max-product trellis and backtrace.

    Returns ``(frames, path_score, end_frame)``.
    """
    cdef Py_ssize_t T = logp.shape[0]
    cdef Py_ssize_t M = tokens.shape[0]
    cdef Py_ssize_t nbytes = (M + 8) // 8
    cdef Py_ssize_t t, j, lo, hi
    cdef double stay, adv, tok_lp, best = -INFINITY
    cdef Py_ssize_t end_frame = -1
    cdef int64_t tok
    cdef int took
    cdef float blank_f, tok_f
    cdef uint8_t acc

    row_arr = np.full(M + 1, -INFINITY, dtype=np.float64)
    bits_arr = np.zeros((T, nbytes), dtype=np.uint8)
    frames_arr = np.full(M, -1, dtype=np.int64)
    cdef double[::1] row = row_arr
    cdef uint8_t[:, ::1] bits = bits_arr
    cdef int64_t[::1] frames = frames_arr

    with nogil:
        row[0] = 0.0
        for t in range(T):
            blank_f = logp[t, blank]
            hi = M if M < t + 1 else t + 1
            lo = M - (T - 1 - t)
            if lo < 1:
                lo = 1
            # descending j keeps row[j - 1] at its previous-frame value
            # backpointer bits collect in a register, one store per byte
            j = hi
            acc = 0
            while j >= lo:
                tok = tokens[j - 1]
                tok_f = logp[t, tok]
                tok_lp = tok_f
                stay = row[j] + _maxf(blank_f, tok_f)
                adv = row[j - 1] + tok_lp
                # branch-free select: the comparison is unpredictable on noisy logits
                took = adv > stay
                row[j] = _max(adv, stay)
                acc |= <uint8_t>(took << (j & 7))
                if (j & 7) == 0 or j == lo:
                    bits[t, j >> 3] = acc
                    acc = 0
                j -= 1
            if hi == M and row[M] > best:
                best = row[M]
                end_frame = t

        t = end_frame
        j = M
        while j > 0 and t >= 0:
            if bits[t, j >> 3] & (1 << (j & 7)):
                frames[j - 1] = t
                j -= 1
            t -= 1

    return frames_arr, best, end_frame


def levenshtein(const int64_t[::1] a, const int64_t[::1] b):
    """Unit-cost edit distance between two integer sequences."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    cdef Py_ssize_t i, j
    cdef int64_t diag, up, cost, best, ai
    if n < m:
        a, b = b, a
        n, m = m, n
    if m == 0:
        return n
    row_arr = np.arange(m + 1, dtype=np.int64)
    cdef int64_t[::1] row = row_arr
    with nogil:
        for i in range(1, n + 1):
            ai = a[i - 1]
            diag = row[0]
            row[0] = i
            for j in range(1, m + 1):
                up = row[j]
                cost = diag + (0 if ai == b[j - 1] else 1)
                best = up + 1
                if row[j - 1] + 1 < best:
                    best = row[j - 1] + 1
                if cost < best:
                    best = cost
                row[j] = best
                diag = up
    return int(row[m])
