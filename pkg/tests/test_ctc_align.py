import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_force_align, log_softmax
from podcorpus.ctc_align import (
    AlignmentError,
    CharTiming,
    CtcmFormatError,
    DimensionMismatch,
    EmptySegment,
    IncompatibleParts,
    InfeasibleAlignment,
    InvalidMatrix,
    LogProbMatrix,
    SegmentScoreConfig,
    align,
    read_ctcm,
    score_segment,
    stitch,
    write_ctcm,
)
from podcorpus.tokenization import TokenSequence


def random_case(rng, max_t=8, max_v=4, max_tokens=3):
    T = int(rng.integers(1, max_t + 1))
    V = int(rng.integers(2, max_v + 1))
    blank = int(rng.integers(V))
    lp = log_softmax(rng.normal(scale=2.0, size=(T, V)))
    M = int(rng.integers(1, min(max_tokens, T) + 1))
    choices = [v for v in range(V) if v != blank]
    tokens = [int(rng.choice(choices)) for _ in range(M)]
    return LogProbMatrix(lp, blank, 0.04), tokens


class TestMatrix:
    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidMatrix, match="log-sum-exp"):
            LogProbMatrix(np.full((2, 3), -0.5), 0, 0.08)

    def test_rejects_positive(self):
        with pytest.raises(InvalidMatrix):
            LogProbMatrix(np.array([[0.5, -1.0]]), 0, 0.08)

    def test_rejects_all_neg_inf_row(self):
        with pytest.raises(InvalidMatrix):
            LogProbMatrix(np.full((1, 2), -np.inf), 0, 0.08)

    def test_validation_toggle(self):
        m = LogProbMatrix(np.full((2, 3), -0.5), 0, 0.08, validate=False)
        assert m.frames == 2 and m.vocab_size == 3

    @pytest.mark.parametrize("shape, blank", [((0, 3), 0), ((2, 1), 0), ((2, 3), 3)])
    def test_rejects_shape(self, shape, blank):
        with pytest.raises(InvalidMatrix):
            LogProbMatrix(np.zeros(shape), blank, 0.08, validate=False)


class TestCtcm:
    def test_bit_exact_layout(self, tmp_path):
        values = log_softmax(np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]]))
        m = LogProbMatrix(values, 2, 0.08)
        write_ctcm(m, tmp_path / "m.ctcm")
        expected = b"CTCM" + struct.pack("<IIIIf", 1, 2, 3, 2, 0.08)
        expected += values.astype("<f4").tobytes()
        assert (tmp_path / "m.ctcm").read_bytes() == expected

    def test_round_trip(self, tmp_path):
        m = LogProbMatrix(log_softmax(np.random.default_rng(0).normal(size=(7, 5))), 1, 0.04)
        write_ctcm(m, tmp_path / "m.ctcm")
        assert read_ctcm(tmp_path / "m.ctcm") == m

    def test_unknown_version(self, tmp_path):
        path = tmp_path / "m.ctcm"
        path.write_bytes(b"CTCM" + struct.pack("<IIIIf", 2, 1, 2, 0, 0.08) + b"\0" * 8)
        with pytest.raises(CtcmFormatError, match="version"):
            read_ctcm(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "m.ctcm"
        path.write_bytes(b"RIFF" + struct.pack("<IIIIf", 1, 1, 2, 0, 0.08) + b"\0" * 8)
        with pytest.raises(CtcmFormatError, match="magic"):
            read_ctcm(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "m.ctcm"
        path.write_bytes(b"CTCM" + struct.pack("<IIIIf", 1, 2, 2, 0, 0.08) + b"\0" * 8)
        with pytest.raises(CtcmFormatError, match="payload"):
            read_ctcm(path)


class TestStitch:
    def test_concatenation(self):
        rng = np.random.default_rng(1)
        a = LogProbMatrix(log_softmax(rng.normal(size=(2, 4))), 0, 0.08)
        b = LogProbMatrix(log_softmax(rng.normal(size=(3, 4))), 0, 0.08)
        m = stitch([a, b])
        assert m.frames == 5
        np.testing.assert_array_equal(m.values, np.vstack([a.values, b.values]))

    def test_incompatible(self):
        a = LogProbMatrix(log_softmax(np.zeros((2, 4))), 0, 0.08)
        b = LogProbMatrix(log_softmax(np.zeros((2, 5))), 0, 0.08)
        with pytest.raises(IncompatibleParts):
            stitch([a, b])

    def test_single_identity(self):
        a = LogProbMatrix(log_softmax(np.random.default_rng(2).normal(size=(3, 4))), 0, 0.08)
        assert stitch([a]).values.tobytes() == a.values.tobytes()


class TestAlignExamples:
    def test_single_frame(self, backend):
        lp = np.log([[1 - math.exp(-0.01), math.exp(-0.01)]])
        r = align(LogProbMatrix(lp, 0, 0.08), [1], backend=backend)
        assert r.timings[0].frame == 0
        assert r.timings[0].token_logprob == pytest.approx(-0.01, abs=1e-6)

    def test_two_tokens_three_frames(self, backend):
        blank, a, b = 0, 1, 2
        lp = np.full((3, 3), -3.0)
        lp[0, a] = lp[1, blank] = lp[2, b] = -0.1
        m = LogProbMatrix(lp, blank, 0.08, validate=False)
        _, oracle_frames, _ = brute_force_align(m.values, [a, b], blank)
        assert oracle_frames == [0, 2]
        assert align(m, [a, b], backend=backend).frames == [0, 2]

    def test_free_preamble(self, backend):
        lp = np.full((5, 3), math.log(1 / 3))
        lp[2:] = np.log([0.05, 0.9, 0.05])
        m = LogProbMatrix(lp, 0, 0.08)
        score, oracle_frames, _ = brute_force_align(m.values, [1], 0)
        r = align(m, [1], backend=backend)
        assert oracle_frames == r.frames == [2]
        assert r.path_logprob == pytest.approx(score, abs=1e-9)
        assert r.trailing_start_frame == 3

    def test_token_sequence_input(self, backend):
        lp = log_softmax(np.random.default_rng(3).normal(size=(6, 3)))
        m = LogProbMatrix(lp, 0, 0.08)
        seq = TokenSequence((1, 2), ((0, 1), (1, 2)))
        assert align(m, seq, backend=backend) == align(m, [1, 2], backend=backend)


class TestAlignErrors:
    m = LogProbMatrix(log_softmax(np.zeros((2, 3))), 0, 0.08)

    def test_infeasible(self):
        with pytest.raises(InfeasibleAlignment):
            align(self.m, [1, 2, 1])

    def test_dimension(self):
        with pytest.raises(DimensionMismatch):
            align(self.m, [3])

    def test_blank_token(self):
        with pytest.raises(AlignmentError):
            align(self.m, [0])

    def test_empty(self):
        with pytest.raises(AlignmentError):
            align(self.m, [])


class TestAlignProperties:
    def test_oracle_small(self, backend):
        rng = np.random.default_rng(11)
        for _ in range(60):
            m, tokens = random_case(rng)
            score, frames, gap = brute_force_align(m.values, tokens, m.blank_id)
            r = align(m, tokens, backend=backend)
            assert r.path_logprob == pytest.approx(score, abs=1e-9)
            if gap > 1e-9:
                assert r.frames == frames

    def test_backends_agree_on_large_input(self):
        from podcorpus import kernels

        if "native" not in kernels.available_backends():
            pytest.skip("native kernels not built")
        rng = np.random.default_rng(5)
        m = LogProbMatrix(log_softmax(rng.normal(size=(400, 12))), 3, 0.04)
        tokens = [int(t) for t in rng.choice([v for v in range(12) if v != 3], size=90)]
        assert align(m, tokens, backend="python") == align(m, tokens, backend="native")

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_monotone_and_deterministic(self, seed):
        rng = np.random.default_rng(seed)
        m, tokens = random_case(rng, max_t=30, max_v=6, max_tokens=10)
        r = align(m, tokens)
        frames = r.frames
        assert all(0 <= f < m.frames for f in frames)
        assert all(a < b for a, b in zip(frames, frames[1:]))
        assert r.path_logprob <= 0
        assert align(m, tokens) == r

    def test_shift_invariance_on_forced_frames(self, backend):
        # frames in [T - M, M - 1] lie inside every path's scored span
        rng = np.random.default_rng(21)
        checked = 0
        for _ in range(200):
            m, tokens = random_case(rng, max_t=8, max_v=4, max_tokens=6)
            T, M = m.frames, len(tokens)
            forced = range(T - M, M)
            if not forced:
                continue
            base = align(m, tokens, backend=backend)
            for t in forced:
                shifted = m.values.copy()
                shifted[t] += 1.5
                m2 = LogProbMatrix(shifted, m.blank_id, m.frame_duration_s, validate=False)
                _, _, gap = brute_force_align(m.values, tokens, m.blank_id)
                if gap > 1e-6:
                    assert align(m2, tokens, backend=backend).frames == base.frames
                    checked += 1
        assert checked > 20

    def test_equal_peaks_end_at_first(self, backend):
        lp = np.log(np.array([[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]))
        r = align(LogProbMatrix(lp, 0, 0.08), [1], backend=backend)
        assert r.frames == [0]
        assert r.trailing_start_frame == 1

    def test_tie_resolved_toward_stay(self, backend):
        # token 1 at frame 0 (then two blanks) ties with token 1 at frame 2;
        # the stay transition wins at cell (2, 1), keeping the emission at 0
        lp = np.array(
            [
                [-1.0, -1.0, -9.0],
                [-1.0, -9.0, -9.0],
                [-1.0, -3.0, -9.0],
                [-9.0, -9.0, -1.0],
            ]
        )
        m = LogProbMatrix(lp, 0, 0.08, validate=False)
        r = align(m, [1, 2], backend=backend)
        assert r.frames == [0, 3]
        assert r.path_logprob == -4.0


class TestScoreSegment:
    def timings(self, lps):
        return [CharTiming(i, i, lp) for i, lp in enumerate(lps)]

    def test_single(self):
        assert score_segment(self.timings([-0.5]), SegmentScoreConfig(3)) == -0.5

    def test_windows(self):
        assert score_segment(self.timings([-0.1, -0.1, -4.0]), SegmentScoreConfig(2)) == pytest.approx(-2.05)

    def test_perfect(self):
        assert score_segment(self.timings([0.0] * 12)) == 0.0

    def test_empty(self):
        with pytest.raises(EmptySegment):
            score_segment([])

    def test_window_validation(self):
        with pytest.raises(ValueError):
            SegmentScoreConfig(0)

    @given(
        st.lists(st.floats(-20, 0), min_size=1, max_size=30),
        st.integers(1, 12),
    )
    def test_bounds_and_brute_force(self, lps, w):
        score = score_segment(self.timings(lps), SegmentScoreConfig(w))
        width = min(w, len(lps))
        brute = min(sum(lps[i : i + width]) / width for i in range(len(lps) - width + 1))
        assert score == pytest.approx(brute, abs=1e-9)
        assert score <= max(lps) + 1e-12
        assert score <= 0
