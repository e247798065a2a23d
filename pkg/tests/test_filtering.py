import pytest
from hypothesis import given
from hypothesis import strategies as st

from podcorpus.filtering import (
    DropReason,
    FilterConfig,
    Hypothesis,
    HypothesisFileError,
    apply_filter,
    load_hypotheses,
    write_hypotheses,
)
from podcorpus.segmenter import AlignedSegment

TEXT = "це дуже цікава і жива розмова"


def seg(score=-0.5, dur=5.0, text=TEXT):
    return AlignedSegment(text, text, 0, 10, 1.0, 1.0 + dur, score)


def hyp(text=TEXT):
    return Hypothesis("k", text)


def test_all_pass():
    v = apply_filter(seg(), hyp(), FilterConfig())
    assert v.kept and v.reasons == ()


def test_low_score():
    v = apply_filter(seg(score=-3.0), hyp())
    assert not v.kept and v.reasons == (DropReason.LOW_SCORE,)


def test_too_short():
    v = apply_filter(seg(score=-0.1, dur=0.8), hyp())
    assert v.reasons == (DropReason.TOO_SHORT,)


def test_boundaries():
    assert apply_filter(seg(score=-2.0), hyp()).kept
    assert apply_filter(seg(dur=1.0), hyp()).reasons == (DropReason.TOO_SHORT,)
    assert apply_filter(seg(dur=20.0), hyp()).reasons == (DropReason.TOO_LONG,)


def test_missing_hypothesis():
    v = apply_filter(seg(), None)
    assert v.reasons == (DropReason.MISSING_HYPOTHESIS,) and v.rates is None


def test_all_reasons_reported():
    v = apply_filter(seg(score=-5.0, dur=30.0), hyp("зовсім інше"))
    assert set(v.reasons) == {
        DropReason.LOW_SCORE,
        DropReason.HIGH_CER,
        DropReason.HIGH_WER,
        DropReason.HIGH_EDGE_CER,
        DropReason.TOO_LONG,
    }


def test_config_validation():
    with pytest.raises(ValueError):
        FilterConfig(min_duration_s=5, max_duration_s=5)
    with pytest.raises(ValueError):
        FilterConfig(edge_len=0)
    with pytest.raises(ValueError):
        FilterConfig(max_cer=-0.1)


hyp_texts = st.sampled_from([TEXT, "це дуже цікава розмова", "те дуже цікава і жива розмова", "інше", ""])


@given(
    st.floats(-6, 0),
    st.floats(0.1, 30),
    hyp_texts,
    st.sampled_from(["min_score", "max_cer", "max_wer", "max_edge_cer", "min_duration_s", "max_duration_s"]),
    st.floats(0, 2),
)
def test_relaxing_never_drops(score, dur, text, knob, delta):
    base = FilterConfig()
    change = -delta if knob in ("min_score", "min_duration_s") else delta
    relaxed = FilterConfig(**{**base.__dict__, knob: getattr(base, knob) + change})
    s, h = seg(score, dur), hyp(text)
    if apply_filter(s, h, base).kept:
        assert apply_filter(s, h, relaxed).kept


def test_hypotheses_round_trip(tmp_path):
    path = tmp_path / "h.jsonl"
    write_hypotheses({"b_1_2": "п'ять", "a_0_1": "кіт"}, path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == '{"segment_key": "a_0_1", "pred_text": "кіт"}'
    hyps = load_hypotheses(path)
    assert hyps["b_1_2"] == Hypothesis("b_1_2", "п'ять")


def test_hypotheses_duplicate(tmp_path):
    path = tmp_path / "h.jsonl"
    path.write_text('{"segment_key": "a", "pred_text": "x"}\n{"segment_key": "a", "pred_text": "y"}\n', encoding="utf-8")
    with pytest.raises(HypothesisFileError, match="duplicate"):
        load_hypotheses(path)


def test_hypotheses_malformed(tmp_path):
    path = tmp_path / "h.jsonl"
    path.write_text('{"segment_key": "a"}\n', encoding="utf-8")
    with pytest.raises(HypothesisFileError, match=":1:"):
        load_hypotheses(path)
