"""Pipeline configuration: one flat ``key = value`` file, overridable from the CLI.

Example::

    # thresholds
    min_score = -2
    max_cer = 30%
    vocab = model/tokens.txt

Percent values are divided by exactly 100. Unknown keys are an error.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .ctc_align import SegmentScoreConfig
from .errors import PodcorpusError
from .filtering import FilterConfig
from .manifest import SplitConfig
from .segmenter import DEFAULT_PAD_S


class ConfigError(PodcorpusError):
    pass


@dataclass(frozen=True)
class Paths:
    vocab: Path | None = None
    transliteration_table: Path | None = None
    logits_dir: Path | None = None
    audio_dir: Path | None = None
    transcripts_dir: Path | None = None
    hypotheses_file: Path | None = None
    out_dir: Path | None = None


@dataclass(frozen=True)
class PipelineConfig:
    filter: FilterConfig = field(default_factory=FilterConfig)
    scoring: SegmentScoreConfig = field(default_factory=SegmentScoreConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    pad_s: float = DEFAULT_PAD_S
    paths: Paths = field(default_factory=Paths)
    jobs: int = 1
    vocab_word_marker: str | None = None

    def __post_init__(self):
        if self.pad_s < 0:
            raise ConfigError(f"pad_s must be >= 0, got {self.pad_s}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


# key -> (section, type); section None means a top-level field
_KEYS: dict[str, tuple[str | None, type]] = {
    **{f.name: ("filter", f.type) for f in dataclasses.fields(FilterConfig)},
    "window_tokens": ("scoring", int),
    "train_fraction": ("split", float),
    "seed": ("split", int),
    "by_episode": ("split", bool),
    "pad_s": (None, float),
    "jobs": (None, int),
    "vocab_word_marker": (None, str),
    **{f.name: ("paths", Path) for f in dataclasses.fields(Paths)},
}
_PERCENT_OK = {"max_cer", "max_wer", "max_edge_cer"}


def _coerce(key: str, raw: str, kind) -> object:
    kind = {"float": float, "int": int}.get(kind, kind)
    raw = raw.strip()
    try:
        if kind is float:
            if raw.endswith("%"):
                if key not in _PERCENT_OK:
                    raise ValueError("percent not allowed here")
                return float(raw[:-1]) / 100
            return float(raw)
        if kind is int:
            return int(raw)
        if kind is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError("expected a boolean")
        if kind is Path:
            return Path(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r}: {exc}") from None


def parse_config_text(text: str) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw, _KEYS[key][1])
    return values


def load_config(path: str | Path | None = None, overrides: dict[str, object] | None = None) -> PipelineConfig:
    """Defaults, then the file at ``path``, then ``overrides`` (None values skipped)."""
    values: dict[str, object] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        values.update(parse_config_text(text))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = value
    return build_config(values)


def build_config(values: dict[str, object]) -> PipelineConfig:
    sections: dict[str | None, dict[str, object]] = {}
    for key, value in values.items():
        sections.setdefault(_KEYS[key][0], {})[key] = value
    try:
        return PipelineConfig(
            filter=FilterConfig(**sections.get("filter", {})),
            scoring=SegmentScoreConfig(**sections.get("scoring", {})),
            split=SplitConfig(**sections.get("split", {})),
            paths=Paths(**sections.get("paths", {})),
            **sections.get(None, {}),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
