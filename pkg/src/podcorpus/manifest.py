"""JSON-Lines training manifests, train/test splitting and corpus statistics."""
from __future__ import annotations

import dataclasses
import json
import logging
import math
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import PodcorpusError

log = logging.getLogger(__name__)


class ManifestError(PodcorpusError):
    pass


class ParseError(ManifestError):
    def __init__(self, line: int, key: str | None, detail: str = ""):
        what = f"key {key!r}" if key else "record"
        super().__init__(f"line {line}: bad {what}" + (f": {detail}" if detail else ""))
        self.line = line
        self.key = key


class EmptyCorpus(ManifestError):
    pass


@dataclasses.dataclass
class Datapoint:
    audio_filepath: str
    duration: float
    text: str
    text_no_processing: str
    text_normalized: str
    score: float
    pred_text: str
    wer: float
    cer: float


FIELDS = tuple(f.name for f in dataclasses.fields(Datapoint))
_FLOAT_FIELDS = {"duration", "score", "wer", "cer"}


def _number(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x}")
    return x + 0.0  # folds -0.0 into 0.0


def to_json_line(dp: Datapoint) -> str:
    obj = {}
    for name in FIELDS:
        value = getattr(dp, name)
        obj[name] = _number(value, name) if name in _FLOAT_FIELDS else value
    return json.dumps(obj, ensure_ascii=False, allow_nan=False)


def write_manifest(records: Iterable[Datapoint], path: str | Path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for dp in records:
                fh.write(to_json_line(dp))
                fh.write("\n")
    except OSError as exc:
        raise ManifestError(f"cannot write {path}: {exc}") from exc


def _check_type(name: str, value, lineno: int):
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(lineno, name, f"expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ParseError(lineno, name, f"expected a string, got {value!r}")
    return value


def read_manifest(path: str | Path) -> list[Datapoint]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(lineno, None, str(exc)) from None
            if not isinstance(obj, dict):
                raise ParseError(lineno, None, "not a JSON object")
            for name in FIELDS:
                if name not in obj:
                    raise ParseError(lineno, name, "missing")
            extra = sorted(set(obj) - set(FIELDS))
            if extra:
                log.warning("%s:%d: ignoring unknown keys %s", path, lineno, ", ".join(extra))
            records.append(Datapoint(**{n: _check_type(n, obj[n], lineno) for n in FIELDS}))
    return records


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.9
    seed: int = 0
    by_episode: bool = False

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def episode_of(dp: Datapoint) -> str:
    """Episode id encoded in a clip name ``<episode>_<start>_<end>.wav``."""
    stem = Path(dp.audio_filepath).stem
    parts = stem.rsplit("_", 2)
    return parts[0] if len(parts) == 3 else stem


def split(
    records: Sequence[Datapoint], cfg: SplitConfig = SplitConfig()
) -> tuple[list[Datapoint], list[Datapoint]]:
    """Seeded shuffle; the first ``floor(train_fraction * N)`` go to train.

    Both outputs keep the input order. With ``by_episode`` whole episodes are
    assigned, filling train up to the same target without exceeding it.
    """
    if not records:
        raise EmptyCorpus("cannot split an empty corpus")
    n = len(records)
    n_train = math.floor(Fraction(str(cfg.train_fraction)) * n)
    rng = random.Random(cfg.seed)
    if cfg.by_episode:
        groups: dict[str, list[int]] = {}
        for i, dp in enumerate(records):
            groups.setdefault(episode_of(dp), []).append(i)
        order = sorted(groups)
        rng.shuffle(order)
        train_idx: set[int] = set()
        for ep in order:
            if len(train_idx) + len(groups[ep]) <= n_train:
                train_idx.update(groups[ep])
    else:
        order_idx = list(range(n))
        rng.shuffle(order_idx)
        train_idx = set(order_idx[:n_train])
    train = [dp for i, dp in enumerate(records) if i in train_idx]
    test = [dp for i, dp in enumerate(records) if i not in train_idx]
    return train, test


@dataclass(frozen=True)
class SplitStats:
    count: int
    total_duration_hours: float


def stats(manifests: Mapping[str, Sequence[Datapoint]]) -> dict[str, SplitStats]:
    return {
        name: SplitStats(len(recs), math.fsum(dp.duration for dp in recs) / 3600.0)
        for name, recs in manifests.items()
    }


def format_stats(corpus: Mapping[str, SplitStats], decimals: int = 1) -> str:
    """Plain-text table with a ``Duration, hours`` column."""
    rows = [("Split", "Clips", "Duration, hours")]
    for name, st in corpus.items():
        rows.append((name, str(st.count), f"{st.total_duration_hours:.{decimals}f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = [
        f"{r[0]:<{widths[0]}}  {r[1]:>{widths[1]}}  {r[2]:>{widths[2]}}" for r in rows
    ]
    return "\n".join(lines) + "\n"
