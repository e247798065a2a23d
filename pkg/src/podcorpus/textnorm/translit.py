"""Rule-table transliteration of Latin-script runs into Cyrillic."""
from __future__ import annotations

import string
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import PodcorpusError


class TransliterationTableError(PodcorpusError):
    pass


@dataclass(frozen=True)
class TransliterationTable:
    """Ordered ``(latin, cyrillic)`` rules matched longest-first.

    Sources are stored lowercase; every ASCII letter must have a rule.
    """

    rules: tuple[tuple[str, str], ...]
    _lookup: dict[str, str] = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lookup: dict[str, str] = {}
        for source, target in self.rules:
            if not source or source != source.lower() or not all(_is_latin(c) for c in source):
                raise TransliterationTableError(f"invalid rule source {source!r}")
            if source in lookup:
                raise TransliterationTableError(f"duplicate rule source {source!r}")
            lookup[source] = target
        missing = [c for c in string.ascii_lowercase if c not in lookup]
        if missing:
            raise TransliterationTableError(f"no rule for letters: {''.join(missing)}")
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(self, "_max_len", max(len(s) for s in lookup))

    @classmethod
    def from_file(cls, path: str | Path) -> TransliterationTable:
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def parse(cls, text: str) -> TransliterationTable:
        rules = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise TransliterationTableError(f"line {lineno}: expected source<TAB>target")
            rules.append((parts[0], parts[1]))
        return cls(tuple(rules))

    @classmethod
    def default(cls) -> TransliterationTable:
        data = resources.files(__package__).joinpath("data/latin_to_cyrillic.tsv")
        return cls.parse(data.read_text(encoding="utf-8"))

    def match(self, lowered: str, pos: int) -> tuple[int, str] | None:
        """Longest rule matching ``lowered`` at ``pos`` as ``(length, target)``."""
        for n in range(min(self._max_len, len(lowered) - pos), 0, -1):
            target = self._lookup.get(lowered[pos : pos + n])
            if target is not None:
                return n, target
        return None


def _is_latin(c: str) -> bool:
    return c.isalpha() and "LATIN" in unicodedata.name(c, "")


def _fold(c: str) -> str:
    """Lowercase ASCII base of a Latin letter, or the letter itself if it has none."""
    base = unicodedata.normalize("NFKD", c)[0].lower()
    return base if base in string.ascii_lowercase else c.lower()


def _recase(target: str, source: str) -> str:
    if source.isupper() and len(source) > 1:
        return target.upper()
    if source[0].isupper():
        return target[:1].upper() + target[1:]
    return target


def transliterate(s: str, table: TransliterationTable) -> str:
    """Rewrite Latin letters via ``table``; everything else passes through."""
    out = []
    i, n = 0, len(s)
    while i < n:
        if not _is_latin(s[i]):
            out.append(s[i])
            i += 1
            continue
        j = i
        while j < n and _is_latin(s[j]):
            j += 1
        run = s[i:j]
        folded = "".join(_fold(c) for c in run)
        k = 0
        while k < len(run):
            hit = table.match(folded, k)
            if hit is None:
                out.append(run[k])
                k += 1
                continue
            length, target = hit
            out.append(_recase(target, run[k : k + length]))
            k += length
        i = j
    return "".join(out)
