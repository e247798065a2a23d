"""Sentence splitting and the full transcript normalization chain."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .numwords import normalize_numbers
from .translit import TransliterationTable, transliterate

# a run of terminal marks ends a sentence only when followed by whitespace or the end
_SENTENCE_END = re.compile(r"[.?!…]+(?=\s|$)")
_APOSTROPHES = str.maketrans({"’": "'", "ʼ": "'"})


@dataclass(frozen=True)
class RawTranscript:
    text: str
    source_id: str = ""


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """``(start, end)`` offsets of each sentence, surrounding whitespace excluded."""
    spans = []
    pos = 0
    cuts = [m.end() for m in _SENTENCE_END.finditer(text)]
    for end in cuts + [len(text)]:
        piece = text[pos:end]
        stripped = piece.strip()
        if stripped:
            start = pos + (len(piece) - len(piece.lstrip()))
            spans.append((start, start + len(stripped)))
        pos = end
    return spans


def split_sentences(raw: RawTranscript | str) -> list[str]:
    text = raw.text if isinstance(raw, RawTranscript) else raw
    return [text[a:b] for a, b in sentence_spans(text)]


def is_cyrillic_letter(c: str) -> bool:
    return "Ѐ" <= c <= "ӿ" and c.isalpha()


def strip_punctuation(s: str) -> str:
    """Drop every character that is not a Cyrillic letter, apostrophe or whitespace."""
    s = s.translate(_APOSTROPHES)
    return "".join(c for c in s if c == "'" or c.isspace() or is_cyrillic_letter(c))


def normalize(raw: RawTranscript | str, table: TransliterationTable | None = None) -> str:
    """Numbers to words, transliterate, strip punctuation, lowercase, collapse spaces.

    Raises :class:`DigitRunTooLarge` for digit runs above 999 999 999 999.
    """
    text = raw.text if isinstance(raw, RawTranscript) else raw
    if table is None:
        table = default_table()
    text = normalize_numbers(text)
    text = transliterate(text, table)
    text = strip_punctuation(text)
    text = text.lower()
    return " ".join(text.split())


_DEFAULT_TABLE: TransliterationTable | None = None


def default_table() -> TransliterationTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = TransliterationTable.default()
    return _DEFAULT_TABLE
