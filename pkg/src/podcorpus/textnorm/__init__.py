"""Transcript normalization: digits to words, Latin to Cyrillic, alphabet filter."""
from .normalize import (
    RawTranscript,
    default_table,
    normalize,
    sentence_spans,
    split_sentences,
    strip_punctuation,
)
from .numwords import DigitRunTooLarge, normalize_numbers, number_to_words
from .translit import TransliterationTable, TransliterationTableError, transliterate

__all__ = [
    "DigitRunTooLarge",
    "RawTranscript",
    "TransliterationTable",
    "TransliterationTableError",
    "default_table",
    "normalize",
    "normalize_numbers",
    "number_to_words",
    "sentence_spans",
    "split_sentences",
    "strip_punctuation",
    "transliterate",
]
