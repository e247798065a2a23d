"""Vocabulary loading and greedy longest-match tokenization.

Vocab file format (UTF-8)::

    #blank_id=0
    0<TAB><blk>
    1<TAB>а
    ...

The token field is taken byte-exact up to the line's trailing newline, so a
token consisting of a single space is written as ``"12\\t \\n"``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import PodcorpusError

_HEADER = "#blank_id="


class VocabError(PodcorpusError):
    pass


class DuplicateToken(VocabError):
    pass


class NonContiguousIds(VocabError):
    pass


class MissingBlank(VocabError):
    pass


class UntokenizableInput(PodcorpusError):
    def __init__(self, char: str, offset: int):
        super().__init__(f"no vocabulary token matches {char!r} at offset {offset}")
        self.char = char
        self.offset = offset


@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]
    blank_id: int
    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.blank_id < len(self.tokens):
            raise MissingBlank(f"blank id {self.blank_id} not in [0, {len(self.tokens)})")
        index: dict[str, int] = {}
        for i, tok in enumerate(self.tokens):
            if not tok:
                raise VocabError(f"token {i} is empty")
            if tok in index:
                raise DuplicateToken(f"token {tok!r} appears as ids {index[tok]} and {i}")
            index[tok] = i
        # the blank is never produced by text
        del index[self.tokens[self.blank_id]]
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_max_len", max((len(t) for t in index), default=0))

    @property
    def size(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        return self._index[token]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class TokenSequence:
    ids: tuple[int, ...]
    spans: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.ids)


def load_vocab(path: str | Path, word_marker: str | None = None) -> Vocab:
    """Parse a vocab file.

    ``word_marker`` (e.g. ``"▁"`` for SentencePiece exports) is replaced by a
    plain space in every token so word-boundary tokens match normalized text.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    blank_id = None
    entries: dict[int, str] = {}
    for lineno, line in enumerate(lines, 1):
        if line.startswith(_HEADER):
            try:
                blank_id = int(line[len(_HEADER):].strip())
            except ValueError:
                raise VocabError(f"line {lineno}: bad blank_id header {line!r}") from None
            continue
        if not line or line.startswith("#"):
            continue
        id_field, sep, token = line.partition("\t")
        if not sep:
            raise VocabError(f"line {lineno}: expected id<TAB>token")
        try:
            tid = int(id_field)
        except ValueError:
            raise VocabError(f"line {lineno}: bad id {id_field!r}") from None
        if tid in entries:
            raise NonContiguousIds(f"line {lineno}: id {tid} appears twice")
        if word_marker:
            token = token.replace(word_marker, " ")
        entries[tid] = token
    if sorted(entries) != list(range(len(entries))):
        raise NonContiguousIds(f"ids are not exactly 0..{len(entries) - 1}")
    if blank_id is None:
        raise MissingBlank("missing #blank_id=<n> header")
    return Vocab(tuple(entries[i] for i in range(len(entries))), blank_id)


def tokenize(text: str, vocab: Vocab) -> TokenSequence:
    """Greedy longest match, left to right, over the non-blank tokens."""
    ids: list[int] = []
    spans: list[tuple[int, int]] = []
    index = vocab._index
    pos, n = 0, len(text)
    while pos < n:
        for length in range(min(vocab._max_len, n - pos), 0, -1):
            tid = index.get(text[pos : pos + length])
            if tid is not None:
                ids.append(tid)
                spans.append((pos, pos + length))
                pos += length
                break
        else:
            raise UntokenizableInput(text[pos], pos)
    return TokenSequence(tuple(ids), tuple(spans))
