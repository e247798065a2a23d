"""Ukrainian cardinal numbers in words (nominative, masculine default).

Output matches ``num2words(n, lang="uk")`` for 0 <= n < 10**12, including the
feminine ``одна``/``дві`` required before ``тисяча``.
"""
from __future__ import annotations

import re

from ..errors import PodcorpusError

MAX_NUMBER = 10**12 - 1

_ONES = ("", "один", "два", "три", "чотири", "п'ять", "шість", "сім", "вісім", "дев'ять")
_ONES_FEMININE = ("", "одна", "дві") + _ONES[3:]
_TEENS = (
    "десять", "одинадцять", "дванадцять", "тринадцять", "чотирнадцять",
    "п'ятнадцять", "шістнадцять", "сімнадцять", "вісімнадцять", "дев'ятнадцять",
)
_TENS = (
    "", "", "двадцять", "тридцять", "сорок", "п'ятдесят",
    "шістдесят", "сімдесят", "вісімдесят", "дев'яносто",
)
_HUNDREDS = (
    "", "сто", "двісті", "триста", "чотириста", "п'ятсот",
    "шістсот", "сімсот", "вісімсот", "дев'ятсот",
)
# (one, few, many) per power of a thousand
_SCALES = (
    None,
    ("тисяча", "тисячі", "тисяч"),
    ("мільйон", "мільйони", "мільйонів"),
    ("мільярд", "мільярди", "мільярдів"),
)

_DIGIT_RUN = re.compile(r"[0-9]+")


class DigitRunTooLarge(PodcorpusError):
    def __init__(self, digits: str):
        super().__init__(f"digit run {digits!r} exceeds {MAX_NUMBER}")
        self.digits = digits


def _plural(n: int, forms: tuple[str, str, str]) -> str:
    if 10 < n % 100 < 20:
        return forms[2]
    if n % 10 == 1:
        return forms[0]
    if 2 <= n % 10 <= 4:
        return forms[1]
    return forms[2]


def _triple(n: int, feminine: bool) -> list[str]:
    words = []
    hundreds, rest = divmod(n, 100)
    if hundreds:
        words.append(_HUNDREDS[hundreds])
    tens, ones = divmod(rest, 10)
    if tens == 1:
        words.append(_TEENS[ones])
        return words
    if tens:
        words.append(_TENS[tens])
    if ones:
        words.append((_ONES_FEMININE if feminine else _ONES)[ones])
    return words


def number_to_words(n: int) -> str:
    """Spell a non-negative integer below 10**12 in Ukrainian."""
    if n < 0 or n > MAX_NUMBER:
        raise DigitRunTooLarge(str(n))
    if n == 0:
        return "нуль"
    words: list[str] = []
    for scale in range(3, -1, -1):
        chunk = n // 1000**scale % 1000
        if not chunk:
            continue
        words.extend(_triple(chunk, feminine=scale == 1))
        if scale:
            words.append(_plural(chunk, _SCALES[scale]))
    return " ".join(words)


def normalize_numbers(s: str) -> str:
    """Replace every maximal ASCII digit run with its spelling in words."""

    def spell(match: re.Match) -> str:
        digits = match.group()
        value = int(digits)
        if value > MAX_NUMBER:
            raise DigitRunTooLarge(digits)
        return number_to_words(value)

    return _DIGIT_RUN.sub(spell, s)
