"""Finite words over a small alphabet.

Words are plain Python strings over the characters ``'0'``, ``'1'``, ``'2'``.
The empty word is ``""``.  The prefix order is :func:`is_prefix`; plain string
comparison gives the lexicographic order used for tie-breaking, and
:func:`length_lex_key` the length-lexicographic enumeration order.
"""

from __future__ import annotations

import itertools
from typing import Iterator

ALPHABET = "012"


def letters(k: int) -> str:
    if not 2 <= k <= len(ALPHABET):
        raise ValueError(f"alphabet size must be 2 or 3, got {k}")
    return ALPHABET[:k]


def check_word(word: str, k: int) -> str:
    ok = letters(k)
    for ch in word:
        if ch not in ok:
            raise ValueError(f"letter {ch!r} not in alphabet of size {k}: {word!r}")
    return word


def is_prefix(prefix: str, word: str) -> bool:
    """True iff ``prefix`` ⪯ ``word``."""
    return word.startswith(prefix)


def all_words(k: int, length: int) -> Iterator[str]:
    """All words of exactly ``length`` letters, in lexicographic order."""
    return ("".join(t) for t in itertools.product(letters(k), repeat=length))


def words_up_to(k: int, max_len: int) -> Iterator[str]:
    """All words of length ≤ ``max_len``, in length-lexicographic order."""
    return itertools.chain.from_iterable(all_words(k, n) for n in range(max_len + 1))


def length_lex_key(word: str) -> tuple[int, str]:
    return (len(word), word)


def rotations(word: str) -> list[str]:
    return [word[i:] + word[:i] for i in range(len(word))]


def is_primitive(word: str) -> bool:
    """True iff ``word`` is not a proper power of a shorter word."""
    n = len(word)
    if n == 0:
        return False
    for d in range(1, n):
        if n % d == 0 and word == word[:d] * (n // d):
            return False
    return True


def periodic_word(generator: str, length: int) -> str:
    """The prefix of ``generator^ω`` of the given length."""
    if not generator:
        raise ValueError("empty generator")
    reps = length // len(generator) + 1
    return (generator * reps)[:length]
