"""Depth-first tree search over closed classes with orbit constraints.

Everything here is exhaustive and deterministic: searches expand letters in
lexicographic order, so "the member found" always means the lexicographically
least one.  Constraint objects provide a full check ``ok(word)`` and an
incremental ``ok_extension(word)`` that may assume every proper prefix of the
word already passed (valid along DFS paths).  For pure suffix maps
(``f(σ) = σ[s:]``) the incremental form only compares the windows that end at
the new letter.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

from .maps import CodedMap
from .systems import ClosedClass, restrict_class
from .words import letters


def scan_width() -> int:
    """Parallel scan width cap from CANTORDYN_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("CANTORDYN_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items: Sequence):
    """Order-preserving map honouring the CANTORDYN_THREADS cap."""
    width = min(scan_width(), len(items)) if items else 1
    if width <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=width) as pool:
        return list(pool.map(fn, items))


class OrbitAvoidance:
    """The forever-avoidance condition ``∀n ≤ |σ|: f^n(σ) ⊉ τ`` for τ in a
    finite forbidden set.  Downward closed and forward invariant for
    normalized maps."""

    __slots__ = ("map", "by_len", "lens", "label", "_suffix")

    def __init__(self, map_: CodedMap, forbidden: Iterable[str], label: str = ""):
        self.map = map_
        forb = sorted(set(forbidden))
        self.lens = sorted({len(w) for w in forb})
        self.by_len = {t: frozenset(w for w in forb if len(w) == t) for t in self.lens}
        self.label = label or f"avoid({','.join(forb)})"
        self._suffix = map_.suffix_step if map_.suffix_step else None

    def _hit(self, word: str) -> bool:
        return any(len(word) >= t and word[:t] in self.by_len[t] for t in self.lens)

    def ok(self, word: str) -> bool:
        if not self.lens:
            return True
        cur = word
        for _ in range(len(word) + 1):
            if self._hit(cur):
                return False
            if not cur:
                break
            cur = self.map.apply(cur)
        return True

    def ok_extension(self, word: str) -> bool:
        s = self._suffix
        if s is None:
            return self.ok(word)
        if s == 0:
            return not self._hit(word)
        L = len(word)
        for t in self.lens:
            off = L - t
            if off >= 0 and off % s == 0 and word[off:] in self.by_len[t]:
                return False
        return True


class PredicateAvoidance:
    """Avoidance of every word satisfying a predicate: ``∀n ≤ |σ|`` no prefix
    of ``f^n(σ)`` satisfies it.  Used by the Δ₁-forcing constructions, where
    the forbidden set is given by a formula instead of a list."""

    __slots__ = ("map", "pred", "max_len", "label", "_word_hit")

    def __init__(self, map_: CodedMap, pred, max_len: int | None = None, label: str = "avoid-pred"):
        self.map = map_
        self.pred = pred
        self.max_len = max_len
        self.label = label
        self._word_hit: dict[str, bool] = {}

    def _hit(self, word: str) -> bool:
        h = self._word_hit.get(word)
        if h is None:
            cap = len(word) if self.max_len is None else min(len(word), self.max_len)
            h = any(self.pred(word[:t]) for t in range(cap + 1))
            self._word_hit[word] = h
        return h

    def ok(self, word: str) -> bool:
        cur = word
        for _ in range(len(word) + 1):
            if self._hit(cur):
                return False
            if not cur:
                break
            cur = self.map.apply(cur)
        return True

    def ok_extension(self, word: str) -> bool:
        return self.ok(word)


class CylinderCompat:
    """Compatibility with a finite set of cylinders: the word must be a prefix
    of, or extend, one of the given words."""

    __slots__ = ("words", "label")

    def __init__(self, words: Iterable[str], label: str = "compat"):
        self.words = sorted(set(words))
        self.label = label

    def ok(self, word: str) -> bool:
        return any(w.startswith(word) or word.startswith(w) for w in self.words)

    ok_extension = ok


class LetterAt:
    """Pin single positions: word[p] must equal the given letter."""

    __slots__ = ("pins", "label")

    def __init__(self, pins: dict[int, str], label: str = "pins"):
        self.pins = dict(pins)
        self.label = label

    def ok(self, word: str) -> bool:
        return all(len(word) <= p or word[p] == a for p, a in self.pins.items())

    def ok_extension(self, word: str) -> bool:
        a = self.pins.get(len(word) - 1)
        return a is None or word[-1] == a


def find_member(space: ClosedClass, length: int, constraints: Sequence = ()) -> str | None:
    """Lexicographically least member of the given length satisfying every
    constraint, or None."""
    alpha = letters(space.k)
    if not (space.member_step("") and all(c.ok_extension("") for c in constraints)):
        return None

    def rec(w: str) -> str | None:
        if len(w) == length:
            return w
        for a in alpha:
            u = w + a
            if space.member_step(u) and all(c.ok_extension(u) for c in constraints):
                r = rec(u)
                if r is not None:
                    return r
        return None

    return rec("")


def iter_members(space: ClosedClass, length: int, constraints: Sequence = (),
                 limit: int | None = None) -> list[str]:
    """All members of the given length (lexicographic order), up to ``limit``."""
    alpha = letters(space.k)
    out: list[str] = []
    if not (space.member_step("") and all(c.ok_extension("") for c in constraints)):
        return out

    def rec(w: str) -> bool:
        if len(w) == length:
            out.append(w)
            return limit is not None and len(out) >= limit
        for a in alpha:
            u = w + a
            if space.member_step(u) and all(c.ok_extension(u) for c in constraints):
                if rec(u):
                    return True
        return False

    rec("")
    return out


def last_live_length(space: ClosedClass, cap: int, constraints: Sequence = ()) -> int:
    """Largest ``n ≤ cap`` with a surviving word of length ``n`` (−1 if even
    the root fails)."""
    alpha = letters(space.k)
    if not (space.member_step("") and all(c.ok_extension("") for c in constraints)):
        return -1
    best = 0

    def rec(w: str):
        nonlocal best
        if len(w) == cap:
            return
        for a in alpha:
            u = w + a
            if space.member_step(u) and all(c.ok_extension(u) for c in constraints):
                if len(u) > best:
                    best = len(u)
                if best == cap:
                    return
                rec(u)

    rec("")
    return best


def death_length(space: ClosedClass, cap: int, constraints: Sequence = ()) -> int | None:
    """Least ``s ≤ cap`` such that no word of length ``s`` survives, or None
    if the tree is alive at ``cap``."""
    live = last_live_length(space, cap, constraints)
    if live >= cap:
        return None
    return live + 1


def avoidance_class(base: ClosedClass, avoids: Sequence, name: str) -> ClosedClass:
    """``base`` restricted by orbit-avoidance constraints, as a ClosedClass.

    Avoidance conditions are downward closed, so full membership is the
    conjunction of the full checks at the word itself.
    """

    def pred(w: str) -> bool:
        return all(av.ok(w) for av in avoids)

    def step(w: str) -> bool:
        return all(av.ok_extension(w) for av in avoids)

    return restrict_class(base, pred, name, step=step)
