"""Encoded continuous transformations of Cantor space.

A :class:`CodedMap` is a total, prefix-order-preserving word function whose
output length is controlled by a modulus: for each recorded ``l`` there is a
witness ``m`` such that every input of length ``m`` has an image of length at
least ``l``.  A map is *normalized* when every nonempty input strictly
shrinks, ``|f(σ)| < |σ|``; all system constructions assume normalized maps.

Tables given by rule (the shift, the gadget map of the tree reduction) are
materialized lazily with memoization, so validators and certificate checkers
run uniformly over rule-backed and explicit tables.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .errors import DepthExceeded, ModulusExhausted
from .words import all_words, check_word, letters


class CodedMap:
    """A word-to-word table encoding a continuous self-map of ``k^ω``.

    ``moduli`` maps output lengths to witnessed input lengths; only witnessed
    lengths are recorded and :meth:`modulus` raises :class:`ModulusExhausted`
    beyond them.  ``suffix_step`` marks the fast path ``f(σ) = σ[step:]``.
    """

    __slots__ = ("k", "depth", "name", "moduli", "shrinking", "suffix_step",
                 "columns", "_rule", "_memo")

    def __init__(self, k: int, depth: int, rule: Callable[[str], str],
                 moduli: Mapping[int, int], *, shrinking: bool = False,
                 suffix_step: int | None = None, columns: int | None = None,
                 name: str = "map"):
        self.k = k
        self.depth = depth
        self.name = name
        self.moduli = dict(moduli)
        self.shrinking = shrinking
        self.suffix_step = suffix_step
        self.columns = columns
        self._rule = rule
        self._memo: dict[str, str] = {}

    def __repr__(self):
        return f"CodedMap({self.name}, k={self.k}, depth={self.depth})"

    def apply(self, word: str) -> str:
        if len(word) > self.depth:
            raise DepthExceeded(f"|{word!r}| > depth {self.depth} of {self.name}")
        out = self._memo.get(word)
        if out is None:
            out = self._rule(word)
            self._memo[word] = out
        return out

    def iterate(self, word: str, n: int) -> str:
        """``f^n(word)``; exhausted words collapse to the empty word."""
        cur = word
        for _ in range(n):
            if not cur:
                return ""
            cur = self.apply(cur)
        return cur

    def orbit(self, word: str, steps: int | None = None) -> list[str]:
        """``[f^0(word), …, f^steps(word)]``; default runs until empty."""
        if steps is None:
            steps = len(word)
        out = [word]
        cur = word
        for _ in range(steps):
            cur = self.apply(cur) if cur else ""
            out.append(cur)
        return out

    def modulus(self, l: int) -> int:
        """A witnessed input length forcing outputs of length ≥ ``l``."""
        if l <= 0:
            return 0
        best = None
        for rec_l, m in self.moduli.items():
            if rec_l >= l and (best is None or m < best):
                best = m
        if best is None or best > self.depth:
            raise ModulusExhausted(l, self.name)
        return best

    def check(self, max_len: int | None = None) -> list[str]:
        """Exhaustively check the table invariants up to ``max_len``.

        Returns a list of human-readable violations (empty when clean).
        Order preservation is checked on one-letter extensions, which by
        transitivity covers every prefix pair.
        """
        cap = self.depth if max_len is None else min(max_len, self.depth)
        bad: list[str] = []
        alpha = letters(self.k)
        if self.apply("") != "":
            bad.append(f"f(λ) = {self.apply('')!r} != λ")
        for n in range(cap):
            for w in all_words(self.k, n):
                fw = self.apply(w)
                for a in alpha:
                    fwa = self.apply(w + a)
                    if not fwa.startswith(fw):
                        bad.append(f"order violated: f({w!r})={fw!r} not a prefix of f({w + a!r})={fwa!r}")
        if self.shrinking:
            for n in range(1, cap + 1):
                for w in all_words(self.k, n):
                    if len(self.apply(w)) >= n:
                        bad.append(f"shrink violated at {w!r}: |f| = {len(self.apply(w))}")
        for l, m in sorted(self.moduli.items()):
            if m <= cap:
                for w in all_words(self.k, m):
                    if len(self.apply(w)) < l:
                        bad.append(f"modulus witness {m} fails for l={l} at {w!r}")
                        break
        return bad

    @classmethod
    def from_table(cls, k: int, depth: int, table: Mapping[str, str], *,
                   name: str = "table") -> "CodedMap":
        """Wrap an explicit dense table; totality and letters are enforced,
        moduli are computed by scan, the shrink flag by inspection."""
        tbl = dict(table)
        for n in range(depth + 1):
            for w in all_words(k, n):
                if w not in tbl:
                    raise ValueError(f"table not total: missing {w!r}")
                check_word(tbl[w], k)
        min_out = [min(len(tbl[w]) for w in all_words(k, n)) for n in range(depth + 1)]
        moduli = {0: 0}
        for l in range(1, depth + 1):
            for m in range(depth + 1):
                if min_out[m] >= l:
                    moduli[l] = m
                    break
        shrinking = all(len(tbl[w]) < n for n in range(1, depth + 1) for w in all_words(k, n))
        return cls(k, depth, tbl.__getitem__, moduli, shrinking=shrinking, name=name)


class IterateTable:
    """Memoized table of ``(σ, n) ↦ f^n(σ)`` for a fixed base map."""

    def __init__(self, base: CodedMap, horizon: int | None = None):
        self.base = base
        self.horizon = base.depth if horizon is None else horizon
        self._orbits: dict[str, list[str]] = {}

    def get(self, word: str, n: int) -> str:
        if n > self.horizon:
            raise DepthExceeded(f"iterate count {n} beyond horizon {self.horizon}")
        orb = self._orbits.get(word)
        if orb is None:
            orb = self.base.orbit(word, self.horizon)
            self._orbits[word] = orb
        return orb[n]


def iterate(m: CodedMap, word: str, n: int) -> str:
    """``f^n(word)`` for a normalized map; words consumed to λ stay λ."""
    return m.iterate(word, n)


def normalize(m: CodedMap) -> CodedMap:
    """The shrinking map encoding the same transformation.

    ``f̂(σ)`` is the longest prefix of ``f(σ)`` of length ≤ ``|σ| − 1`` (and
    ``f̂(λ) = λ``); each modulus witness shifts by at most one.
    """
    if m.shrinking:
        return m

    def rule(w: str) -> str:
        if not w:
            return ""
        out = m.apply(w)
        return out[:min(len(out), len(w) - 1)]

    moduli = {0: 0}
    for l, wit in m.moduli.items():
        if l > 0 and max(wit, l + 1) <= m.depth:
            moduli[l] = max(wit, l + 1)
    return CodedMap(m.k, m.depth, rule, moduli, shrinking=True,
                    name=f"normalize({m.name})")


def iterate_map(m: CodedMap, n: int) -> CodedMap:
    """Package ``f^n`` as a CodedMap with the composed modulus.

    The modulus for output length ``l`` is ``m`` composed ``n`` times starting
    from ``l``; if the chain leaves the witnessed range the length is simply
    not recorded, and a map with no surviving witnesses raises
    :class:`ModulusExhausted`.
    """
    if n < 0:
        raise ValueError("negative iterate count")
    if n == 0:
        return CodedMap(m.k, m.depth, lambda w: w, {l: l for l in range(m.depth + 1)},
                        shrinking=False, suffix_step=0, name=f"{m.name}^0")
    moduli = {0: 0}
    for l in range(1, m.depth + 1):
        need = l
        try:
            for _ in range(n):
                need = m.modulus(need)
        except ModulusExhausted:
            continue
        moduli[l] = need
    if len(moduli) == 1:
        raise ModulusExhausted(1, f"{m.name}^{n}: composed modulus exceeds depth")
    step = m.suffix_step * n if m.suffix_step else None
    return CodedMap(m.k, m.depth, lambda w: m.iterate(w, n), moduli,
                    shrinking=m.shrinking, suffix_step=step, name=f"{m.name}^{n}")


def builtin_map(kind: str, k: int, depth: int, *, columns: int | None = None) -> CodedMap:
    """The named normalized map: ``left-shift``, ``identity`` (normalized to
    drop the last letter) or ``column-shift`` over interleaved columns, where
    position ``p`` belongs to column ``p mod columns``."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if kind == "left-shift":
        return CodedMap(k, depth, lambda w: w[1:],
                        {l: l + 1 for l in range(depth)} | {0: 0},
                        shrinking=True, suffix_step=1, name="left-shift")
    if kind == "identity":
        return CodedMap(k, depth, lambda w: w[:-1],
                        {l: l + 1 for l in range(depth)} | {0: 0},
                        shrinking=True, name="identity")
    if kind == "column-shift":
        if not columns or columns < 1:
            raise ValueError("column-shift needs a positive column count")
        c = columns
        return CodedMap(k, depth, lambda w: w[c:],
                        {l: l + c for l in range(depth) if l + c <= depth} | {0: 0},
                        shrinking=True, suffix_step=c, columns=c,
                        name=f"column-shift({c})")
    raise ValueError(f"unsupported builtin map kind {kind!r}")


def random_normalized_map(k: int, depth: int, rng) -> CodedMap:
    """A random shrinking, order-preserving table (used by the test suite).

    Images are grown along one-letter extensions, which makes order
    preservation structural rather than checked.
    """
    alpha = letters(k)
    tbl = {"": ""}
    for n in range(depth):
        for w in all_words(k, n):
            base = tbl[w]
            for a in alpha:
                room = n - len(base)  # |w+a| - 1 - |base|
                grow = rng.randint(0, min(2, room)) if room > 0 else 0
                tbl[w + a] = base + "".join(rng.choice(alpha) for _ in range(grow))
    return CodedMap.from_table(k, depth, tbl, name=f"random({depth})")
