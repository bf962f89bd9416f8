"""Closed classes, dynamical systems, and the two witness-certificate formats.

A :class:`ClosedClass` is a depth-truncated downward-closed set of words given
by a decidable membership predicate, optionally with a stagewise removal
schedule (effectively-closed semantics: membership can only shrink as the
stage grows).  A :class:`DynSystem` pairs a class with a normalized
:class:`~cantordyn.maps.CodedMap` mapping class nodes into the class.

Certificates store explicit witnesses so an independent verifier can re-check
them without re-running the constructions that produced them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import DepthExceeded
from .maps import CodedMap
from .words import all_words, is_prefix, periodic_word, rotations


class ClosedClass:
    """A depth-truncated tree of words.

    ``member`` decides final membership (at the stage horizon); ``member_at``
    decides membership at an earlier stage when a schedule is present.
    ``step`` is an optional incremental form of ``member``: it may assume that
    every proper prefix of its argument is already a member, which is what the
    depth-first searches guarantee along their paths.
    """

    __slots__ = ("k", "depth", "name", "stage_horizon", "_member", "_member_at", "_step")

    def __init__(self, k: int, depth: int, member: Callable[[str], bool], *,
                 member_at: Callable[[str, int], bool] | None = None,
                 step: Callable[[str], bool] | None = None,
                 stage_horizon: int = 0, name: str = "class"):
        self.k = k
        self.depth = depth
        self.name = name
        self.stage_horizon = stage_horizon
        self._member = member
        self._member_at = member_at
        self._step = step

    def __repr__(self):
        return f"ClosedClass({self.name}, k={self.k}, depth={self.depth})"

    def member(self, word: str, stage: int | None = None) -> bool:
        if len(word) > self.depth:
            raise DepthExceeded(f"|word| > depth {self.depth} of {self.name}")
        if stage is not None and self._member_at is not None:
            return self._member_at(word, stage)
        return self._member(word)

    def member_step(self, word: str) -> bool:
        """Membership assuming all proper prefixes are members."""
        if self._step is not None:
            return self._step(word)
        return self._member(word)

    def check(self, max_len: int | None = None) -> list[str]:
        """Downward closure and schedule monotonicity, exhaustively to a cap."""
        cap = self.depth if max_len is None else min(max_len, self.depth)
        bad: list[str] = []
        for n in range(1, cap + 1):
            for w in all_words(self.k, n):
                if self._member(w) and not self._member(w[:-1]):
                    bad.append(f"downward closure violated at {w!r}")
        if self._member_at is not None:
            for n in range(cap + 1):
                for w in all_words(self.k, n):
                    prev = True
                    for s in range(self.stage_horizon + 1):
                        cur = self._member_at(w, s)
                        if cur and not prev:
                            bad.append(f"schedule not monotone at {w!r}, stage {s}")
                            break
                        prev = cur
        return bad


def full_class(k: int, depth: int) -> ClosedClass:
    return ClosedClass(k, depth, lambda w: True, step=lambda w: True, name=f"full({k})")


def forbidden_window_class(k: int, depth: int, words: Iterable[str]) -> ClosedClass:
    """Subshift-of-finite-type tree: no forbidden word occurs at any offset."""
    forb = sorted(set(words))
    if any(not w for w in forb):
        raise ValueError("empty forbidden word")
    lens = sorted({len(w) for w in forb})
    by_len = {t: {w for w in forb if len(w) == t} for t in lens}

    def member(w: str) -> bool:
        return not any(w[i:i + t] in by_len[t] for t in lens for i in range(len(w) - t + 1))

    def step(w: str) -> bool:
        # only windows ending at the new letter can newly fail
        return not any(len(w) >= t and w[-t:] in by_len[t] for t in lens)

    return ClosedClass(k, depth, member, step=step, name=f"sft(~{','.join(forb)})")


def explicit_class(k: int, depth: int, nodes: Iterable[str]) -> ClosedClass:
    """Prefix closure of an explicit node list."""
    listed = sorted(set(nodes))

    def member(w: str) -> bool:
        return any(is_prefix(w, v) for v in listed)

    return ClosedClass(k, depth, member, name="explicit")


def stagewise_class(k: int, depth: int, removals: Iterable[tuple[int, str]],
                    stage_horizon: int) -> ClosedClass:
    """Full tree minus nodes removed (with all extensions) at given stages."""
    sched = sorted((int(s), w) for s, w in removals)

    def member_at(w: str, s: int) -> bool:
        return not any(st <= s and is_prefix(node, w) for st, node in sched)

    return ClosedClass(k, depth, lambda w: member_at(w, stage_horizon),
                       member_at=member_at, stage_horizon=stage_horizon,
                       name="stagewise")


def cylinder_class(base: ClosedClass, word: str) -> ClosedClass:
    """``base`` intersected with the cylinder of ``word`` (prefix closed)."""

    def member(w: str) -> bool:
        return base.member(w) and (is_prefix(w, word) or is_prefix(word, w))

    return ClosedClass(base.k, base.depth, member, name=f"{base.name}∩[{word}]")


def orbit_class(generator: str, k: int, depth: int) -> ClosedClass:
    """Prefix closure of the shift orbit of ``generator^ω`` at depth."""
    points = sorted({periodic_word(r, depth) for r in rotations(generator)})
    cls = explicit_class(k, depth, points)
    cls.name = f"orbit({generator})"
    return cls


def restrict_class(base: ClosedClass, pred: Callable[[str], bool],
                   name: str, *, step: Callable[[str], bool] | None = None) -> ClosedClass:
    """``base`` intersected with a downward-closed predicate.

    ``step`` may be a cheaper form of ``pred`` valid along search paths
    (all proper prefixes already checked).
    """

    def member(w: str) -> bool:
        return base.member(w) and pred(w)

    def member_step(w: str) -> bool:
        return base.member_step(w) and (pred(w) if step is None else step(w))

    return ClosedClass(base.k, base.depth, member, step=member_step, name=name)


@dataclass(frozen=True)
class DynSystem:
    """A closed class together with a normalized map acting on it."""

    space: ClosedClass
    map: CodedMap

    def __post_init__(self):
        if self.space.k != self.map.k:
            raise ValueError("alphabet mismatch between class and map")

    @property
    def k(self) -> int:
        return self.space.k

    @property
    def depth(self) -> int:
        return self.space.depth

    def point(self, prefix: str) -> "PointApprox":
        return PointApprox(prefix, self)


@dataclass(frozen=True)
class PointApprox:
    """A depth-long prefix of a point of the parent system's class."""

    prefix: str
    system: DynSystem

    def __post_init__(self):
        if len(self.prefix) != self.system.depth:
            raise ValueError("point prefix must have full depth")

    def check_membership(self) -> bool:
        sp = self.system.space
        return all(sp.member(self.prefix[:i]) for i in range(len(self.prefix) + 1))


@dataclass(frozen=True)
class RecCert:
    """Recurrence witnesses: one ``(c, n, l)`` row per cylinder length with
    ``f^n(X↾l) ⪰ X↾c``."""

    entries: tuple[tuple[int, int, int], ...]

    def to_json(self):
        return {"entries": [list(e) for e in self.entries]}


@dataclass(frozen=True)
class APRow:
    """One almost-periodicity row: cylinder length ``c``, gap bound ``b``, and
    a witness ``k < b`` for every start ``n`` in the decidable range
    ``0 ≤ n ≤ N − b − c`` (``None`` marks starts with no room at depth)."""

    c: int
    b: int
    witnesses: tuple[int | None, ...]


@dataclass(frozen=True)
class APCert:
    rows: tuple[APRow, ...]

    def to_json(self):
        return {"rows": [{"c": r.c, "b": r.b,
                          "witnesses": [w if w is not None else None for w in r.witnesses]}
                         for r in self.rows]}


@dataclass
class Report:
    """Diagnostic report: a list of (condition, witness, detail) violations."""

    entries: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.entries

    def add(self, condition: str, witness: str, detail: str = ""):
        self.entries.append((condition, witness, detail))

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"{c} @ {w!r}" + (f" ({d})" if d else "")
                         for c, w, d in self.entries)

    def to_json(self):
        return {"ok": self.ok,
                "violations": [{"condition": c, "witness": w, "detail": d}
                               for c, w, d in self.entries]}


def validate_system(sys_: DynSystem, max_len: int | None = None) -> Report:
    """Check the four system conditions at depth, exhaustively up to a cap.

    The cap defaults to ``min(depth, 12)``; beyond it the class is too wide to
    scan and rule-level construction is trusted.  Nonemptiness at full depth
    is always checked by search.
    """
    from .search import find_member

    cap = min(sys_.depth, 12) if max_len is None else min(max_len, sys_.depth)
    rep = Report()
    for msg in sys_.space.check(cap):
        rep.add("tree", "", msg)
    for msg in sys_.map.check(cap):
        rep.add("map", "", msg)
    if not sys_.space.member(""):
        rep.add("nonempty", "", "root not a member")
    elif find_member(sys_.space, sys_.depth) is None:
        rep.add("nonempty", "", f"no member of length {sys_.depth}")
    for n in range(cap + 1):
        for w in all_words(sys_.k, n):
            if sys_.space.member(w):
                fw = sys_.map.apply(w)
                if not sys_.space.member(fw):
                    rep.add("forward-invariance", w, f"f({w!r}) = {fw!r} leaves the class")
    return rep


def orbit(X: PointApprox, steps: int) -> list[str]:
    """``[f^0(X↾N), …, f^steps(X↾N)]``."""
    if steps > X.system.depth:
        raise ValueError("steps beyond depth")
    return X.system.map.orbit(X.prefix, steps)


def verify_recurrence(X: PointApprox, cert: RecCert) -> bool:
    """Check every row ``(c, n, l)``: ``l > c``, ``n ≥ 1`` and
    ``f^n(X↾l) ⪰ X↾c`` with the iterate long enough to decide.

    Rows produced by the constructions always satisfy the stronger ``n > c``;
    verification accepts any positive return time.
    """
    N = X.system.depth
    f = X.system.map
    for c, n, l in cert.entries:
        if not (0 < l <= N and l > c and n >= 1):
            return False
        if l > len(X.prefix):
            raise DepthExceeded(f"certificate row beyond depth: l={l}")
        it = f.iterate(X.prefix[:l], n)
        if len(it) < c or not it.startswith(X.prefix[:c]):
            return False
    return True


def verify_ap(X: PointApprox, cert: APCert) -> bool:
    """Check the bounded-gap form row by row.

    For row ``(c, b)`` every start ``n ≤ N − b − c`` must carry a witness
    ``k < b`` with ``f^{n+k}(X↾N) ⪰ X↾c``; larger ``n`` leave no room to
    decide an extension of length ``c`` at depth and are not constrained.
    """
    N = X.system.depth
    f = X.system.map
    orb = f.orbit(X.prefix, N)
    for row in cert.rows:
        c, b = row.c, row.b
        if b < 1 or c < 1:
            return False
        last = N - b - c
        if len(row.witnesses) != max(0, last + 1):
            return False
        for n in range(last + 1):
            k = row.witnesses[n]
            if k is None or not 0 <= k < b:
                return False
            it = orb[n + k]
            if len(it) < c or not it.startswith(X.prefix[:c]):
                return False
    return True


def search_ap_row(X: PointApprox, c: int, b: int) -> APRow | None:
    """Try to witness row ``(c, b)`` directly on the orbit of ``X``."""
    N = X.system.depth
    orb = X.system.map.orbit(X.prefix, N)
    target = X.prefix[:c]
    last = N - b - c
    if last < 0:
        return None
    wit: list[int | None] = []
    for n in range(last + 1):
        found = None
        for k in range(b):
            it = orb[n + k]
            if len(it) >= c and it.startswith(target):
                found = k
                break
        if found is None:
            return None
        wit.append(found)
    return APRow(c, b, tuple(wit))


def rec_cert_from_ap(X: PointApprox, cert: APCert) -> RecCert:
    """Every verifying AP certificate yields a verifying recurrence
    certificate: an almost periodic point is a recurrent point."""
    entries = []
    for row in cert.rows:
        n0 = row.c + 1  # return time strictly beyond the cylinder length
        if n0 < len(row.witnesses) and row.witnesses[n0] is not None:
            entries.append((row.c, n0 + row.witnesses[n0], X.system.depth))
    return RecCert(tuple(entries))
