"""Minimal subsystems and the halting-bit coding systems.

The greedy chain asks, in length-lexicographic order, whether each basic
cylinder can be removed: the candidate class keeps only words none of whose
iterates (up to their own length) enter the cylinder, and the removal is
adopted exactly when that class still has a full-depth member.  Cylinders
extending an adopted one are skipped: their removal is already implied.

The bit coders realize the stagewise classes of the halting coding: until the
simulated entry stage the class is the switch tree (prefixes of ``0^a 1^ω``
and ``1^a 0^ω``); at a finite entry stage ``t`` it refines to the periodic
orbit class generated by ``(0^t 1^t)^ω``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotMinimal, UndecidedAtDepth
from .maps import builtin_map
from .search import (OrbitAvoidance, avoidance_class, death_length,
                     find_member, iter_members)
from .systems import ClosedClass, DynSystem, orbit_class
from .words import is_prefix, periodic_word, rotations, words_up_to


@dataclass(frozen=True)
class RemovalStage:
    index: int
    word: str
    pruned: bool
    vacuous: bool
    class_after: ClosedClass


@dataclass
class RemovalChain:
    stages: list[RemovalStage] = field(default_factory=list)

    def pruned_words(self) -> list[str]:
        return [st.word for st in self.stages if st.pruned and not st.vacuous]

    def to_json(self):
        return [{"word": st.word, "pruned": st.pruned, "vacuous": st.vacuous}
                for st in self.stages]


def minimal_subsystem(sys_: DynSystem, enum_len: int = 4) -> tuple[DynSystem, RemovalChain]:
    """Greedy minimal-subsystem extraction over cylinders of length ≤ ``enum_len``.

    Returns the pruned system and the audit chain.  The enumeration order
    (length-lexicographic) is part of the reproducibility contract: a
    different order can land on a different, equally minimal subsystem.
    """
    f = sys_.map
    N = sys_.depth
    current = sys_.space
    adopted: list[str] = []
    chain = RemovalChain()
    idx = 0
    for word in words_up_to(sys_.k, enum_len):
        if not word:
            continue
        idx += 1
        if any(is_prefix(p, word) for p in adopted):
            # removal already implied; the class is unchanged
            chain.stages.append(RemovalStage(idx, word, True, True, current))
            continue
        candidate = avoidance_class(
            sys_.space, [OrbitAvoidance(f, adopted + [word])],
            name=f"{sys_.space.name}\\[{','.join(adopted + [word])}]")
        if find_member(candidate, N) is not None:
            adopted.append(word)
            current = candidate
            chain.stages.append(RemovalStage(idx, word, True, False, current))
        else:
            chain.stages.append(RemovalStage(idx, word, False, False, current))
    return DynSystem(current, f), chain


def ap_bound_from_minimal(sys_: DynSystem, tau: str) -> int:
    """Least ``b`` such that no length-``b`` word avoids the cylinder of
    ``tau`` along its whole orbit: every full-depth member re-enters
    ``[tau]`` within ``b`` steps.

    Raises :class:`NotMinimal` with a witness when the avoidance tree reaches
    full depth, exhibiting a proper subsystem candidate.
    """
    avoid = OrbitAvoidance(sys_.map, [tau])
    cls = avoidance_class(sys_.space, [avoid], name=f"{sys_.space.name}~[{tau}]")
    b = death_length(cls, sys_.depth)
    if b is None:
        witness = find_member(cls, sys_.depth)
        raise NotMinimal(witness)
    return b


@dataclass(frozen=True)
class HaltingSim:
    """Finite stand-in for the halting set: each index gets a finite entry
    stage or ``None`` for never."""

    bits: tuple[tuple[int, int | None], ...]
    stage_horizon: int

    def __post_init__(self):
        for n, t in self.bits:
            if t is not None and not 1 <= t <= self.stage_horizon:
                raise ValueError(f"entry stage for bit {n} must be in 1..{self.stage_horizon} or None")

    def stage_of(self, n: int) -> int | None:
        for idx, t in self.bits:
            if idx == n:
                return t
        raise KeyError(f"no simulated bit {n}")


@dataclass(frozen=True)
class PeriodicOrbitClass:
    """The ``2·i``-element orbit of ``(0^i 1^i)^ω`` at depth."""

    i: int
    members: tuple[str, ...]
    space: ClosedClass


def s_orbit(i: int, depth: int) -> PeriodicOrbitClass:
    gen = "0" * i + "1" * i
    members = tuple(sorted(periodic_word(r, depth) for r in rotations(gen)))
    return PeriodicOrbitClass(i, members, orbit_class(gen, 2, depth))


def _is_switch(w: str) -> bool:
    """Words of shape 0^a 1^b or 1^a 0^b."""
    changes = sum(1 for i in range(1, len(w)) if w[i] != w[i - 1])
    return changes <= 1


def build_bit_coder(n: int, sim: HaltingSim, depth: int) -> ClosedClass:
    """Stagewise class coding one simulated bit.

    Never-halting bits give the switch tree; a finite entry stage ``t``
    refines the schedule to the orbit class of ``(0^t 1^t)^ω`` from stage
    ``t`` on (compatible with the earlier switch stages).
    """
    t = sim.stage_of(n)
    horizon = sim.stage_horizon
    orbit_words = None if t is None else s_orbit(t, depth).members

    def member_at(w: str, s: int) -> bool:
        switch_level = min(len(w), s if t is None else min(s, t - 1))
        if not _is_switch(w[:switch_level]):
            return False
        if t is not None and s >= t:
            return any(v.startswith(w) for v in orbit_words)
        return True

    return ClosedClass(2, depth, lambda w: member_at(w, horizon),
                       member_at=member_at, stage_horizon=horizon,
                       name=f"bit{n}(t={'inf' if t is None else t})")


def product_system(parts: list[ClosedClass]) -> DynSystem:
    """Interleaved-column product: position ``p`` belongs to column
    ``p mod columns``, and the map shifts every column at once."""
    if not parts:
        raise ValueError("empty product")
    cols = len(parts)
    depth0 = parts[0].depth
    if any(p.depth != depth0 or p.k != parts[0].k for p in parts):
        raise ValueError("column-count mismatch: parts must share alphabet and depth")
    depth = cols * depth0

    def member(w: str) -> bool:
        return all(parts[n].member(w[n::cols]) for n in range(cols))

    def step(w: str) -> bool:
        n = (len(w) - 1) % cols
        return parts[n].member(w[n::cols])

    def member_at(w: str, s: int) -> bool:
        return all(parts[n].member(w[n::cols], stage=s) for n in range(cols))

    horizon = max(p.stage_horizon for p in parts)
    space = ClosedClass(parts[0].k, depth, member, member_at=member_at, step=step,
                        stage_horizon=horizon, name=f"product({cols})")
    return DynSystem(space, builtin_map("column-shift", parts[0].k, depth, columns=cols))


def decode_bit(minimal_sys: DynSystem, n: int, member_limit: int = 4096) -> bool:
    """True iff some member's column ``n`` extends ``01``.

    Full-depth members of a minimal class carry a single orbit phase, so the
    scan walks each member's iterates (which are members themselves): the
    column word must show ``0`` then ``1`` at some consecutive rows.  Requires
    a column-shift system and at least two rows of the column at depth.
    """
    cols = minimal_sys.map.columns
    if cols is None:
        raise ValueError("decode_bit needs a column-shift system")
    if not 0 <= n < cols:
        raise ValueError(f"column {n} out of range")
    if n + cols + 1 > minimal_sys.depth:
        raise UndecidedAtDepth(f"column {n} has fewer than 2 letters at depth {minimal_sys.depth}")
    members = iter_members(minimal_sys.space, minimal_sys.depth, limit=member_limit)
    if len(members) == member_limit:
        raise UndecidedAtDepth("class too wide to scan; not minimal at depth?")
    return any("01" in w[n::cols] for w in members)
