"""Recurrent points: the ternary tree-reduction gadget and the cover-stage
construction of a recurrent point.

The gadget embeds binary tree-path search into recurrence over alphabet 3:
paths of the source tree are fixed by the map, non-paths are pushed along in
increasing lexicographic order, looping through the extra letter ``2``.  The
brute-force oracle pads scan words with zeros out to the gadget's working
depth; it needs that depth to be at least ``2·scan_depth + 1``, so a deviation
anywhere in the scanned prefix still has room to show a missing return.

The recurrent-point construction computes nested cover stages ``(U_i, V_i,
s_i)``: stage-``i`` elements strictly extend stage-``(i-1)`` elements and
return to their own length-``(i-1)`` prefix within ``s_i`` steps (with return
time at least ``i-1``), every member of ``V_i`` reaches ``U_i`` within
``s_i`` steps, and every class member of length ``s_i`` extends an element of
``V_i``.  The nesting makes a full-depth word extending the last stage carry
returns at every smaller precision; the emitted certificate rows are found by
a direct scan of that word's orbit and re-verified independently.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyClassError, HorizonExhausted
from .maps import CodedMap
from .search import CylinderCompat, find_member, iter_members, parallel_map
from .systems import ClosedClass, DynSystem, PointApprox, RecCert, Report, full_class
from .words import all_words, letters

_STAGE_ENUM_CAP = 18          # covering checks enumerate 2^s members
_STORE_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class TernaryGadget:
    """A binary tree viewed inside alphabet 3, with its searching map."""

    source_tree: ClosedClass
    system: DynSystem


def build_ternary_gadget(tree: ClosedClass) -> TernaryGadget:
    """The system ``(3^{≤N}, f)`` whose recurrent points are the tree's paths.

    For a word that is on the tree the map drops the last letter; otherwise
    the shortest off-tree prefix ``π`` determines a lexicographic successor,
    with ``2`` wrapping around to the all-zero word.
    """
    if tree.k != 2:
        raise ValueError("source tree must be over alphabet 2")
    depth = tree.depth
    pi_memo: dict[str, str | None] = {"": None}

    def shortest_off_tree(w: str) -> str | None:
        got = pi_memo.get(w)
        if got is not None or w in pi_memo:
            return got
        parent = shortest_off_tree(w[:-1])
        if parent is not None:
            res = parent
        elif w[-1] != "2" and tree.member(w):
            res = None
        else:
            res = w
        pi_memo[w] = res
        return res

    def rule(w: str) -> str:
        if not w:
            return ""
        n = len(w) - 1
        p = shortest_off_tree(w)
        if p is None:
            return w[:n]
        if p == "2":
            return "0" * n
        if p[-1] == "2":
            rho, branch = p[:-2], p[-2]
        else:
            rho, branch = p[:-1], p[-1]
        succ = "1" if branch == "0" else "2"
        return (rho + succ + "0" * n)[:n]

    gadget_map = CodedMap(3, depth, rule, {l: l + 1 for l in range(depth)} | {0: 0},
                          shrinking=True, name="gadget")
    malformed = tree.check(min(depth, 10))
    if malformed:
        raise ValueError(f"malformed tree: {malformed[0]}")
    return TernaryGadget(tree, DynSystem(full_class(3, depth), gadget_map))


def _padded_certifies(f: CodedMap, word: str, depth: int, c_max: int) -> bool:
    pad = word + "0" * (depth - len(word))
    orb = f.orbit(pad, depth)
    for c in range(1, c_max + 1):
        target = pad[:c]
        if not any(len(orb[n]) >= c and orb[n].startswith(target)
                   for n in range(c + 1, depth + 1)):
            return False
    return True


def gadget_recurrent_set(tree: ClosedClass, scan_depth: int) -> set[str]:
    """Depth-``scan_depth`` ternary words whose zero-padding admits a full
    recurrence certificate in the gadget system (brute force)."""
    if tree.depth < 2 * scan_depth + 1:
        raise ValueError("tree depth must be at least 2*scan_depth + 1 for the oracle")
    gadget = build_ternary_gadget(tree)
    f = gadget.system.map
    scan = list(all_words(3, scan_depth))
    flags = parallel_map(lambda w: _padded_certifies(f, w, tree.depth, scan_depth), scan)
    return {w for w, ok in zip(scan, flags) if ok}


def gadget_recurrent_equals_paths(tree: ClosedClass, scan_depth: int) -> bool:
    """Brute-force oracle: the recurrent set at ``scan_depth`` equals the set
    of depth-``scan_depth`` tree members.

    Exact for trees whose depth-``scan_depth`` members all survive to the
    tree's own working depth (in particular for trees whose membership is
    determined at ``scan_depth``).
    """
    recurrent = gadget_recurrent_set(tree, scan_depth)
    members = {w for w in all_words(2, scan_depth) if tree.member(w)}
    return recurrent == members


@dataclass(frozen=True)
class CoverStage:
    """Audit record of one construction stage."""

    i: int
    s: int
    U: tuple[str, ...]
    V: tuple[str, ...]


class _StageState:
    """Return-time and qualification memos for stage ``i``: elements return
    at precision ``i - 1`` with return time at least ``i - 1``."""

    def __init__(self, f: CodedMap, depth: int, i: int, prev_store: frozenset[str]):
        self.f = f
        self.depth = depth
        self.i = i
        self.precision = i - 1
        self.prev_store = prev_store
        self._ret: dict[str, int | None] = {}

    def ret(self, w: str) -> int | None:
        """Least ``n ≥ i-1`` with ``f^n(w) ⪰ w↾(i-1)`` (None when none)."""
        p = self.precision
        if p == 0:
            return 0
        if len(w) <= p:
            return None
        got = self._ret.get(w, -1)
        if got != -1:
            return got
        target = w[:p]
        cur = w
        res = None
        for n in range(1, self.depth + 1):
            cur = self.f.apply(cur) if cur else ""
            if n >= p and len(cur) >= p and cur.startswith(target):
                res = n
                break
            if not cur:
                break
        self._ret[w] = res
        return res

    def ancestor_ok(self, w: str) -> bool:
        """Some proper prefix is in the previous stage's store."""
        return any(w[:t] in self.prev_store for t in range(len(w)))

    def qualifies(self, w: str, s: int) -> bool:
        if not self.ancestor_ok(w):
            return False
        r = self.ret(w)
        return r is not None and r <= s


def _covered(state: _StageState, v: str, s: int) -> bool:
    """V-condition: some iterate of ``v`` within ``s`` steps extends a
    stage-``i`` qualifying word."""
    cur = v
    for n in range(s + 1):
        for t in range(len(cur), 0, -1):
            if state.qualifies(cur[:t], s):
                return True
        if not cur:
            break
        cur = state.f.apply(cur)
    return False


def _store_stage(state: _StageState, s: int, k: int) -> list[str]:
    """Minimal qualifying words, up to the length where qualification is
    determined by the prefix (suffix maps) or the working depth."""
    step = state.f.suffix_step
    prev_max = max((len(w) for w in state.prev_store), default=0)
    if step:
        cap = max(s * step + state.precision, prev_max + 1, 1)
        cap = min(cap, state.depth)
    else:
        cap = state.depth
    alpha = letters(k)
    out: list[str] = []
    budget = _STORE_NODE_BUDGET

    def rec(w: str):
        nonlocal budget
        budget -= 1
        if budget <= 0:
            raise HorizonExhausted(f"stage {state.i}: store enumeration budget exceeded")
        if state.qualifies(w, s):
            out.append(w)
            return
        if len(w) >= cap:
            return
        for a in alpha:
            rec(w + a)

    rec("")
    return out


def construct_recurrent_point(sys_: DynSystem, stages: int = 6,
                              c_max: int | None = None
                              ) -> tuple[PointApprox, RecCert, list[CoverStage]]:
    """Run the cover-stage construction and return the lexicographically
    least full-depth survivor with its recurrence certificate.

    ``c_max`` bounds the certificate rows (default ``stages - 1``); each row
    is found by scanning the survivor's orbit and re-verified independently.
    Raises :class:`EmptyClassError` when the class has no full-depth member
    and :class:`HorizonExhausted` when some stage bound exceeds the depth.
    """
    f = sys_.map
    N = sys_.depth
    if c_max is None:
        c_max = max(1, stages - 1)
    if find_member(sys_.space, N) is None:
        raise EmptyClassError(f"{sys_.space.name} has no member of length {N}")

    stage_records = [CoverStage(0, 0, ("",), ("",))]
    prev_store = frozenset([""])
    for i in range(1, stages + 1):
        state = _StageState(f, N, i, prev_store)
        s_found = None
        for s in range(max(1, i - 1), N + 1):
            if s > _STAGE_ENUM_CAP:
                raise HorizonExhausted(f"stage {i}: covering scan beyond 2^{s}",
                                       partial=stage_records)
            members = iter_members(sys_.space, s)
            if all(_covered(state, v, s) for v in members):
                s_found = s
                break
        if s_found is None:
            raise HorizonExhausted(f"stage {i}: no covering bound within depth {N}",
                                   partial=stage_records)
        store = _store_stage(state, s_found, sys_.k)
        if not store:
            raise HorizonExhausted(f"stage {i}: no qualifying words at bound {s_found}",
                                   partial=stage_records)
        V = tuple(iter_members(sys_.space, s_found))
        stage_records.append(CoverStage(i, s_found, tuple(sorted(store)), V))
        prev_store = frozenset(store)

    point_word = find_member(sys_.space, N, [CylinderCompat(sorted(prev_store))])
    if point_word is None:
        raise HorizonExhausted("no full-depth member extends the final stage",
                               partial=stage_records)
    X = sys_.point(point_word)

    orb = f.orbit(point_word, N)
    entries = []
    for c in range(1, c_max + 1):
        hit = None
        for n in range(c + 1, N + 1):
            if len(orb[n]) >= c and orb[n].startswith(point_word[:c]):
                hit = n
                break
        if hit is None:
            raise HorizonExhausted(f"no return at precision {c} for {point_word!r}",
                                   partial=stage_records)
        entries.append((c, hit, N))
    return X, RecCert(tuple(entries)), stage_records


def audit_cover_stages(sys_: DynSystem, stages: list[CoverStage]) -> Report:
    """Independently re-check the three stored-stage invariants.

    Stage-``i`` elements return at precision ``i - 1`` with return time in
    ``[i - 1, s_i]``, matching the construction formula.
    """
    f = sys_.map
    rep = Report()
    for idx, st in enumerate(stages):
        i, s = st.i, st.s
        p = max(i - 1, 0)
        for tau in st.U:
            ok = False
            cur = tau
            for n in range(s + 1):
                if n >= p and len(cur) >= p and cur.startswith(tau[:p]):
                    ok = True
                    break
                cur = f.apply(cur) if cur else ""
            if not ok:
                rep.add("cover-return", tau, f"stage {i}: no return within {s}")
        ustore = set(st.U)
        for v in st.V:
            cur = v
            ok = False
            for n in range(s + 1):
                if any(cur.startswith(tau) for tau in ustore):
                    ok = True
                    break
                cur = f.apply(cur) if cur else ""
            if not ok:
                rep.add("cover-reach", v, f"stage {i}: does not reach U within {s}")
        vset = set(st.V)
        for w in iter_members(sys_.space, s):
            if not any(w.startswith(v) for v in vset):
                rep.add("cover-open", w, f"stage {i}: member not covered by V")
        if idx > 0:
            prev = set(stages[idx - 1].U)
            for tau in st.U:
                if not any(tau != q and tau.startswith(q) for q in prev):
                    rep.add("cover-nesting", tau, f"stage {i}: no strict U_{i-1} ancestor")
    return rep
