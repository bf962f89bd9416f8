"""Piece-wise iterate certificates and the refinement-forcing calculus.

A refinement ``(D, g) ≤ (C, f)`` is a subsystem whose map is a piece-wise
combination of iterates of the parent's map: on every cylinder of length
``l`` the new map equals a fixed iterate ``f^j`` with ``j ≤ b``.  The
certificate ``(l, b, j)`` is what every construction here carries and what
the independent soundness check re-verifies.

``meet_or_avoid`` either avoids an open request forever or refines into it;
``least_element_forcing`` pins the least witness of a Δ₁ formula;
``nbh_periodicity`` produces a subsystem with a uniform return bound to every
surviving cylinder of a fixed length; ``construct_ap_point`` interleaves the
two kinds of stages and emits an almost-periodicity certificate over the
original map.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .errors import HorizonExhausted, InconsistentDepth, ModulusExhausted
from .maps import CodedMap
from .search import (OrbitAvoidance, PredicateAvoidance, avoidance_class,
                     death_length, find_member, iter_members)
from .systems import (APCert, APRow, DynSystem, PointApprox, Report,
                      restrict_class, search_ap_row)
from .words import all_words, words_up_to

_MEMBER_ENUM_GUARD = 20000


class PiecewiseIterate:
    """Certificate ``(l, b, j)`` over a base map: the induced map sends σ with
    ``|σ| ≥ l`` to ``f^{j(σ↾l)}(σ)`` and everything shorter to λ.

    The exponent table is total on length-``l`` words but evaluated lazily,
    so certificates with large ``l`` stay usable.
    """

    __slots__ = ("l", "b", "base", "_jfunc", "_jmemo", "_induced")

    def __init__(self, l: int, b: int, base: CodedMap, jfunc: Callable[[str], int]):
        if l < 0 or b < 1:
            raise ValueError("need l >= 0 and b >= 1")
        self.l = l
        self.b = b
        self.base = base
        self._jfunc = jfunc
        self._jmemo: dict[str, int] = {}
        self._induced: CodedMap | None = None

    def j(self, w: str) -> int:
        if len(w) != self.l:
            raise ValueError(f"lookup word must have length {self.l}")
        got = self._jmemo.get(w)
        if got is None:
            got = self._jfunc(w)
            if not 1 <= got <= self.b:
                raise ValueError(f"exponent {got} outside 1..{self.b}")
            self._jmemo[w] = got
        return got

    def induced(self) -> CodedMap:
        """The induced map, cached so identity comparisons work along chains."""
        if self._induced is None:
            base, l = self.base, self.l

            def rule(w: str) -> str:
                if len(w) < l:
                    return ""
                return base.iterate(w, self.j(w[:l]))

            moduli = {0: 0}
            for t in range(1, base.depth + 1):
                need = t
                try:
                    for _ in range(self.b):
                        need = base.modulus(need)
                except ModulusExhausted:
                    continue
                need = max(need, l)
                if need <= base.depth:
                    moduli[t] = need
            self._induced = CodedMap(base.k, base.depth, rule, moduli,
                                     shrinking=base.shrinking,
                                     name=f"pw(l={l},b={self.b})∘{base.name}")
        return self._induced

    def j_table(self, limit: int = 4096) -> dict[str, int] | None:
        """Materialize the exponent table when small enough to serialize."""
        if self.base.k ** self.l > limit:
            return None
        return {w: self.j(w) for w in all_words(self.base.k, self.l)}


def trivial_cert(base: CodedMap) -> PiecewiseIterate:
    """The subsystem certificate: one iterate everywhere (g = f)."""
    return PiecewiseIterate(0, 1, base, lambda w: 1)


def induced_map(cert: PiecewiseIterate) -> CodedMap:
    return cert.induced()


def compose(outer: PiecewiseIterate, inner: PiecewiseIterate) -> PiecewiseIterate:
    """Certificate for the composition: ``outer`` over the map induced by
    ``inner`` becomes a single certificate over ``inner``'s base.

    The lookup length is the least one past which every intermediate iterate
    is still long enough for the inner lookups; the exponent is the sum of the
    inner exponents along the outer iteration.
    """
    g = outer.base
    if inner._induced is not g and not _maps_agree(inner.induced(), g):
        raise ValueError("outer certificate is not over the map induced by inner")
    f = inner.base
    b3 = inner.b * outer.b
    need = inner.l + 1
    try:
        for _ in range(outer.b - 1):
            need = g.modulus(need)
    except ModulusExhausted as e:
        raise HorizonExhausted(f"depth-insufficient: {e}") from e
    l3 = max(outer.l + 1, need)
    if l3 > f.depth:
        raise HorizonExhausted(f"depth-insufficient: lookup length {l3} exceeds depth {f.depth}")

    def j3(w: str) -> int:
        m = outer.j(w[: outer.l])
        total = 0
        cur = w
        for _ in range(m):
            total += inner.j(cur[: inner.l])
            cur = g.apply(cur)
        return total

    return PiecewiseIterate(l3, b3, f, j3)


def _maps_agree(a: CodedMap, b: CodedMap, max_len: int = 8) -> bool:
    if a.k != b.k or a.depth != b.depth:
        return False
    cap = min(max_len, a.depth)
    return all(a.apply(w) == b.apply(w) for w in words_up_to(a.k, cap))


@dataclass(frozen=True)
class Refinement:
    child: DynSystem
    parent: DynSystem
    cert: PiecewiseIterate
    case: str = ""
    meta: dict = field(default_factory=dict)


def check_refinement_cert(r: Refinement, max_len: int = 12) -> Report:
    """Cert soundness, exhaustive: the child's map equals ``f^{j(σ↾l)}(σ)``
    for every σ with ``l ≤ |σ| ≤ max_len``."""
    rep = Report()
    cert = r.cert
    f = cert.base
    cap = min(max_len, r.child.depth)
    for n in range(cert.l, cap + 1):
        for w in all_words(f.k, n):
            want = f.iterate(w, cert.j(w[: cert.l]))
            got = r.child.map.apply(w)
            if got != want:
                rep.add("cert-soundness", w, f"child map {got!r} != f^j {want!r}")
    return rep


def check_piecewise_samples(cert: PiecewiseIterate, against: CodedMap,
                            samples: int, seed: int = 0) -> Report:
    """Sampled cert soundness for depths too wide to scan."""
    rep = Report()
    rng = random.Random(seed)
    f = cert.base
    alpha = "012"[: f.k]
    for _ in range(samples):
        n = rng.randint(cert.l, f.depth)
        w = "".join(rng.choice(alpha) for _ in range(n))
        want = f.iterate(w, cert.j(w[: cert.l]))
        if against.apply(w) != want:
            rep.add("cert-soundness", w, "sampled mismatch")
    return rep


def return_bound_check(r: Refinement, X: PointApprox) -> bool:
    """Bounded returns into the child: for every start ``n`` some ``k ≤ b``
    puts the orbit word back inside the child's tree."""
    b = r.cert.b
    N = X.system.depth
    orb = X.system.map.orbit(X.prefix, N)
    space = r.child.space
    for n in range(N - b + 1):
        if not any(space.member(orb[n + k]) for k in range(b + 1) if n + k <= N):
            return False
    return True


@dataclass(frozen=True)
class OpenRequest:
    """A stagewise enumerated set of strings; ``at(s)`` is cumulative."""

    name: str
    entries: tuple[tuple[int, str], ...]

    @staticmethod
    def static(name: str, words) -> "OpenRequest":
        return OpenRequest(name, tuple((0, w) for w in sorted(set(words))))

    def at(self, s: int) -> frozenset[str]:
        return frozenset(w for st, w in self.entries if st <= s)

    def short_elements(self, s: int, k: int) -> list[str]:
        return sorted(w for st, w in self.entries if st <= s and len(w) <= s)

    def make_avoidance(self, f: CodedMap) -> "RequestAvoidance":
        return RequestAvoidance(f, self)


@dataclass(frozen=True)
class PredicateRequest:
    """An open set given by a decidable predicate on words (stage-free)."""

    name: str
    pred: Callable[[str], bool]

    def short_elements(self, s: int, k: int) -> list[str]:
        return [w for w in words_up_to(k, s) if self.pred(w)]

    def make_avoidance(self, f: CodedMap) -> PredicateAvoidance:
        return PredicateAvoidance(f, self.pred, label=f"avoid({self.name})")


class RequestAvoidance:
    """D₀ condition for a stagewise request: no iterate, up to the word's own
    length, extends an element enumerated by that stage."""

    __slots__ = ("map", "min_stage", "lens", "label")

    def __init__(self, map_: CodedMap, request: OpenRequest):
        self.map = map_
        self.min_stage: dict[str, int] = {}
        for st, w in request.entries:
            cur = self.min_stage.get(w)
            if cur is None or st < cur:
                self.min_stage[w] = st
        self.lens = sorted({len(w) for w in self.min_stage})
        self.label = f"avoid({request.name})"

    def ok(self, word: str) -> bool:
        L = len(word)
        cur = word
        for _ in range(L + 1):
            for t in self.lens:
                if len(cur) >= t:
                    st = self.min_stage.get(cur[:t])
                    if st is not None and st <= L:
                        return False
            if not cur:
                break
            cur = self.map.apply(cur)
        return True

    ok_extension = ok


def meet_or_avoid(sys_: DynSystem, request) -> tuple[Refinement, str]:
    """Refine to avoid the request forever, or into it.

    Avoid: the words none of whose iterates (within their own length) extend
    an enumerated element still reach full depth; they form the child with
    the same map.  Meet: the avoidance tree dies at length ``s``; the child
    keeps words that are short or extend a by-stage-``s`` element, with the
    induced map jumping each long-enough word forward until it lands inside.
    The meet child is reached from anywhere in the parent within ``s + 1``
    steps of the parent map.
    """
    f = sys_.map
    N = sys_.depth
    space = sys_.space
    avoid = request.make_avoidance(f)
    d0 = avoidance_class(space, [avoid], name=f"{space.name}~{request.name}")
    if find_member(d0, N) is not None:
        child = DynSystem(d0, f)
        return Refinement(child, sys_, trivial_cert(f), case="avoid",
                          meta={"request": request.name}), "avoid"

    s = death_length(d0, N)
    assert s is not None
    targets = request.short_elements(s, sys_.k)
    if not targets:
        raise HorizonExhausted(f"meet case with no short elements at stage {s}")
    tset = sorted(set(targets))

    def d1_pred(w: str) -> bool:
        return len(w) < s or any(w.startswith(t) for t in tset)

    d1 = restrict_class(space, d1_pred, name=f"{space.name}→{request.name}")
    l = f.modulus(s)

    def jfunc(w: str) -> int:
        if not space.member(w):
            return 1
        cur = w
        for k in range(1, s + 2):
            cur = f.apply(cur)
            if any(cur.startswith(t) for t in tset):
                return k
        raise HorizonExhausted(f"no landing exponent for {w!r} within {s + 1}")

    cert = PiecewiseIterate(l, s + 1, f, jfunc)
    child = DynSystem(d1, cert.induced())
    return Refinement(child, sys_, cert, case="meet",
                      meta={"request": request.name, "s": s, "reach_back": s + 1}), "meet"


@dataclass(frozen=True)
class Phi1Predicate:
    """A decidable two-place formula with an optional word parameter."""

    name: str
    fn: Callable[[int, str, str | None], bool]
    param: str | None = None

    def __call__(self, m: int, tau: str) -> bool:
        return self.fn(m, tau, self.param)


def least_element_forcing(sys_: DynSystem, phi: Phi1Predicate, *, _inner: bool = False
                          ) -> tuple[Refinement, tuple[str, int | None]]:
    """Refine so the least witness of ``∃s φ(m, X↾s)`` is constant.

    Outcome ``("empty", None)``: no member of the child has any witness.
    Outcome ``("least", b)``: every full-depth member's least witness is b.
    """
    f = sys_.map
    N = sys_.depth
    memo: dict[tuple[int, str], bool] = {}

    def phi_at(m: int, tau: str) -> bool:
        key = (m, tau)
        got = memo.get(key)
        if got is None:
            got = phi(m, tau)
            memo[key] = got
        return got

    def o_le(n: int) -> Callable[[str], bool]:
        return lambda tau: any(phi_at(m, tau) for m in range(n + 1))

    least_dead = None
    for n in range(N + 1):
        cls = avoidance_class(sys_.space, [PredicateAvoidance(f, o_le(n))],
                              name=f"C(<= {n})")
        if find_member(cls, N) is None:
            least_dead = n
            break

    if least_dead is None:
        request = PredicateRequest(f"phi[{phi.name}]", o_le(N))
        ref, case = meet_or_avoid(sys_, request)
        if case == "avoid":
            return ref, ("empty", None)
        if _inner:
            raise HorizonExhausted("meet-branch recursion did not stabilize")
        members = iter_members(ref.child.space, N, limit=_MEMBER_ENUM_GUARD + 1)
        if len(members) > _MEMBER_ENUM_GUARD:
            raise HorizonExhausted("too many members to extract the compactness bound")
        b_cap = 0
        for v in members:
            least = None
            for m in range(N + 1):
                if any(phi_at(m, v[:t]) for t in range(N + 1)):
                    least = m
                    break
            if least is None:
                raise HorizonExhausted(f"meet-case member {v!r} has no witness at depth")
            b_cap = max(b_cap, least)
        inner_ref, outcome = least_element_forcing(ref.child, phi, _inner=True)
        return Refinement(inner_ref.child, sys_, compose(inner_ref.cert, ref.cert),
                          case=inner_ref.case, meta={"via_meet_bound": b_cap}), outcome

    b = least_dead
    request = PredicateRequest(f"O(<= {b})", o_le(b))
    ref, case = meet_or_avoid(sys_, request)
    if case != "meet":
        raise InconsistentDepth(f"C(<= {b}) died at depth but the avoidance survived")
    if b == 0:
        child = ref.child
        return Refinement(child, sys_, ref.cert, case="least", meta={"b": b}), ("least", b)
    o_lt = o_le(b - 1)
    carve = avoidance_class(ref.child.space,
                            [PredicateAvoidance(ref.child.map, o_lt)],
                            name=f"{ref.child.space.name}~O(<{b})")
    if find_member(carve, N) is None:
        raise InconsistentDepth(
            f"carve below least witness {b} emptied at depth; working depth too small")
    child = DynSystem(carve, ref.child.map)
    return Refinement(child, sys_, ref.cert, case="least", meta={"b": b}), ("least", b)


@dataclass(frozen=True)
class NbhResult:
    system: DynSystem
    b: int
    avoided: tuple[str, ...]
    bounds: dict


def nbh_periodicity(sys_: DynSystem, i: int) -> NbhResult:
    """Subsystem with a uniform return bound to every surviving length-``i``
    cylinder.

    The avoided set is grown greedily from the lexicographically largest
    length-``i`` word down, keeping the avoidance tree alive at depth; the
    result is inclusion-maximal, so adjoining any surviving word kills the
    tree and its death length bounds the return time into that word's
    cylinder.
    """
    f = sys_.map
    N = sys_.depth
    words_i = list(all_words(sys_.k, i))
    avoided: list[str] = []
    for w in reversed(words_i):
        cand = avoided + [w]
        cls = avoidance_class(sys_.space, [OrbitAvoidance(f, cand)], name="nbh-cand")
        if find_member(cls, N) is not None:
            avoided = cand
    space = sys_.space if not avoided else avoidance_class(
        sys_.space, [OrbitAvoidance(f, avoided)], name=f"{sys_.space.name}·nbh({i})")
    bounds = {}
    b = 1
    for w in words_i:
        if w in avoided:
            continue
        cls = avoidance_class(sys_.space, [OrbitAvoidance(f, avoided + [w])], name="nbh-s")
        dl = death_length(cls, N)
        if dl is None:
            raise HorizonExhausted(f"return length for {w!r} exceeds depth {N}")
        bounds[w] = dl
        b = max(b, dl)
    return NbhResult(DynSystem(space, f), b, tuple(sorted(avoided)), bounds)


@dataclass
class ApStageRecord:
    kind: str                  # "request" | "periodicity"
    label: str
    case: str = ""
    s: int | None = None
    cylinder: int | None = None
    return_bound: int | None = None
    chain_bound: int = 1
    avoided: tuple[str, ...] = ()


@dataclass
class ApForcingLog:
    stages: list[ApStageRecord] = field(default_factory=list)
    chain: PiecewiseIterate | None = None
    final: DynSystem | None = None
    raw_bounds: dict | None = None

    def to_json(self):
        return [{"kind": st.kind, "label": st.label, "case": st.case,
                 "s": st.s, "cylinder": st.cylinder, "return_bound": st.return_bound,
                 "chain_bound": st.chain_bound, "avoided": list(st.avoided)}
                for st in self.stages]


def construct_ap_point(sys_: DynSystem, requests: list[OpenRequest], c_max: int = 4
                       ) -> tuple[PointApprox, APCert, ApForcingLog]:
    """Interleave request forcing and neighborhood periodicity, requests
    first, and return the lexicographically least survivor with a verified
    almost-periodicity certificate over the original map.

    Certificate rows carry the least gap bound that verifies at depth; the
    forcing-derived bound (periodicity bound times the certificate bound of
    the chain at that stage) caps the search.
    """
    f0 = sys_.map
    N = sys_.depth
    chain = trivial_cert(f0)
    cur = DynSystem(sys_.space, chain.induced())
    log = ApForcingLog()
    raw_bounds: dict[int, int] = {}

    schedule: list[tuple[str, object]] = []
    ri, ci = 0, 1
    while ri < len(requests) or ci <= c_max:
        if ri < len(requests):
            schedule.append(("request", requests[ri]))
            ri += 1
        if ci <= c_max:
            schedule.append(("periodicity", ci))
            ci += 1

    for kind, payload in schedule:
        if kind == "request":
            ref, case = meet_or_avoid(cur, payload)
            if case == "meet":
                chain = compose(ref.cert, chain)
                cur = DynSystem(ref.child.space, chain.induced())
            else:
                cur = DynSystem(ref.child.space, cur.map)
            log.stages.append(ApStageRecord("request", payload.name, case=case,
                                            s=ref.meta.get("s"), chain_bound=chain.b))
        else:
            i = payload
            res = nbh_periodicity(cur, i)
            cur = DynSystem(res.system.space, cur.map)
            raw_bounds[i] = res.b * chain.b
            log.stages.append(ApStageRecord("periodicity", f"i={i}", cylinder=i,
                                            return_bound=res.b, chain_bound=chain.b,
                                            avoided=res.avoided))

    word = find_member(cur.space, N)
    if word is None:
        raise HorizonExhausted("no full-depth survivor after forcing", partial=log)
    X = sys_.point(word)

    rows: list[APRow] = []
    for c in range(1, c_max + 1):
        row = None
        for b in range(1, N - c + 1):
            row = search_ap_row(X, c, b)
            if row is not None:
                break
        if row is None:
            raise HorizonExhausted(f"no gap bound verifies for cylinder length {c}",
                                   partial=log)
        rows.append(row)
    cert = APCert(tuple(rows))
    log.chain = chain
    log.final = DynSystem(cur.space, chain.induced())
    log.raw_bounds = raw_bounds
    return X, cert, log
