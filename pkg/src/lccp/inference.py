"""Exact label deduction from labeled group samples.

The collector's information is a candidate-label set per coupon.  Absorbing a
sample ``(S_C, S_L)`` applies two constraint rules:

  (i)  every sampled coupon keeps only labels in ``S_L``;
  (ii) every other coupon with a candidate set drops the labels in ``S_L``.

Any global bijection respecting rule (i) automatically restricts to a
bijection ``S_C -> S_L`` on each sample, so the candidate sets describe the
consistent matchings exactly; rule (ii) merely prunes labels no consistent
matching can use.  This equivalence is asserted by the enumeration checks in
the test suite rather than assumed.

A coupon's label is *known* when it is identical in every perfect matching of
the candidate bipartite graph.  That closure is computed against the hidden
true matching as the reference: coupon ``c`` can trade labels with ``c'`` iff
``matching[c']`` is still a candidate of ``c``, and a label is forced iff its
coupon sits in a singleton strongly connected component of that swap digraph.
Using the truth avoids a matching search; the engine only runs inside
simulations (or the brute-force oracle), where the truth exists.
"""

from __future__ import annotations

from .errors import IdOutOfRange, InvalidState, UnsupportedHistory, ZeroSize
from .model import RecoveryMode, RecoveryTarget, Sample


class KnowledgeState:
    """Mutable, single-owner record of everything deduced so far.

    ``candidates[c]`` is ``None`` while coupon ``c`` has no constraint set
    (possible only in vertices-unknown mode before ``c`` is seen).  In
    vertices-known mode every coupon starts with the full label set, which
    costs O(n^2) memory; that mode is intended for small instances.
    """

    __slots__ = (
        "n",
        "mode",
        "matching",
        "seen",
        "candidates",
        "pair_edges",
        "solo",
        "max_sample_size",
    )

    def __init__(self, n: int, mode: RecoveryMode, matching: tuple[int, ...]):
        self.n = n
        self.mode = mode
        self.matching = matching
        self.seen = [False] * n
        if mode is RecoveryMode.VERTICES_KNOWN:
            self.candidates: list[set[int] | None] = [set(range(n)) for _ in range(n)]
        else:
            self.candidates = [None] * n
        self.pair_edges: list[tuple[int, int]] = []
        self.solo: set[int] = set()
        self.max_sample_size = 0

    def clone(self) -> "KnowledgeState":
        other = KnowledgeState.__new__(KnowledgeState)
        other.n = self.n
        other.mode = self.mode
        other.matching = self.matching
        other.seen = list(self.seen)
        other.candidates = [None if c is None else set(c) for c in self.candidates]
        other.pair_edges = list(self.pair_edges)
        other.solo = set(self.solo)
        other.max_sample_size = self.max_sample_size
        return other

    def seen_count(self) -> int:
        return sum(self.seen)


def init_knowledge(
    n: int,
    mode: RecoveryMode = RecoveryMode.VERTICES_UNKNOWN,
    matching: tuple[int, ...] | None = None,
) -> KnowledgeState:
    """Fresh knowledge state for ``n`` coupons.

    ``matching`` is the hidden truth used as the reference matching by
    :func:`known_coupons`; it defaults to the identity permutation, which is
    correct for instances built with the default matching.
    """
    if n < 1:
        raise ZeroSize("n must be >= 1")
    if matching is None:
        matching = tuple(range(n))
    if len(matching) != n:
        raise InvalidState("matching length differs from n")
    return KnowledgeState(n, mode, tuple(matching))


def absorb_sample(state: KnowledgeState, sample: Sample) -> KnowledgeState:
    """Apply one sample's constraints; mutates and returns ``state``."""
    n = state.n
    for ident in (*sample.coupons, *sample.labels):
        if ident < 0 or ident >= n:
            raise IdOutOfRange(f"id {ident} not in 0..{n - 1}")

    labels = set(sample.labels)
    in_sample = set(sample.coupons)
    cands = state.candidates
    for c in range(n):
        cur = cands[c]
        if c in in_sample:
            if cur is None:
                cands[c] = set(labels)
            else:
                cur &= labels
            state.seen[c] = True
            assert state.matching[c] in cands[c], "truth escaped the candidate set"
        elif cur is not None:
            cur -= labels

    k = sample.size
    state.max_sample_size = max(state.max_sample_size, k)
    if k == 1:
        state.solo.add(sample.coupons[0])
    elif k == 2:
        state.pair_edges.append((sample.coupons[0], sample.coupons[1]))
    return state


def known_coupons(state: KnowledgeState) -> set[int]:
    """Coupons whose label is the same in every consistent matching.

    Computed by forced-edge closure: singleton strongly connected components
    of the swap digraph (edge ``c -> c'`` iff ``matching[c']`` remains a
    candidate of ``c``).  Unseen coupons are never known in vertices-unknown
    mode.
    """
    n = state.n
    cands = state.candidates
    verts = [c for c in range(n) if cands[c] is not None]
    if not verts:
        return set()

    owner = [0] * n  # owner[label] = coupon that truly carries it
    for c in range(n):
        owner[state.matching[c]] = c

    adj: dict[int, list[int]] = {}
    for c in verts:
        cand = cands[c]
        assert cand is not None
        adj[c] = [owner[l] for l in cand if owner[l] != c]

    known: set[int] = set()
    for root, size in _scc_sizes(verts, adj):
        if size == 1:
            known.add(root)
    return known


def _scc_sizes(verts: list[int], adj: dict[int, list[int]]):
    """Iterative Tarjan; yields ``(member, size_of_its_component)`` pairs."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = 0
    out: list[tuple[int, int]] = []

    for start in verts:
        if start in index:
            continue
        work = [(start, 0)]
        while work:
            v, pos = work[-1]
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            recurse = False
            neighbours = adj[v]
            while pos < len(neighbours):
                w = neighbours[pos]
                pos += 1
                if w not in index:
                    work[-1] = (v, pos)
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                for w in comp:
                    out.append((w, len(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return out


def known_by_component_rule(state: KnowledgeState) -> set[int]:
    """Deducible coupons via the pair-graph component rule.

    Valid only for vertices-unknown histories whose samples all had size one
    or two.  A coupon is known iff its component in the co-occurrence graph
    has size at least three, or contains a coupon that was sampled alone
    (a singleton sample pins its coupon as if it joined a resolved triple).
    """
    if state.mode is not RecoveryMode.VERTICES_UNKNOWN:
        raise UnsupportedHistory("component rule applies in vertices-unknown mode only")
    if state.max_sample_size > 2:
        raise UnsupportedHistory("component rule needs a history of sizes <= 2")

    parent = list(range(state.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in state.pair_edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    members: dict[int, list[int]] = {}
    for c in range(state.n):
        if state.seen[c]:
            members.setdefault(find(c), []).append(c)

    known: set[int] = set()
    for group in members.values():
        if len(group) >= 3 or any(c in state.solo for c in group):
            known.update(group)
    return known


def is_recovered(state: KnowledgeState, target: RecoveryTarget) -> bool:
    """Whether the target is met by the coupons currently known."""
    if target.mode is not state.mode:
        raise InvalidState("target mode differs from the knowledge state's mode")
    target.validate_for(state.n)
    return target.is_met(known_coupons(state), state.n)
