"""Brute-force exact expectations for tiny instances.

Ground truth that arbitrates every closed form and the chain abstraction:
a memoized recursion over knowledge states, enumerating every possible
coupon subset per support size.  States are canonicalized up to a joint
relabelling of coupons and labels (the process is equivariant under it), so
the memo table collapses the orbit of each state; relabellings must fix the
target set of a specific-recovery target.

Hard-capped at ``n <= 7``: beyond that the chain and the simulator are the
authoritative routes.  The canonical form is found by partition refinement
first (splitting coupons by structural signatures) and a permutation search
only within the surviving classes, so the worst case 7! is rarely touched.
"""

from __future__ import annotations

import itertools
from math import comb

from .errors import OutOfRange, SizeExceedsN, TooLargeN, Unrecoverable, ZeroSize
from .inference import KnowledgeState, absorb_sample, init_knowledge, known_coupons
from .model import RecoveryMode, RecoveryTarget, Sample, SampleSizeDist

#: Above this the canonicalized state count stops being "tiny".
MAX_ORACLE_N = 7

_SELF_EPS = 1e-12


def _refined_classes(state: KnowledgeState, pinned: frozenset[int]) -> list[list[int]]:
    """Partition coupons into structurally-alike classes (1-WL refinement)."""
    n = state.n
    cands = state.candidates

    def rank(signatures: list) -> list[int]:
        order = {sig: i for i, sig in enumerate(sorted(set(signatures)))}
        return [order[sig] for sig in signatures]

    colors = rank(
        [
            (
                state.seen[c],
                c in pinned,
                -1 if cands[c] is None else len(cands[c]),
                False if cands[c] is None else c in cands[c],
            )
            for c in range(n)
        ]
    )
    for _ in range(n):
        referers: list[list[int]] = [[] for _ in range(n)]
        for c in range(n):
            cand = cands[c]
            if cand is not None:
                for l in cand:
                    referers[l].append(colors[c])
        signatures = []
        for c in range(n):
            cand = cands[c]
            member_colors = None if cand is None else tuple(sorted(colors[l] for l in cand))
            signatures.append((colors[c], member_colors, tuple(sorted(referers[c]))))
        new_colors = rank(signatures)
        if new_colors == colors:
            break
        colors = new_colors

    by_color: dict[int, list[int]] = {}
    for c in range(n):
        by_color.setdefault(colors[c], []).append(c)
    return [by_color[color] for color in sorted(by_color)]


def canonical_key(state: KnowledgeState, pinned: frozenset[int] = frozenset()) -> tuple:
    """Lexicographically minimal encoding over all admissible relabellings.

    The encoding lists, per relabelled coupon slot, the seen flag, target
    membership, and the relabelled candidate set.  Classes of coupons that
    are unseen, unconstrained, and never referenced by any candidate set are
    fully interchangeable and skipped in the permutation search.
    """
    n = state.n
    cands = state.candidates
    classes = _refined_classes(state, pinned)

    referenced: set[int] = set()
    for cand in cands:
        if cand is not None:
            referenced.update(cand)

    offsets = []
    pos = 0
    for members in classes:
        offsets.append(pos)
        pos += len(members)

    choice_sets = []
    for members in classes:
        inert = all(
            not state.seen[c] and cands[c] is None and c not in referenced for c in members
        )
        if inert or len(members) == 1:
            choice_sets.append((tuple(range(len(members))),))
        else:
            choice_sets.append(tuple(itertools.permutations(range(len(members)))))

    best: tuple | None = None
    sigma = [0] * n
    for assignment in itertools.product(*choice_sets):
        for members, offset, perm in zip(classes, offsets, assignment):
            for slot, c in zip(perm, members):
                sigma[c] = offset + slot
        slots: list[tuple] = [()] * n
        for c in range(n):
            cand = cands[c]
            encoded = None if cand is None else tuple(sorted(sigma[l] for l in cand))
            slots[sigma[c]] = (state.seen[c], c in pinned, encoded)
        key = tuple(slots)
        if best is None or key < best:
            best = key
    assert best is not None
    return best


def _validated(n: int, dist: SampleSizeDist, target: RecoveryTarget) -> None:
    if n < 1:
        raise ZeroSize("n must be >= 1")
    if n > MAX_ORACLE_N:
        raise TooLargeN(f"brute force capped at n <= {MAX_ORACLE_N}")
    if dist.max_size > n:
        raise SizeExceedsN(f"support size {dist.max_size} exceeds n={n}")
    target.validate_for(n)


def _successors(
    state: KnowledgeState,
    n: int,
    dist: SampleSizeDist,
    pinned: frozenset[int],
    subsets: dict[int, list[tuple[int, ...]]],
) -> dict[tuple, tuple[float, KnowledgeState]]:
    """Aggregate child states by canonical key.  Labels equal coupon ids
    because the oracle always runs against the identity matching."""
    agg: dict[tuple, tuple[float, KnowledgeState]] = {}
    for k, pk in dist.sizes:
        unit = pk / comb(n, k)
        for combo in subsets[k]:
            child = state.clone()
            absorb_sample(child, Sample(combo, combo))
            ckey = canonical_key(child, pinned)
            if ckey in agg:
                q, rep = agg[ckey]
                agg[ckey] = (q + unit, rep)
            else:
                agg[ckey] = (unit, child)
    return agg


def oracle_expected(n: int, dist: SampleSizeDist, target: RecoveryTarget) -> float:
    """Exact expected sample count until the target is met."""
    _validated(n, dist, target)
    pinned = target.coupons if target.kind == "specific" and target.coupons else frozenset()
    subsets = {k: list(itertools.combinations(range(n), k)) for k in dist.support}
    memo: dict[tuple, float] = {}

    def value(state: KnowledgeState, key: tuple) -> float:
        hit = memo.get(key)
        if hit is not None:
            return hit
        if target.is_met(known_coupons(state), n):
            memo[key] = 0.0
            return 0.0
        agg = _successors(state, n, dist, pinned, subsets)
        stay = agg.pop(key, (0.0, state))[0]
        if 1.0 - stay < _SELF_EPS:
            raise Unrecoverable(f"state can never progress toward {target.kind} recovery")
        acc = 1.0
        for ckey, (q, child) in agg.items():
            acc += q * value(child, ckey)
        result = acc / (1.0 - stay)
        memo[key] = result
        return result

    start = init_knowledge(n, target.mode)
    return value(start, canonical_key(start, pinned))


def oracle_tail(n: int, dist: SampleSizeDist, target: RecoveryTarget, t_max: int) -> list[float]:
    """``P(T > t)`` for ``t = 0..t_max`` by forward propagation over the
    canonical state graph."""
    if t_max < 0:
        raise OutOfRange("t_max must be >= 0")
    _validated(n, dist, target)
    pinned = target.coupons if target.kind == "specific" and target.coupons else frozenset()
    subsets = {k: list(itertools.combinations(range(n), k)) for k in dist.support}

    start = init_knowledge(n, target.mode)
    start_key = canonical_key(start, pinned)
    rows: dict[tuple, dict[tuple, float]] = {}
    done: set[tuple] = set()
    frontier: list[tuple[tuple, KnowledgeState]] = [(start_key, start)]
    while frontier:
        key, state = frontier.pop()
        if key in rows or key in done:
            continue
        if target.is_met(known_coupons(state), n):
            done.add(key)
            continue
        agg = _successors(state, n, dist, pinned, subsets)
        row: dict[tuple, float] = {}
        for ckey, (q, child) in agg.items():
            row[ckey] = q
            if ckey != key and ckey not in rows and ckey not in done:
                frontier.append((ckey, child))
        rows[key] = row

    mass: dict[tuple, float] = {start_key: 1.0}
    tail: list[float] = []
    for _ in range(t_max + 1):
        alive = sum(q for key, q in mass.items() if key not in done)
        tail.append(alive)
        nxt: dict[tuple, float] = {}
        for key, q in mass.items():
            if key in done:
                nxt[key] = nxt.get(key, 0.0) + q
                continue
            for ckey, w in rows[key].items():
                nxt[ckey] = nxt.get(ckey, 0.0) + q * w
        mass = nxt
    return tail


def lemma_nk_check(
    n: int, k: int, mode: RecoveryMode = RecoveryMode.VERTICES_KNOWN
) -> tuple[float, float]:
    """Complete-recovery expectations for fixed sizes ``k`` and ``n-k``.

    With known vertices the two sampling processes carry the same
    information, so the pair should coincide; the vertices-unknown variant is
    offered for comparison only, nothing asserts it.
    """
    if not 1 <= k < n:
        raise OutOfRange(f"need 1 <= k < n, got k={k}, n={n}")
    from .model import make_size_dist

    target = RecoveryTarget.complete(mode)
    first = oracle_expected(n, make_size_dist({k: 1.0}), target)
    second = oracle_expected(n, make_size_dist({n - k: 1.0}), target)
    return first, second


def known_by_enumeration(n: int, samples: list[Sample], mode: RecoveryMode) -> set[int]:
    """Independent deduction oracle: enumerate all ``n!`` matchings, keep the
    ones consistent with every sample, and report coupons whose label never
    varies.  Vertices-unknown mode cannot know unseen coupons."""
    if n > MAX_ORACLE_N:
        raise TooLargeN(f"enumeration capped at n <= {MAX_ORACLE_N}")
    constraints = [(set(s.coupons), set(s.labels)) for s in samples]
    survivors: list[tuple[int, ...]] = []
    for perm in itertools.permutations(range(n)):
        if all({perm[c] for c in cs} == ls for cs, ls in constraints):
            survivors.append(perm)
    assert survivors, "the generating matching itself must be consistent"
    fixed = {
        c
        for c in range(n)
        if all(perm[c] == survivors[0][c] for perm in survivors)
    }
    if mode is RecoveryMode.VERTICES_UNKNOWN:
        seen = set().union(*(s.coupons for s in samples)) if samples else set()
        fixed &= seen
    return fixed
