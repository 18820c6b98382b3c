"""Seeded Monte Carlo estimation of recovery times.

Replication streams are derived counter-style: ``(seed, replication index)``
is hashed (splitmix64 finalizer, a bijection on 64-bit words) into a PCG64
stream state, so results are bit-identical whether replications run serially
or fanned out across workers, and independent of completion order.
Aggregation is a plain order-insensitive reduction over the per-trial counts.

Histories whose samples all have size one or two (vertices-unknown mode) are
tracked with a union-find over pair components instead of the full inference
engine: a component is resolved once it reaches size three or contains a
coupon sampled alone.  That is what makes thousand-coupon sweeps affordable.
Everything else falls back to the exact engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonTerminating, SizeExceedsN, TargetExceedsN, ZeroSize
from .inference import absorb_sample, init_knowledge, is_recovered
from .model import (
    Instance,
    RecoveryMode,
    RecoveryTarget,
    SampleSizeDist,
    draw_coupon_set,
    draw_sample,
    make_instance,
)

#: Hard cap converting an unreachable target into an error instead of a hang.
MAX_DRAWS = 1_000_000_000


@dataclass(frozen=True)
class TrialResult:
    """Realized number of samples in one trial."""

    samples_used: int


@dataclass(frozen=True)
class SimulationStats:
    """Replication summary; quartiles are Tukey hinges (median of halves,
    the middle value shared by both halves when the count is odd)."""

    reps: int
    mean: float
    std_error: float
    five_number: tuple[float, float, float, float, float]
    seed: int


_M64 = (1 << 64) - 1
_STREAM_SALT = 0xD1342543DE82EF95


def _mix64(x: int) -> int:
    """splitmix64 finalizer; a bijection, so distinct inputs never collide."""
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _derived_state(seed: int, rep: int) -> dict:
    base = (seed * _STREAM_SALT + rep) & _M64
    state = (_mix64(base) << 64) | _mix64(base ^ 0x5851F42D4C957F2D)
    inc = ((_mix64(base + 1) << 64) | _mix64(base + 2)) | 1
    return {
        "bit_generator": "PCG64",
        "state": {"state": state, "inc": inc},
        "has_uint32": 0,
        "uinteger": 0,
    }


def derive_stream(seed: int, rep: int) -> np.random.Generator:
    """The replication stream for ``(seed, rep)``; order-independent."""
    bits = np.random.PCG64(0)
    bits.state = _derived_state(seed, rep)
    return np.random.Generator(bits)


class _ComponentTracker:
    """Union-find knowledge tracker for size<=2 histories, unknown vertices."""

    __slots__ = ("n", "parent", "size", "resolved", "known_count", "target")

    def __init__(self, n: int, target: RecoveryTarget):
        self.n = n
        self.target = target
        self.parent = list(range(n))
        self.size = [1] * n
        self.resolved = [False] * n
        self.known_count = 0

    def _find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def _resolve(self, root: int) -> None:
        if not self.resolved[root]:
            self.resolved[root] = True
            self.known_count += self.size[root]

    def absorb(self, coupons: tuple[int, ...]) -> None:
        if len(coupons) == 1:
            self._resolve(self._find(coupons[0]))
            return
        a, b = coupons
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        merged_resolved = self.resolved[ra] or self.resolved[rb]
        newly = 0
        if merged_resolved:
            if not self.resolved[ra]:
                newly += self.size[ra]
            if not self.resolved[rb]:
                newly += self.size[rb]
        elif self.size[ra] + self.size[rb] >= 3:
            merged_resolved = True
            newly = self.size[ra] + self.size[rb]
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.resolved[ra] = merged_resolved
        self.known_count += newly

    def recovered(self) -> bool:
        t = self.target
        if t.kind == "complete":
            return self.known_count == self.n
        if t.kind == "arbitrary":
            return self.known_count >= (t.r or 0)
        assert t.coupons is not None
        return all(self.resolved[self._find(c)] for c in t.coupons)


class _EngineTracker:
    """Exact-inference tracker for general histories; the all-seen gate skips
    the closure computation while a complete-recovery target cannot possibly
    be met yet."""

    __slots__ = ("state", "target", "seen_count")

    def __init__(self, instance: Instance, target: RecoveryTarget):
        self.state = init_knowledge(instance.n, target.mode, instance.matching)
        self.target = target
        self.seen_count = 0

    def absorb(self, sample) -> None:
        before = self.state.seen
        for c in sample.coupons:
            if not before[c]:
                self.seen_count += 1
        absorb_sample(self.state, sample)

    def recovered(self) -> bool:
        if (
            self.target.kind == "complete"
            and self.target.mode is RecoveryMode.VERTICES_UNKNOWN
            and self.seen_count < self.state.n
        ):
            return False
        return is_recovered(self.state, self.target)


def _make_tracker(instance: Instance, dist: SampleSizeDist, target: RecoveryTarget):
    if target.mode is RecoveryMode.VERTICES_UNKNOWN and dist.max_size <= 2:
        return _ComponentTracker(instance.n, target)
    return _EngineTracker(instance, target)


def _iter_coupon_sets(n: int, dist: SampleSizeDist, stream: np.random.Generator, chunk: int = 64):
    """Endless coupon-set draws for supports within {1, 2}, with randomness
    pulled in chunks to amortize generator-call overhead.  Distributionally
    identical to repeated :func:`lccp.model.draw_coupon_set` calls."""
    support = dist.support
    if support == (1,):
        while True:
            for i in stream.integers(0, n, chunk).tolist():
                yield (i,)
    elif support == (2,):
        while True:
            firsts = stream.integers(0, n, chunk).tolist()
            seconds = stream.integers(0, n - 1, chunk).tolist()
            for i, j in zip(firsts, seconds):
                if j >= i:
                    j += 1
                yield (i, j) if i < j else (j, i)
    else:
        p1 = dist.prob(1)
        while True:
            us = stream.random(chunk).tolist()
            firsts = stream.integers(0, n, chunk).tolist()
            seconds = stream.integers(0, n - 1, chunk).tolist()
            for u, i, j in zip(us, firsts, seconds):
                if u < p1:
                    yield (i,)
                else:
                    if j >= i:
                        j += 1
                    yield (i, j) if i < j else (j, i)


def _validate_trial_args(n: int, dist: SampleSizeDist, target: RecoveryTarget) -> None:
    if n < 1:
        raise ZeroSize("n must be >= 1")
    if dist.max_size > n:
        raise SizeExceedsN(f"drawable size {dist.max_size} exceeds n={n}")
    target.validate_for(n)


def _trial_core(
    instance: Instance,
    dist: SampleSizeDist,
    target: RecoveryTarget,
    stream: np.random.Generator,
    max_draws: int,
) -> int:
    n = instance.n
    tracker = _make_tracker(instance, dist, target)
    draws = 0
    if tracker.recovered():  # vertices-known single-coupon edge case
        return 0
    if isinstance(tracker, _ComponentTracker):
        # hot path: labels are never consulted, so draw coupon sets only
        for coupons in _iter_coupon_sets(n, dist, stream):
            tracker.absorb(coupons)
            draws += 1
            if tracker.recovered():
                return draws
            if draws >= max_draws:
                raise NonTerminating(f"no recovery after {draws} draws; target unreachable?")
    while True:
        tracker.absorb(draw_sample(instance, dist, stream))
        draws += 1
        if tracker.recovered():
            return draws
        if draws >= max_draws:
            raise NonTerminating(f"no recovery after {draws} draws; target unreachable?")


def run_trial(
    n: int,
    dist: SampleSizeDist,
    target: RecoveryTarget,
    stream: np.random.Generator,
    max_draws: int = MAX_DRAWS,
) -> TrialResult:
    """Draw samples until the target is met; returns the draw count."""
    _validate_trial_args(n, dist, target)
    return TrialResult(_trial_core(make_instance(n), dist, target, stream, max_draws))


def _tukey_five(sorted_values: list[int]) -> tuple[float, float, float, float, float]:
    def median(chunk: list[int]) -> float:
        m = len(chunk)
        mid = m // 2
        return float(chunk[mid]) if m % 2 else (chunk[mid - 1] + chunk[mid]) / 2.0

    count = len(sorted_values)
    half = count // 2
    lower = sorted_values[: half + (count % 2)]
    upper = sorted_values[half:]
    return (
        float(sorted_values[0]),
        median(lower),
        median(sorted_values),
        median(upper),
        float(sorted_values[-1]),
    )


def _aggregate(counts: list[int], reps: int, seed: int) -> SimulationStats:
    arr = np.asarray(counts, dtype=np.float64)
    mean = float(arr.mean())
    if reps > 1:
        std_error = float(arr.std(ddof=1) / np.sqrt(reps))
    else:
        std_error = 0.0
    return SimulationStats(reps, mean, std_error, _tukey_five(sorted(counts)), seed)


def estimate(
    n: int,
    dist: SampleSizeDist,
    target: RecoveryTarget,
    reps: int,
    seed: int,
) -> SimulationStats:
    """Replicated trials, each on its own stream derived from ``(seed, rep)``."""
    if reps < 1:
        raise ZeroSize("reps must be >= 1")
    _validate_trial_args(n, dist, target)
    instance = make_instance(n)
    bits = np.random.PCG64(0)
    stream = np.random.Generator(bits)
    counts = []
    for rep in range(reps):
        bits.state = _derived_state(seed, rep)  # same stream as derive_stream
        counts.append(_trial_core(instance, dist, target, stream, MAX_DRAWS))
    return _aggregate(counts, reps, seed)


def run_trial_ccp(
    n: int,
    dist: SampleSizeDist,
    r: int,
    stream: np.random.Generator,
) -> TrialResult:
    """Plain group-drawing collection: draws until ``r`` distinct coupons."""
    if n < 1:
        raise ZeroSize("n must be >= 1")
    if r < 0 or r > n:
        raise TargetExceedsN(f"target r={r} not in 0..{n}")
    if dist.max_size > n:
        raise SizeExceedsN(f"drawable size {dist.max_size} exceeds n={n}")
    if r == 0:
        return TrialResult(0)
    seen = [False] * n
    collected = 0
    draws = 0
    if dist.max_size <= 2:
        for coupons in _iter_coupon_sets(n, dist, stream):
            draws += 1
            for c in coupons:
                if not seen[c]:
                    seen[c] = True
                    collected += 1
            if collected >= r:
                return TrialResult(draws)
    while True:
        coupons = draw_coupon_set(n, dist, stream)
        draws += 1
        for c in coupons:
            if not seen[c]:
                seen[c] = True
                collected += 1
        if collected >= r:
            return TrialResult(draws)


def estimate_ccp(n: int, dist: SampleSizeDist, r: int, reps: int, seed: int) -> SimulationStats:
    """Replicated plain-collection trials, same stream derivation as
    :func:`estimate`."""
    if reps < 1:
        raise ZeroSize("reps must be >= 1")
    counts = [
        run_trial_ccp(n, dist, r, derive_stream(seed, rep)).samples_used for rep in range(reps)
    ]
    return _aggregate(counts, reps, seed)


def compare_lccp_ccp(
    n: int,
    dist: SampleSizeDist,
    reps: int,
    seed: int,
) -> tuple[SimulationStats, SimulationStats]:
    """Coupled comparison on one sample stream per replication.

    First element: complete labeled recovery with unknown vertices.  Second:
    plain collection of ``n - 1`` distinct coupons from the *same* draws.
    Full labeled recovery implies at least ``n - 1`` coupons were drawn, so
    the collection time never exceeds the recovery time pathwise.
    """
    if reps < 1:
        raise ZeroSize("reps must be >= 1")
    if dist.max_size > n:
        raise SizeExceedsN(f"drawable size {dist.max_size} exceeds n={n}")

    instance = make_instance(n)
    target = RecoveryTarget.complete(RecoveryMode.VERTICES_UNKNOWN)
    lccp_counts: list[int] = []
    ccp_counts: list[int] = []
    for rep in range(reps):
        stream = derive_stream(seed, rep)
        tracker = _make_tracker(instance, dist, target)
        fast = isinstance(tracker, _ComponentTracker)
        draw_iter = _iter_coupon_sets(n, dist, stream) if fast else None
        seen = [False] * n
        collected = 0
        ccp_done = 0 if n - 1 == 0 else None
        draws = 0
        while True:
            if draw_iter is not None:
                coupons = next(draw_iter)
                tracker.absorb(coupons)
            else:
                sample = draw_sample(instance, dist, stream)
                coupons = sample.coupons
                tracker.absorb(sample)
            draws += 1
            if ccp_done is None:
                for c in coupons:
                    if not seen[c]:
                        seen[c] = True
                        collected += 1
                if collected >= n - 1:
                    ccp_done = draws
            if tracker.recovered():
                break
            if draws >= MAX_DRAWS:
                raise NonTerminating(f"no recovery after {draws} draws")
        assert ccp_done is not None and ccp_done <= draws
        lccp_counts.append(draws)
        ccp_counts.append(ccp_done)
    return _aggregate(lccp_counts, reps, seed), _aggregate(ccp_counts, reps, seed)
