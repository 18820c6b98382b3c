"""Problem instances, samples, sample-size distributions, and seeded drawing.

An instance hides a perfect matching between ``n`` coupons and ``n`` labels.
Each sample exposes a set of coupons together with the set of their labels,
but not the pairing between the two sets.  Coupons and labels are dense
integer ids ``0..n-1``; external names are a presentation concern only, since
every quantity of interest depends on ``n`` alone by symmetry.

All objects here are immutable after construction and safe to share across
threads.  Random streams (``numpy.random.Generator``) are single-owner:
parallel users must derive independent streams, see :mod:`lccp.simulate`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    EmptySupport,
    IdOutOfRange,
    NonBijection,
    OutOfRange,
    SizeExceedsN,
    TargetExceedsN,
    ZeroSize,
)

#: Tolerance for validating that sample-size probabilities sum to one.
PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Instance:
    """A hidden bijection: coupon ``c`` carries label ``matching[c]``."""

    n: int
    matching: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ZeroSize("an instance needs at least one coupon")
        if len(self.matching) != self.n or sorted(self.matching) != list(range(self.n)):
            raise NonBijection(f"matching must be a permutation of 0..{self.n - 1}")

    def label_of(self, coupon: int) -> int:
        return self.matching[coupon]


def make_instance(n: int, matching: Iterable[int] | None = None) -> Instance:
    """Build an instance; the default matching is the identity permutation."""
    if matching is None:
        if n < 1:
            raise ZeroSize("n must be >= 1")
        return Instance(n, tuple(range(n)))
    return Instance(n, tuple(int(c) for c in matching))


@dataclass(frozen=True)
class Sample:
    """One observation: a coupon set and the set of its labels, unpaired."""

    coupons: tuple[int, ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coupons", tuple(sorted(self.coupons)))
        object.__setattr__(self, "labels", tuple(sorted(self.labels)))
        if not self.coupons:
            raise ZeroSize("a sample holds at least one coupon")
        if len(set(self.coupons)) != len(self.coupons) or len(set(self.labels)) != len(self.labels):
            raise NonBijection("sample ids must be distinct")
        if len(self.coupons) != len(self.labels):
            raise NonBijection("coupon and label sets must have equal size")

    @property
    def size(self) -> int:
        return len(self.coupons)


@dataclass(frozen=True)
class SampleSizeDist:
    """Finite distribution over sample sizes; zero-probability sizes are dropped
    at construction so that support queries are exact."""

    sizes: tuple[tuple[int, float], ...]  # (k, p_k) with p_k > 0, ascending in k

    def __post_init__(self) -> None:
        if not self.sizes:
            raise EmptySupport("a sample-size distribution needs a positive entry")
        last = 0
        for k, pk in self.sizes:
            if k < 1:
                raise OutOfRange(f"sample size {k} must be >= 1")
            if k <= last:
                raise OutOfRange("sample sizes must be strictly ascending")
            if not 0.0 < pk <= 1.0:
                raise OutOfRange(f"probability {pk} for size {k} not in (0, 1]")
            last = k
        total = sum(pk for _, pk in self.sizes)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise OutOfRange(f"size probabilities sum to {total}, not 1")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.sizes)

    @property
    def max_size(self) -> int:
        return self.sizes[-1][0]

    def prob(self, k: int) -> float:
        for key, pk in self.sizes:
            if key == k:
                return pk
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return dict(self.sizes)


def make_size_dist(entries: Mapping[int | str, float]) -> SampleSizeDist:
    """Build a size distribution from a ``{size: probability}`` mapping."""
    items: list[tuple[int, float]] = []
    for key, raw in entries.items():
        k, pk = int(key), float(raw)
        if pk < 0.0 or pk > 1.0:
            raise OutOfRange(f"probability {pk} for size {k} not in [0, 1]")
        if pk > 0.0:
            items.append((k, pk))
    if not items:
        raise EmptySupport("all sizes have zero probability")
    items.sort()
    return SampleSizeDist(tuple(items))


def make_kp_dist(p: float) -> SampleSizeDist:
    """The two-size distribution: size 1 w.p. ``p``, size 2 w.p. ``1-p``."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p={p} not in [0, 1]")
    return make_size_dist({1: p, 2: 1.0 - p})


class RecoveryMode(Enum):
    """Whether the coupon and label universes are known before sampling.

    With known vertices the final unresolved coupon can be inferred by
    elimination; with unknown vertices it must be sampled.
    """

    VERTICES_UNKNOWN = "vertices-unknown"
    VERTICES_KNOWN = "vertices-known"


@dataclass(frozen=True)
class RecoveryTarget:
    """What must be identified: all coupons, any ``r`` of them, or a fixed set.

    ``complete`` is equivalent to ``arbitrary(n)`` and to ``specific`` over the
    full coupon set.
    """

    kind: str  # "complete" | "arbitrary" | "specific"
    r: int | None = None
    coupons: frozenset[int] | None = None
    mode: RecoveryMode = RecoveryMode.VERTICES_UNKNOWN

    def __post_init__(self) -> None:
        if self.kind not in ("complete", "arbitrary", "specific"):
            raise OutOfRange(f"unknown target kind {self.kind!r}")
        if self.kind == "arbitrary":
            if self.r is None or self.r < 1:
                raise ZeroSize("arbitrary target needs r >= 1")
        if self.kind == "specific":
            if not self.coupons:
                raise ZeroSize("specific target needs a nonempty coupon set")

    @classmethod
    def complete(cls, mode: RecoveryMode = RecoveryMode.VERTICES_UNKNOWN) -> "RecoveryTarget":
        return cls("complete", mode=mode)

    @classmethod
    def arbitrary(cls, r: int, mode: RecoveryMode = RecoveryMode.VERTICES_UNKNOWN) -> "RecoveryTarget":
        return cls("arbitrary", r=int(r), mode=mode)

    @classmethod
    def specific(
        cls, coupons: Iterable[int], mode: RecoveryMode = RecoveryMode.VERTICES_UNKNOWN
    ) -> "RecoveryTarget":
        return cls("specific", coupons=frozenset(int(c) for c in coupons), mode=mode)

    def validate_for(self, n: int) -> None:
        if self.kind == "arbitrary" and self.r is not None and self.r > n:
            raise TargetExceedsN(f"target r={self.r} exceeds n={n}")
        if self.kind == "specific" and self.coupons is not None:
            if any(c < 0 or c >= n for c in self.coupons):
                raise IdOutOfRange(f"target coupons must lie in 0..{n - 1}")

    def is_met(self, known: set[int], n: int) -> bool:
        if self.kind == "complete":
            return len(known) == n
        if self.kind == "arbitrary":
            return len(known) >= (self.r or 0)
        assert self.coupons is not None
        return self.coupons <= known


def draw_coupon_set(n: int, dist: SampleSizeDist, stream: np.random.Generator) -> tuple[int, ...]:
    """Draw a sample's coupon subset only: a size from ``dist``, then a
    uniform subset of that size, sorted.  This is the sole source of
    randomness in a draw; labels follow deterministically."""
    if dist.max_size > n:
        raise SizeExceedsN(f"drawable size {dist.max_size} exceeds n={n}")
    k = _draw_size(dist, stream)
    if k == 1:
        return (int(stream.integers(n)),)
    if k == 2:
        i = int(stream.integers(n))
        j = int(stream.integers(n - 1))
        if j >= i:
            j += 1
        return (i, j) if i < j else (j, i)
    return tuple(sorted(int(c) for c in stream.choice(n, size=k, replace=False)))


def draw_sample(instance: Instance, dist: SampleSizeDist, stream: np.random.Generator) -> Sample:
    """Draw one sample: a size from ``dist``, then a uniform coupon subset.

    Deterministic given the stream state; the labels are always the matching
    image of the drawn coupons.
    """
    coupons = draw_coupon_set(instance.n, dist, stream)
    labels = tuple(sorted(instance.matching[c] for c in coupons))
    sample = Sample(coupons, labels)
    assert set(sample.labels) == {instance.matching[c] for c in sample.coupons}
    return sample


def _draw_size(dist: SampleSizeDist, stream: np.random.Generator) -> int:
    sizes = dist.sizes
    if len(sizes) == 1:
        return sizes[0][0]
    u = float(stream.random())
    acc = 0.0
    for k, pk in sizes:
        acc += pk
        if u < acc:
            return k
    return sizes[-1][0]  # guards the u ~ 1.0 rounding edge


def dist_from_json(doc: str | Mapping) -> SampleSizeDist:
    """Parse ``{"sizes": {"1": 0.3, "2": 0.7}}`` (string or parsed object)."""
    obj = json.loads(doc) if isinstance(doc, str) else doc
    if "sizes" not in obj:
        raise OutOfRange('distribution JSON needs a "sizes" object')
    return make_size_dist(obj["sizes"])


def dist_to_json(dist: SampleSizeDist) -> str:
    return json.dumps({"sizes": {str(k): pk for k, pk in dist.sizes}})


def instance_from_json(doc: str | Mapping) -> Instance:
    """Parse ``{"n": 5, "matching": [1, 0, 2, 4, 3]}``; matching is optional."""
    obj = json.loads(doc) if isinstance(doc, str) else doc
    return make_instance(int(obj["n"]), obj.get("matching"))


def instance_to_json(instance: Instance) -> str:
    return json.dumps({"n": instance.n, "matching": list(instance.matching)})
