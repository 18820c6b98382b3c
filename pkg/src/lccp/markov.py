"""Exact absorbing-chain solvers.

For two-size sampling (size 1 w.p. ``p``, size 2 w.p. ``1-p``) the collection
process in vertices-unknown mode is a Markov chain on states
``(alpha, beta, gamma)``: counts of unseen coupons, coupons stuck in
unresolved pairs, and identified coupons.  ``beta`` is always even.  With
``mu = (1-p)/C(n,2)`` and ``lam = p/n`` the transitions out of
``s = (alpha, beta, gamma)`` are

    (alpha-2, beta+2, gamma)    mu * C(alpha, 2)        two fresh coupons pair up
    (alpha-1, beta-2, gamma+3)  mu * alpha * beta       fresh coupon joins a pair
    (alpha,   beta-4, gamma+4)  mu * 4 * C(beta/2, 2)   two different pairs join
    (alpha-1, beta,   gamma+1)  mu*alpha*gamma + lam*alpha
    (alpha,   beta-2, gamma+2)  mu*beta*gamma  + lam*beta
    self-loop                   mu*(C(gamma,2) + beta/2) + lam*gamma

Rows are stochastic because the six coefficients partition all C(n,2) pairs
plus all n singletons.  Every non-self transition either raises gamma or
keeps gamma while lowering alpha, so the chain is acyclic modulo self-loops
and hitting times follow from one reverse-topological sweep in O(n^2) time --
no general linear solve.  That is what makes n in the thousands tractable.

For n = 1 no size-2 sample is drawable; that probability mass cannot change
the state and is assigned to the self-loop so rows stay stochastic (such a
distribution is rejected by the sampling model itself).

``ccp_expected`` solves the classical group-drawing coverage chain (states =
number of distinct coupons collected, hypergeometric transitions) used as the
comparison baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (
    InvalidState,
    NumericalInstability,
    OutOfRange,
    SizeExceedsN,
    TargetExceedsN,
    Unrecoverable,
    ZeroSize,
)
from .model import SampleSizeDist

#: Self-loop probabilities above 1 - _SELF_LOOP_EPS on a non-absorbing state
#: make the hitting-time division meaningless.
_SELF_LOOP_EPS = 1e-14


@dataclass(frozen=True)
class MarkovState:
    """Counts of unseen / pair-locked / identified coupons."""

    alpha: int
    beta: int
    gamma: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class TransitionRow:
    """Positive-probability targets of one state, self-loop included."""

    source: MarkovState
    entries: tuple[tuple[MarkovState, float], ...]

    def probability_sum(self) -> float:
        return sum(q for _, q in self.entries)

    def as_dict(self) -> dict[tuple[int, int, int], float]:
        return {s.as_tuple(): q for s, q in self.entries}


def _check_state(s: MarkovState, n: int) -> None:
    if s.alpha < 0 or s.beta < 0 or s.gamma < 0:
        raise InvalidState(f"negative count in {s}")
    if s.alpha + s.beta + s.gamma != n:
        raise InvalidState(f"{s} does not sum to n={n}")
    if s.beta % 2:
        raise InvalidState(f"{s} has odd beta")


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p={p} not in [0, 1]")


def state_space(n: int) -> list[MarkovState]:
    """All states in topological order: gamma ascending, ties alpha descending.

    The final element is the absorbing state ``(0, 0, n)``; the count is
    ``sum((n - g)//2 + 1 for g in 0..n)``.
    """
    if n < 1:
        raise ZeroSize("n must be >= 1")
    states = []
    for gamma in range(n + 1):
        rest = n - gamma
        for i in range(rest // 2 + 1):
            states.append(MarkovState(rest - 2 * i, 2 * i, gamma))
    return states


def topological_index(s: MarkovState, n: int) -> int:
    """Position of ``s`` in the :func:`state_space` ordering."""
    _check_state(s, n)
    offset = sum((n - g) // 2 + 1 for g in range(s.gamma))
    return offset + s.beta // 2


def transition_row(s: MarkovState, n: int, p: float) -> TransitionRow:
    """The six-case transition row out of ``s``; zero entries are omitted."""
    _check_state(s, n)
    _check_p(p)
    a, b, g = s.alpha, s.beta, s.gamma
    pairs = comb(n, 2)
    mu = (1.0 - p) / pairs if pairs else 0.0
    lam = p / n

    entries: list[tuple[MarkovState, float]] = []

    def add(a2: int, b2: int, g2: int, q: float) -> None:
        if q > 0.0:
            entries.append((MarkovState(a2, b2, g2), q))

    add(a - 2, b + 2, g, mu * comb(a, 2))
    add(a - 1, b - 2, g + 3, mu * a * b)
    add(a, b - 4, g + 4, mu * 4 * comb(b // 2, 2))
    add(a - 1, b, g + 1, mu * a * g + lam * a)
    add(a, b - 2, g + 2, mu * b * g + lam * b)
    self_q = mu * (comb(g, 2) + b // 2) + lam * g
    if n == 1:
        self_q += 1.0 - p  # size-2 draws are impossible; the mass stalls
    add(a, b, g, self_q)
    return TransitionRow(s, tuple(entries))


def _pull(levels: list, target_gamma: int, n: int, idx: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """Gather ``coef * E[target_gamma][idx]``; positions with zero coefficient
    (whose indices may be out of range) contribute nothing."""
    if target_gamma > n:
        return np.zeros_like(coef)
    src = levels[target_gamma]
    j = np.clip(idx, 0, len(src) - 1)
    return np.where(coef > 0.0, coef * src[j], 0.0)


def expected_complete(n: int, p: float) -> float:
    """Exact expected sample count to reach the all-identified state.

    One dynamic-programming sweep over gamma-levels, highest gamma first;
    within a level the pair-up transition feeds the next lower-alpha state,
    handled by a backward scan.
    """
    if n < 1:
        raise ZeroSize("n must be >= 1")
    _check_p(p)
    if p == 0.0 and n < 3:
        raise Unrecoverable("pure size-2 sampling cannot identify n <= 2 coupons")

    pairs = comb(n, 2)
    mu = (1.0 - p) / pairs if pairs else 0.0
    lam = p / n

    levels: list[np.ndarray | None] = [None] * (n + 1)
    levels[n] = np.zeros(1)
    for g in range(n - 1, -1, -1):
        rest = n - g
        count = rest // 2 + 1
        i = np.arange(count, dtype=np.float64)
        alpha = rest - 2.0 * i
        beta = 2.0 * i

        base = np.ones(count)
        base += _pull(levels, g + 3, n, np.arange(count) - 1, mu * alpha * beta)
        base += _pull(levels, g + 4, n, np.arange(count) - 2, mu * 2.0 * i * (i - 1.0))
        base += _pull(levels, g + 1, n, np.arange(count), (mu * g + lam) * alpha)
        base += _pull(levels, g + 2, n, np.arange(count) - 1, (mu * g + lam) * beta)

        self_p = mu * (comb(g, 2) + i) + lam * g
        if n == 1:
            self_p = self_p + (1.0 - p)
        denom = 1.0 - self_p
        if denom.min() < _SELF_LOOP_EPS:
            raise NumericalInstability(
                f"self-loop probability ~1 at gamma={g} (n={n}, p={p})"
            )

        pair_up = mu * alpha * (alpha - 1.0) / 2.0
        vals = base.tolist()
        ups = pair_up.tolist()
        dens = denom.tolist()
        out = [0.0] * count
        nxt = 0.0  # E of the state one pair deeper in this level
        for j in range(count - 1, -1, -1):
            nxt = (vals[j] + ups[j] * nxt) / dens[j]
            out[j] = nxt
        levels[g] = np.asarray(out)

    first = levels[0]
    assert first is not None
    return float(first[0])


def tail_distribution(n: int, p: float, t_max: int) -> list[float]:
    """``P(T > t)`` for ``t = 0..t_max`` by forward probability propagation."""
    if t_max < 0:
        raise OutOfRange("t_max must be >= 0")
    if n < 1:
        raise ZeroSize("n must be >= 1")
    _check_p(p)
    if p == 0.0 and n < 3:
        raise Unrecoverable("pure size-2 sampling cannot identify n <= 2 coupons")

    states = state_space(n)
    pos = {s.as_tuple(): i for i, s in enumerate(states)}
    src_idx: list[int] = []
    dst_idx: list[int] = []
    prob: list[float] = []
    for i, s in enumerate(states):
        for tgt, q in transition_row(s, n, p).entries:
            src_idx.append(i)
            dst_idx.append(pos[tgt.as_tuple()])
            prob.append(q)
    src = np.asarray(src_idx)
    dst = np.asarray(dst_idx)
    q = np.asarray(prob)

    size = len(states)
    absorbing = size - 1  # (0, 0, n) is last in topological order
    mass = np.zeros(size)
    mass[0] = 1.0  # (n, 0, 0) is first
    tail = [float(1.0 - mass[absorbing])]
    for _ in range(t_max):
        mass = np.bincount(dst, weights=q * mass[src], minlength=size)
        tail.append(float(1.0 - mass[absorbing]))
    return tail


def ccp_expected(n: int, dist: SampleSizeDist, r: int) -> float:
    """Exact expected group draws until at least ``r`` distinct coupons are
    collected (labels play no role)."""
    if n < 1:
        raise ZeroSize("n must be >= 1")
    if r < 0 or r > n:
        raise TargetExceedsN(f"target r={r} not in 0..{n}")
    if dist.max_size > n:
        raise SizeExceedsN(f"drawable size {dist.max_size} exceeds n={n}")
    if r == 0:
        return 0.0

    expect = [0.0] * (n + 1)  # expect[c] for c >= r stays 0
    for c in range(r - 1, -1, -1):
        stay = 0.0
        acc = 1.0
        for k, pk in dist.sizes:
            total = comb(n, k)
            stay += pk * comb(c, k) / total
            top = min(k, n - c)
            for j in range(1, top + 1):
                w = pk * comb(n - c, j) * comb(c, k - j) / total
                if w > 0.0:
                    acc += w * expect[c + j]
        expect[c] = acc / (1.0 - stay)
    return expect[0]
