"""Closed forms, series, baselines, and minimal-sample counts.

Printed closed forms are implemented verbatim and kept separate from the
proof-level expressions they were derived from; where the two disagree the
verify command reports both against brute force instead of silently fixing
either.  Each result therefore carries a provenance tag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import EmptySupport, OutOfRange, SizeExceedsN, TargetExceedsN, TooSmallN, ZeroSize
from .model import SampleSizeDist


class Provenance(Enum):
    PRINTED_CLOSED_FORM = "printed-closed-form"
    PROOF_TAIL_SUM = "proof-tail-sum"
    PROOF_SERIES = "proof-series"
    BASELINE = "baseline"
    CONJECTURE = "conjecture"


@dataclass(frozen=True)
class FormulaResult:
    value: float
    provenance: Provenance


def harmonic(n: int) -> float:
    """The n-th harmonic number; ``harmonic(0) == 0``."""
    if n < 0:
        raise OutOfRange("n must be >= 0")
    return math.fsum(1.0 / i for i in range(1, n + 1))


def ccp_expected_full(n: int) -> float:
    """Classic single-draw collection baseline ``n * H_n``."""
    if n < 1:
        raise ZeroSize("n must be >= 1")
    return n * harmonic(n)


def ccp_expected_partial(n: int, r: int) -> float:
    """Single-draw collection of any ``r`` coupons: ``n * (H_n - H_{n-r})``."""
    if n < 1:
        raise ZeroSize("n must be >= 1")
    if not 1 <= r <= n:
        raise TargetExceedsN(f"r={r} not in 1..{n}")
    return n * (harmonic(n) - harmonic(n - r))


def _st1_numerators(n: int) -> tuple[int, int, int, int]:
    # q1 = (n-2)/n, q2 = ((n-2)(n-3)+2)/(n(n-1)), q3 = (n-2)(n-3)/(n(n-1)),
    # all over the common denominator n(n-1).
    den = n * (n - 1)
    return (n - 2) * (n - 1), (n - 2) * (n - 3) + 2, (n - 2) * (n - 3), den


def st1_tail(n: int, t: int) -> float:
    """``P(samples > t)`` for pinning one specific coupon under pure size-2
    sampling: ``q1^t + (q2^t - q3^t)(n - 1)``.

    Evaluated in exact integer arithmetic so that the ``t <= 1`` values are
    exactly one and the sequence is truly non-increasing.
    """
    if n < 3:
        raise TooSmallN("defined for n >= 3")
    if t < 0:
        raise OutOfRange("t must be >= 0")
    a1, a2, a3, den = _st1_numerators(n)
    num = a1**t + (n - 1) * (a2**t - a3**t)
    return float(Fraction(num, den**t))


def st1_expected(n: int, variant: str = "tailsum") -> FormulaResult:
    """Expected samples to pin one specific coupon, pure size-2 sampling.

    ``"printed"`` is the closed form as published:
    ``n(n^3 + n^2 + 5n - 5) / ((n+3)(5n-4))``.  ``"tailsum"`` sums the
    proof's own tail expression in closed geometric form:
    ``1/(1-q1) + (n-1)/(1-q2) - (n-1)/(1-q3)``.  The two are *not* required
    to agree; brute force sides with the tail sum.
    """
    if n < 3:
        raise TooSmallN("defined for n >= 3")
    key = variant.lower().replace("_", "").replace("-", "")
    if key == "printed":
        value = n * (n**3 + n**2 + 5 * n - 5) / ((n + 3) * (5 * n - 4))
        return FormulaResult(value, Provenance.PRINTED_CLOSED_FORM)
    if key == "tailsum":
        a1, a2, a3, den = _st1_numerators(n)
        value = float(
            Fraction(den, den - a1)
            + (n - 1) * Fraction(den, den - a2)
            - (n - 1) * Fraction(den, den - a3)
        )
        return FormulaResult(value, Provenance.PROOF_TAIL_SUM)
    raise OutOfRange(f"unknown variant {variant!r}")


def t1_expected_series(n: int) -> FormulaResult:
    """Expected samples to pin *some* coupon, pure size-2 sampling.

    With ``m = (n-2)(n+1)/2``:
    ``1 + sum_{i=1..floor(n/2)} n!/((n-2i)! 2^i) * (m-i)!/m!``.
    The upper limit is read as ``floor(n/2)`` (required for odd n).  Exact
    rational arithmetic below n=20, interleaved running products above to
    keep magnitudes bounded.
    """
    if n < 3:
        raise TooSmallN("defined for n >= 3")
    m = (n - 2) * (n + 1) // 2
    if n < 20:
        total = Fraction(1)
        for i in range(1, n // 2 + 1):
            term = Fraction(1)
            for j in range(i):
                term *= Fraction((n - 2 * j) * (n - 2 * j - 1), 2 * (m - j))
            total += term
        return FormulaResult(float(total), Provenance.PRINTED_CLOSED_FORM)
    total = 1.0
    for i in range(1, n // 2 + 1):
        term = 1.0
        for j in range(i):
            term *= (n - 2 * j) * (n - 2 * j - 1) / (2.0 * (m - j))
        total += term
    return FormulaResult(total, Provenance.PRINTED_CLOSED_FORM)


def kp3_expected(p: float, variant: str = "proof-series") -> FormulaResult:
    """Expected samples for full identification at n=3 under two-size sampling.

    ``"printed"`` evaluates the published rational
    ``(13p^4 + 63p^3 + 74p^2 - 200p - 120) / (4(p+2)^2(3-p))`` exactly as
    printed (it is negative on all of [0, 1]).  ``"proof-series"`` sums the
    proof's case decomposition

        2 + sum_{t>=2} ( sum_{s=2..t-1} C(t,s) p^s (1-p)^{t-s} (s+3)/3^{t-1}
                         + (1-p)^t/3^{t-1} + 3 t p (1-p)^{t-1}/3^{t-1}
                         + p^t t/3^{t-1} )

    truncated once the remaining tail is provably below 1e-12.  Neither
    variant is required to agree with the exact chain.
    """
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p={p} not in [0, 1]")
    key = variant.lower().replace("_", "").replace("-", "")
    if key == "printed":
        value = (13 * p**4 + 63 * p**3 + 74 * p**2 - 200 * p - 120) / (
            4 * (p + 2) ** 2 * (3 - p)
        )
        return FormulaResult(value, Provenance.PRINTED_CLOSED_FORM)
    if key != "proofseries":
        raise OutOfRange(f"unknown variant {variant!r}")

    def tail_bound(t0: int) -> float:
        # Each t-term is bounded by (5t + 7)/3^(t-1); sum the geometric tail.
        x = 1.0 / 3.0
        head = x ** (t0 - 1)
        return 5.0 * head * (t0 * (1 - x) + x) / (1 - x) ** 2 + 7.0 * head / (1 - x)

    total = 2.0
    t = 2
    while tail_bound(t) > 1e-12:
        inner = 0.0
        for s in range(2, t):
            inner += math.comb(t, s) * p**s * (1 - p) ** (t - s) * (s + 3)
        term = inner + (1 - p) ** t + 3 * t * p * (1 - p) ** (t - 1) + p**t * t
        total += term / 3.0 ** (t - 1)
        t += 1
    return FormulaResult(total, Provenance.PROOF_SERIES)


def _min_fixed_size(n: int, k: int) -> int:
    """Minimal complete-recovery sample count for one fixed size ``k``.

    k=1 trivially needs every coupon alone; k=2 is the proven ceil(2n/3);
    other sizes use the conjectured ceil(2n/(k+1)), with sizes above n/2
    first reflected to their complement n-k.
    """
    if k == 1:
        return n
    if k == 2:
        return -(-2 * n // 3)
    kk = k if 2 * k <= n else n - k
    return -(-2 * n // (kk + 1))


def min_sample_pivot(n: int, dist: SampleSizeDist) -> tuple[int, bool]:
    """The support size that governs the minimal sample count, plus whether
    the resulting count is proven (sizes 1 and 2) or conjectured."""
    if n < 1:
        raise ZeroSize("n must be >= 1")
    support = dist.support
    if not support:
        raise EmptySupport("empty support")
    if dist.max_size > n:
        raise SizeExceedsN(f"support size {dist.max_size} exceeds n={n}")
    k_m = min(support, key=lambda k: (_min_fixed_size(n, k), k))
    proven = k_m == 1 or (k_m == 2 and n >= 3)
    return k_m, proven


def min_samples(n: int, dist: SampleSizeDist) -> int:
    """Minimal number of samples that can possibly identify all coupons.

    Governed by the support size closest to n/2 (equivalently, the size with
    the smallest fixed-size floor); mixing sizes never beats the best single
    size.
    """
    k_m, _ = min_sample_pivot(n, dist)
    return _min_fixed_size(n, k_m)


def min_witness_k2(n: int) -> list[tuple[int, int]]:
    """A sequence of exactly ``ceil(2n/3)`` coupon pairs achieving complete
    recovery: partition into triples wired as paths, folding a remainder of
    one or two coupons into a final group of four or five."""
    if n < 3:
        raise TooSmallN("defined for n >= 3")
    rem = n % 3
    cutoff = n if rem == 0 else n - 3 - rem
    edges: list[tuple[int, int]] = []
    for start in range(0, cutoff, 3):
        edges.append((start, start + 1))
        edges.append((start + 1, start + 2))
    if rem:
        for c in range(cutoff, n - 1):
            edges.append((c, c + 1))
    assert len(edges) == -(-2 * n // 3)
    return edges


def conjectured_2lccp_expected(n: int) -> FormulaResult:
    """Conjectured large-n expectation ``n * H_n / 2`` for pure size-2
    sampling; small-n values run below it."""
    if n < 3:
        raise TooSmallN("defined for n >= 3")
    return FormulaResult(n * harmonic(n) / 2.0, Provenance.CONJECTURE)
