"""Exact L2 deviation of shift averages of cylinder indicators.

For a word ``sigma`` of length ``k`` the indicator ``chi_sigma`` under the
fair-coin shift has mean ``2**-k`` and covariances that depend only on the
shifts at which ``sigma`` overlaps itself.  That gives the variance of the
n-th Birkhoff average in ``O(k)`` exact operations for any ``n``, which is
what makes thresholds like ``n = k**3 * 2**80`` checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence

import numpy as np

from .core import PolyBound, check_word, q1, q2
from .errors import PreconditionError, SizeGuardError
from .exact import floor_log2
from .kernels import occurrence_counts, occurrences
from .prng import DEFAULT_SEED, seeded_words

BRUTE_FORCE_MAX_BITS = 24


@dataclass(frozen=True)
class OverlapProfile:
    word: str
    overlaps: FrozenSet[int]


def overlap_profile(sigma: str) -> OverlapProfile:
    check_word(sigma)
    k = len(sigma)
    if k == 0:
        raise PreconditionError("overlap profile of the empty word")
    return OverlapProfile(sigma, frozenset(d for d in range(1, k) if sigma[d:] == sigma[: k - d]))


def exact_l2_deviation_shift(sigma: str, n: int) -> Fraction:
    """``|| A_n chi_sigma - 2**-k ||_2 ** 2`` under the fair-coin shift."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    prof = overlap_profile(sigma)
    k = len(sigma)
    p = Fraction(1, 2 ** k)
    acc = n * (p - p * p)
    for d in range(1, min(k, n)):
        joint = Fraction(1, 2 ** (k + d)) if d in prof.overlaps else Fraction(0)
        acc += 2 * (n - d) * (joint - p * p)
    return acc / (n * n)


def brute_force_l2_deviation(sigma: str, n: int, use_numba: Optional[bool] = None) -> Fraction:
    """Same quantity by enumerating all ``2**(n+k-1)`` words."""
    k = len(sigma)
    N = n + k - 1
    if N > BRUTE_FORCE_MAX_BITS:
        raise SizeGuardError("brute-force-bits", N, BRUTE_FORCE_MAX_BITS)
    counts = occurrence_counts(sigma, n, use_numba)
    values, freq = np.unique(counts, return_counts=True)
    # sum over x of (count * 2^k - n)^2, kept in Python integers
    total = sum(int(f) * (int(c) * 2 ** k - n) ** 2 for c, f in zip(values, freq))
    return Fraction(total, 2 ** N * n * n * 4 ** k)


@dataclass(frozen=True)
class RateReport:
    m: int
    k: int
    sigma: str
    n_star: int
    l2sq_deviation: Fraction
    bound_sq: Fraction
    passed: bool


def rate_words(m: int, seed: int = DEFAULT_SEED, random_count: int = 3) -> List[str]:
    k = q1(m)
    return ["0" * k, "01" * (k // 2)] + seeded_words(seed, k, random_count)


def rate_threshold(k: int, m: int) -> int:
    return k ** 3 * 2 ** q2(m)


def verify_rate_bound(m: int, sigmas: Optional[Sequence[str]] = None, seed: int = DEFAULT_SEED) -> List[RateReport]:
    """Check ``|| A_{n*} chi_sigma - 2**-k ||_2**2 <= 2**-2m`` at ``n* = k**3 2**q2(m)``."""
    if m < 0:
        raise PreconditionError("m must be nonnegative")
    words = rate_words(m, seed) if sigmas is None else list(sigmas)
    need = q1(m)
    out = []
    for sigma in words:
        check_word(sigma)
        if len(sigma) < need:
            raise PreconditionError(
                f"word length {len(sigma)} is below the required 2(m+6) = {need}"
            )
        k = len(sigma)
        n_star = rate_threshold(k, m)
        dev = exact_l2_deviation_shift(sigma, n_star)
        bound = Fraction(1, 4 ** m)
        out.append(RateReport(m, k, sigma, n_star, dev, bound, dev <= bound))
    return out


def curve_majorant(k: int, n: int) -> Fraction:
    """``3 * 2**-k / n``, an upper bound on the deviation for every word of length k.

    Each covariance term is at most ``2**-(k+d)``, so the bracket in the
    closed form is at most ``n * 2**-k * (1 + 2 * sum_d 2**-d) < 3 n 2**-k``.
    """
    return Fraction(3, 2 ** k * n)


# -- block decomposition ------------------------------------------------------


@dataclass(frozen=True)
class PillaiDecomposition:
    sigma: str
    n: int
    index_sets: Dict[int, FrozenSet[int]]
    remainder_positions: FrozenSet[int]
    overshoot_positions: FrozenSet[int]
    disjoint: bool

    @property
    def k(self) -> int:
        return len(self.sigma)

    def slack(self) -> int:
        return len(self.remainder_positions) + len(self.overshoot_positions)

    def slack_bound(self) -> int:
        """``(k-1) * (floor(log2 n) + 2)``."""
        return (self.k - 1) * (floor_log2(self.n) + 2)

    def tight_slack_bound(self) -> int:
        """``(k-1) * (floor(log2 max(n/k, 1)) + 2)``."""
        return (self.k - 1) * (floor_log2(max(Fraction(self.n, self.k), Fraction(1))) + 2)


def pillai_decompose(sigma: str, n: int) -> PillaiDecomposition:
    """Split start positions into blocks of disjoint, non-overlapping windows.

    Scale ``p = 1`` takes the aligned positions ``i*k``.  Scale ``p >= 2``
    takes the windows straddling the aligned block boundaries at spacing
    ``2**(p-1) * k``: positions ``2**(p-1) k i + 2**(p-2) k - j`` for
    ``1 <= j <= k-1``.  For ``k = 1`` only the aligned scale exists.
    """
    check_word(sigma)
    k = len(sigma)
    if k == 0:
        raise PreconditionError("decomposition of the empty word")
    if n < k:
        raise PreconditionError(f"needs n >= |sigma| (got n={n}, k={k})")
    sets: Dict[int, FrozenSet[int]] = {1: frozenset(i * k for i in range(n // k + 1))}
    if k >= 2:
        top = 1 + floor_log2(Fraction(n, k))
        for p in range(2, top + 1):
            step = 2 ** (p - 1) * k
            base = 2 ** (p - 2) * k
            sets[p] = frozenset(
                step * i + base - j for j in range(1, k) for i in range(n // step + 1)
            )
    disjoint = True
    seen: set = set()
    for p in sorted(sets):
        if seen & sets[p]:
            disjoint = False
        seen |= sets[p]
    remainder = frozenset(range(n)) - seen
    overshoot = frozenset(i for i in seen if i >= n)
    return PillaiDecomposition(sigma, n, sets, remainder, overshoot, disjoint)


@dataclass(frozen=True)
class PillaiIdentityReport:
    sigma: str
    n: int
    words_checked: int
    identity_holds: bool
    disjoint: bool
    max_correction: int
    correction_bound: int
    within_bound: bool


def pillai_identity_check(sigma: str, n: int, use_numba: Optional[bool] = None) -> PillaiIdentityReport:
    """Exhaustive occurrence accounting over all words of length ``n + k - 1``.

    For every word, ``n * A_n`` (the occurrence count at positions
    ``0..n-1``) must equal the occurrences at the in-range block positions
    plus the occurrences at remainder positions.  The correction is the
    remainder part; its maximum is compared with ``(k-1)(floor(log2 n)+2)``.
    """
    k = len(sigma)
    if n + k - 1 > BRUTE_FORCE_MAX_BITS:
        raise SizeGuardError("brute-force-bits", n + k - 1, BRUTE_FORCE_MAX_BITS)
    dec = pillai_decompose(sigma, n)
    occ = occurrences(sigma, n, use_numba)
    total = occ.sum(axis=1, dtype=np.int64)
    block_pos = sorted(i for s in dec.index_sets.values() for i in s if i < n)
    rem_pos = sorted(dec.remainder_positions)
    block = occ[:, block_pos].sum(axis=1, dtype=np.int64) if block_pos else np.zeros_like(total)
    rem = occ[:, rem_pos].sum(axis=1, dtype=np.int64) if rem_pos else np.zeros_like(total)
    holds = bool(np.array_equal(total, block + rem)) and dec.disjoint
    max_corr = int(rem.max()) if rem.size else 0
    bound = dec.slack_bound()
    return PillaiIdentityReport(sigma, n, int(total.size), holds, dec.disjoint, max_corr, bound, max_corr <= bound)


# -- threshold calculator ----------------------------------------------------


def l1_threshold(p: PolyBound, t: PolyBound, c: int, m: int) -> int:
    """``P**3 * 2**q2((t(Q + P))**c + P + m + 3)`` with ``Q = q1(m+3)``, ``P = p(Q)``."""
    if c < 0 or m < 0:
        raise PreconditionError("c and m must be nonnegative")
    Q = q1(m + 3)
    P = p(Q)
    return P ** 3 * 2 ** q2(t(Q + P) ** c + P + m + 3)
