"""Martingales on binary words with values in Q(sqrt 2).

Values are exact :class:`~ergolab.exact.QuadRational` numbers because the
success threshold ``2 ** (floor(n ** (1/k)) / 2)`` has half-integer exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .core import EMPTY, PolyBound, PrefixSet, all_words, check_word, measure_of
from .errors import PreconditionError, SizeGuardError, UndefinedRatio
from .exact import QuadRational, as_fraction, floor_log2, iroot
from .randtests import FlattenedFamily, TestFamily

MAX_TABLE_DEPTH = 20


def success_threshold(n: int, k: int) -> QuadRational:
    """``2 ** (floor(n ** (1/k)) / 2)``."""
    return QuadRational.pow2_half(iroot(n, k))


class MartingaleTable:
    """Values of a betting strategy on every word of length at most ``depth``."""

    def __init__(self, depth: int, values: Dict[str, QuadRational]):
        if depth < 0:
            raise PreconditionError("depth must be nonnegative")
        self.depth = depth
        self.values = {check_word(w): QuadRational.coerce(v) for w, v in values.items()}
        missing = next((w for L in range(depth + 1) for w in all_words(L) if w not in self.values), None)
        if missing is not None:
            raise PreconditionError(f"martingale table lacks a value for {missing!r}")

    @classmethod
    def from_function(cls, depth: int, fn: Callable[[str], object]) -> "MartingaleTable":
        if depth > MAX_TABLE_DEPTH:
            raise SizeGuardError("martingale-depth", depth, MAX_TABLE_DEPTH)
        return cls(depth, {w: QuadRational.coerce(fn(w)) for L in range(depth + 1) for w in all_words(L)})

    @classmethod
    def constant(cls, depth: int, c=1) -> "MartingaleTable":
        return cls.from_function(depth, lambda w: c)

    def __getitem__(self, w: str) -> QuadRational:
        return self.values[w]

    @property
    def root_value(self) -> QuadRational:
        return self.values[EMPTY]

    def __eq__(self, other):
        if not isinstance(other, MartingaleTable):
            return NotImplemented
        return self.depth == other.depth and self.values == other.values


def doubling_on_zeros(depth: int) -> MartingaleTable:
    """Bet everything on 0 at every step."""
    return MartingaleTable.from_function(depth, lambda w: 2 ** len(w) if "1" not in w else 0)


@dataclass
class FairnessReport:
    passed: bool
    checked: int
    violations: List[str]
    negatives: List[str]


def check_fairness(D: MartingaleTable) -> FairnessReport:
    violations, negatives = [], []
    checked = 0
    half = Fraction(1, 2)
    for L in range(D.depth + 1):
        for w in all_words(L):
            v = D.values[w]
            if v.sign() < 0:
                negatives.append(w)
            if L < D.depth:
                checked += 1
                if (D.values[w + "0"] + D.values[w + "1"]) * half != v:
                    violations.append(w)
    return FairnessReport(not violations and not negatives, checked, violations, negatives)


# -- from a flattened test -------------------------------------------------------


def martingale_from_test(H, k: int, depth: int) -> MartingaleTable:
    """Sum over ``i >= 0`` of ``E_i + F_i`` built from ``G_i = {s in U : f(|s|) >= i}``.

    ``f(n) = floor(n ** (1/k)) / 2``.  A word ``a`` in ``U`` belongs to
    ``G_0, ..., G_floor(f(|a|))``, so it enters with multiplicity
    ``floor(f(|a|)) + 1``.  ``E`` collects ``2**f(|a|)`` over proper prefixes
    ``a`` of the argument; ``F`` is ``2**|s|`` times the sum of
    ``2**(f(|a|) - |a|)`` over extensions ``a`` of ``s`` (``s`` included).
    ``H`` is a :class:`FlattenedFamily` or an iterable of words.
    """
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if depth > MAX_TABLE_DEPTH:
        raise SizeGuardError("martingale-depth", depth, MAX_TABLE_DEPTH)
    if isinstance(H, FlattenedFamily):
        U = set()
        for n in H.indices():
            U.update(H.raw_hats.get(n, H.hats[n].words))
    else:
        U = {check_word(w) for w in H}
    weight: Dict[str, QuadRational] = {}
    for a in U:
        t = iroot(len(a), k)  # twice f(|a|)
        weight[a] = QuadRational.pow2_half(t) * (t // 2 + 1)
    # F part: push each a's contribution to its prefixes of length <= depth
    below: Dict[str, QuadRational] = {}
    for a, wt in weight.items():
        share = wt * Fraction(1, 2 ** len(a))
        for j in range(min(len(a), depth) + 1):
            p = a[:j]
            below[p] = below.get(p, QuadRational()) + share
    values: Dict[str, QuadRational] = {}
    zero = QuadRational()
    e_part = {EMPTY: zero}
    for L in range(depth + 1):
        for w in all_words(L):
            if L > 0:
                parent = w[:-1]
                e_part[w] = e_part[parent] + weight.get(parent, zero)
            values[w] = e_part[w] + below.get(w, zero) * (2 ** L)
    return MartingaleTable(depth, values)


def savings_tail(H, k: int, r: int) -> QuadRational:
    """Sum of ``2**(f(|a|) - |a|)`` over words ``a`` of ``U`` with ``f(|a|) >= r``.

    The construction needs this to stay below ``2**-r``.
    """
    U = set()
    if isinstance(H, FlattenedFamily):
        for n in H.indices():
            U.update(H.raw_hats.get(n, H.hats[n].words))
    else:
        U = set(H)
    total = QuadRational()
    for a in U:
        t = iroot(len(a), k)
        if t >= 2 * r:
            total = total + QuadRational.pow2_half(t - 2 * len(a))
    return total


# -- success and Kolmogorov ---------------------------------------------------------


@dataclass(frozen=True)
class CapturedPrefix:
    prefix: str
    rule: str = "explicit"
    source: str = ""

    def __post_init__(self):
        check_word(self.prefix)
        if self.rule not in ("explicit", "zero-at-powers-of-two"):
            raise PreconditionError(f"unknown generator rule {self.rule!r}")
        if self.rule == "zero-at-powers-of-two" and zero_at_powers_of_two(self.source)[: len(self.prefix)] != self.prefix:
            raise PreconditionError("prefix disagrees with its generator")


def zero_at_powers_of_two(source: str) -> str:
    """Copy ``source`` but put 0 at positions 2, 4, 8, ... (1-based)."""
    check_word(source)
    out = list(source)
    p = 2
    while p <= len(out):
        out[p - 1] = "0"
        p *= 2
    return "".join(out)


def success_check(D: MartingaleTable, x, k: int) -> List[int]:
    """All ``n`` with ``D(x|n) >= 2 ** (floor(n ** (1/k)) / 2)``."""
    prefix = x.prefix if isinstance(x, CapturedPrefix) else check_word(x)
    if len(prefix) > D.depth:
        raise PreconditionError("prefix is deeper than the table")
    return [n for n in range(len(prefix) + 1) if D.values[prefix[:n]] >= success_threshold(n, k)]


@dataclass
class KolmogorovReport:
    hits: List[str]
    hit_measure: Fraction
    bound: QuadRational
    passed: bool


def first_hits(D: MartingaleTable, threshold: QuadRational, L: int) -> List[str]:
    out = []
    stack = [EMPTY]
    while stack:
        w = stack.pop()
        if D.values[w] >= threshold:
            out.append(w)
        elif len(w) < L:
            stack.extend((w + "1", w + "0"))
    return sorted(out, key=lambda w: (len(w), w))


def kolmogorov_check(D: MartingaleTable, c, L: int) -> KolmogorovReport:
    """Measure of words first reaching ``c * D(root)`` within ``L`` steps, against ``1/c``."""
    c = as_fraction(c)
    if c <= 0:
        raise PreconditionError("c must be positive")
    if L > D.depth:
        raise PreconditionError("level exceeds table depth")
    root = D.root_value
    if root == 0:
        raise UndefinedRatio("root value is zero; the ratio is undefined")
    hits = first_hits(D, root * c, L)
    mu = measure_of(PrefixSet(hits))
    bound = QuadRational(1 / c)
    return KolmogorovReport(hits, mu, bound, bound >= mu)


# -- to a test -----------------------------------------------------------------------


@dataclass
class ToTestReport:
    family: TestFamily
    level_sets: Dict[int, PrefixSet]
    measures: Dict[int, Fraction]
    kolmogorov: Dict[int, Fraction]
    passed: bool


def _in_level_set(D: MartingaleTable, w: str, k: int, i: int) -> bool:
    # M(s, 1) = D(s) exactly, which is within 1 of D
    t = success_threshold(len(w), k) - 1
    return D.values[w] >= t and t >= 2 ** (i + 1)


def martingale_to_test(D: MartingaleTable, k: int, i_max: Optional[int] = None) -> ToTestReport:
    """Level sets ``U_i`` of words whose value clears the shrinking success threshold.

    Stage ``m`` of ``U_i`` keeps the words shorter than ``(2(m+2))**k``; the
    last stage covers the whole table.  Each ``U_i`` is checked against
    ``2**-i`` directly and against the Kolmogorov bound ``D(root) / 2**(i+1)``.
    """
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if i_max is None:
        i_max = max(1, D.depth)
    words = [w for L in range(D.depth + 1) for w in all_words(L)]
    m_top = 1
    while (2 * (m_top + 2)) ** k <= D.depth:
        m_top += 1
    stages = {}
    level_sets, measures, kol = {}, {}, {}
    ok = True
    for i in range(1, i_max + 1):
        members = [w for w in words if _in_level_set(D, w, k, i)]
        for m in range(1, m_top + 1):
            cut = (2 * (m + 2)) ** k
            stages[(i, m)] = tuple(w for w in members if len(w) < cut)
        U = PrefixSet(members)
        level_sets[i] = U
        measures[i] = measure_of(U)
        # every member clears 2**(i+1), so U_i sits inside the first-hit set
        hit = measure_of(PrefixSet(first_hits(D, QuadRational(2 ** (i + 1)), D.depth)))
        kol[i] = hit
        kol_ok = D.root_value * Fraction(1, 2 ** (i + 1)) >= hit
        ok = ok and measures[i] <= Fraction(1, 2 ** i) and measures[i] <= hit and kol_ok
    controlling = PolyBound.of(4, 2)
    power = PolyBound.constant(1)
    for _ in range(k):
        power = power * controlling
    fam = TestFamily("pspace", stages, power)
    return ToTestReport(fam, level_sets, measures, kol, ok)


# -- separation bundle ------------------------------------------------------------


def separation_value(w: str) -> int:
    """``2**floor(log2 |w|)`` if ``w`` is 0 at positions ``2, 4, ..., 2**floor(log2 |w|)``, else 0; 1 at the root."""
    if not w:
        return 1
    e = floor_log2(len(w))
    for i in range(1, e + 1):
        if w[2 ** i - 1] != "0":
            return 0
    return 2 ** e


def separation_martingale(depth: int) -> MartingaleTable:
    return MartingaleTable.from_function(depth, separation_value)


def exp_test_stage(n: int) -> List[str]:
    """Length-``2**n`` words that are 0 at positions ``2, 4, ..., 2**n``, in prefix form."""
    if n > 4:
        raise SizeGuardError("exp-test-level", n, 4)
    zeros = {2 ** j for j in range(1, n + 1)}
    words = [""]
    for pos in range(1, 2 ** n + 1):
        words = [w + "0" for w in words] if pos in zeros else [w + b for w in words for b in "01"]
    return words


@dataclass
class SeparationBundle:
    y: CapturedPrefix
    D: MartingaleTable
    exp_test: TestFamily
    fairness: FairnessReport
    power_values: Dict[int, QuadRational]
    power_values_ok: bool
    test_measures: Dict[int, Fraction]
    test_measures_ok: bool
    y_in_tests: Dict[int, bool]

    @property
    def passed(self) -> bool:
        return self.fairness.passed and self.power_values_ok and self.test_measures_ok and all(self.y_in_tests.values())


def separation_construct(source_bits: str, depth: Optional[int] = None, test_levels: Optional[int] = None) -> SeparationBundle:
    """Zero the source at positions ``2**m`` (``m >= 1``) and build the matching strategy and test."""
    check_word(source_bits)
    if len(source_bits) < 2:
        raise PreconditionError("source needs at least 2 bits")
    y = CapturedPrefix(zero_at_powers_of_two(source_bits), "zero-at-powers-of-two", source_bits)
    depth = len(source_bits) if depth is None else depth
    D = separation_martingale(depth)
    fair = check_fairness(D)
    reach = min(depth, len(y.prefix))
    powers = {}
    j = 0
    while 2 ** j <= reach:
        powers[j] = D.values[y.prefix[: 2 ** j]]
        j += 1
    powers_ok = all(v == 2 ** j for j, v in powers.items())
    if test_levels is None:
        test_levels = min(4, floor_log2(max(depth, 2)))
    stages = {(n, 1): exp_test_stage(n) for n in range(1, test_levels + 1)}
    fam = TestFamily("exp", stages, PolyBound.identity())
    measures = {n: measure_of(fam.stages[(n, 1)]) for n in range(1, test_levels + 1)}
    measures_ok = all(mu == Fraction(1, 2 ** n) for n, mu in measures.items())
    inside = {}
    for n in range(1, test_levels + 1):
        st = fam.stages[(n, 1)].contains_point(y.prefix)
        if st is not None:
            inside[n] = st
    return SeparationBundle(y, D, fam, fair, powers, powers_ok, measures, measures_ok, inside)
