"""Measure-preserving maps given by preimage tables, and Birkhoff averages."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .core import EMPTY, MeasureSpec, PrefixSet, all_words, check_word, combine, measure_of
from .errors import DepthError, InvalidTransformation, PreconditionError, UnsupportedExactQuery
from .exact import as_fraction
from .simplefn import SimpleFunction, linear_combine, norms, sup_deviation_set


def _is_antichain(words: Iterable[str]) -> bool:
    ws = sorted(set(words))
    # in lexicographic order a prefix sorts immediately before some extension
    return not any(ws[i + 1].startswith(ws[i]) for i in range(len(ws) - 1))


class SimpleTransformation:
    """A map T presented by the preimages ``T^{-1}[sigma]`` of cylinders.

    The left shift is built in (``SimpleTransformation.shift()``).  A table
    transformation stores preimages for words up to ``depth``; each preimage
    must be prefix-free with words no longer than ``|sigma| + c``, and
    children's preimages must partition their parent's.
    """

    def __init__(self, c: int, table: Optional[Mapping[str, Iterable[str]]] = None, builtin: Optional[str] = None):
        if c < 0:
            raise InvalidTransformation("controlling constant must be nonnegative")
        self.c = int(c)
        self.builtin = builtin
        self.table: Dict[str, PrefixSet] = {}
        self.raw: Dict[str, Tuple[str, ...]] = {}
        if builtin is not None:
            if builtin != "shift":
                raise InvalidTransformation(f"unknown builtin transformation {builtin!r}")
            if table:
                raise InvalidTransformation("builtin shift takes no table")
            self.depth = None
            return
        for sigma, words in (table or {}).items():
            check_word(sigma)
            ws = tuple(check_word(w) for w in words)
            if not _is_antichain(ws):
                raise InvalidTransformation(f"preimage of {sigma!r} is not prefix-free")
            for w in ws:
                if len(w) > len(sigma) + self.c:
                    raise InvalidTransformation(
                        f"preimage word {w!r} of {sigma!r} exceeds length bound {len(sigma) + self.c}"
                    )
            self.raw[sigma] = ws
            self.table[sigma] = PrefixSet(ws)
        if EMPTY in self.table and self.table[EMPTY] != PrefixSet.full():
            raise InvalidTransformation("the preimage of the whole space must be the whole space")
        self.depth = max((len(s) for s in self.table), default=0)
        self._check_consistency()

    @classmethod
    def shift(cls) -> "SimpleTransformation":
        return cls(1, builtin="shift")

    @property
    def is_shift(self) -> bool:
        return self.builtin == "shift"

    def _lookup(self, sigma: str) -> Optional[PrefixSet]:
        if sigma == EMPTY:
            return PrefixSet.full()
        return self.table.get(sigma)

    def _check_consistency(self):
        for sigma in sorted(self.table, key=lambda w: (len(w), w)) + [EMPTY]:
            parent = self._lookup(sigma)
            left, right = self._lookup(sigma + "0"), self._lookup(sigma + "1")
            if left is None or right is None:
                continue
            if combine("intersect", left, right):
                raise InvalidTransformation(f"preimages of {sigma + '0'!r} and {sigma + '1'!r} overlap")
            if combine("union", left, right) != parent:
                raise InvalidTransformation(
                    f"preimages of {sigma + '0'!r} and {sigma + '1'!r} do not make up the preimage of {sigma!r}"
                )

    def preimage_of_word(self, sigma: str) -> PrefixSet:
        if self.is_shift:
            return PrefixSet(["0" + sigma, "1" + sigma])
        got = self._lookup(sigma)
        if got is None:
            raise DepthError(sigma, self.depth)
        return got

    def __eq__(self, other):
        if not isinstance(other, SimpleTransformation):
            return NotImplemented
        return (self.c, self.builtin, self.table) == (other.c, other.builtin, other.table)

    def __repr__(self):
        if self.is_shift:
            return "SimpleTransformation.shift()"
        return f"SimpleTransformation(c={self.c}, depth={self.depth})"


def preimage(t: SimpleTransformation, s: PrefixSet, n: int = 1) -> PrefixSet:
    """``T^{-n}(S)`` by iterating one-step preimages."""
    if n < 0:
        raise PreconditionError("preimage needs n >= 0")
    if t.is_shift:
        heads = list(all_words(n))
        return PrefixSet(u + w for w in s.words for u in heads)
    cur = s
    for _ in range(n):
        words: List[str] = []
        for w in cur.sorted_words():
            words.extend(t.preimage_of_word(w).words)
        cur = PrefixSet(words)
    return cur


def pullback(f: SimpleFunction, t: SimpleTransformation, i: int) -> SimpleFunction:
    """``f o T^i`` as a simple function of level ``level(f) + c*i``."""
    if i < 0:
        raise PreconditionError("pullback needs i >= 0")
    if i == 0:
        return f
    level = f.level + t.c * i
    if t.is_shift:
        heads = list(all_words(i))
        return SimpleFunction(level, {u + w: v for w, v in f.cells.items() for u in heads}, _trusted=True)
    terms = []
    for w, v in f.cells.items():
        for u in preimage(t, PrefixSet([w]), i).words:
            terms.append((u, v))
    return SimpleFunction.from_increments(level, terms)


def birkhoff_average(f: SimpleFunction, t: SimpleTransformation, n: int) -> SimpleFunction:
    """``(f + f o T + ... + f o T^{n-1}) / n``."""
    if n < 1:
        raise PreconditionError("Birkhoff averages need n >= 1")
    if n == 1:
        return f
    w = Fraction(1, n)
    out = linear_combine([(w, pullback(f, t, i)) for i in range(n)])
    return out.at_level(f.level + t.c * (n - 1))


@dataclass
class MeasurePreservingReport:
    passed: bool
    checked: int
    level: int
    violation: Optional[Dict[str, object]] = None


def check_measure_preserving(t: SimpleTransformation, m: MeasureSpec, level: int) -> MeasurePreservingReport:
    if not m.exact:
        raise UnsupportedExactQuery("measure preservation needs an exact measure")
    checked = 0
    for length in range(level + 1):
        for sigma in all_words(length):
            pre = measure_of(t.preimage_of_word(sigma), m)
            target = m.cylinder(sigma)
            checked += 1
            if pre != target:
                return MeasurePreservingReport(
                    False, checked, level, {"sigma": sigma, "preimage_measure": pre, "measure": target}
                )
    return MeasurePreservingReport(True, checked, level)


@dataclass
class CocycleReport:
    g: SimpleFunction
    u: SimpleFunction
    identity_holds: bool
    u_l1: Fraction
    u_l1_bound: Fraction
    lhs: SimpleFunction = field(repr=False, default=None)
    rhs: SimpleFunction = field(repr=False, default=None)


def cocycle_decompose(
    f: SimpleFunction, t: SimpleTransformation, k: int, n: int, m: MeasureSpec = MeasureSpec()
) -> CocycleReport:
    """Split ``A_n`` of ``g = A_k f`` as ``A_n f`` plus a coboundary term."""
    if k < 1 or n < 1:
        raise PreconditionError("cocycle decomposition needs k >= 1 and n >= 1")
    g = birkhoff_average(f, t, k)
    u = linear_combine([(k - 1 - j, pullback(f, t, j)) for j in range(k - 1)]).at_level(
        f.level + t.c * max(k - 2, 0)
    )
    lhs = birkhoff_average(g, t, n) - birkhoff_average(f, t, n)
    rhs = (pullback(u, t, n) - u).scale(Fraction(1, n * k))
    u_l1 = norms(u, m)["l1"]
    bound = Fraction(k * (k - 1), 2) * norms(f, m)["l1"]
    return CocycleReport(g, u, lhs == rhs, u_l1, bound, lhs, rhs)


def maximal_inequality_check(
    f: SimpleFunction, t: SimpleTransformation, horizon: int, delta, m: MeasureSpec = MeasureSpec()
) -> Dict[str, object]:
    """Truncated maximal inequality: ``mu{max_{n<=N} |A_n f| > delta} <= |f|_1 / delta``."""
    delta = as_fraction(delta)
    if delta <= 0 or horizon < 1:
        raise PreconditionError("needs delta > 0 and horizon >= 1")
    zero = SimpleFunction.zero()
    averages = [birkhoff_average(f, t, n) for n in range(1, horizon + 1)]
    event = sup_deviation_set(averages, zero, delta, strict=True)
    lhs = measure_of(event, m)
    rhs = norms(f, m)["l1"] / delta
    return {"lhs": lhs, "rhs": rhs, "pass": lhs <= rhs}


def correlation_average(
    f: SimpleFunction, t: SimpleTransformation, n: int, m: MeasureSpec = MeasureSpec()
) -> Dict[str, object]:
    """Average correlation of ``f`` with its iterates, against Cauchy-Schwarz."""
    if n < 1:
        raise PreconditionError("needs n >= 1")
    if not m.exact:
        raise UnsupportedExactQuery("correlation needs an exact measure")
    mean = norms(f, m)["integral"]
    total = sum((norms(pullback(f, t, i) * f, m)["integral"] for i in range(n)), Fraction(0))
    corr = abs(total / n - mean * mean)
    centred = birkhoff_average(f, t, n) - SimpleFunction.constant(mean)
    a = norms(centred, m)["l2sq"]
    b = norms(f, m)["l2sq"]
    return {"corr": corr, "cs_bound": (a, b), "pass": corr * corr <= a * b}
