"""Exact step functions on cylinders.

A :class:`SimpleFunction` has a declared ``level`` (words shorter than it are
rejected by :meth:`SimpleFunction.evaluate`) and stores its values on the
coarsest prefix-free family of cylinders on which it is constant.  Zero
regions are not stored.  This keeps functions of level 60 or more cheap when
they are supported on a handful of cylinders; :meth:`SimpleFunction.table`
expands to the uniform level on demand.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .core import EMPTY, MeasureSpec, PrefixSet, all_words, check_word
from .errors import PreconditionError, SizeGuardError, TooShortError, UnsupportedExactQuery
from .exact import as_fraction

ZERO = Fraction(0)

# expanding a function to a uniform table beyond this many words is refused
MAX_TABLE_LEVEL = 22


def _normalize(increments: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    """Coarsest prefix-free cell map for the function ``sum c_w * chi_w``."""
    terms = sorted((w, c) for w, c in increments.items() if c != 0)
    out: Dict[str, Fraction] = {}

    def rec(prefix: str, acc: Fraction, items: List[Tuple[str, Fraction]]):
        # returns the constant value on [prefix], or None once cells were emitted
        rest = []
        for w, c in items:
            if len(w) == len(prefix):
                acc += c
            else:
                rest.append((w, c))
        if not rest:
            return acc
        d = len(prefix)
        left = [t for t in rest if t[0][d] == "0"]
        right = [t for t in rest if t[0][d] == "1"]
        lv = rec(prefix + "0", acc, left) if left else acc
        rv = rec(prefix + "1", acc, right) if right else acc
        if lv is not None and rv is not None and lv == rv:
            return lv
        if lv is not None and lv != 0:
            out[prefix + "0"] = lv
        if rv is not None and rv != 0:
            out[prefix + "1"] = rv
        return None

    root = rec(EMPTY, ZERO, terms)
    if root is not None and root != 0:
        out[EMPTY] = root
    return out


class SimpleFunction:
    """Finite rational combination of cylinder indicators, at a declared level."""

    __slots__ = ("level", "cells")

    def __init__(self, level: int, cells: Mapping[str, Fraction], _trusted: bool = False):
        if level < 0:
            raise PreconditionError("level must be nonnegative")
        if _trusted:
            self.cells = dict(cells)
        else:
            self.cells = _normalize({check_word(w): as_fraction(v) for w, v in cells.items()})
        longest = max((len(w) for w in self.cells), default=0)
        if longest > level:
            raise PreconditionError(f"cell of length {longest} exceeds level {level}")
        self.level = level

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_increments(cls, level: int, terms: Iterable[Tuple[str, Fraction]]) -> "SimpleFunction":
        acc: Dict[str, Fraction] = {}
        for w, c in terms:
            check_word(w)
            if len(w) > level:
                raise PreconditionError(f"word {w!r} longer than level {level}")
            acc[w] = acc.get(w, ZERO) + as_fraction(c)
        return cls(level, _normalize(acc), _trusted=True)

    @classmethod
    def from_table(cls, level: int, entries: Mapping[str, Fraction]) -> "SimpleFunction":
        for w in entries:
            if len(w) != level:
                raise PreconditionError(f"table word {w!r} is not of level {level}")
        return cls(level, entries)

    @classmethod
    def constant(cls, c, level: int = 0) -> "SimpleFunction":
        return cls(level, {EMPTY: as_fraction(c)})

    @classmethod
    def zero(cls, level: int = 0) -> "SimpleFunction":
        return cls(level, {}, _trusted=True)

    @classmethod
    def chi(cls, word: str, level: Optional[int] = None) -> "SimpleFunction":
        return cls(len(word) if level is None else level, {word: Fraction(1)})

    # -- queries -------------------------------------------------------------

    def evaluate(self, w: str) -> Fraction:
        check_word(w)
        if len(w) < self.level:
            raise TooShortError(f"word of length {len(w)} is shorter than level {self.level}")
        return self._value_at(w)

    def _value_at(self, w: str) -> Fraction:
        for j in range(min(len(w), self.level) + 1):
            v = self.cells.get(w[:j])
            if v is not None:
                return v
        return ZERO

    def value_on(self, sigma: str) -> Optional[Fraction]:
        """The value on [sigma] if constant there, else None."""
        for j in range(len(sigma) + 1):
            v = self.cells.get(sigma[:j])
            if v is not None:
                return v
        if any(w.startswith(sigma) for w in self.cells):
            return None
        return ZERO

    def table(self, guard: int = MAX_TABLE_LEVEL) -> Dict[str, Fraction]:
        """Nonzero values on all words of the declared level."""
        if self.level > guard:
            raise SizeGuardError("table-level", self.level, guard)
        out = {}
        for w, v in self.cells.items():
            for tail in all_words(self.level - len(w)):
                out[w + tail] = v
        return out

    def full_table(self, guard: int = MAX_TABLE_LEVEL) -> Dict[str, Fraction]:
        t = self.table(guard)
        return {w: t.get(w, ZERO) for w in all_words(self.level)}

    def support(self) -> PrefixSet:
        return PrefixSet(self.cells)

    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self.cells.values()), default=ZERO)

    def at_level(self, level: int) -> "SimpleFunction":
        return SimpleFunction(level, self.cells, _trusted=True)

    # -- algebra -------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SimpleFunction):
            return NotImplemented
        return self.cells == other.cells

    def __hash__(self):
        return hash(frozenset(self.cells.items()))

    def __repr__(self):
        body = ", ".join(f"{w or 'λ'}: {v}" for w, v in sorted(self.cells.items()))
        return f"SimpleFunction(level={self.level}, {{{body}}})"

    def __add__(self, other: "SimpleFunction") -> "SimpleFunction":
        return linear_combine([(1, self), (1, other)])

    def __sub__(self, other: "SimpleFunction") -> "SimpleFunction":
        return linear_combine([(1, self), (-1, other)])

    def __neg__(self) -> "SimpleFunction":
        return self.scale(-1)

    def scale(self, c) -> "SimpleFunction":
        c = as_fraction(c)
        if c == 0:
            return SimpleFunction.zero(self.level)
        return SimpleFunction(self.level, {w: c * v for w, v in self.cells.items()}, _trusted=True)

    def __mul__(self, other: "SimpleFunction") -> "SimpleFunction":
        """Pointwise product."""
        out: Dict[str, Fraction] = {}
        for a, va in self.cells.items():
            vb = other.value_on(a)
            if vb is not None:
                if vb != 0:
                    out[a] = va * vb
                continue
            for b, v in other.cells.items():
                if b.startswith(a):
                    out[b] = va * v
        return SimpleFunction(max(self.level, other.level), out)

    def map_values(self, fn) -> "SimpleFunction":
        """Apply ``fn`` cellwise; ``fn(0)`` must be 0."""
        if fn(ZERO) != 0:
            raise PreconditionError("cellwise map must fix zero")
        return SimpleFunction(self.level, {w: fn(v) for w, v in self.cells.items()})


def indicator(s: PrefixSet, level: Optional[int] = None) -> SimpleFunction:
    lev = s.max_length() if level is None else level
    return SimpleFunction(lev, {w: Fraction(1) for w in s.words})


def evaluate(f: SimpleFunction, w: str) -> Fraction:
    return f.evaluate(w)


def linear_combine(terms: Sequence[Tuple[object, SimpleFunction]]) -> SimpleFunction:
    level = max((f.level for _, f in terms), default=0)
    acc: Dict[str, Fraction] = {}
    for c, f in terms:
        c = as_fraction(c)
        if c == 0:
            continue
        for w, v in f.cells.items():
            acc[w] = acc.get(w, ZERO) + c * v
    return SimpleFunction(level, _normalize(acc), _trusted=True)


def norms(f: SimpleFunction, m: MeasureSpec = MeasureSpec()) -> Dict[str, Fraction]:
    if not m.exact:
        raise UnsupportedExactQuery("norms need an exact measure")
    integral = l1 = l2sq = ZERO
    for w, v in f.cells.items():
        mu = m.cylinder(w)
        integral += v * mu
        l1 += abs(v) * mu
        l2sq += v * v * mu
    return {"integral": integral, "l1": l1, "l2sq": l2sq}


def integral(f: SimpleFunction, m: MeasureSpec = MeasureSpec()) -> Fraction:
    return norms(f, m)["integral"]


def l1_norm(f: SimpleFunction, m: MeasureSpec = MeasureSpec()) -> Fraction:
    return norms(f, m)["l1"]


def sup_deviation_set(
    family: Sequence[SimpleFunction], g: SimpleFunction, t, strict: bool = False
) -> PrefixSet:
    """``{x : max_f |f(x) - g(x)| >= t}`` (``> t`` when ``strict``)."""
    t = as_fraction(t)
    if t <= 0:
        raise PreconditionError("deviation threshold must be positive")
    words = []
    for f in family:
        for w, v in (f - g).cells.items():
            if abs(v) > t or (not strict and abs(v) == t):
                words.append(w)
    return PrefixSet(words)
