"""Words, clopen sets, measures and polynomial bounds on the Cantor space.

Words are plain ``str`` objects over ``'0'``/``'1'``; the empty string is the
empty word and names the whole space.  Bit positions are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from .errors import InvalidWordError, PreconditionError, UnsupportedExactQuery
from .exact import as_fraction, ceil_log2

EMPTY = ""


def check_word(w: str) -> str:
    if not isinstance(w, str) or any(ch not in "01" for ch in w):
        raise InvalidWordError(f"not a binary word: {w!r}")
    return w


def bit(w: str, i: int) -> int:
    """The i-th bit of ``w``, counting from 1."""
    if not 1 <= i <= len(w):
        raise IndexError(f"bit index {i} outside 1..{len(w)}")
    return 1 if w[i - 1] == "1" else 0


def is_prefix(a: str, b: str) -> bool:
    """``a`` is a (not necessarily proper) prefix of ``b``."""
    return b.startswith(a)


def all_words(length: int) -> Iterator[str]:
    for bits in product("01", repeat=length):
        yield "".join(bits)


def sibling(w: str) -> str:
    return w[:-1] + ("1" if w[-1] == "0" else "0")


# -- prefix sets --------------------------------------------------------------


def _canonical_words(words: Iterable[str]) -> frozenset:
    ws = {check_word(w) for w in words}
    if not ws:
        return frozenset()
    # drop words that have a proper prefix in the family
    keep = set()
    for w in sorted(ws, key=len):
        if not any(w[:j] in keep for j in range(len(w))):
            keep.add(w)
    # merge sibling pairs bottom-up; a merged parent cannot collide with the antichain
    by_len: Dict[int, set] = {}
    for w in keep:
        by_len.setdefault(len(w), set()).add(w)
    for length in range(max(by_len), 0, -1):
        layer = by_len.get(length)
        if not layer:
            continue
        for w in sorted(layer):
            if w not in layer or w[-1] != "0":
                continue
            s = w[:-1] + "1"
            if s in layer:
                layer.discard(w)
                layer.discard(s)
                by_len.setdefault(length - 1, set()).add(w[:-1])
    return frozenset(w for layer in by_len.values() for w in layer)


class PrefixSet:
    """Canonical finite antichain of words denoting a clopen set.

    Canonical means no word is a prefix of another and no sibling pair is
    present.  Two PrefixSets are equal exactly when they denote the same set.
    """

    __slots__ = ("words", "_prefixes")

    def __init__(self, words: Iterable[str] = ()):
        self.words = _canonical_words(words)
        self._prefixes = None

    @classmethod
    def full(cls) -> "PrefixSet":
        return cls([EMPTY])

    @classmethod
    def empty(cls) -> "PrefixSet":
        return cls()

    def __iter__(self):
        return iter(sorted(self.words, key=lambda w: (len(w), w)))

    def __len__(self):
        return len(self.words)

    def __bool__(self):
        return bool(self.words)

    def __eq__(self, other):
        if not isinstance(other, PrefixSet):
            return NotImplemented
        return self.words == other.words

    def __hash__(self):
        return hash(self.words)

    def __repr__(self):
        return f"PrefixSet({sorted(self.words, key=lambda w: (len(w), w))!r})"

    def sorted_words(self) -> list:
        return sorted(self.words, key=lambda w: (len(w), w))

    def max_length(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def proper_prefixes(self) -> frozenset:
        if self._prefixes is None:
            self._prefixes = frozenset(w[:j] for w in self.words for j in range(len(w)))
        return self._prefixes

    def status(self, sigma: str) -> Optional[bool]:
        """True if [sigma] is inside, False if disjoint, None if split.

        Assumes no proper prefix of sigma is a member; callers walking the
        trie carry decided statuses down instead of asking again.
        """
        if sigma in self.words:
            return True
        if sigma in self.proper_prefixes():
            return None
        return False

    def contains_point(self, x: str) -> Optional[bool]:
        """Membership of any point extending ``x``; None if ``x`` is too short."""
        for j in range(len(x) + 1):
            if x[:j] in self.words:
                return True
        if x in self.proper_prefixes():
            return None
        return False

    def member_prefix(self, x: str) -> Optional[str]:
        for j in range(len(x) + 1):
            if x[:j] in self.words:
                return x[:j]
        return None

    def refine(self, level: int) -> list:
        """All level-``level`` words inside the set (every member must be no longer)."""
        out = []
        for w in self.words:
            if len(w) > level:
                raise PreconditionError(f"word {w!r} is longer than level {level}")
            out.extend(w + t for t in all_words(level - len(w)))
        return sorted(out)


def canonicalize(words: Iterable[str]) -> PrefixSet:
    return PrefixSet(words)


def _boolean_walk(op: Callable[[bool, bool], bool], a: PrefixSet, b: PrefixSet) -> PrefixSet:
    out = []
    # a decided status is inherited by every extension
    stack = [(EMPTY, None, None)]
    while stack:
        sigma, sa, sb = stack.pop()
        if sa is None:
            sa = a.status(sigma)
        if sb is None:
            sb = b.status(sigma)
        va = (False, True) if sa is None else (sa,)
        vb = (False, True) if sb is None else (sb,)
        results = {op(x, y) for x in va for y in vb}
        if len(results) == 1:
            if results.pop():
                out.append(sigma)
            continue
        stack.append((sigma + "1", sa, sb))
        stack.append((sigma + "0", sa, sb))
    return PrefixSet(out)


_OPS = {
    "union": lambda x, y: x or y,
    "intersect": lambda x, y: x and y,
    "difference": lambda x, y: x and not y,
}


def combine(mode: str, a: PrefixSet, b: Optional[PrefixSet] = None) -> PrefixSet:
    if mode == "complement":
        if b is not None:
            raise PreconditionError("complement takes a single set")
        return _boolean_walk(lambda x, y: not x, a, PrefixSet())
    if mode not in _OPS:
        raise PreconditionError(f"unknown combine mode {mode!r}")
    if b is None:
        raise PreconditionError(f"{mode} needs two sets")
    return _boolean_walk(_OPS[mode], a, b)


def union_all(sets: Iterable[PrefixSet]) -> PrefixSet:
    words = []
    for s in sets:
        words.extend(s.words)
    return PrefixSet(words)


# -- measures -----------------------------------------------------------------


@dataclass(frozen=True)
class MeasureSpec:
    """A measure on the Cantor space.

    ``bernoulli-half`` is the fair-coin measure.  ``dyadic-table`` fixes the
    masses of the level-``level`` cylinders; mass below that level splits
    evenly between the two children.  ``oracle`` wraps a callable
    ``(word, n) -> Fraction`` promised to be within ``2**-n`` of the measure.
    """

    kind: str = "bernoulli-half"
    level: int = 0
    table: Mapping[str, Fraction] = field(default_factory=dict)
    oracle: Optional[Callable[[str, int], Fraction]] = None

    def __post_init__(self):
        if self.kind == "dyadic-table":
            table = {check_word(w): as_fraction(v) for w, v in dict(self.table).items()}
            for w, v in table.items():
                if len(w) != self.level:
                    raise PreconditionError(f"table word {w!r} is not of level {self.level}")
                if v < 0:
                    raise PreconditionError(f"negative mass {v} at {w!r}")
            total = sum(table.values(), Fraction(0))
            if total != 1:
                raise PreconditionError(f"table masses sum to {total}, not 1")
            object.__setattr__(self, "table", table)
        elif self.kind == "oracle":
            if self.oracle is None:
                raise PreconditionError("oracle measure needs a query function")
        elif self.kind != "bernoulli-half":
            raise PreconditionError(f"unknown measure kind {self.kind!r}")

    @property
    def exact(self) -> bool:
        return self.kind != "oracle"

    @classmethod
    def bernoulli(cls) -> "MeasureSpec":
        return cls("bernoulli-half")

    @classmethod
    def dyadic(cls, table: Mapping[str, Fraction]) -> "MeasureSpec":
        levels = {len(w) for w in table}
        if len(levels) > 1:
            raise PreconditionError("dyadic table words must share one length")
        return cls("dyadic-table", level=levels.pop() if levels else 0, table=dict(table))

    @classmethod
    def uniform_table(cls, level: int) -> "MeasureSpec":
        mass = Fraction(1, 2 ** level)
        return cls.dyadic({w: mass for w in all_words(level)})

    def cylinder(self, sigma: str) -> Fraction:
        if self.kind == "bernoulli-half":
            return Fraction(1, 2 ** len(sigma))
        if self.kind == "dyadic-table":
            L = self.level
            if len(sigma) >= L:
                return self.table.get(sigma[:L], Fraction(0)) / 2 ** (len(sigma) - L)
            return sum((v for w, v in self.table.items() if w.startswith(sigma)), Fraction(0))
        raise UnsupportedExactQuery("oracle measures answer approximate queries only")


def measure_of(s: PrefixSet, m: MeasureSpec = MeasureSpec()) -> Fraction:
    if not m.exact:
        raise UnsupportedExactQuery("oracle measures answer approximate queries only")
    if m.kind == "bernoulli-half":
        # one shared denominator keeps this linear in the number of words
        L = s.max_length()
        return Fraction(sum(1 << (L - len(w)) for w in s.words), 1 << L)
    return sum((m.cylinder(w) for w in s.words), Fraction(0))


def approx_measure_query(s: PrefixSet, m: MeasureSpec, n: int) -> Fraction:
    """A value within ``2**-n`` of the measure of ``s``."""
    if n < 1:
        raise PreconditionError("precision index must be at least 1")
    if m.exact:
        return measure_of(s, m)
    words = s.sorted_words()
    if not words:
        return Fraction(0)
    # split the error budget evenly across the cylinders
    extra = ceil_log2(len(words)) if len(words) > 1 else 0
    return sum((as_fraction(m.oracle(w, n + extra)) for w in words), Fraction(0))


# -- polynomial bounds --------------------------------------------------------


@dataclass(frozen=True)
class PolyBound:
    """Polynomial with nonnegative integer coefficients, lowest degree first."""

    coefficients: Tuple[int, ...] = (0,)

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        if any(c < 0 for c in coeffs):
            raise PreconditionError("polynomial bounds need nonnegative coefficients")
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs or (0,))

    @classmethod
    def of(cls, *coeffs: int) -> "PolyBound":
        return cls(tuple(coeffs))

    @classmethod
    def constant(cls, c: int) -> "PolyBound":
        return cls((c,))

    @classmethod
    def identity(cls) -> "PolyBound":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other: "PolyBound") -> "PolyBound":
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return PolyBound(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)))

    def __mul__(self, other: "PolyBound") -> "PolyBound":
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return PolyBound(tuple(out))

    def compose(self, inner: "PolyBound") -> "PolyBound":
        """The polynomial ``x -> self(inner(x))``."""
        acc = PolyBound.constant(0)
        for c in reversed(self.coefficients):
            acc = acc * inner + PolyBound.constant(c)
        return acc

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            terms.append(str(c) if i == 0 else (f"{c}*x" if i == 1 else f"{c}*x^{i}"))
        return " + ".join(reversed(terms)) or "0"


def q1(m: int) -> int:
    return 2 * (m + 6)


def q2(m: int) -> int:
    return 5 * (m + 6)


def words_of_sets(sets: Sequence[PrefixSet]) -> Tuple[str, ...]:
    return tuple(w for s in sets for w in s.sorted_words())
