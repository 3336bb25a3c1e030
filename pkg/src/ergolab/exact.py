"""Exact number helpers: the quadratic ring Q(sqrt 2) and log-free comparisons.

Nothing here touches floating point.  Comparisons against quantities such as
``2 ** (log2(n) ** 2)`` are decided by bracketing ``log2(n)`` between rationals
``p/q`` using the integer test ``2**p < n**q`` and then comparing integer
powers.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Callable, Iterator, Tuple, Union

RationalLike = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def iroot(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    r = 1 << ((n.bit_length() + k - 1) // k)
    # Newton iteration from above
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def floor_log2(x: RationalLike) -> int:
    """Exact floor(log2 x) for a positive rational."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("floor_log2 of non-positive value")
    a, b = x.numerator, x.denominator
    e = a.bit_length() - b.bit_length()
    # now 2**(e-1) < a/b < 2**(e+1)
    if e >= 0:
        if a < (b << e):
            e -= 1
    else:
        if (a << -e) < b:
            e -= 1
    return e


def ceil_log2(x: RationalLike) -> int:
    x = as_fraction(x)
    f = floor_log2(x)
    return f if Fraction(2) ** f == x else f + 1


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


class QuadRational:
    """Exact element ``a + b*sqrt(2)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0):
        self.a = as_fraction(a)
        self.b = as_fraction(b)

    @classmethod
    def coerce(cls, x) -> "QuadRational":
        if isinstance(x, QuadRational):
            return x
        return cls(as_fraction(x), 0)

    @classmethod
    def pow2_half(cls, twice_exponent: int) -> "QuadRational":
        """``2 ** (twice_exponent / 2)`` exactly."""
        e = twice_exponent
        if e % 2 == 0:
            return cls(Fraction(2) ** (e // 2), 0)
        return cls(0, Fraction(2) ** ((e - 1) // 2))

    def __repr__(self) -> str:
        return f"QuadRational({self.a}, {self.b})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt2"

    def __add__(self, other):
        try:
            o = QuadRational.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadRational(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadRational(-self.a, -self.b)

    def __sub__(self, other):
        try:
            o = QuadRational.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadRational(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QuadRational.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadRational(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadRational":
        return QuadRational(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def __truediv__(self, other):
        try:
            o = QuadRational.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        num = self * o.conjugate()
        return QuadRational(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        return QuadRational.coerce(other) / self

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: |a| vs |b| sqrt 2 decided on squares
        d = a * a - 2 * b * b
        if d == 0:  # impossible for rationals unless both zero
            return 0
        return sa if d > 0 else sb

    def __eq__(self, other):
        try:
            o = QuadRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def _cmp(self, other) -> int:
        return (self - QuadRational.coerce(other)).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * 2 ** 0.5


# -- log-free comparisons ----------------------------------------------------


def le_pow2(x: RationalLike, r: RationalLike) -> bool:
    """Decide ``x <= 2**r`` exactly for rational ``x`` and rational ``r``."""
    x = as_fraction(x)
    r = as_fraction(r)
    if x <= 0:
        return True
    a, b = x.numerator, x.denominator
    u, v = r.numerator, r.denominator
    # x <= 2**(u/v)  <=>  a**v <= 2**u * b**v
    if u >= 0:
        return a ** v <= (b ** v) << u
    return a ** v << (-u) <= b ** v


def log2_brackets(n: RationalLike) -> Iterator[Tuple[Fraction, Fraction]]:
    """Yield shrinking rational brackets ``lo <= log2(n) <= hi``.

    For a power of two the first bracket is degenerate (``lo == hi``).
    Refinement is a Stern-Brocot descent driven by ``2**p`` versus ``n**q``.
    """
    n = as_fraction(n)
    if n <= 0:
        raise ValueError("log2 of non-positive value")
    e = floor_log2(n)
    if Fraction(2) ** e == n:
        while True:
            yield Fraction(e), Fraction(e)
    # log2(n) in (e, e+1): work with the fractional part via mediants
    lo_p, lo_q, hi_p, hi_q = e, 1, e + 1, 1
    a, b = n.numerator, n.denominator
    while True:
        yield Fraction(lo_p, lo_q), Fraction(hi_p, hi_q)
        mp, mq = lo_p + hi_p, lo_q + hi_q
        # compare 2**(mp/mq) with n: 2**mp vs n**mq
        lhs = b ** mq << mp if mp >= 0 else b ** mq
        rhs = a ** mq if mp >= 0 else a ** mq << (-mp)
        if lhs == rhs:
            lo_p, lo_q, hi_p, hi_q = mp, mq, mp, mq
            while True:
                yield Fraction(mp, mq), Fraction(mp, mq)
        if lhs < rhs:
            lo_p, lo_q = mp, mq
        else:
            hi_p, hi_q = mp, mq


class UndecidedComparison(ArithmeticError):
    """Raised when bracket refinement fails to separate two quantities."""


def le_pow2_of_log(
    x: RationalLike,
    n: RationalLike,
    exponent: Callable[[Fraction], Fraction],
    max_steps: int = 4000,
) -> bool:
    """Decide ``x <= 2 ** exponent(log2 n)`` for a monotone ``exponent``.

    ``exponent`` must be monotone (either direction) on the brackets and map
    rationals to rationals.  Used for budgets like ``n ** -log2(n)`` and
    length bounds like ``2 ** p(log2 n)``.
    """
    x = as_fraction(x)
    if x <= 0:
        return True
    for step, (lo, hi) in enumerate(log2_brackets(n)):
        e1, e2 = exponent(lo), exponent(hi)
        emin, emax = min(e1, e2), max(e1, e2)
        if lo == hi:
            return le_pow2(x, emin)
        if le_pow2(x, emin):
            return True
        if not le_pow2(x, emax):
            return False
        if step >= max_steps:
            raise UndecidedComparison(f"could not separate {x} from 2**f(log2 {n})")
    raise AssertionError("unreachable")


def polylog_budget(n: int, mu: RationalLike) -> bool:
    """Exact test of ``mu <= n ** -log2(n)`` (that is ``2 ** -(log2 n)**2``)."""
    if n < 1:
        raise ValueError("polylog budget needs n >= 1")
    return le_pow2_of_log(mu, n, lambda lam: -lam * lam)
