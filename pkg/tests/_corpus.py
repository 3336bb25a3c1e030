"""Shared inputs for the property and acceptance tests."""

from fractions import Fraction

from ergolab.prng import DEFAULT_SEED, Lcg64, seeded_words
from ergolab.randtests import TestFamily
from ergolab.simplefn import SimpleFunction

F = Fraction


def _chi(word, level=None):
    return SimpleFunction.chi(word, len(word) if level is None else level)


def function_corpus():
    """Twenty simple functions on the fair-coin space, levels 0 to 3."""
    fs = [
        SimpleFunction.constant(1),
        SimpleFunction.constant(F(-3, 2)),
        _chi("0"),
        _chi("1"),
        _chi("00"),
        _chi("01"),
        _chi("0") - _chi("1"),
        _chi("00").scale(2) + _chi("01"),
        _chi("010").scale(F(5, 3)),
        _chi("11").scale(-1) + _chi("0").scale(F(1, 2)),
        SimpleFunction.from_increments(3, [("", 1), ("1", -2), ("101", 4)]),
        SimpleFunction.from_increments(2, [("0", F(7, 4)), ("10", F(-1, 3))]),
        SimpleFunction.from_table(3, {w: F(int(w, 2), 7) for w in ("000", "001", "010", "011", "100", "101", "110", "111")}),
        SimpleFunction.from_table(2, {"00": 1, "01": -1, "10": -1, "11": 1}),
    ]
    rng = Lcg64(DEFAULT_SEED)
    while len(fs) < 20:
        level = 1 + (rng.next_state() >> 33) % 3
        terms = []
        for _ in range(3):
            L = (rng.next_state() >> 33) % (level + 1)
            w = "".join(rng.bit() for _ in range(L))
            terms.append((w, F(int((rng.next_state() >> 33) % 9) - 4, 1 + int((rng.next_state() >> 33) % 4))))
        fs.append(SimpleFunction.from_increments(level, terms))
    return fs


def cocycle_corpus():
    """Twenty (f, k, n) triples with k, n <= 6."""
    fs = function_corpus()
    out = []
    for j in range(20):
        k = 1 + j % 6
        n = 1 + (j * 5 + 2) % 6
        out.append((fs[j], k, n))
    return out


def synthesized_families(n_top=10, k_top=20):
    """Five families whose truncated measures meet the 2**-n budget exactly."""
    rand = seeded_words(DEFAULT_SEED, n_top, n_top)

    def zeros_then_one(i, k):
        return ["0" * (i - 1) + "1"]

    def one_then_zeros(i, k):
        return ["1" + "0" * (i - 1)]

    def growing(i, k):
        return ["1" * j + "0" * (i + j) + "1" for j in range(min(k, 4))]

    def random_words(i, k):
        return [rand[i - 1][:i]]

    def two_tails(i, k):
        return ["0" * (i + 1), "1" * (i + 1)]

    rules = [zeros_then_one, one_then_zeros, growing, random_words, two_tails]
    return {r.__name__: TestFamily.from_rule("pspace", r, n_top, k_top) for r in rules}


def machinery_sequence(top=30):
    """``f_j = chi_0 + chi_{0^j}``; converges in L1 at rate ``2**-j``."""
    return [(_chi("0") + _chi("0" * j)) for j in range(top + 1)]
