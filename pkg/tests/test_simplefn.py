from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergolab.core import MeasureSpec, PrefixSet
from ergolab.errors import TooShortError, UnsupportedExactQuery
from ergolab.simplefn import SimpleFunction, indicator, linear_combine, norms, sup_deviation_set

chi = SimpleFunction.chi
f_example = chi("00").scale(2) + chi("01")


@pytest.mark.parametrize(
    "words,level,table",
    [
        (["0"], 1, {"0": 1, "1": 0}),
        ([""], 0, {"": 1}),
        (["01", "1"], 2, {"00": 0, "01": 1, "10": 1, "11": 1}),
    ],
)
def test_indicator_examples(words, level, table):
    f = indicator(PrefixSet(words))
    assert f.level == level
    assert f.full_table() == {w: F(v) for w, v in table.items()}


def test_evaluate_examples():
    assert f_example.evaluate("0010") == 2
    assert f_example.evaluate("10") == 0
    with pytest.raises(TooShortError):
        f_example.evaluate("0")


def test_linear_combine_examples():
    assert linear_combine([(1, chi("0")), (-1, chi("0"))]) == SimpleFunction.zero()
    g = linear_combine([(2, chi("00")), (1, chi("01"))])
    assert g.level == 2 and g.full_table() == {"00": 2, "01": 1, "10": 0, "11": 0}
    assert linear_combine([(F(1, 2), SimpleFunction.constant(1))]) == SimpleFunction.constant(F(1, 2))


@pytest.mark.parametrize(
    "f,integral,l1,l2sq",
    [
        (f_example, F(3, 4), F(3, 4), F(5, 4)),
        (chi(""), 1, 1, 1),
        (chi("0") - chi("1"), 0, 1, 1),
    ],
)
def test_norm_examples(f, integral, l1, l2sq):
    assert norms(f) == {"integral": integral, "l1": l1, "l2sq": l2sq}


def test_norms_reject_oracle():
    with pytest.raises(UnsupportedExactQuery):
        norms(chi("0"), MeasureSpec("oracle", oracle=lambda w, n: 0))


def test_sup_deviation_examples():
    zero = SimpleFunction.zero()
    assert sup_deviation_set([chi("0")], zero, F(1, 2)) == PrefixSet(["0"])
    assert sup_deviation_set([f_example], f_example, F(1, 1000)) == PrefixSet()
    assert sup_deviation_set([chi("0"), chi("1")], chi("0"), 1) == PrefixSet([""])
    assert sup_deviation_set([], zero, 1) == PrefixSet()


def test_sparse_cells_stay_small():
    f = chi("0" * 200)
    assert f.level == 200
    assert len(f.cells) <= 2 * 200 + 1
    assert norms(f)["l1"] == F(1, 2**200)


def test_increments_shorter_than_level():
    f = SimpleFunction.from_increments(3, [("", 1), ("1", 2)])
    assert f.evaluate("000") == 1 and f.evaluate("111") == 3


levels = st.integers(min_value=0, max_value=3)
values = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def functions(draw):
    level = draw(levels)
    table = {"".join(w): draw(values) for w in product("01", repeat=level)}
    return SimpleFunction.from_table(level, table)


def brute(f, level=4):
    return {"".join(w): f.evaluate("".join(w)) for w in product("01", repeat=level)}


@given(functions(), functions())
def test_algebra_matches_pointwise(f, g):
    bf, bg = brute(f), brute(g)
    assert brute(f + g) == {w: bf[w] + bg[w] for w in bf}
    assert brute(f * g) == {w: bf[w] * bg[w] for w in bf}
    assert brute(f - g) == {w: bf[w] - bg[w] for w in bf}


@given(functions(), functions())
def test_norm_inequalities(f, g):
    nf, ng, nfg = norms(f), norms(g), norms(f + g)
    assert abs(nf["integral"]) <= nf["l1"]
    assert nfg["l1"] <= nf["l1"] + ng["l1"]
    # Cauchy-Schwarz against the constant 1
    assert nf["l1"] ** 2 <= nf["l2sq"]
    assert norms(f * g)["l1"] ** 2 <= nf["l2sq"] * ng["l2sq"]


@given(functions(), st.integers(min_value=0, max_value=3))
def test_refinement_is_invisible(f, extra):
    assert f.at_level(f.level + extra) == f
    assert norms(f.at_level(f.level + extra)) == norms(f)
