from fractions import Fraction as F
from itertools import product

import pytest

from ergolab.core import PolyBound
from ergolab.errors import PreconditionError
from ergolab.rates import (
    brute_force_l2_deviation,
    curve_majorant,
    exact_l2_deviation_shift,
    l1_threshold,
    overlap_profile,
    pillai_decompose,
    pillai_identity_check,
    rate_threshold,
    verify_rate_bound,
)


def enumerate_deviation(sigma, n):
    """Independent oracle: average of (A_n chi_sigma - 2**-k)**2 over all words."""
    k = len(sigma)
    N = n + k - 1
    total = F(0)
    for bits in product("01", repeat=N):
        x = "".join(bits)
        count = sum(1 for i in range(n) if x[i:i + k] == sigma)
        total += (F(count, n) - F(1, 2**k)) ** 2
    return total / 2**N


@pytest.mark.parametrize("sigma,overlaps", [("00", {1}), ("01", set()), ("0101", {2}), ("000", {1, 2})])
def test_overlap_examples(sigma, overlaps):
    assert overlap_profile(sigma).overlaps == frozenset(overlaps)


def test_overlap_empty_word():
    with pytest.raises(PreconditionError):
        overlap_profile("")


def test_closed_form_examples():
    assert exact_l2_deviation_shift("0", 4) == F(1, 16)
    assert exact_l2_deviation_shift("00", 2) == F(1, 8)
    for n in range(1, 13):
        assert exact_l2_deviation_shift("00", n) == (F(3 * n, 16) + F(n - 1, 8)) / n**2


@pytest.mark.parametrize("sigma", ["1", "01", "11", "010", "0110"])
@pytest.mark.parametrize("n", [1, 2, 5, 7])
def test_closed_form_matches_pure_python_oracle(sigma, n):
    assert exact_l2_deviation_shift(sigma, n) == enumerate_deviation(sigma, n)


@pytest.mark.parametrize("use_numba", [True, False])
def test_brute_force_paths_agree(use_numba):
    assert brute_force_l2_deviation("011", 9, use_numba=use_numba) == exact_l2_deviation_shift("011", 9)


def test_rate_examples():
    (r,) = verify_rate_bound(0, ["0" * 12])
    assert r.passed and r.bound_sq == 1
    (r,) = verify_rate_bound(1, ["0" * 14])
    assert r.n_star == 14**3 * 2**35 and r.passed
    (r,) = verify_rate_bound(3, ["01" * 9])
    assert r.n_star == 18**3 * 2**45 and r.passed


def test_rate_precondition():
    with pytest.raises(PreconditionError, match="2\\(m\\+6\\)"):
        verify_rate_bound(2, ["0" * 10])


def test_deviation_decays_along_powers_of_two():
    prev = None
    for e in range(0, 61, 5):
        n = 2**e
        v = exact_l2_deviation_shift("0110", n)
        assert v * n <= 3 * F(1, 16)
        assert v <= curve_majorant(4, n)
        if prev is not None:
            assert v < prev
        prev = v


def test_pillai_example_01_8():
    d = pillai_decompose("01", 8)
    assert d.index_sets == {1: {0, 2, 4, 6, 8}, 2: {1, 5, 9}, 3: {3, 11}}
    assert d.remainder_positions == {7}
    assert d.overshoot_positions == {8, 9, 11}
    assert d.disjoint
    assert pillai_identity_check("01", 8).identity_holds


def test_pillai_example_01_2():
    d = pillai_decompose("01", 2)
    assert d.index_sets[1] == {0, 2}
    assert d.remainder_positions == {1}


def test_pillai_single_letter():
    d = pillai_decompose("0", 10)
    assert set(d.index_sets) == {1}
    rep = pillai_identity_check("0", 10)
    assert rep.identity_holds and rep.max_correction == 0


def test_pillai_00_6():
    rep = pillai_identity_check("00", 6)
    assert rep.identity_holds
    # the exact maximum; see the decisions ledger for the printed 5/6
    assert rep.max_correction <= rep.correction_bound


def test_threshold_examples():
    ident = PolyBound.identity()
    assert l1_threshold(ident, ident, 1, 0) == 18**3 * 2**315
    assert l1_threshold(ident, ident, 1, 1) == 20**3 * 2**(5 * (20 + 20 + 20 + 4 + 6))
    p, t = PolyBound.of(0, 2), PolyBound.of(0, 0, 1)
    vals = [l1_threshold(p, t, 2, m) for m in range(3)]
    assert vals == sorted(vals) and len(set(vals)) == 3


def test_rate_threshold():
    assert rate_threshold(12, 0) == 12**3 * 2**30
