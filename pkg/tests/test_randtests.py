from fractions import Fraction as F

import pytest

from ergolab.core import PolyBound, PrefixSet
from ergolab.dynamics import SimpleTransformation
from ergolab.errors import PreconditionError, TruncationError
from ergolab.randtests import (
    FlattenedFamily,
    TestFamily,
    counterexample_functions,
    counterexample_group,
    coverage_diagnostic,
    divergence_witness,
    ergodic_machinery,
    flatten,
    max_flatten_index,
    solovay_plan,
    solovay_r,
    solovay_tail_checks,
    solovay_to_standard,
    tail_bound_check,
    validate_family,
)
from ergolab.simplefn import SimpleFunction, norms

chi = SimpleFunction.chi
S = SimpleTransformation.shift()
ident = PolyBound.identity()


def zeros_one(n_top=12, k_top=30, mode="pspace", p=None):
    return TestFamily.from_rule(mode, lambda i, k: ["0" * (i - 1) + "1"], n_top, k_top, p)


def one_zeros(n_top=12, k_top=30):
    return TestFamily.from_rule("pspace", lambda i, k: ["1" + "0" * (i - 1)], n_top, k_top)


def test_validate_examples():
    assert validate_family(zeros_one(4, 3, p=ident)).passed
    over = TestFamily("pspace", {(1, 1): ["1"], (2, 1): ["00", "010"]})
    rep = validate_family(over)
    bad = [b for b in rep.budgets if not b["pass"]]
    assert [b["n"] for b in bad] == [2] and bad[0]["measure"] == F(3, 8)
    long_word = TestFamily("pspace", {(1, 1): ["1"], (1, 2): ["1", "0" * 9]}, PolyBound.of(2, 1))
    rep = validate_family(long_word)
    failed = [c for c in rep.certificates if not c.passed]
    assert [(c.index, c.observed) for c in failed] == [((1, 2), 9)]


def test_validate_monotone_failure():
    F_ = TestFamily("pspace", {(1, 1): ["1"], (1, 2): ["01"]})
    assert validate_family(F_).monotone_failures == [(1, 1)]


def test_solovay_examples():
    assert solovay_r("pspace", ident, 1, 1) == 2
    src, j = solovay_plan("pspace", ident, 1, 1)
    # r - p(n) + k + 1 = 2 - 1 + 1 + 1
    assert list(src) == [2] and j == 3
    conv = solovay_to_standard(zeros_one(), ident, 1, 1)
    assert conv.family.raw[(1, 1)] == ("01",)
    checks = {c["m"]: c for c in solovay_tail_checks(zeros_one(), ident)}
    assert checks[1]["tail"] == sum(F(1, 2**i) for i in range(2, 13)) and checks[1]["pass"]
    # 2((2(2+1)+1)**2 + 1)
    assert solovay_r("subexp", ident, 1, 1) == 100


def test_solovay_truncation_error_lists_indices():
    with pytest.raises(TruncationError) as exc:
        solovay_to_standard(zeros_one(3, 3), ident, 3, 3)
    assert exc.value.missing


def test_flatten_examples():
    H = flatten(zeros_one(), 5)
    assert all(H.raw_hats[n] == ("0" * (n + 1) + "1",) for n in H.indices())
    assert all(H.measures[n] == F(1, 2 ** (n + 2)) for n in H.indices())
    assert H.passed
    H2 = flatten(one_zeros(), 5)
    assert all(not H2.hats[n] for n in H2.indices())
    empty = TestFamily("pspace", {}, saturated=True)
    with pytest.raises(TruncationError):
        flatten(empty, 2)
    H3 = flatten(TestFamily("pspace", {(i, 1): [] for i in range(1, 8)}, saturated=True), 4)
    assert all(not H3.hats[n] for n in H3.indices())


def test_max_flatten_index():
    # flatten up to n reads U_1 .. U_{n+2}
    assert max_flatten_index(zeros_one(12, 30)) == 10


def test_coverage_examples():
    F1 = zeros_one(14, 30)
    H1 = flatten(F1, max_flatten_index(F1))
    (r,) = coverage_diagnostic(F1, H1, ["0" * 12 + "1" + "0" * 5])
    assert r.memberships == [13]
    # the hat holding 0^12 1 is index 11
    assert [m for m, _ in r.captures] == [11]
    F2 = one_zeros()
    H2 = flatten(F2, max_flatten_index(F2))
    (r,) = coverage_diagnostic(F2, H2, ["1" + "0" * 12])
    assert r.memberships == F2.indices() and r.captures == [] and r.flagged
    E = TestFamily("pspace", {})
    (r,) = coverage_diagnostic(E, FlattenedFamily.from_hats("pspace", {}), ["0101"])
    assert r.memberships == [] and r.captures == [] and not r.flagged


def test_coverage_inconclusive_probe():
    F1 = zeros_one()
    H1 = flatten(F1, 4)
    (r,) = coverage_diagnostic(F1, H1, ["000"])
    assert r.inconclusive


def test_counterexample_examples():
    H = FlattenedFamily.from_hats("pspace", {i: ["0" * (i + 1) + "1"] for i in range(1, 12)})
    rep = counterexample_functions(H, 2)
    assert list(counterexample_group("pspace", 1)) == [3, 4, 5]
    assert rep.l1[1] == F(1, 2**5) + F(1, 2**6) + F(1, 2**7)
    assert rep.passed
    Z = FlattenedFamily.from_hats("pspace", {i: [] for i in range(1, 12)})
    assert all(f == SimpleFunction.zero() for f in counterexample_functions(Z, 2).functions.values())
    assert list(counterexample_group("subexp", 1)) == list(range(6, 67))


def test_counterexample_truncation():
    H = FlattenedFamily.from_hats("pspace", {i: [] for i in range(1, 4)})
    with pytest.raises(TruncationError):
        counterexample_functions(H, 2)


def test_divergence_examples():
    f2 = chi("0" * 6 + "1").scale(2)
    w = divergence_witness({2: f2}, S, "0" * 6 + "1" + "0" * 5, 1)
    assert w.averages == [(2, F(2), True)]
    assert divergence_witness({1: SimpleFunction.zero()}, S, "0101", 1).capture_indices == []
    f3 = chi("0" * 8 + "1").scale(3)
    w = divergence_witness({3: f3}, S, "0" * 8 + "1" + "0" * 4, 2)
    (i, value, ok), = w.averages
    assert value >= F(3, 2) and ok


def test_machinery_examples():
    const = [chi("0")] * 10
    rep = ergodic_machinery(const, S, ident, 2)
    assert all(not U for U in rep.Uni.values()) and rep.solovay_pass
    alt = [chi("0") if j % 2 == 0 else chi("1") for j in range(10)]
    rep = ergodic_machinery(alt, S, ident, 2)
    assert rep.Uni[(1, 0)] == PrefixSet([""])
    assert rep.vm_measures[1] == 1 and not rep.solovay_pass
    fast = [chi("0") + chi("1").scale(F(1, 2**j)) for j in range(40)]
    rep = ergodic_machinery(fast, S, PolyBound.of(3, 3), 3)
    assert all(not U for U in rep.Uni.values())


def test_machinery_truncation():
    with pytest.raises(TruncationError):
        ergodic_machinery([chi("0")] * 3, S, ident, 4)


def test_tail_examples():
    r = tail_bound_check("power", 4, 1, horizon=100)
    assert r.passed and r.majorant == F(1, 100)
    assert tail_bound_check("power", 3, 2).passed
    r = tail_bound_check("polylog", 2)
    assert r.passed and r.params["start"] == 18
    with pytest.raises(PreconditionError):
        tail_bound_check("power", 0)


def test_budget_helpers_and_modes():
    with pytest.raises(PreconditionError):
        TestFamily("nope", {})
    F_ = zeros_one(3, 3)
    with pytest.raises(TruncationError):
        F_.stage(1, 4)
    assert TestFamily("pspace", {(1, 1): ["1"]}, saturated=True).stage(1, 9) == PrefixSet(["1"])
    assert norms(counterexample_functions(
        FlattenedFamily.from_hats("pspace", {i: ["1" * (i + 1)] for i in range(1, 8)}), 1).functions[1])["l1"] <= F(1, 2)
