"""Acceptance criteria, one test each.

Each test records a single PASS/FAIL line; the lines are printed at the end
of the pytest run and also when this file is executed as a script.
"""

import time
from fractions import Fraction as F

from _corpus import cocycle_corpus, function_corpus, machinery_sequence, synthesized_families

from ergolab.core import PolyBound, all_words
from ergolab.dynamics import SimpleTransformation, cocycle_decompose, maximal_inequality_check
from ergolab.exact import QuadRational, iroot
from ergolab.martingales import (
    check_fairness,
    doubling_on_zeros,
    kolmogorov_check,
    martingale_from_test,
    martingale_to_test,
    separation_construct,
    separation_martingale,
    success_check,
)
from ergolab.prng import DEFAULT_SEED, seeded_words
from ergolab.randtests import coverage_diagnostic, ergodic_machinery, flatten, tail_bound_check
from ergolab.rates import (
    brute_force_l2_deviation,
    exact_l2_deviation_shift,
    pillai_decompose,
    pillai_identity_check,
    verify_rate_bound,
)

RESULTS = {}
SHIFT = SimpleTransformation.shift()


def record(n, title, ok, detail):
    RESULTS[n] = f"CRITERION {n:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    return ok


def test_c01_variance_oracle_equivalence():
    t0 = time.perf_counter()
    cases, mismatches = 0, []
    for k in range(1, 5):
        for sigma in all_words(k):
            for n in range(1, 13):
                cases += 1
                if exact_l2_deviation_shift(sigma, n) != brute_force_l2_deviation(sigma, n):
                    mismatches.append((sigma, n))
    dt = time.perf_counter() - t0
    ok = not mismatches and dt < 60
    record(1, "variance closed form equals enumeration", ok, f"{cases} cases, {len(mismatches)} mismatches, {dt:.1f}s")
    assert ok, mismatches[:5]


def test_c02_rate_bound_reproduction():
    t0 = time.perf_counter()
    reports = [r for m in range(1, 7) for r in verify_rate_bound(m, seed=DEFAULT_SEED)]
    dt = time.perf_counter() - t0
    failed = [(r.m, r.sigma) for r in reports if not r.passed]
    ok = len(reports) == 30 and not failed and dt < 10
    record(2, "rate bound at n* = k^3 2^(5(m+6))", ok, f"{len(reports)} cases, {len(failed)} failures, {dt:.2f}s")
    assert ok, failed


def test_c03_cocycle_identity():
    failures = []
    for f, k, n in cocycle_corpus():
        rep = cocycle_decompose(f, SHIFT, k, n)
        if not (rep.identity_holds and rep.u_l1 <= rep.u_l1_bound):
            failures.append((f, k, n))
    ok = not failures
    record(3, "cocycle identity and u bound", ok, f"20 triples, {len(failures)} failures")
    assert ok, failures


def test_c04_maximal_inequality():
    t0 = time.perf_counter()
    failures, cases = [], 0
    for f in function_corpus():
        for delta in (F(1, 4), F(1, 2), F(1), F(2)):
            cases += 1
            rep = maximal_inequality_check(f, SHIFT, 8, delta)
            if not rep["pass"]:
                failures.append((f, delta, rep["lhs"], rep["rhs"]))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 120
    record(4, "truncated maximal inequality, N = 8", ok, f"{cases} cases, {len(failures)} failures, {dt:.1f}s")
    assert ok, failures[:3]


def test_c05_block_decomposition():
    t0 = time.perf_counter()
    identity_fail, slack_fail, cases = [], [], 0
    for k in range(1, 5):
        for sigma in all_words(k):
            for n in range(k, 17):
                cases += 1
                d = pillai_decompose(sigma, n)
                rep = pillai_identity_check(sigma, n)
                if not (d.disjoint and rep.identity_holds):
                    identity_fail.append((sigma, n))
                if d.slack() > d.slack_bound():
                    slack_fail.append((sigma, n, d.slack(), d.slack_bound()))
    dt = time.perf_counter() - t0
    ok = not identity_fail and not slack_fail and dt < 600
    only_k1 = all(len(s) == 1 for s, *_ in slack_fail)
    detail = (
        f"{cases} cases, identity failures {len(identity_fail)}, slack-bound failures {len(slack_fail)}"
        + (" (all with |sigma| = 1: overshoot position n against a zero bound)" if slack_fail and only_k1 else "")
        + f", {dt:.1f}s"
    )
    record(5, "block decomposition accounting", ok, detail)
    assert ok, slack_fail[:4]


def test_c06_flattening_bounds():
    bad, diagnostics = [], []
    for name, fam in synthesized_families().items():
        H = flatten(fam, 8)
        for n in range(1, 9):
            if not (H.bound_ok[n] and H.antichain[n] and H.measures[n] <= F(1, 2**n)):
                bad.append((name, n))
        probes = [seeded_words(DEFAULT_SEED + 1, 24, 1)[0], "0" * 24, "1" + "0" * 23]
        for r in coverage_diagnostic(fam, H, probes):
            diagnostics.append(f"{name}:{r.probe[:6]}..{'flagged' if r.flagged else 'ok'}")
    ok = not bad
    flagged = sum(1 for d in diagnostics if d.endswith("flagged"))
    record(6, "flattened sets: measure and antichain, n <= 8", ok,
           f"5 families, {len(bad)} failures; coverage probes {len(diagnostics)}, flagged {flagged} (reported only)")
    assert ok, bad


def test_c07_martingale_suite():
    problems = []
    fams = synthesized_families()
    hats = flatten(fams["zeros_then_one"], 8)
    growing = flatten(fams["growing"], 8)
    tables = {
        "from_test_k1": martingale_from_test(hats, 1, 12),
        "from_test_k2": martingale_from_test(growing, 2, 12),
        "doubling": doubling_on_zeros(12),
        "separation": separation_martingale(12),
    }
    for name, D in tables.items():
        if not check_fairness(D).passed:
            problems.append(f"fairness {name}")
    # success at every captured length of the antichain example
    U = ["0" * j + "1" for j in range(1, 6)]
    D = martingale_from_test(U, 1, 8)
    for a in U:
        if len(a) not in success_check(D, a, 1):
            problems.append(f"success {a}")
        if D[a] < QuadRational.pow2_half(2 * (iroot(len(a), 1) // 2)):
            problems.append(f"lower bound {a}")
    tables["antichain"] = D
    kol = 0
    for name, T in tables.items():
        if T.root_value == 0:
            continue
        for c in (2, 4, 8):
            kol += 1
            if not kolmogorov_check(T, c, min(T.depth, 12)).passed:
                problems.append(f"kolmogorov {name} c={c}")
    for name in ("doubling", "separation", "antichain"):
        for k in (1, 2):
            rep = martingale_to_test(tables[name], k, 6)
            if not all(mu <= F(1, 2**i) for i, mu in rep.measures.items()):
                problems.append(f"to-test {name} k={k}")
    ok = not problems
    record(7, "martingale fairness, success, Kolmogorov, to-test", ok, f"{len(tables)} tables, {kol} Kolmogorov checks, {len(problems)} failures")
    assert ok, problems


def test_c08_separation_bundle():
    t0 = time.perf_counter()
    source = seeded_words(DEFAULT_SEED, 16, 1)[0]
    b = separation_construct(source, depth=16)
    powers = all(b.power_values[j] == 2**j for j in range(5))
    measures = all(b.test_measures[n] == F(1, 2**n) for n in range(1, 5))
    dt = time.perf_counter() - t0
    ok = b.fairness.passed and powers and measures and all(b.y_in_tests.values())
    record(8, "separation bundle at depth 16", ok,
           f"fairness {b.fairness.passed} over {b.fairness.checked} nodes, D(y|2^j)=2^j {powers}, mu(U_n)=2^-n {measures}, {dt:.1f}s")
    assert ok


def test_c09_tail_sums():
    failures, cases = [], 0
    for k in (1, 2, 3):
        for m in range(2, 11):
            cases += 1
            if not tail_bound_check("power", m, k).passed:
                failures.append(("power", k, m))
    for m in range(2, 7):
        cases += 1
        if not tail_bound_check("polylog", m).passed:
            failures.append(("polylog", m))
    ok = not failures
    record(9, "tail sum bounds", ok, f"{cases} cases, {len(failures)} failures")
    assert ok, failures


def test_c10_machinery_budget():
    seq = machinery_sequence(30)
    rep = ergodic_machinery(seq, SHIFT, PolyBound.of(3, 3), 8)
    uni_bad = [ix for ix, mu in rep.uni_measures.items() if mu > F(1, 2 ** (ix[0] + ix[1] + 1))]
    vm_bad = [m for m, mu in rep.vm_measures.items() if mu > F(m, 2**m)]
    nonempty = sum(1 for U in rep.Uni.values() if U)
    ok = not uni_bad and not vm_bad and len(rep.vm_measures) == 8
    record(10, "deviation sets within budget, m <= 8", ok,
           f"{len(rep.uni_measures)} sets ({nonempty} nonempty), U failures {len(uni_bad)}, V failures {len(vm_bad)}")
    assert ok, (uni_bad, vm_bad)


if __name__ == "__main__":
    import sys

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_c")]
    status = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            status = 1
    for n in sorted(RESULTS):
        print(RESULTS[n])
    sys.exit(status)
