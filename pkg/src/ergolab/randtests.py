"""Finite truncations of randomness tests and the constructions built on them.

A :class:`TestFamily` holds stage sets ``S_n^k`` for finitely many ``(n, k)``.
The open set ``U_n`` is identified with its deepest available stage.  With
``saturated=True`` the family declares that its stages have stopped growing,
so a request for ``k`` beyond the deepest stored stage returns that stage;
otherwise such a request raises :class:`TruncationError`.

Modes:

``pspace``  budget ``2**-n``, word lengths at most ``p(n + k)``.
``subexp``  budget ``n**-log2(n)``, word lengths at most ``2**p(log2 n + log2 k)``.
``exp``     budget ``2**-n``, word lengths at most ``2**p(n + k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .core import MeasureSpec, PolyBound, PrefixSet, combine, measure_of, union_all
from .dynamics import SimpleTransformation, birkhoff_average
from .errors import PreconditionError, TooShortError, TruncationError
from .exact import floor_log2, le_pow2, le_pow2_of_log, polylog_budget
from .simplefn import SimpleFunction, indicator, norms, sup_deviation_set

MODES = ("pspace", "subexp", "exp")

Index = Tuple[int, int]


def budget_ok(mode: str, n: int, mu: Fraction) -> bool:
    if mode == "subexp":
        return polylog_budget(n, mu)
    return mu <= Fraction(1, 2 ** n)


def budget_repr(mode: str, n: int) -> str:
    return f"{n}^-log2({n})" if mode == "subexp" else f"2^-{n}"


class TestFamily:
    """Truncated test: stage sets ``S_n^k`` with a controlling polynomial."""

    __test__ = False  # keep pytest from collecting this class

    def __init__(
        self,
        mode: str,
        stages: Mapping[Index, Iterable[str]],
        controlling: Optional[PolyBound] = None,
        saturated: bool = False,
    ):
        if mode not in MODES:
            raise PreconditionError(f"unknown test mode {mode!r}")
        self.mode = mode
        self.controlling = controlling
        self.saturated = saturated
        self.stages: Dict[Index, PrefixSet] = {}
        self.raw: Dict[Index, Tuple[str, ...]] = {}
        for (n, k), words in stages.items():
            if n < 1 or k < 1:
                raise PreconditionError(f"stage indices start at 1, got {(n, k)}")
            ws = tuple(words.sorted_words() if isinstance(words, PrefixSet) else words)
            self.raw[(n, k)] = ws
            self.stages[(n, k)] = PrefixSet(ws)
        self._kmax: Dict[int, int] = {}
        for n, k in self.stages:
            self._kmax[n] = max(self._kmax.get(n, 0), k)

    @classmethod
    def from_rule(
        cls,
        mode: str,
        rule: Callable[[int, int], Iterable[str]],
        n_max: int,
        k_max: int,
        controlling: Optional[PolyBound] = None,
        saturated: bool = False,
    ) -> "TestFamily":
        stages = {(n, k): tuple(rule(n, k)) for n in range(1, n_max + 1) for k in range(1, k_max + 1)}
        return cls(mode, stages, controlling, saturated)

    def indices(self) -> List[int]:
        return sorted(self._kmax)

    def max_k(self, n: int) -> int:
        return self._kmax.get(n, 0)

    def has_stage(self, n: int, k: int) -> bool:
        if (n, k) in self.stages:
            return True
        return self.saturated and n in self._kmax and k > self._kmax[n]

    def stage_words(self, n: int, k: int) -> Tuple[str, ...]:
        if (n, k) in self.raw:
            return self.raw[(n, k)]
        if self.saturated and n in self._kmax and k > self._kmax[n]:
            return self.raw[(n, self._kmax[n])]
        raise TruncationError([(n, k)])

    def stage(self, n: int, k: int) -> PrefixSet:
        if (n, k) in self.stages:
            return self.stages[(n, k)]
        if self.saturated and n in self._kmax and k > self._kmax[n]:
            return self.stages[(n, self._kmax[n])]
        raise TruncationError([(n, k)])

    def require(self, needed: Iterable[Index]):
        missing = sorted({ix for ix in needed if not self.has_stage(*ix)})
        if missing:
            raise TruncationError(missing)

    def truncated(self, n: int) -> PrefixSet:
        """``U_n`` at truncation: the deepest stored stage, or empty."""
        if n not in self._kmax:
            return PrefixSet()
        return self.stages[(n, self._kmax[n])]

    def budget_ok(self, n: int, mu: Fraction) -> bool:
        return budget_ok(self.mode, n, mu)


# -- validation ---------------------------------------------------------------


@dataclass
class BoundCertificate:
    index: Index
    claimed: str
    observed: int
    passed: bool


def length_certificate(mode: str, p: PolyBound, n: int, k: int, observed: int) -> BoundCertificate:
    if mode == "pspace":
        bound = p(n + k)
        return BoundCertificate((n, k), f"p({n}+{k}) = {bound}", observed, observed <= bound)
    if mode == "exp":
        e = p(n + k)
        return BoundCertificate((n, k), f"2^p({n}+{k}) = 2^{e}", observed, le_pow2(observed, e))
    ok = le_pow2_of_log(observed, n * k, lambda lam: p(lam))
    return BoundCertificate((n, k), f"2^p(log2 {n} + log2 {k})", observed, ok)


@dataclass
class ValidationReport:
    passed: bool
    monotone_failures: List[Index]
    budgets: List[Dict[str, object]]
    certificates: List[BoundCertificate]
    uncertified: bool = False


def validate_family(F: TestFamily, m: MeasureSpec = MeasureSpec()) -> ValidationReport:
    monotone_failures = []
    for n in F.indices():
        ks = sorted(k for (nn, k) in F.stages if nn == n)
        for a, b in zip(ks, ks[1:]):
            if combine("difference", F.stages[(n, a)], F.stages[(n, b)]):
                monotone_failures.append((n, a))
    budgets = []
    for n in F.indices():
        mu = measure_of(F.truncated(n), m)
        budgets.append({"n": n, "k": F.max_k(n), "measure": mu, "budget": budget_repr(F.mode, n), "pass": F.budget_ok(n, mu)})
    certs = []
    if F.controlling is not None:
        for (n, k) in sorted(F.stages):
            longest = max((len(w) for w in F.raw[(n, k)]), default=0)
            certs.append(length_certificate(F.mode, F.controlling, n, k, longest))
    passed = not monotone_failures and all(b["pass"] for b in budgets) and all(c.passed for c in certs)
    return ValidationReport(passed, monotone_failures, budgets, certs, uncertified=F.controlling is None)


# -- Solovay tests to standard tests -----------------------------------------


def solovay_r(mode: str, p: PolyBound, n: int, k: int) -> int:
    if mode == "subexp":
        return max(2 * ((2 * (2 * k * k + 1) + 1) ** 2 + 1), p(n) + 1)
    return max(p(n) + 1, p(k + 1))


def solovay_plan(mode: str, p: PolyBound, n: int, k: int) -> Tuple[range, int]:
    """Source indices ``i`` and the common stage index for ``T_n^k``."""
    r = solovay_r(mode, p, n, k)
    if mode == "subexp":
        stage = (r - p(n)) * 2 * (2 * k * k + 1)
    else:
        stage = r - p(n) + k + 1
    return range(p(n) + 1, r + 1), stage


@dataclass
class SolovayConversion:
    family: TestFamily
    tail_checks: List[Dict[str, object]]
    stage_checks: List[Dict[str, object]]

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.tail_checks) and all(c["pass"] for c in self.stage_checks)


def solovay_tail_checks(F: TestFamily, p: PolyBound, m: MeasureSpec = MeasureSpec()) -> List[Dict[str, object]]:
    """``sum_{n > p(j)} mu(U_n) <= budget(j)`` over the truncation, for each checkable ``j``."""
    idx = F.indices()
    if not idx:
        return []
    top = idx[-1]
    mus = {n: measure_of(F.truncated(n), m) for n in idx}
    out = []
    for j in range(0 if F.mode != "subexp" else 1, top + 1):
        if p(j) >= top:
            break
        tail = sum((mus[n] for n in idx if n > p(j)), Fraction(0))
        out.append({"m": j, "tail": tail, "budget": budget_repr(F.mode, j), "pass": budget_ok(F.mode, j, tail)})
    return out


def solovay_to_standard(
    F: TestFamily, p: PolyBound, n_max: int, k_max: int, m: MeasureSpec = MeasureSpec()
) -> SolovayConversion:
    """Turn a Solovay test into a standard test on ``1..n_max`` by ``1..k_max``.

    ``T_n^k`` is the union of ``S_i^j`` over ``p(n) < i <= r(n, k)`` with a
    single stage index ``j`` fixed by ``(n, k)``.
    """
    plans = {}
    needed = []
    for n in range(1, n_max + 1):
        for k in range(1, k_max + 1):
            src, j = solovay_plan(F.mode, p, n, k)
            plans[(n, k)] = (src, j)
            needed.extend((i, j) for i in src)
    F.require(needed)
    stages = {}
    for (n, k), (src, j) in plans.items():
        words = []
        for i in src:
            words.extend(F.stage_words(i, j))
        stages[(n, k)] = tuple(words)
    controlling = None
    if F.mode == "pspace" and F.controlling is not None:
        # i + j <= 2 r + k + 1 <= 2 p(n+k) + (n+k) + 3
        controlling = F.controlling.compose(p + p + PolyBound.of(3, 1))
    out = TestFamily(F.mode, stages, controlling)
    checks = []
    for (n, k) in sorted(stages):
        mu = measure_of(out.stages[(n, k)], m)
        checks.append({"n": n, "k": k, "measure": mu, "budget": budget_repr(F.mode, n), "pass": out.budget_ok(n, mu)})
    return SolovayConversion(out, solovay_tail_checks(F, p, m), checks)


# -- flattening ---------------------------------------------------------------


def aggregate_plan(mode: str, n: int) -> Tuple[int, int]:
    """(number of source indices, common stage index) for the aggregate ``T_n``."""
    if mode == "subexp":
        width = 2 * (4 * n * n + 1)
        return width, width * 2 * n
    return n + 1, 2 * n + 2


def _is_antichain(words: Iterable[str]) -> bool:
    ws = sorted(set(words))
    return not any(ws[i + 1].startswith(ws[i]) for i in range(len(ws) - 1))


@dataclass
class FlattenedFamily:
    mode: str
    hats: Dict[int, PrefixSet]
    raw_hats: Dict[int, Tuple[str, ...]] = field(default_factory=dict)
    measures: Dict[int, Fraction] = field(default_factory=dict)
    bound_ok: Dict[int, bool] = field(default_factory=dict)
    antichain: Dict[int, bool] = field(default_factory=dict)
    length_exponent: Optional[int] = None

    @classmethod
    def from_hats(cls, mode: str, hats: Mapping[int, Iterable[str]], m: MeasureSpec = MeasureSpec()) -> "FlattenedFamily":
        raw = {n: tuple(ws.sorted_words() if isinstance(ws, PrefixSet) else ws) for n, ws in hats.items()}
        return _finish_flattened(mode, raw, m)

    def indices(self) -> List[int]:
        return sorted(self.hats)

    def hat(self, n: int) -> PrefixSet:
        if n not in self.hats:
            raise TruncationError([n], what="flattened")
        return self.hats[n]

    @property
    def passed(self) -> bool:
        return all(self.bound_ok.values()) and all(self.antichain.values())


def _length_exponent(mode: str, raw: Mapping[int, Tuple[str, ...]]) -> Optional[int]:
    """Least integer ``c >= 1`` with every hat word within ``n**c`` (or ``2**(log2 n)**c``).

    Only indices where the bound can grow are used: ``n >= 2`` for the power
    form and ``n >= 3`` for the quasi-polynomial form.
    """
    pairs = [(n, max((len(w) for w in ws), default=0)) for n, ws in raw.items()]
    if mode == "subexp":
        pairs = [(n, L) for n, L in pairs if n >= 3 and L > 0]
    else:
        pairs = [(n, L) for n, L in pairs if n >= 2 and L > 0]
    if not pairs:
        return None
    c = 1
    while True:
        if mode == "subexp":
            ok = all(le_pow2_of_log(L, n, lambda lam, c=c: lam ** c) for n, L in pairs)
        else:
            ok = all(L <= n ** c for n, L in pairs)
        if ok:
            return c
        c += 1


def _finish_flattened(mode: str, raw: Mapping[int, Tuple[str, ...]], m: MeasureSpec) -> FlattenedFamily:
    hats, measures, bound, anti = {}, {}, {}, {}
    for n, ws in raw.items():
        hats[n] = PrefixSet(ws)
        measures[n] = measure_of(hats[n], m)
        if mode == "subexp":
            bound[n] = polylog_budget(n, measures[n])
        else:
            bound[n] = measures[n] <= Fraction(1, 2 ** n)
        anti[n] = _is_antichain(ws)
    return FlattenedFamily(mode, hats, dict(raw), measures, bound, anti, _length_exponent(mode, raw))


def flatten_needs(mode: str, n_max: int) -> List[Index]:
    needed = []
    for n in range(1, n_max + 2):
        width, j = aggregate_plan(mode, n)
        needed.extend((i, j) for i in range(1, width + 1))
    return needed


def flatten(F: TestFamily, n_max: int, m: MeasureSpec = MeasureSpec()) -> FlattenedFamily:
    """``S^_n = {s in T_{n+1} : no prefix of s (s included) lies in T_n}`` for ``n <= n_max``."""
    F.require(flatten_needs(F.mode, n_max))
    aggregates: Dict[int, frozenset] = {}
    for n in range(1, n_max + 2):
        width, j = aggregate_plan(F.mode, n)
        ws = set()
        for i in range(1, width + 1):
            ws.update(F.stage_words(i, j))
        aggregates[n] = frozenset(ws)
    raw = {}
    for n in range(1, n_max + 1):
        lower = aggregates[n]
        raw[n] = tuple(
            sorted(
                (s for s in aggregates[n + 1] if not any(s[:j] in lower for j in range(len(s) + 1))),
                key=lambda w: (len(w), w),
            )
        )
    return _finish_flattened(F.mode, raw, m)


def max_flatten_index(F: TestFamily, limit: int = 64) -> int:
    """Largest ``n_max`` (up to ``limit``) for which :func:`flatten` has its inputs."""
    best = 0
    for n in range(1, limit + 1):
        if all(F.has_stage(*ix) for ix in flatten_needs(F.mode, n)):
            best = n
        else:
            break
    return best


# -- coverage diagnostics ------------------------------------------------------


@dataclass
class ProbeReport:
    probe: str
    memberships: List[int]
    non_memberships: List[int]
    inconclusive: List[int]
    captures: List[Tuple[int, str]]
    flagged: bool


def coverage_diagnostic(F: TestFamily, H: FlattenedFamily, probes: Sequence[str]) -> List[ProbeReport]:
    """Which truncated ``U_n`` contain each probe, and which ``S^_m`` capture it.

    A probe is flagged when it lies in every truncated ``U_n`` yet no hat in
    the upper half of the available hat indices captures it: within the
    truncation it looks like a point the flattened sets lose.
    """
    out = []
    hat_idx = H.indices()
    upper = [mm for mm in hat_idx if hat_idx and mm > hat_idx[-1] / 2]
    for x in probes:
        mem, non, inc = [], [], []
        for n in F.indices():
            st = F.truncated(n).contains_point(x)
            (inc if st is None else mem if st else non).append(n)
        caps = []
        for mm in hat_idx:
            ws = set(H.raw_hats.get(mm, H.hats[mm].words))
            hit = next((x[:j] for j in range(len(x) + 1) if x[:j] in ws), None)
            if hit is not None:
                caps.append((mm, hit))
        in_all = bool(F.indices()) and not non and not inc
        flagged = in_all and not any(mm in upper for mm, _ in caps)
        out.append(ProbeReport(x, mem, non, inc, caps, flagged))
    return out


# -- converse construction ------------------------------------------------------


def counterexample_group(mode: str, n: int) -> range:
    if mode == "subexp":
        return range(2 * (2 * (n * n) ** 2 + 1), 2 * (2 * ((n + 1) ** 2) ** 2 + 1) + 1)
    return range(2 * n + 1, 2 * (n + 1) + 1 + 1)


@dataclass
class CounterexampleReport:
    functions: Dict[int, SimpleFunction]
    l1: Dict[int, Fraction]
    bound_ok: Dict[int, bool]

    @property
    def passed(self) -> bool:
        return all(self.bound_ok.values())


def counterexample_functions(H: FlattenedFamily, n_max: int, m: MeasureSpec = MeasureSpec()) -> CounterexampleReport:
    """``f_n = n * chi(U_n)`` with ``U_n`` the union of a block of hats."""
    needed = [i for n in range(1, n_max + 1) for i in counterexample_group(H.mode, n) if i not in H.hats]
    if needed:
        raise TruncationError(sorted(set(needed)), what="flattened")
    fs, l1s, ok = {}, {}, {}
    for n in range(1, n_max + 1):
        U = union_all(H.hats[i] for i in counterexample_group(H.mode, n))
        f = indicator(U).scale(n)
        fs[n] = f
        l1s[n] = norms(f, m)["l1"]
        ok[n] = polylog_budget(n, l1s[n]) if H.mode == "subexp" else l1s[n] <= Fraction(1, 2 ** n)
    return CounterexampleReport(fs, l1s, ok)


@dataclass
class DivergenceWitness:
    point_prefix: str
    capture_indices: List[Tuple[int, str]]
    values: List[Tuple[int, Fraction]]
    averages: List[Tuple[int, Optional[Fraction], Optional[bool]]]
    inconclusive: List[int]

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.averages if ok is not None)


def divergence_witness(
    fs: Mapping[int, SimpleFunction], t: SimpleTransformation, x_prefix: str, n: int
) -> DivergenceWitness:
    """At indices with ``f_i(x) = i``, check ``A_n f_i (x) >= i / n``.

    ``fs`` maps the index ``i`` to ``f_i``; a list is read as ``f_1, f_2, ...``.
    """
    if not isinstance(fs, Mapping):
        fs = {i + 1: f for i, f in enumerate(fs)}
    caps, vals, avgs, inc = [], [], [], []
    for i in sorted(fs):
        f = fs[i]
        try:
            v = f.evaluate(x_prefix)
        except TooShortError:
            inc.append(i)
            continue
        if v != i:
            continue
        cell = next((x_prefix[:j] for j in range(len(x_prefix) + 1) if x_prefix[:j] in f.cells), "")
        caps.append((i, cell))
        vals.append((i, v))
        g = birkhoff_average(f, t, n)
        try:
            gv = g.evaluate(x_prefix)
            avgs.append((i, gv, gv >= Fraction(i, n)))
        except TooShortError:
            avgs.append((i, None, None))
            inc.append(i)
    return DivergenceWitness(x_prefix, caps, vals, avgs, inc)


# -- deviation sets from an approximating sequence ------------------------------------


@dataclass
class MachineryReport:
    Uni: Dict[Index, PrefixSet]
    Vm: Dict[int, PrefixSet]
    uni_measures: Dict[Index, Fraction]
    uni_ok: Dict[Index, bool]
    vm_measures: Dict[int, Fraction]
    vm_ok: Dict[int, bool]
    tail_checks: List[Dict[str, object]]
    solovay_pass: bool


def machinery_budget_p(k: int) -> int:
    return 3 * (k + 1)


def ergodic_machinery(
    f_seq: Sequence[SimpleFunction],
    t: SimpleTransformation,
    p: PolyBound,
    horizon: int,
    m: MeasureSpec = MeasureSpec(),
) -> MachineryReport:
    """Deviation sets ``U_{n,i}`` and their diagonal unions ``V_m``.

    ``f_seq[j]`` is ``f_j``.  For ``n >= 1``, ``i >= 0`` and ``n + i <= N``,
    ``U_{n,i}`` collects the points where some ``A_n f_j`` with
    ``p(n+i) <= j <= p(n+i+1)`` sits at least ``2**-(n+i+1)`` away from
    ``A_n f_{p(n+i)}``.
    """
    if horizon < 1:
        raise PreconditionError("horizon must be at least 1")
    need = p(horizon + 1)
    if need >= len(f_seq):
        raise TruncationError(range(len(f_seq), need + 1), what="sequence")
    cache: Dict[Index, SimpleFunction] = {}

    def avg(n, j):
        if (n, j) not in cache:
            cache[(n, j)] = birkhoff_average(f_seq[j], t, n)
        return cache[(n, j)]

    Uni, uni_mu, uni_ok = {}, {}, {}
    for s in range(1, horizon + 1):
        for n in range(1, s + 1):
            i = s - n
            lo, hi = p(n + i), p(n + i + 1)
            thr = Fraction(1, 2 ** (n + i + 1))
            U = sup_deviation_set([avg(n, j) for j in range(lo, hi + 1)], avg(n, lo), thr)
            Uni[(n, i)] = U
            uni_mu[(n, i)] = measure_of(U, m)
            uni_ok[(n, i)] = uni_mu[(n, i)] <= thr
    Vm, vm_mu, vm_ok = {}, {}, {}
    for s in range(1, horizon + 1):
        V = union_all(Uni[(n, s - n)] for n in range(1, s + 1))
        Vm[s] = V
        vm_mu[s] = measure_of(V, m)
        vm_ok[s] = vm_mu[s] <= Fraction(s, 2 ** s)
    tails = []
    k = 0
    while machinery_budget_p(k) < horizon:
        lo = machinery_budget_p(k)
        tail = sum((vm_mu[s] for s in range(lo + 1, horizon + 1)), Fraction(0))
        # the sum of s / 2**s over s > M equals (M + 2) / 2**M
        majorant = Fraction(lo + 2, 2 ** lo)
        tails.append(
            {"k": k, "tail": tail, "majorant": majorant, "budget": Fraction(1, 2 ** k),
             "pass": tail <= Fraction(1, 2 ** k) and majorant <= Fraction(1, 2 ** k)}
        )
        k += 1
    passed = all(vm_ok.values()) and all(c["pass"] for c in tails)
    return MachineryReport(Uni, Vm, uni_mu, uni_ok, vm_mu, vm_ok, tails, passed)


# -- tail sums ---------------------------------------------------------------------


@dataclass
class TailReport:
    kind: str
    params: Dict[str, int]
    partial: Fraction
    majorant: Fraction
    bound: str
    passed: bool
    notes: List[str] = field(default_factory=list)


def tail_bound_check(kind: str, m: int, k: int = 1, horizon: Optional[int] = None) -> TailReport:
    """Exact partial sums plus an analytic tail majorant against the stated bound.

    ``power``: ``sum_{n > m} n**-(k+1) <= m**-k``.  Terms up to ``H`` are summed
    exactly; the rest is bounded by the telescoping estimate ``H**-k``.

    ``polylog``: ``sum_{n >= 2(2m^2+1)} n * n**-log2(n) <= m**-log2(m)``.  For
    ``n >= 2**(e+1)`` with ``e = floor(log2(m^2)) + 1`` every term is at most
    ``n**-e``; those rational majorants are summed exactly up to ``H`` and the
    rest is bounded by ``H**-(e-1)``.
    """
    if m < 1 or k < 1:
        raise PreconditionError("tail checks need m >= 1 and k >= 1")
    if kind == "power":
        H = 100 if horizon is None else horizon
        if H <= m:
            raise PreconditionError("horizon must exceed m")
        partial = sum((Fraction(1, n ** (k + 1)) for n in range(m + 1, H + 1)), Fraction(0))
        majorant = Fraction(1, H ** k)
        bound = Fraction(1, m ** k)
        return TailReport(kind, {"m": m, "k": k, "H": H}, partial, majorant, f"1/{m}^{k}", partial + majorant <= bound)
    if kind == "polylog":
        n0 = 2 * (2 * m * m + 1)
        e = floor_log2(m * m) + 1
        H = n0 + 200 if horizon is None else horizon
        notes = []
        start_ok = n0 >= 2 ** (e + 1)
        if not start_ok:
            notes.append(f"start {n0} is below 2^{e + 1}; termwise majorant not valid")
        if e < 2:
            raise PreconditionError("polylog tail needs m >= 2")
        if H < n0:
            raise PreconditionError("horizon must reach the start index")
        partial = sum((Fraction(1, n ** e) for n in range(n0, H + 1)), Fraction(0))
        majorant = Fraction(1, H ** (e - 1))
        ok = start_ok and polylog_budget(m, partial + majorant)
        return TailReport(kind, {"m": m, "e": e, "start": n0, "H": H}, partial, majorant, f"{m}^-log2({m})", ok, notes)
    raise PreconditionError(f"unknown tail kind {kind!r}")
