"""Command-line front end.

Every command produces a JSON report with the echoed parameters, a list of
named checks (exact values as num/den strings plus a display float), a
summary and a command-specific result.  Exit status: 0 when every check
passes, 1 when some check fails, 2 on bad input, missing stages or a size
guard breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from . import core, dynamics, martingales, randtests, rates
from . import serialize as ser
from .core import PolyBound, PrefixSet
from .errors import ErgolabError, SizeGuardError
from .prng import DEFAULT_SEED

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

DEFAULT_MAX_LEVEL = 256
DEFAULT_MAX_DEPTH = 16


class Context:
    def __init__(self, params: Dict[str, Any], data: Any, seed: int, max_level: int, max_depth: int, csv_path: Optional[str]):
        self.params = params
        self.data = data
        self.seed = seed
        self.max_level = max_level
        self.max_depth = max_depth
        self.csv_path = csv_path
        self.checks: List[Dict[str, Any]] = []

    def get(self, name: str, default=None, required: bool = False):
        if name in self.params and self.params[name] is not None:
            return self.params[name]
        if isinstance(self.data, dict) and name in self.data:
            return self.data[name]
        if required:
            raise ser.InputError(f"missing parameter {name!r}")
        return default

    def need_data(self) -> Any:
        if self.data is None:
            raise ser.InputError("this command needs input (--in FILE or manifest 'input')")
        return self.data

    def level_guard(self, level: int, what: str = "function level"):
        if level > self.max_level:
            raise SizeGuardError("max-level", level, self.max_level)

    def depth_guard(self, depth: int):
        if depth > self.max_depth:
            raise SizeGuardError("max-depth", depth, self.max_depth)

    def check(self, name: str, passed: bool, **values):
        self.checks.append({"name": name, "pass": bool(passed), "values": {k: ser.enc_number(v) for k, v in values.items()}})


def _fn(ctx: Context, obj) -> Any:
    ser.validate(obj, "function")
    f = ser.dec_function(obj)
    ctx.level_guard(f.level)
    return f


def _tr(obj):
    ser.validate(obj, "transformation")
    return ser.dec_transformation(obj)


def _ps(obj) -> PrefixSet:
    ser.validate(obj, "prefixset")
    return ser.dec_prefixset(obj)


def _family(obj):
    ser.validate(obj, "family")
    return ser.dec_family(obj)


def _table(ctx: Context, obj):
    ser.validate(obj, "martingale")
    D = ser.dec_martingale(obj)
    ctx.depth_guard(D.depth)
    return D


def _poly(value) -> PolyBound:
    if isinstance(value, str):
        value = [int(v) for v in value.split(",") if v.strip()]
    return PolyBound(tuple(value))


def _measure(ctx: Context):
    obj = ctx.get("measure")
    if obj is not None:
        ser.validate(obj, "measure")
    return ser.dec_measure(obj)


# -- core ----------------------------------------------------------------------


def cmd_core_canonicalize(ctx):
    return {"set": ser.enc_prefixset(_ps(ctx.get("words") if ctx.get("words") is not None else ctx.need_data()))}


def cmd_core_combine(ctx):
    mode = ctx.get("mode", required=True)
    a = _ps(ctx.get("a", required=True))
    b = ctx.get("b")
    out = core.combine(mode, a, None if b is None else _ps(b))
    return {"set": ser.enc_prefixset(out)}


def cmd_core_measure(ctx):
    s = _ps(ctx.get("set", required=True))
    m = _measure(ctx)
    n = ctx.get("n")
    value = core.measure_of(s, m) if n is None else core.approx_measure_query(s, m, int(n))
    return {"measure": ser.enc_number(value)}


# -- fn ----------------------------------------------------------------------------


def cmd_fn_evaluate(ctx):
    f = _fn(ctx, ctx.get("function", required=True))
    return {"value": ser.enc_number(f.evaluate(ctx.get("word", required=True)))}


def cmd_fn_norms(ctx):
    f = _fn(ctx, ctx.get("function", required=True))
    from .simplefn import norms

    return {k: ser.enc_number(v) for k, v in norms(f, _measure(ctx)).items()}


def cmd_fn_deviation(ctx):
    from .simplefn import sup_deviation_set

    family = [_fn(ctx, o) for o in ctx.get("family", required=True)]
    g = _fn(ctx, ctx.get("g", required=True))
    s = sup_deviation_set(family, g, ser.dec_rational(ctx.get("t", required=True)), bool(ctx.get("strict", False)))
    return {"set": ser.enc_prefixset(s), "measure": ser.enc_number(core.measure_of(s))}


# -- dyn -------------------------------------------------------------------------------


def cmd_dyn_preimage(ctx):
    t = _tr(ctx.get("transformation", required=True))
    s = _ps(ctx.get("set", required=True))
    n = int(ctx.get("n", 1))
    ctx.level_guard(s.max_length() + t.c * n)
    return {"set": ser.enc_prefixset(dynamics.preimage(t, s, n))}


def cmd_dyn_pullback(ctx):
    f = _fn(ctx, ctx.get("function", required=True))
    t = _tr(ctx.get("transformation", required=True))
    i = int(ctx.get("i", 1))
    ctx.level_guard(f.level + t.c * i)
    return {"function": ser.enc_function(dynamics.pullback(f, t, i))}


def cmd_dyn_birkhoff(ctx):
    f = _fn(ctx, ctx.get("function", required=True))
    t = _tr(ctx.get("transformation", required=True))
    n = int(ctx.get("n", required=True))
    ctx.level_guard(f.level + t.c * (n - 1))
    return {"function": ser.enc_function(dynamics.birkhoff_average(f, t, n))}


def cmd_dyn_measure_preserving(ctx):
    t = _tr(ctx.get("transformation", required=True))
    level = int(ctx.get("level", required=True))
    rep = dynamics.check_measure_preserving(t, _measure(ctx), level)
    out = {"checked": rep.checked, "level": rep.level, "violation": None}
    if rep.violation:
        v = rep.violation
        out["violation"] = {"sigma": v["sigma"], "preimage_measure": ser.enc_number(v["preimage_measure"]), "measure": ser.enc_number(v["measure"])}
        ctx.check(f"measure-preserving[{v['sigma']}]", False, preimage=v["preimage_measure"], cylinder=v["measure"])
    else:
        ctx.check("measure-preserving", True)
    return out


def cmd_dyn_cocycle(ctx):
    f = _fn(ctx, ctx.get("function", required=True))
    t = _tr(ctx.get("transformation", required=True))
    k, n = int(ctx.get("k", required=True)), int(ctx.get("n", required=True))
    ctx.level_guard(f.level + t.c * (k + n))
    rep = dynamics.cocycle_decompose(f, t, k, n)
    ctx.check("cocycle-identity", rep.identity_holds)
    ctx.check("u-l1-bound", rep.u_l1 <= rep.u_l1_bound, u_l1=rep.u_l1, bound=rep.u_l1_bound)
    return {"g": ser.enc_function(rep.g), "u": ser.enc_function(rep.u)}


def cmd_dyn_maximal(ctx):
    f = _fn(ctx, ctx.get("function", required=True))
    t = _tr(ctx.get("transformation", required=True))
    horizon = int(ctx.get("horizon", required=True))
    ctx.level_guard(f.level + t.c * (horizon - 1))
    rep = dynamics.maximal_inequality_check(f, t, horizon, ser.dec_rational(ctx.get("delta", required=True)))
    ctx.check("maximal-inequality", rep["pass"], lhs=rep["lhs"], rhs=rep["rhs"])
    return {}


def cmd_dyn_correlation(ctx):
    f = _fn(ctx, ctx.get("function", required=True))
    t = _tr(ctx.get("transformation", required=True))
    n = int(ctx.get("n", required=True))
    ctx.level_guard(f.level + t.c * n)
    rep = dynamics.correlation_average(f, t, n)
    a, b = rep["cs_bound"]
    ctx.check("cauchy-schwarz", rep["pass"], corr=rep["corr"], centred_l2sq=a, f_l2sq=b)
    return {}


# -- rates ------------------------------------------------------------------------------


def _write_csv(path: str, rows: List[List[str]]):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sigma", "n", "l2sq_num", "l2sq_den", "bound", "pass"])
    w.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def cmd_rates_verify(ctx):
    m = int(ctx.get("m", required=True))
    sigmas = ctx.get("sigma")
    if isinstance(sigmas, str):
        sigmas = [sigmas]
    reports = rates.verify_rate_bound(m, sigmas or None, ctx.seed)
    rows = []
    for r in reports:
        ctx.check(f"rate[m={r.m},sigma={r.sigma}]", r.passed, l2sq=r.l2sq_deviation, bound=r.bound_sq)
        rows.append([r.sigma, str(r.n_star), str(r.l2sq_deviation.numerator), str(r.l2sq_deviation.denominator),
                     _frac_str(r.bound_sq), "true" if r.passed else "false"])
    if ctx.csv_path:
        _write_csv(ctx.csv_path, rows)
    return {"reports": [{"sigma": r.sigma, "k": r.k, "n_star": str(r.n_star), "l2sq": ser.enc_number(r.l2sq_deviation)} for r in reports]}


def cmd_rates_curve(ctx):
    sigma = ctx.get("sigma", required=True)
    ns = ctx.get("n_list", required=True)
    if isinstance(ns, str):
        ns = [int(v) for v in ns.split(",") if v.strip()]
    rows, points = [], []
    k = len(sigma)
    for n in ns:
        n = int(n)
        v = rates.exact_l2_deviation_shift(sigma, n)
        bound = rates.curve_majorant(k, n)
        ok = v <= bound
        ctx.check(f"curve[n={n}]", ok, l2sq=v, bound=bound)
        rows.append([sigma, str(n), str(v.numerator), str(v.denominator), _frac_str(bound), "true" if ok else "false"])
        points.append({"n": str(n), "l2sq": ser.enc_number(v)})
    if ctx.csv_path:
        _write_csv(ctx.csv_path, rows)
    return {"points": points}


def cmd_rates_pillai(ctx):
    sigma = ctx.get("sigma", required=True)
    n = int(ctx.get("n", required=True))
    dec = rates.pillai_decompose(sigma, n)
    out = {
        "index_sets": {str(p): sorted(s) for p, s in dec.index_sets.items()},
        "remainder": sorted(dec.remainder_positions),
        "overshoot": sorted(dec.overshoot_positions),
    }
    ctx.check("disjoint", dec.disjoint)
    if len(sigma) >= 2:
        ctx.check("slack-bound", dec.slack() <= dec.slack_bound(), slack=dec.slack(), bound=dec.slack_bound())
    if n + len(sigma) - 1 <= rates.BRUTE_FORCE_MAX_BITS:
        rep = rates.pillai_identity_check(sigma, n)
        ctx.check("accounting-identity", rep.identity_holds, words=rep.words_checked)
        ctx.check("correction-bound", rep.within_bound, max_correction=rep.max_correction, bound=rep.correction_bound)
    return out


def cmd_rates_threshold(ctx):
    p = _poly(ctx.get("p", required=True))
    t = _poly(ctx.get("t", required=True))
    value = rates.l1_threshold(p, t, int(ctx.get("c", required=True)), int(ctx.get("m", required=True)))
    return {"threshold": str(value), "float": ser.display_float(value)}


# -- tests ------------------------------------------------------------------------------------


def _add_validation_checks(ctx, rep):
    for n, a in rep.monotone_failures:
        ctx.check(f"monotone[n={n},k={a}]", False)
    for b in rep.budgets:
        ctx.check(f"budget[n={b['n']}]", b["pass"], measure=b["measure"])
    for c in rep.certificates:
        if not c.passed:
            ctx.check(f"length[n={c.index[0]},k={c.index[1]}]", False, observed=c.observed)
    if rep.certificates and all(c.passed for c in rep.certificates):
        ctx.check("length-certificates", True)


def cmd_tests_validate(ctx):
    F = _family(ctx.need_data())
    rep = randtests.validate_family(F)
    _add_validation_checks(ctx, rep)
    return {"certificates": [{"n": c.index[0], "k": c.index[1], "claimed": c.claimed, "observed": c.observed, "pass": c.passed} for c in rep.certificates],
            "uncertified": rep.uncertified}


def cmd_tests_solovay(ctx):
    F = _family(ctx.get("family") or ctx.need_data())
    p = _poly(ctx.get("solovay_p", required=True))
    conv = randtests.solovay_to_standard(F, p, int(ctx.get("n_max", 1)), int(ctx.get("k_max", 1)))
    for c in conv.tail_checks:
        ctx.check(f"solovay-tail[m={c['m']}]", c["pass"], tail=c["tail"])
    for c in conv.stage_checks:
        ctx.check(f"stage[n={c['n']},k={c['k']}]", c["pass"], measure=c["measure"])
    return {"family": ser.enc_family(conv.family)}


def _flatten(ctx, F):
    n_max = ctx.get("n_max")
    n_max = randtests.max_flatten_index(F) if n_max is None else int(n_max)
    if n_max < 1:
        raise ser.InputError("the family is too short to flatten even one index")
    return randtests.flatten(F, n_max)


def cmd_tests_flatten(ctx):
    H = _flatten(ctx, _family(ctx.get("family") or ctx.need_data()))
    for n in H.indices():
        ctx.check(f"hat-measure[n={n}]", H.bound_ok[n], measure=H.measures[n])
        ctx.check(f"hat-antichain[n={n}]", H.antichain[n])
    return {"flattened": ser.enc_flattened(H)}


def cmd_tests_coverage(ctx):
    F = _family(ctx.get("family", required=True))
    H = _flatten(ctx, F)
    reports = randtests.coverage_diagnostic(F, H, list(ctx.get("probes", required=True)))
    return {"probes": [
        {"probe": r.probe, "memberships": r.memberships, "non_memberships": r.non_memberships,
         "inconclusive": r.inconclusive, "captures": [[m, w] for m, w in r.captures], "flagged": r.flagged}
        for r in reports]}


def cmd_tests_counterexample(ctx):
    data = ctx.get("flattened") or ctx.need_data()
    if "hats" in data:
        ser.validate(data, "flattened")
        H = ser.dec_flattened(data)
    else:
        H = _flatten(ctx, _family(data))
    n_max = int(ctx.get("cx_n_max", 1))
    rep = randtests.counterexample_functions(H, n_max)
    for n, f in rep.functions.items():
        ctx.level_guard(f.level)
        ctx.check(f"l1[n={n}]", rep.bound_ok[n], l1=rep.l1[n])
    return {"functions": {str(n): ser.enc_function(f) for n, f in rep.functions.items()}}


def cmd_tests_machinery(ctx):
    seq = [_fn(ctx, o) for o in ctx.get("sequence", required=True)]
    t = _tr(ctx.get("transformation", {"c": 1, "builtin": "shift"}))
    p = _poly(ctx.get("p", [3, 3]))
    horizon = int(ctx.get("horizon", required=True))
    rep = randtests.ergodic_machinery(seq, t, p, horizon)
    for (n, i), mu in sorted(rep.uni_measures.items()):
        ctx.check(f"U[n={n},i={i}]", rep.uni_ok[(n, i)], measure=mu)
    for s, mu in sorted(rep.vm_measures.items()):
        ctx.check(f"V[m={s}]", rep.vm_ok[s], measure=mu)
    for c in rep.tail_checks:
        ctx.check(f"tail[k={c['k']}]", c["pass"], tail=c["tail"], majorant=c["majorant"])
    return {"V": {str(s): ser.enc_prefixset(v) for s, v in sorted(rep.Vm.items())}}


def cmd_tests_tail(ctx):
    kind = ctx.get("kind", required=True)
    h = ctx.get("horizon")
    rep = randtests.tail_bound_check(kind, int(ctx.get("m", required=True)), int(ctx.get("k", 1)), None if h is None else int(h))
    ctx.check(f"tail[{kind}]", rep.passed, partial=rep.partial, majorant=rep.majorant)
    return {"params": rep.params, "bound": rep.bound, "notes": rep.notes}


# -- mart -----------------------------------------------------------------------------------------


def cmd_mart_build(ctx):
    data = ctx.need_data()
    k, depth = int(ctx.get("k", required=True)), int(ctx.get("depth", required=True))
    ctx.depth_guard(depth)
    if isinstance(data, dict) and "hats" in data:
        ser.validate(data, "flattened")
        source = ser.dec_flattened(data)
    else:
        source = ser.raw_words(data)
    D = martingales.martingale_from_test(source, k, depth)
    rep = martingales.check_fairness(D)
    ctx.check("fairness", rep.passed)
    return {"martingale": ser.enc_martingale(D)}


def cmd_mart_fairness(ctx):
    D = _table(ctx, ctx.get("table") or ctx.need_data())
    rep = martingales.check_fairness(D)
    ctx.check("fairness", rep.passed)
    return {"violations": rep.violations, "negatives": rep.negatives, "checked": rep.checked}


def cmd_mart_success(ctx):
    D = _table(ctx, ctx.get("table", required=True))
    ns = martingales.success_check(D, ctx.get("prefix", required=True), int(ctx.get("k", required=True)))
    return {"passing_lengths": ns}


def cmd_mart_kolmogorov(ctx):
    D = _table(ctx, ctx.get("table") or ctx.need_data())
    rep = martingales.kolmogorov_check(D, ser.dec_rational(ctx.get("c", required=True)), int(ctx.get("level", D.depth)))
    ctx.check("kolmogorov", rep.passed, hit_measure=rep.hit_measure, bound=rep.bound)
    return {"hits": rep.hits}


def cmd_mart_to_test(ctx):
    D = _table(ctx, ctx.get("table") or ctx.need_data())
    i_max = ctx.get("i_max")
    rep = martingales.martingale_to_test(D, int(ctx.get("k", required=True)), None if i_max is None else int(i_max))
    for i, mu in rep.measures.items():
        ctx.check(f"U[i={i}]", mu <= Fraction(1, 2 ** i) and mu <= rep.kolmogorov[i], measure=mu, first_hit=rep.kolmogorov[i])
    return {"family": ser.enc_family(rep.family)}


def cmd_mart_separation(ctx):
    source = ctx.get("source", required=True)
    depth = ctx.get("depth")
    depth = len(source) if depth is None else int(depth)
    ctx.depth_guard(depth)
    b = martingales.separation_construct(source, depth)
    ctx.check("fairness", b.fairness.passed)
    for j, v in b.power_values.items():
        ctx.check(f"D(y|2^{j})", v == 2 ** j, value=v)
    for n, mu in b.test_measures.items():
        ctx.check(f"exp-test-measure[n={n}]", mu == Fraction(1, 2 ** n), measure=mu)
    for n, inside in b.y_in_tests.items():
        ctx.check(f"y-in-U[n={n}]", inside)
    return {"y": b.y.prefix, "exp_test": ser.enc_family(b.exp_test)}


COMMANDS: Dict[str, Callable[[Context], Dict[str, Any]]] = {
    "core.canonicalize": cmd_core_canonicalize,
    "core.combine": cmd_core_combine,
    "core.measure": cmd_core_measure,
    "fn.evaluate": cmd_fn_evaluate,
    "fn.norms": cmd_fn_norms,
    "fn.deviation": cmd_fn_deviation,
    "dyn.preimage": cmd_dyn_preimage,
    "dyn.pullback": cmd_dyn_pullback,
    "dyn.birkhoff": cmd_dyn_birkhoff,
    "dyn.measure-preserving": cmd_dyn_measure_preserving,
    "dyn.cocycle": cmd_dyn_cocycle,
    "dyn.maximal": cmd_dyn_maximal,
    "dyn.correlation": cmd_dyn_correlation,
    "rates.verify": cmd_rates_verify,
    "rates.curve": cmd_rates_curve,
    "rates.pillai": cmd_rates_pillai,
    "rates.threshold": cmd_rates_threshold,
    "tests.validate": cmd_tests_validate,
    "tests.solovay": cmd_tests_solovay,
    "tests.flatten": cmd_tests_flatten,
    "tests.coverage": cmd_tests_coverage,
    "tests.counterexample": cmd_tests_counterexample,
    "tests.machinery": cmd_tests_machinery,
    "tests.tail": cmd_tests_tail,
    "mart.build": cmd_mart_build,
    "mart.fairness": cmd_mart_fairness,
    "mart.success": cmd_mart_success,
    "mart.kolmogorov": cmd_mart_kolmogorov,
    "mart.to-test": cmd_mart_to_test,
    "mart.separation": cmd_mart_separation,
}


def dispatch(command: str, params: Dict[str, Any], data: Any, *, seed: int = DEFAULT_SEED,
             max_level: int = DEFAULT_MAX_LEVEL, max_depth: int = DEFAULT_MAX_DEPTH,
             csv_path: Optional[str] = None, echo: Optional[Dict[str, Any]] = None) -> Tuple[Dict[str, Any], int]:
    """Run one command; returns the report and the exit status."""
    if command not in COMMANDS:
        raise ser.InputError(f"unknown command {command!r}")
    ctx = Context(params, data, seed, max_level, max_depth, csv_path)
    result = COMMANDS[command](ctx)
    failed = sum(1 for c in ctx.checks if not c["pass"])
    report = {
        "command": command,
        "manifest": echo if echo is not None else {"params": params, "seed": seed},
        "checks": ctx.checks,
        "summary": {"checks": len(ctx.checks), "passed": len(ctx.checks) - failed, "failed": failed},
        "result": result,
    }
    return report, EXIT_VIOLATION if failed else EXIT_OK


# -- argument parsing ----------------------------------------------------------------------------


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ser.InputError(f"environment variable {name} must be an integer")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--in", dest="infile", help="input JSON file")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--csv", help="CSV output path (rates commands)")
    p.add_argument("--seed", type=int, help=f"seed for generated words (default {DEFAULT_SEED})")
    p.add_argument("--max-level", type=int, help="largest function level allowed (env ERGOLAB_MAX_LEVEL)")
    p.add_argument("--max-depth", type=int, help="largest martingale depth allowed (env ERGOLAB_MAX_DEPTH)")


_ARGS: Dict[str, List[Tuple[str, Dict[str, Any]]]] = {
    "core.canonicalize": [],
    "core.combine": [("--mode", {"choices": ["union", "intersect", "difference", "complement"]})],
    "core.measure": [("--n", {"type": int})],
    "fn.evaluate": [("--word", {})],
    "fn.norms": [],
    "fn.deviation": [("--t", {}), ("--strict", {"action": "store_true", "default": None})],
    "dyn.preimage": [("--n", {"type": int})],
    "dyn.pullback": [("--i", {"type": int})],
    "dyn.birkhoff": [("--n", {"type": int})],
    "dyn.measure-preserving": [("--level", {"type": int})],
    "dyn.cocycle": [("--k", {"type": int}), ("--n", {"type": int})],
    "dyn.maximal": [("--horizon", {"type": int}), ("--delta", {})],
    "dyn.correlation": [("--n", {"type": int})],
    "rates.verify": [("--m", {"type": int}), ("--sigma", {"nargs": "+"})],
    "rates.curve": [("--sigma", {}), ("--n-list", {"nargs": "+", "type": int})],
    "rates.pillai": [("--sigma", {}), ("--n", {"type": int})],
    "rates.threshold": [("--p", {}), ("--t", {}), ("--c", {"type": int}), ("--m", {"type": int})],
    "tests.validate": [],
    "tests.solovay": [("--solovay-p", {}), ("--n-max", {"type": int}), ("--k-max", {"type": int})],
    "tests.flatten": [("--n-max", {"type": int})],
    "tests.coverage": [("--n-max", {"type": int})],
    "tests.counterexample": [("--n-max", {"type": int}), ("--cx-n-max", {"type": int})],
    "tests.machinery": [("--p", {}), ("--horizon", {"type": int})],
    "tests.tail": [("--kind", {"choices": ["power", "polylog"]}), ("--m", {"type": int}), ("--k", {"type": int}), ("--horizon", {"type": int})],
    "mart.build": [("--k", {"type": int}), ("--depth", {"type": int})],
    "mart.fairness": [],
    "mart.success": [("--prefix", {}), ("--k", {"type": int})],
    "mart.kolmogorov": [("--c", {}), ("--level", {"type": int})],
    "mart.to-test": [("--k", {"type": int}), ("--i-max", {"type": int})],
    "mart.separation": [("--source", {}), ("--depth", {"type": int})],
}

_RESERVED = {"command", "seed", "out", "csv", "input", "input_file", "max_level", "max_depth"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ergolab", description="Exact checks for ergodic averages, randomness tests and martingales.")
    groups = parser.add_subparsers(dest="group", required=True)
    by_group: Dict[str, argparse._SubParsersAction] = {}
    for name in COMMANDS:
        group, cmd = name.split(".", 1)
        if group not in by_group:
            gp = groups.add_parser(group)
            by_group[group] = gp.add_subparsers(dest="cmd", required=True)
        sp = by_group[group].add_parser(cmd)
        _common(sp)
        for flag, kw in _ARGS[name]:
            sp.add_argument(flag, **kw)
    run = groups.add_parser("run", help="execute a JSON run manifest")
    run.add_argument("--manifest", required=True)
    _common(run)
    return parser


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ser.InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise ser.InputError(f"{path}: {exc.strerror}") from exc


def _emit(report: Dict[str, Any], out: Optional[str]):
    text = ser.dumps(report)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    max_level = args.max_level if args.max_level is not None else _env_int("ERGOLAB_MAX_LEVEL", DEFAULT_MAX_LEVEL)
    max_depth = args.max_depth if args.max_depth is not None else _env_int("ERGOLAB_MAX_DEPTH", DEFAULT_MAX_DEPTH)
    if args.group == "run":
        manifest = _load_json(args.manifest)
        ser.validate(manifest, "manifest")
        base = Path(args.manifest).resolve().parent
        data = manifest.get("input")
        if data is None and manifest.get("input_file"):
            data = _load_json(str(base / manifest["input_file"]))
        elif data is None and args.infile:
            data = _load_json(args.infile)
        params = {k: v for k, v in manifest.items() if k not in _RESERVED}
        seed = args.seed if args.seed is not None else manifest.get("seed", DEFAULT_SEED)
        out = args.out or (str(base / manifest["out"]) if manifest.get("out") else None)
        csv_path = args.csv or (str(base / manifest["csv"]) if manifest.get("csv") else None)
        report, code = dispatch(
            manifest["command"], params, data, seed=seed,
            max_level=manifest.get("max_level", max_level), max_depth=manifest.get("max_depth", max_depth),
            csv_path=csv_path, echo=manifest,
        )
        _emit(report, out)
        return code
    command = f"{args.group}.{args.cmd}"
    skip = {"group", "cmd", "infile", "out", "csv", "seed", "max_level", "max_depth"}
    params = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    data = _load_json(args.infile) if args.infile else None
    seed = DEFAULT_SEED if args.seed is None else args.seed
    echo = {"command": command, "params": params, "seed": seed}
    if args.infile:
        echo["input_file"] = os.path.basename(args.infile)
    report, code = dispatch(command, params, data, seed=seed, max_level=max_level, max_depth=max_depth, csv_path=args.csv, echo=echo)
    _emit(report, args.out)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (ErgolabError, KeyError, TypeError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"ergolab: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
