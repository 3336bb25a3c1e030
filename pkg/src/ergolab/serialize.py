"""JSON encodings of the package's values.

Rationals are ``{"num": "<int>", "den": "<int>"}`` with decimal strings so
arbitrarily large values survive.  Decoders also accept ``"3/8"`` strings and
plain integers.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from importlib import resources
from typing import Any, Dict, List

import jsonschema

from .core import MeasureSpec, PolyBound, PrefixSet
from .dynamics import SimpleTransformation
from .errors import ErgolabError
from .exact import QuadRational, as_fraction
from .martingales import MartingaleTable
from .randtests import FlattenedFamily, TestFamily
from .simplefn import SimpleFunction


class InputError(ErgolabError, ValueError):
    """Malformed or schema-violating input."""


# -- scalars ------------------------------------------------------------------


def display_float(x) -> Any:
    """Float for human eyes; ``"inf"``/``"-inf"`` when out of range."""
    try:
        v = float(x)
    except OverflowError:
        return "inf" if x > 0 else "-inf"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def enc_rational(x) -> Dict[str, str]:
    x = as_fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def enc_number(x) -> Dict[str, Any]:
    """Exact rational plus a display float."""
    if isinstance(x, QuadRational):
        d = enc_quad(x)
    else:
        d = enc_rational(x)
    d["float"] = display_float(x)
    return d


def dec_rational(obj) -> Fraction:
    if isinstance(obj, bool):
        raise InputError("booleans are not rationals")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except ValueError as exc:
            raise InputError(f"bad rational {obj!r}") from exc
    if isinstance(obj, dict) and "num" in obj and "den" in obj:
        try:
            den = int(obj["den"])
            if den <= 0:
                raise InputError("rational denominators must be positive")
            return Fraction(int(obj["num"]), den)
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad rational {obj!r}") from exc
    raise InputError(f"bad rational {obj!r}")


def enc_quad(q: QuadRational) -> Dict[str, Any]:
    return {"a": enc_rational(q.a), "b": enc_rational(q.b)}


def dec_quad(obj) -> QuadRational:
    if isinstance(obj, dict) and "a" in obj:
        return QuadRational(dec_rational(obj["a"]), dec_rational(obj.get("b", 0)))
    return QuadRational(dec_rational(obj))


# -- structures -----------------------------------------------------------------


def enc_prefixset(s: PrefixSet) -> Dict[str, List[str]]:
    return {"words": s.sorted_words()}


def dec_prefixset(obj) -> PrefixSet:
    if isinstance(obj, list):
        return PrefixSet(obj)
    return PrefixSet(obj["words"])


def raw_words(obj) -> List[str]:
    return list(obj) if isinstance(obj, list) else list(obj["words"])


def enc_function(f: SimpleFunction) -> Dict[str, Any]:
    return {
        "level": f.level,
        "entries": [{"word": w, "value": enc_rational(v)} for w, v in sorted(f.cells.items(), key=lambda t: (len(t[0]), t[0]))],
    }


def dec_function(obj) -> SimpleFunction:
    terms = [(e["word"], dec_rational(e["value"])) for e in obj.get("entries", [])]
    return SimpleFunction.from_increments(int(obj["level"]), terms)


def enc_transformation(t: SimpleTransformation) -> Dict[str, Any]:
    if t.is_shift:
        return {"c": t.c, "builtin": "shift"}
    return {
        "c": t.c,
        "table": [{"sigma": s, "preimage": {"words": list(t.raw[s])}} for s in sorted(t.raw, key=lambda w: (len(w), w))],
    }


def dec_transformation(obj) -> SimpleTransformation:
    if obj.get("builtin"):
        return SimpleTransformation(int(obj.get("c", 1)), builtin=obj["builtin"])
    table = {e["sigma"]: raw_words(e["preimage"]) for e in obj.get("table", [])}
    return SimpleTransformation(int(obj["c"]), table)


def dec_measure(obj) -> MeasureSpec:
    if obj is None:
        return MeasureSpec()
    kind = obj.get("kind", "bernoulli-half")
    if kind == "bernoulli-half":
        return MeasureSpec()
    if kind == "dyadic-table":
        return MeasureSpec.dyadic({e["word"]: dec_rational(e["mass"]) for e in obj["table"]})
    raise InputError(f"measure kind {kind!r} cannot be read from JSON")


def enc_family(F: TestFamily) -> Dict[str, Any]:
    out = {
        "mode": F.mode,
        "stages": [{"n": n, "k": k, "set": {"words": list(F.raw[(n, k)])}} for (n, k) in sorted(F.raw)],
    }
    if F.controlling is not None:
        out["p"] = list(F.controlling.coefficients)
    if F.saturated:
        out["saturated"] = True
    return out


def dec_family(obj) -> TestFamily:
    stages = {}
    for e in obj.get("stages", []):
        key = (int(e["n"]), int(e["k"]))
        if key in stages:
            raise InputError(f"duplicate stage {key}")
        stages[key] = raw_words(e["set"])
    p = PolyBound(tuple(obj["p"])) if obj.get("p") is not None else None
    return TestFamily(obj["mode"], stages, p, bool(obj.get("saturated", False)))


def enc_flattened(H: FlattenedFamily) -> Dict[str, Any]:
    return {
        "mode": H.mode,
        "hats": [
            {
                "n": n,
                "set": {"words": list(H.raw_hats.get(n, H.hats[n].sorted_words()))},
                "measure": enc_number(H.measures[n]),
                "bound_ok": H.bound_ok[n],
                "antichain": H.antichain[n],
            }
            for n in H.indices()
        ],
        "length_exponent": H.length_exponent,
    }


def dec_flattened(obj) -> FlattenedFamily:
    return FlattenedFamily.from_hats(obj["mode"], {int(e["n"]): raw_words(e["set"]) for e in obj.get("hats", [])})


def enc_martingale(D: MartingaleTable) -> Dict[str, Any]:
    words = sorted(D.values, key=lambda w: (len(w), w))
    return {"depth": D.depth, "values": [dict(word=w, **enc_quad(D.values[w])) for w in words]}


def dec_martingale(obj) -> MartingaleTable:
    return MartingaleTable(int(obj["depth"]), {e["word"]: dec_quad(e) for e in obj["values"]})


# -- schemas and output -------------------------------------------------------------


def load_schema(name: str) -> Dict[str, Any]:
    text = resources.files("ergolab").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(obj, schema_name: str):
    try:
        jsonschema.validate(obj, load_schema(schema_name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"{schema_name} schema violation at {where}: {exc.message}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
