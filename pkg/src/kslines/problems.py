"""JSON problem files: lines, functions, integrators, intervals and sections.

Numbers may be written as rational strings ("1/3") and are parsed exactly.
Unknown keys are rejected at every level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import _num as N
from . import lines as L
from .bridges import series_integrand, series_integrator
from .errors import InvalidInput, KSError
from .functions import OrdinalEventual, PiecewisePoly, Table
from .integrators import LEVELS, Integrator
from .lines import IntervalSpec

TOP_KEYS = {
    "name", "line", "G", "f", "F", "interval", "absolute", "point", "probes", "exceptions",
    "gauge", "family", "points", "eps", "mode", "sequence", "m_max", "split",
}


def _keys(d: dict, allowed, where: str):
    if not isinstance(d, dict):
        raise InvalidInput(f"{where}: expected an object")
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise InvalidInput(f"{where}: unknown key {extra[0]!r}")


def parse_line(d, where="line") -> L.CompactLine:
    _keys(d, {"kind", "interval", "components", "points", "alpha", "degree", "outer", "inner", "base", "subset"}, where)
    kind = d.get("kind")
    if kind == "real":
        a, b = d["interval"]
        return L.real_line(N.exact(a), N.exact(b))
    if kind == "timescale":
        return L.TimeScaleLine([(N.exact(a), N.exact(b)) for a, b in d["components"]])
    if kind == "finite":
        return L.FiniteLine([N.exact(p) if not isinstance(p, str) or "/" in p or p.lstrip("-").isdigit() else p
                             for p in d["points"]])
    if kind == "ordinal":
        return L.OrdinalLine(str(d["alpha"]), int(d.get("degree", 3)))
    if kind == "lex":
        return L.LexLine(parse_line(d["outer"], where + ".outer"), parse_line(d["inner"], where + ".inner"))
    if kind == "double-arrow":
        base = parse_line(d["base"], where + ".base")
        sub = d.get("subset", "all")
        if isinstance(sub, dict):
            _keys(sub, {"intervals"}, where + ".subset")
            sub = ("intervals", [(base.parse_point(a), base.parse_point(b)) for a, b in sub["intervals"]])
        elif isinstance(sub, list):
            sub = [base.parse_point(p) for p in sub]
        return L.DoubleArrowLine(base, sub)
    raise InvalidInput(f"{where}: unknown line kind {kind!r}")


def parse_interval(K, d, where="interval") -> IntervalSpec:
    if isinstance(d, list):
        if len(d) != 2:
            raise InvalidInput(f"{where}: expected [lower, upper]")
        return L.validate(K, IntervalSpec(K.parse_point(d[0]), K.parse_point(d[1])))
    _keys(d, {"lower", "upper", "lower_open", "upper_open"}, where)
    spec = IntervalSpec(K.parse_point(d["lower"]), K.parse_point(d["upper"]),
                        bool(d.get("lower_open", False)), bool(d.get("upper_open", False)))
    return L.validate(K, spec)


FN_KEYS = {"pieces", "jumps", "poly", "step", "table", "indicator", "value", "series", "ratio", "first",
           "positive", "negative", "coefficients", "sequence", "at_limit", "values", "blocks"}


def parse_function(K, d, where="f", extra=()):
    _keys(d, FN_KEYS | set(extra), where)
    if "pieces" in d:
        pieces = []
        for i, p in enumerate(d["pieces"]):
            _keys(p, {"on", "poly"}, f"{where}.pieces[{i}]")
            a, b = p["on"]
            pieces.append((a, b, p["poly"]))
        return PiecewisePoly.from_pieces(K, pieces, [(c, s) for c, s in d.get("jumps", [])])
    if "poly" in d:
        base = PiecewisePoly.polynomial(K, d["poly"])
        for c, s in d.get("jumps", []):
            base = base + PiecewisePoly.from_assignments(K, [(IntervalSpec(K.parse_point(c), K.one), [N.exact(s)])])
        return base
    if "step" in d:
        _keys(d["step"], {"points", "values"}, where + ".step")
        return PiecewisePoly.step(K, d["step"]["points"], d["step"]["values"])
    if "indicator" in d:
        spec = parse_interval(K, d["indicator"], where + ".indicator")
        from .functions import indicator

        return indicator(K, spec, N.exact(d.get("value", 1)))
    if "table" in d:
        t = d["table"]
        pairs = t.items() if isinstance(t, dict) else t
        return Table(K, {K.parse_point(p): N.exact(v) for p, v in pairs})
    if "series" in d:
        params = {k: d[k] for k in ("ratio", "first", "positive", "negative", "coefficients") if k in d}
        return series_integrator(d["series"], K, **params).fn
    if "sequence" in d:
        seq = d["sequence"]
        at = float(N.exact(d.get("at_limit", 0)))
        if seq == "constant":
            v = float(N.exact(d.get("value", 1)))
            return series_integrand(lambda n: v, at, K)
        if seq == "explicit":
            vals = [float(N.exact(v)) for v in d["values"]]
            return series_integrand(lambda n: vals[n] if n < len(vals) else 0.0, at, K)
        raise InvalidInput(f"{where}: unknown sequence {seq!r}")
    if "blocks" in d:
        return OrdinalEventual(K, [([N.exact(v) for v in vals], N.exact(tail)) for vals, tail in d["blocks"]])
    raise InvalidInput(f"{where}: no function description")


def parse_integrator(K, d, where="G") -> Integrator:
    fn = parse_function(K, d, where, extra=("regularity",))
    reg = d.get("regularity")
    if reg is None:
        reg = "nondecreasing" if getattr(fn, "nondecreasing", False) else "amenable" if "series" in d else "arbitrary"
    if reg not in LEVELS:
        raise InvalidInput(f"{where}: unknown regularity {reg!r}")
    return Integrator(fn, reg, validate="series" not in d)


@dataclass
class Problem:
    line: L.CompactLine
    raw: dict
    G: Integrator | None = None
    f: object = None
    F: object = None
    interval: IntervalSpec | None = None
    absolute: bool = False
    point: object = None
    probes: list = field(default_factory=list)
    exceptions: list = field(default_factory=list)
    gauge: dict | None = None
    family: list = field(default_factory=list)
    points: list = field(default_factory=list)
    eps: object = None
    mode: str | None = None
    sequence: str | None = None
    m_max: int = 64
    split: object = None
    name: str = "problem"


def parse_problem(d: dict) -> Problem:
    _keys(d, TOP_KEYS, "problem")
    if "line" not in d:
        raise InvalidInput("problem: missing 'line'")
    try:
        K = parse_line(d["line"])
        p = Problem(K, d, name=str(d.get("name", "problem")))
        if "G" in d:
            p.G = parse_integrator(K, d["G"])
        if "f" in d:
            p.f = parse_function(K, d["f"], "f")
        if "F" in d:
            p.F = parse_function(K, d["F"], "F")
        if "interval" in d:
            p.interval = parse_interval(K, d["interval"])
        p.absolute = bool(d.get("absolute", False))
        if "point" in d:
            p.point = K.parse_point(d["point"])
        p.probes = [K.parse_point(x) for x in d.get("probes", [])]
        p.exceptions = [K.parse_point(x) for x in d.get("exceptions", [])]
        if "gauge" in d:
            _keys(d["gauge"], {"kind", "seed", "radius"}, "gauge")
            p.gauge = d["gauge"]
        p.family = [parse_interval(K, s, f"family[{i}]") for i, s in enumerate(d.get("family", []))]
        p.points = [K.parse_point(x) for x in d.get("points", [])]
        if "eps" in d:
            p.eps = N.exact(d["eps"])
        p.mode = d.get("mode")
        p.sequence = d.get("sequence")
        p.m_max = int(d.get("m_max", 64))
        if "split" in d:
            p.split = K.parse_point(d["split"])
    except InvalidInput:
        raise
    except (KSError, KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidInput(f"problem: {type(e).__name__}: {e}") from e
    return p


def load_problem(path) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InvalidInput(f"{path}: {e.strerror}") from e
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    return parse_problem(d)
