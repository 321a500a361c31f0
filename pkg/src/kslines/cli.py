"""Command-line front end.

Exit codes: 0 success, 2 NoCertificate or Divergent, 3 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from . import _num as N
from . import lines as L
from .bridges import convergence_harness, nabla_integrate, standard_sequence, vitali_cover_finite, vitali_select
from .calculus import ftc_differentiate_integral, ftc_integrate_derivative, g_derivative
from .checks import run_suite
from .engine import DEFAULT_MAX_REFINE, absolute_integrate, integrate, riemann_sum
from .errors import InvalidInput, KSError, NotGDifferentiable, SeriesDivergent
from .integrators import MeasureView, mu_interval, total_variation
from .partitions import cousin_partition, full_gauge, is_fine, random_gauge, uniform_gauge
from .problems import Problem, load_problem

FAIL_STATUSES = {"NoCertificate", "Divergent"}
COLUMNS = ("name", "value", "error_bound", "status")


@dataclass
class Report:
    rows: list = field(default_factory=list)
    stamp: dict = field(default_factory=dict)

    def add(self, name, value="", bound="", status="ok"):
        self.rows.append((str(name), _cell(value), _cell(bound), str(status)))

    def exit_code(self) -> int:
        return 2 if any(r[3] in FAIL_STATUSES for r in self.rows) else 0


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction) and v.denominator > 10 ** 6:
        exact = N.fmt(v)
        return f"{exact} (~{float(v)!r})" if len(exact) <= 80 else f"~{float(v)!r}"
    return N.fmt(v)


def render(rep: Report, fmt: str) -> str:
    stamp = " ".join(f"{k}={v}" for k, v in rep.stamp.items())
    if fmt == "json":
        rows = [dict(zip(COLUMNS, r)) for r in rep.rows]
        return json.dumps({"stamp": rep.stamp, "rows": rows}, indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(rep.rows)
        return buf.getvalue()
    widths = [max([len(c)] + [len(r[i]) for r in rep.rows]) for i, c in enumerate(COLUMNS)]
    lines = [f"# {stamp}"]
    lines.append("  ".join(c.ljust(w) for c, w in zip(COLUMNS, widths)).rstrip())
    for r in rep.rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def parse_report(text: str, fmt: str) -> list:
    """Rows of a rendered report, as tuples of strings."""
    if fmt == "json":
        return [tuple(r[c] for c in COLUMNS) for r in json.loads(text)["rows"]]
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        return [tuple(r) for r in rows[1:]]
    raise ValueError("table output is for reading, not parsing")


# ----------------------------------------------------------------------------
# subcommands

def _need(p: Problem, *attrs):
    for a in attrs:
        if getattr(p, a) in (None, []):
            raise InvalidInput(f"problem needs '{a}'")


def _probes(p: Problem):
    if p.probes:
        return p.probes
    if p.point is not None:
        return [p.point]
    pts = p.line.points()
    if pts is not None:
        return pts
    raise InvalidInput("problem needs 'probes' or 'point'")


def cmd_classify(p: Problem, args, rep: Report):
    K = p.line
    pts = p.probes or K.points() or [K.zero, K.one]
    for x in pts:
        rep.add(K.format_point(x), K.classify(x).describe(K))


def _gauge(p: Problem, args):
    K = p.line
    g = p.gauge or {"kind": "random", "seed": args.seed}
    kind = g.get("kind", "random")
    if kind == "random":
        return random_gauge(K, g.get("seed", args.seed))
    if kind == "full":
        return full_gauge(K)
    if kind == "uniform":
        if not isinstance(K, L.TimeScaleLine):
            raise InvalidInput("uniform gauges need a time scale")
        return uniform_gauge(K, N.exact(g["radius"]))
    raise InvalidInput(f"unknown gauge kind {kind!r}")


def _short(K, x) -> str:
    """Point label; long rationals are abbreviated to a float."""
    if isinstance(x, Fraction) and x.denominator > 10 ** 6:
        return f"~{float(x)!r}"
    return K.format_point(x)


def cmd_partition(p: Problem, args, rep: Report):
    K = p.line
    d = _gauge(p, args)
    P = cousin_partition(K, d)
    fine = is_fine(K, P, d)
    for c in P:
        rep.add(f"[{_short(K, c.lo)}, {_short(K, c.hi)}]", _short(K, c.tag), "", "fine" if fine else "not fine")
    if p.f is not None and p.G is not None:
        rep.add("riemann sum", riemann_sum(p.f, p.G, P), "", "ok")


def cmd_integrate(p: Problem, args, rep: Report):
    _need(p, "f", "G")
    if p.absolute:
        r = absolute_integrate(p.f, p.G, tol=args.tol)
        rep.add("integral of |f|", r.value, r.error_bound, r.status_label())
        return
    r = integrate(p.f, p.G, p.interval, tol=args.tol, max_refine=args.max_refine)
    rep.add("integral", r.value, r.error_bound, r.status_label())


def cmd_variation(p: Problem, args, rep: Report):
    _need(p, "G")
    v = total_variation(p.G, p.interval)
    status = "Divergent" if v.divergent else ("Exact" if v.exact else "Certified")
    rep.add("Var(G)", v.value, 0 if v.exact else "", status)
    if p.interval is not None and p.G.at_least("nbv"):
        rep.add("mu_G(interval)", mu_interval(MeasureView(p.G), p.interval), 0, "Exact")


def cmd_derivative(p: Problem, args, rep: Report):
    _need(p, "f", "G")
    K = p.line
    for x in _probes(p):
        try:
            d = g_derivative(p.f, p.G, x, args.tol if args.tol_given else 1e-6)
            eps = 0 if d.case == "JumpCase" else d.certificate["eps"]
            rep.add(f"df/dG at {K.format_point(x)}", d.value, eps, d.case)
        except NotGDifferentiable as e:
            rep.add(f"df/dG at {K.format_point(x)}", "", "", e.kind)


def cmd_ftc(p: Problem, args, rep: Report):
    _need(p, "f", "G")
    K = p.line
    if p.F is not None:
        r = ftc_integrate_derivative(p.F, p.f, p.G, p.exceptions)
        rep.add("integral of f", r.lhs, 0, "ok")
        rep.add("F(1) - (F(0) - f(0)G(0))", r.rhs, 0, "ok")
        rep.add("defect", r.defect, 0, r.status)
        for x, why in r.violations:
            rep.add(f"point {K.format_point(x)}" if x is not None else "F", why, "", "PreconditionViolated")
        return
    r = ftc_differentiate_integral(p.f, p.G, _probes(p), args.tol if args.tol_given else 1e-6)
    for x, case, D, fx, dev in r.rows:
        rep.add(f"dF/dG at {K.format_point(x)}", "" if D is None else D, "" if dev is None else dev, case)
    rep.add("outer bound of exceptional probes", r.outer_bound, 0, f"{len(r.exceptional)} probes")


def cmd_nabla(p: Problem, args, rep: Report):
    _need(p, "f", "G")
    r = nabla_integrate(p.f, p.G, p.line, tol=args.tol)
    rep.add("integral of f dG", r.lhs, r.ks.error_bound, r.ks.status_label())
    rep.add("nabla integral", r.nabla.value, r.nabla.error_bound, r.nabla.status_label())
    rep.add("f(0)G(0) + nabla integral", r.rhs, "", "ok")
    rep.add("defect", r.defect, "", "ok")


def cmd_vitali(p: Problem, args, rep: Report):
    _need(p, "G", "family")
    K = p.line
    M = MeasureView(p.G)
    chosen, phi = vitali_select(p.family, M)
    for j in chosen:
        I = p.family[j]
        rep.add(f"selected {I.format(K)}", mu_interval(M, I), "", f"hull {phi[j].format(K)}")
    if p.points and p.eps is not None:
        r = vitali_cover_finite(p.points, p.family, M, p.eps)
        for I in r.selection:
            rep.add(f"cover {I.format(K)}", mu_interval(M, I), "", "ok")
        rep.add("uncovered outer measure", r.defect, p.eps, "ok" if r.defect < p.eps else "NoCertificate")


def cmd_converge(p: Problem, args, rep: Report):
    _need(p, "G", "sequence")
    fam, lim, lower, upper = standard_sequence(p.sequence, p.line)
    mode = p.mode or "MCT"
    r = convergence_harness(mode, fam, lim, p.G, p.m_max, args.tol if args.tol_given else 1e-6, lower, upper)
    m = p.m_max
    while m >= 2:
        rep.add(f"integral m={m}", r.integrals[m - 1], "", "Exact")
        m //= 2
    rep.add("extrapolated limit", r.extrapolated, "", "ok")
    rep.add("integral of the limit", r.target, "", "Exact")
    rep.add(f"{r.mode} defect", r.defect, "", "ok")


def cmd_check(args, rep: Report):
    for row in run_suite(args.seed):
        rep.add(row.name, row.value, row.bound, "pass" if row.passed else "fail")


COMMANDS = {
    "classify": cmd_classify,
    "partition": cmd_partition,
    "integrate": cmd_integrate,
    "variation": cmd_variation,
    "derivative": cmd_derivative,
    "ftc": cmd_ftc,
    "nabla": cmd_nabla,
    "vitali": cmd_vitali,
    "converge": cmd_converge,
}

HELP = {
    "classify": "classify probe points of the line",
    "partition": "build a fine tagged partition for the problem's gauge",
    "integrate": "integrate f against G",
    "variation": "total variation of G",
    "derivative": "derivative of f with respect to G at the probes",
    "ftc": "check both directions of the fundamental theorem",
    "nabla": "compare with the nabla integral on a time scale",
    "vitali": "Vitali selection and finite cover",
    "converge": "run a convergence-theorem sequence",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kslines", description="Kurzweil-Stieltjes integration on compact lines.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-9; 1e-6 for derivatives and series)")
    common.add_argument("--max-refine", type=int, default=None, help=f"refinement budget (default {DEFAULT_MAX_REFINE})")
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--probes", default=None, help="comma-separated probe points overriding the problem file")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=HELP[name])
        sp.add_argument("problem", help="JSON problem file")
    sub.add_parser("check", parents=[common], help="run the seeded property suite")
    return ap


def execute(argv) -> tuple[int, str, str]:
    """(exit code, stdout text, stderr text)."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return (3 if e.code else 0), "", ""
    args.tol_given = args.tol is not None
    if args.tol is None:
        args.tol = 1e-9
    env = os.environ.get("KS_MAX_REFINE")
    if args.max_refine is None:
        args.max_refine = int(env) if env else DEFAULT_MAX_REFINE
    rep = Report(stamp={"command": args.command, "tol": repr(args.tol), "max_refine": args.max_refine, "seed": args.seed})
    try:
        if args.command == "check":
            cmd_check(args, rep)
            code = 0 if all(r[3] == "pass" for r in rep.rows) else 1
            return code, render(rep, args.format), ""
        p = load_problem(args.problem)
        if args.probes:
            p.probes = [p.line.parse_point(_probe_token(t)) for t in args.probes.split(",")]
        COMMANDS[args.command](p, args, rep)
    except InvalidInput as e:
        return 3, "", f"kslines: invalid input: {e}\n"
    except SeriesDivergent as e:
        rep.add(args.command, "", "", "Divergent")
        return 2, render(rep, args.format), f"kslines: {e}\n"
    except KSError as e:
        return 3, "", f"kslines: {type(e).__name__}: {e}\n"
    return rep.exit_code(), render(rep, args.format), ""


def _probe_token(t: str):
    t = t.strip()
    try:
        return json.loads(t)
    except json.JSONDecodeError:
        return t


def main(argv=None) -> int:
    code, out, err = execute(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
