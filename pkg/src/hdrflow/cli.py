"""Command-line driver.

    hdrflow spaces  [--curve FILE] [--p P]
    hdrflow flow    [--curve FILE] [--p P] [--ext-bound M] [--eps search|JSON] [--steps N]
    hdrflow nodal   [--curve FILE] [--p P]
    hdrflow verify  [--seed N]

Curve files are JSON, either {"type": "rational", "p": 5, "marked": [0, 1, "inf", 2]}
or {"type": "td", "g": 2, "r": 0, "edges": [[0, 1], ...], "labels": [...], "legs": [...]}.
Every command prints a table and, with --out, writes a JSON report.
Exit codes: 0 pass, 1 invariant failure, 2 usage or parse error.
"""

import argparse
import json
import sys

from .logcurve import INF, MarkedProjLine, CurveError
from .cartier import W2LiftChoice
from .periodicity import maximal_higgs, compute_spaces, rho_image_dim, intersect_A_K, flow_run
from . import nodal, suites

PRIMES = (3, 5, 7, 11, 13)


class UsageError(Exception):
    pass


class RunConfig:
    def __init__(self, command, p=None, ext_bound=4, curve=None, out=None, seed=0, eps="search",
                 steps=3):
        self.command, self.p, self.ext_bound = command, p, ext_bound
        self.curve, self.out, self.seed = curve, out, seed
        self.eps, self.steps = eps, steps

    def validate(self):
        if self.p is not None and self.p not in PRIMES:
            raise UsageError("p must be an odd prime <= 13, got %s" % self.p)
        if self.p is not None and self.p > 7:
            print("warning: p = %d is above 7, expect long runs" % self.p, file=sys.stderr)
        if not 1 <= self.ext_bound <= 4:
            raise UsageError("--ext-bound must be between 1 and 4")
        if self.steps < 1:
            raise UsageError("--steps must be positive")

    def to_dict(self):
        return {"command": self.command, "p": self.p, "ext_bound": self.ext_bound,
                "curve": self.curve, "seed": self.seed, "eps": self.eps, "steps": self.steps}


def load_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError("cannot read %s: %s" % (path, e.strerror))
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError("%s:%d:%d: %s" % (path, e.lineno, e.colno, e.msg))


def load_curve(cfg, default):
    """(kind, object) for the configured curve; kind is "rational" or "td"."""
    spec = load_json(cfg.curve) if cfg.curve else default
    if not isinstance(spec, dict):
        raise UsageError("curve spec must be a JSON object")
    kind = spec.get("type")
    try:
        if kind == "rational":
            if cfg.p is not None and "p" in spec and int(spec["p"]) != cfg.p:
                raise UsageError("--p %d disagrees with the curve file (p = %s)" % (cfg.p, spec["p"]))
            spec = dict(spec)
            spec.setdefault("p", cfg.p or 5)
            return kind, MarkedProjLine.from_spec(spec)
        if kind == "td":
            return kind, nodal.from_spec(spec)
    except (CurveError, nodal.TDCurveError, KeyError, TypeError, ValueError) as e:
        if isinstance(e, UsageError):
            raise
        raise UsageError("bad curve spec: %s" % (e,))
    raise UsageError("unknown curve type %r" % (kind,))


def _rational(cfg, default_marked):
    kind, C = load_curve(cfg, {"type": "rational", "marked": default_marked})
    if kind != "rational":
        raise UsageError("this command needs a rational curve")
    return C


def closed_forms(C):
    """Expected dimensions for the maximal Higgs bundle on (P^1, r points)."""
    p, r = C.p, C.r
    return {"ambient": p * (r - 2) - 1, "W_F": r - 3, "A": r - 3, "B": r - 2}


def cmd_spaces(cfg):
    C = _rational(cfg, [0, 1, "inf"])
    E = maximal_higgs(C)
    sp = compute_spaces(E)
    got = {"ambient": sp.ambient_dim, "W_F": sp.dim_W_F, "A": sp.dim_A, "B": sp.dim_B}
    expect = closed_forms(C)
    inv = sp.invariants()
    rho_dim = rho_image_dim(E)
    ok = got == expect and all(inv.values()) and rho_dim == sp.dim_A
    table = ["%-8s %8s %8s" % ("space", "computed", "expected")]
    table += ["%-8s %8d %8d" % (k, got[k], expect[k]) for k in expect]
    table += ["%-24s %s" % (k, v) for k, v in sorted(inv.items())]
    table.append("dim of rho image: %d" % rho_dim)
    results = {"curve": C.to_spec(), "higgs": E.to_dict(), "spaces": sp.to_dict(),
               "expected": expect, "invariants": inv, "rho_image_dim": rho_dim}
    return ok, results, table


def _parse_eps(C, text):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError("--eps: column %d: %s" % (e.colno, e.msg))
    if not isinstance(raw, dict):
        raise UsageError("--eps must be 'search' or a JSON object {point: value}")
    eps = {}
    for k, v in raw.items():
        pt = INF if k == "inf" else int(k)
        if pt not in C.finite:
            raise UsageError("--eps: %s is not a finite marked point" % k)
        eps[pt] = int(v) % C.p
    return eps


def cmd_flow(cfg):
    C = _rational(cfg, [0, 1, "inf", 2])
    E = maximal_higgs(C)
    if cfg.eps == "search":
        hits = intersect_A_K(E, cfg.ext_bound, stop_at_first=True)
        if not hits:
            return False, {"curve": C.to_spec(), "intersection": None}, \
                ["no point of A meets K over GF(p^m), m <= %d" % cfg.ext_bound]
        h = hits[0]
        Ecur, choice = h["E"], W2LiftChoice(h["curve"], h["eps"])
        F = h["curve"].F
        found = {"m": h["m"], "eps": choice.to_dict(), "xi": [F.to_str(x) for x in h["xi"]],
                 "witness": h["witness"].to_dict()}
    else:
        Ecur, choice = E, W2LiftChoice(C, _parse_eps(C, cfg.eps))
        found = None
    trace = flow_run(Ecur, choice, cfg.steps)
    ok = trace.period is not None
    table = []
    if found:
        table.append("A meets K over GF(%d^%d) at eps = %s" % (C.p, found["m"], found["eps"]))
    for st in trace.steps:
        table.append("step %d  splitting %s  iso with step %s" % (st.index, st.split, st.iso_with))
    table.append(trace.to_dict()["result"])
    return ok, {"curve": C.to_spec(), "intersection": found, "lift": choice.to_dict(),
                "trace": trace.to_dict()}, table


def cmd_nodal(cfg):
    default = nodal.theta_graph().to_spec()
    kind, curve = load_curve(cfg, default)
    if kind != "td":
        raise UsageError("nodal needs a curve of type 'td'")
    p = cfg.p or 5
    ok, row = suites.nodal_report(curve, p)
    table = ["%-6s %9s %12s" % ("space", "sequence", "closed form")]
    for k, v in row["dims"].items():
        table.append("%-6s %9d %12d" % (k, v["sequence"], v["closed_form"]))
    table.append("b   = %s" % row["b"])
    table.append("mu  = %s  (mu-scan solutions: %s)" % (row["mu"], row["mu_scan_solutions"]))
    table.append("ordinary: %s   two-torsion signs: %s" % (row["ordinary"], row["two_torsion"]["signs"]))
    return ok, {"curve": curve.to_spec(), "nodal": row}, table


def cmd_verify(cfg):
    res = suites.run_all(cfg.seed)
    ok = all(r["pass"] for r in res)
    table = ["%s %2d %s" % ("PASS" if r["pass"] else "FAIL", r["id"], r["name"]) for r in res]
    return ok, {"suites": res}, table


COMMANDS = {"spaces": cmd_spaces, "flow": cmd_flow, "nodal": cmd_nodal, "verify": cmd_verify}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="odd prime <= 13")
    common.add_argument("--ext-bound", type=int, default=4, help="largest extension degree m")
    common.add_argument("--curve", metavar="FILE", help="JSON curve spec")
    common.add_argument("--out", metavar="FILE", help="write the JSON report here")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    parser = argparse.ArgumentParser(prog="hdrflow", description="Higgs-de Rham flows over finite fields")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spaces", parents=[common], help="lifting spaces and their dimensions")
    fl = sub.add_parser("flow", parents=[common], help="find A meets K and run the flow")
    fl.add_argument("--eps", default="search", help="'search' or a JSON object {point: value}")
    fl.add_argument("--steps", type=int, default=3)
    sub.add_parser("nodal", parents=[common], help="totally degenerate curves")
    sub.add_parser("verify", parents=[common], help="run every verification suite")
    return parser


def render(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    cfg = RunConfig(args.command, args.p, args.ext_bound, args.curve, args.out, args.seed,
                    getattr(args, "eps", "search"), getattr(args, "steps", 3))
    try:
        cfg.validate()
        ok, results, table = COMMANDS[args.command](cfg)
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    report = {"config": cfg.to_dict(), "results": results, "pass": ok}
    for line in table:
        print(line)
    print("PASS" if ok else "FAIL")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(render(report))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
