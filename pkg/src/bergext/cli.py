"""Command-line interface.

Subcommands: kernel | extend-jet | extend-cross | claim1 | claim2 | claim34 |
lemmas | norms.  Options may come from a JSON config file (--config, schema 1)
with individual flags overriding it.  Exit codes: 0 success, 1 parameter
error, 2 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import BergextError, DegeneracyError, ParameterError
from .bergman import build_model, model_summary_json
from .extension import (
    CrossData,
    Jet,
    extend_cross,
    extend_jet_direct,
    extend_jet_recursive,
    rhs_estimate_cross,
    rhs_estimate_jet,
)
from .functionals import NormSpec, evaluate_norm
from .weights import RegularizedLogWeight, Weight, clamp_max
from . import sweeps


def parse_weight(text):
    """Weight from a JSON object, an @file reference, or a shorthand tag
    (zero[:domain], halfplane:m, point_log:r, diagonal_log,
    reglog:eps[:style[:direction]], clamp:eps:A:m)."""
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read().strip()
    if text.startswith("{"):
        return Weight.from_dict(json.loads(text))
    parts = text.split(":")
    tag, args = parts[0], parts[1:]
    try:
        if tag == "zero":
            return Weight.zero(args[0] if args else "disk")
        if tag == "halfplane":
            return Weight.halfplane(float(args[0]) if args else 1.0)
        if tag == "point_log":
            return Weight.point_log(float(args[0]) if args else 1.0)
        if tag == "diagonal_log":
            return Weight.diagonal_log()
        if tag == "reglog":
            eps = float(args[0])
            style = args[1] if len(args) > 1 else "convolution"
            direction = args[2] if len(args) > 2 else "z1-z2"
            return RegularizedLogWeight(eps, direction, style)
        if tag == "clamp":
            eps, A = float(args[0]), float(args[1])
            m = float(args[2]) if len(args) > 2 else 0.0
            base = Weight.halfplane(m) if m else Weight.zero()
            return clamp_max(base, eps, A)
    except (IndexError, ValueError) as exc:
        raise ParameterError("bad weight shorthand %r: %s" % (text, exc))
    raise ParameterError("unknown weight %r" % text)


def parse_complex_list(text):
    out = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            out.append(complex(tok.replace("i", "j")))
        except ValueError:
            raise ParameterError("cannot parse %r as a complex number" % tok)
    return out


def parse_grid(text):
    """'1..8' (integer range) or a comma-separated list of numbers."""
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    vals = [float(t) for t in text.split(",") if t.strip()]
    return [int(v) if v == int(v) else v for v in vals]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _build_parser():
    p = _Parser(prog="bergext", description=__doc__)
    p.add_argument("--config", help="JSON config file (schema 1)")
    sub = p.add_subparsers(dest="command")
    registry = {}

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--out", help="output path")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        registry[name] = sp
        return sp

    k = add("kernel", help="model summary: Gram diagnostics and B_k table")
    k.add_argument("--domain", choices=("disk", "bidisk"), default="disk")
    k.add_argument("--weight", default="zero")
    k.add_argument("--degree", type=int, default=16)
    k.add_argument("--kmax", type=int, default=6)

    ej = add("extend-jet", help="minimal-norm extension of a jet at the origin")
    ej.add_argument("--weight", default="zero")
    ej.add_argument("--degree", type=int, default=24)
    ej.add_argument("--jet", required=True, help="comma-separated a_0,a_1,...")
    ej.add_argument("--solver", choices=("direct", "recursive"), default="direct")

    ec = add("extend-cross", help="minimal-norm extension of cross data")
    ec.add_argument("--weight", default="zero:bidisk")
    ec.add_argument("--degree", type=int, default=12)
    ec.add_argument("--f1", default="0", help="coefficients of f1 on {z1=0}")
    ec.add_argument("--f2", default="0", help="coefficients of f2 on {z2=0}")

    c1 = add("claim1", help="jet-norm growth sweep over m")
    c1.add_argument("--m", default="1..8")
    c1.add_argument("--no-check", action="store_true")

    c2 = add("claim2", help="clamped-weight sweep over eps")
    c2.add_argument("--eps", default="0.4,0.2,0.1,0.05")
    c2.add_argument("--A", type=float, default=20.0)
    c2.add_argument("--m", type=float, default=4.0)
    c2.add_argument("--degree", type=int, default=24)
    c2.add_argument("--no-check", action="store_true")

    c34 = add("claim34", help="regularized diagonal-weight cross sweep")
    c34.add_argument("--eps", default="0.2,0.1,0.05,0.025")
    c34.add_argument("--degree", type=int, default=16)
    c34.add_argument("--style", choices=("convolution", "shifted"),
                     default="convolution")
    c34.add_argument("--no-check", action="store_true")

    lm = add("lemmas", help="kernel-inequality suite over a weight family")
    lm.add_argument("--family", default="default")
    lm.add_argument("--degree", type=int, default=24)
    lm.add_argument("--no-check", action="store_true")

    nm = add("norms", help="evaluate a norm functional")
    nm.add_argument("--kind", required=True,
                    choices=("log_weighted_bulk", "gamma_branch",
                             "derivative_on_Y", "final_example"))
    nm.add_argument("--gamma", type=float, default=0.0)
    nm.add_argument("--epsilon", type=float, default=None)
    nm.add_argument("--variant", choices=("theorem", "conjecture"),
                    default="theorem")
    nm.add_argument("--region", choices=("full", "exclude_sing"), default="full")
    nm.add_argument("--r-sing", type=float, default=0.1)
    nm.add_argument("--weight", default=None)
    nm.add_argument("--data", default="0,1",
                    help="1-D coefficients, or rows separated by ';' for bulk")
    return p, registry


def _apply_config(args, registry):
    """Fill config values in for every option still at its parser default
    (explicit CLI flags win over the config file)."""
    if not args.config:
        return args
    with open(args.config) as fh:
        doc = json.load(fh)
    if doc.get("schema", 1) != 1:
        raise ParameterError("unsupported config schema %r" % doc.get("schema"))
    sub = registry.get(args.command)
    merged = dict(doc.get("params", {}))
    merged.update({k: v for k, v in doc.items()
                   if k not in ("schema", "experiment", "params")})
    for key, val in merged.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            continue
        default = sub.get_default(attr) if sub else None
        if getattr(args, attr) == default:
            setattr(args, attr, val)
    return args


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _report_json(report, extra=None):
    doc = report.to_dict()
    doc.update(extra or {})
    return json.dumps(doc, indent=2, default=lambda x: float(np.real(x)))


def _run(args):
    cmd = args.command
    if cmd is None:
        raise ParameterError("no subcommand given")
    fmt = args.format

    if cmd == "kernel":
        w = parse_weight(args.weight)
        model = build_model(args.domain, w, args.degree)
        _emit(model_summary_json(model, args.kmax), args.out)
        return 0

    if cmd == "extend-jet":
        w = parse_weight(args.weight)
        model = build_model("disk", w, args.degree)
        jet = Jet(tuple(parse_complex_list(args.jet)))
        solver = extend_jet_direct if args.solver == "direct" else extend_jet_recursive
        rep = solver(model, jet)
        extra = {}
        if len(jet) == 2:
            extra["rhs_estimates"] = rhs_estimate_jet(model, jet)
        _emit(_report_json(rep, extra), args.out)
        return 0

    if cmd == "extend-cross":
        w = parse_weight(args.weight)
        model = build_model("bidisk", w, args.degree)
        data = CrossData(tuple(parse_complex_list(args.f1) or [0.0]),
                         tuple(parse_complex_list(args.f2) or [0.0]))
        rep = extend_cross(model, data)
        extra = {"rhs_estimate": rhs_estimate_cross(model, data)}
        _emit(_report_json(rep, extra), args.out)
        return 0

    if cmd in ("claim1", "claim2", "claim34", "lemmas"):
        check = not getattr(args, "no_check", False)
        if cmd == "claim1":
            res = sweeps.run_claim1(parse_grid(args.m), check_convergence=check)
        elif cmd == "claim2":
            res = sweeps.run_claim2(parse_grid(args.eps), A=args.A, m=args.m,
                                    degree=args.degree, check_convergence=check)
        elif cmd == "claim34":
            res = sweeps.run_claim34(parse_grid(args.eps), degree=args.degree,
                                     style=args.style, check_convergence=check)
        else:
            if args.family != "default":
                raise ParameterError("unknown weight family %r" % args.family)
            res = sweeps.run_lemma_suite(degree=args.degree,
                                         check_convergence=check)
        if args.out:
            res.write(args.out, fmt)
        else:
            print(res.to_json() if fmt == "json" else _rows_text(res))
        return 0

    if cmd == "norms":
        spec = NormSpec(kind=args.kind, gamma=args.gamma, epsilon=args.epsilon,
                        region=args.region, r_sing=args.r_sing,
                        variant=args.variant)
        weight = parse_weight(args.weight) if args.weight else None
        if args.kind == "log_weighted_bulk":
            data = np.array([parse_complex_list(row)
                             for row in args.data.split(";")], dtype=complex)
        elif args.kind == "derivative_on_Y":
            rows = args.data.split(";")
            if len(rows) != 2:
                raise ParameterError("derivative_on_Y data must be 'f1;f2'")
            data = CrossData(tuple(parse_complex_list(rows[0]) or [0.0]),
                             tuple(parse_complex_list(rows[1]) or [0.0]))
        else:
            data = parse_complex_list(args.data)
        val = evaluate_norm(spec, data, weight)
        doc = {"kind": args.kind, "value": float(val)}
        if hasattr(val, "growth_rate"):
            doc["divergent"] = True
            doc["growth_rate"] = val.growth_rate
        _emit(json.dumps(doc, indent=2), args.out)
        return 0

    raise ParameterError("unknown subcommand %r" % cmd)


def _rows_text(res):
    cols = res.columns
    lines = ["\t".join(cols)]
    for row in res.rows:
        lines.append("\t".join(str(row.get(c)) for c in cols))
    return "\n".join(lines)


def main(argv=None):
    parser, registry = _build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        # a config file may name the experiment; inject it as the subcommand
        if "--config" in argv and not any(a in registry for a in argv):
            with open(argv[argv.index("--config") + 1]) as fh:
                exp = json.load(fh).get("experiment")
            if exp in registry:
                argv.append(exp)
        args = parser.parse_args(argv)
        args = _apply_config(args, registry)
        return _run(args)
    except DegeneracyError as exc:
        msg = "degeneracy: %s" % exc
        if exc.offending_monomials:
            msg += " [monomials: %s]" % exc.offending_monomials
        print(msg, file=sys.stderr)
        return 2
    except ParameterError as exc:
        print("error: %s" % exc, file=sys.stderr)
        print("run 'bergext --help' for usage", file=sys.stderr)
        return 1
    except (BergextError, OSError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
