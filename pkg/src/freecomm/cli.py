"""Command-line front end.

Every command prints one JSON document (or CSV with a header row) of the form::

    {"command": [...], "inputs": {...}, "defaults": {...},
     "results": {...}, "timing": {"seconds": ...}, "version": "..."}

Exact values are rendered in the canonical text forms of :mod:`exactalg`.
Exit codes: 0 success, 2 malformed input, 3 resource bound exceeded.
Verdicts such as an FID ``FAIL`` are payload data and still exit 0.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from .errors import ResourceBoundError
from .exactalg import DEFAULT_ORDER, I, ExactMatrix, GaussianRational, fmt, parse_entry
from .freecalc import (
    CumulantSpec,
    FreeFamily,
    NCPolynomial,
    cumulants_of_polynomial,
    fid_hankel_check,
    mixed_moment,
    moment_cumulant_convert,
    poly_cumulant,
)
from .ncpart import (
    BOUND_ENV,
    SetPartition,
    enumerate_nc,
    enumeration_bound,
    join_is_full,
    kreweras,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BOUND = 3


def _version():
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "0.1.0"


# ---------------------------------------------------------------------------
# input parsing


def parse_matrix(text):
    """Matrix from inline JSON, a JSON file, or the shorthand ``commutator:n``."""
    text = text.strip()
    m = re.fullmatch(r"commutator:(\d+)", text)
    if m:
        return ExactMatrix.commutator_matrix(int(m.group(1)))
    if not text.startswith("["):
        path = Path(text)
        if not path.exists():
            raise ValueError(f"matrix is neither inline JSON nor an existing file: {text!r}")
        text = path.read_text()
    rows = json.loads(text)
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValueError("matrix must be a non-empty list of rows")
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square")
    return ExactMatrix([[parse_entry(str(x)) for x in r] for r in rows])


def parse_family(text):
    """``"X=0,1;Y=semi;Z=sym"``: cumulant lists (rest zero), ``semi``, ``sym``, ``sym-even``."""
    specs = []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        if "=" not in part:
            raise ValueError(f"family member needs NAME=VALUES: {part!r}")
        name, vals = (s.strip() for s in part.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_]\w*", name) or name == "I":
            raise ValueError(f"bad variable name {name!r}")
        if vals == "semi":
            specs.append(CumulantSpec.semicircular(name))
        elif vals == "sym":
            specs.append(CumulantSpec.symbolic(name))
        elif vals == "sym-even":
            specs.append(CumulantSpec.symbolic(name, even_only=True))
        else:
            kappa = [parse_entry(v) for v in vals.split(",") if v.strip()]
            specs.append(CumulantSpec(name, kappa))
    if not specs:
        raise ValueError("empty family")
    return FreeFamily(specs)


def parse_sequence(text):
    return [parse_entry(v) for v in text.split(",") if v.strip()]


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_]\w*)|(.))")


class _PolyParser:
    """Recursive descent for ``expr := term (+|- term)*``, ``term := factor (*? factor)*``,
    ``factor := number | I | name | (expr) | [expr, expr] | -factor``."""

    def __init__(self, text):
        self.tokens = []
        for m in _TOKEN.finditer(text):
            num, name, other = m.groups()
            if num:
                self.tokens.append(("num", num))
            elif name:
                self.tokens.append(("name", name))
            elif other and not other.isspace():
                self.tokens.append(("op", other))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if op is not None and tok != ("op", op):
            raise ValueError(f"expected {op!r} in polynomial, got {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self):
        out = self.expr()
        if self.pos != len(self.tokens):
            raise ValueError(f"unexpected {self.peek()[1]!r} in polynomial")
        return out

    def expr(self):
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            sign = self.take()[1]
            t = self.term()
            out = out + t if sign == "+" else out - t
        return out

    def term(self):
        out = self.factor()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
            elif not (tok[0] in ("num", "name") or tok in (("op", "("), ("op", "["))):
                return out
            out = out * self.factor()

    def factor(self):
        kind, val = self.take()
        if kind == "num":
            return NCPolynomial([(Fraction(val), ())])
        if kind == "name":
            if val == "I":
                return NCPolynomial([(I, ())])
            return NCPolynomial.word(val)
        if val == "-":
            return -self.factor()
        if val == "(":
            out = self.expr()
            self.take(")")
            return out
        if val == "[":
            a = self.expr()
            self.take(",")
            b = self.expr()
            self.take("]")
            return a * b - b * a
        raise ValueError(f"unexpected {val!r} in polynomial")


def parse_polynomial(text):
    P = _PolyParser(text).parse()
    if not P.terms:
        raise ValueError("polynomial is zero")
    return P


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ValueError(f"--{name.replace('_', '-')} is required")


# ---------------------------------------------------------------------------
# command handlers: each returns (inputs, defaults, results)


def cmd_nc(args):
    if args.action in ("count", "enumerate"):
        _require(args, "n")
    n = args.n
    inputs = {"n": n}
    defaults = {"enumeration_bound": enumeration_bound(), "bound_env": BOUND_ENV}
    if args.action == "count":
        count = sum(1 for _ in enumerate_nc(n, args.filter))
        return inputs | {"filter": args.filter}, defaults, {"count": count}
    if args.action == "enumerate":
        rows = [{"index": i, "partition": str(p), "blocks": len(p.blocks)}
                for i, p in enumerate(enumerate_nc(n, args.filter))]
        return inputs | {"filter": args.filter}, defaults, {"count": len(rows), "rows": rows}
    if args.action == "kreweras":
        _require(args, "partition")
        p = SetPartition.parse(args.partition, n)
        left, right = kreweras(p, "left"), kreweras(p, "right")
        return (inputs | {"partition": str(p)}, defaults,
                {"right": str(right), "left": str(left),
                 "mutually_inverse": kreweras(right, "left") == p})
    if args.action == "join":
        _require(args, "partition", "other")
        p = SetPartition.parse(args.partition, n)
        q = SetPartition.parse(args.other, n)
        return (inputs | {"partition": str(p), "other": str(q)}, defaults,
                {"join_is_full": join_is_full(p, q)})
    raise ValueError(f"unknown nc action {args.action!r}")


def cmd_involution(args):
    from .involution import classify, psi, sigma_of, validate_involution

    if args.action == "validate":
        _require(args, "n")
        cert = validate_involution(args.n, cache_dir=args.cache_dir)
        results = {"summary": cert.summary()}
        if args.out_certificate:
            cert.save(args.out_certificate)
            results["certificate"] = args.out_certificate
        return {"n": args.n}, {"cache_dir": args.cache_dir}, results
    _require(args, "partition")
    p = SetPartition.parse(args.partition, args.n)
    tag, data = classify(p)
    results = {"type": tag, "pivot_brace": list(data.pivot_brace),
               "leftmost_inner_odd_block": list(data.leftmost)}
    if args.action == "psi":
        results["sigma"] = list(sigma_of(p).images)
        results["partner"] = str(psi(p))
    elif args.action != "classify":
        raise ValueError(f"unknown involution action {args.action!r}")
    return {"partition": str(p)}, {}, results


def cmd_cumulant(args):
    order = args.order
    defaults = {"order": DEFAULT_ORDER}
    if args.action == "convert":
        _require(args, "seq")
        seq = parse_sequence(args.seq)
        if args.direction == "k2m" and order and order > len(seq):
            # unlisted cumulants are zero
            seq = seq + [0] * (order - len(seq))
        direction = {"k2m": "moments_from_cumulants", "m2k": "cumulants_from_moments"}[args.direction]
        out = moment_cumulant_convert(seq, direction, order)
        rows = [{"k": k, "input": fmt(a), "output": fmt(b)}
                for k, (a, b) in enumerate(zip(seq + [None] * len(out), out), 1)]
        return ({"seq": [fmt(x) for x in seq], "direction": args.direction, "order": order},
                defaults, {"values": [fmt(x) for x in out], "rows": rows})
    _require(args, "family")
    fam = parse_family(args.family)
    if args.action == "word":
        _require(args, "word")
        word = tuple(w for w in re.split(r"[\s,*]+", args.word) if w)
        return ({"word": list(word), "family": args.family}, {},
                {"moment": fmt(mixed_moment(word, fam))})
    if args.action == "poly":
        _require(args, "poly", "r")
        P = parse_polynomial(args.poly)
        inputs = {"poly": args.poly, "family": args.family, "r": args.r, "route": args.route}
        if args.route == "expansion":
            vals = [fmt(poly_cumulant(P, fam, args.r))]
        else:
            vals = [fmt(x) for x in cumulants_of_polynomial(P, fam, args.r)][-1:]
        return (inputs, {"enumeration_bound": enumeration_bound()},
                {f"K{args.r}": vals[0], "selfadjoint": P.is_selfadjoint()})
    raise ValueError(f"unknown cumulant action {args.action!r}")


def cmd_quadform(args):
    from .quadform import (
        QuadraticForm,
        hadamard_representation,
        quad_cumulants,
        strong_cancellation_check,
        t2_commutator_table,
    )

    if args.action == "t2-table":
        order = args.order or 8
        table = t2_commutator_table(order)
        return {"order": order}, {"order": 8}, {"table": table.to_dict()}
    if args.action == "cancel-check":
        A = parse_matrix(args.matrix) if args.matrix else None
        if A is None:
            _require(args, "n")
        r = args.r or 2
        rep = strong_cancellation_check(A=A, n=args.n, r=r)
        return ({"matrix": A.to_strings() if A else f"symbolic skew {args.n}x{args.n}", "r": r},
                {"r": 2, "use_certificate": True}, rep.to_dict())
    _require(args, "matrix")
    A = parse_matrix(args.matrix)
    fam = parse_family(args.family) if args.family else FreeFamily(
        [CumulantSpec.semicircular(f"X{i}") for i in range(1, A.n + 1)])
    Q = QuadraticForm(A, fam)
    order = args.order or 6
    inputs = {"matrix": A.to_strings(), "family": args.family or "standard semicircular",
              "order": order}
    if args.action == "cumulants":
        rows = [{"r": r, "K": fmt(quad_cumulants(Q, r, args.mode))} for r in range(1, order + 1)]
        return inputs | {"mode": args.mode}, {"order": 6, "mode": "general"}, {"rows": rows}
    if args.action == "hadamard":
        vals = hadamard_representation(Q, order)
        return inputs, {"order": 6}, {"rows": [{"r": r, "K": fmt(v)} for r, v in enumerate(vals, 1)]}
    raise ValueError(f"unknown quadform action {args.action!r}")


def cmd_fid(args):
    _require(args, "seq")
    depth = args.depth or 4
    kappa = parse_sequence(args.seq)
    rep = fid_hankel_check(kappa, depth)
    return {"seq": [fmt(x) for x in kappa], "depth": depth}, {"depth": 4}, rep.to_dict()


def cmd_law(args):
    from .laws import gen_tetilla, semicircle_law, skew_law_decompose, tetilla_law

    order = args.order or 10
    if args.action == "decompose":
        _require(args, "matrix")
        A = parse_matrix(args.matrix)
        dec = skew_law_decompose(A, rmax=order)
        return {"matrix": A.to_strings(), "order": order}, {"order": 10}, dec.to_dict()
    if args.action == "semicircle":
        law = semicircle_law(order)
    elif args.action == "tetilla":
        law = tetilla_law(order)
    elif args.action == "gen-tetilla":
        _require(args, "n")
        law, report = gen_tetilla(args.n, order)
    else:
        raise ValueError(f"unknown law action {args.action!r}")
    results = law.to_dict()
    moments = law.moments(order)
    results["rows"] = [{"k": k, "cumulant": fmt(c), "moment": fmt(m)}
                       for k, (c, m) in enumerate(zip(law.kappa, moments), 1)]
    if args.action == "gen-tetilla":
        results["routes"] = report
    if law.density is not None:
        results["mass"] = law.integrate(0)
    return {"n": args.n, "order": order}, {"order": 10}, results


def cmd_rmt(args):
    from .laws import LawSpec
    from .quadform import QuadraticForm, quad_cumulants
    from .rmt import MatrixModel, compare_with_prediction

    _require(args, "matrix")
    A = parse_matrix(args.matrix)
    rmax = args.order or 6
    N = args.N or 500
    trials = args.trials or 20
    seed = args.seed if args.seed is not None else 0
    fam = FreeFamily([CumulantSpec.semicircular(f"X{i}") for i in range(1, A.n + 1)])
    Q = QuadraticForm(A, fam)
    kappa = [quad_cumulants(Q, r, "semicircular") for r in range(1, rmax + 1)]
    law = LawSpec("free semicircular prediction", kappa)
    rep = compare_with_prediction(MatrixModel(N, A, seed), law, rmax, trials, args.z)
    rep["rows"] = rep.pop("orders")
    return ({"matrix": A.to_strings(), "N": N, "trials": trials, "seed": seed, "order": rmax},
            {"N": 500, "trials": 20, "seed": 0, "order": 6, "z_threshold": 4.0}, rep)


HANDLERS = {
    "nc": cmd_nc,
    "involution": cmd_involution,
    "cumulant": cmd_cumulant,
    "quadform": cmd_quadform,
    "fid": cmd_fid,
    "law": cmd_law,
    "rmt": cmd_rmt,
}

ACTIONS = {
    "nc": ["enumerate", "count", "kreweras", "join"],
    "involution": ["classify", "psi", "validate"],
    "cumulant": ["convert", "word", "poly"],
    "quadform": ["cumulants", "t2-table", "cancel-check", "hadamard"],
    "fid": ["hankel"],
    "law": ["semicircle", "tetilla", "gen-tetilla", "decompose"],
    "rmt": ["compare"],
}


def _common(p):
    p.add_argument("--order", type=int, help="truncation order / number of cumulants")
    p.add_argument("--n", type=int, help="size parameter")
    p.add_argument("--depth", type=int, help="Hankel depth")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--matrix", help="inline JSON, a JSON file, or commutator:n")
    p.add_argument("--out", help="write output to this path instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="freecomm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, actions in ACTIONS.items():
        p = sub.add_parser(cmd)
        p.add_argument("action", choices=actions)
        _common(p)
        if cmd in ("nc", "involution"):
            p.add_argument("--partition", help="e.g. '{(1,2),(3)}' or '1,1,2'")
        if cmd == "nc":
            p.add_argument("--other", help="second partition for join")
            p.add_argument("--filter", choices=["all", "even", "pairings"], default="all")
        if cmd == "involution":
            p.add_argument("--cache-dir")
            p.add_argument("--out-certificate", help="save the full certificate as JSON")
        if cmd in ("cumulant", "quadform"):
            p.add_argument("--family", help="e.g. 'X=semi;Y=0,1;Z=sym'")
        if cmd in ("cumulant", "fid"):
            p.add_argument("--seq", help="comma separated exact values, order 1 first")
        if cmd == "cumulant":
            p.add_argument("--direction", choices=["m2k", "k2m"], default="k2m")
            p.add_argument("--word", help="e.g. 'X Y X Y'")
            p.add_argument("--poly", help="e.g. 'I*[X,Y]' or '[X,Y]*Z*[X,Y]'")
            p.add_argument("--route", choices=["expansion", "moments"], default="expansion")
        if cmd in ("cumulant", "quadform"):
            p.add_argument("--r", type=int, help="cumulant order")
        if cmd == "quadform":
            p.add_argument("--mode", choices=["general", "even_family", "iid_even", "semicircular"],
                           default="general")
        if cmd == "rmt":
            p.add_argument("--N", type=int, help="matrix size")
            p.add_argument("--z", type=float, default=4.0, help="z-score threshold")
    return parser


def run(argv):
    """Parse ``argv`` and return the CommandResult dictionary."""
    return dispatch(build_parser().parse_args(argv))


def dispatch(args):
    start = time.perf_counter()
    inputs, defaults, results = HANDLERS[args.command](args)
    return {
        "command": [args.command, args.action],
        "inputs": inputs,
        "defaults": defaults,
        "results": results,
        "timing": {"seconds": round(time.perf_counter() - start, 6)},
        "version": _version(),
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (Fraction, GaussianRational)):
        return fmt(x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def to_csv(result):
    """Tabular results as rows; everything else as key,value pairs."""
    buf = io.StringIO()
    res = result["results"]
    rows = res.get("rows") if isinstance(res, dict) else None
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(_jsonable(rows))
    else:
        w = csv.writer(buf)
        w.writerow(["key", "value"])
        for k, v in res.items():
            w.writerow([k, v if isinstance(v, (str, int, float)) else json.dumps(_jsonable(v))])
    return buf.getvalue()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    try:
        result = dispatch(args)
    except ResourceBoundError as e:
        print(f"freecomm: resource bound: {e}", file=sys.stderr)
        return EXIT_BOUND
    except (ValueError, KeyError, json.JSONDecodeError, OSError) as e:
        print(f"freecomm: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    text = to_csv(result) if args.format == "csv" else json.dumps(_jsonable(result), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
