"""Command-line front end.

    multicomm limit --diagram D.json [--out FILE]
    multicomm enumerate --functor {exp,G,lambda} --n N [--bound B] [--out FILE]
    multicomm certify --diagram D.json --functor F --seed S [--samples N] [--eps 1/10,1/100] [--out FILE]

Exit status: 0 pass, 1 certification failure, 2 usage, parse or validation
error. Every error path writes one JSON line to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .category import EmptyLimit, MalformedCategory, MalformedDiagram
from .certify import (
    DEFAULT_EPS,
    FUNCTORS,
    SCHEMA_VERSION,
    InapplicableFunctor,
    certify_composition,
    certify_open,
    certify_surjective,
    functor,
)
from .diagram_io import DiagramParseError, diagram_digest, load_diagram
from .hyperspace import ENUMERATION_BOUND, EnumerationTooLarge, G_space, exp_space, lambda_space
from .spaces import DimensionMismatch, FiniteSpace, Q, fmt, fmt_vec

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _diag(kind: str, message: str, **extra):
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse_eps(text: str) -> tuple:
    try:
        grid = tuple(Q(s.strip()) for s in text.split(",") if s.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"bad eps list {text!r}: {exc}") from None
    if not grid or any(e <= 0 for e in grid):
        raise UsageError("eps grid must be a nonempty list of strictly positive rationals")
    return grid


def cmd_limit(args) -> int:
    d = load_diagram(args.diagram)
    out = {"schema_version": SCHEMA_VERSION, "diagram_digest": diagram_digest(d),
           "objects": list(d.objects), "kind": d.kind}
    try:
        lim = d.limit()
    except EmptyLimit:
        out.update(empty=True, carrier=[])
        _emit(_dump(out), args.out)
        return EXIT_PASS
    out["empty"] = False
    if isinstance(lim.space, FiniteSpace):
        out["carrier"] = [[str(p) for p in t] for t in lim.space.points]
        out["size"] = len(lim.space)
    else:
        H = lim.hrep
        out["offsets"] = dict(lim.offsets)
        out["equalities"] = [{"a": fmt_vec(a), "b": fmt(b)} for a, b in H.equalities]
        out["inequalities"] = [{"a": fmt_vec(a), "b": fmt(b)} for a, b in H.inequalities]
        out["vertices"] = lim.space.to_json()
    _emit(_dump(out), args.out)
    return EXIT_PASS


def cmd_enumerate(args) -> int:
    name = args.functor
    if name not in ("exp", "G", "lambda"):
        raise UsageError("enumerate supports exp, G and lambda")
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    if name == "exp":
        items = exp_space(args.n)
        lines = [str(s) for s in items]
        listing = [[e + 1 for e in s.elements] for s in items]
    else:
        fn = G_space if name == "G" else lambda_space
        items = fn(args.n, args.bound)
        lines = [str(F) for F in items]
        listing = [[[e + 1 for e in _bits(g)] for g in F.generators] for F in items]
    if args.out:
        Path(args.out).write_text(_dump({"schema_version": SCHEMA_VERSION, "functor": name, "n": args.n,
                                         "count": len(items), "families": listing}))
    sys.stdout.write("".join(line + "\n" for line in lines) + f"# count={len(items)}\n")
    return EXIT_PASS


def _bits(mask: int) -> list:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def cmd_certify(args) -> int:
    if args.seed is None:
        raise UsageError("certify needs --seed")
    if args.samples is not None and args.samples < 1:
        raise UsageError("--samples must be positive")
    F = functor(args.functor)
    eps = parse_eps(args.eps) if args.eps else DEFAULT_EPS
    d = load_diagram(args.diagram)
    d.limit()
    samples = args.samples or 20
    out = {"schema_version": SCHEMA_VERSION, "functor": F.name, "diagram_digest": diagram_digest(d),
           "seed": args.seed, "samples": samples}
    surj = certify_surjective(F, d, budget=samples, seed=args.seed, bound=args.bound)
    opn = certify_open(F, d, eps_grid=eps, samples=samples, seed=args.seed)
    out["surjectivity"] = surj.to_json()
    out["openness"] = opn.to_json()
    ok = surj.ok and opn.ok
    if F.kind == "composite":
        comp = certify_composition(F, d, samples=samples, seed=args.seed)
        out["composition"] = comp.to_json()
        ok = ok and comp.ok
    out["status"] = "pass" if ok else "fail"
    _emit(_dump(out), args.out)
    if not ok:
        _diag("CertificationFailed", f"{F.name} failed certification", misses=len(surj.misses),
              openness=out["openness"]["status"])
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="multicomm", description="Limits, hyperspace enumeration and functor certification.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    lim = sub.add_parser("limit", help="compute the limit of a diagram file")
    lim.add_argument("--diagram", required=True)
    lim.add_argument("--out")
    en = sub.add_parser("enumerate", help="list exp, G or lambda of an n-point space")
    en.add_argument("--functor", required=True)
    en.add_argument("--n", type=int)
    en.add_argument("--bound", type=int, default=ENUMERATION_BOUND)
    en.add_argument("--out")
    ce = sub.add_parser("certify", help="certify surjectivity and openness of a characteristic map")
    ce.add_argument("--diagram", required=True)
    ce.add_argument("--functor", required=True, choices=sorted(FUNCTORS))
    ce.add_argument("--seed", type=int)
    ce.add_argument("--samples", type=int)
    ce.add_argument("--eps")
    ce.add_argument("--bound", type=int, default=ENUMERATION_BOUND)
    ce.add_argument("--out")
    return p


_INPUT_ERRORS = (DiagramParseError, MalformedCategory, MalformedDiagram, EnumerationTooLarge,
                 InapplicableFunctor, EmptyLimit, DimensionMismatch, FileNotFoundError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: limit, enumerate or certify")
        return {"limit": cmd_limit, "enumerate": cmd_enumerate, "certify": cmd_certify}[args.command](args)
    except UsageError as exc:
        _diag("UsageError", str(exc))
    except MalformedCategory as exc:
        _diag("MalformedCategory", str(exc), law=exc.law, witness=str(exc.witness))
    except _INPUT_ERRORS as exc:
        _diag(type(exc).__name__, str(exc))
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
