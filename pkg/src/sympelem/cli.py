"""Command-line front end.

Exit codes: 0 on success, 1 when a verification fails, 2 for usage or
parse problems. Reports are line-oriented on stdout; --out writes one
JSON record per item.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import errors as err
from .localglobal import CoverData, conj_decompose, dilate, normality_demo, patch
from .matrices import Matrix
from .rewrite import decompose_full
from .rings import Localized, PolyRing, parse_element, ring_from_descriptor
from .verify import run_verify_tables
from .words import Word, word_from_text

USAGE_ERRORS = (err.ParseError, err.EvenModulus, err.NilpotentS, err.ZeroDivisorS,
                err.BadIndices, err.AlphabetViolation, FileNotFoundError, ValueError)
VERIFY_ERRORS = (err.StepVerificationFailed, err.LocalWordMismatch, err.CoverNotComaximal,
                 err.NotHomotopy, err.StepBudgetExceeded, err.NoRuleFound,
                 err.NonZeroDet, err.NotE2Witnessed, err.ExponentTooSmall,
                 err.UnsupportedBlock, err.RowConditionFailed, err.DimensionMismatch)


def _parse_n_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_verify_tables(args):
    ring = ring_from_descriptor(args.ring)
    report = run_verify_tables(ring, _parse_n_range(args.n), seed=args.seed,
                               trials=args.trials, corrupt=args.corrupt,
                               out_stream=sys.stdout)
    if args.out:
        _write(args.out, report.to_jsonl())
    print(report.summary())
    return 0 if report.ok else 1


def cmd_decompose(args):
    ring = ring_from_descriptor(args.ring)
    word = word_from_text(ring, args.n, _read(args.infile))
    cert = decompose_full(word, fuel=args.fuel, route=args.route)
    ok = cert.verified and cert.output_word.eval() == word.eval()
    print(f"{'PASS' if ok else 'FAIL'} decompose {cert.summary()}")
    if args.out:
        _write(args.out, cert.output_word.to_text())
    if args.trace:
        lines = [f"{rule} {before} {after}" for rule, before, after in cert.trace]
        _write(args.trace, "\n".join(lines) + "\n")
    return 0 if ok else 1


def cmd_conj(args):
    base = ring_from_descriptor(args.ring)
    s = parse_element(base, args.s)
    loc = Localized(base, s)
    a = parse_element(base, args.a)
    x = parse_element(base, args.x)
    word, trace = conj_decompose(loc, args.n, args.xshape, args.i, a, args.k,
                                 args.yshape, args.j, args.m, x)
    print(f"PASS conj length={len(word)} min_exponent={trace.min_exponent()}")
    for (sh, pos, e, c) in trace.entries:
        print(f"  {sh}@{pos} exponent={e} coeff={base.show(c) if c is not None else '?'}")
    if args.out:
        _write(args.out, word.to_text())
    return 0


def cmd_dilate(args):
    base = ring_from_descriptor(args.ring)
    s = parse_element(base, args.s)
    loc = Localized(base, s)
    ring_sx = PolyRing(loc, (args.var,))
    word = word_from_text(ring_sx, args.n, _read(args.infile))
    m, out = dilate(base, s, args.n, word, fuel=args.fuel)
    print(f"PASS dilate m={m} output_atoms={len(out)}")
    if args.out:
        _write(args.out, out.to_text())
    return 0


def cmd_patch(args):
    base = ring_from_descriptor(args.ring)
    cover = CoverData.from_text(base, _read(args.cover))
    ring_x = PolyRing(base, (args.var,))
    alpha_word = word_from_text(ring_x, args.n, _read(args.alpha))
    alpha = alpha_word.eval()
    local_words = []
    for (entry, path) in zip(cover.entries, args.locals):
        loc = Localized(base, entry[0])
        ring_sx = PolyRing(loc, (args.var,))
        local_words.append(word_from_text(ring_sx, args.n, _read(path)))
    out = patch(base, args.n, alpha, cover, local_words, fuel=args.fuel)
    print(f"PASS patch output_atoms={len(out)}")
    if args.out:
        _write(args.out, out.to_text())
    return 0


def _gamma_word_from_file(base, n, text):
    """The conjugating element: a generator word file, or a matrix file
    whose matrix is a det-1 corner block (delta perp I)."""
    stripped = text.lstrip()
    if not stripped.startswith("sympmat"):
        return word_from_text(base, n, text)
    from .matrices import matrix_from_text
    from .words import CornerMatrixAtom
    m = matrix_from_text(stripped.splitlines()[0], base)
    ident = Matrix.identity(base, 2 * n)
    corner = m.submatrix(0, 0, 2, 2)
    probe = ident.paste(0, 0, corner)
    if probe != m or not base.is_one(corner.det2()):
        raise err.ParseError("matrix gamma must be a det-1 corner block "
                             "(use a generator word otherwise)")
    return Word(base, n, [CornerMatrixAtom(corner.rows)])


def cmd_normality(args):
    base = ring_from_descriptor(args.ring)
    cover = CoverData.from_text(base, _read(args.cover))
    gamma_word = _gamma_word_from_file(base, args.n, _read(args.gamma))
    h_word = word_from_text(base, args.n, _read(args.h))
    out = normality_demo(base, args.n, gamma_word, h_word, cover, fuel=args.fuel)
    print(f"PASS normality-demo output_atoms={len(out)}")
    if args.out:
        _write(args.out, out.to_text())
    return 0


def cmd_report(args):
    records = []
    for lineno, line in enumerate(_read(args.infile).splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise err.ParseError(str(exc), line=lineno) from None
    npass = sum(1 for r in records if r.get("status") == "PASS")
    for r in records:
        if r.get("status") != "PASS":
            print(f"FAIL {r.get('name')} ring={r.get('ring')} n={r.get('n')} "
                  f"bindings: {r.get('bindings', '')}")
    print(f"{npass}/{len(records)} items passed")
    return 0 if npass == len(records) else 1


def build_parser():
    top = argparse.ArgumentParser(prog="sympelem",
                                  description="exact verification and rewriting "
                                              "for elementary symplectic generators")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-tables", help="run every identity family")
    p.add_argument("--ring", required=True)
    p.add_argument("--n", default="2..3", help="block range, e.g. 2..3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--corrupt", default=None,
                   help="fault-injection key, e.g. commutator:AB:eq")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify_tables)

    p = sub.add_parser("decompose", help="rewrite a generator word into shapes")
    p.add_argument("--ring", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--trace", default=None)
    p.add_argument("--route", choices=("segmented", "staged"), default="segmented")
    p.add_argument("--fuel", type=int, default=10_000)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("conj", help="conjugation decomposition over a localization")
    p.add_argument("--ring", required=True, help="base ring descriptor")
    p.add_argument("--s", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xshape", required=True, choices=list("ABCD"))
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--yshape", required=True, choices=list("ABCD"))
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_conj)

    p = sub.add_parser("dilate", help="clear localization denominators of a homotopy")
    p.add_argument("--ring", required=True, help="base ring descriptor")
    p.add_argument("--s", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--var", default="X")
    p.add_argument("--fuel", type=int, default=64)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("patch", help="assemble a global homotopy from local words")
    p.add_argument("--ring", required=True, help="base ring descriptor")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--alpha", required=True, help="word file over R[X] defining alpha")
    p.add_argument("--locals", nargs="+", required=True)
    p.add_argument("--var", default="X")
    p.add_argument("--fuel", type=int, default=64)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_patch)

    p = sub.add_parser("normality-demo", help="conjugate a shape word by a symplectic element")
    p.add_argument("--ring", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", required=True, help="generator word file")
    p.add_argument("--h", required=True, help="shape word file")
    p.add_argument("--cover", required=True)
    p.add_argument("--fuel", type=int, default=64)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_normality)

    p = sub.add_parser("report", help="summarize a JSONL report file")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_report)

    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VERIFY_ERRORS as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
