"""Command-line front end: ``cusp-certify classify | ball | bounds | verify``.

Exit codes: 0 ok, 1 usage or parse error, 2 membership failure,
3 indeterminate classification, 4 ball cap exceeded, 5 oracle mismatch.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .bounds import BoundInputs, BoundsError, bound_report, format_text
from .hermitian import GroupElement, InvalidInput, MembershipError, matrix_from_json, matrix_to_json
from .isometry import IndeterminateClassification, classify, length_from_r
from .lattice import (
    DEFAULT_CAP, MAX_WORD_LENGTH, ONE_SIDED_NOTES, BallCapExceeded, census, load_lattice, word_ball,
)
from .verify import DEFAULT_SEED, SUITES, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MEMBERSHIP = 2
EXIT_INDETERMINATE = 3
EXIT_CAP = 4
EXIT_MISMATCH = 5

THREADS_ENV = "CUSP_CERTIFY_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; 2 is reserved for membership failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return "sha256:" + hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def make_certificate(command: str, parameters: dict, inputs, results: dict, flags: list[str],
                     **extra) -> dict:
    cert = {
        "toolVersion": __version__,
        "inputsDigest": digest(inputs),
        "command": command,
        "parameters": parameters,
        "results": results,
        "resultsDigest": digest(results),
        "oneSidednessFlags": flags,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    cert.update(extra)
    return cert


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    if not raw:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV}={raw!r} is not an integer")
    if k < 1:
        raise UsageError(f"{THREADS_ENV} must be >= 1")
    return k


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}")


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out and out != "-":
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_classify(args) -> int:
    doc = _read_json(args.file)
    rows = doc.get("matrix") if isinstance(doc, dict) else doc
    try:
        m = matrix_from_json(rows)
    except InvalidInput as exc:
        raise UsageError(str(exc))
    try:
        el = GroupElement.from_matrix(m, tol=args.membership_tol)
    except MembershipError as exc:
        print(f"not a member of U(Q): residual {exc.residual:.6e}", file=sys.stderr)
        return EXIT_MEMBERSHIP
    except InvalidInput as exc:
        raise UsageError(str(exc))
    try:
        cls = classify(el, args.tol)
    except IndeterminateClassification as exc:
        print(f"indeterminate: between {exc.candidates[0]} and {exc.candidates[1]}, margin {exc.margin:.3e}")
        return EXIT_INDETERMINATE
    line = f"{cls.kind}"
    if cls.kind == "hyperbolic":
        line += f" r={cls.r:.6f} theta={cls.theta:.6f} length={length_from_r(cls.r):.6f}"
    line += f" margin={cls.margin:.3e}"
    print(line)
    if args.cert:
        params = {"tol": args.tol, "membershipTol": args.membership_tol, "file": os.path.basename(args.file)}
        cert = make_certificate("classify", params, matrix_to_json(m), cls.to_json(), [],
                                residual=el.residual)
        _emit(cert, args.cert)
    return EXIT_OK


def cmd_ball(args) -> int:
    if not 1 <= args.length <= MAX_WORD_LENGTH:
        raise UsageError(f"--length must be between 1 and {MAX_WORD_LENGTH}")
    threads = args.threads if args.threads is not None else default_threads()
    if threads < 1:
        raise UsageError("--threads must be >= 1")
    doc = _read_json(args.file)
    try:
        spec = load_lattice(doc)
    except MembershipError as exc:
        print(f"{exc}", file=sys.stderr)
        return EXIT_MEMBERSHIP
    except InvalidInput as exc:
        raise UsageError(str(exc))
    resume = _read_json(args.resume) if args.resume else None
    if resume is not None:
        resume = resume.get("resumeToken", resume)
    params = {"length": args.length, "cap": args.cap, "dedupTol": spec.tolerances["dedup"],
              "tolerances": spec.tolerances}
    flags = sorted(ONE_SIDED_NOTES)
    try:
        ball = word_ball(spec, args.length, cap=args.cap, threads=threads, resume=resume)
    except BallCapExceeded as exc:
        partial = census(exc.partial, spec, threads=threads).to_json()
        cert = make_certificate("ball", params, doc, partial, flags, partial=True, resumeToken=exc.token)
        path = args.partial or ((args.out or "ball") + ".partial.json")
        _emit(cert, path)
        print(f"{exc}; partial result written to {path}", file=sys.stderr)
        return EXIT_CAP
    result = census(ball, spec, threads=threads).to_json()
    _emit(make_certificate("ball", params, doc, result, flags), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    try:
        inputs = BoundInputs(args.n, args.sys, args.m, args.s, args.sysD, args.field_degree, args.epsilon)
        rep = bound_report(inputs)
    except BoundsError as exc:
        raise UsageError(str(exc))
    if args.format == "text":
        print(format_text(rep))
        return EXIT_OK
    params = inputs.to_json()
    _emit(make_certificate("bounds", params, params, rep.to_json(), ["sysIsUserCertifiedLowerBound"]), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    threads = default_threads()
    res = run_suite(args.suite, seed=args.seed, threads=threads)
    print(res.table())
    if args.out:
        params = {"suite": args.suite, "seed": args.seed}
        _emit(make_certificate("verify", params, params, res.to_json(), []), args.out)
    if res.passed:
        return EXIT_OK
    path = Path(args.repro_dir) / f"repro-{args.suite}-seed{args.seed}.json"
    path.write_text(json.dumps(res.counterexample, indent=2) + "\n")
    print(f"counterexample in check {res.counterexample['check']!r} written to {path}", file=sys.stderr)
    return EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cusp-certify", description="Invariants and effective bounds for complex ball quotients.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="classify one matrix")
    c.add_argument("file")
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--membership-tol", type=float, default=1e-8)
    c.add_argument("--cert", help="write a certificate to this path ('-' for stdout)")
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("ball", help="enumerate a word ball and print its census")
    b.add_argument("file")
    b.add_argument("--length", type=int, required=True)
    b.add_argument("--threads", type=int, default=None, help=f"default from {THREADS_ENV}, else 1")
    b.add_argument("--cap", type=int, default=DEFAULT_CAP)
    b.add_argument("--out")
    b.add_argument("--partial", help="where to write the partial result if the cap is hit")
    b.add_argument("--resume", help="partial-result file to resume from")
    b.set_defaults(func=cmd_ball)

    d = sub.add_parser("bounds", help="evaluate the effective bounds for a certified systole")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--sys", type=float, required=True)
    d.add_argument("--m", type=int, default=1)
    d.add_argument("--s", type=int, default=1)
    d.add_argument("--sysD", type=float, default=None)
    d.add_argument("--field-degree", type=int, default=None)
    d.add_argument("--epsilon", type=float, default=None)
    d.add_argument("--format", choices=("json", "text"), default="json")
    d.add_argument("--out")
    d.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="run an oracle cross-check suite")
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--out")
    v.add_argument("--repro-dir", default=".")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cusp-certify {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
