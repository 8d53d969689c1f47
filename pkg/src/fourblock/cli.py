"""Command-line front end: classify, generate, verify, catalog, det, rank.

All interchange is JSON with matrices as row-major flat arrays of 16 reals.
Numbers are printed with 17 significant digits so documents round-trip
exactly.  Exit codes: 0 success / all checks pass, 1 verification failure,
2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from . import classifier, families, verifier
from .core import FourVector, det_direct, det_paper, matrix_to_params, \
    numerical_rank, params_to_matrix

__all__ = ["main"]


class _CliError(Exception):
    pass


def _dumps(value, indent: int = 0) -> str:
    '''JSON with floats at 17 significant digits; keys keep insertion order.'''
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(key))}: {_dumps(v, indent + 1)}"
            for key, v in value.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        seq = list(value)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in seq)
        if flat:
            return "[" + ", ".join(_dumps(v) for v in seq) + "]"
        items = ",\n".join(f"{inner}{_dumps(v, indent + 1)}" for v in seq)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not math.isfinite(value):
            raise _CliError(f"cannot serialize non-finite number {value!r}")
        return format(value, ".17g")
    if value is None or isinstance(value, (int, str)):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _print_json(doc) -> None:
    sys.stdout.write(_dumps(doc) + "\n")


def _read_matrix_document(path: str) -> np.ndarray:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise _CliError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(doc, dict) or "g" not in doc:
        raise _CliError('matrix document must be an object with a "g" array')
    entries = doc["g"]
    if not isinstance(entries, list):
        raise _CliError('"g" must be an array of numbers')
    if len(entries) != 16:
        raise _CliError(f"expected 16 matrix entries, got {len(entries)}")
    values = []
    for e in entries:
        if isinstance(e, bool) or not isinstance(e, (int, float)) or not math.isfinite(e):
            raise _CliError(f"matrix entries must be finite numbers, got {e!r}")
        values.append(float(e))
    return np.array(values).reshape(4, 4)


def _params_dict(p) -> dict:
    return {
        "k": list(p.k.as_array()),
        "m": list(p.m.as_array()),
        "l": list(p.l.as_array()),
        "n": list(p.n.as_array()),
    }


def _cmd_classify(args) -> int:
    g = _read_matrix_document(args.input)
    if args.tol <= 0.0:
        raise _CliError(f"--tol must be positive, got {args.tol}")
    report = classifier.classify(g, tol=args.tol)
    _print_json(classifier.report_to_dict(report))
    return 0


_SCALAR_FLAGS = ("A", "B", "C", "D", "alpha", "beta", "s", "t")
_BLOCK_FLAGS = ("K", "M", "N", "L")
_BLOCK_SYMBOL = {"K": "k", "M": "m", "N": "n", "L": "l"}


def _parse_block(text: str) -> FourVector:
    if text == "identity":
        return FourVector(1.0, 0.0, 0.0, 0.0)
    if text == "zero":
        return FourVector()
    parts = text.split(",")
    if len(parts) != 4:
        raise _CliError(
            f"block value must be 'identity', 'zero', or four comma-separated "
            f"numbers, got {text!r}")
    try:
        return FourVector.from_array(float(p) for p in parts)
    except ValueError:
        raise _CliError(f"block value has non-numeric entries: {text!r}") from None


def _cmd_generate(args) -> int:
    fid = args.family
    if fid not in families.FAMILY_IDS:
        raise _CliError(
            f"unknown family {fid!r}; valid ids: {', '.join(families.FAMILY_IDS)}")
    desc = families.descriptor(fid)
    rng = np.random.default_rng(args.seed)
    given_scalars = {name: getattr(args, name) for name in _SCALAR_FLAGS
                     if getattr(args, name) is not None}
    given_blocks = {name: getattr(args, name) for name in _BLOCK_FLAGS
                    if getattr(args, name) is not None}
    if fid.startswith("R3_"):
        if given_scalars or given_blocks:
            raise _CliError(f"family {fid} takes no scalar or block flags")
        params, member = families.random_member(fid, rng)
        scalars = {}
    else:
        unknown = set(given_scalars) - set(desc.free_scalars)
        if unknown:
            raise _CliError(
                f"family {fid} takes scalars {list(desc.free_scalars)}, "
                f"extra flags: {sorted(unknown)}")
        bad_blocks = {name for name in given_blocks
                      if _BLOCK_SYMBOL[name] not in desc.free_blocks}
        if bad_blocks:
            raise _CliError(
                f"family {fid} has free blocks {list(desc.free_blocks)}, "
                f"extra flags: {sorted(bad_blocks)}")
        scalars = families.random_scalars(fid, rng)
        scalars.update(given_scalars)
        blocks = {sym: FourVector.from_array(rng.uniform(-2.0, 2.0, 4))
                  for sym in desc.free_blocks}
        for name, text in given_blocks.items():
            blocks[_BLOCK_SYMBOL[name]] = _parse_block(text)
        params = families.FamilyParams(scalars=scalars, blocks=blocks)
        try:
            member = families.construct(fid, params)
        except ValueError as exc:
            raise _CliError(str(exc)) from None
    doc = {
        "family": fid,
        "scalars": scalars,
        "params": _params_dict(member),
        "g": list(params_to_matrix(member).ravel()),
    }
    _print_json(doc)
    return 0


def _cmd_verify(args) -> int:
    if args.samples < 1:
        raise _CliError(f"--samples must be >= 1, got {args.samples}")
    if args.all:
        checks = verifier.verify_all(samples=args.samples, tol=args.tol,
                                     seed=args.seed)
    else:
        if args.variant is None:
            raise _CliError("choose --variant <tag> or --all")
        if args.variant not in verifier.VARIANT_TAGS:
            raise _CliError(
                f"unknown ansatz variant {args.variant!r}; valid tags: "
                f"{', '.join(verifier.VARIANT_TAGS)}")
        checks = verifier.verify_solution_table(
            args.variant, samples=args.samples, tol=args.tol, seed=args.seed)
    all_pass = all(c.verdict == "pass" for c in checks)
    doc = {
        "samples": args.samples,
        "tol": args.tol,
        "seed": args.seed,
        "all_pass": all_pass,
        "checks": [
            {
                "variant": c.variant,
                "family": c.family,
                "samples": c.samples,
                "max_residual": c.max_residual,
                "verdict": c.verdict,
            }
            for c in checks
        ],
    }
    _print_json(doc)
    sys.stderr.write(verifier.summary_table(checks) + "\n")
    return 0 if all_pass else 1


def _cmd_catalog(_args) -> int:
    _print_json([desc.as_dict() for desc in families.catalog()])
    return 0


def _cmd_det(args) -> int:
    g = _read_matrix_document(args.input)
    _print_json({
        "det_direct": det_direct(g),
        "det_paper": det_paper(matrix_to_params(g)),
    })
    return 0


def _cmd_rank(args) -> int:
    g = _read_matrix_document(args.input)
    if args.tol <= 0.0:
        raise _CliError(f"--tol must be positive, got {args.tol}")
    _print_json({"rank": numerical_rank(g, tol=args.tol)})
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fourblock",
        description="Degenerate 4x4 matrix families: classify, generate, verify.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a matrix document against the catalog")
    p.add_argument("input", help="path to a JSON matrix document, or - for stdin")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("generate", help="generate a random family member")
    p.add_argument("--family", required=True)
    p.add_argument("--seed", type=int, default=0)
    for name in _SCALAR_FLAGS:
        p.add_argument(f"--{name}", type=float, default=None)
    for name in _BLOCK_FLAGS:
        p.add_argument(f"--{name}", default=None, metavar="BLOCK",
                       help=f"override block {name}: identity, zero, or a0,a1,a2im,a3")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("verify", help="verify the ansatz solution tables")
    p.add_argument("--variant", default=None)
    p.add_argument("--all", action="store_true")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("catalog", help="print the 60-family catalog as JSON")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("det", help="determinant of a matrix document")
    p.add_argument("input", help="path to a JSON matrix document, or - for stdin")
    p.set_defaults(func=_cmd_det)

    p = sub.add_parser("rank", help="numerical rank of a matrix document")
    p.add_argument("input", help="path to a JSON matrix document, or - for stdin")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_rank)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except _CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
