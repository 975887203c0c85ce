"""Command-line front end producing deterministic JSON reports.

Every command re-run on identical input yields byte-identical output:
keys are sorted, collections are deterministically ordered, and reports
carry no timestamps.  Reports embed a sha256 digest of each input so
golden files detect drift.  Exit codes: 0 success, 2 parse or usage
errors, 3 semantic validation failures; errors are emitted as a single
JSON object on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from typing import Optional

from . import __version__
from .complex_core import (
    ComplexError,
    DeltaComplex,
    connected_components,
    euler_characteristic,
    f_vector,
    from_json,
    subcomplex,
    to_json,
)
from .homology import homology
from .pseudo_manifold import (
    CLOSED_PSEUDO_MANIFOLD,
    classify,
    coregularity_zero_check,
    index_of_pair,
    is_orientable,
)
from .group_actions import (
    NotRegularActionError,
    orientation_character,
    orientation_double_cover,
    quotient,
    action_from_json,
    validate_action,
)
from .constructors import hyperoctahedron, rp2, simplex_boundary, suspension
from .coeff_arith import (
    BoundTooSmallError,
    NoSolutionFoundError,
    adjunction_bound,
    dlambda_enumerate,
    dlambda_member,
    geq_half_classification,
    p1_solutions,
    parse_rational,
    weil_index,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3


class CliError(Exception):
    def __init__(self, name: str, detail: str, exit_code: int):
        super().__init__(detail)
        self.name = name
        self.detail = detail
        self.exit_code = exit_code


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # route usage problems through the JSON error channel instead of exiting
    def error(self, message):
        raise _UsageError(message)


def _read_input(path: Optional[str]) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise CliError("InputNotFound", f"cannot read {path!r}: {e}", EXIT_PARSE) from None


def _load_complex(raw: bytes) -> DeltaComplex:
    try:
        return from_json(raw.decode("utf-8"))
    except ComplexError:
        raise
    except (ValueError, UnicodeDecodeError) as e:
        raise CliError("ParseError", str(e), EXIT_PARSE) from None


def _digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as e:
        raise CliError("BadRational", str(e), EXIT_PARSE) from None


def _report(args, inputs: dict, results: dict) -> dict:
    return {
        "command": args.command_echo,
        "deterministic": True,
        "inputs": inputs,
        "results": results,
        "tool": {"name": "deltaplex", "version": __version__},
    }


def _emit(args, report: dict) -> str:
    if args.output == "text":
        lines: list[str] = []
        _flatten("", report["results"], lines)
        return "\n".join(lines) + "\n"
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _flatten(prefix: str, value, lines: list[str]) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}{k}.", value[k], lines)
        return
    if isinstance(value, list):
        lines.append(f"{prefix.rstrip('.')} = {json.dumps(value, sort_keys=True)}")
        return
    lines.append(f"{prefix.rstrip('.')} = {json.dumps(value)}")


def _homology_table(x: DeltaComplex) -> dict:
    table: dict = {"Z": [], "Q": []}
    for k in range(x.dimension + 1):
        hz = homology(x, k, "Z")
        table["Z"].append({"k": k, "free_rank": hz.free_rank, "torsion": list(hz.torsion)})
        table["Q"].append({"k": k, "betti": homology(x, k, "Q").free_rank})
    return table


# ---------------------------------------------------------------------------
# subcommands


def cmd_construct(args) -> str:
    name = args.name
    if name in ("hyperoctahedron", "simplex-boundary"):
        if args.param is None:
            raise CliError("BadParams", f"{name} needs an integer parameter", EXIT_PARSE)
        try:
            size = int(args.param)
        except ValueError:
            raise CliError("BadParams", f"not an integer: {args.param!r}", EXIT_PARSE) from None
        builder = hyperoctahedron if name == "hyperoctahedron" else simplex_boundary
        try:
            x = builder(size)
        except ValueError as e:
            raise CliError("BadParams", str(e), EXIT_PARSE) from None
        params = [str(size)]
    elif name == "rp2":
        if args.param is not None:
            raise CliError("BadParams", "rp2 takes no parameter", EXIT_PARSE)
        x = rp2()
        params = []
    elif name == "suspension":
        raw = _read_input(args.param)
        x = suspension(_load_complex(raw))
        params = [args.param or "-"]
    else:
        raise CliError("UnknownConstructor", f"no constructor named {name!r}", EXIT_PARSE)
    meta = {"constructor": name, "params": params, "f_vector": list(f_vector(x))}
    return to_json(x, meta=meta)


def cmd_classify(args) -> str:
    raw = _read_input(args.input)
    x = _load_complex(raw)
    cls = classify(x)
    closed = cls.verdict == CLOSED_PSEUDO_MANIFOLD
    results = {
        "verdict": cls.verdict,
        "dimension": cls.dimension,
        "f_vector": list(f_vector(x)),
        "euler_characteristic": euler_characteristic(x),
        "boundary_cells": sorted(cls.boundary_cells),
        "homology": _homology_table(x),
        "orientable": is_orientable(x) if closed else None,
        "index": index_of_pair(x) if closed else None,
    }
    if args.ambient_dim is not None:
        results["ambient_dim"] = args.ambient_dim
        results["coregularity_zero"] = coregularity_zero_check(x, args.ambient_dim)
    return _emit(args, _report(args, {"complex": {"sha256": _digest(raw)}}, results))


def _load_action(args, x: DeltaComplex):
    raw = _read_input(args.action)
    try:
        action = action_from_json(x, raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as e:
        raise CliError("ParseError", str(e), EXIT_PARSE) from None
    report = validate_action(x, action)
    if not report.ok:
        first = report.violations[0]
        raise CliError(
            "ActionValidation",
            f"{len(report.violations)} violation(s); first: cell {first.cell_id!r}: {first.rule}: {first.detail}",
            EXIT_VALIDATION,
        )
    return action, raw


def cmd_quotient(args) -> str:
    raw = _read_input(args.input)
    x = _load_complex(raw)
    action, raw_action = _load_action(args, x)
    try:
        q, projection = quotient(x, action, auto_regularize=args.regularize)
    except NotRegularActionError:
        raise CliError(
            "NotRegularAction",
            "action is not regular (a stabilizer moves vertices); pass --regularize to subdivide first",
            EXIT_VALIDATION,
        ) from None
    acted = projection.source
    results = {
        "quotient": json.loads(to_json(q)),
        "projection": dict(sorted(projection.assignment.items())),
        "audit": {
            "input_f_vector": list(f_vector(x)),
            "input_euler": euler_characteristic(x),
            "acted_f_vector": list(f_vector(acted)),
            "quotient_f_vector": list(f_vector(q)),
            "quotient_euler": euler_characteristic(q),
            "dimension_preserved": q.dimension == acted.dimension,
            "regularized": acted is not x,
        },
    }
    inputs = {"complex": {"sha256": _digest(raw)}, "action": {"sha256": _digest(raw_action)}}
    return _emit(args, _report(args, inputs, results))


def cmd_double_cover(args) -> str:
    raw = _read_input(args.input)
    x = _load_complex(raw)
    cover = orientation_double_cover(x)
    chi_base = euler_characteristic(x)
    chi_total = euler_characteristic(cover.total)
    branch = sorted(cover.branch_cells)
    # an orientable base yields two disjoint copies, so test per component
    components = connected_components(cover.total)
    orientable = all(is_orientable(subcomplex(cover.total, comp)) for comp in components)
    results = {
        "total": json.loads(to_json(cover.total)),
        "projection": dict(sorted(cover.projection.assignment.items())),
        "deck": dict(sorted(cover.deck.assignment.items())),
        "branch_cells": branch,
        "audit": {
            "base_euler": chi_base,
            "total_euler": chi_total,
            "branch_count": len(branch),
            "branch_all_vertices": all(x.cell(c).dim == 0 for c in branch),
            "euler_relation_holds": chi_total == 2 * chi_base - len(branch),
            "total_components": len(components),
            "total_orientable": orientable,
            "dimension_preserved": cover.total.dimension == x.dimension,
        },
    }
    return _emit(args, _report(args, {"complex": {"sha256": _digest(raw)}}, results))


def cmd_character(args) -> str:
    raw = _read_input(args.input)
    x = _load_complex(raw)
    action, raw_action = _load_action(args, x)
    characters = orientation_character(x, action)
    results = {"characters": {name: c for name, c in sorted(characters.items())}}
    inputs = {"complex": {"sha256": _digest(raw)}, "action": {"sha256": _digest(raw_action)}}
    return _emit(args, _report(args, inputs, results))


def cmd_coeff(args) -> str:
    results: dict
    if args.coeff_command == "weil-index":
        values = [_rational(v) for v in args.values]
        lam = weil_index(values, moduli_index=args.moduli_index)
        results = {"weil_index": lam, "adjunction_bound": adjunction_bound(lam)}
    elif args.coeff_command == "member":
        x = _rational(args.value)
        lam = [_rational(v) for v in args.lam_set]
        r = _rational(args.r)
        cert = dlambda_member(x, lam, r, require_r_term=not args.optional_r_term)
        results = {
            "value": str(x),
            "member": cert is not None,
            "certificate": cert.to_dict() if cert is not None else None,
        }
    elif args.coeff_command == "enumerate":
        lam = [_rational(v) for v in args.lam_set]
        r = _rational(args.r)
        values = dlambda_enumerate(lam, r, args.denom_bound, require_r_term=not args.optional_r_term)
        listing = []
        for v in values:
            cert = dlambda_member(v, lam, r, require_r_term=not args.optional_r_term)
            listing.append({"value": str(v), "certificate": cert.to_dict()})
        results = {"count": len(listing), "values": listing}
    elif args.coeff_command == "p1-solve":
        lam = [_rational(v) for v in args.lam_set]
        r = _rational(args.r)
        sols = p1_solutions(lam, r, args.denom_bound, require_r_term=not args.optional_r_term)
        out = []
        for sol in sols:
            out.append(
                {
                    "degree": str(sol.degree),
                    "coefficients": [str(c) for c in sol.coefficients],
                    "entries": [
                        {"value": str(e.value), "role": e.role, "certificate": e.certificate.to_dict()}
                        for e in sol.entries
                    ],
                }
            )
        results = {"count": len(out), "solutions": out}
    else:
        assert args.coeff_command == "geq-half-classify"
        lam = [_rational(v) for v in args.values]
        classified = geq_half_classification(lam, args.denom_bound)
        results = {"elements": [str(v) for v in sorted(classified)]}
    return _emit(args, _report(args, {}, results))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="deltaplex", description=__doc__)
    parser.add_argument("--version", action="version", version=f"deltaplex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("--output", choices=("json", "text"), default="json")

    p = sub.add_parser("construct", help="emit a ready-made complex as interchange JSON")
    p.add_argument("name", help="hyperoctahedron | simplex-boundary | suspension | rp2")
    p.add_argument("param", nargs="?", default=None, help="size, or input path for suspension")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("classify", help="pseudo-manifold classification and homology report")
    p.add_argument("input", nargs="?", default="-", help="interchange JSON path, - for stdin")
    p.add_argument("--ambient-dim", type=int, default=None)
    add_output(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("quotient", help="quotient by a validated group action")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--action", required=True, help="action JSON path")
    p.add_argument("--regularize", action="store_true", help="subdivide until the action is regular")
    add_output(p)
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("double-cover", help="branched orientation double cover")
    p.add_argument("input", nargs="?", default="-")
    add_output(p)
    p.set_defaults(func=cmd_double_cover)

    p = sub.add_parser("character", help="orientation characters of the generators")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--action", required=True)
    add_output(p)
    p.set_defaults(func=cmd_character)

    p = sub.add_parser("coeff", help="exact coefficient arithmetic")
    csub = p.add_subparsers(dest="coeff_command", required=True)

    c = csub.add_parser("weil-index")
    c.add_argument("values", nargs="+", help="rationals p/q")
    c.add_argument("--moduli-index", type=int, default=1)
    add_output(c)
    c.set_defaults(func=cmd_coeff)

    c = csub.add_parser("member")
    c.add_argument("value")
    c.add_argument("--lambda", dest="lam_set", nargs="*", default=[], metavar="VALUE")
    c.add_argument("--r", default="0")
    c.add_argument("--optional-r-term", action="store_true")
    add_output(c)
    c.set_defaults(func=cmd_coeff)

    c = csub.add_parser("enumerate")
    c.add_argument("--lambda", dest="lam_set", nargs="*", default=[], metavar="VALUE")
    c.add_argument("--r", default="0")
    c.add_argument("--denom-bound", type=int, default=12)
    c.add_argument("--optional-r-term", action="store_true")
    add_output(c)
    c.set_defaults(func=cmd_coeff)

    c = csub.add_parser("p1-solve")
    c.add_argument("--lambda", dest="lam_set", nargs="*", default=[], metavar="VALUE")
    c.add_argument("--r", required=True)
    c.add_argument("--denom-bound", type=int, default=12)
    c.add_argument("--optional-r-term", action="store_true")
    add_output(c)
    c.set_defaults(func=cmd_coeff)

    c = csub.add_parser("geq-half-classify")
    c.add_argument("values", nargs="+", help="rationals in [1/2, 1]")
    c.add_argument("--denom-bound", type=int, default=12)
    add_output(c)
    c.set_defaults(func=cmd_coeff)

    return parser


def _error_json(name: str, detail: str) -> str:
    return json.dumps({"error": name, "detail": detail}, sort_keys=True)


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(_error_json("UsageError", str(e)), file=sys.stderr)
        return EXIT_PARSE
    args.command_echo = argv
    if not hasattr(args, "output"):
        args.output = "json"
    try:
        out = args.func(args)
    except CliError as e:
        print(_error_json(e.name, e.detail), file=sys.stderr)
        return e.exit_code
    except (ComplexError, BoundTooSmallError, NoSolutionFoundError) as e:
        print(_error_json(type(e).__name__, str(e)), file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as e:
        print(_error_json("BadParams", str(e)), file=sys.stderr)
        return EXIT_PARSE
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
