"""Command line interface: ``rootclust solve ...``.

Exit codes: 0 on success, 1 when ``--verify`` finds a violation, 2 on
bad input, 3 when a soft test runs out of precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .dyadic import ComplexDyadic, Dyadic
from .oracle import PrecisionExhausted, ZeroLeadingCoefficient, from_exact, from_roots
from .predicates import DEFAULT_CEILING
from .solver import SolveResult, solve
from .svg import emit_svg

__all__ = ["SchemaError", "parse_number", "parse_poly", "clusters_json", "cli_solve", "main"]


class SchemaError(ValueError):
    """Malformed polynomial JSON; ``pointer`` locates the offending value."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def _real(spec, ptr: str) -> Fraction:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SchemaError(ptr, "expected one of {int}, {rational}, {decimal}, {dyadic}")
    (kind, val), = spec.items()
    try:
        if kind == "int":
            if isinstance(val, bool) or not isinstance(val, (str, int)):
                raise SchemaError(f"{ptr}/int", "expected an integer string")
            return Fraction(int(val))
        if kind == "rational":
            if not isinstance(val, dict) or set(val) != {"num", "den"}:
                raise SchemaError(f"{ptr}/rational", "expected {num, den}")
            den = int(val["den"])
            if den == 0:
                raise SchemaError(f"{ptr}/rational/den", "zero denominator")
            return Fraction(int(val["num"]), den)
        if kind == "decimal":
            return Fraction(str(val))
        if kind == "dyadic":
            d = Dyadic.parse(str(val))
            if "*" not in str(val) and "^" not in str(val):
                raise SchemaError(f"{ptr}/dyadic", "expected the form m*2^e")
            return d.to_fraction()
    except SchemaError:
        raise
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError(f"{ptr}/{kind}", str(exc)) from exc
    raise SchemaError(ptr, f"unknown numeric kind {kind!r}")


def _complex(spec, ptr: str) -> tuple[Fraction, Fraction]:
    if isinstance(spec, dict) and ("re" in spec or "im" in spec):
        extra = set(spec) - {"re", "im"}
        if extra:
            raise SchemaError(ptr, f"unexpected keys {sorted(extra)}")
        re = _real(spec["re"], f"{ptr}/re") if "re" in spec else Fraction(0)
        im = _real(spec["im"], f"{ptr}/im") if "im" in spec else Fraction(0)
        return re, im
    return _real(spec, ptr), Fraction(0)


def parse_poly(doc):
    """An :class:`OraclePolynomial` from the JSON coefficient or root form."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError("", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("", "expected an object")
    has_c, has_r = "coeffs" in doc, "roots" in doc
    if has_c and has_r:
        raise SchemaError("", "give either coeffs or roots, not both")
    if has_c:
        extra = set(doc) - {"coeffs"}
        if extra:
            raise SchemaError(f"/{sorted(extra)[0]}", "not allowed with coeffs")
        coeffs = doc["coeffs"]
        if not isinstance(coeffs, list) or len(coeffs) < 2:
            raise SchemaError("/coeffs", "need a list of at least two coefficients")
        values = [_complex(c, f"/coeffs/{i}") for i, c in enumerate(coeffs)]
        try:
            return from_exact(values)
        except ZeroLeadingCoefficient as exc:
            raise SchemaError(f"/coeffs/{len(coeffs) - 1}", str(exc)) from exc
    if has_r:
        extra = set(doc) - {"roots", "lcf"}
        if extra:
            raise SchemaError(f"/{sorted(extra)[0]}", "not allowed with roots")
        roots = doc["roots"]
        if not isinstance(roots, list) or not roots:
            raise SchemaError("/roots", "need a nonempty list")
        parsed = []
        for i, r in enumerate(roots):
            ptr = f"/roots/{i}"
            if not isinstance(r, dict):
                raise SchemaError(ptr, "expected an object")
            extra = set(r) - {"re", "im", "mult"}
            if extra:
                raise SchemaError(f"{ptr}/{sorted(extra)[0]}", "unexpected key")
            mult = r.get("mult", 1)
            if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
                raise SchemaError(f"{ptr}/mult", "expected a positive integer")
            re = _real(r["re"], f"{ptr}/re") if "re" in r else Fraction(0)
            im = _real(r["im"], f"{ptr}/im") if "im" in r else Fraction(0)
            parsed.append(((re, im), mult))
        lcf = _complex(doc["lcf"], "/lcf") if "lcf" in doc else (Fraction(1), Fraction(0))
        if lcf == (0, 0):
            raise SchemaError("/lcf", "leading coefficient is zero")
        return from_roots(parsed, lcf)
    raise SchemaError("", "expected a coeffs or roots key")


def parse_number(text: str) -> Dyadic:
    """A dyadic from ``m*2^e``, ``2^-k``, an integer, a decimal or ``a/b``."""
    return Dyadic.parse(text)


def clusters_json(result: SolveResult) -> dict:
    return {
        "clusters": [
            {"center": {"re": str(c.center.re), "im": str(c.center.im)},
             "radius": str(c.radius), "multiplicity": c.multiplicity}
            for c in result.clusters
        ],
        "eps_eff": str(result.eps_eff),
        "stats_version": 1,
    }


class _InputError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rootclust", description="Certified root clustering in a box.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="cluster the roots of a polynomial inside a square")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--poly", metavar="PATH", help="polynomial JSON file")
    src.add_argument("--poly-inline", metavar="JSON", help="polynomial JSON text")
    s.add_argument("--box", required=True, metavar="CX,CY,W", help="query box center and width")
    s.add_argument("--eps", required=True, metavar="VAL", help="cluster radius bound, e.g. 2^-20")
    s.add_argument("--out", metavar="PATH", help="clusters JSON (default: stdout)")
    s.add_argument("--stats", metavar="PATH", help="run statistics JSON")
    s.add_argument("--svg", metavar="PATH", help="SVG picture of the subdivision")
    s.add_argument("--no-newton", action="store_true", help="bisection only")
    s.add_argument("--precision-ceiling", type=int, default=DEFAULT_CEILING, metavar="BITS")
    s.add_argument("--seed", type=int, default=0, help="recorded in the stats; the solver is deterministic")
    s.add_argument("--verify", action="store_true", help="check the answer against the given roots")
    return ap


def _parse_box(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise _InputError("--box: expected CX,CY,W")
    try:
        cx, cy, w = (parse_number(p) for p in parts)
    except ValueError as exc:
        raise _InputError(f"--box: {exc}") from exc
    if w.sign() <= 0:
        raise _InputError("--box: width must be positive")
    return ComplexDyadic(cx, cy), w


def _load_poly(args):
    flag = "--poly" if args.poly is not None else "--poly-inline"
    try:
        if args.poly is not None:
            with open(args.poly) as fh:
                text = fh.read()
        else:
            text = args.poly_inline
        return parse_poly(text), json.loads(text)
    except OSError as exc:
        raise _InputError(f"--poly: {exc}") from exc
    except SchemaError as exc:
        raise _InputError(f"{flag}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cli_solve(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        F, doc = _load_poly(args)
        center, width = _parse_box(args.box)
        try:
            eps = parse_number(args.eps)
        except ValueError as exc:
            raise _InputError(f"--eps: {exc}") from exc
        if eps.sign() <= 0:
            raise _InputError("--eps: must be positive")
        if args.precision_ceiling < 64:
            raise _InputError("--precision-ceiling: must be at least 64")
        if args.verify and "roots" not in doc:
            raise _InputError("--verify: needs a polynomial given by its roots")
    except _InputError as exc:
        print(f"rootclust: error: {exc}", file=sys.stderr)
        return 2

    try:
        result = solve(F, (center, width), eps, newton=not args.no_newton,
                       ceiling=args.precision_ceiling, record=args.svg is not None)
    except PrecisionExhausted as exc:
        print(f"rootclust: precision exhausted at {exc.bits} bits: {exc}", file=sys.stderr)
        for k, v in sorted(exc.context.items()):
            print(f"  {k}: {v}", file=sys.stderr)
        return 3

    payload = clusters_json(result)
    code = 0
    if args.verify:
        from .validation import InstanceSpec, verify_solution

        spec = InstanceSpec(F._roots, Fraction(1), center.to_fractions(), width.to_fraction(),
                            eps.to_fraction())
        report = verify_solution(spec, result.clusters)
        payload["verification"] = report.to_json()
        code = 0 if report.ok else 1
    _write(args.out, json.dumps(payload, indent=2) + "\n")
    if args.stats:
        stats = result.stats.to_dict()
        stats["seed"] = args.seed
        _write(args.stats, json.dumps(stats, indent=2, sort_keys=True) + "\n")
    if args.svg:
        _write(args.svg, emit_svg(result))
    return code


def main() -> None:
    sys.exit(cli_solve())


if __name__ == "__main__":
    main()
