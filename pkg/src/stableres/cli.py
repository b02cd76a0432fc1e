"""Command-line interface.

Exit status is 0 on success (including "no interleaving" and "infeasible"
outcomes), 1 on domain errors such as malformed files, and 2 on usage
errors.  Domain errors print a JSON report on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import catalog
from .complexes import FreeChainComplex, is_nullhomotopic, smoothing_chain_map, verify_resolution
from .field import QQ, PrimeField, field_from_name, format_rational
from .freemod import AdmissibilityError
from .grading import format_grade, grade_to_json, parse_rational
from .ingest import BifiltrationError, homology_presentation, perturb
from .interleave import (
    BudgetExhausted,
    derived_interleaving,
    estimate_distance,
    isometry_check,
    search_homotopy_interleaving,
    search_module_interleaving,
)
from .presentation import (
    Presentation,
    betti,
    free_resolution,
    hilbert_function,
    minimal_free_resolution,
)
from .serialize import (
    FormatError,
    bifiltration_to_json,
    certificate_from_json,
    certificate_to_json,
    complex_from_json,
    complex_to_json,
    dumps,
    load_bifiltration,
    presentation_from_json,
    presentation_to_json,
    read_json,
)


class DomainError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        value = parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _field(args, default: str):
    name = args.field or default
    try:
        return field_from_name(name)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def _search_field(args) -> PrimeField:
    F = _field(args, "gf:2")
    if not isinstance(F, PrimeField):
        raise DomainError("interleaving searches need a prime field, e.g. --field gf:2")
    return F


def _load_module(path, field) -> Presentation:
    data = read_json(path)
    if "terms" in data:
        raise DomainError(f"{path}: expected a presentation, found a complex")
    return presentation_from_json(data, field)


def _load_complex_or_resolve(path, field, minimal: bool = True) -> FreeChainComplex:
    data = read_json(path)
    if "terms" in data:
        return complex_from_json(data, field)
    P = presentation_from_json(data, field)
    return minimal_free_resolution(P) if minimal else free_resolution(P)


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _search_result(cert, exc, fmt, extra=None) -> str:
    if exc is not None:
        payload = {"status": "budget-exhausted", "detail": str(exc)}
    elif cert is None:
        payload = {"status": "none"}
    else:
        payload = {"status": "found", "certificate": certificate_to_json(cert)}
    payload.update(extra or {})
    if fmt == "json":
        return dumps(payload)
    lines = [payload["status"]]
    if "detail" in payload:
        lines.append(payload["detail"])
    if "certificate" in payload:
        lines.append(dumps(payload["certificate"]))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Subcommands.

def cmd_betti(args) -> str:
    P = _load_module(args.input, _field(args, "rational"))
    degrees = [args.degree] if args.degree is not None else range(P.n + 1)
    rows = []
    for i in degrees:
        for g, c in sorted(betti(P, i).items()):
            rows.append((i, g, c))
    if args.output == "json":
        return dumps([{"degree": i, "grade": grade_to_json(g), "count": c} for i, g, c in rows])
    if args.degree is not None:
        return "\n".join(f"{format_grade(g)},{c}" for _, g, c in rows)
    return "\n".join(f"{i},{format_grade(g)},{c}" for i, g, c in rows)


def cmd_dimensions(args) -> str:
    P = _load_module(args.input, _field(args, "rational"))
    dims = hilbert_function(P)
    if args.output == "json":
        return dumps([{"grade": grade_to_json(s), "dim": d} for s, d in dims.items()])
    return "\n".join(f"{format_grade(s)},{d}" for s, d in dims.items())


def cmd_resolve(args) -> str:
    P = _load_module(args.input, _field(args, "rational"))
    X = free_resolution(P) if args.raw else minimal_free_resolution(P)
    return dumps(complex_to_json(X))


def cmd_verify(args) -> str:
    if args.resolution is not None:
        field = _field(args, "rational")
        P = _load_module(args.input, field)
        X = complex_from_json(read_json(args.resolution), field)
        ok = verify_resolution(P, X)
        return dumps({"kind": "resolution", "valid": ok}) if args.output == "json" else (
            "valid" if ok else "invalid")
    cert = certificate_from_json(read_json(args.input))
    ok = cert.verify()
    if args.output == "json":
        return dumps({"kind": "certificate", "level": cert.level,
                      "epsilon": format_rational(cert.epsilon), "valid": ok})
    return "valid" if ok else "invalid"


def cmd_interleave(args) -> str:
    F = _search_field(args)
    M, N = _load_module(args.source, F), _load_module(args.target, F)
    cert = exc = None
    try:
        cert = search_module_interleaving(M, N, args.epsilon, F, args.budget)
    except BudgetExhausted as e:
        exc = e
    return _search_result(cert, exc, args.output, {"field": F.name})


def cmd_homotopy_interleave(args) -> str:
    F = _search_field(args)
    X = _load_complex_or_resolve(args.source, F)
    Y = _load_complex_or_resolve(args.target, F)
    cert = exc = None
    try:
        cert = search_homotopy_interleaving(X, Y, args.epsilon, F, args.budget)
    except BudgetExhausted as e:
        exc = e
    return _search_result(cert, exc, args.output, {"field": F.name})


def cmd_derived_interleave(args) -> str:
    F = _search_field(args)
    M, N = _load_module(args.source, F), _load_module(args.target, F)
    cert = exc = None
    try:
        cert = derived_interleaving(M, N, args.epsilon, args.mode, F, args.budget)
    except BudgetExhausted as e:
        exc = e
    return _search_result(cert, exc, args.output, {"field": F.name})


def cmd_nullhomotopy(args) -> str:
    field = _field(args, "rational")
    X = _load_complex_or_resolve(args.input, field)
    h = is_nullhomotopic(smoothing_chain_map(X, 2 * args.epsilon))
    status = "feasible" if h is not None else "infeasible"
    if args.output == "json":
        payload = {"status": status, "eta": format_rational(args.epsilon), "field": field.name}
        if h is not None:
            payload["homotopy"] = {
                str(i): [[field.format(a) if field == QQ else int(a) for a in row]
                         for row in m.matrix.data]
                for i, m in sorted(h.components.items())
            }
        return dumps(payload)
    lines = [status]
    if h is not None:
        for i, m in sorted(h.components.items()):
            lines.append(f"h[{i}] = {m.matrix.to_rows()}")
    return "\n".join(lines)


def cmd_distance(args) -> str:
    F = _search_field(args)
    if args.level == "module":
        A, B = _load_module(args.source, F), _load_module(args.target, F)
    else:
        A = _load_any(args.source, F)
        B = _load_any(args.target, F)
    br = estimate_distance(A, B, args.level, F, args.budget)
    if args.output == "json":
        return dumps({
            "lower": None if br.lower is None else format_rational(br.lower),
            "upper": None if br.upper is None else format_rational(br.upper),
            "level": br.level, "field": br.field, "evidence": br.evidence,
        })
    return "\n".join([str(br)] + [f"  {e}" for e in br.evidence])


def _load_any(path, field):
    data = read_json(path)
    if "terms" in data:
        return complex_from_json(data, field)
    return presentation_from_json(data, field)


def cmd_isometry_check(args) -> str:
    F = _search_field(args)
    M, N = _load_module(args.source, F), _load_module(args.target, F)
    from .interleave import candidate_epsilons

    eps = args.epsilons or candidate_epsilons(M.all_grades() + N.all_grades())
    rep = isometry_check(M, N, eps, F, args.budget)

    def word(v):
        return "unknown" if v is None else ("yes" if v else "no")

    if args.output == "json":
        return dumps({"field": rep.field, "ok": rep.ok, "rows": [
            {"epsilon": format_rational(r.epsilon), "module": r.module,
             "homotopy": r.homotopy, "derived": r.derived, "agrees": r.agrees}
            for r in rep.rows]})
    rows = [("epsilon", "module", "homotopy", "derived", "agrees")]
    rows += [(format_rational(r.epsilon), word(r.module), word(r.homotopy), word(r.derived),
              "yes" if r.agrees else "NO") for r in rep.rows]
    return _csv(rows)


def cmd_ingest(args) -> str:
    K = load_bifiltration(args.input)
    P = homology_presentation(K, args.degree or 0, _field(args, "rational"))
    return dumps(presentation_to_json(P))


def cmd_perturb(args) -> str:
    K = load_bifiltration(args.input)
    return dumps(bifiltration_to_json(perturb(K, args.delta, args.seed)))


def cmd_example(args) -> str:
    field = _field(args, "rational")
    eps = args.epsilon if args.epsilon is not None else Fraction(1)
    obj = catalog.EXAMPLES[args.name](eps, field)
    if isinstance(obj, Presentation):
        return dumps(presentation_to_json(obj))
    return dumps(complex_to_json(obj))


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help='"rational" or "gf:p"')
    common.add_argument("--output", choices=("text", "csv", "json"), default="text")
    common.add_argument("--budget", type=int, default=1 << 14,
                        help="maximum number of enumerated candidates")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="stableres", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("betti", cmd_betti, "graded Betti numbers of a presentation")
    p.add_argument("input")
    p.add_argument("-i", "--degree", type=int)

    p = add("dimensions", cmd_dimensions, "dimension at every critical grid point")
    p.add_argument("input")

    p = add("resolve", cmd_resolve, "minimal free resolution as a complex file")
    p.add_argument("input")
    p.add_argument("--raw", action="store_true", help="resolve the presentation as given")

    p = add("verify", cmd_verify, "re-check a certificate, or a resolution of a presentation")
    p.add_argument("input")
    p.add_argument("resolution", nargs="?")

    for name, fn, help_ in (
        ("interleave", cmd_interleave, "search a module-level interleaving"),
        ("homotopy-interleave", cmd_homotopy_interleave, "search a homotopy interleaving"),
        ("derived-interleave", cmd_derived_interleave, "search a derived interleaving"),
    ):
        p = add(name, fn, help_)
        p.add_argument("source")
        p.add_argument("target")
        p.add_argument("--epsilon", type=_rational, required=True)
        if name == "derived-interleave":
            p.add_argument("--mode", choices=("search", "lift"), default="search")

    p = add("nullhomotopy", cmd_nullhomotopy, "is the 2*epsilon smoothing of a complex nullhomotopic")
    p.add_argument("input")
    p.add_argument("--epsilon", type=_rational, required=True)

    p = add("distance", cmd_distance, "bracket the interleaving distance")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--level", choices=("module", "homotopy", "derived"), default="module")

    p = add("isometry-check", cmd_isometry_check, "compare existence across the three levels")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--epsilons", type=_rational_list)

    p = add("ingest", cmd_ingest, "homology presentation of a bifiltration")
    p.add_argument("input")
    p.add_argument("-i", "--degree", type=int, default=0)

    p = add("perturb", cmd_perturb, "seeded perturbation of a bifiltration")
    p.add_argument("input")
    p.add_argument("--delta", type=_rational, required=True)

    p = add("example", cmd_example, "write one of the built-in example objects")
    p.add_argument("name", choices=sorted(catalog.EXAMPLES))
    p.add_argument("--epsilon", type=_rational)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _emit(args.func(args))
    except (DomainError, FormatError, BifiltrationError, AdmissibilityError,
            FileNotFoundError, ValueError, TypeError, KeyError) as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(report) + "\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
