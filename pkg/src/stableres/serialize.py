"""JSON file formats for presentations, complexes, bifiltrations and certificates.

Rationals are written as ``"p/q"`` strings (``"p"`` when integral) and GF(p)
scalars as decimal residues, so no floating point ever touches a file.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .complexes import ChainMap, FreeChainComplex, Homotopy
from .field import QQ, Field, Matrix, PrimeField, field_from_name
from .freemod import FreeModule, GradedMatrix
from .grading import grade_from_json, grade_to_json
from .ingest import Bifiltration
from .interleave import InterleavingCertificate
from .presentation import FPMorphism, Presentation


class FormatError(ValueError):
    """A file does not follow the expected layout."""


def _scalar_out(field: Field, a):
    if isinstance(field, PrimeField):
        return int(a)
    return field.format(a)


def _scalar_in(field: Field, x):
    if isinstance(x, float):
        raise FormatError("floating point scalars are not accepted; use \"p/q\" strings")
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise FormatError(f"bad scalar {x!r}")
    try:
        return field(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad scalar {x!r}: {exc}") from None


def matrix_to_json(m: Matrix) -> list:
    return [[_scalar_out(m.field, a) for a in row] for row in m.data]


def matrix_from_json(rows, nrows: int, ncols: int, field: Field) -> Matrix:
    if not isinstance(rows, list) or len(rows) != nrows:
        raise FormatError(f"expected {nrows} matrix rows")
    data = []
    for row in rows:
        if not isinstance(row, list) or len(row) != ncols:
            raise FormatError(f"expected matrix rows of length {ncols}")
        data.append([_scalar_in(field, x) for x in row])
    return Matrix(data, field, cols=ncols)


def _grades_in(data) -> list:
    if not isinstance(data, list):
        raise FormatError("expected a list of grades")
    try:
        return [grade_from_json(g) for g in data]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad grade: {exc}") from None


def _check_dim(grades, n):
    for g in grades:
        if len(g) != n:
            raise FormatError(f"grade of dimension {len(g)} where n = {n}")


# ---------------------------------------------------------------------------
# Presentations.

def presentation_to_json(P: Presentation) -> dict:
    cols = P.relation_columns()
    return {
        "n": P.n,
        "field": P.field.name,
        "generators": [grade_to_json(g) for g in P.generators],
        "relations": [
            {"grade": grade_to_json(g), "coeffs": [_scalar_out(P.field, a) for a in c]}
            for g, c in zip(P.relation_grades, cols)
        ],
    }


def presentation_from_json(data: dict, field: Field | None = None) -> Presentation:
    if not isinstance(data, dict) or "generators" not in data:
        raise FormatError("a presentation needs a 'generators' list")
    field = field or field_from_name(data.get("field", "rational"))
    gens = _grades_in(data["generators"])
    n = data.get("n", len(gens[0]) if gens else None)
    if n is None:
        raise FormatError("an empty presentation needs 'n'")
    _check_dim(gens, n)
    rels = []
    for r in data.get("relations", []):
        if not isinstance(r, dict) or "grade" not in r or "coeffs" not in r:
            raise FormatError("each relation needs 'grade' and 'coeffs'")
        g = _grades_in([r["grade"]])[0]
        _check_dim([g], n)
        coeffs = r["coeffs"]
        if not isinstance(coeffs, list) or len(coeffs) != len(gens):
            raise FormatError("relation coefficient count differs from generator count")
        rels.append((g, [_scalar_in(field, c) for c in coeffs]))
    G = FreeModule(gens, n)
    R = FreeModule([g for g, _ in rels], n)
    mat = Matrix.from_columns([c for _, c in rels], len(gens), field)
    d = GradedMatrix(R, G, mat, check=False)
    bad = d.inadmissible_entries()
    if bad:
        i, j = bad[0]
        raise FormatError(
            f"relation {j} (grade {rels[j][0]}) uses generator {i} of a larger grade"
        )
    return Presentation(d, check=False)


# ---------------------------------------------------------------------------
# Complexes.

def graded_matrix_to_json(d: GradedMatrix) -> list:
    return matrix_to_json(d.matrix)


def complex_to_json(X: FreeChainComplex) -> dict:
    out = {
        "n": X.n,
        "field": X.field.name,
        "terms": {str(j): [grade_to_json(g) for g in F] for j, F in X.terms.items()},
        "differentials": {
            str(j): matrix_to_json(d.matrix) for j, d in X.diffs.items() if not d.is_zero()
        },
    }
    if X.resolved is not None and X.augmentation is not None:
        out["resolves"] = presentation_to_json(X.resolved)
        out["augmentation"] = matrix_to_json(X.augmentation.matrix)
    return out


def complex_from_json(data: dict, field: Field | None = None) -> FreeChainComplex:
    if not isinstance(data, dict) or "terms" not in data:
        raise FormatError("a complex needs a 'terms' map")
    field = field or field_from_name(data.get("field", "rational"))
    try:
        terms_raw = {int(k): v for k, v in data["terms"].items()}
        diffs_raw = {int(k): v for k, v in data.get("differentials", {}).items()}
    except (AttributeError, ValueError):
        raise FormatError("degrees must be integer strings") from None
    n = data.get("n")
    terms = {}
    for j, gs in terms_raw.items():
        grades = _grades_in(gs)
        if n is None and grades:
            n = len(grades[0])
        terms[j] = grades
    if n is None:
        raise FormatError("an empty complex needs 'n'")
    frees = {}
    for j, grades in terms.items():
        _check_dim(grades, n)
        frees[j] = FreeModule(grades, n)
    empty = FreeModule((), n)
    diffs = {}
    for j, rows in diffs_raw.items():
        src, tgt = frees.get(j, empty), frees.get(j + 1, empty)
        m = matrix_from_json(rows, len(tgt), len(src), field)
        d = GradedMatrix(src, tgt, m, check=False)
        if not d.is_admissible():
            raise FormatError(f"differential in degree {j} is not grade-admissible")
        diffs[j] = d
    aug = resolved = None
    if "resolves" in data:
        resolved = presentation_from_json(data["resolves"], field)
        x0 = frees.get(0, empty)
        m = matrix_from_json(data.get("augmentation", []), len(resolved.generators), len(x0), field)
        aug = GradedMatrix(x0, resolved.generators, m, check=False)
    try:
        return FreeChainComplex(frees, diffs, n, field, aug, resolved)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# Bifiltrations.

def bifiltration_to_json(K: Bifiltration) -> dict:
    return {
        "simplices": [
            {"vertices": list(s.vertices), "grade": grade_to_json(s.grade)} for s in K.simplices
        ]
    }


def bifiltration_from_json(data: dict) -> Bifiltration:
    if not isinstance(data, dict) or not isinstance(data.get("simplices"), list):
        raise FormatError("a bifiltration needs a 'simplices' list")
    items = []
    for s in data["simplices"]:
        if not isinstance(s, dict) or "vertices" not in s or "grade" not in s:
            raise FormatError("each simplex needs 'vertices' and 'grade'")
        items.append((s["vertices"], _grades_in([s["grade"]])[0]))
    n = len(items[0][1]) if items else 2
    return Bifiltration(items, n)


# ---------------------------------------------------------------------------
# Certificates.

def _chain_map_to_json(phi: ChainMap) -> dict:
    return {str(j): matrix_to_json(phi.at(j).matrix) for j in phi.degrees()}


def _homotopy_to_json(h: Homotopy) -> dict:
    return {str(j): matrix_to_json(m.matrix) for j, m in sorted(h.components.items())}


def certificate_to_json(cert: InterleavingCertificate) -> dict:
    from .field import format_rational

    f, g = cert.forward, cert.backward
    field = f.field
    out = {"level": cert.level, "epsilon": format_rational(cert.epsilon), "field": field.name}
    if cert.level == "module":
        out["source"] = presentation_to_json(f.source)
        out["target"] = presentation_to_json(g.source)
        out["forward"] = matrix_to_json(f.images.matrix)
        out["backward"] = matrix_to_json(g.images.matrix)
    else:
        out["source"] = complex_to_json(f.source)
        out["target"] = complex_to_json(g.source)
        out["forward"] = _chain_map_to_json(f)
        out["backward"] = _chain_map_to_json(g)
        if cert.homotopies is not None:
            out["homotopies"] = [_homotopy_to_json(h) for h in cert.homotopies]
    return out


def _chain_map_from_json(X, Y, data, field) -> ChainMap:
    comps = {}
    for k, rows in data.items():
        j = int(k)
        src, tgt = X.term(j), Y.term(j)
        comps[j] = GradedMatrix(src, tgt, matrix_from_json(rows, len(tgt), len(src), field),
                                check=False)
    return ChainMap(X, Y, comps)


def _homotopy_from_json(X, Y, data, field) -> Homotopy:
    comps = {}
    for k, rows in data.items():
        j = int(k)
        src, tgt = X.term(j), Y.term(j - 1)
        comps[j] = GradedMatrix(src, tgt, matrix_from_json(rows, len(tgt), len(src), field),
                                check=False)
    return Homotopy(X, Y, comps)


def certificate_from_json(data: dict) -> InterleavingCertificate:
    try:
        level = data["level"]
        eps = Fraction(data["epsilon"])
        field = field_from_name(data["field"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad certificate header: {exc}") from None
    if level == "module":
        M = presentation_from_json(data["source"], field)
        N = presentation_from_json(data["target"], field)
        Ne, Me = N.shift(eps), M.shift(eps)
        f_m = matrix_from_json(data["forward"], len(Ne.generators), len(M.generators), field)
        g_m = matrix_from_json(data["backward"], len(Me.generators), len(N.generators), field)
        f = FPMorphism(M, Ne, GradedMatrix(M.generators, Ne.generators, f_m, check=False),
                       check=False)
        g = FPMorphism(N, Me, GradedMatrix(N.generators, Me.generators, g_m, check=False),
                       check=False)
        return InterleavingCertificate(level, eps, f, g, None, field)
    if level not in ("homotopy", "derived"):
        raise FormatError(f"unknown certificate level {level!r}")
    X = complex_from_json(data["source"], field)
    Y = complex_from_json(data["target"], field)
    f = _chain_map_from_json(X, Y.shift(eps), data["forward"], field)
    g = _chain_map_from_json(Y, X.shift(eps), data["backward"], field)
    hs = None
    if "homotopies" in data:
        h1, h2 = data["homotopies"]
        hs = (
            _homotopy_from_json(X, X.shift(2 * eps), h1, field),
            _homotopy_from_json(Y, Y.shift(2 * eps), h2, field),
        )
    return InterleavingCertificate(level, eps, f, g, hs, field)


# ---------------------------------------------------------------------------
# Files.

def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False)


def load_presentation(path, field: Field | None = None) -> Presentation:
    return presentation_from_json(read_json(path), field)


def load_complex(path, field: Field | None = None) -> FreeChainComplex:
    return complex_from_json(read_json(path), field)


def load_bifiltration(path) -> Bifiltration:
    return bifiltration_from_json(read_json(path))


def load_certificate(path) -> InterleavingCertificate:
    return certificate_from_json(read_json(path))


def default_field() -> Field:
    return QQ
