"""Interleavings of modules and of complexes.

Verification is exact over the field of the objects.  Searches enumerate
one side of the interleaving over GF(p); for a fixed forward map the
remaining conditions are linear, so each candidate costs one solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .complexes import (
    ChainMap,
    FreeChainComplex,
    Homotopy,
    check_homotopy,
    chain_map_from_vector,
    cohomology_dim,
    cohomology_rank,
    homotopy_classes,
    homotopy_from_vector,
    homotopy_operator,
    is_nullhomotopic,
    lift_resolution,
    smoothing_chain_map,
    vectorize,
)
from .field import GF, Field, Matrix, PrimeField, solvable_mod_p, solve_mod_p
from .freemod import GradedMatrix
from .grading import Grid, as_rational, critical_grid, translate
from .presentation import (
    FPMorphism,
    Presentation,
    free_resolution,
    hom_space,
    minimal_free_resolution,
    smoothing_fp,
    structure_map,
)

LEVELS = ("module", "homotopy", "derived")


class BudgetExhausted(RuntimeError):
    """The enumeration budget ran out before the search space was covered."""


@dataclass
class InterleavingCertificate:
    level: str
    epsilon: Fraction
    forward: FPMorphism | ChainMap
    backward: FPMorphism | ChainMap
    homotopies: tuple | None = None
    field: Field | None = None

    def verify(self) -> bool:
        if self.level == "module":
            return verify_module_interleaving(self.forward, self.backward, self.epsilon)
        hs = self.homotopies
        if hs is not None:
            f, g, eps = self.forward, self.backward, self.epsilon
            d1 = smoothing_chain_map(f.source, 2 * eps) - g.shift(eps) @ f
            d2 = smoothing_chain_map(g.source, 2 * eps) - f.shift(eps) @ g
            if check_homotopy(d1, hs[0]) and check_homotopy(d2, hs[1]):
                return True
        return verify_homotopy_interleaving(self.forward, self.backward, self.epsilon) is not None


def _eps(eps) -> Fraction:
    eps = as_rational(eps)
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")
    return eps


# ---------------------------------------------------------------------------
# Module level.

def verify_module_interleaving(f: FPMorphism, g: FPMorphism, eps) -> bool:
    """Both hexagon composites equal the ``2 eps`` smoothings exactly."""
    eps = _eps(eps)
    M, N = f.source, g.source
    if f.target != N.shift(eps) or g.target != M.shift(eps):
        return False
    if g.shift(eps) @ f != smoothing_fp(M, 2 * eps):
        return False
    return f.shift(eps) @ g == smoothing_fp(N, 2 * eps)


def _fp_vector(phi: FPMorphism) -> list:
    out = []
    for j in range(len(phi.source.generators)):
        out.extend(phi.image_coords(j))
    return out


def _int_array(rows, nrows: int, ncols: int) -> np.ndarray:
    arr = np.zeros((nrows, ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, a in enumerate(row):
            if a:
                arr[i, j] = int(a)
    return arr


def _tensor(columns_by_i: list[list[list]], nrows: int, ncols: int) -> np.ndarray:
    """Stack ``T[i] = matrix with given columns``."""
    T = np.zeros((len(columns_by_i), nrows, ncols), dtype=np.int64)
    for i, cols in enumerate(columns_by_i):
        for k, col in enumerate(cols):
            for r, a in enumerate(col):
                if a:
                    T[i, r, k] = int(a)
    return T


def _candidates(d: int, p: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop-1`` of the lexicographic listing of ``GF(p)^d``."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, d), dtype=np.int64)
    for k in range(d - 1, -1, -1):
        out[:, k] = idx % p
        idx //= p
    return out


def _bilinear_search(T1, T2, L1, L2, s1, s2, p: int, budget: int, chunk: int = 1024):
    """First ``c`` (lexicographic) for which ``[T(c) | L] z = s`` is solvable.

    Candidates are screened in batches; only the first solvable one is solved.
    """
    d = T1.shape[0]
    e = T1.shape[2]
    f1 = L1.shape[1]
    R1, R2 = T1.shape[1], T2.shape[1]
    A = np.zeros((R1 + R2, e + f1 + L2.shape[1]), dtype=np.int64)
    A[:R1, e:e + f1] = L1
    A[R1:, e + f1:] = L2
    b = np.concatenate([s1, s2]).astype(np.int64)
    total = p ** d
    start = 0
    while start < total:
        if start >= budget:
            raise BudgetExhausted(f"searched {budget} of {total} candidates")
        stop = min(total, start + chunk, budget)
        cs = _candidates(d, p, start, stop)
        batch = np.broadcast_to(A, (len(cs),) + A.shape).copy()
        if d:
            batch[:, :R1, :e] = np.einsum("kd,drc->krc", cs, T1) % p
            batch[:, R1:, :e] = np.einsum("kd,drc->krc", cs, T2) % p
        hits = np.nonzero(solvable_mod_p(batch, b, p))[0]
        if hits.size:
            k = int(hits[0])
            z = solve_mod_p(batch[k], b, p)
            return tuple(int(x) for x in cs[k]), z
        start = stop
    return None


def _as_prime_field(field) -> PrimeField:
    if isinstance(field, int):
        return GF(field)
    if not isinstance(field, PrimeField):
        raise ValueError("searches run over a prime field GF(p)")
    return field


def search_module_interleaving(M: Presentation, N: Presentation, eps, field=None,
                               budget: int = 1 << 14) -> InterleavingCertificate | None:
    """Exhaustive search for an ``eps``-interleaving over GF(p).

    ``None`` is conclusive for the search field only.  Raises
    :class:`BudgetExhausted` when the candidate space exceeds ``budget``
    and nothing was found.
    """
    eps = _eps(eps)
    F = _as_prime_field(field or GF(2))
    M, N = M.over(F), N.over(F)
    fwd = hom_space(M, N.shift(eps))
    bwd = hom_space(N, M.shift(eps))
    swap = len(bwd) < len(fwd)
    if swap:
        M, N, fwd, bwd = N, M, bwd, fwd
    sM, sN = smoothing_fp(M, 2 * eps), smoothing_fp(N, 2 * eps)
    v1, v2 = _fp_vector(sM), _fp_vector(sN)
    cols1 = [[_fp_vector(gk.shift(eps) @ fi) for gk in bwd] for fi in fwd]
    cols2 = [[_fp_vector(fi.shift(eps) @ gk) for gk in bwd] for fi in fwd]
    T1 = _tensor(cols1, len(v1), len(bwd))
    T2 = _tensor(cols2, len(v2), len(bwd))
    L1 = np.zeros((len(v1), 0), dtype=np.int64)
    L2 = np.zeros((len(v2), 0), dtype=np.int64)
    s1 = np.array([int(a) for a in v1], dtype=np.int64)
    s2 = np.array([int(a) for a in v2], dtype=np.int64)
    found = _bilinear_search(T1, T2, L1, L2, s1, s2, F.p, budget)
    if found is None:
        return None
    c, z = found
    f = _combine_fp(fwd, c, F, M, N.shift(eps))
    g = _combine_fp(bwd, z[:len(bwd)], F, N, M.shift(eps))
    if swap:
        f, g = g, f
    cert = InterleavingCertificate("module", eps, f, g, None, F)
    if not cert.verify():
        raise AssertionError("search produced a certificate that does not verify")
    return cert


def _combine_fp(basis, coeffs, F, P, Q) -> FPMorphism:
    images = GradedMatrix.zero(P.generators, Q.generators, F)
    for b, c in zip(basis, coeffs):
        c = int(c) % F.p
        if c:
            images = images + b.images.scale(c)
    return FPMorphism(P, Q, images, check=False)


# ---------------------------------------------------------------------------
# Homotopy level.

def verify_homotopy_interleaving(phi: ChainMap, psi: ChainMap, eps, strict: bool = False):
    """Homotopies ``(h, h')`` witnessing both hexagons up to homotopy, or None.

    ``h`` satisfies ``s_{2eps} - psi[eps] phi = d h + h d`` and likewise
    ``h'`` for the other composite.  With ``strict`` the composites must be
    equal on the nose and zero homotopies are returned.
    """
    eps = _eps(eps)
    X, Y = phi.source, psi.source
    if phi.target != Y.shift(eps) or psi.target != X.shift(eps):
        return None
    d1 = smoothing_chain_map(X, 2 * eps) - psi.shift(eps) @ phi
    d2 = smoothing_chain_map(Y, 2 * eps) - phi.shift(eps) @ psi
    if strict:
        if d1.is_zero() and d2.is_zero():
            return Homotopy(X, d1.target, {}), Homotopy(Y, d2.target, {})
        return None
    h1 = is_nullhomotopic(d1)
    if h1 is None:
        return None
    h2 = is_nullhomotopic(d2)
    if h2 is None:
        return None
    return h1, h2


def _combine_chain(basis, coeffs, F, X, Y) -> ChainMap:
    out = ChainMap(X, Y, {})
    for b, c in zip(basis, coeffs):
        c = int(c) % F.p
        if c:
            out = out + b.scale(c)
    return out


def search_homotopy_interleaving(X: FreeChainComplex, Y: FreeChainComplex, eps, field=None,
                                 budget: int = 1 << 14, level: str = "homotopy"
                                 ) -> InterleavingCertificate | None:
    """Search for a homotopy ``eps``-interleaving over GF(p).

    The forward map runs over chain maps modulo nullhomotopic ones (the
    conditions only depend on homotopy classes); for each candidate the
    backward map and both homotopies are found by a single linear solve.
    """
    eps = _eps(eps)
    F = _as_prime_field(field or GF(2))
    X, Y = X.over(F), Y.over(F)
    fwd = homotopy_classes(X, Y.shift(eps))
    bwd = homotopy_classes(Y, X.shift(eps))
    swap = len(bwd) < len(fwd)
    if swap:
        X, Y, fwd, bwd = Y, X, bwd, fwd
    X2, Y2 = X.shift(2 * eps), Y.shift(2 * eps)
    L1, mpos1, hpos1 = homotopy_operator(X, X2)
    L2, mpos2, hpos2 = homotopy_operator(Y, Y2)
    sX = vectorize(smoothing_chain_map(X, 2 * eps), mpos1)
    sY = vectorize(smoothing_chain_map(Y, 2 * eps), mpos2)
    cols1 = [[vectorize(gk.shift(eps) @ fi, mpos1) for gk in bwd] for fi in fwd]
    cols2 = [[vectorize(fi.shift(eps) @ gk, mpos2) for gk in bwd] for fi in fwd]
    T1 = _tensor(cols1, len(mpos1), len(bwd))
    T2 = _tensor(cols2, len(mpos2), len(bwd))
    A1 = _int_array(L1.data, L1.rows, L1.cols)
    A2 = _int_array(L2.data, L2.rows, L2.cols)
    s1 = np.array([int(a) for a in sX], dtype=np.int64)
    s2 = np.array([int(a) for a in sY], dtype=np.int64)
    found = _bilinear_search(T1, T2, A1, A2, s1, s2, F.p, budget)
    if found is None:
        return None
    c, z = found
    e = len(bwd)
    phi = _combine_chain(fwd, c, F, X, Y.shift(eps))
    psi = _combine_chain(bwd, z[:e], F, Y, X.shift(eps))
    h1 = homotopy_from_vector(X, X2, hpos1, [F(int(a)) for a in z[e:e + L1.cols]])
    h2 = homotopy_from_vector(Y, Y2, hpos2, [F(int(a)) for a in z[e + L1.cols:]])
    if swap:
        phi, psi, h1, h2 = psi, phi, h2, h1
    cert = InterleavingCertificate(level, eps, phi, psi, (h1, h2), F)
    if not cert.verify():
        raise AssertionError("search produced a certificate that does not verify")
    return cert


def lift_certificate(cert: InterleavingCertificate, PX: FreeChainComplex | None = None,
                     PY: FreeChainComplex | None = None, level: str = "homotopy"
                     ) -> InterleavingCertificate | None:
    """Lift a module-level certificate to resolutions and verify it there."""
    f, g, eps = cert.forward, cert.backward, cert.epsilon
    M, N = f.source, g.source
    PX = PX if PX is not None else minimal_free_resolution(M)
    PY = PY if PY is not None else minimal_free_resolution(N)
    phi = lift_resolution(f, PX, PY.shift(eps))
    psi = lift_resolution(g, PY, PX.shift(eps))
    hs = verify_homotopy_interleaving(phi, psi, eps)
    if hs is None:
        return None
    return InterleavingCertificate(level, eps, phi, psi, hs, cert.field)


def derived_interleaving(M: Presentation, N: Presentation, eps, mode: str = "search",
                         field=None, budget: int = 1 << 14) -> InterleavingCertificate | None:
    """Interleaving in the derived category via projective replacement.

    Both modules are replaced by the free resolutions built on their given
    presentations (not minimised).  ``mode="search"`` searches homotopy
    interleavings of the replacements; ``mode="lift"`` searches at module
    level and lifts the result.
    """
    F = _as_prime_field(field or GF(2))
    M, N = M.over(F), N.over(F)
    PX, PY = free_resolution(M), free_resolution(N)
    if mode == "search":
        return search_homotopy_interleaving(PX, PY, eps, F, budget, level="derived")
    if mode == "lift":
        cert = search_module_interleaving(M, N, eps, F, budget)
        if cert is None:
            return None
        return lift_certificate(cert, PX, PY, level="derived")
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Constructions on certificates.

def widen(cert: InterleavingCertificate, eps2) -> InterleavingCertificate:
    """Turn an ``eps`` certificate into an ``eps2 >= eps`` certificate."""
    eps2 = _eps(eps2)
    delta = eps2 - cert.epsilon
    if delta < 0:
        raise ValueError("can only widen to a larger epsilon")
    f, g = cert.forward, cert.backward
    if cert.level == "module":
        f2 = smoothing_fp(f.target, delta) @ f
        g2 = smoothing_fp(g.target, delta) @ g
        return InterleavingCertificate("module", eps2, f2, g2, None, cert.field)
    f2 = smoothing_chain_map(f.target, delta) @ f
    g2 = smoothing_chain_map(g.target, delta) @ g
    hs = verify_homotopy_interleaving(f2, g2, eps2)
    return InterleavingCertificate(cert.level, eps2, f2, g2, hs, cert.field)


def compose_certificates(a: InterleavingCertificate, b: InterleavingCertificate
                         ) -> InterleavingCertificate:
    """From ``M ~ N`` at ``e`` and ``N ~ O`` at ``e'``, build ``M ~ O`` at ``e + e'``."""
    if a.level != b.level:
        raise ValueError("certificates live at different levels")
    e1, e2 = a.epsilon, b.epsilon
    f = b.forward.shift(e1) @ a.forward
    g = a.backward.shift(e2) @ b.backward
    if a.level == "module":
        return InterleavingCertificate("module", e1 + e2, f, g, None, a.field)
    hs = verify_homotopy_interleaving(f, g, e1 + e2)
    return InterleavingCertificate(a.level, e1 + e2, f, g, hs, a.field)


# ---------------------------------------------------------------------------
# Obstructions and distance brackets.

def _obstruction_grid(a_grades, b_grades, eps) -> Grid:
    """Points where ``A(s)``, ``A(s + 2 eps)`` or ``B(s + eps)`` can change."""
    n = len((a_grades or b_grades)[0])
    axes = []
    for i in range(n):
        vals = {g[i] for g in a_grades}
        vals |= {g[i] - 2 * eps for g in a_grades}
        vals |= {g[i] - eps for g in b_grades}
        axes.append(tuple(sorted(vals)))
    return Grid(tuple(axes))


def rank_obstruction(M: Presentation, N: Presentation, eps) -> bool:
    """True when some grid point forbids an ``eps``-interleaving.

    An interleaving factors ``s_{2eps}`` of one module through the other
    module at ``s + eps``, so the rank of ``M(s <= s + 2 eps)`` cannot
    exceed ``dim N(s + eps)`` (and symmetrically).
    """
    eps = _eps(eps)
    for A, B in ((M, N), (N, M)):
        if not len(A.generators):
            continue
        grid = _obstruction_grid(A.all_grades(), B.all_grades(), eps)
        for s in grid.points():
            d = A.quotient(s).dim
            if d == 0:
                continue
            bound = B.quotient(translate(s, eps)).dim
            if d <= bound:
                continue
            if structure_map(A, s, translate(s, 2 * eps)).rank() > bound:
                return True
    return False


def complex_rank_obstruction(X: FreeChainComplex, Y: FreeChainComplex, eps) -> bool:
    """The same obstruction applied to every cohomology module."""
    eps = _eps(eps)
    degrees = sorted(set(X.degrees()) | set(Y.degrees()))
    for A, B in ((X, Y), (Y, X)):
        if A.is_zero():
            continue
        grid = _obstruction_grid(A.all_grades(), B.all_grades(), eps)
        for j in degrees:
            for s in grid.points():
                d = cohomology_dim(A, j, s)
                if d == 0:
                    continue
                bound = cohomology_dim(B, j, translate(s, eps))
                if d <= bound:
                    continue
                if cohomology_rank(A, j, s, translate(s, 2 * eps)) > bound:
                    return True
    return False


def candidate_epsilons(grades: Sequence) -> list[Fraction]:
    """``{0}`` with all per-axis coordinate differences and their halves."""
    out = {Fraction(0)}
    if grades:
        grid = critical_grid(grades)
        for axis in grid.axes:
            for u in axis:
                for v in axis:
                    if u > v:
                        out.add(u - v)
                        out.add((u - v) / 2)
    return sorted(out)


@dataclass
class DistanceBracket:
    lower: Fraction
    upper: Fraction | None  # None means infinity
    level: str
    field: str
    evidence: list = dc_field(default_factory=list)
    certificate: InterleavingCertificate | None = None
    lower_excluded: bool = False

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    def __str__(self):
        from .field import format_rational

        lo = "inf" if self.lower is None else format_rational(self.lower)
        hi = "inf" if self.upper is None else format_rational(self.upper)
        return f"[{lo}, {hi}]"


def estimate_distance(A, B, level: str = "module", field=None,
                      budget: int = 1 << 14) -> DistanceBracket:
    """Verified bracket around the interleaving distance at ``level``.

    Lower bounds come from rank obstructions, checked by bisection over the
    candidates and the midpoints of the gaps between them.  The upper bound
    is the first candidate at which the search returns a certificate.
    ``lower_excluded`` records that ``lower`` itself is obstructed, so the
    distance is not attained there.
    """
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    F = _as_prime_field(field or GF(2))
    A = A.over(F)
    B = B.over(F)
    if level == "module":
        if not (isinstance(A, Presentation) and isinstance(B, Presentation)):
            raise TypeError("module level needs two presentations")
        grades = A.all_grades() + B.all_grades()
        obstruct = lambda e: rank_obstruction(A, B, e)  # noqa: E731
        search = lambda e: search_module_interleaving(A, B, e, F, budget)  # noqa: E731
    else:
        if level == "homotopy":
            X = minimal_free_resolution(A) if isinstance(A, Presentation) else A
            Y = minimal_free_resolution(B) if isinstance(B, Presentation) else B
        else:
            X = free_resolution(A) if isinstance(A, Presentation) else A
            Y = free_resolution(B) if isinstance(B, Presentation) else B
        grades = X.all_grades() + Y.all_grades()
        obstruct = lambda e: complex_rank_obstruction(X, Y, e)  # noqa: E731
        search = lambda e: search_homotopy_interleaving(X, Y, e, F, budget, level=level)  # noqa: E731

    cands = candidate_epsilons(grades)
    evidence = []
    # The obstruction is monotone: if it rules out eps it rules out every
    # smaller value.  Between consecutive candidates it is constant, so
    # probing candidates and gap midpoints by bisection finds the last
    # obstructed probe, exactly as an ascending sweep would.
    probes = []
    for k, c in enumerate(cands):
        probes.append(c)
        probes.append((c + cands[k + 1]) / 2 if k + 1 < len(cands) else c + 1)
    lo, hi = -1, len(probes)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if obstruct(probes[mid]):
            lo = mid
        else:
            hi = mid
    closed = False
    if lo == -1:
        lower = Fraction(0)
    elif lo == len(probes) - 1:
        lower = None
    elif lo % 2 == 0:
        lower, closed = probes[lo], True
    else:
        lower = cands[lo // 2 + 1]
    if lower is None:
        evidence.append("rank obstruction at every candidate and beyond")
    elif lower > 0 or closed:
        bracket = "]" if closed else ")"
        evidence.append(f"rank obstruction on [0, {_fmt(lower)}{bracket}")
    if lower is None:
        return DistanceBracket(None, None, level, F.name, evidence, None, True)

    upper = None
    cert = None
    probes = [c for c in cands if c >= lower] + [cands[-1] + 1]
    for c in probes:
        try:
            cert = search(c)
        except BudgetExhausted as exc:
            evidence.append(f"search at {_fmt(c)} inconclusive: {exc}")
            continue
        if cert is not None:
            evidence.append(f"certificate found at {_fmt(c)} over {F.name}")
            upper = c
            break
        evidence.append(f"no interleaving at {_fmt(c)} over {F.name}")
    return DistanceBracket(lower, upper, level, F.name, evidence, cert, closed)


def _fmt(x) -> str:
    from .field import format_rational

    return format_rational(x)


# ---------------------------------------------------------------------------
# Isometry cross-check.

@dataclass
class IsometryRow:
    epsilon: Fraction
    module: bool | None
    homotopy: bool | None
    derived: bool | None

    @property
    def agrees(self) -> bool:
        vals = [v for v in (self.module, self.homotopy, self.derived) if v is not None]
        return len(set(vals)) <= 1


@dataclass
class IsometryReport:
    field: str
    rows: list

    @property
    def violations(self) -> list:
        return [r for r in self.rows if not r.agrees]

    @property
    def ok(self) -> bool:
        return not self.violations


def isometry_check(M: Presentation, N: Presentation, epsilons, field=None,
                   budget: int = 1 << 14) -> IsometryReport:
    """Existence of interleavings at module, homotopy and derived level."""
    F = _as_prime_field(field or GF(2))
    Mf, Nf = M.over(F), N.over(F)
    PX, PY = minimal_free_resolution(Mf), minimal_free_resolution(Nf)
    rows = []

    def attempt(fn):
        try:
            return fn() is not None
        except BudgetExhausted:
            return None

    for eps in epsilons:
        eps = _eps(eps)
        mod = attempt(lambda: search_module_interleaving(Mf, Nf, eps, F, budget))
        hmt = attempt(lambda: search_homotopy_interleaving(PX, PY, eps, F, budget))
        der = attempt(lambda: derived_interleaving(Mf, Nf, eps, "search", F, budget))
        rows.append(IsometryRow(eps, mod, hmt, der))
    return IsometryReport(F.name, rows)


def module_certificate_lifts(cert: InterleavingCertificate) -> bool:
    """Whether a module-level certificate lifts to a homotopy interleaving of resolutions."""
    return lift_certificate(cert) is not None


def homotopy_certificate_descends(cert: InterleavingCertificate) -> bool:
    """Converse direction: degree-zero cokernel maps interleave the modules."""
    from .complexes import induced_on_cokernel

    f = induced_on_cokernel(cert.forward)
    g = induced_on_cokernel(cert.backward)
    return verify_module_interleaving(f, g, cert.epsilon)


def matrix_of(x) -> Matrix:
    return x.images.matrix if isinstance(x, FPMorphism) else x
