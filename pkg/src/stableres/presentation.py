"""Finitely presented persistence modules.

A :class:`Presentation` is a relation matrix ``d: R -> G`` between free
modules; the module is ``coker(d)``.  Everything here is computed by linear
algebra on a finite grid of grades: at a point ``s`` the module is the span
of the generators alive at ``s`` modulo the relation columns alive at ``s``.
Elements are written as vectors over the generators of ``G`` and brought to
a canonical normal form by the reduced echelon basis of the relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .field import QQ, Echelon, Field, Matrix, kernel_basis
from .freemod import FreeModule, GradedMatrix, xi
from .grading import Grade, Grid, as_rational, critical_grid, leq


class _Quotient:
    """The vector space ``P(s)`` with a normal form for its elements."""

    __slots__ = ("alive", "ech", "basis", "m")

    def __init__(self, P: "Presentation", s: Grade):
        field = P.field
        m = len(P.generators)
        self.m = m
        self.alive = P.generators.alive(s)
        self.ech = Echelon(field, m)
        cols = P.relation_grades.alive(s)
        data = P.relations.matrix.data
        for j in cols:
            self.ech.add([data[i][j] for i in range(m)])
        pivots = set(self.ech.pivots)
        self.basis = [i for i in self.alive if i not in pivots]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def normal_form(self, v: Sequence) -> list:
        return self.ech.reduce(v)

    def coords(self, v: Sequence) -> list:
        w = self.ech.reduce(v)
        return [w[i] for i in self.basis]

    def unit_coords(self, i: int) -> list:
        """Coordinates of generator ``i`` (assumed alive)."""
        v = [self.ech.field.zero] * self.m
        v[i] = self.ech.field.one
        return self.coords(v)


@dataclass(frozen=True)
class Evaluation:
    dim: int
    basis: tuple  # generator indices whose classes form the basis


class Presentation:
    """``coker(relations: R -> G)``."""

    def __init__(self, relations: GradedMatrix, check: bool = True):
        if check and not relations.is_admissible():
            raise ValueError("relation matrix is not grade-admissible")
        self.relations = relations
        self._cache: dict = {}

    @classmethod
    def build(
        cls,
        generators: Sequence[Grade],
        relations: Iterable[tuple[Grade, Sequence]] = (),
        field: Field = QQ,
        n: int | None = None,
    ) -> "Presentation":
        """From generator grades and ``(grade, coefficients)`` relation pairs."""
        G = FreeModule(generators, n)
        rels = list(relations)
        R = FreeModule([g for g, _ in rels], G.n)
        columns = []
        for g, coeffs in rels:
            if len(coeffs) != len(G):
                raise ValueError("relation coefficient count differs from generator count")
            columns.append([field(c) for c in coeffs])
        mat = Matrix.from_columns(columns, len(G), field)
        return cls(GradedMatrix(R, G, mat, check=False))

    @classmethod
    def free(cls, F: FreeModule, field: Field = QQ) -> "Presentation":
        R = FreeModule((), F.n)
        return cls(GradedMatrix.zero(R, F, field), check=False)

    @property
    def generators(self) -> FreeModule:
        return self.relations.target

    @property
    def relation_grades(self) -> FreeModule:
        return self.relations.source

    @property
    def n(self) -> int:
        return self.generators.n

    @property
    def field(self) -> Field:
        return self.relations.field

    def relation_columns(self) -> list[list]:
        return [self.relations.matrix.column(j) for j in range(len(self.relation_grades))]

    def all_grades(self) -> list[Grade]:
        return list(self.generators.grades) + list(self.relation_grades.grades)

    def grid(self, shifts: Iterable = ()) -> Grid | None:
        grades = self.all_grades()
        return critical_grid(grades, shifts) if grades else None

    def quotient(self, s: Grade) -> _Quotient:
        key = ("q", s)
        q = self._cache.get(key)
        if q is None:
            q = _Quotient(self, s)
            self._cache[key] = q
        return q

    def evaluate(self, s: Grade) -> Evaluation:
        return evaluate(self, s)

    def shift(self, eps) -> "Presentation":
        return Presentation(self.relations.shift(eps), check=False)

    def over(self, field: Field) -> "Presentation":
        if field == self.field:
            return self
        return Presentation(self.relations.over(field), check=False)

    def __eq__(self, other):
        if not isinstance(other, Presentation):
            return NotImplemented
        return self.relations == other.relations

    def __hash__(self):
        return hash((self.generators, self.relation_grades))

    def __repr__(self):
        return (
            f"Presentation(n={self.n}, generators={len(self.generators)}, "
            f"relations={len(self.relation_grades)}, field={self.field})"
        )


def evaluate(P: Presentation, s: Grade) -> Evaluation:
    if len(s) != P.n:
        raise ValueError("dimension mismatch")
    q = P.quotient(tuple(s))
    return Evaluation(q.dim, tuple(q.basis))


def structure_map(P: Presentation, s: Grade, t: Grade) -> Matrix:
    """Matrix of ``P(s <= t)`` in the evaluation bases."""
    if not leq(s, t):
        raise ValueError(f"structure_map needs s <= t, got {s} and {t}")
    qs, qt = P.quotient(tuple(s)), P.quotient(tuple(t))
    cols = [qt.unit_coords(i) for i in qs.basis]
    return Matrix.from_columns(cols, qt.dim, P.field)


class FPMorphism:
    """Morphism of finitely presented modules.

    ``images`` sends each source generator to a vector over the target
    generators, normalised in the target at the generator's grade.
    """

    def __init__(self, source: Presentation, target: Presentation, images: GradedMatrix,
                 check: bool = True):
        if images.source != source.generators or images.target != target.generators:
            raise ValueError("image matrix does not match source/target generators")
        if images.field != target.field or source.field != target.field:
            raise TypeError("field mismatch in FPMorphism")
        if check and not images.is_admissible():
            raise ValueError("generator images are not grade-admissible")
        self.source = source
        self.target = target
        self.images = _normalise(target, images)
        if check and not self.is_well_defined():
            raise ValueError("morphism does not send relations to zero")

    @property
    def field(self) -> Field:
        return self.target.field

    def is_well_defined(self) -> bool:
        mat = self.images.matrix
        for j, b in enumerate(self.source.relation_grades):
            col = self.source.relations.matrix.column(j)
            img = mat.apply(col)
            if any(self.target.quotient(b).normal_form(img)):
                return False
        return True

    def image_coords(self, j: int) -> list:
        """Image of generator ``j`` in the target's evaluation basis."""
        a = self.source.generators[j]
        return self.target.quotient(a).coords(self.images.matrix.column(j))

    def shift(self, eps) -> "FPMorphism":
        return FPMorphism(self.source.shift(eps), self.target.shift(eps), self.images.shift(eps),
                          check=False)

    def __add__(self, other: "FPMorphism") -> "FPMorphism":
        return FPMorphism(self.source, self.target, self.images + other.images, check=False)

    def __sub__(self, other: "FPMorphism") -> "FPMorphism":
        return FPMorphism(self.source, self.target, self.images - other.images, check=False)

    def scale(self, c) -> "FPMorphism":
        return FPMorphism(self.source, self.target, self.images.scale(c), check=False)

    def __matmul__(self, other: "FPMorphism") -> "FPMorphism":
        return compose_fp(self, other)

    def is_zero(self) -> bool:
        return self.images.is_zero()

    def __eq__(self, other):
        if not isinstance(other, FPMorphism):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.images.matrix == other.images.matrix)

    def __repr__(self):
        return f"FPMorphism({self.images.matrix!r})"


def _normalise(target: Presentation, images: GradedMatrix) -> GradedMatrix:
    m = images.matrix
    cols = []
    for j, a in enumerate(images.source):
        cols.append(target.quotient(a).normal_form(m.column(j)))
    mat = Matrix.from_columns(cols, m.rows, m.field) if cols else m
    return GradedMatrix(images.source, images.target, mat, check=False)


def compose_fp(g: FPMorphism, f: FPMorphism) -> FPMorphism:
    if f.target != g.source:
        raise ValueError("compose_fp: target of f is not the source of g")
    return FPMorphism(f.source, g.target, g.images @ f.images, check=False)


def identity_fp(P: Presentation) -> FPMorphism:
    return FPMorphism(P, P, GradedMatrix.identity(P.generators, P.field), check=False)


def zero_fp(P: Presentation, Q: Presentation) -> FPMorphism:
    return FPMorphism(P, Q, GradedMatrix.zero(P.generators, Q.generators, Q.field), check=False)


def shift_presentation(P: Presentation, eps) -> Presentation:
    return P.shift(eps)


def smoothing_fp(P: Presentation, eps) -> FPMorphism:
    """The smoothing ``P -> P[eps]``: every generator goes to itself."""
    if as_rational(eps) < 0:
        raise ValueError("smoothing needs eps >= 0")
    target = P.shift(eps)
    images = GradedMatrix(P.generators, target.generators,
                          Matrix.identity(len(P.generators), P.field), check=False)
    return FPMorphism(P, target, images, check=False)


def hom_space(P: Presentation, Q: Presentation) -> list[FPMorphism]:
    """Basis of the space of module morphisms ``P -> Q``.

    The unknowns are the coordinates of each generator image in ``Q`` at
    the generator's grade; each relation of ``P`` must map to zero.
    """
    if P.n != Q.n:
        raise ValueError("dimension mismatch")
    if P.field != Q.field:
        raise TypeError("field mismatch")
    field = Q.field
    unknowns = []  # (source generator, target basis generator)
    for j, a in enumerate(P.generators):
        for b in Q.quotient(a).basis:
            unknowns.append((j, b))
    rows = []
    rel = P.relations.matrix
    for r, c in enumerate(P.relation_grades):
        q = Q.quotient(c)
        if q.dim == 0:
            continue
        block = [q.unit_coords(b) for (_, b) in unknowns]
        coeff = [rel.data[j][r] for (j, _) in unknowns]
        for k in range(q.dim):
            rows.append([coeff[u] * block[u][k] for u in range(len(unknowns))])
    system = Matrix(rows, field, cols=len(unknowns)) if rows else Matrix.zeros(0, len(unknowns), field)
    basis = kernel_basis(system)
    out = []
    m = len(Q.generators)
    for vec in basis:
        mat = Matrix.zeros(m, len(P.generators), field)
        for (j, b), x in zip(unknowns, vec):
            if x:
                mat.data[b][j] = x
        out.append(FPMorphism(P, Q, GradedMatrix(P.generators, Q.generators, mat, check=False),
                              check=False))
    return out


# ---------------------------------------------------------------------------
# Minimal generators, kernels, resolutions.

def minimal_generators(F: FreeModule, subspace: Callable[[Grade], list], grid: Grid | None,
                       field: Field) -> list[tuple[Grade, list]]:
    """Minimal generators of a submodule ``S`` of the free module ``F``.

    ``subspace(s)`` returns spanning vectors of ``S(s)`` in ``F``
    coordinates.  Points are visited in lexicographic order; at each point
    the vectors not already spanned by generators below are kept.
    """
    chosen: list[tuple[Grade, list]] = []
    if grid is None:
        return chosen
    m = len(F)
    for s in grid.points():
        vecs = subspace(s)
        if not vecs:
            continue
        ech = Echelon(field, m)
        for g, v in chosen:
            if leq(g, s):
                ech.add(v)
        for v in vecs:
            if ech.add(v):
                chosen.append((s, list(v)))
    return chosen


def _generators_to_map(chosen, F: FreeModule, field: Field) -> tuple[FreeModule, GradedMatrix]:
    K = FreeModule([g for g, _ in chosen], F.n)
    mat = Matrix.from_columns([v for _, v in chosen], len(F), field)
    return K, GradedMatrix(K, F, mat, check=False)


def kernel_presentation(phi: GradedMatrix) -> tuple[FreeModule, GradedMatrix]:
    """Minimal free cover ``K -> source(phi)`` of ``ker(phi)``."""
    F = phi.source
    field = phi.field
    m = len(F)

    def subspace(s):
        sub, _, cols = phi.at(s)
        if not cols:
            return []
        out = []
        for v in kernel_basis(sub):
            full = [field.zero] * m
            for c, x in zip(cols, v):
                full[c] = x
            out.append(full)
        return out

    grid = critical_grid(F.grades) if len(F) else None
    return _generators_to_map(minimal_generators(F, subspace, grid, field), F, field)


def _submodule_relations(P: Presentation, cover: GradedMatrix, grid: Grid | None) -> list:
    """Minimal generators of ``ker(cover -> P)`` inside ``source(cover)``."""
    K = cover.source
    field = P.field
    m = len(K)
    cmat = cover.matrix

    def subspace(s):
        alive = K.alive(s)
        if not alive:
            return []
        q = P.quotient(s)
        cols = [q.coords(cmat.column(k)) for k in alive]
        sub = Matrix.from_columns(cols, q.dim, field)
        out = []
        for v in kernel_basis(sub):
            full = [field.zero] * m
            for c, x in zip(alive, v):
                full[c] = x
            out.append(full)
        return out

    return minimal_generators(K, subspace, grid, field)


def minimize_with_map(P: Presentation) -> tuple[Presentation, GradedMatrix]:
    """Minimal presentation of ``P`` and the generator map into ``P``.

    The map sends each new generator to its representative over the old
    generators; it induces an isomorphism of cokernels.
    """
    field = P.field
    grid = P.grid()
    G = P.generators
    chosen: list[tuple[Grade, int]] = []
    if grid is not None:
        for s in grid.points():
            q = P.quotient(s)
            if q.dim == 0:
                continue
            ech = Echelon(field, q.dim)
            for g, idx in chosen:
                if leq(g, s):
                    ech.add(q.unit_coords(idx))
            for b in q.basis:
                if ech.add(q.unit_coords(b)):
                    chosen.append((s, b))
    gens = FreeModule([g for g, _ in chosen], P.n)
    mat = Matrix.zeros(len(G), len(gens), field)
    for k, (_, idx) in enumerate(chosen):
        mat.data[idx][k] = field.one
    gen_map = GradedMatrix(gens, G, mat, check=False)
    rels = _submodule_relations(P, gen_map, grid)
    R, d = _generators_to_map(rels, gens, field)
    return Presentation(d, check=False), gen_map


def minimize(P: Presentation) -> Presentation:
    return minimize_with_map(P)[0]


def is_minimal(d: GradedMatrix) -> bool:
    """No nonzero entry between generators of equal grade."""
    for i, row in enumerate(d.matrix.data):
        for j, a in enumerate(row):
            if a and d.target[i] == d.source[j]:
                return False
    return True


def _resolve(P: Presentation, minimal: bool):
    from .complexes import FreeChainComplex

    if minimal:
        Pm, aug = minimize_with_map(P)
    else:
        Pm, aug = P, GradedMatrix.identity(P.generators, P.field)
    field = P.field
    terms = {0: Pm.generators}
    diffs = {}
    current = Pm.relations
    degree = -1
    if len(Pm.relation_grades):
        terms[-1] = Pm.relation_grades
        diffs[-1] = Pm.relations
        while True:
            K, incl = kernel_presentation(current)
            if not len(K):
                break
            degree -= 1
            if degree < -(P.n + 1):
                raise RuntimeError("resolution longer than the syzygy bound")
            terms[degree] = K
            diffs[degree] = incl
            current = incl
    return FreeChainComplex(terms, diffs, P.n, field, augmentation=aug, resolved=P)


def minimal_free_resolution(P: Presentation):
    """Minimal free resolution ``... -> F^-1 -> F^0``, augmented to ``P``."""
    key = ("mfr",)
    res = P._cache.get(key)
    if res is None:
        res = _resolve(P, minimal=True)
        P._cache[key] = res
    return res


def free_resolution(P: Presentation):
    """Resolution built on the given generators and relations (not minimised)."""
    key = ("fr",)
    res = P._cache.get(key)
    if res is None:
        res = _resolve(P, minimal=False)
        P._cache[key] = res
    return res


def betti(P: Presentation, i: int) -> dict:
    if i < 0:
        raise ValueError("Betti index must be nonnegative")
    return xi(minimal_free_resolution(P).term(-i))


def hilbert_function(P: Presentation, grid: Grid | None = None) -> dict:
    """Dimension of ``P`` at every grid point."""
    grid = grid or P.grid()
    if grid is None:
        return {}
    return {s: P.quotient(s).dim for s in grid.points()}


def grid_module_presentation(grid: Grid, dims: dict, maps: dict, field: Field = QQ) -> Presentation:
    """Presentation of a representation of a finite grid.

    ``dims[s]`` is the dimension at grid point ``s`` and ``maps[(s, t)]`` the
    matrix for each step ``s -> t`` to the next value along one axis.  The
    module is extended to all of ``Q^n`` by reading the value at the largest
    grid point below.  Every basis vector becomes a generator at its point;
    each step contributes the relations ``e - A e`` at the larger point.
    """
    offsets = {}
    grades = []
    for s in grid.points():
        offsets[s] = len(grades)
        grades.extend([s] * dims.get(s, 0))
    rels = []
    for s in grid.points():
        for i, ax in enumerate(grid.axes):
            k = ax.index(s[i])
            if k + 1 == len(ax):
                continue
            t = s[:i] + (ax[k + 1],) + s[i + 1:]
            A = maps.get((s, t))
            for col in range(dims.get(s, 0)):
                coeffs = [field.zero] * len(grades)
                coeffs[offsets[s] + col] = field.one
                for row in range(dims.get(t, 0)):
                    if A is not None and A[row, col]:
                        coeffs[offsets[t] + row] = coeffs[offsets[t] + row] - field(A[row, col])
                rels.append((t, coeffs))
    return Presentation.build(grades, rels, field, grid.n)
