"""Bounded chain complexes of free modules, chain maps and homotopies.

Differentials raise degree: ``d^j: X^j -> X^{j+1}``, and resolutions live in
degrees ``<= 0``.  Linear problems about maps of complexes (is this map
nullhomotopic? what is the space of chain maps?) are set up over the
admissible matrix entries only and solved exactly.
"""

from __future__ import annotations

import random
from typing import Iterable

from .field import QQ, Echelon, Field, Matrix, kernel_basis, solve
from .freemod import FreeModule, GradedMatrix, compose
from .grading import Grade, as_rational, critical_grid, leq
from .presentation import FPMorphism, Presentation


class FreeChainComplex:
    """Finite complex of free modules with optional augmentation.

    ``augmentation`` (when set) maps ``X^0`` to the generators of the
    presentation ``resolved``; this is how a resolution remembers which
    module it resolves.
    """

    def __init__(self, terms: dict, diffs: dict | None = None, n: int | None = None,
                 field: Field = QQ, augmentation: GradedMatrix | None = None,
                 resolved: Presentation | None = None):
        terms = {int(j): F for j, F in terms.items() if len(F)}
        if n is None:
            if not terms:
                raise ValueError("an empty complex needs an explicit dimension n")
            n = next(iter(terms.values())).n
        self.n = n
        self.field = field
        self.terms = dict(sorted(terms.items()))
        self.diffs = {}
        for j, d in (diffs or {}).items():
            j = int(j)
            if j not in self.terms or j + 1 not in self.terms:
                if not d.is_zero():
                    raise ValueError(f"differential in degree {j} between missing terms")
                continue
            if d.source != self.terms[j] or d.target != self.terms[j + 1]:
                raise ValueError(f"differential in degree {j} has wrong source/target")
            if d.field != field:
                raise TypeError("differential over the wrong field")
            self.diffs[j] = d
        self.augmentation = augmentation
        self.resolved = resolved

    def term(self, j: int) -> FreeModule:
        return self.terms.get(j, FreeModule((), self.n))

    def diff(self, j: int) -> GradedMatrix:
        d = self.diffs.get(j)
        if d is None:
            return GradedMatrix.zero(self.term(j), self.term(j + 1), self.field)
        return d

    def degrees(self) -> list[int]:
        return list(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def all_grades(self) -> list[Grade]:
        return [g for F in self.terms.values() for g in F]

    def shift(self, eps) -> "FreeChainComplex":
        aug = self.augmentation.shift(eps) if self.augmentation is not None else None
        res = self.resolved.shift(eps) if self.resolved is not None else None
        return FreeChainComplex(
            {j: F.shift(eps) for j, F in self.terms.items()},
            {j: d.shift(eps) for j, d in self.diffs.items()},
            self.n, self.field, aug, res,
        )

    def over(self, field: Field) -> "FreeChainComplex":
        if field == self.field:
            return self
        aug = self.augmentation.over(field) if self.augmentation is not None else None
        res = self.resolved.over(field) if self.resolved is not None else None
        return FreeChainComplex(self.terms, {j: d.over(field) for j, d in self.diffs.items()},
                                self.n, field, aug, res)

    def direct_sum(self, other: "FreeChainComplex") -> "FreeChainComplex":
        degs = sorted(set(self.terms) | set(other.terms))
        terms = {j: self.term(j).direct_sum(other.term(j)) for j in degs}
        diffs = {}
        for j in degs:
            a, b = self.diff(j).matrix, other.diff(j).matrix
            m = Matrix.zeros(a.rows + b.rows, a.cols + b.cols, self.field)
            for i, row in enumerate(a.data):
                m.data[i][:a.cols] = row
            for i, row in enumerate(b.data):
                m.data[a.rows + i][a.cols:] = row
            diffs[j] = GradedMatrix(terms[j], terms.get(j + 1, FreeModule((), self.n)), m,
                                    check=False)
        return FreeChainComplex(terms, diffs, self.n, self.field)

    def without_augmentation(self) -> "FreeChainComplex":
        return FreeChainComplex(self.terms, self.diffs, self.n, self.field)

    def __eq__(self, other):
        if not isinstance(other, FreeChainComplex):
            return NotImplemented
        if self.terms != other.terms or self.field != other.field:
            return False
        return all(self.diff(j) == other.diff(j) for j in self.terms)

    def __repr__(self):
        sizes = ", ".join(f"{j}: {len(F)}" for j, F in self.terms.items())
        return f"FreeChainComplex({{{sizes}}}, field={self.field})"


def zero_complex(n: int, field: Field = QQ) -> FreeChainComplex:
    return FreeChainComplex({}, {}, n, field)


def validate(X: FreeChainComplex) -> bool:
    """Consecutive differentials compose to zero and all are admissible."""
    for j, d in X.diffs.items():
        if not d.is_admissible():
            return False
        nxt = X.diffs.get(j + 1)
        if nxt is not None and not compose(nxt, d).is_zero():
            return False
    return True


def shift_complex(X: FreeChainComplex, eps) -> FreeChainComplex:
    return X.shift(eps)


class ChainMap:
    """Degreewise graded matrices ``X^j -> Y^j``."""

    def __init__(self, source: FreeChainComplex, target: FreeChainComplex,
                 components: dict | None = None):
        if source.n != target.n:
            raise ValueError("dimension mismatch")
        if source.field != target.field:
            raise TypeError("field mismatch")
        self.source = source
        self.target = target
        self.components = {}
        for j, f in (components or {}).items():
            j = int(j)
            if f.source != source.term(j) or f.target != target.term(j):
                raise ValueError(f"component in degree {j} has wrong source/target")
            if len(f.source) and len(f.target):
                self.components[j] = f

    @property
    def field(self) -> Field:
        return self.source.field

    def at(self, j: int) -> GradedMatrix:
        f = self.components.get(j)
        if f is None:
            return GradedMatrix.zero(self.source.term(j), self.target.term(j), self.field)
        return f

    def degrees(self) -> list[int]:
        return sorted(set(self.source.terms) | set(self.target.terms))

    def commutes(self) -> bool:
        for j in self.degrees():
            left = compose(self.target.diff(j), self.at(j))
            right = compose(self.at(j + 1), self.source.diff(j))
            if left.matrix != right.matrix:
                return False
        return True

    def is_admissible(self) -> bool:
        return all(f.is_admissible() for f in self.components.values())

    def shift(self, eps) -> "ChainMap":
        return ChainMap(self.source.shift(eps), self.target.shift(eps),
                        {j: f.shift(eps) for j, f in self.components.items()})

    def _combine(self, other: "ChainMap", op) -> "ChainMap":
        if self.source != other.source or self.target != other.target:
            raise ValueError("chain maps are not parallel")
        degs = set(self.components) | set(other.components)
        return ChainMap(self.source, self.target,
                        {j: op(self.at(j), other.at(j)) for j in degs})

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return ChainMap(self.source, self.target, {j: -f for j, f in self.components.items()})

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {j: f.scale(c) for j, f in self.components.items()})

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        return compose_chain(self, other)

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.components.values())

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        return all(self.at(j).matrix == other.at(j).matrix for j in self.degrees())

    def __repr__(self):
        parts = ", ".join(f"{j}: {f.matrix!r}" for j, f in self.components.items())
        return f"ChainMap({{{parts}}})"


def compose_chain(g: ChainMap, f: ChainMap) -> ChainMap:
    if f.target != g.source:
        raise ValueError("compose_chain: target of f is not the source of g")
    degs = set(f.components) & set(g.components)
    return ChainMap(f.source, g.target, {j: compose(g.at(j), f.at(j)) for j in degs})


def identity_chain(X: FreeChainComplex) -> ChainMap:
    return ChainMap(X, X, {j: GradedMatrix.identity(F, X.field) for j, F in X.terms.items()})


def zero_chain(X: FreeChainComplex, Y: FreeChainComplex) -> ChainMap:
    return ChainMap(X, Y, {})


def smoothing_chain_map(X: FreeChainComplex, eps) -> ChainMap:
    """``X -> X[eps]`` with identity matrices in every degree."""
    if as_rational(eps) < 0:
        raise ValueError("smoothing needs eps >= 0")
    target = X.shift(eps)
    return ChainMap(X, target, {
        j: GradedMatrix(F, target.term(j), Matrix.identity(len(F), X.field), check=False)
        for j, F in X.terms.items()
    })


class Homotopy:
    """Components ``h^i: X^i -> Y^{i-1}``."""

    def __init__(self, source: FreeChainComplex, target: FreeChainComplex,
                 components: dict | None = None):
        self.source = source
        self.target = target
        self.components = {}
        for i, h in (components or {}).items():
            i = int(i)
            if h.source != source.term(i) or h.target != target.term(i - 1):
                raise ValueError(f"homotopy component {i} has wrong source/target")
            if len(h.source) and len(h.target):
                self.components[i] = h

    @property
    def field(self) -> Field:
        return self.source.field

    def at(self, i: int) -> GradedMatrix:
        h = self.components.get(i)
        if h is None:
            return GradedMatrix.zero(self.source.term(i), self.target.term(i - 1), self.field)
        return h

    def is_admissible(self) -> bool:
        return all(h.is_admissible() for h in self.components.values())

    def boundary(self) -> ChainMap:
        """The chain map ``d h + h d``."""
        X, Y = self.source, self.target
        comps = {}
        for i in sorted(set(X.terms) & set(Y.terms)):
            a = compose(Y.diff(i - 1), self.at(i))
            b = compose(self.at(i + 1), X.diff(i))
            comps[i] = a + b
        return ChainMap(X, Y, comps)

    def is_zero(self) -> bool:
        return all(h.is_zero() for h in self.components.values())

    def __repr__(self):
        parts = ", ".join(f"{i}: {h.matrix!r}" for i, h in self.components.items())
        return f"Homotopy({{{parts}}})"


def check_homotopy(phi: ChainMap, h: Homotopy) -> bool:
    """Exact re-check of ``phi = d h + h d`` in every degree."""
    if not h.is_admissible():
        return False
    return h.boundary() == phi


# ---------------------------------------------------------------------------
# Linear systems over admissible entries.

def map_positions(X: FreeChainComplex, Y: FreeChainComplex) -> list[tuple[int, int, int]]:
    """Admissible entries ``(degree, row, col)`` of degreewise maps ``X -> Y``."""
    out = []
    for j in X.degrees():
        S, T = X.term(j), Y.term(j)
        for r in range(len(T)):
            for c in range(len(S)):
                if leq(T[r], S[c]):
                    out.append((j, r, c))
    return out


def homotopy_positions(X: FreeChainComplex, Y: FreeChainComplex) -> list[tuple[int, int, int]]:
    """Admissible entries of ``h^i: X^i -> Y^{i-1}``, highest degree first."""
    out = []
    for i in sorted(X.degrees(), reverse=True):
        S, T = X.term(i), Y.term(i - 1)
        for r in range(len(T)):
            for c in range(len(S)):
                if leq(T[r], S[c]):
                    out.append((i, r, c))
    return out


def vectorize(phi: ChainMap, positions) -> list:
    cache = {}
    out = []
    for j, r, c in positions:
        m = cache.get(j)
        if m is None:
            m = cache[j] = phi.at(j).matrix
        out.append(m.data[r][c])
    return out


def chain_map_from_vector(X, Y, positions, vec) -> ChainMap:
    field = X.field
    mats = {}
    for (j, r, c), x in zip(positions, vec):
        if not x:
            continue
        m = mats.get(j)
        if m is None:
            m = mats[j] = Matrix.zeros(len(Y.term(j)), len(X.term(j)), field)
        m.data[r][c] = x
    return ChainMap(X, Y, {j: GradedMatrix(X.term(j), Y.term(j), m, check=False)
                           for j, m in mats.items()})


def homotopy_from_vector(X, Y, positions, vec) -> Homotopy:
    field = X.field
    mats = {}
    for (i, r, c), x in zip(positions, vec):
        if not x:
            continue
        m = mats.get(i)
        if m is None:
            m = mats[i] = Matrix.zeros(len(Y.term(i - 1)), len(X.term(i)), field)
        m.data[r][c] = x
    return Homotopy(X, Y, {i: GradedMatrix(X.term(i), Y.term(i - 1), m, check=False)
                           for i, m in mats.items()})


def homotopy_operator(X: FreeChainComplex, Y: FreeChainComplex):
    """Matrix of ``h -> d h + h d`` from homotopy entries to map entries.

    Returns ``(L, map_pos, hom_pos)``.
    """
    field = X.field
    mpos = map_positions(X, Y)
    hpos = homotopy_positions(X, Y)
    row_of = {p: k for k, p in enumerate(mpos)}
    L = Matrix.zeros(len(mpos), len(hpos), field)
    for v, (i, k, c) in enumerate(hpos):
        # d_Y^{i-1} h^i lands in degree i
        dY = Y.diff(i - 1).matrix
        for r in range(dY.rows):
            a = dY.data[r][k]
            if a:
                L.data[row_of[(i, r, c)]][v] += a
        # h^i d_X^{i-1} lands in degree i-1
        dX = X.diff(i - 1).matrix
        for c2 in range(dX.cols):
            a = dX.data[c][c2]
            if a:
                L.data[row_of[(i - 1, k, c2)]][v] += a
    return L, mpos, hpos


def chain_constraints(X: FreeChainComplex, Y: FreeChainComplex):
    """Matrix whose kernel is the space of chain maps; columns follow map_positions."""
    field = X.field
    mpos = map_positions(X, Y)
    eqs = []
    for j in X.degrees():
        S, T = X.term(j), Y.term(j + 1)
        for r in range(len(T)):
            for c in range(len(S)):
                if leq(T[r], S[c]):
                    eqs.append((j, r, c))
    row_of = {p: k for k, p in enumerate(eqs)}
    C = Matrix.zeros(len(eqs), len(mpos), field)
    for v, (j, k, c) in enumerate(mpos):
        dY = Y.diff(j).matrix
        for r in range(dY.rows):
            a = dY.data[r][k]
            if a:
                C.data[row_of[(j, r, c)]][v] += a
        dX = X.diff(j - 1).matrix
        for c2 in range(dX.cols):
            a = dX.data[c][c2]
            if a:
                C.data[row_of[(j - 1, k, c2)]][v] -= a
    return C, mpos


def is_nullhomotopic(phi: ChainMap) -> Homotopy | None:
    """A homotopy ``h`` with ``phi = d h + h d``, or ``None``."""
    X, Y = phi.source, phi.target
    L, mpos, hpos = homotopy_operator(X, Y)
    b = vectorize(phi, mpos)
    if not any(b):
        return Homotopy(X, Y, {})
    x = solve(L, b)
    if x is None:
        return None
    return homotopy_from_vector(X, Y, hpos, x)


def chain_map_space(X: FreeChainComplex, Y: FreeChainComplex) -> list[ChainMap]:
    C, mpos = chain_constraints(X, Y)
    return [chain_map_from_vector(X, Y, mpos, v) for v in kernel_basis(C)]


def homotopy_classes(X: FreeChainComplex, Y: FreeChainComplex) -> list[ChainMap]:
    """Chain maps whose classes form a basis of maps modulo nullhomotopic ones."""
    C, mpos = chain_constraints(X, Y)
    L, _, _ = homotopy_operator(X, Y)
    ech = Echelon(X.field, len(mpos))
    for j in range(L.cols):
        ech.add(L.column(j))
    out = []
    for v in kernel_basis(C):
        if ech.add(v):
            out.append(chain_map_from_vector(X, Y, mpos, v))
    return out


# ---------------------------------------------------------------------------
# Resolutions.

def _augmentation(X: FreeChainComplex) -> GradedMatrix:
    if X.resolved is None:
        raise ValueError("complex does not record the module it resolves")
    if X.augmentation is not None:
        return X.augmentation
    return GradedMatrix.identity(X.resolved.generators, X.field)


def _solve_alive(d: GradedMatrix, y: list, a: Grade, rng: random.Random | None):
    """Solve ``d x = y`` using source generators alive at ``a``."""
    sub, rows, cols = d.at(a)
    field = d.field
    alive_rows = set(rows)
    if any(y[i] for i in range(len(y)) if i not in alive_rows):
        return None
    x = solve(sub, [y[i] for i in rows]) if cols else ([] if not any(y) else None)
    if x is None:
        return None
    if rng is not None and cols:
        for v in kernel_basis(sub):
            c = field(rng.randrange(-3, 4))
            x = [xi + c * vi for xi, vi in zip(x, v)]
    full = [field.zero] * len(d.source)
    for c, xi in zip(cols, x):
        full[c] = xi
    return full


def lift_resolution(f: FPMorphism, PX: FreeChainComplex, PY: FreeChainComplex,
                    rng: random.Random | None = None) -> ChainMap:
    """Chain map ``PX -> PY`` inducing ``f`` on degree-zero cokernels.

    With ``rng`` given, each particular solution is perturbed by a random
    kernel element, giving an independently constructed lift.
    """
    P, Q = f.source, f.target
    field = f.field
    alpha_X, alpha_Y = _augmentation(PX), _augmentation(PY)
    if PX.resolved != P or PY.resolved != Q:
        raise ValueError("resolutions do not resolve the source and target of f")
    comps = {}
    X0, Y0 = PX.term(0), PY.term(0)
    # degree 0: alpha_Y f0 = f alpha_X modulo the relations of Q
    target_cols = (f.images @ alpha_X).matrix if len(X0) else None
    m0 = Matrix.zeros(len(Y0), len(X0), field)
    for c, a in enumerate(X0):
        q = Q.quotient(a)
        rhs = q.coords(target_cols.column(c))
        alive = Y0.alive(a)
        cols = [q.coords(alpha_Y.matrix.column(k)) for k in alive]
        sub = Matrix.from_columns(cols, q.dim, field)
        x = solve(sub, rhs)
        if x is None:
            raise ValueError("cannot lift in degree 0: target complex is not a resolution")
        if rng is not None:
            for v in kernel_basis(sub):
                cc = field(rng.randrange(-3, 4))
                x = [xi + cc * vi for xi, vi in zip(x, v)]
        for k, xi in zip(alive, x):
            m0.data[k][c] = xi
    comps[0] = GradedMatrix(X0, Y0, m0, check=False)
    j = -1
    while PX.term(j) and j >= min(PX.degrees(), default=0):
        Xj, Yj = PX.term(j), PY.term(j)
        upper = compose(comps[j + 1], PX.diff(j))
        mj = Matrix.zeros(len(Yj), len(Xj), field)
        for c, a in enumerate(Xj):
            y = upper.matrix.column(c)
            if not any(y):
                continue
            x = _solve_alive(PY.diff(j), y, a, rng)
            if x is None:
                raise ValueError(f"cannot lift in degree {j}: target complex is not exact")
            for k, xi in enumerate(x):
                mj.data[k][c] = xi
        comps[j] = GradedMatrix(Xj, Yj, mj, check=False)
        j -= 1
    return ChainMap(PX, PY, comps)


def induced_on_cokernel(phi: ChainMap) -> FPMorphism:
    """The module morphism ``H^0(phi)`` between the resolved presentations."""
    PX, PY = phi.source, phi.target
    P, Q = PX.resolved, PY.resolved
    if P is None or Q is None:
        raise ValueError("both complexes must record the modules they resolve")
    alpha_X, alpha_Y = _augmentation(PX), _augmentation(PY)
    field = P.field
    X0 = PX.term(0)
    images = Matrix.zeros(len(Q.generators), len(P.generators), field)
    to_target = compose(alpha_Y, phi.at(0)).matrix
    for j, a in enumerate(P.generators):
        q = P.quotient(a)
        alive = X0.alive(a)
        cols = [q.coords(alpha_X.matrix.column(k)) for k in alive]
        sub = Matrix.from_columns(cols, q.dim, field)
        x = solve(sub, q.unit_coords(j) if j in q.alive else [field.zero] * q.dim)
        if x is None:
            raise ValueError("augmentation is not surjective")
        pre = [field.zero] * len(X0)
        for k, xi in zip(alive, x):
            pre[k] = xi
        img = to_target.apply(pre)
        for i, v in enumerate(img):
            images.data[i][j] = v
    return FPMorphism(P, Q, GradedMatrix(P.generators, Q.generators, images, check=False))


def _rank_at(d: GradedMatrix, s: Grade) -> int:
    sub, rows, cols = d.at(s)
    if not rows or not cols:
        return 0
    return sub.rank()


def verify_resolution(P: Presentation, X: FreeChainComplex) -> bool:
    """Check that ``X`` is a free resolution of ``P`` on the critical grid.

    Without a recorded augmentation the generators of ``X^0`` are taken to
    be the generators of ``P``.
    """
    if X.field != P.field or X.n != P.n:
        return False
    if any(j > 0 for j in X.degrees()) or not validate(X):
        return False
    if X.augmentation is not None:
        alpha = X.augmentation
        if alpha.source != X.term(0) or alpha.target != P.generators:
            return False
    else:
        if X.term(0) != P.generators:
            return False
        alpha = GradedMatrix.identity(P.generators, P.field)
    if not alpha.is_admissible():
        return False
    # relations of X map to zero in P
    comp = compose(alpha, X.diff(-1)) if len(X.term(-1)) else None
    if comp is not None:
        for c, a in enumerate(X.term(-1)):
            if any(P.quotient(a).normal_form(comp.matrix.column(c))):
                return False
    grades = X.all_grades() + P.all_grades()
    if not grades:
        return True
    grid = critical_grid(grades)
    low = min(X.degrees(), default=0)
    for s in grid.points():
        q = P.quotient(s)
        alive0 = X.term(0).alive(s)
        if alive0:
            img = Matrix.from_columns([q.coords(alpha.matrix.column(k)) for k in alive0],
                                      q.dim, P.field)
            r0 = img.rank()
        else:
            r0 = 0
        if r0 != q.dim:
            return False
        if len(alive0) - r0 != _rank_at(X.diff(-1), s):
            return False
        for j in range(-1, low - 1, -1):
            dim_j = len(X.term(j).alive(s))
            if dim_j - _rank_at(X.diff(j), s) != _rank_at(X.diff(j - 1), s):
                return False
    return True


# ---------------------------------------------------------------------------
# Cohomology at grid points.

def _cycles(X: FreeChainComplex, j: int, s: Grade) -> list[list]:
    d = X.diff(j)
    sub, rows, cols = d.at(s)
    m = len(X.term(j))
    field = X.field
    out = []
    basis = kernel_basis(sub) if rows else [
        [field.one if k == i else field.zero for k in range(len(cols))] for i in range(len(cols))
    ]
    for v in basis:
        full = [field.zero] * m
        for c, x in zip(cols, v):
            full[c] = x
        out.append(full)
    return out


def _boundaries(X: FreeChainComplex, j: int, s: Grade) -> list[list]:
    d = X.diff(j - 1)
    cols = d.source.alive(s)
    return [d.matrix.column(c) for c in cols]


def cohomology_dim(X: FreeChainComplex, j: int, s: Grade) -> int:
    return len(_cycles(X, j, s)) - _rank_at(X.diff(j - 1), s)


def cohomology_rank(X: FreeChainComplex, j: int, s: Grade, t: Grade) -> int:
    """Rank of ``H^j(X)(s <= t)``."""
    m = len(X.term(j))
    if not m:
        return 0
    ech = Echelon(X.field, m)
    for v in _boundaries(X, j, t):
        ech.add(v)
    base = len(ech)
    for v in _cycles(X, j, s):
        ech.add(v)
    return len(ech) - base


def cohomology_degrees(X: FreeChainComplex) -> Iterable[int]:
    return X.degrees()
