"""Presentations of homology modules of bifiltered simplicial complexes.

A simplex graded by ``a`` enters the sublevel complex at every ``s >= a``.
The simplicial chain complex is then a complex of free modules whose
boundary maps are admissible exactly when grades are monotone along faces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .field import QQ, Field, Matrix
from .freemod import FreeModule, GradedMatrix
from .grading import Grade, as_rational, grade, join, leq
from .presentation import Presentation, kernel_presentation, minimize


class BifiltrationError(ValueError):
    pass


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    grade: Grade

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


class Bifiltration:
    """Finite simplicial complex with a monotone grade on every simplex."""

    def __init__(self, simplices: Iterable, n: int = 2):
        items = []
        for entry in simplices:
            if isinstance(entry, Simplex):
                verts, g = entry.vertices, entry.grade
            else:
                verts, g = entry
            verts = tuple(int(v) for v in verts)
            if not verts:
                raise BifiltrationError("empty simplex")
            if list(verts) != sorted(set(verts)):
                raise BifiltrationError(f"vertices {verts} must be strictly increasing")
            g = grade(g)
            if len(g) != n:
                raise BifiltrationError(f"simplex {verts} has a grade of dimension {len(g)}, expected {n}")
            items.append(Simplex(verts, g))
        self.n = n
        self.simplices = tuple(sorted(items, key=lambda s: (s.dim, s.vertices)))
        self._grade = {}
        for s in self.simplices:
            if s.vertices in self._grade:
                raise BifiltrationError(f"duplicate simplex {s.vertices}")
            self._grade[s.vertices] = s.grade
        self._check()

    def _check(self) -> None:
        for s in self.simplices:
            if s.dim == 0:
                continue
            for face in combinations(s.vertices, len(s.vertices) - 1):
                if face not in self._grade:
                    raise BifiltrationError(f"face {face} of {s.vertices} is missing")
                if not leq(self._grade[face], s.grade):
                    raise BifiltrationError(
                        f"face {face} enters after its coface {s.vertices}"
                    )

    def grade_of(self, vertices: Sequence[int]) -> Grade:
        return self._grade[tuple(vertices)]

    def of_dim(self, k: int) -> list[Simplex]:
        return [s for s in self.simplices if s.dim == k]

    @property
    def max_dim(self) -> int:
        return max((s.dim for s in self.simplices), default=-1)

    def all_grades(self) -> list[Grade]:
        return [s.grade for s in self.simplices]

    def sublevel(self, s: Grade) -> list[Simplex]:
        return [x for x in self.simplices if leq(x.grade, s)]

    def __len__(self):
        return len(self.simplices)

    def __eq__(self, other):
        return isinstance(other, Bifiltration) and self.simplices == other.simplices

    def __repr__(self):
        return f"Bifiltration({len(self)} simplices)"


def chain_module(K: Bifiltration, k: int) -> FreeModule:
    return FreeModule([s.grade for s in K.of_dim(k)], K.n)


def boundary_matrix(K: Bifiltration, k: int, field: Field = QQ) -> GradedMatrix:
    """Simplicial boundary ``C_k -> C_{k-1}`` as a graded matrix."""
    src = K.of_dim(k)
    tgt = K.of_dim(k - 1) if k > 0 else []
    index = {s.vertices: i for i, s in enumerate(tgt)}
    m = Matrix.zeros(len(tgt), len(src), field)
    if k > 0:
        for j, s in enumerate(src):
            for pos in range(len(s.vertices)):
                face = s.vertices[:pos] + s.vertices[pos + 1:]
                m[index[face], j] = field(-1 if pos % 2 else 1)
    return GradedMatrix(chain_module(K, k), FreeModule([t.grade for t in tgt], K.n), m)


def homology_presentation(K: Bifiltration, i: int, field: Field = QQ) -> Presentation:
    """Minimal presentation of the ``i``-th homology module of ``K``.

    Cycles come from the kernel of the boundary; relations are the syzygies
    of ``[incl | -d_{i+1}]`` projected onto the cycle generators.
    """
    if i < 0:
        raise ValueError("homology degree must be nonnegative")
    d_i = boundary_matrix(K, i, field)
    d_next = boundary_matrix(K, i + 1, field)
    Z, incl = kernel_presentation(d_i)
    if not len(Z):
        return Presentation.free(FreeModule((), K.n), field)
    C = d_i.source
    stacked = GradedMatrix(
        Z.direct_sum(d_next.source), C, incl.matrix.hstack(-d_next.matrix), check=False
    )
    S, syz = kernel_presentation(stacked)
    rel = Matrix.zeros(len(Z), len(S), field)
    for r in range(len(Z)):
        for c in range(len(S)):
            rel[r, c] = syz.matrix[r, c]
    return minimize(Presentation(GradedMatrix(S, Z, rel)))


def _offset(rng: random.Random, delta: Fraction, resolution: int) -> Fraction:
    return delta * Fraction(rng.randint(-resolution, resolution), resolution)


def perturb(K: Bifiltration, delta, seed=0, resolution: int = 10) -> Bifiltration:
    """Move every grade by at most ``delta`` per coordinate, then restore monotonicity.

    Offsets are multiples of ``delta / resolution``.  Monotonicity is restored
    by replacing each grade with its join over all faces, which keeps every
    coordinate within ``delta`` of the original.
    """
    delta = as_rational(delta)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    rng = random.Random(seed)
    moved = {}
    for s in K.simplices:
        g = tuple(x + _offset(rng, delta, resolution) for x in s.grade)
        if s.dim > 0:
            for face in combinations(s.vertices, len(s.vertices) - 1):
                g = join(g, moved[face])
        moved[s.vertices] = g
    return Bifiltration([(v, g) for v, g in moved.items()], K.n)


def sup_distance(K: Bifiltration, L: Bifiltration) -> Fraction:
    """Largest coordinate difference between grades of the same simplex."""
    if set(K._grade) != set(L._grade):
        raise ValueError("bifiltrations have different underlying complexes")
    return max(
        (abs(a - b) for v, g in K._grade.items() for a, b in zip(g, L._grade[v])),
        default=Fraction(0),
    )
