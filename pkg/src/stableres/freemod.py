"""Free persistence modules and grade-admissible matrices between them.

A free module is an ordered list of generator grades.  A morphism
``F_a -> F_b`` can only be nonzero when ``b <= a``, so a matrix with rows
indexed by target generators and columns by source generators is admissible
when every nonzero entry ``(i, j)`` satisfies ``target[i] <= source[j]``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .field import QQ, Field, Matrix
from .grading import Grade, as_rational, leq, shift_grade


class AdmissibilityError(ValueError):
    pass


@dataclass(frozen=True)
class FreeModule:
    grades: tuple
    n: int

    def __init__(self, grades: Sequence[Grade] = (), n: int | None = None):
        grades = tuple(tuple(g) for g in grades)
        if n is None:
            if not grades:
                raise ValueError("an empty free module needs an explicit dimension n")
            n = len(grades[0])
        for g in grades:
            if len(g) != n:
                raise ValueError(f"generator grade {g} is not in dimension {n}")
        object.__setattr__(self, "grades", grades)
        object.__setattr__(self, "n", n)

    def __len__(self) -> int:
        return len(self.grades)

    def __getitem__(self, i: int) -> Grade:
        return self.grades[i]

    def __iter__(self):
        return iter(self.grades)

    def alive(self, s: Grade) -> list[int]:
        return [i for i, g in enumerate(self.grades) if leq(g, s)]

    def shift(self, eps) -> "FreeModule":
        return FreeModule([shift_grade(g, eps) for g in self.grades], self.n)

    def direct_sum(self, other: "FreeModule") -> "FreeModule":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return FreeModule(self.grades + other.grades, self.n)

    def xi(self) -> dict:
        return xi(self)


def xi(F: FreeModule) -> dict:
    """Multiplicity of each generator grade."""
    return dict(sorted(Counter(F.grades).items()))


def shift_free(F: FreeModule, eps) -> FreeModule:
    return F.shift(eps)


def evaluate_free(F: FreeModule, s: Grade) -> list[int]:
    """Indices of generators alive at ``s``; ``dim F(s)`` is its length."""
    if len(s) != F.n:
        raise ValueError("dimension mismatch")
    return F.alive(s)


class GradedMatrix:
    """Morphism of free modules ``source -> target`` in fixed bases."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FreeModule, target: FreeModule, matrix: Matrix, check: bool = True):
        if matrix.shape != (len(target), len(source)):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match {len(target)}x{len(source)}"
            )
        if source.n != target.n:
            raise ValueError("source and target live in different dimensions")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            bad = self.inadmissible_entries()
            if bad:
                i, j = bad[0]
                raise AdmissibilityError(
                    f"entry ({i},{j}) maps generator of grade {source[j]} "
                    f"to generator of grade {target[i]}"
                )

    @classmethod
    def zero(cls, source: FreeModule, target: FreeModule, field: Field = QQ) -> "GradedMatrix":
        return cls(source, target, Matrix.zeros(len(target), len(source), field), check=False)

    @classmethod
    def identity(cls, F: FreeModule, field: Field = QQ) -> "GradedMatrix":
        return cls(F, F, Matrix.identity(len(F), field), check=False)

    @classmethod
    def from_rows(cls, source, target, rows, field: Field = QQ) -> "GradedMatrix":
        return cls(source, target, Matrix(rows, field, cols=len(source)))

    @property
    def field(self) -> Field:
        return self.matrix.field

    def inadmissible_entries(self) -> list[tuple[int, int]]:
        out = []
        for i, row in enumerate(self.matrix.data):
            for j, a in enumerate(row):
                if a and not leq(self.target[i], self.source[j]):
                    out.append((i, j))
        return out

    def is_admissible(self) -> bool:
        return not self.inadmissible_entries()

    def shift(self, eps) -> "GradedMatrix":
        return GradedMatrix(self.source.shift(eps), self.target.shift(eps), self.matrix, check=False)

    def at(self, s: Grade) -> tuple[Matrix, list[int], list[int]]:
        """Restriction to generators alive at ``s``: (matrix, rows, cols)."""
        rows = self.target.alive(s)
        cols = self.source.alive(s)
        return self.matrix.submatrix(rows, cols), rows, cols

    def over(self, field: Field) -> "GradedMatrix":
        m = Matrix([[field(a) for a in row] for row in self.matrix.data], field, cols=len(self.source))
        return GradedMatrix(self.source, self.target, m, check=False)

    def __add__(self, other: "GradedMatrix") -> "GradedMatrix":
        self._check_parallel(other)
        return GradedMatrix(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "GradedMatrix") -> "GradedMatrix":
        self._check_parallel(other)
        return GradedMatrix(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "GradedMatrix":
        return GradedMatrix(self.source, self.target, -self.matrix, check=False)

    def scale(self, c) -> "GradedMatrix":
        return GradedMatrix(self.source, self.target, self.matrix.scale(c), check=False)

    def __matmul__(self, other: "GradedMatrix") -> "GradedMatrix":
        return compose(self, other)

    def _check_parallel(self, other: "GradedMatrix") -> None:
        if self.source != other.source or self.target != other.target:
            raise ValueError("graded matrices have different source or target")

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.matrix == other.matrix
        )

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def __repr__(self):
        return f"GradedMatrix({len(self.source)}->{len(self.target)}, {self.matrix!r})"


def compose(g: GradedMatrix, f: GradedMatrix) -> GradedMatrix:
    """``g o f``; admissibility is inherited by transitivity of <=."""
    if g.source != f.target:
        raise ValueError("compose: source of g differs from target of f")
    return GradedMatrix(f.source, g.target, g.matrix @ f.matrix, check=False)


def smoothing_free(F: FreeModule, eps, field: Field = QQ) -> GradedMatrix:
    """The smoothing ``F -> F[eps]``: identity entries, admissible for eps >= 0."""
    if as_rational(eps) < 0:
        raise ValueError("smoothing needs eps >= 0")
    return GradedMatrix(F, F.shift(eps), Matrix.identity(len(F), field), check=False)
