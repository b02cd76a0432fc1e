"""Grades in Q^n with the product order, diagonal shifts and critical grids."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .field import format_rational, parse_rational

Grade = tuple  # tuple[Fraction, ...]


def grade(*coords) -> Grade:
    """Build a grade from numbers or "p/q" strings: ``grade(0, "1/2")``."""
    if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
        coords = tuple(coords[0])
    if not coords:
        raise ValueError("a grade needs at least one coordinate")
    return tuple(as_rational(c) for c in coords)


def as_rational(c) -> Fraction:
    """Exact rational from an int, Fraction or "p/q" string (floats rejected)."""
    if isinstance(c, str):
        return parse_rational(c)
    if isinstance(c, float):
        raise TypeError("grades must be exact rationals, not floats")
    return Fraction(c)


def _check_dims(a: Grade, b: Grade) -> None:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")


def leq(a: Grade, b: Grade) -> bool:
    _check_dims(a, b)
    return all(x <= y for x, y in zip(a, b))


def join(a: Grade, b: Grade) -> Grade:
    _check_dims(a, b)
    return tuple(max(x, y) for x, y in zip(a, b))


def meet(a: Grade, b: Grade) -> Grade:
    _check_dims(a, b)
    return tuple(min(x, y) for x, y in zip(a, b))


def shift_grade(a: Grade, eps) -> Grade:
    """Grade of the generator of ``F_a[eps]``, i.e. ``a - eps*(1,...,1)``."""
    eps = as_rational(eps)
    return tuple(x - eps for x in a)


def translate(a: Grade, eps) -> Grade:
    """``a + eps*(1,...,1)``: where ``M[eps]`` reads ``M``."""
    eps = as_rational(eps)
    return tuple(x + eps for x in a)


def format_grade(a: Grade) -> str:
    return "(" + ",".join(format_rational(x) for x in a) + ")"


def grade_to_json(a: Grade) -> list[str]:
    return [format_rational(x) for x in a]


def grade_from_json(data: Sequence) -> Grade:
    return grade(*[str(x) if not isinstance(x, int) else x for x in data])


@dataclass(frozen=True)
class Grid:
    """Finite product lattice; ``axes[i]`` is strictly increasing."""

    axes: tuple

    def __post_init__(self):
        for ax in self.axes:
            if not ax:
                raise ValueError("grid axes must be non-empty")
            if any(a >= b for a, b in zip(ax, ax[1:])):
                raise ValueError("grid axes must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.axes)

    def __len__(self) -> int:
        size = 1
        for ax in self.axes:
            size *= len(ax)
        return size

    def points(self) -> Iterator[Grade]:
        """All points in lexicographic order (a linear extension of <=)."""
        return iter(product(*self.axes))

    def __contains__(self, s: Grade) -> bool:
        return len(s) == self.n and all(x in ax for x, ax in zip(s, self.axes))

    def predecessors(self, s: Grade) -> list[Grade]:
        """Maximal grid points strictly below ``s``, one per axis."""
        out = []
        for i, ax in enumerate(self.axes):
            k = ax.index(s[i])
            if k > 0:
                out.append(s[:i] + (ax[k - 1],) + s[i + 1:])
        return out


def critical_grid(grades: Iterable[Grade], shifts: Iterable = ()) -> Grid:
    """Product grid of all coordinates, offset by each shift and each sum of two distinct shifts.

    Offsets follow the shift convention ``a - eps``.
    """
    grades = list(grades)
    if not grades:
        raise ValueError("critical_grid needs at least one grade")
    n = len(grades[0])
    for g in grades:
        if len(g) != n:
            raise ValueError("grades of mixed dimension")
    shifts = sorted({as_rational(e) for e in shifts})
    offsets = {Fraction(0)}
    offsets.update(shifts)
    offsets.update(a + b for a, b in combinations(shifts, 2))
    axes = []
    for i in range(n):
        vals = {g[i] - o for g in grades for o in offsets}
        axes.append(tuple(sorted(vals)))
    return Grid(tuple(axes))
