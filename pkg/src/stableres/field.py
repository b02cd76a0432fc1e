"""Exact scalars and dense matrices.

Two kinds of field are supported: the rationals (elements are
:class:`fractions.Fraction`) and prime fields GF(p) (elements are instances
of an ``int`` subclass generated per prime).  Every matrix remembers its
field; mixing scalar kinds raises ``TypeError``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class _ModElement(int):
    """Residue modulo ``p``; concrete subclasses set ``p``."""

    p: int = 0
    __slots__ = ()

    def __new__(cls, value=0):
        return int.__new__(cls, int(value) % cls.p)

    def _coerce(self, other):
        if isinstance(other, _ModElement):
            if other.p != self.p:
                raise TypeError(f"cannot mix GF({self.p}) and GF({other.p})")
            return int(other)
        if isinstance(other, Fraction) or isinstance(other, float):
            raise TypeError("cannot mix GF(p) and rational scalars")
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(int(self) + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(int(self) - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(o - int(self))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(int(self) * o)

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(-int(self))

    def __pos__(self):
        return self

    def inverse(self):
        if int(self) == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return type(self)(pow(int(self), -1, self.p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * type(self)(o).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(o) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, _ModElement) and other.p != self.p:
            return False
        if isinstance(other, int):
            return int(self) == int(other) % self.p
        return NotImplemented

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = int.__hash__

    def __repr__(self):
        return f"{int(self)} mod {self.p}"

    def __str__(self):
        return str(int(self))


class RationalField:
    """The field of rational numbers."""

    characteristic = 0
    name = "rational"
    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, value) -> Fraction:
        if isinstance(value, _ModElement):
            raise TypeError("cannot coerce a GF(p) element to a rational")
        if isinstance(value, str):
            return parse_rational(value)
        if isinstance(value, float):
            raise TypeError("floating point scalars are not accepted")
        return Fraction(value)

    def format(self, a: Fraction) -> str:
        return format_rational(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """GF(p) for a prime ``p``."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"gf:{p}"
        self.element = _element_class(p)
        self.zero = self.element(0)
        self.one = self.element(1)

    def __call__(self, value):
        if isinstance(value, _ModElement):
            if value.p != self.p:
                raise TypeError(f"cannot coerce GF({value.p}) element into GF({self.p})")
            return value
        if isinstance(value, str):
            value = parse_rational(value)
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise ValueError(f"{value} has no image in GF({self.p})")
            return self.element(value.numerator * pow(den, -1, self.p))
        if isinstance(value, float):
            raise TypeError("floating point scalars are not accepted")
        return self.element(value)

    def format(self, a) -> str:
        return str(int(a))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


@lru_cache(maxsize=None)
def _element_class(p: int) -> type:
    return type(f"GF{p}", (_ModElement,), {"p": p, "__slots__": ()})


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


Field = RationalField | PrimeField


def field_from_name(name: str) -> Field:
    """Parse a field selector: ``"rational"`` or ``"gf:p"``."""
    name = name.strip().lower()
    if name in ("rational", "q", "qq"):
        return QQ
    if name.startswith("gf:"):
        try:
            p = int(name[3:])
        except ValueError:
            raise ValueError(f"bad field selector {name!r}") from None
        return GF(p)
    raise ValueError(f"bad field selector {name!r}")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def format_rational(a) -> str:
    a = Fraction(a)
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


class Matrix:
    """Dense matrix over an exact field, stored as a list of rows."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence], field: Field = QQ, cols: int | None = None):
        self.field = field
        self.data = [[field(x) for x in row] for row in data]
        self.rows = len(self.data)
        if cols is None:
            cols = len(self.data[0]) if self.data else 0
        self.cols = cols
        for row in self.data:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")

    @classmethod
    def _raw(cls, data: list[list], rows: int, cols: int, field: Field) -> "Matrix":
        m = cls.__new__(cls)
        m.field, m.data, m.rows, m.cols = field, data, rows, cols
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int, field: Field = QQ) -> "Matrix":
        z = field.zero
        return cls._raw([[z] * cols for _ in range(rows)], rows, cols, field)

    @classmethod
    def identity(cls, size: int, field: Field = QQ) -> "Matrix":
        m = cls.zeros(size, size, field)
        for i in range(size):
            m.data[i][i] = field.one
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int, field: Field = QQ) -> "Matrix":
        data = [[field(col[i]) for col in columns] for i in range(rows)]
        return cls._raw(data, rows, len(columns), field)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def copy(self) -> "Matrix":
        return Matrix._raw([row[:] for row in self.data], self.rows, self.cols, self.field)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __setitem__(self, ij, value):
        i, j = ij
        self.data[i][j] = self.field(value)

    def column(self, j: int) -> list:
        return [row[j] for row in self.data]

    def transpose(self) -> "Matrix":
        data = [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)]
        return Matrix._raw(data, self.cols, self.rows, self.field)

    T = property(transpose)

    def _check_same(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise TypeError(f"field mismatch: {self.field} vs {other.field}")
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        data = [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)]
        return Matrix._raw(data, self.rows, self.cols, self.field)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        data = [[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)]
        return Matrix._raw(data, self.rows, self.cols, self.field)

    def __neg__(self) -> "Matrix":
        return Matrix._raw([[-a for a in r] for r in self.data], self.rows, self.cols, self.field)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        return Matrix._raw([[c * a for a in r] for r in self.data], self.rows, self.cols, self.field)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise TypeError(f"field mismatch: {self.field} vs {other.field}")
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        zero = self.field.zero
        ocols = other.cols
        odata = other.data
        out = []
        for row in self.data:
            acc = [zero] * ocols
            for k, a in enumerate(row):
                if a:
                    orow = odata[k]
                    for j in range(ocols):
                        b = orow[j]
                        if b:
                            acc[j] = acc[j] + a * b
            out.append(acc)
        return Matrix._raw(out, self.rows, ocols, self.field)

    def apply(self, v: Sequence) -> list:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        zero = self.field.zero
        out = []
        for row in self.data:
            acc = zero
            for a, b in zip(row, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        data = [[self.data[i][j] for j in cols] for i in rows]
        return Matrix._raw(data, len(rows), len(cols), self.field)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows or self.field != other.field:
            raise ValueError("hstack needs equal row counts and fields")
        data = [r + s for r, s in zip(self.data, other.data)]
        return Matrix._raw(data, self.rows, self.cols + other.cols, self.field)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols or self.field != other.field:
            raise ValueError("vstack needs equal column counts and fields")
        data = [r[:] for r in self.data] + [r[:] for r in other.data]
        return Matrix._raw(data, self.rows + other.rows, self.cols, self.field)

    def is_zero(self) -> bool:
        return not any(a for row in self.data for a in row)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.data == other.data

    def __repr__(self):
        body = "; ".join(" ".join(self.field.format(a) for a in row) for row in self.data)
        return f"Matrix[{self.rows}x{self.cols} over {self.field}]({body})"

    def to_rows(self) -> list[list[str]]:
        return [[self.field.format(a) for a in row] for row in self.data]

    def rref(self) -> tuple["Matrix", list[int], int]:
        return rref(self)

    def rank(self) -> int:
        return rref(self)[2]

    def kernel_basis(self) -> list[list]:
        return kernel_basis(self)

    def solve(self, b: Sequence):
        return solve(self, b)


def _rref_rows(data: list[list], cols: int) -> list[int]:
    """Row-reduce ``data`` in place (leftmost-nonzero pivoting); return pivots."""
    pivots = []
    r = 0
    nrows = len(data)
    for c in range(cols):
        if r == nrows:
            break
        pr = None
        for i in range(r, nrows):
            if data[i][c]:
                pr = i
                break
        if pr is None:
            continue
        data[r], data[pr] = data[pr], data[r]
        prow = data[r]
        inv = 1 / prow[c]
        if inv != 1:
            for j in range(c, cols):
                prow[j] = prow[j] * inv
        for i in range(nrows):
            if i != r:
                row = data[i]
                f = row[c]
                if f:
                    for j in range(c, cols):
                        if prow[j]:
                            row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: Matrix) -> tuple[Matrix, list[int], int]:
    """Reduced row echelon form; returns ``(R, pivot_columns, rank)``."""
    data = [row[:] for row in m.data]
    pivots = _rref_rows(data, m.cols)
    return Matrix._raw(data, m.rows, m.cols, m.field), pivots, len(pivots)


def rank(m: Matrix) -> int:
    return rref(m)[2]


def kernel_basis(m: Matrix) -> list[list]:
    """Basis of the right null space.

    One vector per non-pivot column of the RREF, scaled so that its first
    nonzero entry is one.
    """
    R, pivots, _ = rref(m)
    field = m.field
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [field.zero] * m.cols
        v[free] = field.one
        for i, pc in enumerate(pivots):
            if pc < free:
                v[pc] = -R.data[i][free]
        lead = next(a for a in v if a)
        if lead != 1:
            inv = 1 / lead
            v = [a * inv for a in v]
        basis.append(v)
    return basis


def solve(m: Matrix, b: Sequence):
    """Some ``x`` with ``m x = b``, or ``None`` when inconsistent.

    Free variables are set to zero, so the answer is the particular solution
    read off the RREF of ``[m | b]``.
    """
    if len(b) != m.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m.rows}")
    field = m.field
    data = [row[:] + [field(bi)] for row, bi in zip(m.data, b)]
    pivots = _rref_rows(data, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [field.zero] * m.cols
    for i, pc in enumerate(pivots):
        x[pc] = data[i][m.cols]
    return x


class Echelon:
    """Incrementally maintained echelon basis of a subspace of k^n."""

    def __init__(self, field: Field, n: int):
        self.field = field
        self.n = n
        self.rows: list[list] = []
        self.pivots: list[int] = []

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: Sequence) -> list:
        v = list(v)
        for row, pc in zip(self.rows, self.pivots):
            f = v[pc]
            if f:
                for j in range(pc, self.n):
                    if row[j]:
                        v[j] = v[j] - f * row[j]
        return v

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def add(self, v: Sequence) -> bool:
        """Insert ``v``; return whether it enlarged the span."""
        w = self.reduce(v)
        pc = next((j for j, a in enumerate(w) if a), None)
        if pc is None:
            return False
        inv = 1 / w[pc]
        w = [a * inv for a in w]
        for row in self.rows:
            f = row[pc]
            if f:
                for j in range(pc, self.n):
                    if w[j]:
                        row[j] = row[j] - f * w[j]
        idx = 0
        while idx < len(self.pivots) and self.pivots[idx] < pc:
            idx += 1
        self.rows.insert(idx, w)
        self.pivots.insert(idx, pc)
        return True


def matrix(rows: Iterable[Iterable], field: Field = QQ) -> Matrix:
    return Matrix([list(r) for r in rows], field)


# ---------------------------------------------------------------------------
# Integer fast path for enumeration over GF(p).

def solve_mod_p(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Solve ``A x = b`` over GF(p) with int64 arrays; free variables zero."""
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    M = np.concatenate([A, b], axis=1)
    nrows, ncols = M.shape
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        piv = int(M[r, c])
        if piv != 1:
            M[r] = (M[r] * pow(piv, -1, p)) % p
        col = M[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            M[rows] = (M[rows] - np.outer(col[rows], M[r])) % p
        pivots.append(c)
        r += 1
    if pivots and pivots[-1] == ncols - 1:
        return None
    x = np.zeros(ncols - 1, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = M[i, -1]
    return x


def solvable_mod_p(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """For a stack ``A[k]`` of matrices, whether ``A[k] x = b`` is solvable over GF(p).

    Eliminates all systems at once; each one keeps its own pivot row counter.
    """
    M = np.concatenate(
        [np.asarray(A, dtype=np.int64) % p,
         np.broadcast_to(np.asarray(b, dtype=np.int64).reshape(1, -1, 1) % p,
                         (A.shape[0], A.shape[1], 1))],
        axis=2,
    )
    batch, nrows, ncols = M.shape
    inverse = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)
    row_index = np.arange(nrows)
    r = np.zeros(batch, dtype=np.int64)
    for c in range(ncols - 1):
        mask = (M[:, :, c] != 0) & (row_index[None, :] >= r[:, None])
        live = np.nonzero(mask.any(axis=1))[0]
        if live.size == 0:
            continue
        rl = r[live]
        pr = mask[live].argmax(axis=1)
        pivot_rows = M[live, pr].copy()
        M[live, pr] = M[live, rl]
        pivot_rows = (pivot_rows * inverse[pivot_rows[:, c]][:, None]) % p
        M[live, rl] = pivot_rows
        col = M[live, :, c].copy()
        col[np.arange(live.size), rl] = 0
        M[live] = (M[live] - col[:, :, None] * pivot_rows[:, None, :]) % p
        r[live] += 1
    below = row_index[None, :] >= r[:, None]
    return ~((M[:, :, -1] != 0) & below).any(axis=1)
