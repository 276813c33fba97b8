"""Exact rational linear algebra: matrices over `fractions.Fraction`,
reduced row echelon forms, kernels, solves, and the subspace lattice.

All arithmetic is exact. Subspaces are canonically represented by the
reduced row echelon form of a spanning set, so two subspaces are equal
exactly when their representations are equal; that decidable equality is
what the structure tests in the rest of the package lean on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, PreconditionError

Scalar = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


def frac(value) -> Fraction:
    """Coerce ints, exact strings like ``"3/4"``, and Fractions."""
    if type(value) is Fraction:
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass an int, Fraction or 'p/q' string")
    return Fraction(value)


def vec(values) -> tuple[Fraction, ...]:
    return tuple(v if type(v) is Fraction else frac(v) for v in values)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True, eq=True)
class Matrix:
    """Dense rational matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> Matrix:
        rows = [vec(r) for r in rows]
        n = len(rows[0]) if rows else 0
        if any(len(r) != n for r in rows):
            raise ValueError("ragged rows")
        return Matrix(len(rows), n, tuple(x for r in rows for x in r))

    @staticmethod
    def from_cols(cols: Sequence[Sequence]) -> Matrix:
        return Matrix.from_rows(cols).transpose() if cols else Matrix(0, 0, ())

    @staticmethod
    def identity(n: int) -> Matrix:
        return Matrix(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    @staticmethod
    def zero(rows: int, cols: int) -> Matrix:
        return Matrix(rows, cols, (ZERO,) * (rows * cols))

    def at(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> Matrix:
        return Matrix(self.cols, self.rows,
                      tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ot = other.transpose()
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                c = ot.row(j)
                out.append(sum((a * b for a, b in zip(r, c) if a and b), ZERO))
        return Matrix(self.rows, other.cols, tuple(out))

    def mul_vec(self, v: Sequence) -> tuple[Fraction, ...]:
        v = vec(v)
        if len(v) != self.cols:
            raise DimensionMismatch("vector length does not match matrix columns")
        return tuple(sum((a * b for a, b in zip(self.row(i), v) if a and b), ZERO)
                     for i in range(self.rows))

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)


# ---------------------------------------------------------------------------
# row reduction


def _rref_rows(rows: list[list[Fraction]], stop_rank: int | None = None) -> tuple[list[list[Fraction]], int]:
    """In-place RREF of a list of rows; returns (rows, rank).

    ``stop_rank`` allows an early exit once the rank is known to have
    reached that value (sound when only the rank, or triviality of the
    kernel, is needed).
    """
    if not rows:
        return rows, 0
    pivots: list[tuple[int, list[Fraction]]] = []  # (pivot col, row)
    for raw in rows:
        r = raw
        for pc, prow in pivots:
            c = r[pc]
            if c:
                r = [a - c * b if b else a for a, b in zip(r, prow)]
        lead = next((j for j, x in enumerate(r) if x), None)
        if lead is None:
            continue
        inv = ONE / r[lead]
        r = [x * inv if x else x for x in r]
        pivots.append((lead, r))
        pivots.sort(key=lambda t: t[0])
        if stop_rank is not None and len(pivots) >= stop_rank:
            return [p[1] for p in pivots], len(pivots)
    # clear above pivots
    ordered = [p[1] for p in pivots]
    cols = [p[0] for p in pivots]
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            c = ordered[i][cols[j]]
            if c:
                ordered[i] = [a - c * b if b else a for a, b in zip(ordered[i], ordered[j])]
    return ordered, len(ordered)


class RowEchelon:
    """Incrementally maintained reduced row echelon over fixed columns.

    Supports streaming constraint rows and reading off the kernel without
    reprocessing earlier rows.
    """

    def __init__(self, cols: int):
        self.cols = cols
        self.pivots: list[int] = []
        self.rows: list[list[Fraction]] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def insert(self, row) -> bool:
        r = list(row)
        for pc, prow in zip(self.pivots, self.rows):
            c = r[pc]
            if c:
                r = [a - c * b if b else a for a, b in zip(r, prow)]
        lead = next((j for j, x in enumerate(r) if x), None)
        if lead is None:
            return False
        inv = ONE / r[lead]
        r = [x * inv if x else x for x in r]
        for i, pc in enumerate(self.pivots):
            c = self.rows[i][lead]
            if c:
                self.rows[i] = [a - c * b if b else a for a, b in zip(self.rows[i], r)]
        at = next((i for i, pc in enumerate(self.pivots) if pc > lead), len(self.pivots))
        self.pivots.insert(at, lead)
        self.rows.insert(at, r)
        return True

    def kernel_vectors(self) -> list[list[Fraction]]:
        pivot_set = set(self.pivots)
        free = [j for j in range(self.cols) if j not in pivot_set]
        out = []
        for f in free:
            v = [ZERO] * self.cols
            v[f] = ONE
            for pc, r in zip(self.pivots, self.rows):
                v[pc] = -r[f]
            out.append(v)
        return out


def rref(m: Matrix) -> tuple[Matrix, int]:
    """Unique reduced row echelon form and rank."""
    reduced, rank = _rref_rows(m.row_list())
    out = reduced + [[ZERO] * m.cols for _ in range(m.rows - rank)]
    return Matrix.from_rows(out) if m.rows else m, rank


def rank(m: Matrix) -> int:
    return _rref_rows(m.row_list())[1]


def kernel_basis(rows: list[list[Fraction]], cols: int) -> list[list[Fraction]]:
    """Basis of {v : R v = 0} for constraint rows R, in RREF order."""
    reduced, rk = _rref_rows([r for r in rows if any(r)], stop_rank=None)
    if rk == cols:
        return []
    pivot_cols = []
    for r in reduced:
        pivot_cols.append(next(j for j, x in enumerate(r) if x))
    pivot_set = set(pivot_cols)
    free_cols = [j for j in range(cols) if j not in pivot_set]
    basis = []
    for f in free_cols:
        v = [ZERO] * cols
        v[f] = ONE
        for pc, r in zip(pivot_cols, reduced):
            v[pc] = -r[f]
        basis.append(v)
    return basis


def kernel(m: Matrix) -> Subspace:
    """Kernel of the linear map v -> m v, as a subspace of the column space."""
    return Subspace.from_vectors(m.cols, kernel_basis(m.row_list(), m.cols))


def solve(m: Matrix, rhs: Sequence) -> tuple[Fraction, ...] | None:
    """One exact solution of ``m x = rhs``, or None if inconsistent."""
    b = vec(rhs)
    if len(b) != m.rows:
        raise DimensionMismatch("right-hand side length does not match rows")
    aug = [list(m.row(i)) + [b[i]] for i in range(m.rows)]
    reduced, _ = _rref_rows(aug)
    x = [ZERO] * m.cols
    for r in reduced:
        lead = next(j for j, v in enumerate(r) if v)
        if lead == m.cols:
            return None
        x[lead] = r[m.cols]
    return tuple(x)


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise DimensionMismatch("only square matrices invert")
    n = m.rows
    aug = [list(m.row(i)) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    reduced, rk = _rref_rows(aug)
    if rk != n or any(next(j for j, v in enumerate(r) if v) >= n for r in reduced):
        raise PreconditionError("matrix is singular")
    return Matrix.from_rows([r[n:] for r in reduced])


def determinant(m: Matrix) -> Fraction:
    if m.rows != m.cols:
        raise DimensionMismatch("determinant needs a square matrix")
    a = m.row_list()
    n = m.rows
    det = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return ZERO
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = ONE / a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] * inv
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=True)
class Subspace:
    """Subspace of a coordinate space, held as an RREF basis matrix.

    The RREF representation is unique, so ``==`` decides subspace equality.
    """

    ambient_dim: int
    basis: Matrix

    @staticmethod
    def from_vectors(ambient_dim: int, vectors: Iterable[Sequence]) -> Subspace:
        rows = [list(vec(v)) for v in vectors]
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionMismatch("vector length does not match ambient dimension")
        reduced, rk = _rref_rows(rows)
        return Subspace(ambient_dim, Matrix.from_rows(reduced) if rk else Matrix(0, ambient_dim, ()))

    @staticmethod
    def zero(ambient_dim: int) -> Subspace:
        return Subspace(ambient_dim, Matrix(0, ambient_dim, ()))

    @staticmethod
    def full(ambient_dim: int) -> Subspace:
        return Subspace(ambient_dim, Matrix.identity(ambient_dim))

    @staticmethod
    def span_of_coordinates(ambient_dim: int, indices: Iterable[int]) -> Subspace:
        """Span of the standard basis vectors with the given 1-based indices."""
        rows = []
        for i in sorted(set(indices)):
            if not 1 <= i <= ambient_dim:
                raise DimensionMismatch("coordinate index out of range")
            rows.append([ONE if j == i - 1 else ZERO for j in range(ambient_dim)])
        return Subspace(ambient_dim, Matrix.from_rows(rows) if rows else Matrix(0, ambient_dim, ()))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return [self.basis.row(i) for i in range(self.basis.rows)]

    def pivot_columns(self) -> list[int]:
        out = []
        for i in range(self.basis.rows):
            out.append(next(j for j, x in enumerate(self.basis.row(i)) if x))
        return out

    def reduce(self, v: Sequence) -> list[Fraction]:
        """Residue of v after elimination against the basis rows."""
        r = list(vec(v))
        if len(r) != self.ambient_dim:
            raise DimensionMismatch("vector length does not match ambient dimension")
        for i, pc in enumerate(self.pivot_columns()):
            c = r[pc]
            if c:
                row = self.basis.row(i)
                r = [a - c * b for a, b in zip(r, row)]
        return r

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def contains_subspace(self, other: Subspace) -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        return all(self.contains(w) for w in other.vectors())


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    return Subspace.from_vectors(a.ambient_dim, a.vectors() + b.vectors())


def annihilator(a: Subspace) -> Subspace:
    """Covectors vanishing on the subspace, in dual coordinates."""
    if a.dim == 0:
        return Subspace.full(a.ambient_dim)
    return kernel(a.basis)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the kernel of the stacked annihilator constraints."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    constraints = annihilator(a).vectors() + annihilator(b).vectors()
    return Subspace.from_vectors(
        a.ambient_dim, kernel_basis([list(r) for r in constraints], a.ambient_dim))


def complement(a: Subspace, inside: Subspace | None = None) -> Subspace:
    """A deterministic direct complement of ``a`` inside ``inside``.

    Candidate vectors are the standard basis vectors lying in ``inside``
    (in index order) followed by the RREF basis rows of ``inside``.
    """
    if inside is None:
        inside = Subspace.full(a.ambient_dim)
    if a.ambient_dim != inside.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    if not inside.contains_subspace(a):
        raise PreconditionError("first subspace is not contained in the second")
    candidates: list[Sequence] = []
    for i in range(a.ambient_dim):
        e = [ZERO] * a.ambient_dim
        e[i] = ONE
        if inside.contains(e):
            candidates.append(e)
    candidates.extend(inside.vectors())
    picked: list[Sequence] = []
    span = a
    for cand in candidates:
        if span.dim == inside.dim:
            break
        if not span.contains(cand):
            picked.append(cand)
            span = Subspace.from_vectors(a.ambient_dim, span.vectors() + [cand])
    if span.dim != inside.dim:
        raise PreconditionError("failed to complete a complement (should be impossible)")
    return Subspace.from_vectors(a.ambient_dim, picked)


def transform_subspace(m: Matrix, a: Subspace) -> Subspace:
    """Image of ``a`` under the linear map given by ``m``."""
    if m.cols != a.ambient_dim:
        raise DimensionMismatch("matrix does not act on the subspace ambient")
    return Subspace.from_vectors(m.rows, [m.mul_vec(v) for v in a.vectors()])
