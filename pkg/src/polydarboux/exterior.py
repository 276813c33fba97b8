"""Exterior algebra over exact scalars.

Alternating forms are stored sparsely: one coefficient per strictly
increasing multi-index, encoded internally as a bitmask (bit i-1 set
means coordinate index i occurs).  Summed expressions with fractional
prefactors like (1/k!) sum_{i_1..i_k} collapse to these stored
coefficients, so a single increasing monomial is held exactly once.

Vector-valued forms are tuples of scalar components over one base
space; flags carry a distinguished vertical subspace together with a
splitting of the quotient, which is how partially horizontal forms and
their symbols are handled downstream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, PreconditionError
from .linalg import Matrix, Subspace, ZERO, ONE, frac, vec

# ---------------------------------------------------------------------------
# multi-index masks


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask of a set of distinct 1-based coordinate indices."""
    m = 0
    for i in indices:
        bit = 1 << (i - 1)
        if m & bit:
            raise ValueError("repeated index in multi-index")
        m |= bit
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1)


def sorted_sign(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting the indices, and the sorted tuple."""
    idx = list(indices)
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
            elif idx[j] == idx[j + 1]:
                return 0, ()
    return sign, tuple(idx)


def merge_sign(a: int, b: int) -> int:
    """Sign of e^A ∧ e^B relative to the sorted union; 0 on overlap."""
    if a & b:
        return 0
    inv = 0
    bb = b
    while bb:
        low = bb & -bb
        j = low.bit_length() - 1
        inv += (a >> (j + 1)).bit_count()
        bb ^= low
    return -1 if inv & 1 else 1


def removal_sign(mask: int, bit_pos: int) -> int:
    """Sign of pulling index (bit_pos+1) to the front of the monomial."""
    below = (mask & ((1 << bit_pos) - 1)).bit_count()
    return -1 if below & 1 else 1


# ---------------------------------------------------------------------------
# alternating forms


@dataclass(frozen=True, eq=False)
class AlternatingForm:
    """Degree-k alternating form on an n-dimensional coordinate space."""

    dim: int
    degree: int
    coeffs: dict  # mask -> Fraction, zero coefficients never stored

    def __post_init__(self):
        if self.degree < 0 or self.dim < 0:
            raise ValueError("negative dimension or degree")
        if self.degree > self.dim and self.coeffs:
            raise ValueError("degree exceeds dimension for a nonzero form")

    def __eq__(self, other) -> bool:
        return (isinstance(other, AlternatingForm) and self.dim == other.dim
                and self.degree == other.degree and self.coeffs == other.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, indices: Sequence[int]) -> Fraction:
        """Signed coefficient at a multi-index (any order, distinct entries)."""
        sign, srt = sorted_sign(indices)
        if sign == 0:
            return ZERO
        return sign * self.coeffs.get(mask_of(srt), ZERO)

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return [(indices_of(m), c) for m, c in sorted(self.coeffs.items())]

    def __repr__(self):
        if not self.coeffs:
            return f"AlternatingForm(dim={self.dim}, degree={self.degree}, 0)"
        body = " + ".join(f"({c})e^{list(i)}" for i, c in self.terms())
        return f"AlternatingForm(dim={self.dim}, {body})"


def form(dim: int, degree: int, terms: Mapping[Sequence[int], object] | None = None) -> AlternatingForm:
    """Build a form from {multi-index: coefficient}; indices may be unsorted."""
    coeffs: dict = {}
    for idx, c in (terms or {}).items():
        c = frac(c)
        if not c:
            continue
        sign, srt = sorted_sign(tuple(idx))
        if sign == 0:
            continue
        if len(srt) != degree:
            raise ValueError("multi-index length does not match degree")
        if srt and srt[-1] > dim:
            raise DimensionMismatch("index exceeds dimension")
        m = mask_of(srt)
        nv = coeffs.get(m, ZERO) + sign * c
        if nv:
            coeffs[m] = nv
        else:
            coeffs.pop(m, None)
    return AlternatingForm(dim, degree, coeffs)


def zero_form(dim: int, degree: int) -> AlternatingForm:
    return AlternatingForm(dim, degree, {})


def basis_covector(dim: int, i: int) -> AlternatingForm:
    return form(dim, 1, {(i,): 1})


def covector(dim: int, components: Sequence) -> AlternatingForm:
    return form(dim, 1, {(i + 1,): c for i, c in enumerate(components)})


def add(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    if (a.dim, a.degree) != (b.dim, b.degree):
        raise DimensionMismatch("cannot add forms of different shape")
    out = dict(a.coeffs)
    for m, c in b.coeffs.items():
        nv = out.get(m, ZERO) + c
        if nv:
            out[m] = nv
        else:
            out.pop(m, None)
    return AlternatingForm(a.dim, a.degree, out)


def scale(a: AlternatingForm, c) -> AlternatingForm:
    c = frac(c)
    if not c:
        return zero_form(a.dim, a.degree)
    return AlternatingForm(a.dim, a.degree, {m: c * x for m, x in a.coeffs.items()})


def sub(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    return add(a, scale(b, -1))


def _dict_wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            s = merge_sign(ma, mb)
            if not s:
                continue
            key = ma | mb
            nv = out.get(key, 0) + (ca * cb if s > 0 else -ca * cb)
            if nv:
                out[key] = nv
            else:
                del out[key]
    return out


def wedge(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    if a.dim != b.dim:
        raise DimensionMismatch("wedge operands live on different spaces")
    deg = a.degree + b.degree
    return AlternatingForm(a.dim, deg, {m: frac(c) for m, c in _dict_wedge(a.coeffs, b.coeffs).items()})


def wedge_all(factors: Sequence[AlternatingForm]) -> AlternatingForm:
    if not factors:
        raise ValueError("empty wedge product")
    out = factors[0]
    for f in factors[1:]:
        out = wedge(out, f)
    return out


def _contract_scalar(v: Sequence[Fraction], a: AlternatingForm) -> AlternatingForm:
    out: dict = {}
    for m, c in a.coeffs.items():
        mm = m
        while mm:
            low = mm & -mm
            mm ^= low
            bit = low.bit_length() - 1
            comp = v[bit]
            if not comp:
                continue
            key = m ^ low
            s = removal_sign(m, bit)
            nv = out.get(key, ZERO) + (comp * c if s > 0 else -comp * c)
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)
    return AlternatingForm(a.dim, a.degree - 1, out)


def contract(v: Sequence, x):
    """Interior product i_v, for scalar or vector-valued forms."""
    target = x if isinstance(x, AlternatingForm) else x.components[0]
    vv = vec(v)
    if len(vv) != target.dim:
        raise DimensionMismatch("vector length does not match form dimension")
    if target.degree == 0:
        raise PreconditionError("cannot contract a degree-0 form")
    if isinstance(x, AlternatingForm):
        return _contract_scalar(vv, x)
    return VectorValuedForm(tuple(_contract_scalar(vv, comp) for comp in x.components))


def evaluate(a: AlternatingForm, vectors: Sequence[Sequence]) -> Fraction:
    """Multilinear evaluation a(v_1, ..., v_k)."""
    if len(vectors) != a.degree:
        raise DimensionMismatch("argument count does not match degree")
    cur = a
    for v in vectors:
        if cur.degree == 0:
            break
        cur = _contract_scalar(vec(v), cur)
    return cur.coeffs.get(0, ZERO)


# ---------------------------------------------------------------------------
# vector-valued forms


@dataclass(frozen=True, eq=False)
class VectorValuedForm:
    """A tuple of scalar alternating forms sharing one base space."""

    components: tuple[AlternatingForm, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("a vector-valued form needs at least one component")
        d, k = self.components[0].dim, self.components[0].degree
        if any((c.dim, c.degree) != (d, k) for c in self.components):
            raise DimensionMismatch("components disagree in dimension or degree")

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def degree(self) -> int:
        return self.components[0].degree

    @property
    def value_dim(self) -> int:
        return len(self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorValuedForm) and self.components == other.components

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __repr__(self):
        return f"VectorValuedForm({self.value_dim} components, {self.components!r})"


def vector_form(components: Sequence[AlternatingForm]) -> VectorValuedForm:
    return VectorValuedForm(tuple(components))


def project(omega: VectorValuedForm, t_star: Sequence) -> AlternatingForm:
    """Projection along a covector on the value space: sum t_a omega^a."""
    ts = vec(t_star)
    if len(ts) != omega.value_dim:
        raise DimensionMismatch("covector length does not match value dimension")
    out = zero_form(omega.dim, omega.degree)
    for t, comp in zip(ts, omega.components):
        if t:
            out = add(out, scale(comp, t))
    return out


def flat_matrix(omega: VectorValuedForm, domain: Subspace) -> Matrix:
    """Matrix of v -> i_v omega from a domain basis to monomial coordinates.

    Rows run over (component, increasing multi-index of length degree-1)
    in lexicographic order; columns over the domain's RREF basis.  The
    kernel of this matrix is {v in domain : i_v omega = 0}.
    """
    if domain.ambient_dim != omega.dim:
        raise DimensionMismatch("domain ambient does not match form dimension")
    if omega.degree == 0:
        raise PreconditionError("cannot contract a degree-0 form")
    images = [contract(v, omega) for v in domain.vectors()]
    monomials = list(itertools.combinations(range(1, omega.dim + 1), omega.degree - 1))
    entries = []
    for a in range(omega.value_dim):
        for mono in monomials:
            m = mask_of(mono)
            entries.extend(img.components[a].coeffs.get(m, ZERO) for img in images)
    return Matrix(omega.value_dim * len(monomials), domain.dim, tuple(entries))


# ---------------------------------------------------------------------------
# pullback


def _row_forms(m: Matrix) -> list[dict]:
    """Rows of the matrix as sparse covectors on the column space.

    Integer entries stay plain ints: the wedge accumulation then runs in
    integer arithmetic, which matters on the large round-trip checks.
    """
    rows = []
    for i in range(m.rows):
        row = {}
        for j, x in enumerate(m.row(i)):
            if x:
                row[1 << j] = int(x) if x.denominator == 1 else x
        rows.append(row)
    return rows


def _pullback_scalar(a: AlternatingForm, rows: list[dict], new_dim: int, memo: dict) -> AlternatingForm:
    out: dict = {}
    for m, c in a.coeffs.items():
        idx = indices_of(m)
        key = idx
        w = memo.get(key)
        if w is None:
            # build through memoized prefixes so shared index sets are reused
            t = len(idx)
            while t > 0 and idx[:t] not in memo:
                t -= 1
            w = memo[idx[:t]] if t else {0: 1}
            for pos in range(t, len(idx)):
                w = _dict_wedge(w, rows[idx[pos] - 1])
                memo[idx[: pos + 1]] = w
        for mm, x in w.items():
            nv = out.get(mm, 0) + c * x
            if nv:
                out[mm] = nv
            else:
                del out[mm]
    return AlternatingForm(new_dim, a.degree, {m: frac(x) for m, x in out.items()})


def pullback(x, m: Matrix):
    """Pullback along the linear map given by ``m`` (new space -> old space).

    (pullback x)(v_1, ..., v_k) = x(m v_1, ..., m v_k).
    """
    target = x if isinstance(x, AlternatingForm) else x.components[0]
    if m.rows != target.dim:
        raise DimensionMismatch("matrix row count does not match form dimension")
    rows = _row_forms(m)
    memo: dict = {(): {0: 1}}
    if isinstance(x, AlternatingForm):
        return _pullback_scalar(x, rows, m.cols, memo)
    return VectorValuedForm(tuple(
        _pullback_scalar(comp, rows, m.cols, memo) for comp in x.components))


# ---------------------------------------------------------------------------
# flags and horizontality


@dataclass(frozen=True, eq=False)
class Flag:
    """Total space with a vertical subspace and a splitting of the quotient.

    The quotient projection is fixed by the canonical chart on the free
    (non-pivot) coordinates of the vertical RREF basis; a valid splitting
    sends the j-th quotient coordinate to a vector congruent to the j-th
    free coordinate modulo the vertical subspace.  Any two splittings of
    the same flag therefore differ by vertical corrections only.
    """

    total_dim: int
    vertical: Subspace
    splitting: Matrix

    def __post_init__(self):
        if self.vertical.ambient_dim != self.total_dim:
            raise DimensionMismatch("vertical subspace lives in a different space")
        n = self.total_dim - self.vertical.dim
        if (self.splitting.rows, self.splitting.cols) != (self.total_dim, n):
            raise DimensionMismatch("splitting must map quotient coordinates into the total space")
        free = self.free_columns()
        for j in range(n):
            residue = self.vertical.reduce(self.splitting.col(j))
            expected = [ONE if i == free[j] else ZERO for i in range(self.total_dim)]
            if residue != expected:
                raise PreconditionError(
                    "splitting composed with the quotient projection is not the identity")

    @property
    def dim_t(self) -> int:
        return self.total_dim - self.vertical.dim

    def free_columns(self) -> list[int]:
        piv = set(self.vertical.pivot_columns())
        return [j for j in range(self.total_dim) if j not in piv]

    def vertical_rows(self) -> list[tuple[Fraction, ...]]:
        return self.vertical.vectors()

    def horizontal_cols(self) -> list[tuple[Fraction, ...]]:
        return [self.splitting.col(j) for j in range(self.dim_t)]

    def adapted_matrix(self) -> Matrix:
        """Columns: splitting image first, then the vertical basis."""
        return Matrix.from_cols(self.horizontal_cols() + list(self.vertical_rows()))

    def quotient_projection(self, w: Sequence) -> tuple[Fraction, ...]:
        residue = self.vertical.reduce(w)
        free = self.free_columns()
        return tuple(residue[j] for j in free)


def coordinate_flag(total_dim: int, vertical_indices: Iterable[int]) -> Flag:
    """Flag whose vertical space is a span of standard coordinates."""
    vert = Subspace.span_of_coordinates(total_dim, vertical_indices)
    free = [j for j in range(total_dim) if j not in set(vert.pivot_columns())]
    cols = []
    for j in free:
        col = [ZERO] * total_dim
        col[j] = ONE
        cols.append(col)
    return Flag(total_dim, vert, Matrix.from_cols(cols) if cols else Matrix(total_dim, 0, ()))


def with_splitting(flag: Flag, splitting: Matrix) -> Flag:
    return Flag(flag.total_dim, flag.vertical, splitting)


def horizontality_degree(omega: AlternatingForm, flag: Flag) -> int:
    """Minimal s such that contraction with any s+1 vertical vectors vanishes.

    Exhausts combinations of the vertical basis, so the answer does not
    depend on the coordinates the form happens to be written in.
    """
    if omega.dim != flag.total_dim:
        raise DimensionMismatch("form does not live on the flag's total space")
    if omega.is_zero():
        return 0
    vert = flag.vertical_rows()
    for s in range(omega.degree + 1):
        if s + 1 > len(vert):
            return s
        ok = True
        for combo in itertools.combinations(vert, s + 1):
            cur = omega
            for v in combo:
                cur = _contract_scalar(vec(v), cur)
                if cur.is_zero():
                    break
            if not cur.is_zero():
                ok = False
                break
        if ok:
            return s
    return omega.degree


def horizontal_dim(r: int, s: int, dim_v: int, dim_t: int) -> int:
    """Dimension of the space of (r-s)-horizontal r-forms."""
    return sum(comb(dim_v, t) * comb(dim_t, r - t) for t in range(0, s + 1) if r - t >= 0)


# ---------------------------------------------------------------------------
# symmetric polynomials on the value space


@dataclass(frozen=True, eq=False)
class SymmetricPoly:
    """Homogeneous polynomial on the value space, sparse over exponents."""

    value_dim: int
    degree: int
    coeffs: dict  # exponent tuple (len value_dim, sum degree) -> Fraction

    def __post_init__(self):
        for e in self.coeffs:
            if len(e) != self.value_dim or sum(e) != self.degree:
                raise ValueError("exponent does not match value dimension or degree")

    def __eq__(self, other):
        return (isinstance(other, SymmetricPoly) and self.value_dim == other.value_dim
                and self.degree == other.degree and self.coeffs == other.coeffs)


def symmetric_poly(value_dim: int, degree: int, coeffs: Mapping[Sequence[int], object]) -> SymmetricPoly:
    out = {}
    for e, c in coeffs.items():
        c = frac(c)
        if c:
            out[tuple(e)] = c
    return SymmetricPoly(value_dim, degree, out)


def wedge_power_by_exponent(omega: VectorValuedForm, exponent: Sequence[int]) -> AlternatingForm:
    """omega^alpha: the wedge of components with the given multiplicities."""
    factors: list[AlternatingForm] = []
    for a, e in enumerate(exponent):
        factors.extend([omega.components[a]] * e)
    if not factors:
        raise ValueError("empty exponent")
    return wedge_all(factors)


def poly_eval(p: SymmetricPoly, omega: VectorValuedForm) -> AlternatingForm:
    """Evaluate a symmetric polynomial on a vector-valued 2-form.

    A monomial exponent alpha maps to the wedge power omega^alpha, so the
    result has degree 2*|alpha|.  Linear in the polynomial.
    """
    if p.value_dim != omega.value_dim:
        raise DimensionMismatch("value dimensions differ")
    if omega.degree != 2:
        raise PreconditionError("wedge powers are taken of degree-2 forms")
    out = zero_form(omega.dim, 2 * p.degree)
    for e, c in p.coeffs.items():
        out = add(out, scale(wedge_power_by_exponent(omega, e), c))
    return out


# ---------------------------------------------------------------------------
# misc helpers used downstream


def standard_basis_vector(dim: int, i: int) -> list[Fraction]:
    v = [ZERO] * dim
    v[i - 1] = ONE
    return v


def restrict_to_leading(x, new_dim: int):
    """Reinterpret a form supported on the first ``new_dim`` coordinates."""
    def cut(a: AlternatingForm) -> AlternatingForm:
        limit = 1 << new_dim
        for m in a.coeffs:
            if m >= limit:
                raise PreconditionError("form touches a discarded coordinate")
        return AlternatingForm(new_dim, a.degree, dict(a.coeffs))
    if isinstance(x, AlternatingForm):
        return cut(x)
    return VectorValuedForm(tuple(cut(c) for c in x.components))


def embed_in(x, new_dim: int):
    """View a form on a larger space that extends the coordinates."""
    def up(a: AlternatingForm) -> AlternatingForm:
        if new_dim < a.dim:
            raise DimensionMismatch("embedding must not shrink the space")
        return AlternatingForm(new_dim, a.degree, dict(a.coeffs))
    if isinstance(x, AlternatingForm):
        return up(x)
    return VectorValuedForm(tuple(up(c) for c in x.components))
