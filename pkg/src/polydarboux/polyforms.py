"""Differential forms with polynomial coefficients on a split coordinate
space, exact primitive construction, and involutivity of polynomial
distributions.

The coordinate space is ordered (x-block, y-block); the y-block plays the
role of the straightened foliation, so horizontality and verticality are
monomial properties.  The primitive construction contracts against the
scaling fields of the two blocks and integrates the scale parameter
exactly, one monomial at a time; only nonnegative powers ever occur,
which is asserted at runtime.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DimensionMismatch, InternalCheckError, PreconditionError
from .exterior import AlternatingForm, indices_of, mask_of, merge_sign, removal_sign
from .linalg import Matrix, ZERO, ONE, frac, rank

# ---------------------------------------------------------------------------
# sparse polynomials


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Sparse exact polynomial: exponent tuple -> coefficient."""

    nvars: int
    terms: dict

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.nvars == other.nvars
                and self.terms == other.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: Polynomial) -> Polynomial:
        out = dict(self.terms)
        for e, c in other.terms.items():
            nv = out.get(e, ZERO) + c
            if nv:
                out[e] = nv
            else:
                del out[e]
        return Polynomial(self.nvars, out)

    def __neg__(self) -> Polynomial:
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            c = frac(other)
            if not c:
                return Polynomial(self.nvars, {})
            return Polynomial(self.nvars, {e: c * x for e, x in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                nv = out.get(e, ZERO) + c1 * c2
                if nv:
                    out[e] = nv
                else:
                    del out[e]
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def diff(self, var: int) -> Polynomial:
        """Partial derivative with respect to the 1-based variable index."""
        out = {}
        v = var - 1
        for e, c in self.terms.items():
            if e[v]:
                ne = e[:v] + (e[v] - 1,) + e[v + 1:]
                out[ne] = out.get(ne, ZERO) + c * e[v]
        return Polynomial(self.nvars, {e: c for e, c in out.items() if c})

    def eval(self, point: Sequence) -> Fraction:
        total = ZERO
        for e, c in self.terms.items():
            val = c
            for x, p in zip(point, e):
                if p:
                    val *= frac(x) ** p
            total += val
        return total

    def eval_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for e, c in self.terms.items():
            val = float(c)
            for x, p in zip(point, e):
                if p:
                    val *= x ** p
            total += val
        return total

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __repr__(self):
        return f"Polynomial({dict(sorted(self.terms.items()))!r})"


def poly_zero(nvars: int) -> Polynomial:
    return Polynomial(nvars, {})


def poly_const(nvars: int, c) -> Polynomial:
    c = frac(c)
    return Polynomial(nvars, {(0,) * nvars: c} if c else {})


def poly_var(nvars: int, var: int) -> Polynomial:
    e = [0] * nvars
    e[var - 1] = 1
    return Polynomial(nvars, {tuple(e): ONE})


def poly_from_terms(nvars: int, terms: Mapping[Sequence[int], object]) -> Polynomial:
    out = {}
    for e, c in terms.items():
        c = frac(c)
        if c:
            out[tuple(e)] = out.get(tuple(e), ZERO) + c
    return Polynomial(nvars, {e: c for e, c in out.items() if c})


# ---------------------------------------------------------------------------
# polynomial forms


@dataclass(frozen=True, eq=False)
class PolyForm:
    """Polynomial-coefficient form on a space split as x-block + y-block."""

    dim: int
    degree: int
    split: tuple[int, int]
    coeffs: dict  # mask -> Polynomial

    def __post_init__(self):
        if sum(self.split) != self.dim:
            raise DimensionMismatch("split does not sum to the dimension")

    def __eq__(self, other):
        return (isinstance(other, PolyForm) and self.dim == other.dim
                and self.degree == other.degree and self.split == other.split
                and self.coeffs == other.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def x_dim(self) -> int:
        return self.split[0]

    @property
    def y_dim(self) -> int:
        return self.split[1]

    def y_count(self, mask: int) -> int:
        return (mask >> self.split[0]).bit_count()

    def terms(self):
        return [(indices_of(m), p) for m, p in sorted(self.coeffs.items())]

    def evaluate_at(self, point: Sequence) -> AlternatingForm:
        """Exact value at a rational point, as a constant alternating form."""
        out = {}
        for m, p in self.coeffs.items():
            v = p.eval(point)
            if v:
                out[m] = v
        return AlternatingForm(self.dim, self.degree, out)

    def coeffs_float(self, point: Sequence[float]) -> dict:
        return {m: p.eval_float(point) for m, p in self.coeffs.items()}

    def __repr__(self):
        body = ", ".join(f"{list(i)}: {p!r}" for i, p in self.terms())
        return f"PolyForm(dim={self.dim}, degree={self.degree}, {{{body}}})"


def pf_from_terms(dim: int, degree: int, split: tuple[int, int],
                  terms: Mapping[Sequence[int], Polynomial]) -> PolyForm:
    coeffs = {}
    for idx, p in terms.items():
        if p.is_zero():
            continue
        m = mask_of(tuple(sorted(idx)))
        # sign normalization is the caller's job; indices must be increasing
        if tuple(sorted(idx)) != tuple(idx):
            raise ValueError("multi-indices must be strictly increasing")
        coeffs[m] = coeffs.get(m, poly_zero(dim)) + p
    return PolyForm(dim, degree, split, {m: p for m, p in coeffs.items() if not p.is_zero()})


def pf_zero(dim: int, degree: int, split: tuple[int, int]) -> PolyForm:
    return PolyForm(dim, degree, split, {})


def pf_add(a: PolyForm, b: PolyForm) -> PolyForm:
    if (a.dim, a.degree, a.split) != (b.dim, b.degree, b.split):
        raise DimensionMismatch("cannot add polynomial forms of different shape")
    out = dict(a.coeffs)
    for m, p in b.coeffs.items():
        s = out.get(m)
        ns = p if s is None else s + p
        if ns.is_zero():
            out.pop(m, None)
        else:
            out[m] = ns
    return PolyForm(a.dim, a.degree, a.split, out)


def pf_scale(a: PolyForm, c) -> PolyForm:
    c = frac(c)
    if not c:
        return pf_zero(a.dim, a.degree, a.split)
    return PolyForm(a.dim, a.degree, a.split, {m: p * c for m, p in a.coeffs.items()})


def pf_sub(a: PolyForm, b: PolyForm) -> PolyForm:
    return pf_add(a, pf_scale(b, -1))


def pf_wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    if a.dim != b.dim or a.split != b.split:
        raise DimensionMismatch("wedge operands live on different spaces")
    out: dict = {}
    for ma, pa in a.coeffs.items():
        for mb, pb in b.coeffs.items():
            s = merge_sign(ma, mb)
            if not s:
                continue
            prod = pa * pb
            if s < 0:
                prod = -prod
            key = ma | mb
            cur = out.get(key)
            ns = prod if cur is None else cur + prod
            if ns.is_zero():
                out.pop(key, None)
            else:
                out[key] = ns
    return PolyForm(a.dim, a.degree + b.degree, a.split, out)


def pf_contract_basis(a: PolyForm, index: int) -> PolyForm:
    """Interior product with the coordinate field of the 1-based index."""
    bit = 1 << (index - 1)
    out: dict = {}
    for m, p in a.coeffs.items():
        if not (m & bit):
            continue
        s = removal_sign(m, index - 1)
        q = p if s > 0 else -p
        key = m ^ bit
        cur = out.get(key)
        ns = q if cur is None else cur + q
        if ns.is_zero():
            out.pop(key, None)
        else:
            out[key] = ns
    return PolyForm(a.dim, a.degree - 1, a.split, out)


def exterior_d(a: PolyForm) -> PolyForm:
    """Exterior derivative; nilpotent and a graded derivation over wedge."""
    out: dict = {}
    for m, p in a.coeffs.items():
        for v in range(1, a.dim + 1):
            bit = 1 << (v - 1)
            if m & bit:
                continue
            dp = p.diff(v)
            if dp.is_zero():
                continue
            s = merge_sign(bit, m)
            q = dp if s > 0 else -dp
            key = m | bit
            cur = out.get(key)
            ns = q if cur is None else cur + q
            if ns.is_zero():
                out.pop(key, None)
            else:
                out[key] = ns
    return PolyForm(a.dim, a.degree + 1, a.split, out)


def vertical_d(a: PolyForm) -> PolyForm:
    """Fiber-direction exterior derivative of a vertical form.

    The argument must carry y-differentials only (vertical forms are
    equivalence classes; the straightened chart fixes this representative),
    while its coefficients may still depend on the x-variables.
    """
    for m in a.coeffs:
        if m & ((1 << a.x_dim) - 1):
            raise PreconditionError("vertical forms must carry y-differentials only")
    out: dict = {}
    for m, p in a.coeffs.items():
        for j in range(a.x_dim + 1, a.dim + 1):
            bit = 1 << (j - 1)
            if m & bit:
                continue
            dp = p.diff(j)
            if dp.is_zero():
                continue
            s = merge_sign(bit, m)
            q = dp if s > 0 else -dp
            key = m | bit
            cur = out.get(key)
            ns = q if cur is None else cur + q
            if ns.is_zero():
                out.pop(key, None)
            else:
                out[key] = ns
    return PolyForm(a.dim, a.degree + 1, a.split, out)


def max_vertical_factors(a: PolyForm) -> int:
    return max((a.y_count(m) for m in a.coeffs), default=0)


# ---------------------------------------------------------------------------
# homotopy primitive


def homotopy_primitive(omega: PolyForm, r: int) -> PolyForm:
    """Exact primitive of a closed form with bounded vertical factors.

    For a closed degree-k form whose monomials carry at most r
    y-differentials, returns a degree-(k-1) form theta with
    d(theta) = omega and at most r-1 y-differentials per monomial.
    The construction scales the two blocks separately, contracts against
    the generating fields, and integrates each power of the scale
    parameter exactly.
    """
    k = omega.degree
    if k < 1:
        raise PreconditionError("primitive construction needs degree at least 1")
    if not exterior_d(omega).is_zero():
        raise PreconditionError("form is not closed")
    if max_vertical_factors(omega) > r:
        raise PreconditionError(
            f"a monomial carries more than {r} vertical differentials")
    x_dim = omega.x_dim
    acc: dict = {}

    def put(mask: int, exps: tuple, coeff: Fraction):
        if not coeff:
            return
        slot = acc.setdefault(mask, {})
        nv = slot.get(exps, ZERO) + coeff
        if nv:
            slot[exps] = nv
        else:
            del slot[exps]

    for m, p in omega.coeffs.items():
        s_l = omega.y_count(m)
        for exps, c in p.terms.items():
            y_deg = sum(exps[x_dim:])
            # y-block scaling part: contract the fiber scaling field
            if s_l:
                power = y_deg + s_l - 1
                if power < 0:
                    raise InternalCheckError("negative scale power in the fiber part")
                weight = Fraction(1, power + 1)
                mm = m >> x_dim
                while mm:
                    low = mm & -mm
                    mm ^= low
                    j = low.bit_length() - 1 + x_dim  # 0-based coordinate
                    sign = removal_sign(m, j)
                    ne = exps[:j] + (exps[j] + 1,) + exps[j + 1:]
                    put(m ^ (1 << j), ne, (c if sign > 0 else -c) * weight)
            # x-block scaling part acts on the fiber-restricted form
            if s_l == 0 and y_deg == 0:
                power = sum(exps) + k - 1
                if power < 0:
                    raise InternalCheckError("negative scale power in the base part")
                weight = Fraction(1, power + 1)
                mm = m
                while mm:
                    low = mm & -mm
                    mm ^= low
                    i = low.bit_length() - 1
                    sign = removal_sign(m, i)
                    ne = exps[:i] + (exps[i] + 1,) + exps[i + 1:]
                    put(m ^ (1 << i), ne, (c if sign > 0 else -c) * weight)

    coeffs = {}
    for m, slot in acc.items():
        p = Polynomial(omega.dim, slot)
        if not p.is_zero():
            coeffs[m] = p
    theta = PolyForm(omega.dim, k - 1, omega.split, coeffs)
    if max_vertical_factors(theta) > max(r - 1, 0):
        raise InternalCheckError("primitive exceeds the expected vertical bound")
    return theta


def constant_spread(omega: PolyForm) -> PolyForm:
    """The value at the origin, spread out as a constant form."""
    origin = [ZERO] * omega.dim
    val = omega.evaluate_at(origin)
    return PolyForm(omega.dim, omega.degree, omega.split,
                    {m: poly_const(omega.dim, c) for m, c in val.coeffs.items()})


def moser_potential(omega: PolyForm, omega0: PolyForm) -> PolyForm:
    """The correction form for the deformation flow.

    Returns alpha with d(alpha) = omega0 - omega and vanishing contraction
    with every fiber direction, built from the primitive construction at
    vertical bound 1.  Requires omega closed, omega0 the constant spread
    of omega at the origin, and the fiber block isotropic for both.
    """
    if not exterior_d(omega).is_zero():
        raise PreconditionError("form is not closed")
    if omega0 != constant_spread(omega):
        raise PreconditionError("second argument must be the constant spread at the origin")
    diff = pf_sub(omega0, omega)
    if max_vertical_factors(diff) > 1:
        raise PreconditionError("fiber block is not isotropic for both forms")
    alpha = homotopy_primitive(diff, 1)
    if max_vertical_factors(alpha) != 0:
        raise InternalCheckError("correction form still touches the fiber directions")
    return alpha


def chart_symbol(omega: PolyForm, r: int) -> list[tuple[tuple[int, ...], PolyForm]]:
    """Leading vertical components of a partially horizontal chart form.

    Returns (base multi-index, vertical form) pairs: the coefficient forms
    carry y-differentials only, with x-dependence allowed.
    """
    k1 = omega.degree
    if max_vertical_factors(omega) > r:
        raise PreconditionError("form has too many vertical factors for this horizontality")
    x_dim = omega.x_dim
    blocksign = -1 if (r * (k1 - r)) & 1 else 1
    out: dict = {}
    for m, p in omega.coeffs.items():
        if omega.y_count(m) != r:
            continue
        tmask = m & ((1 << x_dim) - 1)
        vmask = m ^ tmask
        slot = out.setdefault(tmask, {})
        slot[vmask] = p * blocksign if blocksign < 0 else p
    combos = itertools.combinations(range(1, x_dim + 1), k1 - r)
    result = []
    for mu in combos:
        tmask = mask_of(mu)
        slot = out.get(tmask, {})
        result.append((mu, PolyForm(omega.dim, r, omega.split, dict(slot))))
    return result


# ---------------------------------------------------------------------------
# polynomial vector fields and involutivity


def lie_bracket(x_field: Sequence[Polynomial], y_field: Sequence[Polynomial]) -> list[Polynomial]:
    """[X, Y] componentwise for polynomial vector fields."""
    dim = len(x_field)
    out = []
    for c in range(dim):
        acc = poly_zero(dim)
        for a in range(dim):
            acc = acc + x_field[a] * y_field[c].diff(a + 1)
            acc = acc - y_field[a] * x_field[c].diff(a + 1)
        out.append(acc)
    return out


def _poly_det(rows: list[list[Polynomial]]) -> Polynomial:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    dim = rows[0][0].nvars
    acc = poly_zero(dim)
    for j in range(n):
        entry = rows[0][j]
        if entry.is_zero():
            continue
        minor = [[row[jj] for jj in range(n) if jj != j] for row in rows[1:]]
        sub = _poly_det(minor)
        if sub.is_zero():
            continue
        term = entry * sub
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def poly_matrix_rank(rows: list[list[Polynomial]]) -> int:
    """Rank over the rational function field, by minor enumeration."""
    if not rows or not rows[0]:
        return 0
    nr, nc = len(rows), len(rows[0])
    for size in range(min(nr, nc), 0, -1):
        for ri in itertools.combinations(range(nr), size):
            for ci in itertools.combinations(range(nc), size):
                sub = [[rows[i][j] for j in ci] for i in ri]
                if not _poly_det(sub).is_zero():
                    return size
    return 0


@dataclass
class InvolutivityReport:
    involutive: bool
    distribution_rank: int
    method: str
    diagnostics: list[str]


def _default_region_points(dim: int, count: int = 8, seed: int = 20070) -> list[list[Fraction]]:
    rng = random.Random(seed)
    pts = [[ZERO] * dim]
    for _ in range(count):
        pts.append([Fraction(rng.randint(-3, 3), rng.randint(2, 5)) for _ in range(dim)])
    return pts


def involutive_report(fields: Sequence[Sequence[Polynomial]],
                      region_points: list | None = None) -> InvolutivityReport:
    """Frobenius test for the span of polynomial vector fields.

    The distribution must have constant pointwise rank on the test region
    (origin plus sampled points); a drop is reported as an error.  Bracket
    membership is decided symbolically: with constant rank, equality of
    the generic ranks of [fields] and [fields | bracket] forces pointwise
    membership everywhere.
    """
    fields = [list(f) for f in fields]
    if not fields:
        raise PreconditionError("no fields given")
    dim = len(fields[0])
    if any(len(f) != dim for f in fields):
        raise DimensionMismatch("fields have inconsistent dimensions")
    matrix_rows = [[fields[j][i] for j in range(len(fields))] for i in range(dim)]
    sym_rank = poly_matrix_rank(matrix_rows)
    points = region_points if region_points is not None else _default_region_points(dim)
    for p in points:
        m = Matrix.from_rows([[f[i].eval(p) for f in fields] for i in range(dim)])
        if rank(m) != sym_rank:
            raise PreconditionError(
                f"rank drop detected at {p}: pointwise rank {rank(m)} != generic rank {sym_rank}")
    diagnostics = [f"distribution rank {sym_rank}, symbolic minor test"]
    for a, b in itertools.combinations(range(len(fields)), 2):
        br = lie_bracket(fields[a], fields[b])
        aug_rows = [row + [br[i]] for i, row in enumerate(matrix_rows)]
        if poly_matrix_rank(aug_rows) > sym_rank:
            diagnostics.append(f"bracket of fields {a + 1},{b + 1} leaves the span")
            return InvolutivityReport(False, sym_rank, "symbolic", diagnostics)
    return InvolutivityReport(True, sym_rank, "symbolic", diagnostics)


def involutive(fields: Sequence[Sequence[Polynomial]],
               region_points: list | None = None) -> bool:
    return involutive_report(fields, region_points).involutive
