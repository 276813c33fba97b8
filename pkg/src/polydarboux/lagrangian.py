"""Classification engine for vector-valued and partially horizontal forms.

The central test is subspace equality of contraction images inside the
monomial coordinates of the relevant form space: a candidate subspace is
polylagrangian when contracting it fills every form that annihilates it,
and multilagrangian when the same holds inside the partially horizontal
forms of a flag.  Everything is exact; sampling only appears in the
constant-rank refuter, which is honest about being a sampler.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import DimensionMismatch, InternalCheckError, PreconditionError
from .exterior import (AlternatingForm, Flag, VectorValuedForm, contract, evaluate,
                       indices_of, project, pullback, wedge, wedge_power_by_exponent)
from .linalg import (Matrix, RowEchelon, Subspace, ZERO, ONE, annihilator, intersect,
                     inverse, kernel_basis, subspace_sum, complement, vec)
from .sparse import span_equal, span_of, intersect_spans

DEFAULT_SEED = 20070

# ---------------------------------------------------------------------------
# small adapters


def as_vector_form(x) -> VectorValuedForm:
    return x if isinstance(x, VectorValuedForm) else VectorValuedForm((x,))


def _stacked(x) -> dict:
    """Sparse coefficient vector of a (vector-valued) form, keyed (a, mask)."""
    v = as_vector_form(x)
    out = {}
    for a, compf in enumerate(v.components):
        for m, c in compf.coeffs.items():
            out[(a, m)] = c
    return out


def flat_image_vectors(omega, vectors) -> list[dict]:
    """Sparse images i_v omega for each v, in stacked coordinates."""
    return [_stacked(contract(v, as_vector_form(omega))) for v in vectors]


def _annihilator_wedges(sub: Subspace, k: int) -> list[AlternatingForm]:
    """Basis of the k-th exterior power of the annihilator of ``sub``."""
    ann = annihilator(sub)
    dim = sub.ambient_dim
    rows = [AlternatingForm(dim, 1, {1 << j: x for j, x in enumerate(r) if x})
            for r in ann.vectors()]
    if k == 0:
        return [AlternatingForm(dim, 0, {0: ONE})]
    out = []
    for combo in itertools.combinations(rows, k):
        w = combo[0]
        for f in combo[1:]:
            w = wedge(w, f)
        if not w.is_zero():
            out.append(w)
    return out


def _lperp_tensor_basis(sub: Subspace, k: int, value_dim: int) -> list[dict]:
    """Basis of (Lambda^k L-perp) tensor the value space, stacked."""
    wedges = _annihilator_wedges(sub, k)
    out = []
    for a in range(value_dim):
        for w in wedges:
            out.append({(a, m): c for m, c in w.coeffs.items()})
    return out


# ---------------------------------------------------------------------------
# kernels and orthogonal complements


def _kernel_constraints(x) -> list[list[Fraction]]:
    """Constraint rows whose kernel is {v : i_v x = 0}."""
    v = as_vector_form(x)
    dim = v.dim
    rows: dict = {}
    for a, compf in enumerate(v.components):
        for m, c in compf.coeffs.items():
            mm = m
            while mm:
                low = mm & -mm
                mm ^= low
                bit = low.bit_length() - 1
                below = (m & (low - 1)).bit_count()
                key = (a, m ^ low)
                row = rows.get(key)
                if row is None:
                    row = [ZERO] * dim
                    rows[key] = row
                row[bit] += -c if below & 1 else c
    return [r for r in rows.values() if any(r)]


def kernel_of_form(x) -> Subspace:
    """{v : i_v omega = 0}; the intersection of the component kernels."""
    v = as_vector_form(x)
    if v.degree == 0:
        return Subspace.full(v.dim)
    return Subspace.from_vectors(v.dim, kernel_basis(_kernel_constraints(v), v.dim))


def orthogonal_complement(sub: Subspace, omega, level: int) -> Subspace:
    """Vectors annihilating omega after ``level`` contractions with the subspace."""
    v = as_vector_form(omega)
    if sub.ambient_dim != v.dim:
        raise DimensionMismatch("subspace does not live on the form's space")
    if not 1 <= level <= v.degree - 1:
        raise PreconditionError(f"contraction level must lie in 1..{v.degree - 1}")
    rows: list[list[Fraction]] = []
    for combo in itertools.combinations(sub.vectors(), level):
        partial = v
        for u in combo:
            partial = contract(u, partial)
        if not partial.is_zero():
            rows.extend(_kernel_constraints(partial))
    return Subspace.from_vectors(v.dim, kernel_basis(rows, v.dim))


def is_isotropic(sub: Subspace, omega, level: int = 1) -> bool:
    return orthogonal_complement(sub, omega, level).contains_subspace(sub)


def is_maximal_isotropic(sub: Subspace, omega) -> bool:
    """Maximality at level 1: the kernel is contained and the contraction
    image equals the image of the whole space cut to the annihilating forms."""
    v = as_vector_form(omega)
    k = v.degree - 1
    if not sub.contains_subspace(kernel_of_form(v)):
        return False
    lhs = flat_image_vectors(v, sub.vectors())
    full = flat_image_vectors(v, Subspace.full(v.dim).vectors())
    rhs = intersect_spans(full, _lperp_tensor_basis(sub, k, v.value_dim))
    return span_equal(lhs, rhs)


# ---------------------------------------------------------------------------
# polylagrangian tests


def check_polylagrangian(sub: Subspace, omega) -> bool:
    """Does contracting the subspace fill every annihilating form value?

    When the equality holds, the dimension identity
    dim L = dim ker + value_dim * C(codim L, degree-1) is also asserted
    as an internal consistency check.
    """
    v = as_vector_form(omega)
    if sub.ambient_dim != v.dim:
        raise DimensionMismatch("subspace does not live on the form's space")
    k = v.degree - 1
    lhs = flat_image_vectors(v, sub.vectors())
    rhs = _lperp_tensor_basis(sub, k, v.value_dim)
    if not span_equal(lhs, rhs):
        return False
    if not v.is_zero():
        # the counting identity is implied for non-vanishing forms
        ker = kernel_of_form(v)
        n_codim = v.dim - sub.dim
        expected = ker.dim + v.value_dim * comb(n_codim, k)
        if sub.dim != expected:
            raise InternalCheckError(
                f"contraction-image equality holds but dim L = {sub.dim} != {expected}")
    return True


def dimension_criterion_poly(sub: Subspace, omega) -> bool:
    """Kernel containment + isotropy + the counting identity.

    Equivalent to the contraction-image equality; the equivalence itself
    is exercised by the test suite on true, conjugated and corrupted
    instances.
    """
    v = as_vector_form(omega)
    k = v.degree - 1
    n_codim = v.dim - sub.dim
    if n_codim < k:
        raise PreconditionError(
            f"codimension {n_codim} is below the degree bound {k}; the criterion does not apply")
    ker = kernel_of_form(v)
    if not sub.contains_subspace(ker):
        return False
    if not is_isotropic(sub, v, 1):
        return False
    return sub.dim == ker.dim + v.value_dim * comb(n_codim, k)


@dataclass
class PolylagrangianSearch:
    subspace: Subspace | None
    status: str  # "found" | "absent" | "not_found"
    rank: int | None
    diagnostics: list[str] = field(default_factory=list)
    component_complement_dims: list[int] = field(default_factory=list)


def _sampled_kernel_span(v: VectorValuedForm) -> Subspace:
    """Span of kernels of projections over basis covectors and pairwise sums."""
    nhat = v.value_dim
    covs = []
    for a in range(nhat):
        e = [ZERO] * nhat
        e[a] = ONE
        covs.append(e)
    for a in range(nhat):
        for b in range(a + 1, nhat):
            e = [ZERO] * nhat
            e[a] = ONE
            e[b] = ONE
            covs.append(e)
    total = Subspace.zero(v.dim)
    for t in covs:
        p = project(v, t)
        if p.is_zero():
            continue
        total = subspace_sum(total, kernel_of_form(p))
    return total


def search_polylagrangian(omega, *, greedy_seed_limit: int | None = None) -> PolylagrangianSearch:
    """Locate the distinguished maximal isotropic subspace, if one exists.

    For two or more value components the subspace is pinned down by the
    kernels of the component projections, so failure of that candidate
    proves absence.  For a single component no construction is available;
    a seeded greedy search is used and a miss is reported as "not found".
    """
    v = as_vector_form(omega)
    if v.is_zero():
        raise PreconditionError("the zero form admits no distinguished subspace")
    k = v.degree - 1
    diagnostics: list[str] = []
    ker = kernel_of_form(v)

    if v.value_dim >= 2:
        comp_dims = []
        candidate = ker
        for a in range(v.value_dim):
            rows: list[list[Fraction]] = []
            for b, compf in enumerate(v.components):
                if b != a:
                    rows.extend(_kernel_constraints(compf))
            inter = Subspace.from_vectors(v.dim, kernel_basis(rows, v.dim))
            k_a = complement(ker, inside=inter)
            comp_dims.append(k_a.dim)
            candidate = subspace_sum(candidate, k_a)
        if check_polylagrangian(candidate, v):
            return PolylagrangianSearch(candidate, "found", v.dim - candidate.dim,
                                        diagnostics, comp_dims)
        sampled = _sampled_kernel_span(v)
        if sampled.dim == v.dim and not is_isotropic(sampled, v, 1):
            diagnostics.append("sum of kernels = full space, not isotropic")
        else:
            diagnostics.append(
                f"kernel-sum candidate has dim {sampled.dim} and "
                f"{'is' if is_isotropic(sampled, v, 1) else 'is not'} isotropic")
        if v.degree == 2:
            nu = uniform_rank(v)
            if nu is not None:
                required = ker.dim + v.value_dim * comb(nu, k)
                dims = sorted({candidate.dim, sampled.dim})
                if all(d < required for d in dims):
                    dd = " and ".join(str(d) for d in dims)
                    diagnostics.append(
                        f"required polylagrangian dim {required} vs candidates of dim {dd}: "
                        "both too small")
        diagnostics.append("construction candidate fails the contraction-image equality")
        return PolylagrangianSearch(None, "absent", None, diagnostics, comp_dims)

    # single component: greedy from seeded starts, verified exactly
    for cand in scalar_polylagrangian_candidates(v, limit=greedy_seed_limit):
        return PolylagrangianSearch(cand, "found", v.dim - cand.dim, diagnostics, [])
    diagnostics.append("not found - possibly nonexistent (single-component search is heuristic)")
    return PolylagrangianSearch(None, "not_found", None, diagnostics, [])


def scalar_polylagrangian_candidates(omega, limit: int | None = None):
    """Greedy maximal isotropic subspaces passing the exact subspace test.

    Seeds are all standard coordinate lines plus, for degree at least 3,
    all isotropic coordinate planes.  Every yielded subspace is verified
    through the contraction-image equality and the counting identity, so
    a yield is always correct; the enumeration may simply be incomplete.
    """
    v = as_vector_form(omega)
    k = v.degree - 1
    ker = kernel_of_form(v)
    seeds: list[Subspace] = []
    for i in range(v.dim):
        e = [ZERO] * v.dim
        e[i] = ONE
        seeds.append(Subspace.from_vectors(v.dim, [e]))
    if v.degree >= 3:
        for i, j in itertools.combinations(range(v.dim), 2):
            ei = [ZERO] * v.dim
            ei[i] = ONE
            ej = [ZERO] * v.dim
            ej[j] = ONE
            pair = Subspace.from_vectors(v.dim, [ei, ej])
            if is_isotropic(pair, v, 1):
                seeds.append(pair)
    if limit is not None:
        seeds = seeds[:limit]
    seen = set()
    for seed_sub in seeds:
        cand = greedy_maximal_isotropic(v, seed_sub, verify=False)
        key = cand.basis.entries
        if key in seen:
            continue
        seen.add(key)
        n_codim = v.dim - cand.dim
        if n_codim < k:
            continue
        if cand.dim != ker.dim + comb(n_codim, k):
            continue
        if check_polylagrangian(cand, v):
            yield cand


def find_polylagrangian(omega) -> Subspace | None:
    return search_polylagrangian(omega).subspace


def greedy_maximal_isotropic(omega, seed: Subspace, within: Subspace | None = None,
                             verify: bool = True) -> Subspace:
    """Grow an isotropic subspace until it equals its level-1 complement.

    Extends by the first RREF basis vector of the current complement that
    is not already in the span; deterministic given the seed.  ``within``
    restricts the growth (used for vertical-space searches).

    The constraint rows of the complement accumulate in one incremental
    echelon: each added vector only contributes the conditions from its
    own contraction image.
    """
    v = as_vector_form(omega)
    if not is_isotropic(seed, v, 1):
        raise PreconditionError("seed subspace is not isotropic")
    ech = RowEchelon(v.dim)
    if within is not None:
        for row in annihilator(within).vectors():
            ech.insert(row)
    cur = seed
    for u in seed.vectors():
        for row in _kernel_constraints(contract(u, v)):
            ech.insert(row)
    while True:
        orth = Subspace.from_vectors(v.dim, ech.kernel_vectors())
        nxt = None
        for w in orth.vectors():
            if not cur.contains(w):
                nxt = w
                break
        if nxt is None:
            break
        cur = Subspace.from_vectors(v.dim, cur.vectors() + [nxt])
        for row in _kernel_constraints(contract(nxt, v)):
            ech.insert(row)
    if verify and within is None and not is_maximal_isotropic(cur, v):
        raise InternalCheckError("greedy termination did not yield a maximal isotropic subspace")
    return cur


# ---------------------------------------------------------------------------
# horizontal / multilagrangian tests


def _adapted(omega: AlternatingForm, flag: Flag) -> tuple[AlternatingForm, Matrix, Matrix]:
    """The form in flag-adapted coordinates (quotient first, vertical last)."""
    if omega.dim != flag.total_dim:
        raise DimensionMismatch("form does not live on the flag's total space")
    b = flag.adapted_matrix()
    return pullback(omega, b), b, inverse(b)


def _vertical_count(mask: int, n_t: int) -> int:
    return (mask >> n_t).bit_count()


def _check_horizontality(aomega: AlternatingForm, n_t: int, r: int):
    worst = max((_vertical_count(m, n_t) for m in aomega.coeffs), default=0)
    if worst > r:
        raise PreconditionError(
            f"form has a monomial with {worst} vertical factors; not ({aomega.degree - r})-horizontal")


def to_vertical_coordinates(flag: Flag, sub: Subspace, binv: Matrix | None = None) -> Subspace:
    """Express a subspace of the vertical space in vertical coordinates."""
    binv = binv if binv is not None else inverse(flag.adapted_matrix())
    n = flag.dim_t
    rows = []
    for u in sub.vectors():
        coords = binv.mul_vec(u)
        if any(coords[:n]):
            raise PreconditionError("subspace is not contained in the vertical space")
        rows.append(coords[n:])
    return Subspace.from_vectors(flag.total_dim - n, rows)


def from_vertical_coordinates(flag: Flag, sub: Subspace) -> Subspace:
    rows = flag.vertical_rows()
    out = []
    for u in sub.vectors():
        w = [ZERO] * flag.total_dim
        for c, row in zip(u, rows):
            if c:
                w = [x + c * y for x, y in zip(w, row)]
        out.append(w)
    return Subspace.from_vectors(flag.total_dim, out)


def symbol(omega: AlternatingForm, flag: Flag, r: int) -> VectorValuedForm:
    """Leading vertical part of a partially horizontal form.

    For a (k+1-r)-horizontal (k+1)-form this is the r-form on the
    vertical space with values in the (k+1-r)-forms on the quotient,
    obtained by filling the remaining slots through a splitting.  The
    result does not depend on which splitting the flag carries.
    """
    k1 = omega.degree
    if not 1 <= r <= k1:
        raise PreconditionError("horizontality parameter out of range")
    n = flag.dim_t
    if k1 - r > n:
        raise PreconditionError("quotient too small for the requested horizontality")
    aomega, _, _ = _adapted(omega, flag)
    _check_horizontality(aomega, n, r)
    m_dim = flag.total_dim - n
    combos = list(itertools.combinations(range(1, n + 1), k1 - r))
    pos = {c: i for i, c in enumerate(combos)}
    comps = [dict() for _ in combos]
    blocksign = -1 if (r * (k1 - r)) & 1 else 1
    tmask_all = (1 << n) - 1
    for m, c in aomega.coeffs.items():
        vmask = m >> n
        if vmask.bit_count() != r:
            continue
        tmask = m & tmask_all
        comps[pos[indices_of(tmask)]][vmask] = blocksign * c
    return VectorValuedForm(tuple(AlternatingForm(m_dim, r, d) for d in comps))


def check_multilagrangian(sub: Subspace, omega: AlternatingForm, flag: Flag, r: int) -> bool:
    """Contraction-image equality inside the partially horizontal forms.

    The candidate must sit in the vertical space; the right-hand side is
    the annihilating k-forms cut down to those with at most r-1 vertical
    factors.
    """
    k1 = omega.degree
    n = flag.dim_t
    if not 1 <= r <= k1:
        raise PreconditionError("horizontality parameter out of range")
    if k1 - r > n:
        raise PreconditionError("quotient too small for the requested horizontality")
    if not flag.vertical.contains_subspace(sub):
        raise PreconditionError("candidate subspace is not vertical")
    aomega, _, binv = _adapted(omega, flag)
    _check_horizontality(aomega, n, r)
    sub_a = Subspace.from_vectors(flag.total_dim, [binv.mul_vec(u) for u in sub.vectors()])
    return _check_multilagrangian_adapted(sub_a, aomega, n, r)


def _check_multilagrangian_adapted(sub_a: Subspace, aomega: AlternatingForm, n: int, r: int) -> bool:
    k = aomega.degree - 1
    lhs = flat_image_vectors(aomega, sub_a.vectors())
    wedges = _annihilator_wedges(sub_a, k)
    # cut the annihilator wedges down to the (k+1-r)-horizontal monomials
    bad_rows: dict = {}
    for i, w in enumerate(wedges):
        for m, c in w.coeffs.items():
            if _vertical_count(m, n) >= r:
                row = bad_rows.setdefault(m, [ZERO] * len(wedges))
                row[i] = c
    combos = kernel_basis(list(bad_rows.values()), len(wedges)) if bad_rows else None
    rhs = []
    if combos is None:
        rhs = [{(0, m): c for m, c in w.coeffs.items()} for w in wedges]
    else:
        for sol in combos:
            acc: dict = {}
            for coef, w in zip(sol, wedges):
                if coef:
                    for m, c in w.coeffs.items():
                        nv = acc.get((0, m), ZERO) + coef * c
                        if nv:
                            acc[(0, m)] = nv
                        else:
                            acc.pop((0, m), None)
            if acc:
                rhs.append(acc)
    return span_equal(lhs, rhs)


def dimension_criterion_multi(sub: Subspace, omega: AlternatingForm, flag: Flag, r: int) -> bool:
    """Kernel containment + isotropy + the horizontal counting identity."""
    k1 = omega.degree
    k = k1 - 1
    n = flag.dim_t
    if not flag.vertical.contains_subspace(sub):
        raise PreconditionError("candidate subspace is not vertical")
    n_codim = flag.vertical.dim - sub.dim
    if n_codim + n < k:
        raise PreconditionError(
            f"codimension {n_codim} plus quotient {n} is below the degree bound {k}")
    ker = kernel_of_form(omega)
    if not sub.contains_subspace(ker):
        return False
    if not is_isotropic(sub, omega, 1):
        return False
    expected = ker.dim + sum(comb(n_codim, s) * comb(n, k - s) for s in range(r))
    return sub.dim == expected


@dataclass
class SymbolCheck:
    symbol_polylagrangian: bool
    kernel_contained: bool
    kernel_gap: int
    gap_bound_applies: bool
    gap_bound_holds: bool


def symbol_structure_check(omega: AlternatingForm, flag: Flag, r: int, sub: Subspace) -> SymbolCheck:
    """Cross-check that the symbol inherits the structure with the same subspace."""
    if not check_multilagrangian(sub, omega, flag, r):
        raise PreconditionError("the candidate is not multilagrangian for the form")
    sym = symbol(omega, flag, r)
    binv = inverse(flag.adapted_matrix())
    sub_v = to_vertical_coordinates(flag, sub, binv)
    ok_poly = check_polylagrangian(sub_v, sym)
    ker_w = kernel_of_form(omega)
    ker_w_v = to_vertical_coordinates(flag, ker_w, binv)
    ker_sym = kernel_of_form(sym)
    contained = ker_sym.contains_subspace(ker_w_v)
    gap = ker_sym.dim - ker_w_v.dim
    presymplectic_case = (omega.degree - 1 == flag.dim_t and r == 2)
    return SymbolCheck(ok_poly, contained, gap, presymplectic_case,
                       (gap <= 1) if presymplectic_case else True)


# ---------------------------------------------------------------------------
# ranks


def rank_2form(omega: AlternatingForm) -> int:
    """Half the dimension of the support of an alternating 2-form."""
    if omega.degree != 2:
        raise PreconditionError("rank is defined here for 2-forms")
    support = omega.dim - kernel_of_form(omega).dim
    if support & 1:
        raise InternalCheckError("odd support dimension for an alternating 2-form")
    return support // 2


def uniform_rank(omega: VectorValuedForm) -> int | None:
    """The N with {omega^alpha : |alpha|=N} independent and all (N+1)-powers zero."""
    v = as_vector_form(omega)
    if v.degree != 2:
        raise PreconditionError("uniform rank is defined for 2-forms")
    nhat = v.value_dim
    for n_rank in range(1, v.dim // 2 + 1):
        indep = True
        ech_vectors = []
        for alpha in _exponents(nhat, n_rank):
            w = wedge_power_by_exponent(v, alpha)
            if w.is_zero():
                indep = False
                break
            ech_vectors.append(dict(w.coeffs))
        if indep:
            ech = span_of(ech_vectors)
            indep = ech.rank == len(ech_vectors)
        if not indep:
            continue
        if all(wedge_power_by_exponent(v, alpha).is_zero()
               for alpha in _exponents(nhat, n_rank + 1)):
            return n_rank
    return None


def _exponents(nvars: int, total: int):
    if nvars == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _exponents(nvars - 1, total - head):
            yield (head,) + rest


def random_covector(rng: random.Random, nhat: int) -> list[Fraction]:
    while True:
        t = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(nhat)]
        if any(t):
            return t


def constant_rank_sampled(omega: VectorValuedForm, sample_count: int,
                          seed: int = DEFAULT_SEED) -> int | None:
    """Common rank of sampled projections, or None on disagreement.

    A sound refuter and a sampled verifier: all standard basis covectors
    plus ``sample_count`` seeded random nonzero covectors are projected
    and ranked.  An exact certificate, when it exists, comes from
    ``uniform_rank`` instead.
    """
    v = as_vector_form(omega)
    if v.degree != 2:
        raise PreconditionError("constant rank is defined for 2-forms")
    if sample_count <= 0:
        raise PreconditionError("sample count must be positive")
    rng = random.Random(seed)
    covs = []
    for a in range(v.value_dim):
        e = [ZERO] * v.value_dim
        e[a] = ONE
        covs.append(e)
    covs.extend(random_covector(rng, v.value_dim) for _ in range(sample_count))
    ranks = {rank_2form(project(v, t)) for t in covs}
    return ranks.pop() if len(ranks) == 1 else None


def polysymplectic_uniform_rank_check(omega: VectorValuedForm, sub: Subspace) -> bool:
    """Non-degenerate degree-2 structure forces uniform rank = codim of L."""
    v = as_vector_form(omega)
    if v.degree != 2:
        raise PreconditionError("check applies to 2-forms")
    if kernel_of_form(v).dim != 0:
        raise PreconditionError("check applies to non-degenerate forms")
    if not check_polylagrangian(sub, v):
        raise PreconditionError("subspace fails the contraction-image equality")
    return uniform_rank(v) == v.dim - sub.dim


def kernels_orthogonal_under(omega: VectorValuedForm, t1, t2, t3) -> bool:
    """Are the kernels of two projections orthogonal under a third?"""
    v = as_vector_form(omega)
    k1 = kernel_of_form(project(v, t1))
    k2 = kernel_of_form(project(v, t2))
    p3 = project(v, t3)
    for u in k1.vectors():
        for w in k2.vectors():
            if evaluate(p3, [u, w]) != 0:
                return False
    return True


def projection_kernel_isotropy_check(omega: VectorValuedForm) -> bool:
    """Kernel of each projection is isotropic under every other projection.

    Runs over the deterministic grid of standard basis covectors and
    their pairwise sums; a consequence of uniform rank.
    """
    v = as_vector_form(omega)
    nhat = v.value_dim
    grid = []
    for a in range(nhat):
        e = [ZERO] * nhat
        e[a] = ONE
        grid.append(e)
    for a in range(nhat):
        for b in range(a + 1, nhat):
            e = [ZERO] * nhat
            e[a] = ONE
            e[b] = ONE
            grid.append(e)
    for t1 in grid:
        p1 = project(v, t1)
        if p1.is_zero():
            continue
        ker1 = kernel_of_form(p1)
        for t2 in grid:
            p2 = project(v, t2)
            for u in ker1.vectors():
                for w in ker1.vectors():
                    if evaluate(p2, [u, w]) != 0:
                        return False
    return True


# ---------------------------------------------------------------------------
# structure reports


@dataclass
class StructureReport:
    kernel: Subspace
    is_degenerate: bool
    rank: int | None
    lagrangian_subspace: Subspace | None
    classification: str
    horizontality: tuple[int, int] | None
    diagnostics: list[str] = field(default_factory=list)
    uniform_rank: int | None = None
    constant_rank_sampled: int | None = None
    seed: int = DEFAULT_SEED


def classify_vector_form(omega, *, seed: int = DEFAULT_SEED, samples: int = 25) -> StructureReport:
    """Full classification pipeline for a (vector-valued) alternating form."""
    v = as_vector_form(omega)
    diagnostics: list[str] = []
    if v.is_zero():
        return StructureReport(Subspace.full(v.dim), True, None, None, "none", None,
                               ["form vanishes; definitions require a non-vanishing form"],
                               None, None, seed)
    ker = kernel_of_form(v)
    degenerate = ker.dim > 0
    uni = cons = None
    if v.degree == 2:
        uni = uniform_rank(v)
        cons = constant_rank_sampled(v, samples, seed)
        diagnostics.append(f"uniform rank: {uni}; sampled constant rank: {cons} "
                           f"(seed {seed}, {samples} samples)")
    search = search_polylagrangian(v)
    diagnostics.extend(search.diagnostics)
    if search.status != "found":
        label = "proved absent" if search.status == "absent" else "not found"
        diagnostics.append(f"distinguished subspace: {label}")
        return StructureReport(ker, degenerate, None, None, "none", None, diagnostics,
                               uni, cons, seed)
    sub = search.subspace
    if not dimension_criterion_poly(sub, v):
        raise InternalCheckError("dimension criterion disagrees with the contraction test")
    k = v.degree - 1
    if k == 1:
        classification = "polypresymplectic" if degenerate else "polysymplectic"
    else:
        classification = "polylagrangian"
    return StructureReport(ker, degenerate, search.rank, sub, classification, None,
                           diagnostics, uni, cons, seed)


def detect_multilagrangian(omega: AlternatingForm, flag: Flag, r: int) -> PolylagrangianSearch:
    """Locate the multilagrangian subspace through the symbol.

    A multilagrangian form has a polylagrangian symbol with the same
    subspace, so for two or more symbol components a failed candidate is
    a proof of absence; with a scalar symbol the search is heuristic and
    a miss is only "not found".
    """
    if r == 1:
        # a k-horizontal form has the whole vertical space as its subspace
        sub = flag.vertical
        if check_multilagrangian(sub, omega, flag, r):
            return PolylagrangianSearch(sub, "found", 0, [], [])
        return PolylagrangianSearch(None, "absent", None,
                                    ["vertical space fails the horizontal contraction equality"], [])
    k1 = omega.degree
    n = flag.dim_t
    if k1 - r > n:
        raise PreconditionError("quotient too small for the requested horizontality")
    aomega, _, _ = _adapted(omega, flag)
    _check_horizontality(aomega, n, r)
    m_dim = flag.total_dim - n

    def adapted_candidate(sub_v: Subspace) -> Subspace:
        rows = [[ZERO] * n + list(u) for u in sub_v.vectors()]
        return Subspace.from_vectors(flag.total_dim, rows)

    def check_vertical(sub_v: Subspace) -> bool:
        return _check_multilagrangian_adapted(adapted_candidate(sub_v), aomega, n, r)

    sym = symbol(omega, flag, r)
    if sym.is_zero():
        # consistent with rank below r-1; fall back to a vertical greedy search
        vert_a = Subspace.span_of_coordinates(flag.total_dim, range(n + 1, flag.total_dim + 1))
        seen = set()
        for i in range(m_dim):
            row = [ZERO] * flag.total_dim
            row[n + i] = ONE
            seed = Subspace.from_vectors(flag.total_dim, [row])
            if not is_isotropic(seed, aomega, 1):
                continue
            cand_a = greedy_maximal_isotropic(aomega, seed, within=vert_a, verify=False)
            key = cand_a.basis.entries
            if key in seen:
                continue
            seen.add(key)
            if _check_multilagrangian_adapted(cand_a, aomega, n, r):
                sub_v = Subspace.from_vectors(m_dim, [u[n:] for u in cand_a.vectors()])
                sub_w = from_vertical_coordinates(flag, sub_v)
                return PolylagrangianSearch(sub_w, "found", flag.vertical.dim - sub_w.dim,
                                            ["symbol vanishes; vertical greedy search"], [])
        return PolylagrangianSearch(None, "not_found", None,
                                    ["symbol vanishes; vertical greedy search exhausted"], [])
    if sym.value_dim >= 2:
        search = search_polylagrangian(sym)
        if search.status != "found":
            return search
        if check_vertical(search.subspace):
            sub_w = from_vertical_coordinates(flag, search.subspace)
            return PolylagrangianSearch(sub_w, "found", search.rank, search.diagnostics,
                                        search.component_complement_dims)
        return PolylagrangianSearch(None, "absent",
                                    None, search.diagnostics +
                                    ["symbol subspace fails the horizontal contraction equality"],
                                    search.component_complement_dims)
    for cand in scalar_polylagrangian_candidates(sym):
        if check_vertical(cand):
            sub_w = from_vertical_coordinates(flag, cand)
            return PolylagrangianSearch(sub_w, "found", flag.vertical.dim - sub_w.dim, [], [])
    return PolylagrangianSearch(None, "not_found", None,
                                ["not found - possibly nonexistent "
                                 "(scalar-symbol search is heuristic)"], [])


def classify_horizontal_form(omega: AlternatingForm, flag: Flag, r: int | None = None,
                             *, seed: int = DEFAULT_SEED) -> StructureReport:
    """Classification of a partially horizontal scalar form on a flag."""
    diagnostics: list[str] = []
    if omega.is_zero():
        return StructureReport(Subspace.full(omega.dim), True, None, None, "none", None,
                               ["form vanishes"], None, None, seed)
    aomega, _, _ = _adapted(omega, flag)
    n = flag.dim_t
    if r is None:
        r = max((_vertical_count(m, n) for m in aomega.coeffs), default=0)
        diagnostics.append(f"horizontality parameter detected from the form: r = {r}")
    k1 = omega.degree
    if r == 0 or k1 - r > n:
        diagnostics.append("form is outside the admissible horizontality range")
        return StructureReport(kernel_of_form(omega), True, None, None, "none",
                               (r, k1 - r), diagnostics, None, None, seed)
    ker = kernel_of_form(omega)
    degenerate = ker.dim > 0
    search = detect_multilagrangian(omega, flag, r)
    diagnostics.extend(search.diagnostics)
    if search.status != "found":
        label = "proved absent" if search.status == "absent" else "not found"
        diagnostics.append(f"distinguished subspace: {label}")
        return StructureReport(ker, degenerate, None, None, "none", (r, k1 - r),
                               diagnostics, None, None, seed)
    sub = search.subspace
    if not dimension_criterion_multi(sub, omega, flag, r):
        raise InternalCheckError("dimension criterion disagrees with the contraction test")
    if k1 - 1 == n and r == 2:
        classification = "multipresymplectic" if degenerate else "multisymplectic"
    else:
        classification = "multilagrangian"
    rank_n = flag.vertical.dim - sub.dim
    return StructureReport(ker, degenerate, rank_n, sub, classification, (r, k1 - r),
                           diagnostics, None, None, seed)
