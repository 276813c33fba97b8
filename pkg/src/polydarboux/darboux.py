"""Canonical models and algebraic Darboux basis construction.

The canonical models pair a coordinate space with the standard structure
form whose coefficients are the normal-form pattern; the construction
routines rebuild exactly that pattern for an arbitrary structure form by
the inductive isotropic-complement extension and a linear solve for the
dual half of the basis.  Reconstruction is verified internally: the
pullback of the input by the produced basis must reproduce the model
coefficients with no error.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import ConstructionError, InternalCheckError, PreconditionError
from .exterior import (AlternatingForm, Flag, VectorValuedForm, basis_covector,
                       contract, coordinate_flag, embed_in, evaluate, form, pullback,
                       restrict_to_leading, wedge_all, zero_form)
from .lagrangian import (as_vector_form, check_multilagrangian, check_polylagrangian,
                         detect_multilagrangian, is_isotropic, kernel_of_form,
                         search_polylagrangian, symbol, to_vertical_coordinates,
                         _stacked)
from .linalg import (Matrix, Subspace, ZERO, ONE, complement, intersect, inverse,
                     subspace_sum, transform_subspace)
from .sparse import SparseSolver

# ---------------------------------------------------------------------------
# canonical models


@dataclass
class CanonicalModel:
    kind: str                       # "poly" | "multi"
    params: tuple
    form: VectorValuedForm | AlternatingForm
    lagrangian: Subspace            # L
    isotropic_complement: Subspace  # E
    frame_complement: Subspace | None  # F, multi case only
    flag: Flag | None
    labels: tuple

    @property
    def dim(self) -> int:
        f = self.form
        return f.dim if isinstance(f, AlternatingForm) else f.components[0].dim


def poly_coordinate_labels(n_rank: int, nhat: int, k: int) -> tuple:
    labels = [("q", (i,)) for i in range(1, n_rank + 1)]
    for a in range(1, nhat + 1):
        for idx in itertools.combinations(range(1, n_rank + 1), k):
            labels.append(("p", (a,), idx))
    return tuple(labels)


def canonical_poly_model(n_rank: int, nhat: int, k: int) -> CanonicalModel:
    """Standard model: a space E plus one momentum slot per value component
    and increasing k-index on E; the form pairs each slot with its index."""
    if not (n_rank >= k >= 1):
        raise PreconditionError("rank must be at least the form degree minus one")
    if nhat < 1:
        raise PreconditionError("value dimension must be positive")
    c_nk = comb(n_rank, k)
    dim = n_rank + nhat * c_nk
    components = []
    pos = n_rank + 1
    slots = []
    for a in range(nhat):
        coeffs = zero_form(dim, k + 1)
        for idx in itertools.combinations(range(1, n_rank + 1), k):
            w = wedge_all([basis_covector(dim, pos)] + [basis_covector(dim, i) for i in idx])
            coeffs = _add(coeffs, w)
            slots.append(pos)
            pos += 1
        components.append(coeffs)
    omega = VectorValuedForm(tuple(components))
    lagr = Subspace.span_of_coordinates(dim, range(n_rank + 1, dim + 1))
    e_sub = Subspace.span_of_coordinates(dim, range(1, n_rank + 1))
    return CanonicalModel("poly", (n_rank, nhat, k), omega, lagr, e_sub, None, None,
                          poly_coordinate_labels(n_rank, nhat, k))


def _add(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    from .exterior import add
    return add(a, b)


def multi_slot_index(n_rank: int, n_base: int, k: int, r: int):
    """Ordered (s, I, M) slots of the momentum block."""
    out = []
    for s in range(0, r):
        if k - s > n_base or k - s < 0:
            continue
        for idx in itertools.combinations(range(1, n_rank + 1), s):
            for mu in itertools.combinations(range(1, n_base + 1), k - s):
                out.append((s, idx, mu))
    return out


def multi_coordinate_labels(n_rank: int, n_base: int, k: int, r: int) -> tuple:
    labels = [("q", (i,)) for i in range(1, n_rank + 1)]
    labels += [("x", (mu,)) for mu in range(1, n_base + 1)]
    labels += [("p", idx, mu) for (_, idx, mu) in multi_slot_index(n_rank, n_base, k, r)]
    return tuple(labels)


def _multi_model_data(n_rank: int, n_base: int, k: int, r: int):
    slots = multi_slot_index(n_rank, n_base, k, r)
    dim = n_rank + n_base + len(slots)
    coeffs = zero_form(dim, k + 1)
    pos = n_rank + n_base + 1
    for (_, idx, mu) in slots:
        factors = [basis_covector(dim, pos)]
        factors += [basis_covector(dim, i) for i in idx]
        factors += [basis_covector(dim, n_rank + m) for m in mu]
        coeffs = _add(coeffs, wedge_all(factors))
        pos += 1
    vertical = list(range(1, n_rank + 1)) + list(range(n_rank + n_base + 1, dim + 1))
    flag = coordinate_flag(dim, vertical)
    lagr = Subspace.span_of_coordinates(dim, range(n_rank + n_base + 1, dim + 1))
    e_sub = Subspace.span_of_coordinates(dim, range(1, n_rank + 1))
    f_sub = Subspace.span_of_coordinates(dim, range(1, n_rank + n_base + 1))
    return coeffs, lagr, e_sub, f_sub, flag


def canonical_multi_model(n_rank: int, n_base: int, k: int, r: int) -> CanonicalModel:
    """Standard model over a flag: momentum slots run over mixed increasing
    indices with up to r-1 vertical factors.  Degenerate exactly when r = 1,
    with kernel the E block."""
    if not 1 <= r <= k + 1:
        raise PreconditionError("horizontality parameter out of range")
    if k + 1 - r > n_base:
        raise PreconditionError("base dimension too small for the horizontality degree")
    if n_rank < 1:
        raise PreconditionError("rank must be positive")
    if not multi_slot_index(n_rank, n_base, k, r):
        raise PreconditionError("parameters admit no momentum slots; the model form would vanish")
    omega, lagr, e_sub, f_sub, flag = _multi_model_data(n_rank, n_base, k, r)
    return CanonicalModel("multi", (n_rank, n_base, k, r), omega, lagr, e_sub, f_sub,
                          flag, multi_coordinate_labels(n_rank, n_base, k, r))


def canonical_multi_symbol(n_rank: int, n_base: int, k: int, r: int) -> VectorValuedForm:
    """The symbol pattern of the canonical multi model, on vertical coordinates.

    Vertical coordinates order the E block first, then the momentum block;
    value components run over increasing (k+1-r)-subsets of the base.
    """
    slots = multi_slot_index(n_rank, n_base, k, r)
    v_dim = n_rank + len(slots)
    combos = list(itertools.combinations(range(1, n_base + 1), k + 1 - r))
    comps = [zero_form(v_dim, r) for _ in combos]
    pos_of = {c: i for i, c in enumerate(combos)}
    for slot, (s, idx, mu) in enumerate(slots):
        if s != r - 1:
            continue
        factors = [basis_covector(v_dim, n_rank + slot + 1)]
        factors += [basis_covector(v_dim, i) for i in idx]
        comps[pos_of[mu]] = _add(comps[pos_of[mu]], wedge_all(factors))
    return VectorValuedForm(tuple(comps))


# ---------------------------------------------------------------------------
# inductive isotropic complement


def _greedy_standard_completion(dim: int, avoid: Subspace, count: int) -> list:
    """Standard basis vectors, in index order, independent modulo ``avoid``."""
    picked = []
    span = avoid
    for i in range(dim):
        if len(picked) == count:
            break
        e = [ZERO] * dim
        e[i] = ONE
        if not span.contains(e):
            picked.append(e)
            span = Subspace.from_vectors(dim, span.vectors() + [e])
    if len(picked) != count:
        raise ConstructionError("could not complete a complement with standard vectors")
    return picked


def _dual_rows(columns: list) -> list[tuple]:
    """Rows of the inverse of the basis given by the columns."""
    b = Matrix.from_cols(columns)
    return [inverse(b).row(i) for i in range(b.rows)]


def _lagrangian_solver(v: VectorValuedForm, lagr: Subspace):
    """Sparse solver over the contraction images of a complement of the kernel."""
    ker = kernel_of_form(v)
    l_prime = complement(ker, inside=lagr)
    solver = SparseSolver()
    for b in l_prime.vectors():
        solver.add_generator(_stacked(contract(b, v)))
    return l_prime, solver


def _solve_momentum_vector(solver: SparseSolver, l_prime: Subspace, target: dict):
    coeffs = solver.solve(target)
    if coeffs is None:
        raise ConstructionError(
            "required dual vector does not exist; the subspace is not "
            "poly/multilagrangian for the form")
    out = [ZERO] * l_prime.ambient_dim
    for c, b in zip(coeffs, l_prime.vectors()):
        if c:
            out = [x + c * y for x, y in zip(out, b)]
    return out


def _wedge_dual_target(duals: list, idx: tuple[int, ...], component: int, dim: int) -> dict:
    factors = [form(dim, 1, {(j + 1,): x for j, x in enumerate(duals[i - 1]) if x})
               for i in idx]
    w = wedge_all(factors) if factors else form(dim, 0, {(): 1})
    return {(component, m): c for m, c in w.coeffs.items()}


def extend_isotropic_complement_poly(v, lagr: Subspace, start: list) -> list:
    """One vector per induction step until the complement of L is filled.

    Each step corrects the lowest-index standard vector outside the current
    span by a momentum-block combination so the extension stays isotropic
    at level degree-1.
    """
    v = as_vector_form(v)
    dim = v.dim
    k = v.degree - 1
    n_rank = dim - lagr.dim
    e_vecs = [list(x) for x in start]
    if e_vecs:
        sub = Subspace.from_vectors(dim, e_vecs)
        if sub.dim != len(e_vecs) or intersect(sub, lagr).dim != 0:
            raise PreconditionError("start vectors must be independent from the subspace")
        if not is_isotropic(sub, v, min(k, v.degree - 1)):
            raise PreconditionError("start subspace is not isotropic at the required level")
    l_prime, solver = _lagrangian_solver(v, lagr)
    while len(e_vecs) < n_rank:
        avoid = subspace_sum(lagr, Subspace.from_vectors(dim, e_vecs))
        completion = _greedy_standard_completion(dim, avoid, n_rank - len(e_vecs))
        basis_c = e_vecs + completion
        candidate = completion[0]
        duals = _dual_rows(basis_c + [list(x) for x in lagr.vectors()])[:n_rank]
        u = list(candidate)
        for a in range(v.value_dim):
            contracted = contract(candidate, VectorValuedForm((v.components[a],)))
            for idx in itertools.combinations(range(1, n_rank + 1), k):
                coeff = evaluate(contracted.components[0], [basis_c[i - 1] for i in idx])
                if not coeff:
                    continue
                target = _wedge_dual_target(duals, idx, a, dim)
                mom = _solve_momentum_vector(solver, l_prime, target)
                u = [x - coeff * y for x, y in zip(u, mom)]
        e_vecs.append(u)
    return e_vecs


def extend_isotropic_complement_multi(omega: AlternatingForm, lagr: Subspace, flag: Flag,
                                      r: int, e_vecs: list, start_h: list) -> list:
    """Horizontal half of the multi induction; returns the appended vectors."""
    dim = omega.dim
    k = omega.degree - 1
    n_rank = len(e_vecs)
    n_base = flag.dim_t
    h_vecs = [list(x) for x in start_h]
    l_prime, solver = _lagrangian_solver(as_vector_form(omega), lagr)
    slots = multi_slot_index(n_rank, n_base, k, r)
    while len(h_vecs) < n_base:
        f_span = Subspace.from_vectors(dim, e_vecs + h_vecs)
        candidate = _greedy_standard_completion(dim, subspace_sum(flag.vertical, f_span), 1)[0]
        filler_avoid = subspace_sum(lagr, Subspace.from_vectors(
            dim, e_vecs + h_vecs + [candidate]))
        filler = _greedy_standard_completion(
            dim, filler_avoid, n_base - len(h_vecs) - 1)
        basis_c = e_vecs + h_vecs + [candidate] + filler
        duals = _dual_rows(basis_c + [list(x) for x in lagr.vectors()])[: n_rank + n_base]
        u = list(candidate)
        contracted = contract(candidate, omega)
        for (s, idx, mu) in slots:
            args = [basis_c[i - 1] for i in idx] + [basis_c[n_rank + m - 1] for m in mu]
            coeff = evaluate(contracted, args)
            if not coeff:
                continue
            target = _wedge_dual_target(duals, idx + tuple(n_rank + m for m in mu), 0, dim)
            mom = _solve_momentum_vector(solver, l_prime, target)
            u = [x - coeff * y for x, y in zip(u, mom)]
        h_vecs.append(u)
    return h_vecs


def extend_isotropic_complement(form_in, lagr: Subspace, start: Subspace,
                                mode: str = "poly", flag: Flag | None = None,
                                r: int | None = None) -> Subspace:
    """Public wrapper returning the completed isotropic complement subspace."""
    if mode == "poly":
        vecs = extend_isotropic_complement_poly(form_in, lagr, start.vectors())
        return Subspace.from_vectors(as_vector_form(form_in).dim, vecs)
    if mode != "multi":
        raise PreconditionError("mode must be 'poly' or 'multi'")
    if flag is None or r is None:
        raise PreconditionError("multi mode needs a flag and the horizontality parameter")
    omega = form_in
    e_part = intersect(start, flag.vertical)
    n_rank = flag.vertical.dim - lagr.dim
    if e_part.dim != n_rank or intersect(e_part, lagr).dim != 0:
        raise PreconditionError("start must meet the vertical space exactly in a complement of L")
    if not is_isotropic(start, omega, min(omega.degree - 1, omega.degree - 1)):
        raise PreconditionError("start subspace is not isotropic at the required level")
    h_part = complement(e_part, inside=start)
    h_vecs = extend_isotropic_complement_multi(
        omega, lagr, flag, r, [list(x) for x in e_part.vectors()],
        [list(x) for x in h_part.vectors()])
    return Subspace.from_vectors(omega.dim, list(e_part.vectors()) + h_vecs)


# ---------------------------------------------------------------------------
# Darboux bases


@dataclass
class DarbouxBasis:
    matrix: Matrix                  # columns are the new basis vectors
    labels: tuple
    lagrangian: Subspace
    params: tuple
    kind: str


def darboux_basis_poly(omega, lagrangian: Subspace | None = None) -> DarbouxBasis:
    """Canonical basis for a polylagrangian form; exact by construction.

    When no subspace is supplied the detection pipeline runs first; a
    supplied subspace is verified before use.  The pullback of the form
    by the returned basis is checked against the model coefficients and
    a failure raises, so a returned basis is always correct.
    """
    v = as_vector_form(omega)
    if lagrangian is None:
        search = search_polylagrangian(v)
        if search.status != "found":
            raise ConstructionError(
                f"no polylagrangian subspace ({search.status}): " + "; ".join(search.diagnostics))
        lagr = search.subspace
    else:
        if not check_polylagrangian(lagrangian, v):
            raise PreconditionError("supplied subspace fails the contraction-image equality")
        lagr = lagrangian
    dim = v.dim
    k = v.degree - 1
    n_rank = dim - lagr.dim
    nhat = v.value_dim
    e_vecs = extend_isotropic_complement_poly(v, lagr, [])
    duals = _dual_rows(e_vecs + [list(x) for x in lagr.vectors()])[:n_rank]
    l_prime, solver = _lagrangian_solver(v, lagr)
    columns = list(e_vecs)
    labels = [("q", (i,)) for i in range(1, n_rank + 1)]
    for a in range(nhat):
        for idx in itertools.combinations(range(1, n_rank + 1), k):
            target = _wedge_dual_target(duals, idx, a, dim)
            columns.append(_solve_momentum_vector(solver, l_prime, target))
            labels.append(("p", (a + 1,), idx))
    ker = kernel_of_form(v)
    for j, kv in enumerate(ker.vectors(), start=1):
        columns.append(list(kv))
        labels.append(("ker", (j,)))
    basis = Matrix.from_cols(columns)
    expected = embed_in(canonical_poly_model(n_rank, nhat, k).form, dim)
    if pullback(v, basis) != expected:
        raise InternalCheckError("constructed basis does not reproduce the model coefficients")
    return DarbouxBasis(basis, tuple(labels), lagr, (n_rank, nhat, k), "poly")


def darboux_basis_multi(omega: AlternatingForm, flag: Flag, r: int,
                        lagrangian: Subspace | None = None) -> DarbouxBasis:
    """Canonical basis for a multilagrangian form on a flag."""
    if lagrangian is None:
        search = detect_multilagrangian(omega, flag, r)
        if search.status != "found":
            raise ConstructionError(
                f"no multilagrangian subspace ({search.status}): " + "; ".join(search.diagnostics))
        lagr = search.subspace
    else:
        if not check_multilagrangian(lagrangian, omega, flag, r):
            raise PreconditionError("supplied subspace fails the horizontal contraction equality")
        lagr = lagrangian
    dim = omega.dim
    k = omega.degree - 1
    n_base = flag.dim_t
    n_rank = flag.vertical.dim - lagr.dim

    if r == 1:
        e_vecs: list = []
    else:
        sym = symbol(omega, flag, r)
        lagr_v = to_vertical_coordinates(flag, lagr)
        if sym.is_zero():
            # every vertical subspace is isotropic for a vanishing symbol
            e_v = [list(x) for x in complement(lagr_v).vectors()]
        else:
            e_v = extend_isotropic_complement_poly(sym, lagr_v, [])
        vert_rows = flag.vertical_rows()
        e_vecs = []
        for u in e_v:
            w = [ZERO] * dim
            for c, row in zip(u, vert_rows):
                if c:
                    w = [x + c * y for x, y in zip(w, row)]
            e_vecs.append(w)
    h_vecs = extend_isotropic_complement_multi(omega, lagr, flag, r, e_vecs, [])

    duals = _dual_rows(e_vecs + h_vecs + [list(x) for x in lagr.vectors()])[: n_rank + n_base]
    l_prime, solver = _lagrangian_solver(as_vector_form(omega), lagr)
    columns = list(e_vecs) + list(h_vecs)
    labels = [("q", (i,)) for i in range(1, n_rank + 1)]
    labels += [("x", (mu,)) for mu in range(1, n_base + 1)]
    slots = multi_slot_index(n_rank, n_base, k, r)
    for (s, idx, mu) in slots:
        target = _wedge_dual_target(duals, idx + tuple(n_rank + m for m in mu), 0, dim)
        columns.append(_solve_momentum_vector(solver, l_prime, target))
        labels.append(("p", idx, mu))
    ker = kernel_of_form(omega)
    for j, kv in enumerate(ker.vectors(), start=1):
        columns.append(list(kv))
        labels.append(("ker", (j,)))
    basis = Matrix.from_cols(columns)

    pulled = pullback(omega, basis)
    model_form = _multi_model_data(n_rank, n_base, k, r)[0]
    if pulled != embed_in(model_form, dim):
        raise InternalCheckError("constructed basis does not reproduce the model coefficients")
    # the symbol of the normalized form must match the model symbol pattern
    core_dim = n_rank + n_base + len(slots)
    core = restrict_to_leading(pulled, core_dim)
    core_flag = coordinate_flag(core_dim, list(range(1, n_rank + 1)) +
                                list(range(n_rank + n_base + 1, core_dim + 1)))
    if symbol(core, core_flag, r) != canonical_multi_symbol(n_rank, n_base, k, r):
        raise InternalCheckError("normalized form has an unexpected symbol pattern")
    return DarbouxBasis(basis, tuple(labels), lagr, (n_rank, n_base, k, r), "multi")


# ---------------------------------------------------------------------------
# seeded conjugation helpers


@dataclass
class ConjugateMap:
    matrix: Matrix
    inv: Matrix


def _shear(dim: int, i: int, j: int, c: Fraction) -> tuple[Matrix, Matrix]:
    fwd = [[ONE if a == b else ZERO for b in range(dim)] for a in range(dim)]
    bwd = [[ONE if a == b else ZERO for b in range(dim)] for a in range(dim)]
    fwd[i][j] = c
    bwd[i][j] = -c
    return Matrix.from_rows(fwd), Matrix.from_rows(bwd)


def seeded_conjugate(dim: int, seed: int, *, preserve: list[frozenset] | None = None,
                     shear_count: int = 6) -> ConjugateMap:
    """Seeded unimodular map, optionally mapping coordinate blocks to themselves.

    Built from a block permutation, sign flips and a bounded number of
    integer shears, so conjugated forms stay sparse and the inverse is
    exact.  ``preserve`` lists 1-based coordinate index sets S with the
    requirement m(span S) = span S.
    """
    rng = random.Random(seed)
    preserve = preserve or []
    sig = {}
    for i in range(1, dim + 1):
        sig[i] = tuple(i in s for s in preserve)
    # permutation respecting the membership signature
    groups: dict = {}
    for i in range(1, dim + 1):
        groups.setdefault(sig[i], []).append(i)
    perm = {}
    for members in groups.values():
        shuffled = members[:]
        rng.shuffle(shuffled)
        for src, dst in zip(members, shuffled):
            perm[src] = dst
    p_rows = [[ONE if perm[j + 1] == i + 1 else ZERO for j in range(dim)] for i in range(dim)]
    p_mat = Matrix.from_rows(p_rows)
    p_inv = p_mat.transpose()
    signs = [rng.choice([ONE, -ONE]) for _ in range(dim)]
    d_mat = Matrix.from_rows([[signs[i] if i == j else ZERO for j in range(dim)]
                              for i in range(dim)])
    mats = [(p_mat, p_inv), (d_mat, d_mat)]
    def shear_allowed(i, j):
        # column j gains an entry in row i: preserved spans need j in S -> i in S
        return all((j + 1) not in s or (i + 1) in s for s in preserve)
    tries = 0
    added = 0
    while added < shear_count and tries < 50 * shear_count:
        tries += 1
        i, j = rng.randrange(dim), rng.randrange(dim)
        if i == j or not shear_allowed(i, j):
            continue
        c = Fraction(rng.choice([-2, -1, 1, 2]))
        mats.append(_shear(dim, i, j, c))
        added += 1
    fwd = Matrix.identity(dim)
    bwd = Matrix.identity(dim)
    for f, b in mats:
        fwd = fwd @ f
        bwd = b @ bwd
    return ConjugateMap(fwd, bwd)


def conjugated_poly_instance(model: CanonicalModel, seed: int):
    """Pullback of a poly model by a seeded map, with the moved subspace."""
    cmap = seeded_conjugate(model.dim, seed)
    moved = pullback(model.form, cmap.matrix)
    lagr = transform_subspace(cmap.inv, model.lagrangian)
    return moved, lagr, cmap


def conjugated_multi_instance(model: CanonicalModel, seed: int):
    """Flag-preserving pullback of a multi model (the vertical space is fixed)."""
    n_rank, n_base, k, r = model.params
    dim = model.dim
    vertical = frozenset(list(range(1, n_rank + 1)) +
                         list(range(n_rank + n_base + 1, dim + 1)))
    cmap = seeded_conjugate(dim, seed, preserve=[vertical])
    moved = pullback(model.form, cmap.matrix)
    lagr = transform_subspace(cmap.inv, model.lagrangian)
    return moved, lagr, cmap
