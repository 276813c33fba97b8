"""Floating-point deformation-flow demonstrator.

Interpolates between a closed polynomial structure form and its constant
value at the origin, solves for the fiber-valued deformation field from
the exact correction form, and integrates the flow together with its
Jacobian.  The time-1 pullback is compared against the constant form
coefficientwise; everything up to the linear solves is exact, the flow
itself is fourth-order Runge-Kutta.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .darboux import canonical_multi_model
from .errors import PolydarbouxError, PreconditionError
from .exterior import indices_of, removal_sign
from .linalg import ZERO
from .polyforms import (PolyForm, Polynomial, constant_spread, exterior_d,
                        moser_potential, pf_add, pf_scale, pf_sub, pf_wedge, pf_zero,
                        poly_const, poly_from_terms, poly_var)


class MoserFlowError(PolydarbouxError, RuntimeError):
    """The deformation field left its validity neighborhood."""


DEFAULT_SOLVE_TOL = 1e-10
DEFAULT_ACCEPT_TOL = 1e-6
DEFAULT_STEPS = 1000


@dataclass
class FlowState:
    point: np.ndarray
    jacobian: np.ndarray
    t: float
    min_det: float = 1.0


@dataclass
class MoserReport:
    residuals: list[float]
    max_residual: float
    steps: int
    solve_tol: float
    min_jacobian_det: float
    sample_points: list


class _CompiledPolys:
    """Batch evaluator for a family of polynomials over shared monomials."""

    def __init__(self, polys: list[Polynomial], dim: int):
        monos: dict[tuple, int] = {}
        for p in polys:
            for e in p.terms:
                monos.setdefault(e, len(monos))
        if not monos:
            monos[(0,) * dim] = 0
        self.exps = np.array(sorted(monos, key=monos.get), dtype=float)
        self.weights = np.zeros((len(polys), len(monos)))
        for i, p in enumerate(polys):
            for e, c in p.terms.items():
                self.weights[i, monos[e]] = float(c)

    def eval(self, points: np.ndarray) -> np.ndarray:
        """points: (batch, dim) -> values (batch, n_polys)."""
        mono = np.prod(points[:, None, :] ** self.exps[None, :, :], axis=2)
        return mono @ self.weights.T


class DeformationField:
    """Solves i_X omega_t = alpha for X in the fiber block, with Jacobian.

    Coefficient data is polynomial; values and exact partial derivatives
    are evaluated through one precompiled monomial table, and the linear
    solves are batched over trajectories.
    """

    def __init__(self, omega: PolyForm, omega0: PolyForm, alpha: PolyForm,
                 solve_tol: float = DEFAULT_SOLVE_TOL):
        self.dim = omega.dim
        self.x_dim = omega.x_dim
        self.solve_tol = solve_tol
        self.l_indices = list(range(self.x_dim, self.dim))
        delta = pf_sub(omega, omega0)  # omega_t = omega0 + t * delta
        masks = sorted(set(omega0.coeffs) | set(delta.coeffs))
        rows = sorted({m ^ (1 << j) for m in masks
                       for j in self.l_indices if m & (1 << j)}
                      | set(alpha.coeffs))
        self.row_pos = {m: i for i, m in enumerate(rows)}
        self.n_rows = len(rows)
        self.n_cols = len(self.l_indices)

        # static part of the system matrix, from the constant form
        self.a_const = np.zeros((self.n_rows, self.n_cols))
        for m, p in omega0.coeffs.items():
            val = float(p.terms.get((0,) * self.dim, ZERO))
            for col, j in enumerate(self.l_indices):
                bit = 1 << j
                if m & bit:
                    self.a_const[self.row_pos[m ^ bit], col] += removal_sign(m, j) * val

        # moving part: one polynomial value per (mask, fiber index) entry,
        # followed by its dim partial derivatives
        entry_rows, entry_cols, entry_signs, polys = [], [], [], []
        for m, p in delta.coeffs.items():
            for col, j in enumerate(self.l_indices):
                bit = 1 << j
                if m & bit:
                    entry_rows.append(self.row_pos[m ^ bit])
                    entry_cols.append(col)
                    entry_signs.append(float(removal_sign(m, j)))
                    polys.append(p)
        self.entry_rows = np.array(entry_rows, dtype=int)
        self.entry_cols = np.array(entry_cols, dtype=int)
        self.entry_signs = np.array(entry_signs)
        self.n_entries = len(polys)

        rhs_rows, rhs_polys = [], []
        for m, p in alpha.coeffs.items():
            rhs_rows.append(self.row_pos[m])
            rhs_polys.append(p)
        self.rhs_rows = np.array(rhs_rows, dtype=int)
        self.n_rhs = len(rhs_polys)

        stacked: list[Polynomial] = []
        stacked.extend(polys)
        for v in range(self.dim):
            stacked.extend(p.diff(v + 1) for p in polys)
        stacked.extend(rhs_polys)
        for v in range(self.dim):
            stacked.extend(p.diff(v + 1) for p in rhs_polys)
        self.compiled = _CompiledPolys(stacked, self.dim)

    def _systems(self, points: np.ndarray, t: float):
        """Batched (A, b, dA, db) at parameter t."""
        vals = self.compiled.eval(points)
        ne, nr = self.n_entries, self.n_rhs
        batch = points.shape[0]
        a = np.broadcast_to(self.a_const, (batch, self.n_rows, self.n_cols)).copy()
        if ne:
            a[:, self.entry_rows, self.entry_cols] += t * self.entry_signs * vals[:, :ne]
        b = np.zeros((batch, self.n_rows))
        off = ne * (1 + self.dim)
        if nr:
            b[:, self.rhs_rows] = vals[:, off:off + nr]
        da = np.zeros((batch, self.dim, self.n_rows, self.n_cols))
        db = np.zeros((batch, self.dim, self.n_rows))
        for v in range(self.dim):
            if ne:
                seg = vals[:, ne * (1 + v):ne * (2 + v)]
                da[:, v, self.entry_rows, self.entry_cols] = t * self.entry_signs * seg
            if nr:
                seg = vals[:, off + nr * (1 + v):off + nr * (2 + v)]
                db[:, v, self.rhs_rows] = seg
        return a, b, da, db

    def batch(self, points: np.ndarray, t: float, with_jacobian: bool = True):
        """Field values (batch, dim) and Jacobians (batch, dim, dim)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        a, b, da, db = self._systems(points, t)
        batch = points.shape[0]
        x = np.zeros((batch, self.dim))
        dx = np.zeros((batch, self.dim, self.dim)) if with_jacobian else None
        for i in range(batch):
            sol, _, rk, _ = np.linalg.lstsq(a[i], b[i], rcond=None)
            if rk < self.n_cols:
                raise MoserFlowError(f"deformation system is singular at t={t}")
            resid = float(np.max(np.abs(a[i] @ sol - b[i]))) if self.n_rows else 0.0
            if resid > self.solve_tol:
                raise MoserFlowError(
                    f"deformation solve residual {resid:.3e} exceeds {self.solve_tol:.1e}")
            x[i, self.l_indices] = sol
            if with_jacobian:
                rhs = db[i].T - np.einsum('vrc,c->rv', da[i], sol)
                corr, _, _, _ = np.linalg.lstsq(a[i], rhs, rcond=None)
                dx[i][np.ix_(self.l_indices, range(self.dim))] = corr
        return x, dx

    def field(self, p, t: float, with_jacobian: bool = True):
        x, dx = self.batch(np.asarray(p, dtype=float)[None, :], t, with_jacobian)
        return x[0], (dx[0] if with_jacobian else None)


def integrate_flow(field, p0, steps: int, with_jacobian: bool = True) -> FlowState:
    """Classical fourth-order Runge-Kutta from t=0 to t=1.

    The variational equation for the Jacobian is integrated alongside the
    point using the same stages; the Jacobian determinant is monitored.
    """
    states = integrate_flow_batch(
        _as_batch_field(field), np.asarray(p0, dtype=float)[None, :], steps, with_jacobian)
    return states[0]


def _as_batch_field(field):
    def run(points, t, with_jacobian=True):
        xs, dxs = [], []
        for p in points:
            x, dx = field(p, t, with_jacobian)
            xs.append(x)
            dxs.append(dx)
        return np.array(xs), (np.array(dxs) if with_jacobian else None)
    return run


def integrate_flow_batch(batch_field, p0s: np.ndarray, steps: int,
                         with_jacobian: bool = True, t_end: float = 1.0) -> list[FlowState]:
    if steps < 1:
        raise PreconditionError("need at least one step")
    pts = np.array(p0s, dtype=float)
    batch, dim = pts.shape
    jac = np.broadcast_to(np.eye(dim), (batch, dim, dim)).copy()
    h = t_end / steps
    t = 0.0
    min_det = np.abs(np.linalg.det(jac))
    for _ in range(steps):
        k1, d1 = batch_field(pts, t, with_jacobian)
        k2, d2 = batch_field(pts + 0.5 * h * k1, t + 0.5 * h, with_jacobian)
        k3, d3 = batch_field(pts + 0.5 * h * k2, t + 0.5 * h, with_jacobian)
        k4, d4 = batch_field(pts + h * k3, t + h, with_jacobian)
        if with_jacobian:
            j1 = np.einsum('bij,bjk->bik', d1, jac)
            j2 = np.einsum('bij,bjk->bik', d2, jac + 0.5 * h * j1)
            j3 = np.einsum('bij,bjk->bik', d3, jac + 0.5 * h * j2)
            j4 = np.einsum('bij,bjk->bik', d4, jac + h * j3)
            jac = jac + (h / 6.0) * (j1 + 2 * j2 + 2 * j3 + j4)
            dets = np.abs(np.linalg.det(jac))
            min_det = np.minimum(min_det, dets)
            if np.any(dets < 1e-12):
                raise MoserFlowError("flow Jacobian collapsed")
        pts = pts + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return [FlowState(pts[i], jac[i], t, float(min_det[i])) for i in range(batch)]


def pullback_constant_float(coeffs: dict, jac: np.ndarray, degree: int, dim: int) -> dict:
    """Coefficients of the pullback of a constant float form by a matrix."""
    out = {}
    for target in itertools.combinations(range(dim), degree):
        total = 0.0
        for m, c in coeffs.items():
            rows = [b for b in range(dim) if m & (1 << b)]
            sub = jac[np.ix_(rows, list(target))]
            total += c * float(np.linalg.det(sub))
        if total:
            out[sum(1 << t for t in target)] = total
    return out


def verify_darboux(omega: PolyForm, omega0: PolyForm, sample_points, steps: int = DEFAULT_STEPS,
                   *, solve_tol: float = DEFAULT_SOLVE_TOL) -> MoserReport:
    """Flow each sample to t=1 and compare the pullback against the constant form.

    The correction form is exact; the only approximations are the linear
    solves along the trajectory and the Runge-Kutta discretization.
    """
    if not exterior_d(omega).is_zero():
        raise PreconditionError("form is not closed")
    alpha = moser_potential(omega, omega0)
    if exterior_d(alpha) != pf_sub(omega0, omega):
        raise PreconditionError("correction form does not differentiate to the difference")
    solver = DeformationField(omega, omega0, alpha, solve_tol)
    base = {m: float(c.eval_float([0.0] * omega.dim)) for m, c in omega0.coeffs.items()}
    pts = np.array([np.asarray(p, dtype=float) for p in sample_points])
    states = integrate_flow_batch(solver.batch, pts, steps)
    residuals = []
    min_det = float("inf")
    for state in states:
        min_det = min(min_det, state.min_det)
        val = omega.coeffs_float(state.point)
        pulled = pullback_constant_float(val, state.jacobian, omega.degree, omega.dim)
        keys = set(base) | set(pulled)
        residuals.append(max(abs(pulled.get(m, 0.0) - base.get(m, 0.0)) for m in keys))
    return MoserReport(residuals, max(residuals) if residuals else 0.0, steps,
                       solve_tol, min_det, [list(map(float, p)) for p in sample_points])


def intermediate_residual(omega: PolyForm, omega0: PolyForm, sample_points,
                          steps: int, t_end: float,
                          *, solve_tol: float = DEFAULT_SOLVE_TOL) -> float:
    """Max coefficient residual of the partial flow: (F_s)* omega_s vs omega0.

    The interpolated form is constant along the flow up to discretization,
    so this residual shrinks at the integrator's order as steps grow.
    """
    alpha = moser_potential(omega, omega0)
    solver = DeformationField(omega, omega0, alpha, solve_tol)
    delta = pf_sub(omega, omega0)
    base = {m: float(c.eval_float([0.0] * omega.dim)) for m, c in omega0.coeffs.items()}
    pts = np.array([np.asarray(p, dtype=float) for p in sample_points])
    states = integrate_flow_batch(solver.batch, pts, steps, t_end=t_end)
    worst = 0.0
    for state in states:
        val = omega0.coeffs_float(state.point)
        for m, c in delta.coeffs.items():
            val[m] = val.get(m, 0.0) + t_end * c.eval_float(state.point)
        pulled = pullback_constant_float(val, state.jacobian, omega.degree, omega.dim)
        keys = set(base) | set(pulled)
        worst = max(worst, max(abs(pulled.get(m, 0.0) - base.get(m, 0.0)) for m in keys))
    return worst


# ---------------------------------------------------------------------------
# fixtures


@dataclass
class MoserFixture:
    omega: PolyForm
    omega0: PolyForm
    chart_map: list[Polynomial]
    seed: int


def constant_poly_form(values, dim: int, degree: int, split: tuple[int, int]) -> PolyForm:
    coeffs = {}
    for m, c in values.items():
        c = Fraction(c)
        if c:
            coeffs[m] = poly_const(dim, c)
    return PolyForm(dim, degree, split, coeffs)


def polynomial_map_pullback(constant: PolyForm, chart_map: list[Polynomial]) -> PolyForm:
    """Pullback of a constant-coefficient form by a polynomial map."""
    dim = constant.dim
    differentials = []
    for comp in chart_map:
        coeffs = {}
        for v in range(1, dim + 1):
            dp = comp.diff(v)
            if not dp.is_zero():
                coeffs[1 << (v - 1)] = dp
        differentials.append(PolyForm(dim, 1, constant.split, coeffs))
    out = pf_zero(dim, constant.degree, constant.split)
    for m, p in constant.coeffs.items():
        c = p.terms.get((0,) * dim, ZERO)
        if not c:
            continue
        w = None
        for b in indices_of(m):
            w = differentials[b - 1] if w is None else pf_wedge(w, differentials[b - 1])
        out = pf_add(out, pf_scale(w, c))
    return out


def perturbed_multisymplectic(seed: int = 1, amplitude: Fraction = Fraction(1, 20),
                              terms_per_coord: int = 2) -> MoserFixture:
    """Pullback of the six-dimensional multisymplectic model by a seeded
    near-identity cubic map that preserves the base/fiber block structure.

    Closedness and the structure property hold by construction, the value
    at the origin is unchanged, and the distinguished fiber block stays
    distinguished because the map is block-triangular.
    """
    model = canonical_multi_model(1, 2, 2, 2)
    dim = model.dim  # 6: E(1) + base(2) + momentum block(3)
    split = (3, 3)
    values = {m: c for m, c in model.form.coeffs.items()}
    omega0 = constant_poly_form(values, dim, model.form.degree, split)
    rng = random.Random(seed)
    # allowed variable dependencies keep the vertical and fiber blocks invariant
    allowed = {1: [1, 2, 3], 2: [2, 3], 3: [2, 3], 4: [1, 2, 3, 4, 5, 6],
               5: [1, 2, 3, 4, 5, 6], 6: [1, 2, 3, 4, 5, 6]}
    denom = 2 * amplitude.denominator
    chart_map = []
    for i in range(1, dim + 1):
        comp = poly_var(dim, i)
        vars_i = allowed[i]
        for _ in range(terms_per_coord):
            deg = rng.choice([2, 3])
            exps = [0] * dim
            for _ in range(deg):
                exps[rng.choice(vars_i) - 1] += 1
            num = rng.choice([-2, -1, 1, 2])
            comp = comp + poly_from_terms(dim, {tuple(exps): Fraction(num, denom)})
        chart_map.append(comp)
    omega = polynomial_map_pullback(omega0, chart_map)
    if not exterior_d(omega).is_zero():
        raise PreconditionError("perturbed form is not closed (fixture bug)")
    if constant_spread(omega) != omega0:
        raise PreconditionError("perturbation moved the value at the origin (fixture bug)")
    return MoserFixture(omega, omega0, chart_map, seed)


def ball_sample_points(dim: int, count: int, radius: float, seed: int = 20070):
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        p = np.array([rng.uniform(-radius, radius) for _ in range(dim)])
        if np.linalg.norm(p) <= radius:
            pts.append(p)
    return pts
