"""The Yamabe quotient, mixed norms, and executable inequality checkers.

Each ``check_*`` function evaluates both sides of one inequality from the
product lower bound argument on concrete discrete data and returns an
``InequalityReport``. A report with ``holds=False`` from a checker that must
always hold is a defect, not a property of the input.
"""

import math
from dataclasses import dataclass

import numpy as np

from yamabe.discrete import DiscreteManifold
from yamabe.errors import DimensionError, DomainError, ManifoldError
from yamabe.invariants import conformal_exponent, critical_exponent, product_lower_bound

# Inequality verdict tolerances: relative to |rhs|, with an absolute floor
TOL_REL = 1e-10
TOL_ABS = 1e-12


@dataclass(frozen=True)
class InequalityReport:
    """Both sides of one inequality and the verdict.

    ``sense`` is '<=' (lhs <= rhs, slack = rhs - lhs) or '>=' (lhs >= rhs,
    slack = lhs - rhs). holds <=> slack >= -max(TOL_REL * |rhs|, TOL_ABS).
    """

    lhs: float
    rhs: float
    slack: float
    holds: bool
    sense: str = '<='

    @classmethod
    def compare(cls, lhs: float, rhs: float, sense: str = '<=',
                tol_rel: float = TOL_REL, tol_abs: float = TOL_ABS) -> 'InequalityReport':
        lhs, rhs = float(lhs), float(rhs)
        if sense == '<=':
            slack = rhs - lhs
        elif sense == '>=':
            slack = lhs - rhs
        else:
            raise ValueError(f"sense must be '<=' or '>=', got {sense!r}")
        holds = slack >= -max(tol_rel * abs(rhs), tol_abs)
        return cls(lhs, rhs, slack, bool(holds), sense)


# ---------------------------------------------------------------------------
# Field helpers
# ---------------------------------------------------------------------------

def as_field(manifold: DiscreteManifold, u) -> np.ndarray:
    """Flat float64 copy of u, checked against the vertex count."""
    values = np.asarray(u, dtype=np.float64).reshape(-1)
    if values.size != manifold.n_vertices:
        raise ManifoldError(f"field has {values.size} values for {manifold.n_vertices} vertices")
    return values


def product_field(mv: DiscreteManifold, mw: DiscreteManifold, u) -> np.ndarray:
    """u on V x W as an (|V|, |W|) array."""
    values = np.asarray(u, dtype=np.float64)
    shape = (mv.n_vertices, mw.n_vertices)
    if values.size != shape[0] * shape[1]:
        raise ManifoldError(f"field has {values.size} values for a {shape[0]} x {shape[1]} product")
    return values.reshape(shape)


def _require_nonzero(values: np.ndarray) -> None:
    if not np.any(values):
        raise DomainError("zero field: u must not vanish identically")


def _require_dims(*manifolds: DiscreteManifold) -> None:
    for manifold in manifolds:
        if manifold.dim < 3:
            raise DimensionError(f"dimension-too-small: {manifold.label or 'manifold'} has dim {manifold.dim}")


# ---------------------------------------------------------------------------
# Quotient and norms
# ---------------------------------------------------------------------------

def quotient_terms(manifold: DiscreteManifold, u: np.ndarray) -> tuple[float, float]:
    """(numerator, sum |u|^p rho) of the Yamabe quotient; u must already be a flat field."""
    a = conformal_exponent(manifold.dim)
    p = critical_exponent(manifold.dim)
    rho = manifold.masses
    numerator = a * manifold.dirichlet(u) + float(np.dot(manifold.scalar_curvature * rho, u * u))
    power_sum = float(np.dot(rho, np.abs(u) ** p))
    return numerator, power_sum


def yamabe_quotient(manifold: DiscreteManifold, u) -> float:
    """F(u) = (a_m D(u) + sum s u^2 rho) / (sum |u|^p_m rho)^(2/p_m)."""
    _require_dims(manifold)
    values = as_field(manifold, u)
    _require_nonzero(values)
    numerator, power_sum = quotient_terms(manifold, values)
    return numerator / power_sum ** (2 / critical_exponent(manifold.dim))


def einstein_hilbert(manifold: DiscreteManifold) -> float:
    """E = total scalar curvature / vol^((m-2)/m); the quotient of a constant field."""
    _require_dims(manifold)
    m = manifold.dim
    return manifold.total_scalar_curvature() / manifold.volume ** ((m - 2) / m)


def lp_norm(manifold: DiscreteManifold, u, p: float) -> float:
    if not p >= 1:
        raise DomainError(f"exponent p must be >= 1, got {p!r}")
    values = as_field(manifold, u)
    return float(np.dot(manifold.masses, np.abs(values) ** p)) ** (1 / p)


def mixed_norm(mv: DiscreteManifold, mw: DiscreteManifold, u, p: float, q: float) -> float:
    """L^{p,q} norm: inner L^q over W, outer L^p over V."""
    if not p >= 1 or not q >= 1:
        raise DomainError(f"exponents must be >= 1, got p={p!r}, q={q!r}")
    values = np.abs(product_field(mv, mw, u))
    inner = (values ** q) @ mw.masses
    return float(np.dot(mv.masses, inner ** (p / q))) ** (1 / p)


def partial_l2(mw: DiscreteManifold, u) -> np.ndarray:
    """gamma(i) = (sum_j u(i,j)^2 rho_W(j))^(1/2), a field on V."""
    values = np.asarray(u, dtype=np.float64)
    nw = mw.n_vertices
    if values.ndim == 2:
        if values.shape[1] != nw:
            raise ManifoldError(f"field has {values.shape[1]} columns for {nw} vertices of W")
    elif values.size % nw:
        raise ManifoldError(f"field of {values.size} values is not a multiple of |W| = {nw}")
    values = values.reshape(-1, nw)
    return np.sqrt((values * values) @ mw.masses)


def dirichlet_split(mv: DiscreteManifold, mw: DiscreteManifold, u) -> tuple[float, float]:
    """(V-direction, W-direction) parts of the product Dirichlet energy."""
    values = product_field(mv, mw, u)
    dv = values[mv.edges[:, 0], :] - values[mv.edges[:, 1], :]
    v_part = float(mv.weights @ ((dv * dv) @ mw.masses))
    dw = values[:, mw.edges[:, 0]] - values[:, mw.edges[:, 1]]
    w_part = float(mv.masses @ ((dw * dw) @ mw.weights))
    return v_part, w_part


# ---------------------------------------------------------------------------
# Inequality checkers
# ---------------------------------------------------------------------------

def check_iterated_holder(mv: DiscreteManifold, mw: DiscreteManifold, u) -> InequalityReport:
    """Mixed-norm Hoelder inequality on V x W.

    (int |u|^p_m)^(2/p_m) <= (int_V (int_W |u|^p_w)^(2/p_w))^(w/m) * (int_V (int_W u^2)^(p_v/2))^((v-2)/m)
    """
    _require_dims(mv, mw)
    values = np.abs(product_field(mv, mw, u))
    _require_nonzero(values)
    v, w = mv.dim, mw.dim
    m = v + w
    p_m, p_v, p_w = critical_exponent(m), critical_exponent(v), critical_exponent(w)

    total = float(mv.masses @ ((values ** p_m) @ mw.masses))
    lhs = total ** (2 / p_m)
    first = float(mv.masses @ (((values ** p_w) @ mw.masses) ** (2 / p_w)))
    second = float(mv.masses @ (((values * values) @ mw.masses) ** (p_v / 2)))
    rhs = first ** (w / m) * second ** ((v - 2) / m)
    return InequalityReport.compare(lhs, rhs)


def check_partial_gradient(mv: DiscreteManifold, mw: DiscreteManifold, u) -> InequalityReport:
    """The V-energy of gamma = ||u(i, .)||_{L^2(W)} is at most the V-direction energy of u."""
    values = product_field(mv, mw, u)
    _require_nonzero(values)
    gamma = partial_l2(mw, values)
    v_part, _ = dirichlet_split(mv, mw, values)
    return InequalityReport.compare(mv.dirichlet(gamma), v_part)


def check_assumption(mv: DiscreteManifold, mw: DiscreteManifold) -> InequalityReport:
    """(s_V + s_W)/a_m >= s_V/a_v + s_W/a_w at every vertex pair.

    Evaluated over distinct curvature values only; lhs/rhs are the worst pair's.
    """
    _require_dims(mv, mw)
    v, w = mv.dim, mw.dim
    a_m, a_v, a_w = conformal_exponent(v + w), conformal_exponent(v), conformal_exponent(w)
    s = np.unique(mv.scalar_curvature)[:, None]
    t = np.unique(mw.scalar_curvature)[None, :]
    lhs = (s + t) / a_m
    rhs = s / a_v + t / a_w
    worst = np.unravel_index(np.argmin(lhs - rhs), lhs.shape)
    return InequalityReport.compare(lhs[worst], rhs[worst], sense='>=')


def check_young(c: float, d: float, v: int, w: int) -> InequalityReport:
    """c d <= (v/m) c^(m/v) + (w/m) d^(m/w); equality iff c^(m/v) = d^(m/w)."""
    if not c >= 0 or not d >= 0:
        raise DomainError(f"c and d must be >= 0, got c={c!r}, d={d!r}")
    if v < 1 or w < 1:
        raise DimensionError(f"dimension-too-small: v={v}, w={w}")
    m = v + w
    return InequalityReport.compare(c * d, v / m * c ** (m / v) + w / m * d ** (m / w))


def check_curvature_split(mv: DiscreteManifold, mw: DiscreteManifold, u) -> InequalityReport:
    """Splitting the quotient numerator into V- and W-parts with a_v, a_w weights.

    int (|du|^2 + s/a_m u^2) >= int (|du|_g^2 + s_V/a_v u^2) + int (|du|_h^2 + s_W/a_w u^2);
    holds whenever check_assumption holds.
    """
    _require_dims(mv, mw)
    values = product_field(mv, mw, u)
    _require_nonzero(values)
    v, w = mv.dim, mw.dim
    a_m, a_v, a_w = conformal_exponent(v + w), conformal_exponent(v), conformal_exponent(w)
    v_part, w_part = dirichlet_split(mv, mw, values)
    weighted = np.outer(mv.masses, mw.masses) * values * values
    s = mv.scalar_curvature[:, None]
    t = mw.scalar_curvature[None, :]
    lhs = v_part + w_part + float(np.sum((s + t) / a_m * weighted))
    rhs = (v_part + float(np.sum(s / a_v * weighted))) + (w_part + float(np.sum(t / a_w * weighted)))
    return InequalityReport.compare(lhs, rhs, sense='>=')


def check_young_chain(mv: DiscreteManifold, mw: DiscreteManifold, u,
                      mu_v: float, mu_w: float) -> InequalityReport:
    """Young's inequality applied to the two mixed-norm terms of the product bound.

    With a = int_V (int_W u^2)^(p_v/2) and b = int_V (int_W |u|^p_w)^(2/p_w):
    r a^((v-2)/m) b^(w/m) <= (a_m/a_v) mu_v a^((v-2)/v) + (a_m/a_w) mu_w b,
    where r is the product lower bound for (mu_v, mu_w).
    """
    _require_dims(mv, mw)
    values = np.abs(product_field(mv, mw, u))
    _require_nonzero(values)
    v, w = mv.dim, mw.dim
    m = v + w
    a_m, a_v, a_w = conformal_exponent(m), conformal_exponent(v), conformal_exponent(w)
    p_v, p_w = critical_exponent(v), critical_exponent(w)

    a = float(mv.masses @ (((values * values) @ mw.masses) ** (p_v / 2)))
    b = float(mv.masses @ (((values ** p_w) @ mw.masses) ** (2 / p_w)))
    r = product_lower_bound(mu_v, mu_w, v, w)
    lhs = r * a ** ((v - 2) / m) * b ** (w / m)
    rhs = a_m / a_v * mu_v * a ** ((v - 2) / v) + a_m / a_w * mu_w * b
    return InequalityReport.compare(lhs, rhs)


def is_finite_report(report: InequalityReport) -> bool:
    return math.isfinite(report.lhs) and math.isfinite(report.rhs)
