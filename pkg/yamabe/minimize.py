"""Discrete estimates of the conformal Yamabe constant and bound sandwiches.

``estimate_mu`` minimizes the Yamabe quotient over nonnegative fields by
projected gradient descent with Armijo backtracking. Every accepted step is
followed by u <- |u| / ||u||_{p_m}, which never increases the quotient, so the
value history is non-increasing by construction.

Restarts and sweep points run on a thread pool capped by the YAMABE_THREADS
env var; results are merged in a fixed order so output never depends on
scheduling.
"""

import math
import os
import sys
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from yamabe import PREFIX
from yamabe.discrete import DiscreteManifold, product, scale_metric
from yamabe.errors import AssumptionViolated, DimensionError, DomainError, ManifoldError
from yamabe.functional import as_field, check_assumption, quotient_terms
from yamabe.invariants import (
    conformal_exponent,
    critical_exponent,
    naive_infimum,
    product_lower_bound,
    sphere_yamabe,
)

THREADS = max(1, int(os.environ.get('YAMABE_THREADS', 1)))

# Armijo backtracking
BACKTRACK_FACTOR = 0.5
SUFFICIENT_DECREASE = 1e-4
MIN_STEP = 1e-16
STEP_GROWTH = 2.0
MAX_STEP = 1e8

# Relative gradient size below which a field counts as stationary
STATIONARY_TOL = 1e-10

# Sandwich verdict slacks
LOWER_SLACK = 0.02
UPPER_SLACK = 0.01
NAIVE_SLACK = 0.02


@dataclass(frozen=True)
class MinimizeConfig:
    max_iters: int = 5000
    rel_tol: float = 1e-8
    initial_step: float = 1e-2
    restarts: int = 4
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.initial_step > 0:
            raise DomainError(f"initial_step must be > 0, got {self.initial_step}")
        if self.restarts < 1:
            raise DomainError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True)
class MinimizeResult:
    minimizer: np.ndarray
    value: float
    iterations: int
    converged: bool
    history: tuple[float, ...]
    start: int = 0
    start_values: tuple[float, ...] = field(default=())


@dataclass(frozen=True)
class BoundSandwich:
    lower: float
    estimate: float
    upper_sphere: float
    upper_reference: float | None
    verdict_lower: bool
    verdict_upper: bool
    lam: float = 1.0
    result: MinimizeResult | None = field(default=None, repr=False, compare=False)

    @property
    def ordered(self) -> bool:
        return self.verdict_lower and self.verdict_upper


@dataclass(frozen=True)
class SweepResult:
    points: tuple[tuple[float, BoundSandwich], ...]
    min_estimate: float
    argmin_lambda: float
    naive_infimum: float
    naive_within_slack: bool
    verdict_lower: bool

    @property
    def lower(self) -> float:
        return self.points[0][1].lower


# ---------------------------------------------------------------------------
# Gradient
# ---------------------------------------------------------------------------

def yamabe_gradient(manifold: DiscreteManifold, u: np.ndarray) -> tuple[float, np.ndarray]:
    """(F(u), dF/du) for a flat field u that does not vanish identically.

    dF = (2/D) (a_m L u + s rho u - F ||u||_p^(2-p) |u|^(p-1) sign(u) rho), D = ||u||_p^2.
    """
    a = conformal_exponent(manifold.dim)
    p = critical_exponent(manifold.dim)
    rho = manifold.masses
    numerator, power_sum = quotient_terms(manifold, u)
    denominator = power_sum ** (2 / p)
    value = numerator / denominator
    gradient = (2 / denominator) * (
        a * (manifold.laplacian @ u)
        + manifold.scalar_curvature * rho * u
        - value * power_sum ** (2 / p - 1) * np.abs(u) ** (p - 1) * np.sign(u) * rho
    )
    return value, gradient


def _quotient(manifold: DiscreteManifold, u: np.ndarray) -> float:
    numerator, power_sum = quotient_terms(manifold, u)
    return numerator / power_sum ** (2 / critical_exponent(manifold.dim))


def _normalize(manifold: DiscreteManifold, u: np.ndarray) -> np.ndarray:
    u = np.abs(u)
    p = critical_exponent(manifold.dim)
    return u / float(np.dot(manifold.masses, u ** p)) ** (1 / p)


def gradient_check(manifold: DiscreteManifold, u) -> float:
    """Largest discrepancy between the analytic gradient and central differences.

    Discrepancies are relative to max(||grad||_inf, |F| max(rho) / (||u||_inf vol)),
    the natural size of a gradient entry, so a vanishing gradient is still
    measured against a meaningful scale. Step h = 1e-6 ||u||_inf.
    """
    values = as_field(manifold, u)
    peak = float(np.max(np.abs(values)))
    if peak == 0 or np.any(np.abs(values) < 1e-6 * peak):
        raise DomainError("field too close to zero at some vertex for a finite-difference check")
    if manifold.dim < 3:
        raise DimensionError(f"dimension-too-small: dim {manifold.dim}")

    value, gradient = yamabe_gradient(manifold, values)
    h = 1e-6 * peak
    finite = np.empty_like(values)
    shifted = values.copy()
    for i in range(values.size):
        shifted[i] = values[i] + h
        up = _quotient(manifold, shifted)
        shifted[i] = values[i] - h
        down = _quotient(manifold, shifted)
        shifted[i] = values[i]
        finite[i] = (up - down) / (2 * h)

    scale = max(float(np.max(np.abs(gradient))),
                abs(value) * float(np.max(manifold.masses)) / (peak * manifold.volume),
                1e-300)
    return float(np.max(np.abs(gradient - finite))) / scale


# ---------------------------------------------------------------------------
# Minimization
# ---------------------------------------------------------------------------

def _descend(manifold: DiscreteManifold, start: np.ndarray, cfg: MinimizeConfig) -> MinimizeResult:
    rho = manifold.masses
    # vol^(2/m) / rho makes the direction scale like u under G -> lam G
    metric = manifold.volume ** (2 / manifold.dim) / rho
    u = _normalize(manifold, start)
    value, gradient = yamabe_gradient(manifold, u)
    history = [value]
    step = cfg.initial_step
    converged = False
    iterations = 0

    while iterations < cfg.max_iters:
        direction = -metric * gradient
        slope = float(np.dot(gradient, direction))
        size = math.sqrt(float(np.dot(rho, direction ** 2)) / float(np.dot(rho, u ** 2)))
        if size <= STATIONARY_TOL * max(1.0, abs(value)):
            converged = True
            break

        trial_value = math.inf
        while step >= MIN_STEP:
            trial = u + step * direction
            if np.any(trial):
                trial_value = _quotient(manifold, trial)
                if trial_value <= value + SUFFICIENT_DECREASE * step * slope:
                    break
            step *= BACKTRACK_FACTOR
        if step < MIN_STEP:
            # No admissible step: numerically stationary
            converged = True
            break

        candidate = _normalize(manifold, trial)
        candidate_value, candidate_gradient = yamabe_gradient(manifold, candidate)
        if not candidate_value <= value:
            converged = True
            break
        previous = value
        u, value, gradient = candidate, candidate_value, candidate_gradient
        history.append(value)
        iterations += 1
        step = min(step * STEP_GROWTH, MAX_STEP)
        if abs(value - previous) <= cfg.rel_tol * abs(value):
            converged = True
            break

    return MinimizeResult(
        minimizer=u,
        value=value,
        iterations=iterations,
        converged=converged,
        history=tuple(history),
    )


def starting_fields(manifold: DiscreteManifold, cfg: MinimizeConfig) -> list[np.ndarray]:
    """The constant field plus restarts - 1 seeded random positive fields."""
    n = manifold.n_vertices
    starts = [np.ones(n)]
    for r in range(1, cfg.restarts):
        rng = np.random.default_rng([cfg.rng_seed, r])
        starts.append(rng.uniform(0.05, 1.0, n))
    return starts


def _map(func, items: Sequence, threads: int | None = None) -> list:
    threads = THREADS if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))


def estimate_mu(manifold: DiscreteManifold, cfg: MinimizeConfig | None = None) -> MinimizeResult:
    """Upper estimate of the discrete infimum of the Yamabe quotient.

    The result is the best run over all starting fields, ties broken by start index.
    """
    cfg = cfg or MinimizeConfig()
    if manifold.dim < 3:
        raise DimensionError(f"dimension-too-small: dim {manifold.dim}")
    if manifold.n_vertices < 2:
        raise ManifoldError("estimate_mu needs at least two vertices")

    runs = _map(lambda start: _descend(manifold, start, cfg), starting_fields(manifold, cfg))
    best = min(range(len(runs)), key=lambda r: (runs[r].value, r))
    winner = runs[best]
    return MinimizeResult(
        minimizer=winner.minimizer,
        value=winner.value,
        iterations=winner.iterations,
        converged=winner.converged,
        history=winner.history,
        start=best,
        start_values=tuple(run.history[0] for run in runs),
    )


# ---------------------------------------------------------------------------
# Sandwiches
# ---------------------------------------------------------------------------

def sandwich(mv: DiscreteManifold, mw: DiscreteManifold, mu_v_ref: float, mu_w_ref: float,
             cfg: MinimizeConfig | None = None, upper_reference: float | None = None,
             lam: float = 1.0) -> BoundSandwich:
    """Bracket the estimate for V x W between the product lower bound and mu(S^m).

    ``lam`` is recorded only; callers pass an already scaled ``mw``.
    """
    cfg = cfg or MinimizeConfig()
    if mv.dim < 3 or mw.dim < 3:
        raise DimensionError(f"dimension-too-small: factor dims {mv.dim}, {mw.dim} (need >= 3)")
    report = check_assumption(mv, mw)
    if not report.holds:
        raise AssumptionViolated(
            f"curvature assumption fails: (s_V+s_W)/a_m = {report.lhs!r} < s_V/a_v + s_W/a_w = {report.rhs!r}"
        )

    lower = product_lower_bound(mu_v_ref, mu_w_ref, mv.dim, mw.dim)
    result = estimate_mu(product(mv, mw), cfg)
    estimate = result.value
    upper = sphere_yamabe(mv.dim + mw.dim)

    verdict_lower = estimate >= lower * (1 - LOWER_SLACK)
    if verdict_lower and estimate < lower:
        print(f"{PREFIX} estimate {estimate:.6g} is below the lower bound {lower:.6g} "
              f"within the {LOWER_SLACK:.0%} discretization slack", file=sys.stderr)
    verdict_upper = estimate <= upper * (1 + UPPER_SLACK)

    return BoundSandwich(
        lower=lower,
        estimate=estimate,
        upper_sphere=upper,
        upper_reference=upper_reference,
        verdict_lower=bool(verdict_lower),
        verdict_upper=bool(verdict_upper),
        lam=float(lam),
        result=result,
    )


def lambda_sweep(mv: DiscreteManifold, mw: DiscreteManifold, mu_v_ref: float, mu_w_ref: float,
                 lambda_grid: Sequence[float], cfg: MinimizeConfig | None = None,
                 reference=None) -> SweepResult:
    """One sandwich per lam for V x (W, lam h).

    ``reference(lam)`` optionally supplies the closed-form upper reference at
    each lam. ``verdict_lower`` holds when the minimum estimate clears the
    lambda-independent lower bound up to the sandwich slack. The comparison
    with the naive infimum is reported, not asserted.
    """
    grid = [float(lam) for lam in lambda_grid]
    if not grid:
        raise DomainError("lambda grid must not be empty")
    for lam in grid:
        if not lam > 0:
            raise DomainError(f"lambda must be > 0, got {lam!r}")

    def point(lam: float) -> BoundSandwich:
        ref = reference(lam) if reference is not None else None
        return sandwich(mv, scale_metric(mw, lam), mu_v_ref, mu_w_ref, cfg, upper_reference=ref, lam=lam)

    sandwiches = _map(point, grid)
    best = min(range(len(grid)), key=lambda i: (sandwiches[i].estimate, i))
    naive = naive_infimum(mu_v_ref, mu_w_ref, mv.dim, mw.dim)
    min_estimate = sandwiches[best].estimate
    return SweepResult(
        points=tuple(zip(grid, sandwiches, strict=True)),
        min_estimate=min_estimate,
        argmin_lambda=grid[best],
        naive_infimum=naive,
        naive_within_slack=bool(min_estimate <= naive * (1 + NAIVE_SLACK)),
        verdict_lower=bool(min_estimate >= sandwiches[best].lower * (1 - LOWER_SLACK)),
    )
