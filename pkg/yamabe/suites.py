"""Seeded verification suites run by ``yamabe verify``.

Each suite draws ``n_cases`` random instances from ``np.random.default_rng([seed, case])``
and runs one family of inequality checkers on them. Every checker here must
hold on every instance; a failure is a defect signal. The assumption suite
additionally evaluates a negative-curvature fixture that is expected to fail.
"""

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from yamabe.discrete import DiscreteManifold
from yamabe.errors import DomainError
from yamabe.functional import (
    InequalityReport,
    check_assumption,
    check_curvature_split,
    check_iterated_holder,
    check_partial_gradient,
    check_young,
    check_young_chain,
    is_finite_report,
)
from yamabe.invariants import sphere_yamabe
from yamabe.minimize import gradient_check

GRADIENT_CHECK_TOL = 1e-5


@dataclass
class SuiteResult:
    suite: str
    cases: int = 0
    passed: int = 0
    failed: int = 0
    worst_slack: float = float('inf')
    fixtures: dict[str, bool] = field(default_factory=dict)
    expected: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.fixtures == self.expected

    def record(self, report: InequalityReport) -> None:
        self.cases += 1
        if report.holds and is_finite_report(report):
            self.passed += 1
        else:
            self.failed += 1
        self.worst_slack = min(self.worst_slack, report.slack)

    def describe_fixtures(self) -> str:
        parts = []
        for name, holds in self.fixtures.items():
            expected = self.expected[name]
            tag = f"EXPECTED-{str(expected).lower()}" if holds == expected else f"UNEXPECTED (expected {expected})"
            parts.append(f"{name}: holds={str(holds).lower()} {tag}")
        return '; '.join(parts)

    def as_dict(self) -> dict:
        return {
            'suite': self.suite,
            'cases': self.cases,
            'passed': self.passed,
            'failed': self.failed,
            'worst_slack': self.worst_slack if self.cases else None,
            'fixtures': self.describe_fixtures(),
            'ok': self.ok,
        }


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def random_manifold(rng: np.random.Generator, dim: int | None = None, curvature: str = 'nonnegative',
                    max_vertices: int = 8) -> DiscreteManifold:
    """Connected weighted graph: a path plus a few random chords.

    ``curvature`` is 'nonnegative' (uniform in [0, dim(dim-1)]), 'constant'
    (a round-sphere value dim(dim-1)/r^2) or 'flat'.
    """
    dim = int(rng.integers(3, 7)) if dim is None else dim
    n = int(rng.integers(2, max_vertices + 1))
    edges = [(i, i + 1) for i in range(n - 1)]
    for _ in range(int(rng.integers(0, n))):
        a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
        edges.append((a, b))
    if curvature == 'nonnegative':
        s = rng.uniform(0, dim * (dim - 1), n)
    elif curvature == 'constant':
        s = np.full(n, dim * (dim - 1) / rng.uniform(0.25, 4))
    else:
        s = np.zeros(n)
    return DiscreteManifold(
        dim=dim,
        masses=rng.uniform(0.1, 2.0, n),
        edges=edges,
        weights=rng.uniform(0.1, 2.0, len(edges)),
        scalar_curvature=s,
        label=f"random {dim} {n}",
    )


def negative_curvature_fixture() -> tuple[DiscreteManifold, DiscreteManifold]:
    """V with s = -12 at one vertex against a round W: (s_V + s_W)/a_6 = -1.2 < -0.75."""
    mv = DiscreteManifold(dim=3, masses=[1.0, 1.0], edges=[(0, 1)], weights=[1.0],
                          scalar_curvature=[-12.0, 6.0], label='negative-curvature')
    mw = DiscreteManifold(dim=3, masses=[1.0, 1.0], edges=[(0, 1)], weights=[1.0],
                          scalar_curvature=[6.0, 6.0], label='round')
    return mv, mw


def _random_pair(rng, curvature='nonnegative'):
    mv = random_manifold(rng, curvature=curvature)
    mw = random_manifold(rng, curvature=curvature)
    u = rng.uniform(0, 1, mv.n_vertices * mw.n_vertices)
    u[int(rng.integers(u.size))] = 1.0
    return mv, mw, u


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def run_holder(n_cases: int, seed: int) -> SuiteResult:
    result = SuiteResult('holder')
    for case in range(n_cases):
        mv, mw, u = _random_pair(np.random.default_rng([seed, case]))
        result.record(check_iterated_holder(mv, mw, u))
    return result


def run_gradient(n_cases: int, seed: int) -> SuiteResult:
    result = SuiteResult('gradient')
    for case in range(n_cases):
        mv, mw, u = _random_pair(np.random.default_rng([seed, case]))
        result.record(check_partial_gradient(mv, mw, u))
    return result


def run_young(n_cases: int, seed: int) -> SuiteResult:
    result = SuiteResult('young')
    for case in range(n_cases):
        rng = np.random.default_rng([seed, case])
        v, w = (int(x) for x in rng.integers(1, 11, size=2))
        c, d = rng.uniform(0, 10, size=2)
        result.record(check_young(float(c), float(d), v, w))
    return result


def run_assumption(n_cases: int, seed: int) -> SuiteResult:
    result = SuiteResult('assumption')
    for case in range(n_cases):
        rng = np.random.default_rng([seed, case])
        result.record(check_assumption(random_manifold(rng), random_manifold(rng)))
    result.fixtures['negative-curvature'] = check_assumption(*negative_curvature_fixture()).holds
    result.expected['negative-curvature'] = False
    return result


def run_chain(n_cases: int, seed: int) -> SuiteResult:
    result = SuiteResult('chain')
    for case in range(n_cases):
        rng = np.random.default_rng([seed, case])
        mv, mw, u = _random_pair(rng, curvature='constant')
        result.record(check_curvature_split(mv, mw, u))
        mu_v = sphere_yamabe(mv.dim) * float(rng.uniform(0, 1))
        mu_w = sphere_yamabe(mw.dim) * float(rng.uniform(0, 1))
        result.record(check_young_chain(mv, mw, u, mu_v, mu_w))
    return result


def run_gradcheck(n_cases: int, seed: int) -> SuiteResult:
    """gradient_check on random positive fields; slack is tolerance minus discrepancy."""
    result = SuiteResult('gradcheck')
    for case in range(n_cases):
        rng = np.random.default_rng([seed, case])
        manifold = random_manifold(rng)
        u = rng.uniform(0.5, 1.5, manifold.n_vertices)
        result.record(InequalityReport.compare(gradient_check(manifold, u), GRADIENT_CHECK_TOL))
    return result


SUITES: dict[str, Callable[[int, int], SuiteResult]] = {
    'holder': run_holder,
    'gradient': run_gradient,
    'young': run_young,
    'assumption': run_assumption,
    'chain': run_chain,
    'gradcheck': run_gradcheck,
}


def run_suites(suite: str, n_cases: int, seed: int) -> list[SuiteResult]:
    """Run one suite, or every suite in registry order for 'all'."""
    if n_cases < 1:
        raise DomainError(f"n_cases must be >= 1, got {n_cases}")
    if suite == 'all':
        return [runner(n_cases, seed) for runner in SUITES.values()]
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r} (expected one of {', '.join([*SUITES, 'all'])})")
    return [SUITES[suite](n_cases, seed)]
