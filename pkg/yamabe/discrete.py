"""Weighted discretizations of compact Riemannian manifolds.

A ``DiscreteManifold`` carries lumped vertex masses (the volume form), a
Dirichlet form stored as weighted edges (the gradient energy), pointwise scalar
curvature and the geometric dimension. Riemannian products are Kronecker sums
of the factor forms, so fields on V x W are addressed row-major: vertex (i, j)
of the product is ``i * |W| + j``.

Override the vertex budget with the YAMABE_VERTEX_BUDGET env var.
"""

import json
import math
import os
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np
from scipy import sparse

from yamabe.errors import BudgetExceeded, DomainError, ManifoldError, SpecError
from yamabe.invariants import sphere_volume

VERTEX_BUDGET = int(os.environ.get('YAMABE_VERTEX_BUDGET', 1_000_000))

SPEC_FIELDS = ('dim', 'label', 'masses', 'edges', 'scalar_curvature')


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DiscreteManifold:
    """Immutable weighted graph standing in for a compact Riemannian manifold."""

    dim: int
    masses: np.ndarray
    edges: np.ndarray
    weights: np.ndarray
    scalar_curvature: np.ndarray
    label: str = ''

    def __post_init__(self):
        masses = np.array(self.masses, dtype=np.float64).reshape(-1)
        edges = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        curvature = np.array(self.scalar_curvature, dtype=np.float64).reshape(-1)
        n = masses.size

        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise ManifoldError(f"dim must be an integer >= 1, got {self.dim!r}")
        if n == 0:
            raise ManifoldError("manifold needs at least one vertex")
        bad = np.flatnonzero(~(masses > 0) | ~np.isfinite(masses))
        if bad.size:
            raise ManifoldError(f"masses[{bad[0]}] must be positive and finite, got {masses[bad[0]]!r}")
        if curvature.size != n:
            raise ManifoldError(f"scalar_curvature has {curvature.size} entries for {n} vertices")
        bad = np.flatnonzero(~np.isfinite(curvature))
        if bad.size:
            raise ManifoldError(f"scalar_curvature[{bad[0]}] must be finite")
        if weights.size != edges.shape[0]:
            raise ManifoldError(f"{weights.size} weights for {edges.shape[0]} edges")
        bad = np.flatnonzero(~(weights > 0) | ~np.isfinite(weights))
        if bad.size:
            raise ManifoldError(f"edges[{bad[0]}] weight must be positive and finite, got {weights[bad[0]]!r}")
        bad = np.flatnonzero((edges < 0).any(axis=1) | (edges >= n).any(axis=1))
        if bad.size:
            raise ManifoldError(f"edges[{bad[0]}] endpoint out of range 0..{n - 1}")
        bad = np.flatnonzero(edges[:, 0] == edges[:, 1])
        if bad.size:
            raise ManifoldError(f"edges[{bad[0]}] endpoints must be distinct")

        object.__setattr__(self, 'dim', int(self.dim))
        object.__setattr__(self, 'masses', _frozen(masses))
        object.__setattr__(self, 'edges', _frozen(edges))
        object.__setattr__(self, 'weights', _frozen(weights))
        object.__setattr__(self, 'scalar_curvature', _frozen(curvature))

    @property
    def n_vertices(self) -> int:
        return self.masses.size

    @property
    def volume(self) -> float:
        return float(self.masses.sum())

    @cached_property
    def laplacian(self) -> sparse.csr_matrix:
        """Symmetric PSD matrix L with u^T L u = sum of weight * (u_a - u_b)^2."""
        a, b = self.edges[:, 0], self.edges[:, 1]
        n = self.n_vertices
        rows = np.concatenate([a, b, a, b])
        cols = np.concatenate([a, b, b, a])
        vals = np.concatenate([self.weights, self.weights, -self.weights, -self.weights])
        return sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()

    def dirichlet(self, u: np.ndarray) -> float:
        """Discrete gradient energy, summed edge by edge."""
        u = np.asarray(u, dtype=np.float64).reshape(-1)
        diff = u[self.edges[:, 0]] - u[self.edges[:, 1]]
        return float(np.dot(self.weights, diff * diff))

    def total_scalar_curvature(self) -> float:
        return float(np.dot(self.scalar_curvature, self.masses))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _check_budget(n: int, budget: int | None) -> None:
    budget = VERTEX_BUDGET if budget is None else budget
    if n > budget:
        raise BudgetExceeded(f"{n} vertices exceeds the vertex budget of {budget}")


def product(mv: DiscreteManifold, mw: DiscreteManifold, budget: int | None = None) -> DiscreteManifold:
    """Riemannian product V x W as a Kronecker sum of the factor Dirichlet forms.

    mass(i,j) = m_V(i) m_W(j), s(i,j) = s_V(i) + s_W(j); a V-edge (a,b,wt)
    becomes ((a,j),(b,j), wt * m_W(j)) for every j and symmetrically for W-edges.
    """
    nv, nw = mv.n_vertices, mw.n_vertices
    _check_budget(nv * nw, budget)

    masses = np.outer(mv.masses, mw.masses).ravel()
    curvature = np.add.outer(mv.scalar_curvature, mw.scalar_curvature).ravel()

    cols = np.arange(nw)
    v_edges = np.stack([
        (mv.edges[:, 0:1] * nw + cols).ravel(),
        (mv.edges[:, 1:2] * nw + cols).ravel(),
    ], axis=1)
    v_weights = np.outer(mv.weights, mw.masses).ravel()

    rows = np.arange(nv)[:, None] * nw
    w_edges = np.stack([
        (rows + mw.edges[:, 0]).ravel(),
        (rows + mw.edges[:, 1]).ravel(),
    ], axis=1)
    w_weights = np.outer(mv.masses, mw.weights).ravel()

    return DiscreteManifold(
        dim=mv.dim + mw.dim,
        masses=masses,
        edges=np.concatenate([v_edges, w_edges]).reshape(-1, 2),
        weights=np.concatenate([v_weights, w_weights]),
        scalar_curvature=curvature,
        label=f"({mv.label}) x ({mw.label})",
    )


def sphere_latitude(m: int, n_cells: int, scale: float = 1.0) -> DiscreteManifold:
    """Latitude-symmetric chain discretizing (S^m, scale * rho^m).

    Cell i sits at theta_i = (i + 1/2) pi / n_cells; masses use the midpoint rule
    and edge weights the face-centred sin^(m-1) factor. Pole cells are ordinary
    cells.
    """
    if isinstance(m, bool) or int(m) != m or m < 2:
        raise DomainError(f"sphere_latitude needs integer m >= 2, got {m!r}")
    if isinstance(n_cells, bool) or int(n_cells) != n_cells or n_cells < 8:
        raise DomainError(f"sphere_latitude needs n_cells >= 8, got {n_cells!r}")
    scale = float(scale)
    if not scale > 0 or not math.isfinite(scale):
        raise DomainError(f"scale must be > 0, got {scale!r}")
    m, n = int(m), int(n_cells)
    _check_budget(n, None)

    dtheta = math.pi / n
    theta = (np.arange(n) + 0.5) * dtheta
    faces = np.arange(1, n) * dtheta
    omega = sphere_volume(m - 1)

    masses = omega * np.sin(theta) ** (m - 1) * dtheta * scale ** (m / 2)
    weights = omega * np.sin(faces) ** (m - 1) * scale ** (m / 2 - 1) / dtheta
    edges = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)

    return DiscreteManifold(
        dim=m,
        masses=masses,
        edges=edges,
        weights=weights,
        scalar_curvature=np.full(n, m * (m - 1) / scale),
        label=f"sphere {m} {n} {scale!r}",
    )


def flat_torus(m: int, n_per_axis: int, budget: int | None = None) -> DiscreteManifold:
    """Periodic grid on the unit-volume flat torus, zero scalar curvature.

    Each vertex has one forward edge per axis with weight h^m / h^2 (h = 1/n),
    so the form discretizes the integral of |du|^2.
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise DomainError(f"flat_torus needs integer m >= 1, got {m!r}")
    if isinstance(n_per_axis, bool) or int(n_per_axis) != n_per_axis or n_per_axis < 2:
        raise DomainError(f"flat_torus needs n_per_axis >= 2, got {n_per_axis!r}")
    m, n = int(m), int(n_per_axis)
    total = n ** m
    _check_budget(total, budget)

    shape = (n,) * m
    index = np.arange(total).reshape(shape)
    edges = np.concatenate([
        np.stack([index.ravel(), np.roll(index, -1, axis=axis).ravel()], axis=1)
        for axis in range(m)
    ])
    return DiscreteManifold(
        dim=m,
        masses=np.full(total, 1.0 / total),
        edges=edges,
        weights=np.full(edges.shape[0], float(n) ** (2 - m)),
        scalar_curvature=np.zeros(total),
        label=f"torus {m} {n}",
    )


def scale_metric(manifold: DiscreteManifold, lam: float) -> DiscreteManifold:
    """Replace the metric G by lam * G.

    masses scale by lam^(m/2), edge weights by lam^(m/2 - 1), curvature by 1/lam.
    """
    lam = float(lam)
    if not lam > 0 or not math.isfinite(lam):
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    m = manifold.dim
    return DiscreteManifold(
        dim=m,
        masses=manifold.masses * lam ** (m / 2),
        edges=manifold.edges,
        weights=manifold.weights * lam ** (m / 2 - 1),
        scalar_curvature=manifold.scalar_curvature / lam,
        label=manifold.label if lam == 1 else f"{manifold.label} * {lam!r}",
    )


# ---------------------------------------------------------------------------
# ManifoldSpec documents
# ---------------------------------------------------------------------------

def _spec_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _spec_index(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise SpecError(f"{path}: expected an integer vertex index, got {value!r}")
    return int(value)


def _spec_list(document: Mapping, key: str) -> list:
    value = document[key]
    if not isinstance(value, list):
        raise SpecError(f"{key}: expected an array, got {type(value).__name__}")
    return value


def load_spec(document: Mapping[str, Any]) -> DiscreteManifold:
    """Build a DiscreteManifold from a ManifoldSpec document.

    Errors name the offending field path, e.g. ``masses[3]`` or ``edges[0][2]``.
    """
    if not isinstance(document, Mapping):
        raise SpecError(f"document: expected an object, got {type(document).__name__}")
    missing = [key for key in SPEC_FIELDS if key not in document]
    if missing:
        raise SpecError(f"missing field(s): {', '.join(missing)}")

    dim = document['dim']
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SpecError(f"dim: expected an integer >= 1, got {dim!r}")
    label = document['label']
    if not isinstance(label, str):
        raise SpecError(f"label: expected a string, got {label!r}")

    masses = [_spec_number(x, f"masses[{i}]") for i, x in enumerate(_spec_list(document, 'masses'))]
    for i, x in enumerate(masses):
        if not x > 0:
            raise SpecError(f"masses[{i}]: mass must be positive, got {x!r}")
    curvature = [_spec_number(x, f"scalar_curvature[{i}]")
                 for i, x in enumerate(_spec_list(document, 'scalar_curvature'))]
    if len(curvature) != len(masses):
        raise SpecError(f"scalar_curvature: {len(curvature)} entries for {len(masses)} masses")

    edges, weights = [], []
    for e, entry in enumerate(_spec_list(document, 'edges')):
        if not isinstance(entry, list) or len(entry) != 3:
            raise SpecError(f"edges[{e}]: expected [a, b, weight]")
        a = _spec_index(entry[0], f"edges[{e}][0]")
        b = _spec_index(entry[1], f"edges[{e}][1]")
        weight = _spec_number(entry[2], f"edges[{e}][2]")
        if not 0 <= a < len(masses) or not 0 <= b < len(masses):
            raise SpecError(f"edges[{e}]: endpoint out of range 0..{len(masses) - 1}")
        if a == b:
            raise SpecError(f"edges[{e}]: endpoints must be distinct")
        if not weight > 0:
            raise SpecError(f"edges[{e}][2]: weight must be positive, got {weight!r}")
        edges.append((a, b))
        weights.append(weight)

    try:
        return DiscreteManifold(dim=dim, masses=masses, edges=edges, weights=weights,
                                scalar_curvature=curvature, label=label)
    except ManifoldError as e:
        raise SpecError(str(e)) from e


def save_spec(manifold: DiscreteManifold) -> dict[str, Any]:
    """ManifoldSpec document for a manifold; floats keep their round-trip repr."""
    return {
        'dim': manifold.dim,
        'label': manifold.label,
        'masses': [float(x) for x in manifold.masses],
        'edges': [[int(a), int(b), float(w)] for (a, b), w in zip(manifold.edges, manifold.weights, strict=True)],
        'scalar_curvature': [float(x) for x in manifold.scalar_curvature],
    }


def loads_spec(text: str) -> DiscreteManifold:
    """Parse ManifoldSpec JSON text; JSON syntax errors report line and column."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    return load_spec(document)


def dumps_spec(manifold: DiscreteManifold) -> str:
    return json.dumps(save_spec(manifold))


def read_spec(path: str) -> DiscreteManifold:
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e}") from e
    return loads_spec(text)
