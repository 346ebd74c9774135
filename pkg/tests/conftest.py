"""Shared fixtures for yamabe unit tests.

Fixture layering:
    sphere3 / sphere4 (coarse latitude chains)  ->  sphere_product
    torus3 (small flat torus)
    rng (seeded generator)
    run_cli (entry point runner)
"""

import json
import os
import sys
from io import StringIO
from unittest.mock import patch

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from yamabe.discrete import DiscreteManifold, flat_torus, product, sphere_latitude  # noqa: E402
from yamabe.minimize import MinimizeConfig  # noqa: E402

# ---------------------------------------------------------------------------
# Geometries
# ---------------------------------------------------------------------------


@pytest.fixture
def sphere3():
    """Unit S^3 on 64 latitude cells."""
    return sphere_latitude(3, 64)


@pytest.fixture
def sphere4():
    """Unit S^4 on 64 latitude cells."""
    return sphere_latitude(4, 64)


@pytest.fixture
def sphere_product(sphere3):
    """S^3 x S^3 on a 64 x 64 grid."""
    return product(sphere3, sphere3)


@pytest.fixture
def torus3():
    """Unit-volume flat 3-torus, 4 points per axis."""
    return flat_torus(3, 4)


@pytest.fixture
def path_manifold():
    """Three-vertex path with uneven masses and curvature, dim 3."""
    return DiscreteManifold(
        dim=3,
        masses=[0.5, 1.0, 1.5],
        edges=[(0, 1), (1, 2)],
        weights=[2.0, 0.5],
        scalar_curvature=[1.0, 2.0, 3.0],
        label='path',
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def quick_config():
    """Single constant start, enough iterations for the small fixtures."""
    return MinimizeConfig(restarts=1, max_iters=2000)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

class CliRun:
    def __init__(self, code, stdout, stderr):
        self.code = code
        self.stdout = stdout
        self.stderr = stderr

    def json(self):
        return json.loads(self.stdout)

    def csv_lines(self):
        return [line for line in self.stdout.splitlines() if not line.startswith('#')]


@pytest.fixture
def run_cli():
    """Run yamabe.cli.main(argv) and capture exit code, stdout and stderr."""
    from yamabe.cli import main

    def run(*argv, stdin=''):
        with patch('sys.stdin', StringIO(stdin)), \
             patch('sys.stdout', new_callable=StringIO) as out, \
             patch('sys.stderr', new_callable=StringIO) as err:
            with pytest.raises(SystemExit) as exc_info:
                main(list(argv))
        return CliRun(exc_info.value.code, out.getvalue(), err.getvalue())

    return run
