"""Health check for yamabe prerequisites.

Layered checks (short-circuits on first failure):
  1. numpy, scipy, mpmath, pandas importable
  2. Closed-form oracles reproduce printed constants
  3. Discrete layer sanity (constant field on a flat torus has quotient 0)
"""

import importlib

from yamabe import PREFIX

REQUIRED_MODULES = [
    "numpy",
    "scipy.sparse",
    "scipy.special",
    "mpmath",
    "pandas",
]

# (description, callable name, args, expected, absolute tolerance)
ORACLES = [
    ("epsilon_{3,3}", "epsilon_defect", (3, 3), 0.625, 1e-12),
    ("Lambda_6", "lambda_min", (6,), 54.779, 1e-3),
]


def check_health() -> tuple[bool, str | None]:
    """Run layered prerequisite checks.

    Returns:
        (True, None) if all checks pass.
        (False, "user-facing message") on first failure.
    """

    # Layer 1: numerical stack
    for name in REQUIRED_MODULES:
        try:
            importlib.import_module(name)
        except ImportError:
            package = name.split('.')[0]
            return False, f"{PREFIX} {package} not installed. Run: pip install {package}"

    # Layer 2: closed-form oracles
    try:
        from yamabe import invariants
        for description, func, args, expected, tol in ORACLES:
            value = getattr(invariants, func)(*args)
            if not abs(value - expected) <= tol:
                return False, (
                    f"{PREFIX} Oracle mismatch: {description} = {value!r}, expected {expected} +/- {tol}. "
                    f"Check the installed scipy/mpmath versions."
                )
    except Exception as e:
        return False, f"{PREFIX} Oracle evaluation failed: {e}"

    # Layer 3: discrete sanity
    try:
        value = _torus_constant_quotient()
        if abs(value) > 1e-12:
            return False, f"{PREFIX} Discrete layer broken: constant field on a flat torus has quotient {value!r}"
    except Exception as e:
        return False, f"{PREFIX} Discrete sanity check failed: {e}"

    return True, None


def _torus_constant_quotient() -> float:
    """Yamabe quotient of the constant field on a small flat 3-torus."""
    from yamabe.discrete import flat_torus
    from yamabe.functional import yamabe_quotient

    torus = flat_torus(3, 4)
    return yamabe_quotient(torus, [1.0] * torus.n_vertices)
