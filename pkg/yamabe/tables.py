"""Table builders behind the CLI's tabulating commands.

Each builder validates its arguments, then returns a pandas DataFrame with
one row per entry. Values that overflow a double are NaN in linear columns;
the log column always carries them.
"""

import math
from collections.abc import Iterable

import numpy as np
import pandas as pd

from yamabe.errors import DimensionError
from yamabe.invariants import (
    conformal_exponent,
    critical_exponent,
    epsilon_defect,
    lambda_argmin,
    lambda_min,
    lambda_surgery_table,
    sigma_sphere,
    sigma_sphere_asymptote,
    sphere_volume,
    sphere_yamabe,
    stable_ratio_limit,
)

CONSTANT_COLUMNS = ['m', 'a_m', 'p_m', 'omega_m', 'mu_sphere', 'log_Sigma_sphere', 'Sigma_sphere']
EPSILON_COLUMNS = ['v', 'w', 'epsilon_4dp', 'epsilon']
STABLE_COLUMNS = ['i', 'dimension', 'log_ratio', 'ratio', 'log_target', 'target', 'rel_error',
                  'Sigma_over_asymptote']


def _positive_ints(values: Iterable[int], minimum: int, what: str) -> list[int]:
    out = []
    for value in values:
        if isinstance(value, bool) or int(value) != value or value < minimum:
            raise DimensionError(f"dimension-too-small: {what} must be an integer >= {minimum}, got {value!r}")
        out.append(int(value))
    return out


def constants_table(m_list: Iterable[int]) -> pd.DataFrame:
    rows = []
    for m in _positive_ints(m_list, 3, 'm'):
        sigma = sigma_sphere(m)
        rows.append({
            'm': m,
            'a_m': conformal_exponent(m),
            'p_m': critical_exponent(m),
            'omega_m': sphere_volume(m),
            'mu_sphere': sphere_yamabe(m),
            'log_Sigma_sphere': sigma.log_magnitude,
            'Sigma_sphere': sigma.to_linear_or_nan(),
        })
    return pd.DataFrame(rows, columns=CONSTANT_COLUMNS)


def epsilon_table(v_max: int, w_max: int) -> pd.DataFrame:
    """epsilon_{v,w} for 3 <= v <= v_max, 3 <= w <= w_max, rounded and full precision."""
    v_max, w_max = _positive_ints([v_max, w_max], 3, 'bound')
    rows = []
    for v in range(3, v_max + 1):
        for w in range(3, w_max + 1):
            eps = epsilon_defect(v, w)
            rows.append({'v': v, 'w': w, 'epsilon_4dp': round(eps, 4), 'epsilon': eps})
    return pd.DataFrame(rows, columns=EPSILON_COLUMNS)


def lambda_table(m_list: Iterable[int]) -> pd.DataFrame:
    """Lambda_m, its minimizing k, and one Lambda_{m,k} column per admissible k."""
    ms = _positive_ints(m_list, 6, 'm')
    k_max = max((m - 4 for m in ms), default=2)
    columns = ['m', 'argmin_k', 'Lambda_m'] + [f"Lambda_m_k{k}" for k in range(2, k_max + 1)]
    rows = []
    for m in ms:
        row = {'m': m, 'argmin_k': lambda_argmin(m), 'Lambda_m': lambda_min(m)}
        for k, value in lambda_surgery_table(m).items():
            row[f"Lambda_m_k{k}"] = value
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)


def stable_limit_table(v: int, b: int, i_max: int) -> pd.DataFrame:
    """Convergence of Sigma(S^(v+bi)) / Sigma(S^(bi)) to (pi e/2)^v.

    Rows start at the first i with b*i >= 3. The ratio and its target are
    compared in log space, so ``rel_error`` is finite for every v.
    ``Sigma_over_asymptote`` tracks Sigma(S^(v+bi)) against its Stirling
    asymptote.
    """
    v, b, i_max = _positive_ints([v, b, i_max], 1, 'v, b and i_max')
    target = stable_ratio_limit(v)
    rows = []
    for i in range(1, i_max + 1):
        if b * i < 3:
            continue
        top = sigma_sphere(v + b * i)
        ratio = top / sigma_sphere(b * i)
        rows.append({
            'i': i,
            'dimension': v + b * i,
            'log_ratio': ratio.log_magnitude,
            'ratio': ratio.to_linear_or_nan(),
            'log_target': target.log_magnitude,
            'target': target.to_linear_or_nan(),
            'rel_error': abs(math.expm1(ratio.log_magnitude - target.log_magnitude)),
            'Sigma_over_asymptote': (top / sigma_sphere_asymptote(v + b * i)).to_linear(),
        })
    return pd.DataFrame(rows, columns=STABLE_COLUMNS)


def records(frame: pd.DataFrame) -> list[dict]:
    """Rows as plain dicts with NaN mapped to None, ready for JSON."""
    cleaned = frame.astype(object).where(pd.notna(frame), None)
    return [
        {key: (value.item() if isinstance(value, np.generic) else value) for key, value in row.items()}
        for row in cleaned.to_dict(orient='records')
    ]
