"""Closed-form constants for conformal Yamabe constants of products.

Everything here is a pure function of its arguments. Dimensional constants are
formed with exact rational arithmetic, sphere volumes use exact Gamma values
at integers and half-integers (assembled in extended precision with mpmath),
and every quantity that grows like (pi*e/2)^v is carried as a ``LogValue``.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath
from scipy.special import gammaln

from yamabe.errors import DimensionError, DomainError

# Decimal digits used for closed forms assembled with mpmath
EXTENDED_DPS = 40

# Largest Gamma argument evaluated exactly (factorials / rational * sqrt(pi))
EXACT_GAMMA_MAX = 50

# pi*e/2, the per-dimension growth rate of Sigma(S^v)
STABLE_BASE = math.pi * math.e / 2
LOG_STABLE_BASE = math.log(STABLE_BASE)

# exp() overflows double precision above this
_MAX_LOG_FLOAT = math.log(1.7976931348623157e308)


# ---------------------------------------------------------------------------
# Argument validation
# ---------------------------------------------------------------------------

def _require_dimension(m, minimum: int = 3, name: str = 'm') -> int:
    if isinstance(m, bool) or int(m) != m:
        raise DimensionError(f"{name} must be an integer, got {m!r}")
    m = int(m)
    if m < minimum:
        raise DimensionError(f"dimension-too-small: {name}={m} (need {name} >= {minimum})")
    return m


def _require_nonnegative(x: float, name: str) -> float:
    x = float(x)
    if math.isnan(x) or x < 0:
        raise DomainError(f"{name} must be >= 0, got {x!r}")
    return x


def _require_positive(x: float, name: str) -> float:
    x = float(x)
    if math.isnan(x) or x <= 0:
        raise DomainError(f"{name} must be > 0, got {x!r}")
    return x


# ---------------------------------------------------------------------------
# Log-space values
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class LogValue:
    """A nonnegative real stored as its natural logarithm; zero is -inf."""

    log_magnitude: float

    @classmethod
    def from_linear(cls, x: float) -> 'LogValue':
        return cls(math.log(_require_positive(x, 'x')))

    @property
    def representable(self) -> bool:
        """True when the linear value fits in a double."""
        return self.log_magnitude < _MAX_LOG_FLOAT

    def to_linear(self) -> float:
        """Exponentiate back to linear scale. Raises OverflowError past double range."""
        if not self.representable:
            raise OverflowError(f"exp({self.log_magnitude}) overflows double precision")
        return math.exp(self.log_magnitude)

    def to_linear_or_nan(self) -> float:
        """Linear value, or NaN when it does not fit in a double."""
        return self.to_linear() if self.representable else math.nan

    def __mul__(self, other: 'LogValue') -> 'LogValue':
        return LogValue(self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: 'LogValue') -> 'LogValue':
        return LogValue(self.log_magnitude - other.log_magnitude)

    def __pow__(self, exponent: float) -> 'LogValue':
        return LogValue(self.log_magnitude * exponent)


# ---------------------------------------------------------------------------
# Dimensional constants
# ---------------------------------------------------------------------------

def conformal_exponent_exact(m: int) -> Fraction:
    """a_m = 4(m-1)/(m-2) as an exact rational."""
    m = _require_dimension(m)
    return Fraction(4 * (m - 1), m - 2)


def critical_exponent_exact(m: int) -> Fraction:
    """p_m = 2m/(m-2) as an exact rational."""
    m = _require_dimension(m)
    return Fraction(2 * m, m - 2)


def conformal_exponent(m: int) -> float:
    return float(conformal_exponent_exact(m))


def critical_exponent(m: int) -> float:
    return float(critical_exponent_exact(m))


# ---------------------------------------------------------------------------
# Gamma function and sphere volumes
# ---------------------------------------------------------------------------

def exact_gamma_half(twice_arg: int) -> tuple[Fraction, bool]:
    """Gamma(twice_arg/2) as (rational coefficient, carries sqrt(pi)).

    Gamma(n) = (n-1)! and Gamma(k + 1/2) = (2k)! / (4^k k!) * sqrt(pi).
    """
    if twice_arg < 1:
        raise DomainError(f"Gamma argument must be positive, got {twice_arg}/2")
    if twice_arg % 2 == 0:
        return Fraction(math.factorial(twice_arg // 2 - 1)), False
    k = (twice_arg - 1) // 2
    return Fraction(math.factorial(2 * k), 4 ** k * math.factorial(k)), True


def log_gamma_half(twice_arg: int) -> float:
    """log Gamma(twice_arg/2), exact up to argument 50 and scipy's gammaln beyond."""
    if twice_arg > 2 * EXACT_GAMMA_MAX:
        return float(gammaln(twice_arg / 2))
    coefficient, has_sqrt_pi = exact_gamma_half(twice_arg)
    with mpmath.workdps(EXTENDED_DPS):
        value = mpmath.log(mpmath.mpf(coefficient.numerator) / coefficient.denominator)
        if has_sqrt_pi:
            value += mpmath.log(mpmath.pi) / 2
        return float(value)


@lru_cache(maxsize=256)
def _sphere_volume_mp(m: int) -> mpmath.mpf:
    coefficient, has_sqrt_pi = exact_gamma_half(m + 1)
    with mpmath.workdps(EXTENDED_DPS):
        gamma = mpmath.mpf(coefficient.numerator) / coefficient.denominator
        if has_sqrt_pi:
            gamma *= mpmath.sqrt(mpmath.pi)
        return 2 * mpmath.pi ** (mpmath.mpf(m + 1) / 2) / gamma


def log_sphere_volume(m: int) -> float:
    """log of omega_m, the volume of the unit round sphere S^m."""
    m = _require_dimension(m, minimum=1)
    return math.log(2) + (m + 1) / 2 * math.log(math.pi) - log_gamma_half(m + 1)


def sphere_volume(m: int) -> float:
    """omega_m = 2 pi^((m+1)/2) / Gamma((m+1)/2)."""
    m = _require_dimension(m, minimum=1)
    if m + 1 <= 2 * EXACT_GAMMA_MAX:
        return float(_sphere_volume_mp(m))
    return math.exp(log_sphere_volume(m))


def sphere_yamabe(m: int) -> float:
    """mu(S^m) = m(m-1) omega_m^(2/m)."""
    m = _require_dimension(m)
    if m + 1 <= 2 * EXACT_GAMMA_MAX:
        with mpmath.workdps(EXTENDED_DPS):
            return float(m * (m - 1) * _sphere_volume_mp(m) ** (mpmath.mpf(2) / m))
    return m * (m - 1) * math.exp(2 * log_sphere_volume(m) / m)


# ---------------------------------------------------------------------------
# Product formulas
# ---------------------------------------------------------------------------

def nu_invariant(mu: float, m: int) -> float:
    """nu = (mu / (m a_m))^m, defined for mu >= 0."""
    mu = _require_nonnegative(mu, 'mu')
    m = _require_dimension(m)
    return (mu / (m * conformal_exponent(m))) ** m


def epsilon_defect(v: int, w: int) -> float:
    """eps_{v,w} = a_{v+w} / (a_v^(v/m) a_w^(w/m)), the defect of the naive product formula."""
    v = _require_dimension(v, name='v')
    w = _require_dimension(w, name='w')
    m = v + w
    return conformal_exponent(m) / (conformal_exponent(v) ** (v / m) * conformal_exponent(w) ** (w / m))


def naive_product(mu_v: float, vol_v: float, mu_w: float, vol_w: float, v: int, w: int) -> float:
    """The product formula that would hold if g + lambda*h were a Yamabe metric.

    ``vol_w`` is the volume of W in the already scaled metric lambda*h.
    """
    vol_v = _require_positive(vol_v, 'vol_v')
    vol_w = _require_positive(vol_w, 'vol_w')
    v = _require_dimension(v, name='v')
    w = _require_dimension(w, name='w')
    m = v + w
    return (mu_v / vol_v ** (2 / v) + mu_w / vol_w ** (2 / w)) * (vol_v * vol_w) ** (2 / m)


def naive_infimum(mu_v: float, mu_w: float, v: int, w: int) -> float:
    """(v+w) (mu_v/v)^(v/m) (mu_w/w)^(w/m): the naive formula minimized over lambda."""
    mu_v = _require_nonnegative(mu_v, 'mu_v')
    mu_w = _require_nonnegative(mu_w, 'mu_w')
    v = _require_dimension(v, name='v')
    w = _require_dimension(w, name='w')
    m = v + w
    # powers before quotients, as in product_lower_bound, so tiny mu does not underflow
    return m * mu_v ** (v / m) * mu_w ** (w / m) / (v ** (v / m) * w ** (w / m))


def product_lower_bound(mu_v: float, mu_w: float, v: int, w: int) -> float:
    """Lower bound for mu(V x W, g + h) given mu(V,g), mu(W,h) >= 0.

    m a_m / ((v a_v)^(v/m) (w a_w)^(w/m)) * mu_v^(v/m) * mu_w^(w/m)
    """
    mu_v = _require_nonnegative(mu_v, 'mu_v')
    mu_w = _require_nonnegative(mu_w, 'mu_w')
    v = _require_dimension(v, name='v')
    w = _require_dimension(w, name='w')
    m = v + w
    constant = m * conformal_exponent(m) / (
        (v * conformal_exponent(v)) ** (v / m) * (w * conformal_exponent(w)) ** (w / m)
    )
    return constant * mu_v ** (v / m) * mu_w ** (w / m)


def sigma_product_bound(sigma_v: float, v: int, w: int) -> float:
    """sigma(V x W) >= product_lower_bound(sigma(V), sigma(S^w), v, w) for compact V, W."""
    w = _require_dimension(w, name='w')
    return product_lower_bound(sigma_v, sphere_yamabe(w), v, w)


def lambda_surgery(m: int, k: int) -> float:
    """Lambda_{m,k}: surgery constant for k-dimensional surgery, 2 <= k <= m-4."""
    m = _require_dimension(m)
    if isinstance(k, bool) or int(k) != k or not 2 <= k <= m - 4:
        raise DimensionError(f"k-out-of-range: k={k!r} (need 2 <= k <= {m - 4})")
    k = int(k)
    return product_lower_bound(sphere_yamabe(k + 1), sphere_yamabe(m - k - 1), k + 1, m - k - 1)


def lambda_surgery_table(m: int) -> dict[int, float]:
    """Lambda_{m,k} for every admissible k."""
    m = _require_dimension(m, minimum=6)
    return {k: lambda_surgery(m, k) for k in range(2, m - 3)}


def lambda_min(m: int) -> float:
    """Lambda_m = min over k in 2..m-4 of Lambda_{m,k} (k=0 contributes infinity)."""
    return min(lambda_surgery_table(m).values())


def lambda_argmin(m: int) -> int:
    table = lambda_surgery_table(m)
    return min(table, key=lambda k: (table[k], k))


# ---------------------------------------------------------------------------
# Stable invariant
# ---------------------------------------------------------------------------

def big_sigma(sigma: float, m: int) -> float:
    """Sigma(M) = (sigma(M) / (m a_m))^m."""
    return nu_invariant(sigma, m)


def sigma_sphere(v: int) -> LogValue:
    """Sigma(S^v) = 4 pi (pi (v-2)/4)^v / Gamma((v+1)/2)^2, in log space."""
    v = _require_dimension(v, name='v')
    return LogValue(
        math.log(4 * math.pi) + v * math.log(math.pi * (v - 2) / 4) - 2 * log_gamma_half(v + 1)
    )


def stable_ratio_limit(v: int) -> LogValue:
    """lim_i Sigma(S^(v+bi)) / Sigma(S^(bi)) = (pi e / 2)^v, in log space."""
    v = _require_dimension(v, minimum=1, name='v')
    return LogValue(v * LOG_STABLE_BASE)


def sigma_sphere_asymptote(v: int) -> LogValue:
    """2 e^-2 (pi e / 2)^v, the leading Stirling asymptote of Sigma(S^v)."""
    v = _require_dimension(v, name='v')
    return LogValue(math.log(2) - 2 + v * LOG_STABLE_BASE)


def _log_nonnegative(x: float, name: str) -> LogValue:
    x = _require_nonnegative(x, name)
    return LogValue(math.log(x) if x > 0 else -math.inf)


class StableBounds(NamedTuple):
    """Sandwich for the stable invariant; zero is log -inf."""

    lower: LogValue
    upper: LogValue


def stable_bounds(sigma_v: float, v: int) -> StableBounds:
    """(pi e/2)^v >= stable Sigma(V) >= Sigma(V).

    The ordering lower <= upper is not validated: it is guaranteed only when
    ``sigma_v`` comes from an actual v-dimensional manifold.
    """
    return StableBounds(_log_nonnegative(sigma_v, 'sigma_v'), stable_ratio_limit(v))


def shift_stable_bounds(bounds: StableBounds, b: int, i: int) -> StableBounds:
    """Bounds for V x B^i from bounds for V: both multiply by (pi e/2)^(b i)."""
    b = _require_dimension(b, minimum=1, name='b')
    i = _require_dimension(i, minimum=0, name='i')
    if i == 0:
        return bounds
    factor = LogValue(b * i * LOG_STABLE_BASE)
    return StableBounds(bounds.lower * factor, bounds.upper * factor)


def stable_lower_from_product(sigma_vxbi: float, b: int, i: int) -> float:
    """stable Sigma(V) >= Sigma(V x B^i) (pi e/2)^(-b i) for every i >= 0."""
    sigma_vxbi = _require_nonnegative(sigma_vxbi, 'sigma_vxbi')
    b = _require_dimension(b, minimum=1, name='b')
    i = _require_dimension(i, minimum=0, name='i')
    return sigma_vxbi * math.exp(-b * i * LOG_STABLE_BASE)


def sigma_product_sigma_form(sigma_v: float, w: int) -> LogValue:
    """Sigma(V x W) >= Sigma(V) Sigma(S^w), in log space."""
    return _log_nonnegative(sigma_v, 'sigma_v') * sigma_sphere(w)


def stable_surgery_constant(m: int, k: int) -> LogValue:
    """(pi e/2)^(k+1) Sigma(S^(m-k-1)) for surgery of dimension 0 <= k <= m-4."""
    m = _require_dimension(m, minimum=4)
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= m - 4:
        raise DimensionError(f"k-out-of-range: k={k!r} (need 0 <= k <= {m - 4})")
    return LogValue((k + 1) * LOG_STABLE_BASE) * sigma_sphere(m - int(k) - 1)


def stable_surgery_bound(stable_m: float, stable_sphere: float, m: int, k: int) -> float:
    """Lower bound for the stable invariant of N obtained from M by k-dimensional surgery."""
    stable_m = _require_nonnegative(stable_m, 'stable_m')
    stable_sphere = _require_nonnegative(stable_sphere, 'stable_sphere')
    constant = stable_surgery_constant(m, k)
    candidates = [stable_m, stable_sphere]
    if constant.representable:
        candidates.append(constant.to_linear())
    return min(candidates)


# ---------------------------------------------------------------------------
# Einstein-Hilbert closed forms
# ---------------------------------------------------------------------------

def einstein_hilbert_constant(s: float, vol: float, m: int) -> float:
    """E(G) = s vol^(2/m) for a metric of constant scalar curvature s."""
    vol = _require_positive(vol, 'vol')
    m = _require_dimension(m)
    return float(s) * vol ** (2 / m)


def sphere_product_einstein_hilbert(v: int, w: int, lam: float, scale_v: float = 1.0) -> float:
    """E(scale_v rho^v + lam rho^w) on S^v x S^w.

    The constant-function value of the Yamabe quotient, hence an upper bound for
    mu; it tends to infinity as lam grows.
    """
    v = _require_dimension(v, minimum=1, name='v')
    w = _require_dimension(w, minimum=1, name='w')
    lam = _require_positive(lam, 'lam')
    scale_v = _require_positive(scale_v, 'scale_v')
    s = v * (v - 1) / scale_v + w * (w - 1) / lam
    vol = sphere_volume(v) * scale_v ** (v / 2) * sphere_volume(w) * lam ** (w / 2)
    return einstein_hilbert_constant(s, vol, v + w)


def einstein_scale(v: int, w: int, s_v: float, s_w: float) -> float:
    """The lam for which g + lam*h is Einstein-balanced: s_v / v = s_w / (lam w)."""
    v = _require_dimension(v, minimum=1, name='v')
    w = _require_dimension(w, minimum=1, name='w')
    s_v = _require_positive(s_v, 's_v')
    s_w = _require_positive(s_w, 's_w')
    return s_w * v / (s_v * w)
