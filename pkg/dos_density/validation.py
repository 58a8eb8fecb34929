"""
Numerical and statistical oracles: one-sample Kolmogorov-Smirnov test,
adaptive quadrature and golden-section maximization.

They certify the analytic densities and the closed-form estimators
independently of the code under test.
"""
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import kolmogorov

from dos_density.errors import BracketError, InsufficientSamplesError, ToleranceNotMetError

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

MIN_KS_SAMPLES = 10


@dataclass(frozen=True)
class KsResult:
    """
    Outcome of a one-sample KS test.

    Attributes:
        d_statistic (float): sup |F_n - F| in [0, 1].
        p_value (float): Asymptotic Kolmogorov p-value in [0, 1].
        n (int): Sample count.
    """
    d_statistic: float
    p_value: float
    n: int

    def passed(self, alpha: float = 0.01) -> bool:
        return self.p_value > alpha


def ks_test(samples: Sequence[float], cdf: Callable[[float], float]) -> KsResult:
    """
    One-sample Kolmogorov-Smirnov test of samples against a continuous CDF.

    D = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n) over the sorted
    samples; the p-value is the Kolmogorov survival function at sqrt(n) D.

    Args:
        samples: Observations.
        cdf: Non-decreasing function onto [0, 1], called per sample.

    Returns:
        KsResult: Statistic, p-value and sample count.

    Raises:
        InsufficientSamplesError: With fewer than 10 samples.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < MIN_KS_SAMPLES:
        raise InsufficientSamplesError(f'KS test needs at least {MIN_KS_SAMPLES} samples, got {n}')

    f = np.clip(np.fromiter((cdf(v) for v in x), dtype=float, count=n), 0.0, 1.0)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    d = min(max(d, 0.0), 1.0)
    p = float(kolmogorov(math.sqrt(n) * d))
    return KsResult(d_statistic=d, p_value=min(max(p, 0.0), 1.0), n=n)


def quadrature(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
               scale: float = 1.0, limit: int = 500) -> float:
    """
    Integrate f over [a, b] by adaptive panel refinement (QUADPACK).

    A semi-infinite upper limit b = inf is mapped onto (0, 1] through
    x = a - scale ln u, which suits the exponential tails of the densities
    here; `scale` should be near the width of the integrand's bulk.

    Args:
        f: Integrand, finite on [a, b].
        a (float): Lower limit.
        b (float): Upper limit, may be math.inf.
        tol (float): Absolute error target.
        scale (float): Length scale of the semi-infinite substitution.
        limit (int): Maximum number of panels.

    Returns:
        float: Integral estimate.

    Raises:
        ValueError: If a >= b.
        ToleranceNotMetError: If the error estimate stays above tol.
    """
    if not a < b:
        raise ValueError(f'Integration limits must satisfy a < b, got [{a}, {b}]')

    if math.isinf(b):
        def integrand(u):
            if u <= 0.0:
                return 0.0
            return f(a - scale * math.log(u)) * scale / u
        lo, hi = 0.0, 1.0
    else:
        integrand, lo, hi = f, a, b

    value, error = integrate.quad(integrand, lo, hi, epsabs=tol, epsrel=0.0, limit=limit, full_output=1)[:2]
    if not error <= tol:
        raise ToleranceNotMetError(
            f'Quadrature error estimate {error:.3g} above tolerance {tol:.3g}',
            best_estimate=value, error_estimate=error)
    return float(value)


def argmax_1d(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    """
    Maximize a unimodal function on [lo, hi] by golden-section search.

    Args:
        f: Unimodal function.
        lo (float): Left end of the bracket.
        hi (float): Right end of the bracket.
        tol (float): Final interval width.

    Returns:
        float: Midpoint of the final interval.

    Raises:
        BracketError: If the maximizer sits on a bracket boundary.

    Example:
        >>> round(argmax_1d(lambda x: -(x - 3) ** 2, 0, 10, 1e-9), 6)
        3.0
    """
    a, b = min(lo, hi), max(lo, hi)
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc > yd:
        a, b = a, d
    else:
        a, b = c, b

    x = 0.5 * (a + b)
    lo, hi = min(lo, hi), max(lo, hi)
    if x - lo <= tol or hi - x <= tol:
        raise BracketError(f'Maximizer {x!r} lies on the bracket boundary [{lo}, {hi}]')
    return x


def argmax_log_scale(f: Callable[[float], float], guess: float, rel_tol: float = 1e-11,
                     decades: float = 2.0) -> float:
    """
    Maximize f over a positive variable by searching in its logarithm.

    The bracket spans `decades` orders of magnitude on each side of `guess`.
    """
    if not guess > 0:
        raise ValueError(f'Guess must be positive, got {guess!r}')
    centre = math.log(guess)
    span = decades * math.log(10.0)
    return math.exp(argmax_1d(lambda t: f(math.exp(t)), centre - span, centre + span, rel_tol))
