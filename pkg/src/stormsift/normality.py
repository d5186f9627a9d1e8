"""Normality machinery for the geospatial model: Shapiro-Wilk W (Royston's
AS R94 approximation) and maximum-likelihood Box-Cox transformation."""

from __future__ import annotations

import math
from statistics import NormalDist

import numpy as np

# Royston (1995) polynomial corrections for the two largest coefficients,
# evaluated at u = 1/sqrt(n). Highest degree first (np.polyval order).
_C1 = (-2.706056, 4.434685, -2.071190, -0.147981, 0.221157, 0.0)
_C2 = (-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0)

BOXCOX_LAMBDA_RANGE = (-5.0, 5.0)
BOXCOX_TOL = 1e-4
EPSILON_FLOOR = 1e-6


def shapiro_wilk(xs) -> float:
    """Shapiro-Wilk W statistic for 3 <= n <= 5000.

    Uses Royston's approximation: Blom plotting-position scores with the
    polynomial-corrected end coefficients, W = (sum a_i x_(i))^2 / SS_x.
    """
    x = np.sort(np.asarray(xs, dtype=float))
    n = len(x)
    if n < 3 or n > 5000:
        raise ValueError(f"sample size {n} outside [3, 5000]")
    if x[-1] - x[0] <= 0:
        raise ValueError("constant sample has no W statistic")

    a = _coefficients(n)
    num = float(a @ x) ** 2
    den = float(((x - x.mean()) ** 2).sum())
    return min(num / den, 1.0)


def _coefficients(n: int) -> np.ndarray:
    if n == 3:
        s = math.sqrt(0.5)
        return np.array([-s, 0.0, s])
    nd = NormalDist()
    i = np.arange(1, n + 1)
    m = np.array([nd.inv_cdf((k - 0.375) / (n + 0.25)) for k in i])
    mm = float(m @ m)
    u = 1.0 / math.sqrt(n)
    a_n = np.polyval(_C1, u) + m[-1] / math.sqrt(mm)
    if n > 5:
        a_n1 = np.polyval(_C2, u) + m[-2] / math.sqrt(mm)
        phi = (mm - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * a_n**2 - 2 * a_n1**2)
        a = m / math.sqrt(phi)
        a[-1] = a_n
        a[-2] = a_n1
        a[0] = -a_n
        a[1] = -a_n1
    else:
        phi = (mm - 2 * m[-1] ** 2) / (1 - 2 * a_n**2)
        a = m / math.sqrt(phi)
        a[-1] = a_n
        a[0] = -a_n
    return a


def boxcox_transform_at(xs, lam: float) -> np.ndarray:
    """Box-Cox transform (x^lam - 1)/lam, or ln x when |lam| < 1e-6."""
    x = np.asarray(xs, dtype=float)
    if abs(lam) < 1e-6:
        return np.log(x)
    return (np.power(x, lam) - 1.0) / lam


def boxcox_loglik(xs, lam: float) -> float:
    """Profile log-likelihood of the Box-Cox parameter for a positive sample."""
    x = np.asarray(xs, dtype=float)
    n = len(x)
    y = boxcox_transform_at(x, lam)
    var = float(y.var())
    if var <= 0:
        return -np.inf
    return -n / 2.0 * math.log(var) + (lam - 1.0) * float(np.log(x).sum())


def transform_boxcox(xs) -> tuple[float, np.ndarray]:
    """Maximum-likelihood Box-Cox transform.

    Lambda maximizes the profile log-likelihood over [-5, 5] by
    golden-section search to tolerance 1e-4.
    """
    x = np.asarray(xs, dtype=float)
    if len(x) < 20:
        raise ValueError("Box-Cox needs at least 20 observations")
    if np.any(x <= 0):
        raise ValueError("Box-Cox requires strictly positive input")
    if x.max() == x.min():
        raise ValueError("constant input cannot be Box-Cox transformed")
    lam = _golden_section_max(lambda l: boxcox_loglik(x, l), *BOXCOX_LAMBDA_RANGE, BOXCOX_TOL)
    return lam, boxcox_transform_at(x, lam)


def _golden_section_max(f, lo: float, hi: float, tol: float) -> float:
    invphi = (math.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def epsilon_floor(xs, eps: float = EPSILON_FLOOR) -> np.ndarray:
    """Raise zeros and near-zeros to eps so log/Box-Cox stay defined."""
    return np.maximum(np.asarray(xs, dtype=float), eps)


def transform_minmax(xs) -> np.ndarray:
    """Min-max scale to [0, 1]. Constant input is an error."""
    x = np.asarray(xs, dtype=float)
    if len(x) < 2:
        raise ValueError("min-max needs at least 2 values")
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        raise ValueError("constant input cannot be min-max scaled")
    return (x - lo) / (hi - lo)


def transform_log10(xs, eps: float = EPSILON_FLOOR) -> np.ndarray:
    """Elementwise log10 after the epsilon floor."""
    return np.log10(epsilon_floor(xs, eps))
