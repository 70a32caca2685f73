"""Large-sample inference: sandwich covariance, confidence intervals, and
normality diagnostics (Jarque-Bera, Shapiro-Wilk, Q-Q data).

The estimator's score is a martingale difference sequence
(2/T) sum z_n (X_n - Phi(n)), which motivates the heteroskedasticity-
consistent plug-in K_hat below; J_hat is twice the design matrix, and the
asymptotic covariance is the sandwich J^-1 K J^-1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels as _k
from .errors import (
    DomainError,
    InvalidLevel,
    SampleSizeOutOfRange,
    SingularDesign,
    ZeroVariance,
)
from .estimate import RCOND_THRESHOLD, ThetaVector, build_design
from .simulate import CountPath

__all__ = [
    "SandwichCovariance",
    "NormalityReport",
    "sandwich_covariance",
    "confidence_intervals",
    "jarque_bera",
    "shapiro_wilk",
    "qq_data",
    "histogram_data",
    "normal_quantile",
    "normal_cdf",
]


@dataclass(frozen=True)
class SandwichCovariance:
    """J_hat = 2Y (curvature), K_hat (score variance), and the sandwich
    Sigma_hat = J_hat^-1 K_hat J_hat^-1."""

    J_hat: np.ndarray = field(repr=False)
    K_hat: np.ndarray = field(repr=False)
    Sigma_hat: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("J_hat", "K_hat", "Sigma_hat"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class NormalityReport:
    """Jarque-Bera and Shapiro-Wilk results for one sample."""

    jb_stat: float
    jb_p: float
    sw_stat: float
    sw_p: float
    sample_size: int


def sandwich_covariance(path, theta_hat: ThetaVector, p: int | None = None) -> SandwichCovariance:
    """Plug-in sandwich covariance at theta_hat.

    J_hat = 2Y; K_hat = (4/T) sum z_n z_n' (X_n - Phi(n))^2 with regressors
    z_n = (1, X_{n-1}, ..., X_{n-p}) zero-padded at the start; Sigma_hat is
    computed via two symmetric solves, never forming an inverse."""
    if p is None:
        p = theta_hat.p
    p = int(p)
    system = build_design(path, p)
    if isinstance(path, CountPath):
        x = path.counts_float()
    else:
        x = np.ascontiguousarray(path, dtype=np.float64)
    betas = np.zeros(p, dtype=np.float64)
    use = min(p, theta_hat.p)
    if use:
        betas[:use] = theta_hat.betas[:use]
    with np.errstate(over="ignore"):
        k_hat = _k.khat_build(x, theta_hat.mu, betas)
    j_hat = 2.0 * system.Y

    eig = np.abs(scipy.linalg.eigvalsh(j_hat))
    top = float(eig.max())
    rc = 0.0 if top == 0.0 else float(eig.min()) / top
    if rc < RCOND_THRESHOLD:
        raise SingularDesign(
            f"J_hat reciprocal condition {rc:.3e} below {RCOND_THRESHOLD:g}"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        half = scipy.linalg.solve(j_hat, k_hat, assume_a="sym")
        sigma = scipy.linalg.solve(j_hat, half.T, assume_a="sym")
    sigma = (sigma + sigma.T) * 0.5
    return SandwichCovariance(J_hat=j_hat, K_hat=k_hat, Sigma_hat=sigma)


def confidence_intervals(
    theta_hat: ThetaVector,
    cov: SandwichCovariance,
    T: int,
    level: float = 0.95,
) -> list[tuple[float, float]]:
    """Per-coordinate intervals theta_j +/- z_{(1+level)/2} sqrt(Sigma_jj/T)."""
    level = float(level)
    if not 0.0 < level < 1.0:
        raise InvalidLevel(f"level must be in (0, 1), got {level}")
    vec = theta_hat.to_array()
    diag = np.diag(cov.Sigma_hat)
    if diag.shape[0] != vec.shape[0]:
        raise ValueError(
            f"covariance dimension {diag.shape[0]} does not match theta {vec.shape[0]}"
        )
    z = normal_quantile(0.5 * (1.0 + level))
    half = z * np.sqrt(np.maximum(diag, 0.0) / float(T))
    return [(float(v - h), float(v + h)) for v, h in zip(vec, half)]


def jarque_bera(sample) -> tuple[float, float]:
    """Jarque-Bera statistic n/6 (S^2 + (K-3)^2/4) with moment-based
    skewness/kurtosis, and its exact chi-square(2) survival p = exp(-stat/2).
    Requires n >= 8; warns below 20 where the asymptotic null is poor."""
    x = np.asarray(sample, dtype=np.float64).ravel()
    n = x.shape[0]
    if n < 8:
        raise SampleSizeOutOfRange(f"Jarque-Bera needs n >= 8, got {n}")
    if n < 20:
        warnings.warn(
            f"Jarque-Bera on n={n} < 20: asymptotic p-value is unreliable",
            stacklevel=2,
        )
    xc = x - x.mean()
    m2 = float(xc @ xc) / n
    if m2 == 0.0:
        raise ZeroVariance("all sample values are equal")
    m3 = float((xc ** 3).sum()) / n
    m4 = float((xc ** 4).sum()) / n
    skew = m3 / m2 ** 1.5
    kurt = m4 / (m2 * m2)
    stat = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) ** 2)
    return stat, math.exp(-0.5 * stat)


# Royston (1995) AS R94 polynomial corrections for the Shapiro-Wilk
# weights and the normalizing transformation of W.
_SW_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_SW_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_SW_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_SW_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_SW_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_SW_C6 = (-0.4803, -0.082676, 0.0030302)
_SW_G = (-2.273, 0.459)


def _poly(coefs, x: float) -> float:
    acc = coefs[-1]
    for c in coefs[-2::-1]:
        acc = acc * x + c
    return acc


def shapiro_wilk(sample) -> tuple[float, float]:
    """Shapiro-Wilk W and p-value per Royston's AS R94 approximation,
    valid for 3 <= n <= 5000. Ties are handled by a stable sort."""
    x = np.asarray(sample, dtype=np.float64).ravel()
    n = x.shape[0]
    if n < 3 or n > 5000:
        raise SampleSizeOutOfRange(f"Shapiro-Wilk needs 3 <= n <= 5000, got {n}")
    x = np.sort(x, kind="stable")
    if x[-1] - x[0] == 0.0:
        raise ZeroVariance("all sample values are equal")

    n2 = n // 2
    # Expected order statistics of the upper half, largest first.
    m = np.array(
        [normal_quantile((n - i - 0.375) / (n + 0.25)) for i in range(n2)]
    )
    summ2 = 2.0 * float(m @ m)
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a = np.empty(n2, dtype=np.float64)
    if n == 3:
        a[0] = math.sqrt(0.5)
    else:
        a1 = m[0] / ssumm2 + _poly(_SW_C1, rsn)
        if n > 5:
            a2 = m[1] / ssumm2 + _poly(_SW_C2, rsn)
            fac = math.sqrt(
                (summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2)
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)
            )
            a[0], a[1] = a1, a2
            a[2:] = m[2:] / fac
        else:
            fac = math.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1 * a1))
            a[0] = a1
            a[1:] = m[1:] / fac

    xbar = x.mean()
    ssd = float((x - xbar) @ (x - xbar))
    if ssd == 0.0:
        raise ZeroVariance("all sample values are equal")
    sax = float(a @ (x[::-1][:n2] - x[:n2]))
    w = min(sax * sax / ssd, 1.0)

    if n == 3:
        pw = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return w, min(max(pw, 0.0), 1.0)
    y = math.log(1.0 - w) if w < 1.0 else -math.inf
    if n <= 11:
        gamma = _poly(_SW_G, float(n))
        if y >= gamma:
            return w, 0.0
        y = -math.log(gamma - y)
        mu = _poly(_SW_C3, float(n))
        sigma = math.exp(_poly(_SW_C4, float(n)))
    else:
        u = math.log(n)
        mu = _poly(_SW_C5, u)
        sigma = math.exp(_poly(_SW_C6, u))
    z = (y - mu) / sigma
    return w, 0.5 * math.erfc(z / math.sqrt(2.0))


def qq_data(sample) -> tuple[np.ndarray, np.ndarray]:
    """Normal Q-Q pairs: theoretical quantiles at plotting positions
    (i - 0.5)/n against the standardized order statistics.

    Standardization uses the sample standard deviation (ddof=1). The n=1
    edge maps to the single pair (0, 0) by convention."""
    x = np.asarray(sample, dtype=np.float64).ravel()
    n = x.shape[0]
    if n < 1:
        raise ValueError("sample must be nonempty")
    z = np.array([normal_quantile((i - 0.5) / n) for i in range(1, n + 1)])
    if n == 1:
        return z, np.zeros(1)
    sd = float(x.std(ddof=1))
    if sd == 0.0:
        raise ZeroVariance("all sample values are equal")
    ordered = np.sort(x, kind="stable")
    return z, (ordered - x.mean()) / sd


def histogram_data(sample, bins: int = 30) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Equal-width histogram over [min, max]: (bin_left, bin_right, count)."""
    x = np.asarray(sample, dtype=np.float64).ravel()
    if x.shape[0] < 1:
        raise ValueError("sample must be nonempty")
    counts, edges = np.histogram(x, bins=bins)
    return edges[:-1], edges[1:], counts


# AS 241 (Wichura 1988) rational approximations for the inverse standard
# normal CDF, double-precision branch (PPND16).
_ND_A0 = (3.3871328727963666080e0, 1.3314166789178437745e2,
          1.9715909503065514427e3, 1.3731693765509461125e4,
          4.5921953931549871457e4, 6.7265770927008700853e4,
          3.3430575583588128105e4, 2.5090809287301226727e3)
_ND_B0 = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
          5.3941960214247511077e3, 2.1213794301586595867e4,
          3.9307895800092710610e4, 2.8729085735721942674e4,
          5.2264952788528545610e3)
_ND_A1 = (1.42343711074968357734e0, 4.63033784615654529590e0,
          5.76949722146069140550e0, 3.64784832476320460504e0,
          1.27045825245236838258e0, 2.41780725177450611770e-1,
          2.27238449892691845833e-2, 7.74545014278341407640e-4)
_ND_B1 = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
          6.89767334985100004550e-1, 1.48103976427480074590e-1,
          1.51986665636164571966e-2, 5.47593808499534494600e-4,
          1.05075007164441684324e-9)
_ND_A2 = (6.65790464350110377720e0, 5.46378491116411436990e0,
          1.78482653991729133580e0, 2.96560571828504891230e-1,
          2.65321895265761230930e-2, 1.24266094738807843860e-3,
          2.71155556874348757815e-5, 2.01033439929228813265e-7)
_ND_B2 = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
          1.48753612908506148525e-2, 7.86869131145613259100e-4,
          1.84631831751005468180e-5, 1.42151175831644588870e-7,
          2.04426310338993978564e-15)


def _ratpoly(num, den, r: float) -> float:
    a = num[7]
    b = den[7]
    for i in range(6, -1, -1):
        a = a * r + num[i]
        b = b * r + den[i]
    return a / b


def normal_quantile(u: float) -> float:
    """Inverse standard normal CDF (AS 241, absolute error below 1e-15)."""
    u = float(u)
    if not 0.0 < u < 1.0:
        raise DomainError(f"quantile argument must be in (0, 1), got {u}")
    q = u - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _ratpoly(_ND_A0, _ND_B0, r)
    r = u if q < 0.0 else 1.0 - u
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        val = _ratpoly(_ND_A1, _ND_B1, r - 1.6)
    else:
        val = _ratpoly(_ND_A2, _ND_B2, r - 5.0)
    return -val if q < 0.0 else val


def normal_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-float(z) / math.sqrt(2.0))
