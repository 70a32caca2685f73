"""Parameter records, stationarity validation, renewal sequences, and
moment bounds for the cumulative INAR model.

The model is a discrete-time self-exciting count process: conditionally on
the past, X_n ~ Poisson(nu + sum_k alpha_k X_{n-k}). Stationarity requires
the kernel's l1 norm below 1; the sharper second-moment bounds additionally
need its squared l2 norm below 1/2.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import NonStationaryKernel

__all__ = [
    "ModelParams",
    "ValidationReport",
    "RenewalSequence",
    "BoundsReport",
    "geometric_kernel",
    "validate_params",
    "renewal_sequence",
    "solve_renewal",
    "moment_bounds",
]


@dataclass(frozen=True)
class ModelParams:
    """Immigration rate ``nu`` and reproduction kernel ``alpha_1..alpha_K``.

    ``kernel_tail`` optionally documents the closed form a finite kernel was
    truncated from (e.g. ``"geometric:0.25"``); it never enters computation.
    Construction is permissive: invalid values are reported by
    :func:`validate_params`, not rejected here.
    """

    nu: float
    kernel: tuple[float, ...] = ()
    kernel_tail: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "kernel", tuple(float(a) for a in self.kernel))

    @property
    def norm_l1(self) -> float:
        return float(np.sum(np.abs(self.kernel))) if self.kernel else 0.0

    @property
    def norm_l2_sq(self) -> float:
        if not self.kernel:
            return 0.0
        arr = np.asarray(self.kernel)
        return float(arr @ arr)

    def kernel_array(self) -> np.ndarray:
        return np.asarray(self.kernel, dtype=np.float64)

    def digest(self) -> str:
        """Stable identifier of (nu, kernel) for provenance stamps."""
        text = f"nu={self.nu!r};kernel={self.kernel!r}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ValidationReport:
    """Per-condition pass/fail from :func:`validate_params`."""

    nonnegative: bool
    stationary: bool
    l2_advisory: bool
    norm_l1: float
    norm_l2_sq: float

    @property
    def ok(self) -> bool:
        """True when the hard conditions (nonnegativity, stationarity) hold."""
        return self.nonnegative and self.stationary


@dataclass(frozen=True)
class RenewalSequence:
    """Values A_1..A_n of the renewal sequence sum_k alpha^(*k)."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, idx):
        return self.values[idx]


@dataclass(frozen=True)
class BoundsReport:
    """Analytic moment and deviation bounds at horizon T.

    ``second_moment_bound`` and ``norm_K2`` are None when the kernel's
    squared l2 norm reaches 1/2: both formulas share the (1 - 2||a||_2^2)
    denominator and stop being upper bounds there.
    """

    mean_bound: float
    second_moment_bound: float | None
    norm_L2: float
    norm_K2: float | None
    horizon_T: int


def geometric_kernel(ratio: float, tol: float = 1e-12) -> tuple[float, ...]:
    """Kernel alpha_n = ratio**n truncated at the first term below ``tol``.

    The dropped tail has l1 mass below tol/(1-ratio), negligible against
    double-precision accumulation in every downstream sum.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"geometric ratio must be in (0, 1), got {ratio}")
    terms = []
    term = ratio
    while term >= tol:
        terms.append(term)
        term *= ratio
    return tuple(terms)


def validate_params(params: ModelParams) -> ValidationReport:
    """Check nonnegativity, stationarity (l1 < 1), and the l2 advisory.

    Report-only: the l2 condition in particular is deliberately violated by
    interesting models (a single lag of 0.8 has squared l2 norm 0.64), and
    the estimator remains usable there.
    """
    arr = params.kernel_array()
    nonneg = params.nu >= 0.0 and bool(np.all(arr >= 0.0))
    l1 = params.norm_l1
    l2_sq = params.norm_l2_sq
    return ValidationReport(
        nonnegative=nonneg,
        stationary=bool(l1 < 1.0),
        l2_advisory=bool(l2_sq < 0.5),
        norm_l1=l1,
        norm_l2_sq=l2_sq,
    )


def _check_stationary(kernel: np.ndarray, what: str = "kernel"):
    if kernel.size and float(np.sum(np.abs(kernel))) >= 1.0:
        raise NonStationaryKernel(
            f"{what} has l1 norm {float(np.sum(np.abs(kernel))):.6g} >= 1"
        )


def renewal_sequence(kernel, n_max: int) -> RenewalSequence:
    """First ``n_max`` values of A = sum of convolution powers of the kernel.

    Computed by the defining recursion A = alpha + alpha * A (discrete
    convolution), which is exact term by term: A_n depends only on
    alpha_1..alpha_n, so finite kernels need no tail correction.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    kern = np.asarray(kernel, dtype=np.float64)
    _check_stationary(kern)
    klen = kern.shape[0]
    a = np.zeros(n_max, dtype=np.float64)
    for n in range(1, n_max + 1):
        acc = kern[n - 1] if n <= klen else 0.0
        smax = min(n - 1, klen)
        for s in range(1, smax + 1):
            acc += kern[s - 1] * a[n - s - 1]
        a[n - 1] = acc
    return RenewalSequence(a)


def solve_renewal(y, kernel) -> np.ndarray:
    """Solve x = y + alpha * x (convolution): x_n = y_n + sum A_i y_{n-i}."""
    yarr = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(yarr)):
        raise ValueError("y must be finite")
    kern = np.asarray(kernel, dtype=np.float64)
    _check_stationary(kern)
    n = yarr.shape[0]
    if n == 0:
        return yarr.copy()
    a = renewal_sequence(kern, n).values if kern.size else None
    x = yarr.copy()
    if a is not None:
        for i in range(1, n):
            # x_n += A_i * y_{n-i} for all n > i, vectorized over n
            x[i:] += a[i - 1] * yarr[: n - i]
    return x


def moment_bounds(params: ModelParams, horizon_T: int) -> BoundsReport:
    """Analytic bounds: stationary mean, second moment, and the deviation
    constants L^2 (lower) and K^2 (upper) at horizon T.

    Requires stationarity. The second-moment-based quantities are omitted
    when the squared l2 norm of the kernel reaches 1/2.
    """
    if horizon_T < 1:
        raise ValueError(f"horizon_T must be >= 1, got {horizon_T}")
    report = validate_params(params)
    if not report.stationary:
        raise NonStationaryKernel(
            f"kernel has l1 norm {report.norm_l1:.6g} >= 1"
        )
    nu = params.nu
    l1 = report.norm_l1
    l2_sq = report.norm_l2_sq
    t = float(horizon_T)

    mean_bound = nu / (1.0 - l1)

    second = None
    if l2_sq < 0.5:
        second = (2.0 * nu * nu * (1.0 - l1) + nu) / (
            (1.0 - 2.0 * l2_sq) * (1.0 - l1)
        )

    one_plus = (1.0 + l1) ** 2
    cand1 = 1.0 / (1.0 + nu * t * (t - 1.0) * one_plus)
    if nu > 0.0:
        cand2 = nu / (2.0 * t * (1.0 - l1) * one_plus)
        norm_l2 = min(cand1, cand2)
    else:
        # Degenerate nu=0 process: the second candidate collapses to 0 and
        # stops being informative; keep the always-positive first bound.
        norm_l2 = cand1

    norm_k2 = None
    if second is not None:
        bracket = 2.0 * nu * nu / (1.0 - l1) ** 2 + second
        norm_k2 = max(2.0, (t - 1.0) / 2.0 * bracket)

    return BoundsReport(
        mean_bound=mean_bound,
        second_moment_bound=second,
        norm_L2=norm_l2,
        norm_K2=norm_k2,
        horizon_T=horizon_T,
    )
