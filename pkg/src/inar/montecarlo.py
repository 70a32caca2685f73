"""Monte Carlo studies: replicate simulate-estimate, aggregate error
metrics, and feed the normality diagnostics.

Replication i always uses stream_id = i of the base seed, so results are
bit-identical for any worker count and any replication subset.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AllReplicationsFailed, DimensionMismatch, SampleSizeOutOfRange, SingularDesign
from .estimate import build_design, solve_cls
from .inference import (
    NormalityReport,
    histogram_data,
    jarque_bera,
    qq_data,
    shapiro_wilk,
)
from .model import ModelParams
from .simulate import DEFAULT_LAMBDA_CAP, RngStream, simulate_path

__all__ = [
    "McConfig",
    "McSummary",
    "ComponentDiagnostics",
    "component_label",
    "truth_vector",
    "run_experiment",
    "summarize",
    "normality_suite",
]


@dataclass(frozen=True)
class McConfig:
    """One Monte Carlo experiment: truth, horizon, lag order, replications."""

    params: ModelParams
    T: int
    p: int
    n_experiments: int
    base_seed: int
    cap_negatives: bool = True
    lam_cap: float = DEFAULT_LAMBDA_CAP
    case: str | None = None

    def __post_init__(self):
        if self.n_experiments < 1:
            raise ValueError("n_experiments must be >= 1")
        if not 0 <= self.p <= self.T - 1:
            raise ValueError(f"need 0 <= p <= T-1, got p={self.p}, T={self.T}")


@dataclass(frozen=True)
class McSummary:
    """Aggregates over successful replications.

    ``per_component_samples`` holds the raw estimates (one row per
    successful replication); capping, when enabled, is applied only inside
    the MSE. ``mean_theta`` and the relative errors are computed from the
    raw samples, matching how the study tables report signed means.
    """

    mean_theta: np.ndarray = field(repr=False)
    mse: float
    rel_err_theta: float
    rel_err_alpha: float
    per_component_samples: np.ndarray = field(repr=False)
    truth: np.ndarray = field(repr=False)
    cap_negatives: bool = True
    failures: int = 0
    rep_ids: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("mean_theta", "per_component_samples", "truth"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        ids = self.rep_ids
        if ids is None:
            ids = np.arange(1, self.per_component_samples.shape[0] + 1)
        ids = np.ascontiguousarray(ids, dtype=np.int64)
        ids.flags.writeable = False
        object.__setattr__(self, "rep_ids", ids)

    @property
    def n_success(self) -> int:
        return self.per_component_samples.shape[0]


@dataclass(frozen=True)
class ComponentDiagnostics:
    """Normality report plus plot-ready Q-Q and histogram data for one
    estimator component."""

    label: str
    report: NormalityReport
    qq_z: np.ndarray = field(repr=False)
    qq_value: np.ndarray = field(repr=False)
    hist_left: np.ndarray = field(repr=False)
    hist_right: np.ndarray = field(repr=False)
    hist_count: np.ndarray = field(repr=False)


def component_label(j: int) -> str:
    """Estimator-side component names: mu_hat, beta_1, beta_2, ..."""
    return "mu_hat" if j == 0 else f"beta_{j}"


def truth_vector(params: ModelParams, p: int) -> np.ndarray:
    """Truth s = (nu, alpha_1..alpha_p), zero-padded or truncated to p lags."""
    out = np.zeros(p + 1, dtype=np.float64)
    out[0] = params.nu
    use = min(p, len(params.kernel))
    if use:
        out[1 : use + 1] = params.kernel[:use]
    return out


def _rel_err(num: float, denom: float) -> float:
    if denom == 0.0:
        return 0.0 if num == 0.0 else float("inf")
    return num / denom


def summarize(estimates, truth, cap_negatives: bool = True) -> McSummary:
    """Aggregate raw estimates against the truth vector.

    MSE averages the squared l2 distance per replication, with negative
    reproduction coefficients clamped to zero first when ``cap_negatives``
    (they estimate nonnegative quantities); the raw samples and their mean
    are preserved unchanged."""
    est = np.ascontiguousarray(estimates, dtype=np.float64)
    if est.ndim != 2 or est.shape[0] < 1:
        raise DimensionMismatch("estimates must be a nonempty (N, p+1) matrix")
    s = np.ascontiguousarray(truth, dtype=np.float64)
    if s.shape != (est.shape[1],):
        raise DimensionMismatch(
            f"truth has shape {s.shape}, estimates have {est.shape[1]} columns"
        )
    mean_theta = est.mean(axis=0)
    metric_est = est
    if cap_negatives and est.shape[1] > 1:
        metric_est = est.copy()
        np.clip(metric_est[:, 1:], 0.0, None, out=metric_est[:, 1:])
    dev = metric_est - s
    mse = float((dev * dev).sum(axis=1).mean())
    rel_theta = _rel_err(
        float(np.linalg.norm(mean_theta - s)), float(np.linalg.norm(s))
    )
    rel_alpha = _rel_err(
        float(np.linalg.norm(mean_theta[1:] - s[1:])), float(np.linalg.norm(s[1:]))
    )
    return McSummary(
        mean_theta=mean_theta,
        mse=mse,
        rel_err_theta=rel_theta,
        rel_err_alpha=rel_alpha,
        per_component_samples=est,
        truth=s,
        cap_negatives=bool(cap_negatives),
        failures=0,
    )


def run_experiment(config: McConfig, threads: int = 1) -> McSummary:
    """Algorithm: for i = 1..N simulate with stream_id = i, estimate by CLS,
    then aggregate. Singular replications are dropped and counted; the run
    fails only if every replication does."""
    n = config.n_experiments
    m = config.p + 1
    results = np.full((n, m), np.nan, dtype=np.float64)
    ok = np.zeros(n, dtype=bool)

    def one(i: int) -> None:
        rng = RngStream(config.base_seed, i)
        try:
            path = simulate_path(config.params, config.T, rng, config.lam_cap)
            theta = solve_cls(build_design(path, config.p))
        except SingularDesign:
            return
        results[i - 1] = theta.to_array()
        ok[i - 1] = True

    threads = max(1, int(threads))
    if threads == 1:
        for i in range(1, n + 1):
            one(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one, range(1, n + 1)))

    if not ok.any():
        raise AllReplicationsFailed(
            f"all {n} replications failed with singular designs"
        )
    truth = truth_vector(config.params, config.p)
    summary = summarize(results[ok], truth, config.cap_negatives)
    return replace(
        summary,
        failures=int(n - ok.sum()),
        rep_ids=np.nonzero(ok)[0] + 1,
    )


def normality_suite(summary: McSummary, components=None) -> tuple[ComponentDiagnostics, ...]:
    """Jarque-Bera/Shapiro-Wilk plus Q-Q pairs and a 30-bin histogram for
    each requested component (default: the first three), computed on the
    raw uncapped samples."""
    samples = summary.per_component_samples
    n, m = samples.shape
    if n < 8:
        raise SampleSizeOutOfRange(
            f"normality suite needs >= 8 successful replications, got {n}"
        )
    if components is None:
        components = [j for j in (0, 1, 2) if j < m]
    out = []
    for j in components:
        j = int(j)
        if not 0 <= j < m:
            raise DimensionMismatch(
                f"component {j} out of range for p = {m - 1}"
            )
        col = samples[:, j]
        jb_stat, jb_p = jarque_bera(col)
        sw_stat, sw_p = shapiro_wilk(col)
        qq_z, qq_value = qq_data(col)
        left, right, count = histogram_data(col, bins=30)
        out.append(
            ComponentDiagnostics(
                label=component_label(j),
                report=NormalityReport(
                    jb_stat=jb_stat,
                    jb_p=jb_p,
                    sw_stat=sw_stat,
                    sw_p=sw_p,
                    sample_size=n,
                ),
                qq_z=qq_z,
                qq_value=qq_value,
                hist_left=left,
                hist_right=right,
                hist_count=count.astype(np.int64),
            )
        )
    return tuple(out)
