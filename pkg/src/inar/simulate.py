"""Reproducible simulation of cumulative INAR sample paths.

Randomness is counter-style: an :class:`RngStream` is an immutable
(seed, stream_id) pair, and every sampling function derives the stream's
state afresh, so calls are pure and replication i of a Monte Carlo run
draws the same path whether it runs alone, in a batch, or on any number
of threads.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from .errors import InvalidRate, NonStationaryKernel, Overflow
from .model import ModelParams, validate_params

__all__ = [
    "RngStream",
    "CountPath",
    "poisson_sample",
    "simulate_path",
    "write_path_csv",
    "read_path_csv",
]

_MASK64 = (1 << 64) - 1

DEFAULT_LAMBDA_CAP = 1e9


@dataclass(frozen=True)
class RngStream:
    """Immutable handle for one reproducible stream of randomness.

    Identical (seed, stream_id) pairs reproduce identical draw sequences
    bit for bit, on either kernel backend.
    """

    seed: int
    stream_id: int = 0

    def state(self) -> np.ndarray:
        """Fresh mutable generator state for this stream."""
        with np.errstate(over="ignore"):
            key = _k.derive_key(
                np.uint64(self.seed & _MASK64),
                np.uint64(self.stream_id & _MASK64),
            )
        return np.array([key], dtype=np.uint64)

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)


@dataclass(frozen=True)
class CountPath:
    """One realization X_1..X_T with its generation provenance."""

    counts: np.ndarray = field(repr=False)
    seed: int = 0
    stream_id: int = 0
    params_digest: str = ""

    def __post_init__(self):
        arr = np.ascontiguousarray(self.counts, dtype=np.int64)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError("counts must be a nonempty 1-d sequence")
        if np.any(arr < 0):
            raise ValueError("counts must be nonnegative")
        arr.flags.writeable = False
        object.__setattr__(self, "counts", arr)

    def __len__(self) -> int:
        return self.counts.shape[0]

    def counts_float(self) -> np.ndarray:
        return self.counts.astype(np.float64)


def poisson_sample(lam: float, rng: RngStream, size: int | None = None):
    """Exact Poisson(lam) draws from the given stream.

    With ``size=None`` returns the stream's first variate as an int;
    otherwise the first ``size`` variates as an int64 array. Inversion by
    sequential search below lam=10, transformed rejection above.
    """
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0.0:
        raise InvalidRate(f"rate must be finite and >= 0, got {lam}")
    n = 1 if size is None else int(size)
    if n < 0:
        raise ValueError(f"size must be >= 0, got {size}")
    out = np.empty(n, dtype=np.int64)
    state = rng.state()
    with np.errstate(over="ignore"):
        _k.fill_poisson(lam, out, state)
    if size is None:
        return int(out[0])
    return out


def simulate_path(
    params: ModelParams,
    T: int,
    rng: RngStream,
    lam_cap: float = DEFAULT_LAMBDA_CAP,
) -> CountPath:
    """Simulate X_1..X_T: X_1 ~ Poisson(nu), then each X_n is Poisson with
    intensity nu plus the kernel-weighted recent counts.

    Raises :class:`Overflow` if any intensity exceeds ``lam_cap`` (runaway,
    near-critical configurations) and :class:`NonStationaryKernel` if the
    parameters fail validation.
    """
    T = int(T)
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    report = validate_params(params)
    if not report.nonnegative:
        raise NonStationaryKernel("nu and all kernel entries must be >= 0")
    if not report.stationary:
        raise NonStationaryKernel(
            f"kernel has l1 norm {report.norm_l1:.6g} >= 1"
        )
    state = rng.state()
    with np.errstate(over="ignore"):
        x, overflow_at = _k.sim_path(
            params.nu, params.kernel_array(), T, float(lam_cap), state
        )
    if overflow_at >= 0:
        raise Overflow(
            f"intensity exceeded cap {lam_cap:g} at step {int(overflow_at) + 1}"
        )
    return CountPath(
        counts=x.astype(np.int64),
        seed=rng.seed,
        stream_id=rng.stream_id,
        params_digest=params.digest(),
    )


def write_path_csv(path: CountPath, file) -> None:
    """Write a path as CSV with header ``n,x``, one row per step, 1-based n."""
    own = isinstance(file, (str, os.PathLike))
    fh = open(file, "w", newline="") if own else file
    try:
        writer = csv.writer(fh)
        writer.writerow(["n", "x"])
        for n, xn in enumerate(path.counts, start=1):
            writer.writerow([n, int(xn)])
    finally:
        if own:
            fh.close()


def read_path_csv(file) -> CountPath:
    """Read a path written by :func:`write_path_csv`; counts round-trip
    exactly (generation provenance is not stored in the CSV)."""
    own = isinstance(file, (str, os.PathLike))
    fh = open(file, "r", newline="") if own else file
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["n", "x"]:
            raise ValueError("path CSV must start with header 'n,x'")
        counts = []
        for row in reader:
            if not row:
                continue
            counts.append(int(row[1]))
    finally:
        if own:
            fh.close()
    return CountPath(counts=np.asarray(counts, dtype=np.int64))
