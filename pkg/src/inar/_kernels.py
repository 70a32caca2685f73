"""Numerical kernels: counter-based RNG, Poisson sampling, path simulation,
and design-system accumulation.

Every function here is written once and compiled with numba when the
INAR_NUMBA environment flag allows it (the default); otherwise the same
source runs as plain Python on numpy scalars, which wraps uint64 arithmetic
identically. Callers in the public modules suppress numpy's scalar-overflow
RuntimeWarning, which fires only on the interpreted path.
"""

import math
import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "derive_key",
    "fill_poisson",
    "sim_path",
    "design_build",
    "design_build_numpy",
    "khat_build",
    "khat_build_numpy",
]


def _env_wants_numba():
    val = os.environ.get("INAR_NUMBA", "").strip().lower()
    return val not in ("0", "false", "off", "no")


USE_NUMBA = False
if _env_wants_numba():
    try:
        import numba

        USE_NUMBA = True
    except ImportError:
        USE_NUMBA = False

if USE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
else:

    def _jit(func):
        return func


def backend_name():
    """Name of the active kernel backend: "numba" or "python"."""
    return "numba" if USE_NUMBA else "python"


# splitmix64 constants (Steele, Lea, Flood 2014 finalizer, variant 13)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SEED_TAG = np.uint64(0x8E2FCA2F7C3DB543)
_STREAM_TAG = np.uint64(0xD1B54A32D192ED03)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S12 = np.uint64(12)
_INV52 = 2.220446049250313e-16  # 2**-52


@_jit
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@_jit
def derive_key(seed, stream_id):
    # Full avalanche on both inputs so nearby (seed, stream) pairs decorrelate.
    a = _mix64(seed ^ _SEED_TAG)
    b = _mix64(stream_id ^ _STREAM_TAG)
    return _mix64(a + b)


@_jit
def _next_uniform(state):
    # splitmix64 step; top 52 bits centered in (0, 1), never 0 or 1.
    state[0] = state[0] + _GOLDEN
    z = _mix64(state[0])
    return (np.float64(z >> _S12) + 0.5) * _INV52


@_jit
def _poisson_draw(lam, state):
    if lam <= 0.0:
        return 0
    if lam < 10.0:
        # Inversion by sequential search. The iteration cap guards against
        # the accumulated CDF saturating just below a uniform near 1.
        u = _next_uniform(state)
        p = math.exp(-lam)
        f = p
        k = 0
        while u > f and k < 200:
            k += 1
            p *= lam / k
            f += p
        return k
    # Transformed rejection with squeeze (Hormann 1993, PTRS).
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = _next_uniform(state) - 0.5
        v = _next_uniform(state)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= v_r:
            return int(k)
        if k < 0.0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(inv_alpha) - math.log(a / (us * us) + b)
                <= k * loglam - lam - math.lgamma(k + 1.0)):
            return int(k)


@_jit
def fill_poisson(lam, out, state):
    for i in range(out.shape[0]):
        out[i] = _poisson_draw(lam, state)


@_jit
def sim_path(nu, kern, n_steps, cap, state):
    # Counts kept as float64: integer-valued, exact below 2**53, and the
    # rolling intensity dot product then needs no casts.
    x = np.zeros(n_steps, dtype=np.float64)
    klen = kern.shape[0]
    x[0] = _poisson_draw(nu, state)
    for n in range(1, n_steps):
        kmax = min(n, klen)
        lam = nu
        for k in range(1, kmax + 1):
            lam += kern[k - 1] * x[n - k]
        if not (lam <= cap):
            return x, n
        x[n] = _poisson_draw(lam, state)
    return x, -1


@_jit
def design_build(x, p):
    # Moment vector b and design matrix Y, upper triangle, compensated
    # (Kahan) accumulation per entry.
    n_steps = x.shape[0]
    m = p + 1
    bsum = np.zeros(m, dtype=np.float64)
    bcmp = np.zeros(m, dtype=np.float64)
    ysum = np.zeros((m, m), dtype=np.float64)
    ycmp = np.zeros((m, m), dtype=np.float64)
    for n in range(n_steps):
        xn = x[n]
        jmax = min(n, p)
        y0 = xn - bcmp[0]
        t0 = bsum[0] + y0
        bcmp[0] = (t0 - bsum[0]) - y0
        bsum[0] = t0
        for j in range(1, jmax + 1):
            zj = x[n - j]
            v = zj * xn
            y1 = v - bcmp[j]
            t1 = bsum[j] + y1
            bcmp[j] = (t1 - bsum[j]) - y1
            bsum[j] = t1
            y2 = zj - ycmp[0, j]
            t2 = ysum[0, j] + y2
            ycmp[0, j] = (t2 - ysum[0, j]) - y2
            ysum[0, j] = t2
        for i in range(1, jmax + 1):
            zi = x[n - i]
            for j in range(i, jmax + 1):
                w = zi * x[n - j]
                y3 = w - ycmp[i, j]
                t3 = ysum[i, j] + y3
                ycmp[i, j] = (t3 - ysum[i, j]) - y3
                ysum[i, j] = t3
    b = bsum / n_steps
    y = np.empty((m, m), dtype=np.float64)
    y[0, 0] = 1.0
    for j in range(1, m):
        y[0, j] = ysum[0, j] / n_steps
        y[j, 0] = y[0, j]
    for i in range(1, m):
        for j in range(i, m):
            y[i, j] = ysum[i, j] / n_steps
            y[j, i] = y[i, j]
    return y, b


def design_build_numpy(x, p):
    # Vectorized route used as the interpreted fallback and as a test oracle
    # against the compiled loop. On integer count data every partial sum is
    # an exact float64 integer, so the two routes agree exactly.
    n_steps = x.shape[0]
    m = p + 1
    lags = np.zeros((n_steps, m), dtype=np.float64)
    lags[:, 0] = 1.0
    for j in range(1, m):
        lags[j:, j] = x[: n_steps - j]
    y = lags.T @ lags
    y = (y + y.T) * 0.5
    y /= n_steps
    y[0, 0] = 1.0
    b = lags.T @ x
    b /= n_steps
    return y, b


@_jit
def khat_build(x, mu, betas):
    # Empirical score-variance plug-in: (4/T) sum z_n z_n' (x_n - phi_n)^2,
    # Kahan-accumulated over the upper triangle.
    n_steps = x.shape[0]
    p = betas.shape[0]
    m = p + 1
    ksum = np.zeros((m, m), dtype=np.float64)
    kcmp = np.zeros((m, m), dtype=np.float64)
    for n in range(n_steps):
        jmax = min(n, p)
        phi = mu
        for j in range(1, jmax + 1):
            phi += betas[j - 1] * x[n - j]
        r = x[n] - phi
        r2 = r * r
        y0 = r2 - kcmp[0, 0]
        t0 = ksum[0, 0] + y0
        kcmp[0, 0] = (t0 - ksum[0, 0]) - y0
        ksum[0, 0] = t0
        for j in range(1, jmax + 1):
            v = x[n - j] * r2
            y1 = v - kcmp[0, j]
            t1 = ksum[0, j] + y1
            kcmp[0, j] = (t1 - ksum[0, j]) - y1
            ksum[0, j] = t1
        for i in range(1, jmax + 1):
            zi = x[n - i]
            for j in range(i, jmax + 1):
                w = zi * x[n - j] * r2
                y2 = w - kcmp[i, j]
                t2 = ksum[i, j] + y2
                kcmp[i, j] = (t2 - ksum[i, j]) - y2
                ksum[i, j] = t2
    scale = 4.0 / n_steps
    k_hat = np.empty((m, m), dtype=np.float64)
    for i in range(m):
        for j in range(i, m):
            k_hat[i, j] = ksum[i, j] * scale
            k_hat[j, i] = k_hat[i, j]
    return k_hat


def khat_build_numpy(x, mu, betas):
    n_steps = x.shape[0]
    p = betas.shape[0]
    m = p + 1
    lags = np.zeros((n_steps, m), dtype=np.float64)
    lags[:, 0] = 1.0
    for j in range(1, m):
        lags[j:, j] = x[: n_steps - j]
    theta = np.concatenate((np.array([mu]), np.asarray(betas, dtype=np.float64)))
    resid = x - lags @ theta
    k_hat = (lags * (resid * resid)[:, None]).T @ lags
    k_hat = (k_hat + k_hat.T) * 0.5
    k_hat *= 4.0 / n_steps
    return k_hat


if not USE_NUMBA:
    # The interpreted fallback swaps the O(T p^2) python loops for their
    # vectorized equivalents; the RNG/simulation loops stay as-is so that
    # draws are bit-identical across backends.
    design_build = design_build_numpy
    khat_build = khat_build_numpy
