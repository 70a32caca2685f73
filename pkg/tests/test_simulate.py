"""Sampler statistics, path simulation, determinism, and CSV round trips."""

import io

import numpy as np
import pytest

import inar
from inar import (
    CountPath,
    InvalidRate,
    ModelParams,
    NonStationaryKernel,
    Overflow,
    RngStream,
)


class TestPoissonSample:
    def test_large_lambda_moments(self):
        x = inar.poisson_sample(150.0, RngStream(314), size=1_000_000)
        sigma = np.sqrt(150.0 / 1_000_000)
        assert abs(x.mean() - 150.0) <= 3 * sigma
        disp = x.var(ddof=1) / x.mean()
        assert 0.99 <= disp <= 1.01

    @pytest.mark.parametrize("lam", [0.4, 3.0])
    def test_small_lambda_moments(self, lam):
        x = inar.poisson_sample(lam, RngStream(271, 1), size=500_000)
        sigma = np.sqrt(lam / 500_000)
        assert abs(x.mean() - lam) <= 4 * sigma
        disp = x.var(ddof=1) / x.mean()
        assert 0.98 <= disp <= 1.02

    def test_zero_rate(self):
        assert inar.poisson_sample(0.0, RngStream(1)) == 0
        assert np.all(inar.poisson_sample(0.0, RngStream(1), size=100) == 0)

    @pytest.mark.parametrize("lam", [-1.0, float("nan"), float("inf")])
    def test_invalid_rate(self, lam):
        with pytest.raises(InvalidRate):
            inar.poisson_sample(lam, RngStream(1))

    def test_determinism(self):
        a = inar.poisson_sample(150.0, RngStream(9, 2), size=1000)
        b = inar.poisson_sample(150.0, RngStream(9, 2), size=1000)
        c = inar.poisson_sample(150.0, RngStream(9, 3), size=1000)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_stream_is_pure(self):
        # drawing does not mutate the stream: repeated calls agree
        rng = RngStream(123, 7)
        first = inar.poisson_sample(42.0, rng, size=16)
        again = inar.poisson_sample(42.0, rng, size=16)
        assert np.array_equal(first, again)
        assert inar.poisson_sample(42.0, rng) == first[0]

    def test_substream_matches_explicit_stream(self):
        base = RngStream(55)
        x = inar.poisson_sample(10.0, base.substream(4), size=8)
        y = inar.poisson_sample(10.0, RngStream(55, 4), size=8)
        assert np.array_equal(x, y)


class TestSimulatePath:
    def test_zero_nu_is_all_zero(self):
        params = ModelParams(nu=0.0, kernel=(0.5, 0.25))
        path = inar.simulate_path(params, 200, RngStream(11))
        assert np.all(path.counts == 0)

    def test_empty_kernel_iid_poisson(self):
        params = ModelParams(nu=100.0)
        path = inar.simulate_path(params, 10_000, RngStream(21))
        x = path.counts_float()
        assert abs(x.mean() - 100.0) <= 3 * np.sqrt(100.0 / 10_000)
        disp = x.var(ddof=1) / x.mean()
        assert 0.95 <= disp <= 1.05

    def test_case1_stationary_mean(self, case1_params):
        path = inar.simulate_path(case1_params, 10_000, RngStream(33))
        bound = inar.moment_bounds(case1_params, 10_000).mean_bound
        m = path.counts_float().mean()
        assert abs(m - 150.0) / 150.0 <= 0.05
        assert m <= 1.05 * bound

    def test_first_observation_is_immigration_draw(self, case1_params):
        # X_1 ~ Poisson(nu), and bitwise equal to the bare sampler on the same stream
        for i in range(5):
            rng = RngStream(77, i)
            path = inar.simulate_path(case1_params, 3, rng)
            assert path.counts[0] == inar.poisson_sample(100.0, rng)

    def test_first_observation_marginal(self):
        params = ModelParams(nu=100.0, kernel=(0.3,))
        firsts = np.array(
            [
                inar.simulate_path(params, 1, RngStream(500, i)).counts[0]
                for i in range(3000)
            ],
            dtype=np.float64,
        )
        assert abs(firsts.mean() - 100.0) <= 4 * np.sqrt(100.0 / 3000)
        disp = firsts.var(ddof=1) / firsts.mean()
        assert 0.9 <= disp <= 1.1

    def test_overflow_cap(self):
        params = ModelParams(nu=500.0, kernel=(0.9,))
        with pytest.raises(Overflow) as exc:
            inar.simulate_path(params, 5000, RngStream(2), lam_cap=1e3)
        assert "step" in str(exc.value)

    def test_determinism_and_provenance(self, case1_params):
        a = inar.simulate_path(case1_params, 256, RngStream(42, 3))
        b = inar.simulate_path(case1_params, 256, RngStream(42, 3))
        c = inar.simulate_path(case1_params, 256, RngStream(42, 4))
        assert np.array_equal(a.counts, b.counts)
        assert not np.array_equal(a.counts, c.counts)
        assert a.seed == 42 and a.stream_id == 3
        assert a.params_digest == case1_params.digest()
        assert len(a) == 256

    def test_bad_horizon(self, case1_params):
        with pytest.raises(ValueError):
            inar.simulate_path(case1_params, 0, RngStream(1))

    def test_nonstationary_rejected(self):
        with pytest.raises(NonStationaryKernel):
            inar.simulate_path(ModelParams(nu=1.0, kernel=(1.0,)), 10, RngStream(1))
        with pytest.raises(NonStationaryKernel):
            inar.simulate_path(ModelParams(nu=1.0, kernel=(-0.2,)), 10, RngStream(1))

    def test_intensity_matches_definition(self, case1_params):
        # lambda_n = nu + sum_{k<n} alpha_k X_{n-k}, checked by brute force
        path = inar.simulate_path(case1_params, 300, RngStream(8))
        kern = case1_params.kernel
        theta = inar.ThetaVector(mu=case1_params.nu, betas=kern)
        phi = inar.intensity_series(path, theta)
        x = path.counts_float()
        for n in range(1, 301):
            lam = case1_params.nu
            for k, a in enumerate(kern, start=1):
                if k <= n - 1:
                    lam += a * x[n - 1 - k]
            assert abs(phi[n - 1] - lam) <= 1e-10 * max(1.0, lam)


class TestCountPath:
    def test_validation(self):
        with pytest.raises(ValueError):
            CountPath(counts=np.array([], dtype=np.int64))
        with pytest.raises(ValueError):
            CountPath(counts=np.array([1, -2, 3]))

    def test_counts_read_only(self):
        path = CountPath(counts=np.array([1, 2, 3]))
        assert not path.counts.flags.writeable
        assert path.counts.dtype == np.int64

    def test_csv_roundtrip_file_object(self):
        path = CountPath(counts=np.array([5, 0, 12, 3]), seed=9, stream_id=1)
        buf = io.StringIO()
        inar.write_path_csv(path, buf)
        text = buf.getvalue()
        assert text.splitlines()[0] == "n,x"
        back = inar.read_path_csv(io.StringIO(text))
        assert np.array_equal(back.counts, path.counts)

    def test_csv_roundtrip_disk(self, tmp_path, case1_params):
        src = inar.simulate_path(case1_params, 128, RngStream(4))
        fname = tmp_path / "path.csv"
        inar.write_path_csv(src, fname)
        back = inar.read_path_csv(fname)
        assert np.array_equal(back.counts, src.counts)

    def test_csv_rejects_bad_header(self):
        with pytest.raises(ValueError):
            inar.read_path_csv(io.StringIO("a,b\n1,2\n"))
