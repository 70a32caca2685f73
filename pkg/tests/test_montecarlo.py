"""Replication harness: seeding, aggregation, capping, failures, diagnostics."""

import numpy as np
import pytest

import inar
from inar import (
    AllReplicationsFailed,
    DimensionMismatch,
    McConfig,
    ModelParams,
    RngStream,
    SampleSizeOutOfRange,
    SingularDesign,
)


def small_config(params, T=150, p=3, n=12, seed=7, **kw):
    return McConfig(
        params=params, T=T, p=p, n_experiments=n, base_seed=seed, **kw
    )


class TestSeeding:
    def test_single_rep_equals_direct_pipeline(self, case1_params):
        cfg = small_config(case1_params, n=1, seed=101)
        summary = inar.run_experiment(cfg)
        path = inar.simulate_path(case1_params, cfg.T, RngStream(101, 1), lam_cap=cfg.lam_cap)
        theta = inar.solve_cls(inar.build_design(path, cfg.p))
        assert np.array_equal(summary.per_component_samples[0], theta.to_array())
        assert summary.rep_ids.tolist() == [1]

    def test_row_i_is_stream_i(self, case1_params):
        cfg = small_config(case1_params, n=5, seed=202)
        summary = inar.run_experiment(cfg)
        path = inar.simulate_path(case1_params, cfg.T, RngStream(202, 3), lam_cap=cfg.lam_cap)
        theta = inar.solve_cls(inar.build_design(path, cfg.p))
        assert np.array_equal(summary.per_component_samples[2], theta.to_array())

    def test_base_seed_matters(self, case1_params):
        a = inar.run_experiment(small_config(case1_params, seed=1))
        b = inar.run_experiment(small_config(case1_params, seed=2))
        assert not np.array_equal(a.per_component_samples, b.per_component_samples)

    def test_threads_do_not_change_results(self, case1_params):
        cfg = small_config(case1_params, n=64, T=120)
        one = inar.run_experiment(cfg, threads=1)
        four = inar.run_experiment(cfg, threads=4)
        assert np.array_equal(one.per_component_samples, four.per_component_samples)
        assert one.mse == four.mse
        assert np.array_equal(one.mean_theta, four.mean_theta)
        assert np.array_equal(one.rep_ids, four.rep_ids)


class TestSummarize:
    def test_exact_estimates(self):
        truth = np.array([100.0, 0.25])
        est = np.tile(truth, (6, 1))
        s = inar.summarize(est, truth)
        assert s.mse == 0.0
        assert s.rel_err_theta == 0.0 and s.rel_err_alpha == 0.0
        assert np.array_equal(s.mean_theta, truth)

    def test_symmetric_pair(self):
        # estimates s +/- e average back to s; MSE is ||e||^2
        s0 = np.array([100.0, 0.25])
        e = np.array([1.0, 0.125])
        est = np.stack([s0 + e, s0 - e])
        s = inar.summarize(est, s0)
        assert np.array_equal(s.mean_theta, s0)
        assert s.mse == float(e @ e)
        assert s.rel_err_theta == 0.0

    def test_capping_applies_to_mse_only(self):
        est = np.array([[100.0, -0.01]])
        truth = np.array([100.0, 0.0])
        s = inar.summarize(est, truth, cap_negatives=True)
        assert s.mse == 0.0
        assert s.mean_theta[1] == -0.01
        assert np.array_equal(s.per_component_samples, est)

    def test_capping_disabled(self):
        est = np.array([[100.0, -0.01]])
        truth = np.array([100.0, 0.0])
        s = inar.summarize(est, truth, cap_negatives=False)
        assert s.mse == pytest.approx(0.0001)

    def test_mu_never_capped(self):
        est = np.array([[-5.0, 0.1]])
        truth = np.array([0.0, 0.1])
        s = inar.summarize(est, truth)
        assert s.mse == pytest.approx(25.0)

    def test_rel_err_guards(self):
        est = np.array([[2.0, 0.0]])
        truth = np.array([0.0, 0.0])
        s = inar.summarize(est, truth)
        assert s.rel_err_theta == np.inf
        assert s.rel_err_alpha == 0.0

    def test_shape_checks(self):
        with pytest.raises(DimensionMismatch):
            inar.summarize(np.zeros((3,)), np.zeros(3))
        with pytest.raises(DimensionMismatch):
            inar.summarize(np.zeros((3, 2)), np.zeros(3))


class TestFailureHandling:
    def test_all_replications_failed(self):
        # nu=0 paths are identically zero, so every design is singular
        cfg = McConfig(
            params=ModelParams(nu=0.0), T=60, p=1, n_experiments=4, base_seed=3
        )
        with pytest.raises(AllReplicationsFailed):
            inar.run_experiment(cfg)

    def test_partial_failures_counted(self, case1_params, monkeypatch):
        real = inar.montecarlo.solve_cls
        calls = {"n": 0}

        def flaky(system):
            calls["n"] += 1
            if calls["n"] == 2:
                raise SingularDesign("forced")
            return real(system)

        monkeypatch.setattr(inar.montecarlo, "solve_cls", flaky)
        cfg = small_config(case1_params, n=6, seed=11)
        summary = inar.run_experiment(cfg, threads=1)
        assert summary.failures == 1
        assert summary.n_success == 5
        assert summary.rep_ids.tolist() == [1, 3, 4, 5, 6]
        assert summary.per_component_samples.shape == (5, cfg.p + 1)


class TestTruthVector:
    def test_case1_padding(self, case1_params):
        truth = inar.truth_vector(case1_params, 10)
        assert truth[0] == 100.0
        assert np.allclose(truth[1:], 0.25 ** np.arange(1, 11), rtol=1e-12)

    def test_case2_padding(self, case2_params):
        truth = inar.truth_vector(case2_params, 3)
        assert truth.tolist() == [100.0, 0.8, 0.0, 0.0]

    def test_truncation(self, case1_params):
        truth = inar.truth_vector(case1_params, 2)
        assert truth.tolist() == [100.0, 0.25, 0.0625]


@pytest.fixture(scope="module")
def summary(case1_params):
    cfg = McConfig(params=case1_params, T=400, p=3, n_experiments=120, base_seed=5)
    return inar.run_experiment(cfg, threads=4)


class TestNormalitySuite:
    def test_default_components(self, summary):
        diags = inar.normality_suite(summary)
        assert [d.label for d in diags] == ["mu_hat", "beta_1", "beta_2"]
        for d in diags:
            assert d.report.sample_size == 120
            assert 0.0 <= d.report.jb_p <= 1.0
            assert 0.0 <= d.report.sw_p <= 1.0
            assert 0.0 < d.report.sw_stat <= 1.0
            assert d.qq_z.shape == (120,) and d.qq_value.shape == (120,)
            assert d.hist_count.sum() == 120
            assert len(d.hist_left) == 30

    def test_component_selection(self, summary):
        diags = inar.normality_suite(summary, components=(3,))
        assert [d.label for d in diags] == ["beta_3"]
        with pytest.raises(DimensionMismatch):
            inar.normality_suite(summary, components=(4,))

    def test_small_run_rejected(self, case1_params):
        cfg = small_config(case1_params, n=5)
        summary = inar.run_experiment(cfg)
        with pytest.raises(SampleSizeOutOfRange):
            inar.normality_suite(summary)


class TestConfigValidation:
    def test_bad_values(self, case1_params):
        with pytest.raises(ValueError):
            McConfig(params=case1_params, T=0, p=0, n_experiments=1, base_seed=1)
        with pytest.raises(ValueError):
            McConfig(params=case1_params, T=10, p=10, n_experiments=1, base_seed=1)
        with pytest.raises(ValueError):
            McConfig(params=case1_params, T=10, p=1, n_experiments=0, base_seed=1)

    def test_seed_wraps_like_rng_stream(self, case1_params):
        # any int is a valid seed; negatives wrap to their 64-bit complement
        neg = inar.run_experiment(small_config(case1_params, n=3, seed=-1))
        wrap = inar.run_experiment(small_config(case1_params, n=3, seed=2 ** 64 - 1))
        assert np.array_equal(neg.per_component_samples, wrap.per_component_samples)

    def test_component_labels(self):
        assert inar.component_label(0) == "mu_hat"
        assert inar.component_label(3) == "beta_3"
