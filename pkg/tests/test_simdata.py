"""Synthetic generators: distribution checks and determinism."""

import numpy as np
import pytest
from scipy import stats

from bucketed_topk.simdata import (
    _normal_rows,
    ar1_batch,
    ar1_sequence,
    derive_seed,
    iid_normal,
    permute,
)


class TestIidNormal:
    def test_moments_at_scale(self):
        x = iid_normal(1024, 1024, seed=0)  # 2**20 draws
        # CLT: sd of the mean is 2**-10, so 0.01 is ~10 sigma
        assert abs(x.mean()) < 0.01
        assert abs(x.var() - 1.0) < 0.02

    def test_same_seed_identical(self):
        assert np.array_equal(iid_normal(7, 33, seed=5), iid_normal(7, 33, seed=5))

    def test_different_seeds_differ(self):
        assert not np.array_equal(iid_normal(4, 16, seed=1), iid_normal(4, 16, seed=2))

    def test_rows_are_substreams(self):
        # generating in blocks of any size gives the same matrix
        whole = iid_normal(9, 21, seed=3)
        parts = np.vstack([_normal_rows(3, 0, 4, 21), _normal_rows(3, 4, 5, 21)])
        assert np.array_equal(whole, parts)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            iid_normal(0, 5)
        with pytest.raises(ValueError):
            iid_normal(5, 5, seed=-1)
        with pytest.raises(ValueError):
            iid_normal(5, 5, seed=2**64)


class TestAr1:
    def test_rho_zero_is_iid(self):
        # the recursion with rho=0 passes the driving noise through
        assert np.array_equal(ar1_batch(3, 50, 0.0, seed=1), iid_normal(3, 50, seed=1))

    def test_rho_zero_lag1_near_zero(self):
        x = ar1_sequence(2**16, 0.0, seed=2)
        r = np.corrcoef(x[:-1], x[1:])[0, 1]
        assert abs(r) < 0.05

    def test_lag1_autocorrelation_tracks_rho(self):
        x = ar1_sequence(2**16, 0.9, seed=3)
        r = np.corrcoef(x[:-1], x[1:])[0, 1]
        assert abs(r - 0.9) < 0.05

    def test_covariance_decays_geometrically(self):
        rho = 0.8
        x = ar1_batch(4000, 64, rho, seed=4)
        for lag in (1, 2, 5):
            emp = np.mean(x[:, :-lag] * x[:, lag:])
            assert emp == pytest.approx(rho**lag, abs=0.03)

    def test_marginal_variance_is_stationary_at_high_rho(self):
        # 1000 replicates at rho=0.99: per-position variance estimates
        # have sd ~ sqrt(2/1000) = 0.045, so test the position-averaged
        # variance tightly and each position loosely
        x = ar1_batch(1000, 256, 0.99, seed=5)
        per_position = x.var(axis=0, ddof=1)
        assert abs(per_position.mean() - 1.0) < 0.05
        assert np.all(np.abs(per_position - 1.0) < 0.25)

    def test_two_sample_agreement_with_iid_at_rho_zero(self):
        a = ar1_batch(10, 10_000, 0.0, seed=6).ravel()
        b = iid_normal(10, 10_000, seed=7).ravel()
        ks = stats.ks_2samp(a, b)
        assert ks.pvalue > 0.01

    def test_rho_domain(self):
        with pytest.raises(ValueError):
            ar1_sequence(10, 1.0)
        with pytest.raises(ValueError):
            ar1_sequence(10, -0.1)

    def test_deterministic(self):
        assert np.array_equal(ar1_sequence(100, 0.5, seed=8), ar1_sequence(100, 0.5, seed=8))


class TestPermute:
    def test_multiset_preserved(self):
        v = np.arange(100.0)
        p = permute(v, seed=0)
        assert sorted(p.tolist()) == v.tolist()
        assert not np.array_equal(p, v)  # identity has probability 1/100!

    def test_length_one_unchanged(self):
        assert permute(np.array([42.0]), seed=1).tolist() == [42.0]

    def test_deterministic(self):
        v = np.arange(50)
        assert np.array_equal(permute(v, seed=2), permute(v, seed=2))

    def test_rows_give_independent_shuffles(self):
        v = np.arange(50)
        a = permute(v, seed=3, row=0)
        b = permute(v, seed=3, row=1)
        assert not np.array_equal(a, b)

    def test_bijection_on_indices(self):
        idx = permute(np.arange(257), seed=4)
        assert np.array_equal(np.sort(idx), np.arange(257))


class TestDeriveSeed:
    def test_in_range_and_distinct(self):
        seeds = {derive_seed(0, i) for i in range(1000)}
        assert len(seeds) == 1000
        assert all(0 <= s < 2**64 for s in seeds)

    def test_depends_on_base_seed(self):
        assert derive_seed(1, 0) != derive_seed(2, 0)
