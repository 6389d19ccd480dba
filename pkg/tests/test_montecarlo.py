import numpy as np
import pytest

from conftest import F_IID4

from gaussmax.closedform import f_max
from gaussmax.corrmat import CorrelationMatrix4
from gaussmax.montecarlo import (
    estimate_max,
    estimate_order_stats,
    sample_factor,
    thread_count,
)


class TestSampleFactor:
    def test_identity(self):
        l = sample_factor(CorrelationMatrix4.identity())
        assert np.allclose(l @ l.T, np.eye(4), atol=1e-14)

    def test_rank3_boundary(self):
        m = CorrelationMatrix4.equicorrelated(-1.0 / 3.0)
        l = sample_factor(m)
        assert np.max(np.abs(l @ l.T - m.matrix())) <= 1e-10
        assert np.linalg.matrix_rank(l, tol=1e-8) == 3

    def test_rank1_all_ones(self):
        m = CorrelationMatrix4.equicorrelated(1.0)
        l = sample_factor(m)
        assert np.max(np.abs(l @ l.T - m.matrix())) <= 1e-12
        assert np.linalg.matrix_rank(l, tol=1e-8) == 1

    def test_interior_battery(self, battery20):
        for m in battery20:
            l = sample_factor(m)
            assert np.max(np.abs(l @ l.T - m.matrix())) <= 1e-12

    def test_invalid_rejected(self):
        with pytest.raises(ValueError):
            sample_factor(CorrelationMatrix4.equicorrelated(-0.5))


class TestEstimateMax:
    def test_seed_determinism(self):
        m = CorrelationMatrix4.identity()
        a = estimate_max(m, 100_000, seed=42)
        b = estimate_max(m, 100_000, seed=42)
        assert (a.mean, a.std_error) == (b.mean, b.std_error)
        c = estimate_max(m, 100_000, seed=43)
        assert c.mean != a.mean

    def test_thread_count_does_not_change_results(self, monkeypatch):
        m = CorrelationMatrix4((0.2, -0.1, 0.3, 0.0, -0.2, 0.1))
        monkeypatch.setenv("GAUSSMAX_THREADS", "1")
        assert thread_count() == 1
        a = estimate_max(m, 200_000, seed=5, shards=8)
        monkeypatch.setenv("GAUSSMAX_THREADS", "4")
        b = estimate_max(m, 200_000, seed=5, shards=8)
        assert a.mean == b.mean and a.std_error == b.std_error

    def test_iid_value(self):
        est = estimate_max(CorrelationMatrix4.identity(), 2_000_000, seed=11)
        assert abs(est.mean - F_IID4) <= 4 * est.std_error

    def test_fully_correlated_mean_zero(self):
        est = estimate_max(CorrelationMatrix4.equicorrelated(1.0), 100_000, seed=3)
        assert abs(est.mean) <= 4 * est.std_error
        assert est.std_error == pytest.approx(1.0 / np.sqrt(est.n_samples), rel=0.05)

    def test_equicorrelated_optimum(self):
        m = CorrelationMatrix4.equicorrelated(-1.0 / 3.0)
        est = estimate_max(m, 2_000_000, seed=12)
        assert abs(est.mean - f_max(m)) <= 4 * est.std_error

    def test_argument_validation(self):
        m = CorrelationMatrix4.identity()
        with pytest.raises(ValueError):
            estimate_max(m, 100, seed=0)
        with pytest.raises(ValueError):
            estimate_max(m, 10_001, seed=0)
        with pytest.raises(ValueError):
            estimate_max(m, 100_000, seed=0, shards=0)


class TestOrderStats:
    def test_antithetic_symmetry_is_exact(self, battery20):
        os_ = estimate_order_stats(battery20[0], 50_000, seed=1)
        assert os_.e4 == -os_.e1
        assert os_.e3 == -os_.e2
        assert os_.e1 >= os_.e2 >= os_.e3 >= os_.e4

    def test_max_agrees_with_estimate_max(self):
        m = CorrelationMatrix4((0.2, -0.1, 0.3, 0.0, -0.2, 0.1))
        a = estimate_max(m, 100_000, seed=9)
        b = estimate_order_stats(m, 100_000, seed=9)
        assert b.e1 == pytest.approx(a.mean, rel=1e-12)

    def test_second_order_identity_identity_matrix(self):
        # e2 = -3 e1 + 6/sqrt(pi) for independent coordinates
        os_ = estimate_order_stats(CorrelationMatrix4.identity(), 2_000_000, seed=21)
        target = -3 * os_.e1 + 6.0 / np.sqrt(np.pi)
        assert abs(os_.e2 - target) <= 4 * os_.se_second_identity

    def test_third_order_identity_random(self, battery20):
        for m in battery20[:3]:
            os_ = estimate_order_stats(m, 1_000_000, seed=31)
            s = float(np.sum(np.sqrt(1.0 - m.array())))
            target = 3 * os_.e1 - s / np.sqrt(np.pi)
            assert abs(os_.e3 - target) <= 4 * os_.se_third_identity

    def test_fully_correlated_all_equal(self):
        os_ = estimate_order_stats(CorrelationMatrix4.equicorrelated(1.0), 50_000, seed=2)
        assert os_.e1 == pytest.approx(os_.e2, abs=1e-12)
        assert abs(os_.e1) <= 4 * os_.std_errors[0]

    def test_value_bounds(self, battery20):
        # lower/upper bounds on the expected maximum hold within MC error
        for m in battery20[:3]:
            os_ = estimate_order_stats(m, 1_000_000, seed=41)
            s = float(np.sum(np.sqrt(1.0 - m.array())))
            lo = s / (4 * np.sqrt(np.pi))
            hi = s / (3 * np.sqrt(np.pi))
            slack = 4 * os_.std_errors[0]
            assert lo - slack <= os_.e1 <= hi + slack

    def test_shard_split_determinism(self):
        m = CorrelationMatrix4.identity()
        a = estimate_order_stats(m, 100_000, seed=8, shards=4)
        b = estimate_order_stats(m, 100_000, seed=8, shards=4)
        assert a == b
