import numpy as np
import pytest

from refimpl import top_right_singular
from rsthp.channel import draw_error, draw_estimate
from rsthp.multibranch import pattern
from rsthp.rates import (
    SinrReport,
    average_rates,
    common_precoder,
    instantaneous_rates,
    optimize_delta,
    sinr_common,
    sinr_private,
)
from rsthp.thp import build_thp_filters, compute_beta


class TestCommonPrecoder:
    def test_zero_delta_zero_vector(self):
        split = common_precoder(np.eye(3), 0.0, 100.0)
        assert np.all(split.p_c == 0)
        assert split.pc_norm2 == 0.0

    def test_axis_aligned(self):
        H = np.zeros((2, 4))
        H[0, 0], H[1, 1] = 5.0, 1.0
        split = common_precoder(H, 0.25, 100.0)
        assert split.pc_norm2 == pytest.approx(25.0, rel=1e-10)
        assert np.abs(split.p_c[0]) == pytest.approx(5.0, rel=1e-10)
        assert np.abs(split.p_c[1:]).max() < 1e-8

    def test_norm_against_svd_oracle(self):
        rng = np.random.default_rng(0)
        H = draw_estimate(3, 6, rng)
        delta, etr = 0.4, 64.0
        split = common_precoder(H, delta, etr)
        sigma_ref, _ = top_right_singular(H)
        assert np.linalg.norm(H @ split.p_c) == pytest.approx(
            sigma_ref * np.sqrt(delta * etr), abs=1e-8
        )

    def test_rejects_bad_delta(self):
        with pytest.raises(ValueError):
            common_precoder(np.eye(2), 1.0, 10.0)


class TestClosedFormSinr:
    def _setup(self, scheme, K=3, delta=0.2, sigma_e2=0.05, seed=1, etr=30.0):
        rng = np.random.default_rng(seed)
        H = draw_estimate(K, K + 2, rng)
        E = draw_error(K, K + 2, sigma_e2, rng)
        filters = build_thp_filters(H, scheme)
        split = common_precoder(H, delta, etr, 1.0)
        compute_beta(filters, etr, split.pc_norm2)
        return H, E, filters, split

    def test_zero_delta_zero_common(self):
        H, E, filters, split = self._setup("dthp", delta=0.0)
        assert np.all(sinr_common(filters, split, H, E) == 0)

    def test_perfect_csit_dthp_common(self):
        H, _, filters, split = self._setup("dthp", sigma_e2=0.0)
        gc = sinr_common(filters, split, H, np.zeros_like(H))
        num = np.abs(H @ split.p_c) ** 2
        expected = num / (filters.beta**2 * filters.lhat_diag**2 + 1.0)
        assert np.allclose(gc, expected, rtol=1e-12)

    def test_perfect_csit_dthp_private_analytic(self):
        H, _, filters, split = self._setup("dthp", delta=0.0, sigma_e2=0.0, etr=30.0)
        gp = sinr_private(filters, split, H, np.zeros_like(H))
        assert np.allclose(gp, 30.0 * filters.lhat_diag**2 / 3.0, rtol=1e-12)

    def test_perfect_csit_cthp_private_equal(self):
        H, _, filters, split = self._setup("cthp", delta=0.0, sigma_e2=0.0, etr=30.0)
        gp = sinr_private(filters, split, H, np.zeros_like(H))
        expected = 30.0 / np.sum(1.0 / filters.lhat_diag**2)
        assert np.allclose(gp, expected, rtol=1e-12)
        assert gp.max() - gp.min() < 1e-12 * gp.max()

    @pytest.mark.parametrize("scheme", ["dthp", "cthp"])
    def test_monotone_in_delta(self, scheme):
        rng = np.random.default_rng(5)
        K, etr = 3, 25.0
        H = draw_estimate(K, K, rng)
        E = draw_error(K, K, 0.08, rng)
        filters = build_thp_filters(H, scheme)
        grid = np.linspace(0.0, 0.9, 10)
        prev_c = np.full(K, -np.inf)
        prev_p = np.full(K, np.inf)
        for delta in grid:
            split = common_precoder(H, float(delta), etr, 1.0)
            compute_beta(filters, etr, split.pc_norm2)
            gc = sinr_common(filters, split, H, E)
            gp = sinr_private(filters, split, H, E)
            assert np.all(gc >= prev_c - 1e-12)
            assert np.all(gp <= prev_p + 1e-12)
            prev_c, prev_p = gc, gp


class TestInstantaneousRates:
    def test_reference_points(self):
        rep = SinrReport(gamma_c=np.array([0.0, 1.0, 3.0]), gamma_p=np.array([3.0, 1.0, 0.0]))
        rc, rk = instantaneous_rates(rep)
        assert np.allclose(rc, [0.0, 1.0, 2.0], atol=1e-14)
        assert np.allclose(rk, [2.0, 1.0, 0.0], atol=1e-14)


class TestAverageRates:
    def test_perfect_csit_any_n_err(self):
        rng = np.random.default_rng(2)
        H = draw_estimate(3, 3, rng)
        branch = pattern(1, 3)
        r1 = average_rates(H, branch, 0.3, 1, 0.0, "dthp", np.random.default_rng(0), 20.0, 1.0)
        r9 = average_rates(H, branch, 0.3, 9, 0.0, "dthp", np.random.default_rng(1), 20.0, 1.0)
        assert np.allclose(r1.rc_bar, r9.rc_bar, rtol=1e-12)
        assert r1.rp_bar == pytest.approx(r9.rp_bar, rel=1e-12)

    def test_single_draw_equals_instantaneous(self):
        rng = np.random.default_rng(3)
        H = draw_estimate(3, 4, rng)
        branch = pattern(2, 3)
        sigma_e2, etr = 0.05, 15.0
        rep = average_rates(H, branch, 0.2, 1, sigma_e2, "cthp", np.random.default_rng(7), etr, 1.0)

        err = draw_error(3, 4, sigma_e2, np.random.default_rng(7), n=1)[0]
        perm = np.asarray(branch.perm)
        Hp, Ep = H[perm], err[perm]
        filters = build_thp_filters(Hp, "cthp")
        split = common_precoder(Hp, 0.2, etr, 1.0)
        compute_beta(filters, etr, split.pc_norm2)
        rc, rk = instantaneous_rates(
            SinrReport(
                gamma_c=sinr_common(filters, split, Hp, Ep),
                gamma_p=sinr_private(filters, split, Hp, Ep),
            )
        )
        rc_orig = np.empty(3)
        rc_orig[perm] = rc
        assert np.allclose(rep.rc_bar, rc_orig, rtol=1e-12)
        assert rep.rp_bar == pytest.approx(rk.sum(), rel=1e-12)

    def test_objective_uses_min_not_mean(self):
        # Estimate with very unequal row norms gives asymmetric common rates.
        H = np.diag([3.0, 0.3]).astype(complex)
        rep = average_rates(H, pattern(1, 2), 0.4, 4, 0.0, "dthp", np.random.default_rng(0), 10.0, 1.0)
        assert rep.rc_bar.max() - rep.rc_bar.min() > 0.1
        assert rep.objective == pytest.approx(rep.rc_bar.min() + rep.rp_bar, rel=1e-12)
        assert rep.objective < rep.rc_bar.mean() + rep.rp_bar

    def test_error_averaging_shrinks_stderr(self):
        # Doubling the error draws should shrink the objective spread by
        # about 1/sqrt(2) across repetitions.
        rng = np.random.default_rng(4)
        H = draw_estimate(3, 3, rng)
        branch = pattern(1, 3)
        obj_small, obj_big = [], []
        for rep_i in range(50):
            r_small = average_rates(
                H, branch, 0.2, 25, 0.1, "dthp", np.random.default_rng(100 + rep_i), 20.0, 1.0
            )
            r_big = average_rates(
                H, branch, 0.2, 50, 0.1, "dthp", np.random.default_rng(500 + rep_i), 20.0, 1.0
            )
            obj_small.append(r_small.objective)
            obj_big.append(r_big.objective)
        ratio = np.std(obj_big) / np.std(obj_small)
        assert 0.45 < ratio < 1.05  # target 1/sqrt(2) ~ 0.707, wide MC band

    def test_rates_nonnegative_and_bounded(self):
        rng = np.random.default_rng(6)
        H = draw_estimate(4, 4, rng)
        rep = average_rates(H, pattern(1, 4), 0.3, 8, 0.06, "cthp", rng, 100.0, 1.0)
        assert np.all(rep.rc_bar >= 0) and rep.rp_bar >= 0
        bound = rep.rc_bar.mean() + rep.rp_bar + rep.rc_bar.max()
        assert rep.objective <= bound + 1e-12


class TestOptimizeDelta:
    def test_singleton(self):
        assert optimize_delta(lambda d: 1.0, [0.0]) == (0.0, 1.0)

    def test_constant_tie_breaks_small(self):
        d, _ = optimize_delta(lambda d: 5.0, [0.4, 0.0, 0.2])
        assert d == 0.0

    def test_concave_synthetic(self):
        grid = [round(0.1 * i, 1) for i in range(10)]
        d, obj = optimize_delta(lambda d: d * (1 - d), grid)
        assert d == 0.5
        assert obj == pytest.approx(0.25, rel=1e-12)

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            optimize_delta(lambda d: d, [])
