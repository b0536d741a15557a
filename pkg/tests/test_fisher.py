"""Fisher information routes, covariance bounds, Wishart error bars."""

import math

import numpy as np
import pytest

from snspec.errors import NumericalError
from snspec.fisher import (
    error_propagation_covariance,
    fisher_discrete,
    fisher_integral,
    invert_psd_matrix,
    normalized_deviation,
    wishart_std,
)
from snspec.model import SpectralParams
from snspec.synthesis import AcquisitionConfig

V = SpectralParams(s_ph=1.0, nu_l=42600.0, s_at=4.0, delta_nu=1000.0)
CFG = AcquisitionConfig(
    delta=5e-6, t_total=0.5, fit_lo=33e3, fit_hi=52e3, n_ave=1, n_bin=50
)
WINDOW = (33e3, 52e3)


def window_bins(cfg=CFG):
    g = cfg.coarse_grid()
    return g[(g >= cfg.fit_lo) & (g <= cfg.fit_hi)]


def norm_diff(a, b):
    d = np.sqrt(np.outer(np.diag(b), np.diag(b)))
    return np.max(np.abs(a - b) / d)


class TestDiscreteRoute:
    def test_background_only_information(self):
        # with s_at = 0 only the background responds: I_11 = (n_eff+2) K / s_ph^2
        flat = SpectralParams(s_ph=2.0, nu_l=42600.0, s_at=0.0, delta_nu=500.0)
        bins = window_bins()
        r = fisher_discrete(flat, bins, 50)
        assert r.info[0, 0] == pytest.approx(52 * bins.size / 4.0, rel=1e-12)
        # center and width carry no information at all; the matrix is singular
        assert r.rank == 2
        assert r.gamma_th is None

    def test_averaging_count_enters_linearly(self):
        bins = window_bins()
        a = fisher_discrete(V, bins, 50)
        b = fisher_discrete(V, bins, 98)
        np.testing.assert_allclose(b.info, (98 + 2) / (50 + 2) * a.info, rtol=1e-14)

    def test_amplitude_scaling(self):
        # s_ph, s_at -> c * both leaves log-gradients of nu_l, delta_nu alone
        # and divides the amplitude gradients by c
        c = 7.5
        scaled = SpectralParams(
            s_ph=c * V.s_ph, nu_l=V.nu_l, s_at=c * V.s_at, delta_nu=V.delta_nu
        )
        bins = window_bins()
        a = fisher_discrete(V, bins, 50).info
        b = fisher_discrete(scaled, bins, 50).info
        p = np.array([1.0, 0.0, 1.0, 0.0])
        factor = c ** (p[:, None] + p[None, :])
        # off-diagonal sums cancel, so compare on the diagonal scale
        assert norm_diff(b * factor, a) < 1e-12

    def test_covariance_inverts_information(self):
        r = fisher_discrete(V, window_bins(), 50)
        assert r.rank == 4
        assert np.max(np.abs(r.gamma_th @ r.info - np.eye(4))) < 1e-8
        w = np.linalg.eigvalsh(r.gamma_th)
        assert np.all(w > 0)

    def test_rejects_empty_bins_and_bad_counts(self):
        with pytest.raises(ValueError):
            fisher_discrete(V, np.array([]), 50)
        with pytest.raises(ValueError):
            fisher_discrete(V, window_bins(), 0.5)


class TestIntegralRoute:
    def test_agrees_with_discrete_sum(self):
        # spacing of 100 Hz against delta_nu = 1 kHz: the Riemann sum is
        # already far inside the 0.5% band (measured 1e-6)
        fd = fisher_discrete(V, window_bins(), 50)
        fi = fisher_integral(V, WINDOW, CFG.coarse_spacing, 50)
        assert norm_diff(fd.info, fi.info) < 0.005

    def test_scales_inversely_with_grid_spacing(self):
        a = fisher_integral(V, WINDOW, 100.0, 50)
        b = fisher_integral(V, WINDOW, 20.0, 50)
        np.testing.assert_allclose(b.info, 5.0 * a.info, rtol=1e-12)

    def test_result_metadata(self):
        r = fisher_integral(V, WINDOW, 100.0, 50)
        assert r.method == "integral"
        assert r.window == WINDOW
        assert r.nu_t == 100.0
        assert r.n_eff == 50.0

    def test_rejects_bad_window_and_spacing(self):
        with pytest.raises(ValueError):
            fisher_integral(V, (5e4, 3e4), 100.0, 50)
        with pytest.raises(ValueError):
            fisher_integral(V, WINDOW, 0.0, 50)
        with pytest.raises(ValueError):
            fisher_integral(V, WINDOW, 100.0, 0)


def test_bin_width_invariance_of_underlying_information():
    # the same record coarse-grained differently carries the same information:
    # info * nu_t / (n_eff + 2) is the invariant
    cfg25 = AcquisitionConfig(
        delta=5e-6, t_total=0.5, fit_lo=33e3, fit_hi=52e3, n_bin=25
    )
    a = fisher_discrete(V, window_bins(CFG), CFG.n_eff)
    b = fisher_discrete(V, window_bins(cfg25), cfg25.n_eff)
    inv_a = a.info * a.nu_t / (a.n_eff + 2)
    inv_b = b.info * b.nu_t / (b.n_eff + 2)
    assert norm_diff(inv_a, inv_b) < 0.01


class TestTwoPathIdentity:
    def test_matches_crb_after_count_correction(self):
        bins = window_bins()
        crb = fisher_discrete(V, bins, 50).gamma_th
        ep = error_propagation_covariance(V, bins, 50)
        assert norm_diff(ep * 50.0 / 52.0, crb) < 1e-10

    def test_holds_across_parameter_space(self):
        rng = np.random.default_rng(2026)
        bins = window_bins()
        for _ in range(10):
            v = SpectralParams(
                s_ph=float(rng.uniform(0.1, 10.0)),
                nu_l=float(rng.uniform(38e3, 47e3)),
                s_at=float(rng.uniform(0.5, 50.0)),
                delta_nu=float(rng.uniform(300.0, 4000.0)),
            )
            n_eff = int(rng.integers(2, 400))
            crb = fisher_discrete(v, bins, n_eff).gamma_th
            ep = error_propagation_covariance(v, bins, n_eff)
            assert norm_diff(ep * n_eff / (n_eff + 2.0), crb) < 1e-10

    def test_error_propagation_rejects_singular_design(self):
        flat = SpectralParams(s_ph=1.0, nu_l=42600.0, s_at=0.0, delta_nu=500.0)
        with pytest.raises(NumericalError):
            error_propagation_covariance(flat, window_bins(), 50)


class TestInvertPsdMatrix:
    def test_identity(self):
        inv, rank = invert_psd_matrix(np.eye(3))
        assert rank == 3
        np.testing.assert_allclose(inv, np.eye(3), atol=1e-14)

    def test_badly_scaled_but_regular(self):
        # units spanning 12 decades must not masquerade as rank deficiency
        d = np.array([1e-6, 1.0, 1e6])
        a = np.outer(d, d) * np.array(
            [[2.0, 0.5, 0.1], [0.5, 3.0, 0.2], [0.1, 0.2, 4.0]]
        )
        inv, rank = invert_psd_matrix(a)
        assert rank == 3
        # backward-error residual: elementwise against the attainable scale
        resid = np.abs(inv @ a - np.eye(3))
        assert np.all(resid <= 1e-12 * (np.abs(inv) @ np.abs(a)) + 1e-12)

    def test_rank_deficient_reports_rank(self):
        x = np.array([1.0, 2.0, 3.0])
        inv, rank = invert_psd_matrix(np.outer(x, x))
        assert inv is None
        assert rank == 1

    def test_zero_diagonal_short_circuit(self):
        a = np.diag([1.0, 0.0, 2.0])
        inv, rank = invert_psd_matrix(a)
        assert inv is None
        assert rank == 2


class TestWishartStd:
    def test_diagonal_rule(self):
        g = np.diag([4.0, 9.0])
        w = wishart_std(g, 50)
        assert w[0, 0] == pytest.approx(4.0 * math.sqrt(2.0 / 50), rel=1e-14)
        assert w[1, 1] == pytest.approx(9.0 * math.sqrt(2.0 / 50), rel=1e-14)
        # independent pair: var = gamma_ii gamma_jj / N
        assert w[0, 1] == pytest.approx(6.0 / math.sqrt(50), rel=1e-14)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(wishart_std(np.zeros((3, 3)), 10), 0.0)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            wishart_std(np.ones((2, 3)), 10)
        with pytest.raises(ValueError):
            wishart_std(np.eye(2), 1)

    def test_predicts_sample_covariance_scatter(self):
        # 100 repetitions of a 100-sample covariance: the normalized
        # deviation should behave like a z-score
        from snspec.estimation import sample_covariance

        gamma = np.array(
            [
                [2.0, 0.3, 0.0, 0.1],
                [0.3, 5.0, -1.0, 0.4],
                [0.0, -1.0, 3.0, 0.2],
                [0.1, 0.4, 0.2, 8.0],
            ]
        )
        rng = np.random.default_rng(1234)
        n_ok = 0
        for _ in range(100):
            draws = rng.multivariate_normal(np.zeros(4), gamma, size=100)
            sc = sample_covariance(draws)
            if np.max(normalized_deviation(sc.gamma, gamma, 100)) <= 4.0:
                n_ok += 1
        assert n_ok >= 95


class TestNormalizedDeviation:
    def test_equal_matrices_give_zero(self):
        g = np.diag([1.0, 2.0])
        np.testing.assert_array_equal(normalized_deviation(g, g, 10), 0.0)

    def test_single_element_hand_value(self):
        gt = np.array([[4.0]])
        ge = np.array([[4.0 + 3 * 4.0 * math.sqrt(2.0 / 50)]])
        dev = normalized_deviation(ge, gt, 50)
        assert dev[0, 0] == pytest.approx(3.0, rel=1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            normalized_deviation(np.eye(2), np.eye(3), 10)


class TestGoldenFixture:
    """Reference covariance triple frozen under tests/data."""

    @staticmethod
    def ulp(q):
        # one unit of the last place of a 2-significant-figure quote
        return 10.0 ** (math.floor(math.log10(abs(q))) - 1)

    def test_sigma_matches_wishart_law(self, gamma_th, sigma_th):
        w = wishart_std(gamma_th, 100)
        for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (0, 3), (1, 2), (2, 3)]:
            assert abs(w[i, j] - sigma_th[i, j]) <= self.ulp(sigma_th[i, j]), (i, j)

    def test_excluded_elements_are_off_by_factor_100(self, gamma_th, sigma_th):
        # the two excluded entries of the quoted table are misprints by
        # exactly two decades, one in each direction
        w = wishart_std(gamma_th, 100)
        assert sigma_th[0, 2] == pytest.approx(w[0, 2] / 100, rel=0.05)
        assert sigma_th[1, 3] == pytest.approx(w[1, 3] * 100, rel=0.05)

    def test_deviation_band_with_quoted_sigma(self, gamma_exp, gamma_th, sigma_th):
        dev = np.abs(gamma_th - gamma_exp) / sigma_th
        assert 1.0 <= dev.max() <= 2.6

    def test_deviation_band_with_computed_sigma(self, gamma_exp, gamma_th):
        dev = normalized_deviation(gamma_exp, gamma_th, 100)
        keep = np.ones((4, 4), dtype=bool)
        for i, j in [(0, 2), (1, 3)]:
            keep[i, j] = keep[j, i] = False
        assert 1.0 <= dev[keep].max() <= 2.6
