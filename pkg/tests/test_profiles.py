"""Shipped reference profile: calibration-level consistency checks."""

import numpy as np
import pytest

from snspec.fisher import fisher_integral
from snspec.model import params_from_conditions
from snspec.profiles import (
    PROFILES,
    REFERENCE_ACQUISITION,
    REFERENCE_CONDITIONS,
    REFERENCE_INSTRUMENT,
    SCAN_N_RANGE_CM3,
    SCAN_P_RANGE_W,
    default_scan_axes,
)


def test_registry_exposes_reference():
    assert PROFILES["reference"] is REFERENCE_INSTRUMENT


def test_acquisition_geometry():
    cfg = REFERENCE_ACQUISITION
    assert cfg.nu_t == 2.0
    assert cfg.coarse_spacing == 100.0
    assert cfg.n_eff == 50
    assert (cfg.fit_lo, cfg.fit_hi) == (33e3, 52e3)


def test_reference_conditions_frozen_spectrum():
    # frozen output of the shipped calibration; a drifted constant shows
    # up here before it reaches the slower scan checks
    v = params_from_conditions(REFERENCE_CONDITIONS, REFERENCE_INSTRUMENT)
    assert v.s_ph == pytest.approx(361.90010602409643, rel=1e-9)
    assert v.nu_l == 42600.0
    assert v.s_at == pytest.approx(894.1656948453656, rel=1e-9)
    assert v.delta_nu == pytest.approx(1792.89467193141, rel=1e-9)


def test_reference_point_covariance_scale(gamma_th):
    # the frozen covariance table under tests/data describes this same
    # operating point; the calibrated forward model must land on its
    # diagonal within the calibration slack
    v = params_from_conditions(REFERENCE_CONDITIONS, REFERENCE_INSTRUMENT)
    cfg = REFERENCE_ACQUISITION
    result = fisher_integral(v, (cfg.fit_lo, cfg.fit_hi), cfg.coarse_spacing, cfg.n_eff)
    np.testing.assert_allclose(np.diag(result.gamma_th), np.diag(gamma_th), rtol=0.10)


def test_scan_axes_cover_the_stated_ranges():
    n_values, p_values = default_scan_axes()
    assert (n_values[0], n_values[-1]) == SCAN_N_RANGE_CM3
    assert (p_values[0], p_values[-1]) == SCAN_P_RANGE_W
    assert n_values.size == 50 and p_values.size == 50
    assert np.all(np.diff(n_values) > 0) and np.all(np.diff(p_values) > 0)
