from __future__ import annotations

import numpy as np
import pytest

from tunneltime import absorbing as ab
from tunneltime import single_channel as sc
from tunneltime.core import AbsorbingBarrierSpec, BarrierSpec, OutOfRegime


def test_lambda_zero_reduces_to_real_barrier():
    for L in (0.5, 3.0, 9.0):
        real = BarrierSpec(1.0, L, 0.2)
        absorbing = AbsorbingBarrierSpec(1.0, 0.0, L, 0.2)
        assert ab.absorbing_transmission(absorbing) == pytest.approx(sc.closed_form_transmission(real), rel=1e-14)
        assert ab.absorbing_phase_time(absorbing) == pytest.approx(sc.phase_time(real), rel=1e-12)


def test_closed_form_matches_matching_solve():
    rng = np.random.default_rng(3)
    for _ in range(200):
        spec = AbsorbingBarrierSpec(1.0, rng.uniform(0, 0.3), rng.uniform(0, 15), rng.uniform(0.05, 0.9))
        a_t, _ = ab.absorbing_matching(spec)
        ref = ab.absorbing_transmission(spec)
        assert abs(a_t - ref) <= 1e-10 * abs(ref)


def test_absorption_removes_flux():
    spec = AbsorbingBarrierSpec(1.0, 0.05, 5.0, 0.2)
    absorbed = ab.absorbed_fraction(spec)
    assert 0 < absorbed < 1
    assert absorbed == pytest.approx(0.0487, abs=5e-4)


def test_first_order_q_error_is_quadratic_in_lambda():
    errs = []
    for lam in (0.04, 0.02, 0.01):
        spec = AbsorbingBarrierSpec(1.0, lam, 1.0, 0.2)
        errs.append(abs(ab.first_order_q(spec) - spec.q))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_exact_slope_against_closed_derivative():
    # dq/dE = -1/(2q), so -d/dE Im q = Im(1/(2q))
    q = AbsorbingBarrierSpec(1.0, 0.05, 1.0, 0.2).q
    assert ab.exact_slope(1.0, 0.05, 0.2) == pytest.approx((1 / (2 * q)).imag, rel=1e-8)


def test_first_order_slope_limits_exact_slope():
    for lam in (1e-3, 1e-2):
        ratio = ab.exact_slope(1.0, lam, 0.2) / ab.first_order_slope(1.0, lam, 0.2)
        assert ratio == pytest.approx(1.0, abs=lam)


def test_published_slope_is_below_true_growth():
    published = ab.published_slope(1.0, 0.05, 0.2)
    assert published == pytest.approx(0.015625)
    assert ab.exact_slope(1.0, 0.05, 0.2) > 1.1 * published


def test_delay_grows_linearly_in_width():
    asym = ab.hartman_destruction_asymptote(1.0, 0.05, 0.2)
    assert asym.fitted_slope == pytest.approx(asym.exact_slope, rel=1e-6)
    assert asym.slope == pytest.approx(0.015625)


def test_zero_lambda_asymptote_is_the_plateau():
    asym = ab.hartman_destruction_asymptote(1.0, 0.0, 0.2)
    assert asym.slope == 0 and asym.intercept == pytest.approx(2.5)


def test_out_of_regime():
    with pytest.raises(OutOfRegime):
        ab.published_slope(1.0, 0.05, 1.2)
    with pytest.raises(OutOfRegime):
        ab.hartman_destruction_asymptote(1.0, -0.1, 0.2)
