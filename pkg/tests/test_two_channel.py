from __future__ import annotations

import math
import warnings

import numpy as np
import pytest

from tunneltime import single_channel as sc
from tunneltime import two_channel as tc
from tunneltime.core import BarrierSpec, DegenerateEnergy, TwoChannelSpec

REPULSIVE = TwoChannelSpec(1.0, 1.0, 0.1, 0.3, 1.0, 0.5)
ATTRACTIVE = TwoChannelSpec(1.0, -0.5, 0.1, 0.3, 1.0, 0.5)


def random_spec(rng) -> TwoChannelSpec:
    delta = rng.uniform(0.05, 0.6)
    return TwoChannelSpec(
        v0=rng.uniform(0.3, 2.0),
        v_i=rng.uniform(-1.0, 2.0),
        v_c=rng.uniform(0.0, 0.5),
        delta=delta,
        length=rng.uniform(0.0, 25.0),
        energy=delta + rng.uniform(0.02, 1.5),
    )


def test_eigenvalues_satisfy_product_and_sum_identities():
    rng = np.random.default_rng(5)
    for _ in range(200):
        spec = random_spec(rng)
        mix = tc.mixing_of(spec)
        e = spec.energy
        assert mix.alpha_sq * mix.beta_sq == pytest.approx(tc.hartman_margin(spec), abs=1e-12)
        assert mix.alpha_sq + mix.beta_sq == pytest.approx(spec.v0 + spec.v_i + spec.delta - 2 * e, abs=1e-12)


def test_eigenvectors_diagonalise_the_potential_matrix():
    spec = TwoChannelSpec(1.2, 0.4, 0.3, 0.2, 1.0, 0.6)
    mix = tc.mixing_of(spec)
    m = np.array([[spec.v0, spec.v_c], [spec.v_c, spec.v_i + spec.delta]]) - spec.energy * np.eye(2)
    for vec, val in ((mix.mode_alpha, mix.alpha_sq), (mix.mode_beta, mix.beta_sq)):
        v = np.array(vec)
        assert m @ v == pytest.approx(val.real * v, abs=1e-12)


def test_evanescence_product_branch():
    assert tc.evanescence_product(REPULSIVE).real > 0
    assert tc.evanescence_product(ATTRACTIVE).imag > 0


def test_flux_is_conserved_on_random_specs():
    rng = np.random.default_rng(6)
    for _ in range(300):
        spec = random_spec(rng)
        assert tc.solve_two_channel(spec).flux == pytest.approx(1.0, abs=1e-9)


def test_wave_is_continuous_at_both_edges():
    sol = tc.solve_two_channel(TwoChannelSpec(1.0, 0.6, 0.2, 0.3, 4.0, 0.55))
    for x in (0.0, 4.0):
        assert sol.interior(x) == pytest.approx(sol.exterior(x), abs=1e-12)


def test_uncoupled_limit_reproduces_single_channel():
    for L in (1.0, 10.0, 60.0):
        spec = TwoChannelSpec(1.0, 1.0, 0.0, 0.3, L, 0.4)
        single = sc.closed_form_transmission(BarrierSpec(1.0, L, 0.4))
        assert tc.solve_two_channel(spec).a_t == pytest.approx(single, rel=1e-12)
        assert abs(tc.solve_two_channel(spec).big_t) < 1e-15


def test_decoupling_converges_quadratically():
    base = BarrierSpec(1.0, 3.0, 0.4)
    ref = sc.closed_form_transmission(base)
    errs = [abs(tc.solve_two_channel(TwoChannelSpec(1.0, 1.0, vc, 0.3, 3.0, 0.4)).a_t - ref)
            for vc in (0.04, 0.02, 0.01)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_opaque_barrier_keeps_tiny_amplitude_accurate():
    spec = TwoChannelSpec(1.0, 1.0, 0.0, 0.3, 120.0, 0.4)
    single = sc.transmission_scaled(spec.k, BarrierSpec(1.0, 120.0, 0.4).q, 120.0)
    assert tc.solve_two_channel(spec).t_anchored.log_abs == pytest.approx(single.log_abs, rel=1e-12)


def test_elastic_time_uncoupled_equals_single():
    spec = TwoChannelSpec(1.0, 1.0, 0.0, 0.3, 5.0, 0.4)
    assert tc.elastic_phase_time(spec) == pytest.approx(sc.phase_time(BarrierSpec(1.0, 5.0, 0.4)), rel=1e-9)


def test_elastic_time_refuses_thresholds():
    with pytest.raises(DegenerateEnergy):
        tc.elastic_phase_time(TwoChannelSpec(1.0, 1.0, 0.1, 0.3, 5.0, 1.0))


def test_criterion_on_named_specs():
    assert tc.hartman_criterion(REPULSIVE).expected
    assert tc.hartman_margin(REPULSIVE) == pytest.approx(0.39)
    assert not tc.hartman_criterion(ATTRACTIVE).expected
    assert tc.hartman_margin(ATTRACTIVE) == pytest.approx(-0.36)


def test_zero_margin_warns_and_is_not_hartman():
    # (vi + delta - E)(v0 - E) = vc^2 with v0 - E = 0.5, vi + delta - E = 0.02
    spec = TwoChannelSpec(1.0, 0.22, 0.1, 0.3, 1.0, 0.5)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        crit = tc.hartman_criterion(spec)
    if tc.hartman_margin(spec) == 0.0:
        assert caught and not crit.expected


def test_verdicts_on_named_specs():
    rep = tc.saturation_verdict(REPULSIVE)
    att = tc.saturation_verdict(ATTRACTIVE)
    assert rep.verdict == "saturates" and rep.agrees
    assert att.verdict == "grows" and att.agrees
    assert att.slope > 0


def test_default_window_uses_slowest_rate():
    mix = tc.mixing_of(REPULSIVE)
    lo, hi = tc.default_window(REPULSIVE)
    slowest = min(mix.beta.real, mix.alpha.real - mix.beta.real)
    assert lo == pytest.approx(30 / slowest) and hi == pytest.approx(60 / slowest)
    assert math.isfinite(hi)
