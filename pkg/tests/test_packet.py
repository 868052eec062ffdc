from __future__ import annotations

import math

import numpy as np
import pytest

from tunneltime import packet as pk
from tunneltime import single_channel as sc
from tunneltime.core import BarrierSpec, InvalidSpec


def test_profile_is_normalised():
    wp = pk.GaussianPacket(0.5, 0.01)
    k, w = pk.gauss_legendre_nodes(wp.k0 - 5 * wp.sigma_k, wp.k0 + 5 * wp.sigma_k, 400)
    assert np.sum(w * wp.profile(k) ** 2) == pytest.approx(1.0, abs=1e-6)


def test_gauss_legendre_integrates_polynomials_exactly():
    x, w = pk.gauss_legendre_nodes(-1.0, 2.0, 64)
    assert np.sum(w * x ** 7) == pytest.approx((2.0 ** 8 - 1.0) / 8)


@pytest.mark.parametrize("kwargs", [dict(k0=0.5, sigma_k=0.0), dict(k0=0.5, sigma_k=0.2), dict(k0=0.5, sigma_k=0.01, x0=1.0)])
def test_packet_validation(kwargs):
    with pytest.raises(InvalidSpec):
        pk.GaussianPacket(**kwargs)


def test_free_packet_peak_moves_at_group_velocity():
    wp = pk.GaussianPacket(0.6, 0.012)
    rec = pk.arrival(wp, None, 10.0, (10.0 - wp.x0) / (2 * wp.k0))
    assert rec.t_peak == pytest.approx((10.0 - wp.x0) / (2 * wp.k0), rel=1e-3)


def test_free_amplitude_gives_free_time():
    wp = pk.GaussianPacket(0.6, 0.012)
    assert pk.measure_delay(wp, lambda k: 1.0, 7.0) == pytest.approx(7.0 / (2 * wp.k0), rel=1e-9)


def test_field_converges_under_node_doubling():
    wp = pk.GaussianPacket(0.6, 0.012)
    psi = pk.transmitted_field(wp, None, 3.0, np.linspace(0, 5, 7))
    assert np.all(np.isfinite(psi))


def packet_bias(energy: float, ql: float, rel_sigma: float) -> float:
    L = ql / math.sqrt(1 - energy)
    k0 = math.sqrt(energy)
    wp = pk.GaussianPacket(k0, rel_sigma * k0)
    measured = pk.measure_delay(wp, lambda k: sc.closed_form_transmission(BarrierSpec(1.0, L, k * k)), L)
    return measured / sc.phase_time(BarrierSpec(1.0, L, energy)) - 1


@pytest.mark.parametrize("energy, ql, rel_sigma", [(0.2, 4.0, 0.02), (0.7, 6.0, 0.01)])
def test_packet_delay_matches_phase_time(energy, ql, rel_sigma):
    assert abs(packet_bias(energy, ql, rel_sigma)) < 0.01


def test_packet_bias_is_second_order_in_spread():
    # near the barrier top |a_T| varies fast with k; the bias shrinks as sigma_k^2
    ratio = packet_bias(0.7, 6.0, 0.02) / packet_bias(0.7, 6.0, 0.01)
    assert ratio == pytest.approx(4.0, rel=0.15)


def test_barrier_filters_toward_higher_momentum():
    wp = pk.GaussianPacket(math.sqrt(0.2), 0.05 * math.sqrt(0.2))
    k_mean = pk.transmitted_mean_momentum(wp, lambda k: sc.closed_form_transmission(BarrierSpec(1.0, 8.0, k * k)))
    assert k_mean > wp.k0
