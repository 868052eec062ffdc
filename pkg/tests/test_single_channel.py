from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from tunneltime import single_channel as sc
from tunneltime.core import BarrierSpec, DegenerateEnergy, OutOfRegime, SingularTerm


def textbook_transmission(spec: BarrierSpec) -> complex:
    """Independent oracle: 1/(cosh qL + i (q^2-k^2)/(2kq) sinh qL), times e^{-ikL}."""
    k, q, L = spec.k, spec.q, spec.length
    return cmath.exp(-1j * k * L) / (cmath.cosh(q * L) + 1j * (q * q - k * k) / (2 * k * q) * cmath.sinh(q * L))


def random_specs(n, seed, max_ql=12.0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        v0 = rng.uniform(0.2, 3.0)
        e = rng.uniform(0.02, 2.0) * v0
        if abs(e - v0) < 1e-3:
            continue
        q = math.sqrt(abs(v0 - e))
        out.append(BarrierSpec(v0, rng.uniform(0.0, max_ql / q), e))
    return out


def test_closed_form_matches_textbook_oracle():
    for spec in random_specs(300, 1):
        ref = textbook_transmission(spec)
        assert abs(sc.closed_form_transmission(spec) - ref) <= 1e-10 * max(abs(ref), 1e-300)


def test_matching_matches_closed_form_and_conserves_flux():
    for spec in random_specs(300, 2):
        sol = sc.solve_by_matching(spec)
        ref = sc.closed_form_transmission(spec)
        assert abs(sol.a_t - ref) <= 1e-10 * max(abs(ref), 1e-12)
        assert sol.flux == pytest.approx(1.0, abs=1e-10)


def test_wavefunction_is_continuous_at_edges():
    spec = BarrierSpec(1.0, 3.0, 0.3)
    sol = sc.solve_by_matching(spec)
    k = spec.k
    assert sol.interior.psi(0.0) == pytest.approx(1 + sol.a_r)
    assert sol.interior.dpsi(0.0) == pytest.approx(1j * k * (1 - sol.a_r))
    right = sol.a_t * cmath.exp(1j * k * spec.length)
    assert sol.interior.psi(spec.length) == pytest.approx(right)
    assert sol.interior.dpsi(spec.length) == pytest.approx(1j * k * right)


def test_zero_width_is_transparent():
    spec = BarrierSpec(1.0, 0.0, 0.4)
    assert sc.closed_form_transmission(spec) == 1.0
    assert sc.phase_time(spec) == 0.0


def test_opaque_barrier_keeps_relative_precision():
    spec = BarrierSpec(1.0, 400.0, 0.2)
    scaled = sc.transmission_scaled(spec.k, spec.q, spec.length)
    expected_log = math.log(4 * spec.k * spec.q.real) - math.log(spec.k ** 2 + spec.q.real ** 2) - spec.q.real * 400
    assert scaled.log_abs == pytest.approx(expected_log, rel=1e-12)


def test_printed_interior_ratio_magnitude_only():
    spec = BarrierSpec(1.0, 2.0, 0.3)
    a, b = sc.printed_interior_coefficients(spec)
    interior = sc.solve_by_matching(spec).interior
    solved_ratio = interior.grow_unanchored().value / interior.a_decay
    assert abs(a / b) == pytest.approx(abs(solved_ratio), rel=1e-10)
    assert a / b != pytest.approx(solved_ratio, rel=1e-3)


def test_unwrapped_phase_agrees_with_arctan_branch():
    for L in (0.5, 3.0, 12.0):
        spec = BarrierSpec(1.0, L, 0.2)
        delta = sc.transmission_phase(spec)
        assert math.isfinite(delta)


@pytest.mark.parametrize("energy", [0.05, 0.2, 0.45, 0.75, 0.95])
@pytest.mark.parametrize("ql", [0.3, 2.0, 6.0, 20.0])
def test_phase_time_matches_analytic_derivative(energy, ql):
    spec = BarrierSpec(1.0, ql / math.sqrt(1 - energy), energy)
    assert sc.phase_time(spec) == pytest.approx(sc.analytic_phase_time(spec), rel=1e-8, abs=1e-9)


def test_phase_time_above_barrier_is_finite():
    assert math.isfinite(sc.phase_time(BarrierSpec(1.0, 3.0, 1.7)))


def test_phase_time_refuses_barrier_top():
    with pytest.raises(DegenerateEnergy):
        sc.phase_time(BarrierSpec(1.0, 3.0, 1.0))


def test_corrected_closed_form_agrees_and_printed_does_not():
    res = sc.closed_form_phase_time(BarrierSpec(1.0, 2.0, 0.2))
    assert res.agrees_with_phase_time
    assert not res.printed_agrees_with_phase_time


def test_closed_form_singular_at_half_height():
    with pytest.raises(SingularTerm):
        sc.closed_form_phase_time(BarrierSpec(1.0, 2.0, 0.5))


def test_plateau_two_ways():
    spec = BarrierSpec(1.0, 1.0, 0.2)
    assert sc.asymptotic_time(spec) == pytest.approx(2.5)
    with pytest.raises(OutOfRegime):
        sc.asymptotic_time(BarrierSpec(1.0, 1.0, 1.5))


def test_plateau_excess_matches_direct_difference_where_resolvable():
    spec = BarrierSpec(1.0, 4.0, 0.3)
    direct = sc.phase_time(spec) - sc.asymptotic_time(spec)
    assert sc.plateau_excess_time(spec) == pytest.approx(direct, rel=1e-6)


@pytest.mark.parametrize("energy", [0.1, 0.2, 0.7])
def test_approach_correction_is_leading_term(energy):
    spec = BarrierSpec(1.0, 10.0, energy)
    exact = sc.plateau_excess_time(spec)
    approx = sc.approach_correction(spec)
    assert abs(exact - approx) / abs(exact) < 0.2
    assert math.copysign(1, exact) == math.copysign(1, 0.5 - energy)


def test_hump_formula_regime():
    assert sc.hump_position_formula(0.2, 1.0) == pytest.approx(1.8634, abs=1e-4)
    with pytest.raises(OutOfRegime):
        sc.hump_position_formula(0.6, 1.0)


def test_hump_sits_near_formula():
    l_num = sc.locate_hump(0.2, 1.0)
    rel = abs(l_num - sc.hump_position_formula(0.2, 1.0)) / l_num
    assert 0.08 <= rel <= 0.14
