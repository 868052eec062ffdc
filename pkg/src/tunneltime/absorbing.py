"""Optical-model barrier ``V0 (1 - i lam)`` and the linear-in-L delay it produces."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import phase_numerics as pn
from .core import AbsorbingBarrierSpec, BarrierSpec, DegenerateEnergy, OutOfRegime
from .single_channel import (
    THRESHOLD_GAP,
    asymptotic_time,
    matching_system,
    solve_linear,
    transmission_scaled,
)

WINDOW_QL = (20.0, 50.0)


@dataclass(frozen=True)
class AbsorbingTimeAsymptote:
    """Large-L delay ``slope * L + intercept``.

    ``slope`` is the published coefficient ``lam V0 k / (2 (V0-E) q0)``;
    ``exact_slope`` is ``-d/dE Im(q)`` from the exact complex decay constant,
    which is what the delay actually follows.  ``intercept`` and
    ``fitted_slope`` come from a least-squares fit over the window.
    """

    slope: float
    intercept: float
    exact_slope: float
    fitted_slope: float
    window: tuple[float, float]


def absorbing_transmission(spec: AbsorbingBarrierSpec) -> complex:
    """Exact ``a_T`` for the complex barrier; the free factor is ``e^{-ikL}``."""
    k, L = spec.k, spec.length
    return transmission_scaled(k, spec.q, L).value * cmath.exp(-1j * k * L)


def absorbing_matching(spec: AbsorbingBarrierSpec) -> tuple[complex, complex]:
    """``(a_T, a_R)`` from the 4x4 boundary-matching solve with complex potential."""
    k, L = spec.k, spec.length
    if L == 0.0:
        return 1.0 + 0j, 0j
    a_r, _, _, t = solve_linear(*matching_system(k, spec.q, L))
    return complex(t) * cmath.exp(-1j * k * L), complex(a_r)


def absorbed_fraction(spec: AbsorbingBarrierSpec) -> float:
    a_t, a_r = absorbing_matching(spec)
    return 1.0 - abs(a_t) ** 2 - abs(a_r) ** 2


def first_order_q(spec: AbsorbingBarrierSpec) -> complex:
    """Decay constant expanded to first order in ``lam``."""
    e, v0 = spec.energy, spec.v0
    if not e < v0:
        raise OutOfRegime("first_order_q needs E < V0")
    return spec.q0 * (1 - 1j * spec.lam * v0 / (2 * (v0 - e)))


def absorbing_phase_time(spec: AbsorbingBarrierSpec) -> float:
    """``d/dE [delta + kL]`` of the exact complex-barrier amplitude."""
    if abs(spec.energy - spec.v0) < THRESHOLD_GAP:
        raise DegenerateEnergy(f"energy {spec.energy} within {THRESHOLD_GAP:g} of v0")
    if spec.length == 0.0:
        return 0.0

    def sample(energy: float) -> complex:
        s = spec.with_energy(energy)
        return transmission_scaled(s.k, s.q, s.length).mantissa

    step = min(1e-4 * max(spec.energy, 1.0), spec.energy / 8, abs(spec.v0 - spec.energy) / 8)
    phase = pn.anchored_phase(sample, spec.energy)
    return pn.derivative(phase, spec.energy, step).value


def published_slope(v0: float, lam: float, energy: float) -> float:
    """Slope coefficient as printed, ``(lam V0 / (2 (V0 - E))) (k / q0)``."""
    if not 0 < energy < v0:
        raise OutOfRegime("slope needs 0 < E < V0")
    q0 = math.sqrt(v0 - energy)
    return lam * v0 / (2 * (v0 - energy)) * math.sqrt(energy) / q0


def first_order_slope(v0: float, lam: float, energy: float) -> float:
    """``d/dE`` of the phase ``lam V0 L / (2 q0)`` gained per unit width: ``lam V0 / (4 q0^3)``."""
    if not 0 < energy < v0:
        raise OutOfRegime("slope needs 0 < E < V0")
    return lam * v0 / (4 * (v0 - energy) ** 1.5)


def exact_slope(v0: float, lam: float, energy: float, step: float = 1e-5) -> float:
    """``-d/dE Im q(E)`` with the exact complex root, the true large-L growth rate."""

    def neg_im_q(e: float) -> float:
        return -AbsorbingBarrierSpec(v0, lam, 1.0, e).q.imag

    return pn.derivative(neg_im_q, energy, step).value


def delay_curve(spec: AbsorbingBarrierSpec, lengths) -> np.ndarray:
    return np.array([absorbing_phase_time(spec.with_length(L)) for L in lengths])


def hartman_destruction_asymptote(
    v0: float,
    lam: float,
    energy: float,
    window_ql: tuple[float, float] = WINDOW_QL,
    n: int = 16,
) -> AbsorbingTimeAsymptote:
    if not 0 < energy < v0:
        raise OutOfRegime("asymptote needs 0 < E < V0")
    if lam < 0:
        raise OutOfRegime("asymptote needs lam >= 0")
    q0 = math.sqrt(v0 - energy)
    window = (window_ql[0] / q0, window_ql[1] / q0)
    if lam == 0.0:
        tau = asymptotic_time(BarrierSpec(v0, window[1], energy))
        return AbsorbingTimeAsymptote(0.0, tau, 0.0, 0.0, window)
    spec = AbsorbingBarrierSpec(v0, lam, window[0], energy)
    lengths = np.linspace(*window, n)
    fit = pn.fit_tail_slope(list(zip(lengths, delay_curve(spec, lengths))), window)
    return AbsorbingTimeAsymptote(
        slope=published_slope(v0, lam, energy),
        intercept=fit.intercept,
        exact_slope=exact_slope(v0, lam, energy),
        fitted_slope=fit.slope,
        window=window,
    )
