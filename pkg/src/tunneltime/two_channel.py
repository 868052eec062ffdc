"""Unitary elastic/inelastic two-channel barrier.

Inside ``[0, L]`` the channels obey ``-Psi'' + M Psi = E Psi`` with

    M = [[V0,  Vc      ],
         [Vc,  V_I + D ]]

(``D`` is the excitation energy).  Diagonalising M by a rotation through
``theta = atan2(2 Vc, V0 - V_I - D)`` gives two uncoupled modes with decay
constants ``alpha^2 = m_+ - E`` and ``beta^2 = m_- - E``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import phase_numerics as pn
from .core import DegenerateEnergy, Scaled, TwoChannelSpec, complex_sqrt_branch
from .single_channel import THRESHOLD_GAP, solve_linear


@dataclass(frozen=True)
class ChannelMixing:
    alpha: complex
    beta: complex
    theta: float

    @property
    def alpha_sq(self) -> complex:
        return self.alpha * self.alpha

    @property
    def beta_sq(self) -> complex:
        return self.beta * self.beta

    @property
    def mode_alpha(self) -> tuple[float, float]:
        """(elastic, inelastic) components of the alpha eigenmode."""
        return math.cos(self.theta / 2), math.sin(self.theta / 2)

    @property
    def mode_beta(self) -> tuple[float, float]:
        return -math.sin(self.theta / 2), math.cos(self.theta / 2)


def mixing_of(spec: TwoChannelSpec) -> ChannelMixing:
    e = spec.energy
    mean = (spec.v0 + spec.v_i + spec.delta - 2 * e) / 2
    split = math.sqrt((spec.v0 - spec.v_i - spec.delta) ** 2 / 4 + spec.v_c ** 2)
    theta = math.atan2(2 * spec.v_c, spec.v0 - spec.v_i - spec.delta)
    return ChannelMixing(
        alpha=complex_sqrt_branch(mean + split),
        beta=complex_sqrt_branch(mean - split),
        theta=theta,
    )


def evanescence_product(spec: TwoChannelSpec) -> complex:
    """``alpha*beta`` as ``sqrt((V_I + D - E)(V0 - E) - Vc^2)`` under the core branch."""
    return complex_sqrt_branch(hartman_margin(spec))


def hartman_margin(spec: TwoChannelSpec) -> float:
    """``(V_I + D - E)(V0 - E) - Vc^2``, the determinant of ``M - E``."""
    e = spec.energy
    return (spec.v_i + spec.delta - e) * (spec.v0 - e) - spec.v_c ** 2


@dataclass(frozen=True)
class TwoChannelSolution:
    """Amplitudes of the matched two-channel wave.

    Left:  psi = e^{ikx} + a_r e^{-ikx},   phi = big_r e^{-ik'x}
    Right: psi = a_t e^{ikx},              phi = big_t e^{ik'x}
    Inside, each mode ``m`` in (alpha, beta) contributes
    ``(grow_m e^{m(x-L)} + decay_m e^{-mx})`` times its eigenvector; ``b, f``
    are the growing coefficients anchored at ``x = L`` and ``c, g`` the
    decaying ones anchored at ``x = 0``.
    """

    spec: TwoChannelSpec
    mixing: ChannelMixing
    a_r: complex
    big_r: complex
    a_t: complex
    big_t: complex
    b: complex
    c: complex
    f: complex
    g: complex
    t_anchored: Scaled

    @property
    def flux(self) -> float:
        ratio = self.spec.k_inelastic / self.spec.k
        return (abs(self.a_r) ** 2 + abs(self.a_t) ** 2
                + ratio * (abs(self.big_r) ** 2 + abs(self.big_t) ** 2))

    def interior(self, x: float) -> tuple[complex, complex, complex, complex]:
        """``(psi, psi', phi, phi')`` at ``0 <= x <= L``."""
        L = self.spec.length
        out = np.zeros(4, dtype=complex)
        for m, grow, decay, (ue, ui) in (
            (self.mixing.alpha, self.b, self.c, self.mixing.mode_alpha),
            (self.mixing.beta, self.f, self.g, self.mixing.mode_beta),
        ):
            up, down = cmath.exp(m * (x - L)), cmath.exp(-m * x)
            val = grow * up + decay * down
            der = m * (grow * up - decay * down)
            out += np.array([ue * val, ue * der, ui * val, ui * der])
        return tuple(complex(z) for z in out)

    def exterior(self, x: float) -> tuple[complex, complex, complex, complex]:
        k, kp = self.spec.k, self.spec.k_inelastic
        if x <= 0:
            psi = cmath.exp(1j * k * x) + self.a_r * cmath.exp(-1j * k * x)
            dpsi = 1j * k * (cmath.exp(1j * k * x) - self.a_r * cmath.exp(-1j * k * x))
            phi = self.big_r * cmath.exp(-1j * kp * x)
            return psi, dpsi, phi, -1j * kp * phi
        psi = self.a_t * cmath.exp(1j * k * x)
        phi = self.big_t * cmath.exp(1j * kp * x)
        return psi, 1j * k * psi, phi, 1j * kp * phi


def matching_system(
    spec: TwoChannelSpec, mixing: ChannelMixing
) -> tuple[np.ndarray, np.ndarray, float]:
    """8x8 continuity system and the log-scale of its right-edge unknowns.

    Unknowns ``[a_r, R, b', c, f, g, t', T']``.  ``b, f`` multiply
    ``e^{m(x-L)}`` and ``c, g`` multiply ``e^{-mx}``; ``t, T`` are the
    transmitted waves anchored at ``x = L``.  Everything fed by the right edge
    (``b, f, t, T``) is of order ``e^{-kappa L}`` with ``kappa`` the slowest
    real decay constant, so those unknowns are solved for as
    ``x' = x e^{kappa L}``.  No matrix entry then exceeds one and no unknown
    underflows.
    """
    k, kp, L = spec.k, spec.k_inelastic, spec.length
    a, bt = mixing.alpha, mixing.beta
    kappa = max(min(a.real, bt.real), 0.0)
    ea, eb = cmath.exp(-a * L), cmath.exp(-bt * L)
    # decaying columns seen from x = L, divided by e^{-kappa L}
    ea_r, eb_r = cmath.exp(-(a - kappa) * L), cmath.exp(-(bt - kappa) * L)
    shrink = math.exp(-kappa * L)
    (ua_e, ua_i), (ub_e, ub_i) = mixing.mode_alpha, mixing.mode_beta
    rows = [(ua_e, ub_e, False), (ua_e, ub_e, True), (ua_i, ub_i, False), (ua_i, ub_i, True)]

    m = np.zeros((8, 8), dtype=complex)
    rhs = np.zeros(8, dtype=complex)
    for row, (u_a, u_b, deriv) in enumerate(rows):
        sa, sb = (a, bt) if deriv else (1.0, 1.0)
        sign = -1.0 if deriv else 1.0
        # x = 0
        m[row, 2] = u_a * sa * ea * shrink
        m[row, 3] = u_a * sa * sign
        m[row, 4] = u_b * sb * eb * shrink
        m[row, 5] = u_b * sb * sign
        # x = L, row divided by e^{-kappa L}
        m[row + 4, 2] = u_a * sa
        m[row + 4, 3] = u_a * sa * sign * ea_r
        m[row + 4, 4] = u_b * sb
        m[row + 4, 5] = u_b * sb * sign * eb_r
    m[0, 0] = -1.0
    rhs[0] = 1.0
    m[1, 0] = 1j * k
    rhs[1] = 1j * k
    m[2, 1] = -1.0
    m[3, 1] = 1j * kp
    m[4, 6] = -1.0
    m[5, 6] = -1j * k
    m[6, 7] = -1.0
    m[7, 7] = -1j * kp
    return m, rhs, -kappa * L


def solve_two_channel(spec: TwoChannelSpec) -> TwoChannelSolution:
    mixing = mixing_of(spec)
    k, kp, L = spec.k, spec.k_inelastic, spec.length
    if L == 0.0:
        return TwoChannelSolution(spec, mixing, 0j, 0j, 1.0 + 0j, 0j, 0j, 0j, 0j, 0j, Scaled(1.0 + 0j))
    m, rhs, log_scale = matching_system(spec, mixing)
    x = solve_linear(m, rhs)
    a_r, big_r, b, c, f, g, t, big_t = (complex(z) for z in x)
    shrink = math.exp(log_scale)
    t_scaled = Scaled(t, log_scale)
    return TwoChannelSolution(
        spec=spec,
        mixing=mixing,
        a_r=a_r,
        big_r=big_r,
        a_t=t_scaled.value * cmath.exp(-1j * k * L),
        big_t=big_t * shrink * cmath.exp(-1j * kp * L),
        b=b * shrink,
        c=c,
        f=f * shrink,
        g=g,
        t_anchored=t_scaled,
    )


def elastic_phase_time(spec: TwoChannelSpec) -> float:
    """Delay of the elastic transmitted packet, free traversal removed."""
    e = spec.energy
    for name, thr in (("delta", spec.delta), ("v0", spec.v0)):
        if abs(e - thr) < THRESHOLD_GAP:
            raise DegenerateEnergy(f"energy {e} within {THRESHOLD_GAP:g} of {name}")
    if spec.length == 0.0:
        return 0.0

    def sample(energy: float) -> complex:
        return solve_two_channel(spec.with_energy(energy)).t_anchored.mantissa

    gaps = [e - spec.delta, abs(e - spec.v0)]
    step = min([1e-4 * max(e, 1.0)] + [gap / 8 for gap in gaps])
    phase = pn.anchored_phase(sample, e)
    return pn.derivative(phase, e, step).value


@dataclass(frozen=True)
class HartmanCriterion:
    expected: bool
    margin: float
    alpha_sq: float
    beta_sq: float


def hartman_criterion(spec: TwoChannelSpec) -> HartmanCriterion:
    """Evanescence of both interior modes, the condition for width-independent delay.

    ``margin = 0`` is classified as non-Hartman (with a warning).
    """
    mix = mixing_of(spec)
    margin = hartman_margin(spec)
    a2, b2 = mix.alpha_sq.real, mix.beta_sq.real
    if margin == 0.0:
        warnings.warn("hartman margin is exactly zero; classifying as non-Hartman", stacklevel=2)
    return HartmanCriterion(margin > 0 and a2 > 0 and b2 > 0, margin, a2, b2)


@dataclass(frozen=True)
class SaturationVerdict:
    verdict: Literal["saturates", "grows"]
    slope: float
    threshold: float
    tau_max: float
    criterion: HartmanCriterion

    @property
    def agrees(self) -> bool:
        return (self.verdict == "saturates") == self.criterion.expected


def default_window(spec: TwoChannelSpec, span: tuple[float, float] = (30.0, 60.0)) -> tuple[float, float]:
    """Width window deep in the opaque regime.

    The slowest scale is either the smaller evanescent constant or, when the
    channels mix, ``alpha - beta``: the faster mode's leftover in the elastic
    amplitude fades relative to the slower one as ``e^{-(alpha-beta)L}``.
    """
    mix = mixing_of(spec)
    evanescent = [z.real for z in (mix.alpha, mix.beta) if z.real > 1e-12 and abs(z.imag) < 1e-12]
    rates = list(evanescent)
    if len(evanescent) == 2 and abs(math.sin(mix.theta)) > 1e-12:
        gap = mix.alpha.real - mix.beta.real
        if gap > 1e-12:
            rates.append(gap)
    kappa = min(rates) if rates else math.sqrt(abs(spec.v0 - spec.energy)) or 1.0
    return span[0] / kappa, span[1] / kappa


def saturation_verdict(
    spec: TwoChannelSpec,
    l_window: tuple[float, float] | None = None,
    n: int = 12,
) -> SaturationVerdict:
    """Fit the tail slope of ``tau(L)`` and call it saturating or growing.

    Saturating means ``|slope| < 1e-4 * tau(L_max) / L_max``.
    """
    window = default_window(spec) if l_window is None else l_window
    lengths = np.linspace(window[0], window[1], n)
    taus = [elastic_phase_time(spec.with_length(L)) for L in lengths]
    fit = pn.fit_tail_slope(list(zip(lengths, taus)), window, min_samples=min(8, n))
    threshold = 1e-4 * abs(taus[-1]) / lengths[-1]
    verdict = "saturates" if abs(fit.slope) < threshold else "grows"
    return SaturationVerdict(verdict, fit.slope, threshold, taus[-1], hartman_criterion(spec))
