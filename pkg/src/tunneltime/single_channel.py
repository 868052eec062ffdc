"""Scattering off a real rectangular barrier and its phase (Wigner) time.

The 4x4 boundary-matching solve is the reference for every amplitude.  The
closed forms below are kept as independent cross-checks and as the
overflow-safe fast path used for differentiation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import phase_numerics as pn
from .core import (
    BarrierSpec,
    DegenerateEnergy,
    OutOfRegime,
    Scaled,
    SingularMatching,
    SingularTerm,
    scaled_exp_pair,
)

COND_LIMIT = 1e12
THRESHOLD_GAP = 1e-9


@dataclass(frozen=True)
class InteriorCoefficients:
    """Interior wave ``a_grow * e^{q(x-L)} + a_decay * e^{-qx}``.

    Both basis functions are bounded by one on the barrier, so the growing
    coefficient is anchored at the right edge.  The textbook ``A`` of
    ``A e^{qx}`` is ``a_grow * e^{-qL}`` (see :meth:`grow_unanchored`).
    """

    a_grow: complex
    a_decay: complex
    q: complex
    length: float

    def grow_unanchored(self) -> Scaled:
        return Scaled(self.a_grow * cmath.exp(-1j * self.q.imag * self.length),
                      -self.q.real * self.length)

    def psi(self, x: float) -> complex:
        return (self.a_grow * cmath.exp(self.q * (x - self.length))
                + self.a_decay * cmath.exp(-self.q * x))

    def dpsi(self, x: float) -> complex:
        return self.q * (self.a_grow * cmath.exp(self.q * (x - self.length))
                         - self.a_decay * cmath.exp(-self.q * x))


@dataclass(frozen=True)
class SingleChannelSolution:
    spec: BarrierSpec
    a_t: complex
    a_r: complex
    interior: InteriorCoefficients
    t_anchored: complex
    """Transmitted wave written as ``t_anchored * e^{ik(x-L)}``; ``a_t = t_anchored e^{-ikL}``."""

    @property
    def flux(self) -> float:
        return abs(self.a_t) ** 2 + abs(self.a_r) ** 2


def matching_system(k: complex, q: complex, length: float) -> tuple[np.ndarray, np.ndarray]:
    """Continuity of psi and psi' at x=0 and x=L.

    Unknown vector: ``[a_r, a_grow, a_decay, t_anchored]``.  Works for any
    complex ``q`` (absorbing barriers reuse it).
    """
    eq = cmath.exp(-q * length)
    m = np.array(
        [
            # psi(0):  1 + a_r = a_grow e^{-qL} + a_decay
            [-1.0, eq, 1.0, 0.0],
            # psi'(0): ik(1 - a_r) = q(a_grow e^{-qL} - a_decay)
            [1j * k, q * eq, -q, 0.0],
            # psi(L):  a_grow + a_decay e^{-qL} = t
            [0.0, 1.0, eq, -1.0],
            # psi'(L): q(a_grow - a_decay e^{-qL}) = ik t
            [0.0, q, -q * eq, -1j * k],
        ],
        dtype=complex,
    )
    rhs = np.array([1.0, 1j * k, 0.0, 0.0], dtype=complex)
    return m, rhs


def solve_linear(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatching(f"matching matrix condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    return np.linalg.solve(m, rhs)


def solve_by_matching(spec: BarrierSpec) -> SingleChannelSolution:
    k, q, L = spec.k, spec.q, spec.length
    if L == 0.0:
        return SingleChannelSolution(spec, 1.0 + 0j, 0j, InteriorCoefficients(1.0, 0.0, q, 0.0), 1.0 + 0j)
    a_r, a_grow, a_decay, t = solve_linear(*matching_system(k, q, L))
    return SingleChannelSolution(
        spec=spec,
        a_t=t * cmath.exp(-1j * k * L),
        a_r=a_r,
        interior=InteriorCoefficients(complex(a_grow), complex(a_decay), q, L),
        t_anchored=complex(t),
    )


def printed_interior_coefficients(spec: BarrierSpec) -> tuple[complex, complex]:
    """``(A, B)`` transcribed literally from the published expressions.

    Kept for comparison only; these carry ``(1 +- iq/k)`` where the matching
    solve gives ``(1 +- ik/q)``, so only ``|A/B|`` agrees with the solve.
    """
    k, q, L = spec.k, spec.q, spec.length
    den = (1 + q * q / (k * k)) * cmath.sinh(q * L)
    a = -(1 + 1j * q / k) * cmath.exp(-q * L) / den
    b = (1 - 1j * q / k) * cmath.exp(q * L) / den
    return a, b


def _sinhc(z: complex) -> complex:
    return 1.0 + z * z / 6.0 if abs(z) < 1e-6 else cmath.sinh(z) / z


def transmission_scaled(k: float, q: complex, length: float) -> Scaled:
    """``a_T * e^{ikL}`` in scaled form, valid for any ``Re(q) >= 0``.

    For ``|q|L`` above one this is the e^{qL}-cancelled closed form; below,
    ``1/(cosh qL + i (q^2-k^2)/(2k) L sinhc(qL))`` which stays finite as
    ``q -> 0`` (energy at the barrier top).
    """
    qL = q * length
    if abs(qL) < 1.0:
        den = cmath.cosh(qL) + 1j * (q * q - k * k) / (2.0 * k) * length * _sinhc(qL)
        return Scaled(1.0 / den)
    num_exp, den_exp = scaled_exp_pair(q, length)
    r = 1j * k / q
    den = den_exp * (1 + r) ** 2 - (1 - r) ** 2
    return num_exp * (4.0 * r / den)


def closed_form_transmission(spec: BarrierSpec) -> complex:
    """Transmission amplitude ``a_T`` (may underflow to 0 for very opaque barriers)."""
    k, L = spec.k, spec.length
    return transmission_scaled(k, spec.q, L).value * cmath.exp(-1j * k * L)


def arctan_phase(spec: BarrierSpec) -> float:
    """``delta + kL`` from the arctan closed form with argument (k^2-q^2)/(2kq) tanh(qL).

    Principal branch only, real barriers below the top only.
    """
    if spec.energy >= spec.v0:
        raise OutOfRegime("arctan phase needs E < V0")
    k, q = spec.k, spec.q.real
    return math.atan((k * k - q * q) / (2 * k * q) * math.tanh(q * spec.length))


def _anchored_sampler(spec: BarrierSpec):
    """Energy -> transmitted wave anchored at the right edge (free phase kL removed)."""

    def sample(energy: float) -> complex:
        return transmission_scaled(math.sqrt(energy), spec.with_energy(energy).q, spec.length).mantissa

    return sample


def transmission_phase(spec: BarrierSpec, n_grid: int = 65) -> float:
    """Unwrapped phase of ``a_T`` as a continuous function of ``L`` with delta(0) = 0."""
    if spec.energy >= spec.v0:
        raise OutOfRegime("transmission_phase needs E < V0")
    if spec.length == 0.0:
        return 0.0
    k, q = spec.k, spec.q

    def sample(length: float) -> complex:
        return transmission_scaled(k, q, length).mantissa * cmath.exp(-1j * k * length)

    trace = pn.unwrap_phase(sample, np.linspace(0.0, spec.length, n_grid))
    delta = float(trace.phase[-1])
    closed = arctan_phase(spec) - k * spec.length
    mismatch = (delta - closed + math.pi) % (2 * math.pi) - math.pi
    if abs(mismatch) > 1e-8:
        raise AssertionError(f"unwrapped phase disagrees with arctan form by {mismatch:.3g}")
    return delta


def _energy_step(energy: float, *thresholds: float) -> float:
    gap = min([energy] + [abs(energy - t) for t in thresholds])
    return min(1e-4 * max(energy, 1.0), gap / 8.0)


def phase_time(spec: BarrierSpec) -> float:
    """Wigner delay ``d/dE [delta(E) + kL]`` by Richardson differentiation.

    The free-traversal term is removed exactly by anchoring the transmitted
    wave at ``x = L``, so the differentiated phase is bounded in ``L``.
    """
    if abs(spec.energy - spec.v0) < THRESHOLD_GAP:
        raise DegenerateEnergy(f"energy {spec.energy} within {THRESHOLD_GAP:g} of v0")
    if spec.length == 0.0:
        return 0.0
    phase = pn.anchored_phase(_anchored_sampler(spec), spec.energy)
    return pn.derivative(phase, spec.energy, _energy_step(spec.energy, spec.v0)).value


def analytic_phase_time(spec: BarrierSpec) -> float:
    """Exact derivative of arctan[(k^2-q^2)/(2kq) tanh(qL)] with respect to E.

    Written out by hand; serves as an oracle independent of the differentiator.
    """
    if not spec.energy < spec.v0:
        raise OutOfRegime("analytic_phase_time needs E < V0")
    k, q, L = spec.k, spec.q.real, spec.length
    u = (k * k - q * q) / (2 * k * q)
    du = (k * k + q * q) ** 2 / (4 * k ** 3 * q ** 3)
    th = math.tanh(q * L)
    sech2 = 1.0 / math.cosh(q * L) ** 2 if q * L < 350 else 0.0
    g = u * th
    dg = du * th - u * L * sech2 / (2 * q)
    return dg / (1 + g * g)


@dataclass(frozen=True)
class ClosedFormTime:
    """Explicit delay expression, as printed and as re-derived.

    ``printed`` transcribes the published display in natural units.  It
    uses the (q^2-k^2) sign of g and an L-term with q^2 in place of q, and
    comes out with the opposite sign to the phase derivative.
    ``value`` fixes both slips and is what the consistency flag checks.
    """

    value: float
    printed: float
    agrees_with_phase_time: bool
    printed_agrees_with_phase_time: bool
    phase_time: float


def closed_form_phase_time(spec: BarrierSpec, rtol: float = 1e-6) -> ClosedFormTime:
    if not spec.energy < spec.v0:
        raise OutOfRegime("closed_form_phase_time needs E < V0")
    k, q, L = spec.k, spec.q.real, spec.length
    if abs(q * q - k * k) < 1e-9:
        raise SingularTerm("4m/(q^2-k^2) term is singular at E = V0/2")
    m = 0.5
    th = math.tanh(q * L)
    sc = math.sinh(q * L) * math.cosh(q * L) if q * L < 350 else math.inf
    g_printed = (q * q - k * k) * th / (2 * q * k)
    common = m / (q * q) - 4 * m / (q * q - k * k) - m / (k * k)
    l_term_printed = m * L / (q * q * sc) if L > 0 else 0.0
    printed = g_printed / (1 + g_printed ** 2) * (common - l_term_printed)

    g = -g_printed
    l_term = m * L / (q * sc) if L > 0 else 0.0
    value = g / (1 + g * g) * (common - l_term)

    tau = phase_time(spec)
    tol = rtol * max(abs(tau), 1e-12)
    return ClosedFormTime(
        value=value,
        printed=printed,
        agrees_with_phase_time=abs(value - tau) <= tol,
        printed_agrees_with_phase_time=abs(printed - tau) <= tol,
        phase_time=tau,
    )


def asymptotic_time(spec: BarrierSpec) -> float:
    """Saturated delay ``1/sqrt(E(V0-E))``, i.e. twice the time to cross the decay length 1/q."""
    e, v0 = spec.energy, spec.v0
    if not 0 < e < v0:
        raise OutOfRegime("asymptotic_time needs 0 < E < V0")
    direct = 1.0 / math.sqrt(e * (v0 - e))
    via_velocity = 2.0 * (1.0 / (2.0 * spec.k)) / spec.q.real
    assert math.isclose(direct, via_velocity, rel_tol=1e-12)
    return direct


def approach_correction(spec: BarrierSpec) -> float:
    """Leading large-L correction ``4 L k E(V0-2E)/V0^2 e^{-2qL}`` (natural units).

    Positive below V0/2 (the delay approaches its plateau from above).
    """
    e, v0, L = spec.energy, spec.v0, spec.length
    if not 0 < e < v0:
        raise OutOfRegime("approach_correction needs 0 < E < V0")
    if L <= 0:
        raise OutOfRegime("approach_correction needs L > 0")
    velocity = 2.0 * spec.k
    return 8.0 * L / velocity * e * (v0 - 2 * e) / v0 ** 2 * math.exp(-2 * spec.q.real * L)


def plateau_excess_phase(spec: BarrierSpec) -> float:
    """``(delta + kL)(L) - (delta + kL)(L = inf)``, accurate even when it is ~1e-300.

    With eps = e^{-2qL} and w = (q^2-k^2)/(2kq), the anchored amplitude is
    2/((1+eps) + i w (1-eps)); dividing by its L -> inf limit leaves
    1/(1 + eps (1 - i w)/(1 + i w)), whose phase follows from log1p.
    """
    k, q = spec.k, spec.q.real
    if not q > 0:
        raise OutOfRegime("plateau_excess_phase needs E < V0")
    w = (q * q - k * k) / (2 * k * q)
    eps = math.exp(-2 * q * spec.length)
    z = eps * (1 - 1j * w) / (1 + 1j * w)
    # log1p on the complex argument: Im log(1+z) = atan2(Im z, 1 + Re z)
    return -math.atan2(z.imag, 1.0 + z.real)


def plateau_excess_time(spec: BarrierSpec) -> float:
    """``phase_time - asymptotic_time`` without cancellation, for the exponential tail."""
    if spec.length == 0.0:
        return -asymptotic_time(spec)

    def f(energy: float) -> float:
        return plateau_excess_phase(spec.with_energy(energy))

    step = _energy_step(spec.energy, spec.v0)
    scale = abs(f(spec.energy)) or 1.0
    est = pn.derivative(lambda e: f(e) / scale, spec.energy, step)
    return est.value * scale


def hump_position_formula(energy: float, v0: float) -> float:
    """Approximate width of the delay maximum, valid for 0 < E < V0/2.

    Natural-unit form ``(q/(2E)) (10E^2 - 9 V0 E + V0^2) / ((2E - V0)(V0 - E))``.
    """
    if not 0 < energy < v0 / 2:
        raise OutOfRegime("hump position formula needs 0 < E < V0/2")
    q = math.sqrt(v0 - energy)
    num = 10 * energy ** 2 - 9 * v0 * energy + v0 ** 2
    den = (2 * energy - v0) * (v0 - energy)
    value = q / (2 * energy) * num / den
    if not value > 0:
        raise OutOfRegime(f"hump position formula gives non-positive L0={value:.4g}")
    return value


def locate_hump(energy: float, v0: float, bracket: tuple[float, float] | None = None) -> float:
    """Numerical argmax of ``phase_time`` over width."""
    if bracket is None:
        q = math.sqrt(v0 - energy)
        bracket = (1e-3 / q, 8.0 / q)
    spec = BarrierSpec(v0, 1.0, energy)
    return pn.find_maximum(lambda L: phase_time(spec.with_length(L)), bracket)
