"""Shared types, unit convention and complex-scattering primitives.

Units
-----
Everything is in natural units with hbar = 1 and 2m = 1, so that

    E = k**2,   q**2 = V0 - E,   group velocity = dE/dk = 2k,

and times come out in units of hbar/[energy].  To convert a formula written
with explicit hbar and m, substitute ``hbar -> 1`` and ``m -> 1/2``:

    ==================  =================
    physical            natural (here)
    ==================  =================
    hbar k / m          2 k
    2m/hbar**2 (V0-E)   V0 - E
    hbar / E            1 / E
    hbar q / m          2 q
    ==================  =================
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


class TunnelingError(Exception):
    """Base class for every error raised by this package."""


class InvalidSpec(TunnelingError, ValueError):
    """Parameters violate a model precondition."""


class SingularMatching(TunnelingError):
    """The boundary-matching linear system is numerically singular."""


class DegenerateEnergy(TunnelingError):
    """Energy sits on (or too close to) a threshold where the delay is undefined."""


class SingularTerm(TunnelingError):
    """A closed-form expression has a removable or genuine singularity here."""


class OutOfRegime(TunnelingError):
    """Formula requested outside the parameter regime where it applies."""


class ClosedChannel(InvalidSpec):
    """Inelastic channel is closed (E <= delta)."""


def complex_sqrt_branch(z: complex) -> complex:
    """Square root with the cut on the negative real axis.

    Returns ``w`` with ``w*w == z``, ``Re(w) >= 0`` and ``Im(w) >= 0`` when
    ``Re(w) == 0``.  For a barrier this keeps ``exp(-q x)`` non-growing and
    makes ``q`` purely positive-imaginary above the barrier top.
    """
    z = complex(z)
    w = cmath.sqrt(z)
    # cmath puts -x - 0j on the lower lip; fold it onto the upper one
    if w.real == 0.0 and w.imag < 0.0:
        w = -w
    return w


@dataclass(frozen=True)
class Scaled:
    """Complex number stored as ``mantissa * exp(log_scale)``.

    Used for amplitudes like ``exp(-qL)`` which underflow long before the
    quantities built from them stop being meaningful.
    """

    mantissa: complex
    log_scale: float = 0.0

    @property
    def value(self) -> complex:
        return self.mantissa * math.exp(self.log_scale)

    @property
    def log_abs(self) -> float:
        m = abs(self.mantissa)
        return -math.inf if m == 0.0 else math.log(m) + self.log_scale

    @property
    def phase(self) -> float:
        return cmath.phase(self.mantissa)

    def __mul__(self, other: complex | Scaled) -> Scaled:
        if isinstance(other, Scaled):
            return Scaled(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
        return Scaled(self.mantissa * complex(other), self.log_scale)

    __rmul__ = __mul__

    def __truediv__(self, other: complex) -> Scaled:
        return Scaled(self.mantissa / complex(other), self.log_scale)


def scaled_exp_pair(q: complex, length: float) -> tuple[Scaled, complex]:
    """Overflow-free factors for a rectangular-barrier transmission amplitude.

    Multiplying numerator and denominator of
    ``4i(k/q) e^{-ikL} / [e^{-qL}(1+ik/q)^2 - e^{qL}(1-ik/q)^2]`` by
    ``e^{-qL}`` leaves a numerator factor ``e^{-qL}`` (returned in scaled form)
    and a denominator factor ``e^{-2qL}`` (bounded by 1, so plain complex).
    """
    q = complex(q)
    if q.real * length < 0.0:
        raise InvalidSpec("scaled_exp_pair requires Re(q)*L >= 0")
    qL = q * length
    numerator = Scaled(cmath.exp(-1j * qL.imag), -qL.real)
    denominator = cmath.exp(-2.0 * qL)
    return numerator, denominator


def _check_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0.0):
        raise InvalidSpec(f"{name} must be a finite positive number, got {value!r}")


def _check_nonnegative(name: str, value: float) -> None:
    if not (math.isfinite(value) and value >= 0.0):
        raise InvalidSpec(f"{name} must be a finite non-negative number, got {value!r}")


@dataclass(frozen=True)
class BarrierSpec:
    """Real rectangular barrier of height ``v0`` on ``[0, length]`` hit at ``energy``."""

    v0: float
    length: float
    energy: float

    def __post_init__(self) -> None:
        _check_positive("v0", self.v0)
        _check_nonnegative("length", self.length)
        _check_positive("energy", self.energy)

    @property
    def k(self) -> float:
        return math.sqrt(self.energy)

    @property
    def q(self) -> complex:
        return complex_sqrt_branch(self.v0 - self.energy)

    def with_energy(self, energy: float) -> BarrierSpec:
        return BarrierSpec(self.v0, self.length, energy)

    def with_length(self, length: float) -> BarrierSpec:
        return BarrierSpec(self.v0, length, self.energy)


@dataclass(frozen=True)
class AbsorbingBarrierSpec:
    """Barrier with complex height ``v0 * (1 - i*lam)``; ``lam >= 0`` absorbs."""

    v0: float
    lam: float
    length: float
    energy: float

    def __post_init__(self) -> None:
        _check_positive("v0", self.v0)
        if not math.isfinite(self.lam):
            raise InvalidSpec(f"lambda must be finite, got {self.lam!r}")
        _check_nonnegative("length", self.length)
        _check_positive("energy", self.energy)

    @property
    def k(self) -> float:
        return math.sqrt(self.energy)

    @property
    def potential(self) -> complex:
        return self.v0 * (1.0 - 1j * self.lam)

    @property
    def q(self) -> complex:
        return complex_sqrt_branch(self.potential - self.energy)

    @property
    def q0(self) -> float:
        """Decay constant of the unabsorbed barrier, ``sqrt(v0 - E)``."""
        return math.sqrt(self.v0 - self.energy)

    def with_energy(self, energy: float) -> AbsorbingBarrierSpec:
        return AbsorbingBarrierSpec(self.v0, self.lam, self.length, energy)

    def with_length(self, length: float) -> AbsorbingBarrierSpec:
        return AbsorbingBarrierSpec(self.v0, self.lam, length, self.energy)


@dataclass(frozen=True)
class TwoChannelSpec:
    """Elastic barrier ``v0`` and inelastic barrier ``v_i`` coupled by ``v_c``.

    Both potentials and the coupling occupy ``[0, length]``.  The target's
    excitation energy is ``delta``; the inelastic channel must be open.
    """

    v0: float
    v_i: float
    v_c: float
    delta: float
    length: float
    energy: float

    def __post_init__(self) -> None:
        for name in ("v0", "v_i", "v_c"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidSpec(f"{name} must be finite")
        _check_nonnegative("v_c", self.v_c)
        _check_positive("delta", self.delta)
        _check_nonnegative("length", self.length)
        _check_positive("energy", self.energy)
        if self.energy <= self.delta:
            raise ClosedChannel(
                f"energy={self.energy} must exceed delta={self.delta} (inelastic channel closed)"
            )

    @property
    def k(self) -> float:
        return math.sqrt(self.energy)

    @property
    def k_inelastic(self) -> float:
        return math.sqrt(self.energy - self.delta)

    def with_energy(self, energy: float) -> TwoChannelSpec:
        return TwoChannelSpec(self.v0, self.v_i, self.v_c, self.delta, self.length, energy)

    def with_length(self, length: float) -> TwoChannelSpec:
        return TwoChannelSpec(self.v0, self.v_i, self.v_c, self.delta, length, self.energy)

    def with_coupling(self, v_c: float) -> TwoChannelSpec:
        return TwoChannelSpec(self.v0, self.v_i, v_c, self.delta, self.length, self.energy)
