"""Brute-force delay from a literal Gaussian wave packet.

The transmitted field at ``x > L`` is the k-superposition

    Psi(x, t) = int G(k) a(k) exp(i k (x - x0) - i k^2 t) dk

with ``a = 1`` for free propagation.  The packet delay is the shift of the
peak of ``|Psi(L, t)|^2`` relative to free flight, plus the free time L/(2k0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import InvalidSpec, TunnelingError

AmplitudeFn = Callable[[float], complex]


class QuadratureNotConverged(TunnelingError):
    pass


class PeakAtBoundary(TunnelingError):
    pass


class SevereDistortion(TunnelingError):
    pass


@dataclass(frozen=True)
class GaussianPacket:
    k0: float
    sigma_k: float
    x0: float = -1.0

    def __post_init__(self) -> None:
        if not self.sigma_k > 0:
            raise InvalidSpec("sigma_k must be positive")
        if not self.k0 - 5 * self.sigma_k > 0:
            raise InvalidSpec("k0 - 5 sigma_k must be positive")
        if not self.x0 < 0:
            raise InvalidSpec("x0 must be negative (packet starts left of the barrier)")

    def profile(self, k: np.ndarray) -> np.ndarray:
        """Momentum amplitude G(k), normalised so that int |G|^2 dk = 1."""
        s = self.sigma_k
        return (2 * math.pi * s * s) ** -0.25 * np.exp(-((k - self.k0) ** 2) / (4 * s * s))

    @property
    def time_width(self) -> float:
        """RMS duration of |Psi|^2 passing a fixed point."""
        return 1.0 / (4 * self.sigma_k * self.k0)


def gauss_legendre_nodes(a: float, b: float, n_nodes: int, panels: int = 8) -> tuple[np.ndarray, np.ndarray]:
    per_panel = max(n_nodes // panels, 2)
    x, w = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2
    mid = edges[:-1] + half
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


class _Quadrature:
    """Nodes, weights and amplitudes over ``k0 +- 5 sigma``, cached per node count."""

    def __init__(self, packet: GaussianPacket, amplitude_fn: AmplitudeFn | None, n_nodes: int):
        lo = packet.k0 - 5 * packet.sigma_k
        hi = packet.k0 + 5 * packet.sigma_k
        self.k, w = gauss_legendre_nodes(lo, hi, n_nodes)
        amp = np.ones_like(self.k, dtype=complex) if amplitude_fn is None else np.array(
            [complex(amplitude_fn(float(k))) for k in self.k]
        )
        self.weighted = w * packet.profile(self.k) * amp
        self.x0 = packet.x0

    def field(self, x: float, t: np.ndarray) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        phase = self.k[None, :] * (x - self.x0) - (self.k ** 2)[None, :] * t[:, None]
        return np.exp(1j * phase) @ self.weighted


def transmitted_field(
    packet: GaussianPacket,
    amplitude_fn: AmplitudeFn | None,
    x: float,
    t,
    n_nodes: int = 400,
    rtol: float = 1e-8,
) -> np.ndarray | complex:
    """``Psi(x, t)`` by composite Gauss-Legendre quadrature, checked by node doubling.

    ``amplitude_fn=None`` means free propagation.
    """
    scalar = np.ndim(t) == 0
    coarse = _Quadrature(packet, amplitude_fn, n_nodes).field(x, t)
    fine = _Quadrature(packet, amplitude_fn, 2 * n_nodes).field(x, t)
    scale = max(np.max(np.abs(fine)), 1e-300)
    if np.max(np.abs(fine - coarse)) > rtol * scale:
        raise QuadratureNotConverged("node doubling changed the field beyond tolerance")
    return complex(fine[0]) if scalar else fine


@dataclass(frozen=True)
class ArrivalRecord:
    probe_x: float
    t_grid: np.ndarray
    intensity: np.ndarray
    t_peak: float
    width: float


def _rms_width(t: np.ndarray, y: np.ndarray) -> float:
    w = y / np.trapezoid(y, t)
    mean = np.trapezoid(t * w, t)
    return float(np.sqrt(np.trapezoid((t - mean) ** 2 * w, t)))


def _quadratic_peak(t: np.ndarray, y: np.ndarray) -> float:
    i = int(np.argmax(y))
    if i == 0 or i == len(y) - 1:
        raise PeakAtBoundary(f"intensity maximum on grid edge t={t[i]:.6g}")
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    h = t[i + 1] - t[i]
    denom = y0 - 2 * y1 + y2
    return float(t[i] + (0.5 * h * (y0 - y2) / denom if denom != 0 else 0.0))


def arrival(
    packet: GaussianPacket,
    amplitude_fn: AmplitudeFn | None,
    probe_x: float,
    t_center: float,
    n_nodes: int = 400,
    n_coarse: int = 801,
    n_fine: int = 201,
) -> ArrivalRecord:
    """Peak arrival time of ``|Psi(probe_x, t)|^2`` on a grid of +-10 packet durations."""
    quad = _Quadrature(packet, amplitude_fn, n_nodes)
    check = _Quadrature(packet, amplitude_fn, 2 * n_nodes)
    span = 10 * packet.time_width
    t = np.linspace(t_center - span, t_center + span, n_coarse)
    psi = quad.field(probe_x, t)
    ref = check.field(probe_x, t)
    scale = np.max(np.abs(ref))
    if np.max(np.abs(ref - psi)) > 1e-8 * scale:
        raise QuadratureNotConverged("node doubling changed the field beyond tolerance")
    intensity = np.abs(ref) ** 2
    i = int(np.argmax(intensity))
    if i == 0 or i == n_coarse - 1:
        raise PeakAtBoundary(f"intensity maximum on grid edge t={t[i]:.6g}")
    dt = t[1] - t[0]
    t_fine = np.linspace(t[i] - 2 * dt, t[i] + 2 * dt, n_fine)
    fine = np.abs(check.field(probe_x, t_fine)) ** 2
    return ArrivalRecord(probe_x, t, intensity, _quadratic_peak(t_fine, fine), _rms_width(t, intensity))


def measure_delay(
    packet: GaussianPacket,
    amplitude_fn: AmplitudeFn | None,
    barrier_right_edge: float,
    n_nodes: int = 400,
) -> float:
    """Arrival delay at ``x = L`` relative to free flight, plus ``L/(2 k0)``."""
    L = barrier_right_edge
    v = 2 * packet.k0
    t_free_guess = (L - packet.x0) / v
    free = arrival(packet, None, L, t_free_guess, n_nodes)
    moved = arrival(packet, amplitude_fn, L, t_free_guess, n_nodes)
    if moved.width > 10 * free.width:
        raise SevereDistortion(
            f"transmitted peak width {moved.width:.4g} exceeds 10x free width {free.width:.4g}"
        )
    return moved.t_peak - free.t_peak + L / v


def transmitted_mean_momentum(packet: GaussianPacket, amplitude_fn: AmplitudeFn, n_nodes: int = 400) -> float:
    """``<k>`` of the transmitted spectrum ``|G a|^2``."""
    lo, hi = packet.k0 - 5 * packet.sigma_k, packet.k0 + 5 * packet.sigma_k
    k, w = gauss_legendre_nodes(lo, hi, n_nodes)
    dens = np.abs(packet.profile(k) * np.array([complex(amplitude_fn(float(x))) for x in k])) ** 2
    return float(np.sum(w * k * dens) / np.sum(w * dens))
