"""Phase unwrapping, Richardson differentiation, tail fits and extremum search."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .core import TunnelingError

EPS = np.finfo(float).eps
MAX_REFINEMENT_LEVELS = 20


class UnresolvableJump(TunnelingError):
    """Phase cannot be made continuous; the sampler likely passes through zero."""


class NoisyFunction(TunnelingError):
    """Richardson residual never settled below the requested tolerance."""


class InsufficientSamples(TunnelingError):
    """Too few samples inside the fit window."""


class NotUnimodal(TunnelingError):
    """Coarse scan found more than one interior maximum."""


@dataclass(frozen=True)
class UnwrappedPhaseTrace:
    grid: np.ndarray
    phase: np.ndarray
    jumps_resolved: int


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    error_estimate: float
    step_used: float


def unwrap_phase(
    sampler: Callable[[float], complex],
    grid: Sequence[float],
    max_step: float = math.pi / 2,
) -> UnwrappedPhaseTrace:
    """Continuous phase of ``sampler`` along ``grid``.

    Adjacent principal-value increments larger than ``max_step`` are taken as
    under-resolved and midpoints are inserted (up to 20 levels deep), so the
    returned grid may be finer than the one passed in.  The first sample keeps
    its principal value.  ``jumps_resolved`` counts the 2*pi corrections a
    naive principal-value trace would have needed.
    """
    xs = [float(x) for x in grid]
    if len(xs) < 1:
        raise ValueError("grid must not be empty")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("grid must be strictly increasing")

    def sample(x: float) -> complex:
        z = complex(sampler(x))
        if z == 0 or not cmath.isfinite(z):
            raise UnresolvableJump(f"sampler returned {z!r} at {x!r}; phase undefined")
        return z

    out_x = [xs[0]]
    z_prev = sample(xs[0])
    out_phase = [cmath.phase(z_prev)]

    def walk(x0: float, z0: complex, x1: float, z1: complex, level: int) -> None:
        step = cmath.phase(z1 / z0)
        if abs(step) > max_step:
            if level >= MAX_REFINEMENT_LEVELS:
                raise UnresolvableJump(
                    f"phase increment {step:.3g} rad unresolved between {x0!r} and {x1!r}"
                )
            xm = 0.5 * (x0 + x1)
            zm = sample(xm)
            walk(x0, z0, xm, zm, level + 1)
            walk(xm, zm, x1, z1, level + 1)
            return
        out_x.append(x1)
        out_phase.append(out_phase[-1] + step)

    for x_next in xs[1:]:
        z_next = sample(x_next)
        walk(out_x[-1], z_prev, x_next, z_next, 0)
        z_prev = z_next

    phase = np.asarray(out_phase)
    naive = np.angle(np.exp(1j * phase))
    jumps = int(np.count_nonzero(np.abs(np.diff(naive)) > math.pi))
    return UnwrappedPhaseTrace(np.asarray(out_x), phase, jumps)


def anchored_phase(sampler: Callable[[float], complex], x0: float) -> Callable[[float], float]:
    """Phase of ``sampler`` continued from its principal value at ``x0``.

    Valid as long as the true phase moves by less than pi between ``x0`` and
    the evaluation point, which is the case for differentiation stencils.
    """
    z0 = complex(sampler(x0))
    if z0 == 0:
        raise UnresolvableJump(f"sampler vanishes at {x0!r}")
    base = cmath.phase(z0)
    ref = z0.conjugate()

    def phase(x: float) -> float:
        return base + cmath.phase(complex(sampler(x)) * ref)

    return phase


def derivative(
    f: Callable[[float], float],
    x0: float,
    initial_step: float | None = None,
    rtol: float = 1e-6,
    max_halvings: int = 12,
) -> DerivativeEstimate:
    """Central difference with two Richardson levels and adaptive step halving.

    The extrapolated h**6 estimate is compared with the h**4 one; the step is
    halved while that residual keeps shrinking.  The reported error estimate
    also carries the round-off floor ``eps * |f| / h``.
    """
    h = 1e-4 * max(abs(x0), 1.0) if initial_step is None else float(initial_step)
    if h <= 0:
        raise ValueError("initial_step must be positive")

    cache: dict[float, float] = {}

    def central(step: float) -> float:
        if step not in cache:
            cache[step] = (f(x0 + step) - f(x0 - step)) / (2.0 * step)
        return cache[step]

    f0 = abs(f(x0))
    best: DerivativeEstimate | None = None
    for _ in range(max_halvings):
        d0, d1, d2 = central(h), central(h / 2), central(h / 4)
        r1a = (4.0 * d1 - d0) / 3.0
        r1b = (4.0 * d2 - d1) / 3.0
        r2 = (16.0 * r1b - r1a) / 15.0
        roundoff = 4.0 * EPS * max(f0, abs(f(x0 + h)), 1e-300) / (h / 4)
        err = abs(r2 - r1b) + roundoff
        if best is not None and err >= best.error_estimate:
            break
        best = DerivativeEstimate(r2, err, h)
        h /= 2.0

    assert best is not None
    if best.error_estimate > rtol * max(abs(best.value), 1.0):
        raise NoisyFunction(
            f"derivative at {x0!r}: residual {best.error_estimate:.3g} above tolerance"
        )
    return best


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    residual: float
    n_samples: int


def fit_tail_slope(
    samples: Sequence[tuple[float, float]],
    window: tuple[float, float],
    min_samples: int = 8,
) -> TailFit:
    """Unweighted least-squares line through the samples with ``x`` in ``window``.

    ``residual`` is the RMS deviation from the fitted line.
    """
    data = np.asarray(samples, dtype=float).reshape(-1, 2)
    lo, hi = window
    mask = (data[:, 0] >= lo) & (data[:, 0] <= hi)
    x, y = data[mask, 0], data[mask, 1]
    if x.size < min_samples:
        raise InsufficientSamples(f"{x.size} samples in window {window}, need {min_samples}")
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    intercept = float(y.mean() - slope * x.mean())
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return TailFit(slope, intercept, rms, int(x.size))


def find_maximum(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    n_scan: int = 41,
    xtol: float = 1e-6,
    noise: float = 1e-10,
) -> float:
    """Location of the maximum of ``f`` on ``bracket``.

    A coarse scan establishes unimodality.  If the scan maximum sits on an
    end point (monotone ``f``) that end point is returned; otherwise a
    golden-section search refines the interior peak to ``xtol``.
    """
    a, b = bracket
    if not b > a:
        raise ValueError("bracket must satisfy a < b")
    xs = np.linspace(a, b, n_scan)
    ys = np.array([f(x) for x in xs])

    interior = [
        i
        for i in range(1, n_scan - 1)
        if ys[i] > ys[i - 1] + noise and ys[i] > ys[i + 1] + noise
    ]
    if len(interior) > 1:
        raise NotUnimodal(f"{len(interior)} local maxima on {bracket}")
    i = int(np.argmax(ys))
    if i in (0, n_scan - 1):
        return float(xs[i])

    res = optimize.minimize_scalar(
        lambda x: -f(x),
        bracket=(xs[i - 1], xs[i], xs[i + 1]),
        method="golden",
        options={"xtol": xtol / max(abs(xs[i]), 1.0)},
    )
    return float(res.x)
