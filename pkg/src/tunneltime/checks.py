"""Reproduction recipes behind ``tunneltime verify``.

Each recipe returns a list of :class:`Check` records (measured value,
expected value, tolerance, verdict); nothing here raises on a failed check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import absorbing, packet, single_channel, two_channel
from .core import AbsorbingBarrierSpec, BarrierSpec, TwoChannelSpec

HUMP_BAND = (0.08, 0.14)
PUBLISHED_SLOPE = 0.01563
REPULSIVE = TwoChannelSpec(1.0, 1.0, 0.1, 0.3, 1.0, 0.5)
ATTRACTIVE = TwoChannelSpec(1.0, -0.5, 0.1, 0.3, 1.0, 0.5)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    expected: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured {self.measured:.6g}; expected {self.expected}"


def criterion_grid() -> list[TwoChannelSpec]:
    """Ten criterion-true and ten criterion-false specs, all with |margin| > 0.05."""
    good, bad = [], []
    for v0, vi, vc, e in itertools.product([1.0, 1.5], [1.2, 0.8, 0.0, -0.5], [0.1, 0.3], [0.5, 0.7]):
        spec = TwoChannelSpec(v0, vi, vc, 0.3, 1.0, e)
        margin = two_channel.hartman_margin(spec)
        if margin > 0.05:
            good.append(spec)
        elif margin < -0.05:
            bad.append(spec)
    return good[:10] + bad[:10]


def plateau_values() -> list[Check]:
    out = []
    for energy, expected in ((0.2, 2.5), (0.5, 2.0)):
        q = math.sqrt(1.0 - energy)
        tau = single_channel.phase_time(BarrierSpec(1.0, 30.0 / q, energy))
        rel = abs(tau - expected) / expected
        out.append(Check(f"plateau E={energy} qL=30", tau, f"{expected} within 1e-3 rel", rel < 1e-3))
    return out


def delay_curve(energy: float, v0: float = 1.0, ql_max: float = 30.0, n: int = 301) -> tuple[np.ndarray, np.ndarray]:
    q = math.sqrt(v0 - energy)
    lengths = np.linspace(ql_max / q / n, ql_max / q, n)
    spec = BarrierSpec(v0, 1.0, energy)
    return lengths, np.array([single_channel.phase_time(spec.with_length(L)) for L in lengths])


def interior_maxima(values: np.ndarray, noise: float = 1e-10) -> int:
    d = np.diff(values)
    rising = d > noise
    falling = d < -noise
    count, last_rise = 0, False
    for r, f in zip(rising, falling):
        if r:
            last_rise = True
        elif f and last_rise:
            count += 1
            last_rise = False
    return count


def shape_dichotomy() -> list[Check]:
    _, mono = delay_curve(0.75)
    worst_drop = float(-np.min(np.diff(mono)))
    _, hump = delay_curve(0.1)
    plateau = single_channel.asymptotic_time(BarrierSpec(1.0, 1.0, 0.1))
    n_max = interior_maxima(hump)
    exceeds = float(np.max(hump) - plateau)
    settles = abs(hump[-1] - plateau) < 1e-6 * plateau
    return [
        Check("E/V0=0.75 monotone (largest drop)", worst_drop, "<= 1e-10", worst_drop <= 1e-10),
        Check("E/V0=0.1 interior maxima", n_max, "exactly 1", n_max == 1),
        Check("E/V0=0.1 peak above plateau", exceeds, "> 0 and settles on plateau", exceeds > 0 and settles),
    ]


def hump_discrepancy() -> list[Check]:
    l_num = single_channel.locate_hump(0.2, 1.0)
    l_formula = single_channel.hump_position_formula(0.2, 1.0)
    rel = abs(l_num - l_formula) / l_num
    lo, hi = HUMP_BAND
    return [Check(f"hump position E/V0=0.2 (L_max={l_num:.6g}, L0={l_formula:.6g})",
                  rel, f"in [{lo}, {hi}]", lo <= rel <= hi)]


def approach_rate(energy: float, ql_window: tuple[float, float] = (5.0, 15.0), n: int = 21) -> float:
    """Fitted decay rate of ``|tau - tau_asymp| / L`` divided by ``2q`` (1 means exact)."""
    q = math.sqrt(1.0 - energy)
    lengths = np.linspace(ql_window[0] / q, ql_window[1] / q, n)
    spec = BarrierSpec(1.0, 1.0, energy)
    resid = np.array([abs(single_channel.plateau_excess_time(spec.with_length(L))) for L in lengths])
    slope = np.polyfit(lengths, np.log(resid / lengths), 1)[0]
    return -slope / (2 * q)


def exponential_approach() -> list[Check]:
    out = []
    for energy in (0.2, 0.75):
        ratio = approach_rate(energy)
        out.append(Check(f"approach rate / 2q at E/V0={energy}", ratio, "1 within 5%", abs(ratio - 1) < 0.05))
    return out


def absorbing_slope() -> list[Check]:
    asym = absorbing.hartman_destruction_asymptote(1.0, 0.05, 0.2)
    rel = abs(asym.fitted_slope - PUBLISHED_SLOPE) / PUBLISHED_SLOPE
    lams = np.array([0.01, 0.02, 0.05, 0.1])
    slopes = np.array([absorbing.hartman_destruction_asymptote(1.0, lam, 0.2).fitted_slope for lam in lams])
    fit = np.polyfit(lams, slopes, 1)
    pred = np.polyval(fit, lams)
    r2 = 1 - np.sum((slopes - pred) ** 2) / np.sum((slopes - slopes.mean()) ** 2)
    exact_rel = abs(asym.fitted_slope - asym.exact_slope) / asym.exact_slope
    return [
        Check("tail slope vs published 0.01563 (rel. error)", rel, "< 0.05", rel < 0.05),
        Check("tail slope vs exact -dIm(q)/dE (rel. error)", exact_rel, "< 0.05", exact_rel < 0.05),
        Check("slope linear in lambda (R^2)", r2, "> 0.99", r2 > 0.99),
    ]


def twochannel_criterion() -> list[Check]:
    grid = criterion_grid()
    verdicts = [two_channel.saturation_verdict(s) for s in grid]
    agree = sum(v.agrees for v in verdicts)
    rep = two_channel.saturation_verdict(REPULSIVE)
    att = two_channel.saturation_verdict(ATTRACTIVE)
    return [
        Check(f"criterion/verdict agreement on {len(grid)} specs", agree, f"{len(grid)}", agree == len(grid)),
        Check("repulsive V_I=+1 tail slope", rep.slope, "saturates", rep.verdict == "saturates"),
        Check("attractive V_I=-0.5 tail slope", att.slope, "grows", att.verdict == "grows"),
    ]


def packet_equivalence(ql_values=(3.0, 7.5, 12.0), tol: float = 0.05) -> list[Check]:
    out = []
    cases: list[tuple[str, float, float, Callable[[float, float], complex], Callable[[float], float]]] = [
        (
            "single", 0.2, 1.0,
            lambda k, L: single_channel.closed_form_transmission(BarrierSpec(1.0, L, k * k)),
            lambda L: single_channel.phase_time(BarrierSpec(1.0, L, 0.2)),
        ),
        (
            "absorb", 0.2, 1.0,
            lambda k, L: absorbing.absorbing_transmission(AbsorbingBarrierSpec(1.0, 0.05, L, k * k)),
            lambda L: absorbing.absorbing_phase_time(AbsorbingBarrierSpec(1.0, 0.05, L, 0.2)),
        ),
        (
            "twochannel", 0.5, 1.0,
            lambda k, L: two_channel.solve_two_channel(REPULSIVE.with_length(L).with_energy(k * k)).a_t,
            lambda L: two_channel.elastic_phase_time(REPULSIVE.with_length(L)),
        ),
    ]
    for name, energy, v0, amp, tau_fn in cases:
        k0 = math.sqrt(energy)
        q = math.sqrt(v0 - energy)
        wp = packet.GaussianPacket(k0, 0.02 * k0)
        for ql in ql_values:
            L = ql / q
            measured = packet.measure_delay(wp, lambda k, L=L: amp(k, L), L)
            tau = tau_fn(L)
            rel = abs(measured - tau) / tau
            out.append(Check(f"packet vs phase time [{name}, qL={ql}] (rel. diff)", rel, f"< {tol}", rel < tol))
    return out


RECIPES: dict[str, Callable[[], list[Check]]] = {
    "fig1": lambda: plateau_values() + shape_dichotomy(),
    "fig2": hump_discrepancy,
    "approach": exponential_approach,
    "eq16": absorbing_slope,
    "twochannel-criterion": twochannel_criterion,
    "packet": packet_equivalence,
}


def run_recipe(name: str) -> list[Check]:
    if name == "all":
        return [c for recipe in RECIPES.values() for c in recipe()]
    return RECIPES[name]()
