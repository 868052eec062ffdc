"""Tunneling times through rectangular barriers.

Real, absorbing and two-channel barriers share one convention: natural units
with hbar = 1 and 2m = 1 (see :mod:`tunneltime.core`).
"""

from __future__ import annotations

from .absorbing import absorbing_phase_time, absorbing_transmission, hartman_destruction_asymptote
from .core import (
    AbsorbingBarrierSpec,
    BarrierSpec,
    ClosedChannel,
    DegenerateEnergy,
    InvalidSpec,
    OutOfRegime,
    SingularMatching,
    SingularTerm,
    TunnelingError,
    TwoChannelSpec,
)
from .packet import GaussianPacket, measure_delay
from .single_channel import closed_form_transmission, locate_hump, phase_time, solve_by_matching
from .two_channel import elastic_phase_time, hartman_criterion, saturation_verdict, solve_two_channel

__all__ = [
    "AbsorbingBarrierSpec", "BarrierSpec", "ClosedChannel", "DegenerateEnergy", "GaussianPacket",
    "InvalidSpec", "OutOfRegime", "SingularMatching", "SingularTerm", "TunnelingError", "TwoChannelSpec",
    "absorbing_phase_time", "absorbing_transmission", "closed_form_transmission", "elastic_phase_time",
    "hartman_criterion", "hartman_destruction_asymptote", "locate_hump", "measure_delay", "phase_time",
    "saturation_verdict", "solve_by_matching", "solve_two_channel",
]
__version__ = "0.1.0"
