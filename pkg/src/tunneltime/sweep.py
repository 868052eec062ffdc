"""Parameter sweeps producing delay curves as CSV or JSON.

Column order is fixed per model (see ``COLUMNS``) so that plotting scripts
can rely on it.  Floats are written with 12 significant digits; identical
configurations give byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import absorbing, packet, single_channel, two_channel
from .core import AbsorbingBarrierSpec, BarrierSpec, InvalidSpec, TwoChannelSpec

Model = Literal["single", "absorb", "twochannel", "packet"]

COLUMNS: dict[str, tuple[str, ...]] = {
    "single": ("length", "energy", "v0", "tau", "transmission", "tau_asymp"),
    "absorb": (
        "length", "energy", "v0", "lambda", "tau", "transmission", "absorbed",
        "tau_asymp", "slope_published", "slope_exact",
    ),
    "twochannel": (
        "length", "energy", "v0", "vi", "vc", "delta", "tau", "transmission",
        "inelastic_transmission", "flux", "hartman_margin",
    ),
    "packet": ("length", "energy", "v0", "sigma_k", "tau_packet", "tau_phase", "rel_diff"),
}

SWEEPABLE = ("length", "energy", "lambda", "vc")
PARAMS = ("length", "energy", "v0", "lambda", "vi", "vc", "delta", "sigma_k")


@dataclass(frozen=True)
class SweepConfig:
    model: Model
    swept: str
    values: tuple[float, ...]
    fixed: dict[str, float] = field(default_factory=dict)
    packet_model: str = "single"
    output_format: Literal["csv", "json"] = "csv"

    def rows_params(self) -> list[dict[str, float]]:
        return [{**self.fixed, self.swept: v} for v in self.values]


def parse_range(text: str) -> tuple[float, ...]:
    """``start:stop:count`` inclusive of both ends, or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidSpec(f"bad range {text!r}; expected a number or start:stop:count") from None
    if count < 1:
        raise InvalidSpec(f"range {text!r} needs count >= 1")
    if count > 1 and not stop > start:
        raise InvalidSpec(f"range {text!r} must be increasing")
    return tuple(float(x) for x in np.linspace(start, stop, count))


def _spec_for(model: str, p: dict[str, float]):
    if model == "single":
        return BarrierSpec(p["v0"], p["length"], p["energy"])
    if model == "absorb":
        return AbsorbingBarrierSpec(p["v0"], p["lambda"], p["length"], p["energy"])
    if model == "twochannel":
        return TwoChannelSpec(p["v0"], p["vi"], p["vc"], p["delta"], p["length"], p["energy"])
    raise InvalidSpec(f"unknown model {model!r}")


def validate(config: SweepConfig) -> None:
    """Reject configs that would fail before any computation starts."""
    if config.model not in COLUMNS:
        raise InvalidSpec(f"unknown model {config.model!r}")
    if config.swept not in SWEEPABLE:
        raise InvalidSpec(f"cannot sweep {config.swept!r}")
    if config.output_format not in ("csv", "json"):
        raise InvalidSpec(f"unknown format {config.output_format!r}")
    if not config.values:
        raise InvalidSpec("empty sweep")
    if any(b <= a for a, b in zip(config.values, config.values[1:])):
        raise InvalidSpec(f"{config.swept} values must be strictly increasing")
    inner = config.packet_model if config.model == "packet" else config.model
    for p in config.rows_params():
        spec = _spec_for(inner, p)
        if abs(p["energy"] - p["v0"]) < single_channel.THRESHOLD_GAP:
            raise InvalidSpec(f"energy={p['energy']} coincides with v0; delay undefined")
        if config.model == "packet":
            k0 = math.sqrt(p["energy"])
            packet.GaussianPacket(k0, p["sigma_k"] * k0)
            if inner == "twochannel" and not spec.energy > spec.delta:
                raise InvalidSpec("packet energy must exceed delta")


def _amplitude_fn(model: str, p: dict[str, float]):
    if model == "single":
        return lambda k: single_channel.closed_form_transmission(BarrierSpec(p["v0"], p["length"], k * k))
    if model == "absorb":
        return lambda k: absorbing.absorbing_transmission(
            AbsorbingBarrierSpec(p["v0"], p["lambda"], p["length"], k * k)
        )
    return lambda k: two_channel.solve_two_channel(
        TwoChannelSpec(p["v0"], p["vi"], p["vc"], p["delta"], p["length"], k * k)
    ).a_t


def _maybe_asymptote(energy: float, v0: float) -> float:
    return 1.0 / math.sqrt(energy * (v0 - energy)) if 0 < energy < v0 else math.nan


def compute_row(model: str, p: dict[str, float], packet_model: str = "single") -> dict[str, float]:
    if model == "single":
        spec = BarrierSpec(p["v0"], p["length"], p["energy"])
        return {
            "length": spec.length, "energy": spec.energy, "v0": spec.v0,
            "tau": single_channel.phase_time(spec),
            "transmission": abs(single_channel.closed_form_transmission(spec)) ** 2,
            "tau_asymp": _maybe_asymptote(spec.energy, spec.v0),
        }
    if model == "absorb":
        spec = AbsorbingBarrierSpec(p["v0"], p["lambda"], p["length"], p["energy"])
        below = 0 < spec.energy < spec.v0
        return {
            "length": spec.length, "energy": spec.energy, "v0": spec.v0, "lambda": spec.lam,
            "tau": absorbing.absorbing_phase_time(spec),
            "transmission": abs(absorbing.absorbing_transmission(spec)) ** 2,
            "absorbed": absorbing.absorbed_fraction(spec),
            "tau_asymp": _maybe_asymptote(spec.energy, spec.v0),
            "slope_published": absorbing.published_slope(spec.v0, spec.lam, spec.energy) if below else math.nan,
            "slope_exact": absorbing.exact_slope(spec.v0, spec.lam, spec.energy) if below else math.nan,
        }
    if model == "twochannel":
        spec = TwoChannelSpec(p["v0"], p["vi"], p["vc"], p["delta"], p["length"], p["energy"])
        sol = two_channel.solve_two_channel(spec)
        return {
            "length": spec.length, "energy": spec.energy, "v0": spec.v0, "vi": spec.v_i,
            "vc": spec.v_c, "delta": spec.delta,
            "tau": two_channel.elastic_phase_time(spec),
            "transmission": abs(sol.a_t) ** 2,
            "inelastic_transmission": spec.k_inelastic / spec.k * abs(sol.big_t) ** 2,
            "flux": sol.flux,
            "hartman_margin": two_channel.hartman_margin(spec),
        }
    if model == "packet":
        k0 = math.sqrt(p["energy"])
        wp = packet.GaussianPacket(k0, p["sigma_k"] * k0)
        measured = packet.measure_delay(wp, _amplitude_fn(packet_model, p), p["length"])
        reference = compute_row(packet_model, p)["tau"]
        return {
            "length": p["length"], "energy": p["energy"], "v0": p["v0"], "sigma_k": p["sigma_k"],
            "tau_packet": measured, "tau_phase": reference,
            "rel_diff": (measured - reference) / reference if reference else math.nan,
        }
    raise InvalidSpec(f"unknown model {model!r}")


@dataclass(frozen=True)
class DelayCurve:
    config: SweepConfig
    columns: tuple[str, ...]
    rows: list[dict[str, float]]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(fmt(row[c]) for c in self.columns))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "config": {
                "model": self.config.model,
                "swept": self.config.swept,
                "values": [_round(v) for v in self.config.values],
                "fixed": {k: _round(v) for k, v in sorted(self.config.fixed.items())},
                **({"packet_model": self.config.packet_model} if self.config.model == "packet" else {}),
            },
            "columns": list(self.columns),
            "rows": [{c: _round(row[c]) for c in self.columns} for row in self.rows],
        }
        return json.dumps(payload, indent=2) + "\n"

    def render(self) -> str:
        return self.to_json() if self.config.output_format == "json" else self.to_csv()


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _round(x: float) -> float | None:
    return None if not math.isfinite(x) else float(fmt(x))


def run_sweep(config: SweepConfig, jobs: int = 1) -> DelayCurve:
    validate(config)
    params = config.rows_params()
    if jobs > 1 and len(params) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(compute_row, [config.model] * len(params), params,
                                 [config.packet_model] * len(params)))
    else:
        rows = [compute_row(config.model, p, config.packet_model) for p in params]
    for row in rows:
        key = "tau_packet" if config.model == "packet" else "tau"
        if not math.isfinite(row[key]):
            raise FloatingPointError(f"non-finite delay at {config.swept}={row.get(config.swept)}")
    return DelayCurve(config, COLUMNS[config.model], rows)


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file so a failed run leaves no partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tunneltime-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

