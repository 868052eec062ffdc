"""``tunneltime`` command line: delay-curve sweeps and reproduction checks."""

from __future__ import annotations

import argparse
import sys
import time

from . import checks
from .core import InvalidSpec, TunnelingError
from .sweep import SweepConfig, parse_range, run_sweep, write_atomic

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

UNITS_NOTE = """\
units: natural units with hbar = 1 and 2m = 1, so E = k^2, the decay constant
inside the barrier is q = sqrt(V0 - E) and the group velocity outside is 2k.
Energies are in units of V0 (default V0 = 1); lengths are in 1/sqrt(V0).
Delay times are in the matching unit 1/V0.

ranges: any of --l, --energy, --e-over-v, --lambda, --vc accepts either a
number or start:stop:count (both endpoints included).  Exactly one flag may
carry a range; it becomes the swept column.  With no range, a single row is
written for the given --l."""

DEFAULT_ENERGY_RATIO = {"single": 0.2, "absorb": 0.2, "twochannel": 0.5, "packet": 0.2}


class ConfigError(InvalidSpec):
    pass


def _add_common(p: argparse.ArgumentParser, model: str) -> None:
    p.add_argument("--v0", type=float, default=1.0, help="barrier height (default 1)")
    p.add_argument("--l", dest="length", default="0:20:201",
                   help="barrier width or start:stop:count (default 0:20:201)")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--energy", help="incident energy E (number or range)")
    grp.add_argument("--e-over-v", dest="e_over_v",
                     help=f"E/V0 (number or range; default {DEFAULT_ENERGY_RATIO[model]})")
    p.add_argument("--out", help="output file (default stdout); written atomically")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the sweep")


def _add_absorb(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", default="0.05", help="absorption strength (default 0.05)")


def _add_twochannel(p: argparse.ArgumentParser) -> None:
    p.add_argument("--vi", type=float, default=1.0, help="inelastic-channel potential (default 1)")
    p.add_argument("--vc", default="0.1", help="channel coupling (default 0.1)")
    p.add_argument("--delta", type=float, default=0.3, help="inelastic threshold (default 0.3)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunneltime",
        description="Tunneling delay through rectangular barriers.",
        epilog=UNITS_NOTE,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("single", help="real barrier", epilog=UNITS_NOTE, formatter_class=fmt)
    _add_common(p, "single")

    p = sub.add_parser("absorb", help="absorbing barrier V0(1 - i lambda)", epilog=UNITS_NOTE, formatter_class=fmt)
    _add_common(p, "absorb")
    _add_absorb(p)

    p = sub.add_parser("twochannel", help="elastic channel coupled to an inelastic one",
                       epilog=UNITS_NOTE, formatter_class=fmt)
    _add_common(p, "twochannel")
    _add_twochannel(p)

    p = sub.add_parser("packet", help="Gaussian wave-packet delay vs phase time", epilog=UNITS_NOTE, formatter_class=fmt)
    _add_common(p, "packet")
    _add_absorb(p)
    _add_twochannel(p)
    p.add_argument("--model", choices=("single", "absorb", "twochannel"), default="single",
                   help="scattering amplitude used by the packet (default single)")
    p.add_argument("--sigma-k", dest="sigma_k", type=float, default=0.02,
                   help="momentum spread as a fraction of k0 (default 0.02)")

    p = sub.add_parser("verify", help="run a reproduction check and report pass/fail")
    p.add_argument("recipe", choices=(*checks.RECIPES, "all"))
    return parser


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    model = args.command
    v0 = args.v0
    if args.energy is not None:
        energy_text, energy_scale = args.energy, 1.0
    else:
        ratio = args.e_over_v if args.e_over_v is not None else str(DEFAULT_ENERGY_RATIO[model])
        energy_text, energy_scale = ratio, v0

    raw: dict[str, tuple[str, float]] = {
        "length": (args.length, 1.0),
        "energy": (energy_text, energy_scale),
    }
    if hasattr(args, "lam"):
        raw["lambda"] = (args.lam, 1.0)
    if hasattr(args, "vc"):
        raw["vc"] = (args.vc, 1.0)

    parsed: dict[str, tuple[float, ...]] = {}
    for name, (text, scale) in raw.items():
        try:
            parsed[name] = tuple(scale * v for v in parse_range(text))
        except InvalidSpec as exc:
            raise ConfigError(f"{name}: {exc}") from None
    ranged = [name for name, (text, _) in raw.items() if ":" in text]
    if len(ranged) > 1:
        raise ConfigError(f"only one swept parameter allowed, got {', '.join(ranged)}")
    swept = ranged[0] if ranged else "length"

    fixed = {name: vals[0] for name, vals in parsed.items() if name != swept}
    fixed["v0"] = v0
    if model in ("twochannel", "packet"):
        fixed.update(vi=args.vi, delta=args.delta)
    if model == "packet":
        fixed["sigma_k"] = args.sigma_k
    return SweepConfig(
        model=model,
        swept=swept,
        values=parsed[swept],
        fixed=fixed,
        packet_model=getattr(args, "model", "single"),
        output_format=args.format,
    )


def _verify(recipe: str) -> int:
    start = time.perf_counter()
    results = checks.run_recipe(recipe)
    for c in results:
        print(c.line())
    failed = sum(not c.passed for c in results)
    print(f"{len(results) - failed}/{len(results)} checks passed in {time.perf_counter() - start:.1f} s")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args.recipe)
        if args.jobs < 1:
            raise ConfigError(f"jobs: must be >= 1, got {args.jobs}")
        config = config_from_args(args)
        curve = run_sweep(config, jobs=args.jobs)
        text = curve.render()
        if args.out:
            write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except InvalidSpec as exc:
        print(f"tunneltime: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TunnelingError, FloatingPointError, ArithmeticError) as exc:
        print(f"tunneltime: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"tunneltime: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
