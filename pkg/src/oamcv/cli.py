"""Command-line front end: channel sweeps, death thresholds, tomography, beam images.

Exit codes: 0 success, 2 configuration error, 3 numerical error, 4 I/O error.
All outputs are deterministic for identical configuration and seed: sweep
rows come out sorted by (l, delta, eta) and JSON key order is fixed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from . import __version__
from .channels import apply_channel
from .criteria import classify, entanglement_death_eta, steering_death_eta
from .errors import InputError, NumericalError, ToolkitError
from .gaussian import ChannelParams, SqueezingSpec, make_tmss, validate
from .modes import (LGModeSpec, count_dark_stripes, lg_field, mode_image_filename,
                    tilted_lens_pattern, write_pgm)
from .tomography import (SETTINGS, ReconstructionWarning, expected_variances,
                         reconstruct_cm, simulate_measurements, variances_from_batches)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

DEFAULT_V = 0.47
DEFAULT_VP = 4.11
DEFAULT_CHARGES = (0, 1, 2)
DEFAULT_SEED = 12345
DEFAULT_N_PER_SETTING = 100_000
DEFAULT_ASTIGMATISM = 2.0

SWEEP_HEADER = "l,eta,delta,nu,entangled,gAB,gBA,class"

# parameter bundles of the decoherence experiments: loss only, the three
# noise levels of the sudden-death scan, and the steering comparison
PRESETS = {
    "fig2c": {"deltas": (0.0,)},
    "fig3": {"deltas": (0.15, 0.5, 1.0)},
    "fig4": {"deltas": (0.0, 0.15)},
}

_CONFIG_KEYS = ("specs", "deltas", "eta_start", "eta_stop", "eta_step",
                "charges", "out", "seed", "n_per_setting")


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one sweep, threshold, or tomography run."""

    specs: Mapping[int, SqueezingSpec] = field(default_factory=dict)
    deltas: tuple = (0.0,)
    eta_start: float = 0.0
    eta_stop: float = 1.0
    eta_step: float = 0.01
    charges: tuple = DEFAULT_CHARGES
    out: Optional[str] = None
    seed: int = DEFAULT_SEED
    n_per_setting: int = DEFAULT_N_PER_SETTING

    def __post_init__(self):
        try:
            charges = tuple(self.charges)
        except TypeError as exc:
            raise InputError(f"charges must be a list of integers, got {self.charges!r}") from exc
        if not charges:
            raise InputError("charges list must not be empty")
        for l in charges:
            if isinstance(l, bool) or not isinstance(l, (int, np.integer)):
                raise InputError(f"charges must be integers, got {l!r}")
        charges = tuple(int(l) for l in charges)
        if len(set(charges)) != len(charges):
            raise InputError(f"charges must be distinct, got {charges}")
        specs = dict(self.specs) if self.specs else \
            {l: SqueezingSpec(DEFAULT_V, DEFAULT_VP) for l in charges}
        specs = {int(l): (s if isinstance(s, SqueezingSpec) else SqueezingSpec(*s))
                 for l, s in specs.items()}
        missing = set(charges) - set(specs)
        if missing:
            raise InputError(f"no squeezing spec for charges {sorted(missing)}")
        try:
            deltas = tuple(float(d) for d in self.deltas)
            start, stop = float(self.eta_start), float(self.eta_stop)
            step = float(self.eta_step)
            n = int(self.n_per_setting)
        except (TypeError, ValueError) as exc:
            raise InputError(f"non-numeric sweep parameter: {exc}") from exc
        if not deltas:
            raise InputError("deltas list must not be empty")
        for d in deltas:
            if not math.isfinite(d) or d < 0.0:
                raise InputError(f"excess noise must be >= 0, got {d!r}")
        if not (0.0 <= start <= stop <= 1.0):
            raise InputError(f"eta grid [{start}, {stop}] must lie within [0, 1]")
        if not math.isfinite(step) or step <= 0.0:
            raise InputError(f"eta step must be positive, got {step!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise InputError(f"seed must be an integer, got {self.seed!r}")
        if n < 2:
            raise InputError(f"n_per_setting must be >= 2, got {self.n_per_setting!r}")
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "eta_start", start)
        object.__setattr__(self, "eta_stop", stop)
        object.__setattr__(self, "eta_step", step)
        object.__setattr__(self, "charges", charges)
        object.__setattr__(self, "out", None if self.out is None else str(self.out))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "n_per_setting", n)

    def to_json_dict(self) -> dict:
        return {
            "specs": {str(l): self.specs[l].to_json_dict() for l in sorted(self.specs)},
            "deltas": list(self.deltas),
            "eta_start": self.eta_start,
            "eta_stop": self.eta_stop,
            "eta_step": self.eta_step,
            "charges": list(self.charges),
            "out": self.out,
            "seed": self.seed,
            "n_per_setting": self.n_per_setting,
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "SweepConfig":
        unknown = set(d) - set(_CONFIG_KEYS) - {"v", "vp", "r"}
        if unknown:
            raise InputError(f"unknown config keys {sorted(unknown)}")
        kwargs = {k: d[k] for k in _CONFIG_KEYS if k in d}
        if "deltas" in kwargs:
            kwargs["deltas"] = tuple(kwargs["deltas"])
        if "charges" in kwargs:
            kwargs["charges"] = tuple(kwargs["charges"])
        if "specs" in kwargs:
            if any(k in d for k in ("v", "vp", "r")):
                raise InputError("give either per-charge specs or a global v/vp (or r), not both")
            kwargs["specs"] = {int(l): SqueezingSpec.from_json_dict(s)
                               for l, s in kwargs["specs"].items()}
            if "charges" not in kwargs:
                kwargs["charges"] = tuple(sorted(kwargs["specs"]))
        elif any(k in d for k in ("v", "vp", "r")):
            spec = _spec_from_options(d.get("v"), d.get("vp"), d.get("r"))
            charges = kwargs.get("charges", DEFAULT_CHARGES)
            kwargs["specs"] = {int(l): spec for l in charges}
        return cls(**kwargs)


def _spec_from_options(v, vp, r) -> SqueezingSpec:
    if r is not None:
        if v is not None or vp is not None:
            raise InputError("give either r or the (v, vp) pair, not both")
        return SqueezingSpec.from_r(r)
    if (v is None) != (vp is None):
        raise InputError("v and vp must be given together")
    if v is None:
        return SqueezingSpec(DEFAULT_V, DEFAULT_VP)
    return SqueezingSpec(v, vp)


def eta_grid(config: SweepConfig) -> list:
    """Transmission grid start, start+step, ... capped at stop."""
    count = int(math.floor((config.eta_stop - config.eta_start) / config.eta_step + 1e-9)) + 1
    return [round(config.eta_start + i * config.eta_step, 10) for i in range(count)]


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def run_sweep(config: SweepConfig) -> list:
    """CSV rows of the criteria sweep, one per (l, delta, eta), sorted.

    Returns the rows (header included) and writes them to config.out when set.
    """
    rows = [SWEEP_HEADER]
    etas = eta_grid(config)
    for l in sorted(config.charges):
        source = make_tmss(config.specs[l])
        for delta in sorted(config.deltas):
            for eta in etas:
                report = classify(apply_channel(source, ChannelParams(eta, delta)))
                rows.append(",".join([
                    str(l), _fmt(eta), _fmt(delta), _fmt(report.nu),
                    "true" if report.entangled else "false",
                    _fmt(report.g_ab), _fmt(report.g_ba), report.steering_class,
                ]))
    if config.out is not None:
        Path(config.out).write_text("\n".join(rows) + "\n")
    return rows


def run_thresholds(config: SweepConfig) -> dict:
    """Sudden-death transmission thresholds per charge and noise level.

    Entries hold eta* for entanglement and for each steering direction,
    with None where no transition occurs inside (0, 1].
    """
    results = []
    for l in sorted(config.charges):
        spec = config.specs[l]
        for delta in sorted(config.deltas):
            results.append({
                "l": l,
                "delta": delta,
                "entanglement": entanglement_death_eta(spec, delta),
                "steering_AB": steering_death_eta(spec, delta, "AB"),
                "steering_BA": steering_death_eta(spec, delta, "BA"),
            })
    report = {"results": results}
    if config.out is not None:
        Path(config.out).write_text(json.dumps(report, indent=2) + "\n")
    return report


def _criteria_or_error(cm) -> tuple:
    try:
        return classify(cm).to_json_dict(), None
    except ToolkitError as exc:
        return None, str(exc)


def run_tomo(config: SweepConfig) -> dict:
    """Simulate-measure-reconstruct-classify at every (l, delta, eta) point.

    Each entry reports the analytic variances and criteria next to the
    reconstructed ones, the per-entry reconstruction errors, and the
    sub-seed that makes the point individually reproducible.
    """
    results = []
    point = 0
    for l in sorted(config.charges):
        source = make_tmss(config.specs[l])
        for delta in sorted(config.deltas):
            for eta in eta_grid(config):
                true_cm = apply_channel(source, ChannelParams(eta, delta))
                run_seed = int(np.random.SeedSequence([config.seed, point])
                               .generate_state(1, np.uint64)[0])
                point += 1
                batches = simulate_measurements(true_cm, config.n_per_setting, run_seed)
                measured = variances_from_batches(batches)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", ReconstructionWarning)
                    rec_cm = reconstruct_cm(measured)
                truth = expected_variances(true_cm)
                rec_criteria, rec_error = _criteria_or_error(rec_cm)
                entry_errors = rec_cm.entries - true_cm.entries
                entry = {
                    "l": l,
                    "eta": eta,
                    "delta": delta,
                    "seed": run_seed,
                    "true": {
                        "variances_db": {s: truth.db(s) for s in SETTINGS},
                        "criteria": classify(true_cm).to_json_dict(),
                    },
                    "reconstructed": {
                        "variances_db": {s: measured.db(s) for s in SETTINGS},
                        "stderr_db": {s: measured.stderr(s) for s in SETTINGS},
                        "criteria": rec_criteria,
                        "physical": validate(rec_cm).ok,
                        "entry_errors": entry_errors.tolist(),
                        "max_abs_entry_error": float(np.max(np.abs(entry_errors))),
                    },
                }
                if rec_error is not None:
                    entry["reconstructed"]["criteria_error"] = rec_error
                results.append(entry)
    report = {"n_per_setting": config.n_per_setting, "results": results}
    if config.out is not None:
        Path(config.out).write_text(json.dumps(report, indent=2) + "\n")
    return report


def run_modes(charges, astigmatism: float = DEFAULT_ASTIGMATISM, out_dir=".",
              bit_depth: int = 16) -> dict:
    """Render beam and tilted-lens images per charge and verify stripe counts.

    Writes mode_l{l}_beam.pgm and mode_l{l}_tilted.pgm plus a stripes.json
    summary into out_dir.  A stripe count that does not equal |l| for these
    synthesized inputs indicates a numerical fault and raises.
    """
    charges = tuple(charges)
    if not charges:
        raise InputError("charges list must not be empty")
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    results = []
    for l in charges:
        field_grid = lg_field(LGModeSpec(l))
        pattern = tilted_lens_pattern(field_grid, astigmatism)
        beam_file = out_path / mode_image_filename(l, "beam")
        tilted_file = out_path / mode_image_filename(l, "tilted")
        write_pgm(beam_file, field_grid.intensity(), bit_depth=bit_depth)
        write_pgm(tilted_file, pattern, bit_depth=bit_depth)
        stripes = count_dark_stripes(pattern)
        if stripes.indeterminate or stripes.count != abs(int(l)):
            raise NumericalError(
                f"stripe count {stripes.count} does not match |l| = {abs(int(l))} "
                f"at astigmatism {astigmatism}")
        results.append({
            "l": int(l),
            "stripes": stripes.count,
            "axis_sign": stripes.axis_sign,
            "beam_image": beam_file.name,
            "tilted_image": tilted_file.name,
        })
    report = {"astigmatism": float(astigmatism), "results": results}
    (out_path / "stripes.json").write_text(json.dumps(report, indent=2) + "\n")
    return report


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _parse_ints(text: str) -> tuple:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_sweep_options(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON config file; flags override its values")
    sp.add_argument("--preset", choices=sorted(PRESETS),
                    help="parameter bundle for one of the decoherence scans")
    sp.add_argument("--v", type=float, help=f"squeezed variance (default {DEFAULT_V})")
    sp.add_argument("--vp", type=float, help=f"anti-squeezed variance (default {DEFAULT_VP})")
    sp.add_argument("--delta", type=_parse_floats, metavar="D[,D...]",
                    help="excess noise values in SNL units (default 0)")
    sp.add_argument("--eta-start", type=float, help="first transmission efficiency (default 0)")
    sp.add_argument("--eta-stop", type=float, help="last transmission efficiency (default 1)")
    sp.add_argument("--eta-step", type=float, help="transmission grid step (default 0.01)")
    sp.add_argument("--charges", type=_parse_ints, metavar="L[,L...]",
                    help="topological charges (default 0,1,2)")
    sp.add_argument("--seed", type=int, help=f"master RNG seed (default {DEFAULT_SEED})")
    sp.add_argument("--n", type=int, dest="n_per_setting",
                    help=f"samples per tomography setting (default {DEFAULT_N_PER_SETTING})")
    sp.add_argument("--out", help="output file (CSV for sweep, JSON otherwise)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oamcv",
        description="OAM-multiplexed continuous-variable entanglement toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("sweep", help="criteria vs transmission efficiency, CSV output")
    _add_sweep_options(sp)
    sp = sub.add_parser("thresholds", help="sudden-death transmission thresholds, JSON output")
    _add_sweep_options(sp)
    sp = sub.add_parser("tomo", help="tomography round trips over the grid, JSON output")
    _add_sweep_options(sp)
    sp = sub.add_parser("modes", help="beam and tilted-lens images with stripe counts")
    sp.add_argument("--charges", type=_parse_ints, default=DEFAULT_CHARGES,
                    metavar="L[,L...]", help="topological charges (default 0,1,2)")
    sp.add_argument("--astigmatism", type=float, default=DEFAULT_ASTIGMATISM,
                    help=f"astigmatic phase strength (default {DEFAULT_ASTIGMATISM})")
    sp.add_argument("--depth", type=int, choices=(8, 16), default=16,
                    help="PGM bit depth (default 16)")
    sp.add_argument("--out", default=".", help="output directory (default current)")
    return parser


def _config_from_args(args: argparse.Namespace) -> SweepConfig:
    """Defaults, then preset, then config file, then explicit flags."""
    merged: dict = {}
    global_spec = None
    if args.preset:
        merged.update(PRESETS[args.preset])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"config file {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError(f"config file {args.config} must hold a JSON object")
        unknown = set(loaded) - set(_CONFIG_KEYS) - {"v", "vp", "r"}
        if unknown:
            raise InputError(f"unknown config keys {sorted(unknown)}")
        merged.update({k: loaded[k] for k in _CONFIG_KEYS if k in loaded})
        if "deltas" in merged:
            merged["deltas"] = tuple(merged["deltas"])
        if "charges" in merged:
            merged["charges"] = tuple(merged["charges"])
        if "specs" in merged:
            if any(k in loaded for k in ("v", "vp", "r")):
                raise InputError("give either per-charge specs or a global v/vp (or r), not both")
            merged["specs"] = {int(l): SqueezingSpec.from_json_dict(s)
                               for l, s in merged["specs"].items()}
        elif any(k in loaded for k in ("v", "vp", "r")):
            global_spec = _spec_from_options(loaded.get("v"), loaded.get("vp"), loaded.get("r"))
    for key in ("deltas", "eta_start", "eta_stop", "eta_step", "charges",
                "seed", "n_per_setting", "out"):
        flag = {"deltas": "delta"}.get(key, key)
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    if args.v is not None or args.vp is not None:
        global_spec = _spec_from_options(args.v, args.vp, None)
        if "specs" in merged:
            raise InputError("give either per-charge specs or a global v/vp, not both")
    if global_spec is not None:
        merged["specs"] = {int(l): global_spec
                           for l in merged.get("charges", DEFAULT_CHARGES)}
    if "specs" in merged and "charges" not in merged:
        merged["charges"] = tuple(sorted(merged["specs"]))
    return SweepConfig(**merged)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "modes":
            report = run_modes(args.charges, astigmatism=args.astigmatism,
                               out_dir=args.out, bit_depth=args.depth)
            for entry in report["results"]:
                print(f"l={entry['l']}: {entry['stripes']} dark stripes "
                      f"(axis {entry['axis_sign']:+d}) -> {entry['tilted_image']}")
            return EXIT_OK
        config = _config_from_args(args)
        if args.command == "sweep":
            rows = run_sweep(config)
            if config.out is None:
                print("\n".join(rows))
            else:
                print(f"wrote {len(rows) - 1} rows to {config.out}")
        elif args.command == "thresholds":
            report = run_thresholds(config)
            if config.out is None:
                print(json.dumps(report, indent=2))
            else:
                print(f"wrote {len(report['results'])} threshold entries to {config.out}")
        elif args.command == "tomo":
            report = run_tomo(config)
            if config.out is None:
                print(json.dumps(report, indent=2))
            else:
                print(f"wrote {len(report['results'])} tomography entries to {config.out}")
        return EXIT_OK
    except (InputError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
