"""Command-line front end.

Exit codes: 0 success, 2 bad arguments or configuration, 3 numerical
integrity failure, 4 I/O failure.
"""

import argparse
import sys

import numpy as np

from .fock import NumericalIntegrityError
from .presets import (
    METRICS,
    PRESET_NAMES,
    PROTOCOLS,
    RunConfig,
    SWEEP_PARAMS,
    run_preset,
    sweep,
)

_FIELD_ALIASES = {
    "r": "r",
    "kappa": "kappa",
    "nth": "n_th",
    "n_th": "n_th",
    "eta": "eta",
    "nmax": "n_max",
    "n_max": "n_max",
    "env_cutoff": "env_cutoff",
    "env-cutoff": "env_cutoff",
    "T": "T_grid",
    "t": "T_grid",
    "K": "K_grid",
    "k": "K_grid",
    "protocols": "protocols",
    "scheme": "scheme",
    "preset": "preset",
    "out": "out_dir",
    "out_dir": "out_dir",
}


def parse_float_grid(text: str) -> list[float]:
    """Comma list ("0.1,0.2") or start:stop:count ("0:0.5:3") of floats."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid spec {text!r} is not start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError(f"grid count must be >= 1, got {count}")
        return [float(v) for v in np.linspace(start, stop, count)]
    return [float(v) for v in text.split(",") if v.strip()]


def parse_int_list(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v.strip()]


def load_config_file(path: str) -> dict[str, str]:
    """Plain `key = value` lines; `#` starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def _coerce(field: str, value: str):
    if field in ("r", "kappa", "n_th", "eta"):
        return float(value)
    if field in ("n_max", "env_cutoff"):
        return int(value)
    if field == "T_grid":
        return parse_float_grid(value)
    if field == "K_grid":
        return parse_int_list(value)
    if field == "protocols":
        return tuple(p.strip() for p in value.split(",") if p.strip())
    return value


def build_config(file_values: dict[str, str], cli_values: dict[str, object]) -> RunConfig:
    """Defaults, overridden by the config file, overridden by CLI flags."""
    cfg = RunConfig()
    for key, raw in file_values.items():
        field = _FIELD_ALIASES.get(key)
        if field is None:
            raise ValueError(f"unknown config key {key!r}")
        setattr(cfg, field, _coerce(field, raw))
    for field, value in cli_values.items():
        if value is not None:
            setattr(cfg, field, value)
    cfg.validate()
    return cfg


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qillum",
        description="Entangled-probe target detection in truncated Fock space: "
        "figure presets and parameter sweeps, emitted as CSV.",
    )
    parser.add_argument("--preset", choices=sorted(PRESET_NAMES), help="figure panel to reproduce")
    parser.add_argument("--sweep", choices=SWEEP_PARAMS, help="parameter to sweep")
    parser.add_argument("--metric", choices=METRICS, help="metric for --sweep")
    parser.add_argument("--grid", help="grid for --sweep: comma list or start:stop:count")
    parser.add_argument("--config", help="config file with key = value lines")
    parser.add_argument("--out", dest="out_dir", help="output directory (default .)")
    parser.add_argument("--r", type=float, help="squeezing parameter")
    parser.add_argument("--kappa", type=float, help="target reflectivity")
    parser.add_argument("--nth", dest="n_th", type=float, help="background mean photon number")
    parser.add_argument("--eta", type=float, help="loss transmissivity (1 = lossless)")
    parser.add_argument("--nmax", dest="n_max", type=int, help="photon-number cutoff per mode")
    parser.add_argument("--env-cutoff", dest="env_cutoff", type=int, help="environment cutoff")
    parser.add_argument("--T", dest="T_grid", type=parse_float_grid, help="transmissivity grid")
    parser.add_argument("--K", dest="K_grid", type=parse_int_list, help="copy-count grid")
    parser.add_argument(
        "--protocols",
        type=lambda s: tuple(p.strip() for p in s.split(",") if p.strip()),
        help=f"comma list from {','.join(PROTOCOLS)}",
    )
    parser.add_argument("--scheme", choices=("dhd", "photon_diff"), help="receiver observable")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)

    try:
        file_values = load_config_file(args.config) if args.config else {}
        cli_values = {
            field: getattr(args, field)
            for field in (
                "r", "kappa", "n_th", "eta", "n_max", "env_cutoff",
                "T_grid", "K_grid", "protocols", "scheme", "out_dir",
            )
        }
        cfg = build_config(file_values, cli_values)

        if bool(args.preset) == bool(args.sweep):
            parser.error("exactly one of --preset or --sweep is required")
        if args.preset:
            cfg.preset = args.preset
            run_preset(args.preset, cfg)
        else:
            if not args.metric:
                parser.error("--sweep requires --metric")
            if args.grid:
                grid = parse_float_grid(args.grid)
            elif args.sweep == "T":
                grid = cfg.T_grid
            elif args.sweep == "K":
                grid = [float(k) for k in cfg.K_grid]
            else:
                parser.error(f"--sweep {args.sweep} requires --grid")
            path = sweep(args.sweep, grid, args.metric, cfg)
            print(f"wrote {path}")
    except NumericalIntegrityError as exc:
        print(f"numerical integrity failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
