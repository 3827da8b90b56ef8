"""Command-line entry point: simulate, snrmap, capacity, tables.

Exit codes: 0 success, 2 configuration problem, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import MODULATION_NAMES, SimConfig
from .exceptions import ConfigurationError, NumericalError
from .harness import modulation_alphabet, run_capacity_compare, run_snr_map, run_sweep


def _names(text: str) -> tuple[str, ...]:
    out = tuple(s.strip() for s in text.split(",") if s.strip())
    if not out:
        raise ConfigurationError(f"empty name list {text!r}")
    return out


def _ints(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigurationError(f"expected a comma-separated integer list, got {text!r}")
    if not out:
        raise ConfigurationError(f"empty integer list {text!r}")
    return out


def _floats(text: str) -> tuple[float, ...]:
    try:
        out = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigurationError(f"expected a comma-separated number list, got {text!r}")
    if not out:
        raise ConfigurationError(f"empty number list {text!r}")
    return out


def _single(values, flag: str):
    if len(values) != 1:
        raise ConfigurationError(f"{flag} takes exactly one value here")
    return values[0]


def _load_config(args) -> SimConfig:
    cfg = SimConfig.load(args.config) if args.config else SimConfig()
    updates: dict = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "deployment", None):
        updates["deployments"] = _names(args.deployment)
    if getattr(args, "scheme", None):
        updates["schemes"] = _names(args.scheme)
    if getattr(args, "antennas", None):
        updates["antennas"] = _ints(args.antennas)
    if getattr(args, "modulation", None):
        updates["modulation"] = args.modulation
    if getattr(args, "nmse_db", None):
        updates["nmse_db"] = _floats(args.nmse_db)
    if getattr(args, "drops", None) is not None:
        updates["num_drops"] = args.drops
    if getattr(args, "realizations", None) is not None:
        updates["num_realizations"] = args.realizations
    if getattr(args, "prbs", None) is not None:
        updates["num_prbs"] = args.prbs
    if getattr(args, "threads", None) is not None:
        updates["threads"] = args.threads
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    result = run_sweep(cfg, args.out)
    print(f"wrote {', '.join(result.outputs)} to {args.out} (manifest {result.config_hash[:12]})")
    return 0


def _cmd_snrmap(args) -> int:
    cfg = _load_config(args)
    if not args.deployment:
        raise ConfigurationError("snrmap needs --deployment NAME")
    if not args.antennas:
        raise ConfigurationError("snrmap needs --antennas M")
    name = _single(_names(args.deployment), "--deployment")
    m = _single(_ints(args.antennas), "--antennas")
    result = run_snr_map(
        cfg,
        name,
        m,
        args.out,
        grid_step_m=args.grid_step,
        realizations=args.map_realizations,
    )
    print(f"wrote {', '.join(result.outputs)} to {args.out} (manifest {result.config_hash[:12]})")
    return 0


def _cmd_capacity(args) -> int:
    cfg = dataclasses.replace(_load_config(args), modulation="gaussian")
    if not args.deployment:
        raise ConfigurationError("capacity needs --deployment NAME")
    name = _single(_names(args.deployment), "--deployment")
    m_list = _ints(args.antennas) if args.antennas else cfg.antennas
    result = run_capacity_compare(cfg, name, m_list, args.out)
    print(f"wrote {', '.join(result.outputs)} to {args.out} (manifest {result.config_hash[:12]})")
    return 0


def _cmd_tables(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = modulation_alphabet("qam256")
    path = out / "qam256_infotable.csv"
    table.save(path)
    print(f"wrote {path}")
    return 0


def _add_run_flags(p: argparse.ArgumentParser, *, schemes: bool = False) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
    p.add_argument("--out", metavar="DIR", required=True, help="output directory")
    p.add_argument("--seed", type=int, metavar="N")
    p.add_argument("--deployment", metavar="NAME[,NAME...]")
    if schemes:
        p.add_argument("--scheme", metavar="NAME[,NAME...]")
        p.add_argument("--nmse-db", dest="nmse_db", metavar="LIST",
                       help="estimation-error levels in dB, e.g. -inf,-40,-20")
    p.add_argument("--antennas", metavar="LIST", help="total antenna counts, e.g. 24,48")
    p.add_argument("--modulation", choices=MODULATION_NAMES)
    p.add_argument("--drops", type=int, metavar="N")
    p.add_argument("--realizations", type=int, metavar="N")
    p.add_argument("--prbs", type=int, metavar="N",
                   help="representative subcarriers to simulate")
    p.add_argument("--threads", type=int, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimosim",
        description="Link-level multi-cell MIMO downlink simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the sweep grid and write record CSVs")
    _add_run_flags(p, schemes=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("snrmap", help="single-served-UE SNR over the floor plan")
    _add_run_flags(p)
    p.add_argument("--grid-step", dest="grid_step", type=float, default=1.0,
                   metavar="METERS")
    p.set_defaults(func=_cmd_snrmap)

    p = sub.add_parser("capacity", help="sum-capacity bound vs. joint ZF SE")
    _add_run_flags(p)
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("tables", help="write the 256-QAM MI/MMSE table CSV")
    p.add_argument("--out", metavar="DIR", required=True, help="output directory")
    p.set_defaults(func=_cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "snrmap":
        # --realizations controls the map's averaging depth here, not the
        # sweep's per-drop fading count.
        args.map_realizations = 300 if args.realizations is None else args.realizations
        args.realizations = None
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
