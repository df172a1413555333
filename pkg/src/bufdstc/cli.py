"""Command-line entry point.

Examples::

    bufdstc --snr 0:16:2 --packets 200 --out ber.csv --svg
    bufdstc --experiment bufsize --snr 15 --sizes 1,2,4,6,8 --out bufsize.csv
    bufdstc --experiment delay --buffer-mode snr --snr 6:10:4 --packet-counts 50,100,200 --out delay.csv
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import SimConfig, load_config, parse_snr_range
from .errors import ConfigurationError
from .experiments import run_ber_sweep, run_buffer_size_sweep, run_delay_experiment
from .output import emit_results, results_csv

# flag dest -> SimConfig field
FLAG_FIELDS = {
    "users": "K",
    "relays": "L",
    "chips": "N",
    "symbols": "M",
    "buffer_size": "J",
    "buffer_mode": "buffer_mode",
    "scheme": "scheme",
    "selection": "selection",
    "relay_detector": "relay_detector",
    "dest_detector": "dest_detector",
    "packets": "packets",
    "seed": "seed",
    "channel_law": "channel_law",
    "pilots": "pilots",
    "out": "out",
}


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bufdstc",
        description="Monte Carlo simulator for buffer-aided relay-pair selection with distributed Alamouti coding.",
    )
    p.add_argument("--config", help="file of 'key = value' lines; flags override it")
    p.add_argument("--experiment", choices=("ber", "bufsize", "delay"), default="ber")
    p.add_argument("--users", type=int, help="number of users K")
    p.add_argument("--relays", type=int, help="number of relays L")
    p.add_argument("--chips", type=int, help="spreading gain N")
    p.add_argument("--symbols", type=int, help="symbols per packet M")
    p.add_argument("--buffer-size", type=int, help="buffer size J (packets)")
    p.add_argument("--buffer-mode", choices=("fixed", "snr", "power"))
    p.add_argument("--scheme", choices=("buffered", "nonbuffered"))
    p.add_argument("--selection", choices=("exhaustive", "greedy", "random", "none"))
    p.add_argument("--relay-detector", choices=("rake", "mmse", "perfect"))
    p.add_argument("--dest-detector", choices=("rake", "mmse", "ml"))
    p.add_argument("--channel-law", choices=("uniform", "rayleigh"))
    p.add_argument("--estimation", action="store_true", default=None, help="use LS-estimated channels")
    p.add_argument("--pilots", type=int, help="pilot symbols per link for estimation")
    p.add_argument("--snr", help="'min:max:step' in dB, or a single value")
    p.add_argument("--packets", type=int, help="delivered packets per point")
    p.add_argument("--seed", type=int)
    p.add_argument("--sizes", type=_int_list, default=[1, 2, 4, 6, 8], help="buffer sizes for --experiment bufsize")
    p.add_argument("--packet-counts", type=_int_list, default=[50, 100, 200, 400], help="packet counts for --experiment delay")
    p.add_argument("--fixed-size", type=int, default=8, help="reference buffer size for --experiment delay")
    p.add_argument("--workers", type=int, default=1, help="processes for independent points")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--svg", action="store_true", help="also write an SVG plot next to the CSV")
    return p


def config_from_args(args) -> SimConfig:
    values = load_config(args.config) if args.config else {}
    for flag, name in FLAG_FIELDS.items():
        v = getattr(args, flag)
        if v is not None:
            values[name] = v
    if args.estimation:
        values["estimation"] = True
    if args.snr is not None:
        values["snr_min"], values["snr_max"], values["snr_step"] = parse_snr_range(args.snr)
    try:
        return SimConfig(**values)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from None


def _emit(result, out, svg):
    if out is None:
        sys.stdout.write(results_csv(result))
        return
    for path in emit_results(result, out, svg=svg):
        print(f"wrote {path}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.workers < 1:
            raise ConfigurationError("--workers must be at least 1")
        if args.experiment == "ber":
            _emit(run_ber_sweep(cfg, workers=args.workers), cfg.out, args.svg)
        elif args.experiment == "bufsize":
            _emit(run_buffer_size_sweep(cfg, args.sizes, workers=args.workers), cfg.out, args.svg)
        else:
            cmp = run_delay_experiment(cfg, args.packet_counts, fixed_J=args.fixed_size)
            _emit(cmp.primary, cfg.out, args.svg)
            if cfg.out is not None:
                out = Path(cfg.out)
                _emit(cmp.fixed, str(out.with_name(out.stem + "_fixed" + out.suffix)), args.svg)
    except (ConfigurationError, OSError, ValueError) as exc:
        print(f"bufdstc: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
