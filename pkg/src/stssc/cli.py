"""Command line interface.

    stssc-sim run --scheme stssc --code alamouti --snr 0:2:30 -o out.csv
    stssc-sim compare stssc.csv afost.csv -o table.csv
    stssc-sim dump-design c34

Exit codes: 0 ok, 1 configuration error, 2 I/O error.
"""

import argparse
import sys

from .designs import DESIGN_NAMES, build_design, format_design
from .errors import ConfigurationError
from .harness import SimConfig, emit_csv, compare_runs, run_sweep


def _parse_snr(text: str) -> tuple:
    """Accept 'a:step:b' (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            a, step, b = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            out = []
            v = a
            while v <= b + 1e-9:
                out.append(round(v, 10))
                v += step
            return tuple(out)
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"bad --snr value {text!r}: {exc}") from None


def _read_config_file(path: str) -> dict:
    """key=value lines; blank lines and # comments ignored."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


_INT_KEYS = {"sources", "relays", "packets", "packet_bits", "seed", "workers",
             "phases_override"}
_BOOL_KEYS = {"noiseless", "stderr"}


def _coerce(key: str, value: str):
    if key in _INT_KEYS:
        return int(value)
    if key in _BOOL_KEYS:
        return value.strip().lower() in ("1", "true", "yes")
    if key == "snr":
        return _parse_snr(value)
    return value


class _Parser(argparse.ArgumentParser):
    """Argument errors are configuration errors (exit 1), not usage exits."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stssc-sim")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo SNR sweep")
    run.add_argument("--scheme", choices=("stssc", "afost", "dstc", "direct"))
    run.add_argument("--code", choices=DESIGN_NAMES)
    run.add_argument("--sources", type=int)
    run.add_argument("--relays", type=int)
    run.add_argument("--mod", choices=("bpsk", "qpsk"))
    run.add_argument("--fading", choices=("unit-mag", "rayleigh"))
    run.add_argument("--normalization", choices=("perslot", "paper"))
    run.add_argument("--snr", help="a:step:b or comma list of dB values")
    run.add_argument("--packets", type=int)
    run.add_argument("--packet-bits", type=int, dest="packet_bits")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--noiseless", action="store_true", default=None)
    run.add_argument("--phases-override", type=int, dest="phases_override",
                     help="charge this many slots per block instead of the scheme rule")
    run.add_argument("--stderr", action="store_true", default=None,
                     help="append standard-error columns")
    run.add_argument("--config", help="key=value config file; flags override")
    run.add_argument("-o", "--output", required=True)

    cmp_ = sub.add_parser("compare", help="overlay run CSVs into one plot-data table")
    cmp_.add_argument("inputs", nargs="+")
    cmp_.add_argument("-o", "--output", required=True)

    dump = sub.add_parser("dump-design", help="print a code's dispersion matrices")
    dump.add_argument("name")
    return parser


_DEFAULTS = {
    "scheme": "stssc", "code": "alamouti", "fading": "unit-mag",
    "normalization": "perslot", "snr": tuple(float(s) for s in range(0, 31, 2)),
    "packets": 2000, "packet_bits": 1000, "seed": 0, "workers": 1,
    "noiseless": False, "stderr": False, "sources": None, "relays": None, "mod": None,
    "phases_override": None,
}


def _merge_run_options(args: argparse.Namespace) -> dict:
    opts = dict(_DEFAULTS)
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            if key not in opts:
                raise ConfigurationError(f"unknown config key {key!r}")
            opts[key] = _coerce(key, raw)
    for key in opts:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = _parse_snr(value) if key == "snr" else value
    return opts


def _cmd_run(args) -> int:
    opts = _merge_run_options(args)
    config = SimConfig(
        scheme=opts["scheme"], code=opts["code"], sources=opts["sources"],
        relays=opts["relays"], mod=opts["mod"], fading=opts["fading"],
        normalization=opts["normalization"], snr_db_list=tuple(opts["snr"]),
        packets=opts["packets"], packet_bits=opts["packet_bits"], seed=opts["seed"],
        workers=opts["workers"], noiseless=opts["noiseless"],
        phases_override=opts["phases_override"], output_path=args.output,
    )
    records = run_sweep(config)
    emit_csv(records, args.output, extra_stderr=opts["stderr"])
    for rec in records:
        print(f"snr={rec.snr_db:6.2f} dB  ber={rec.ber:.3e}  per={rec.per:.3e}  "
              f"throughput={rec.throughput_bps / 1e6:.3f} Mb/s")
    return 0


def _cmd_compare(args) -> int:
    compare_runs(args.inputs, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_dump_design(args) -> int:
    print(format_design(build_design(args.name)))
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_dump_design(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
