"""Monte Carlo experiment driver: configs, sweeps, accounting, CSV emission."""

import csv
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict, replace

import numpy as np

from .batch import simulate_packet_set
from .channel import FADING_MODELS
from .designs import build_design
from .errors import ConfigurationError
from .modem import KAPPA_MODES, check_compatible, get_constellation
from .schemes import SCHEMES

SYMBOL_RATE = 20e6          # 20 MHz bandwidth, one symbol slot per Hz-second

CSV_HEADER = [
    "snr_db", "ber", "per", "throughput_bps", "bits_total", "bit_errors",
    "packets_total", "packet_errors", "slots_total", "seed", "config_hash",
]


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "stssc"
    code: str = "alamouti"
    sources: int | None = None
    relays: int | None = None
    mod: str | None = None
    fading: str = "unit-mag"
    normalization: str = "perslot"
    snr_db_list: tuple = tuple(float(s) for s in range(0, 31, 2))
    packets: int = 2000
    packet_bits: int = 1000
    seed: int = 0
    workers: int = 1
    noiseless: bool = False
    phases_override: int | None = None      # slots charged per block, overriding the scheme rule
    output_path: str | None = None

    def resolved(self) -> "SimConfig":
        """Fill code-dependent defaults: M = design columns, N = M, mod per code."""
        design = build_design(self.code)
        relays = self.relays if self.relays is not None else design.M
        sources = self.sources if self.sources is not None else relays
        mod = self.mod if self.mod is not None else ("bpsk" if design.real_only else "qpsk")
        return replace(self, relays=relays, sources=sources, mod=mod)


@dataclass(frozen=True)
class SimRecord:
    snr_db: float
    ber: float
    per: float
    throughput_bps: float
    bits_total: int
    bit_errors: int
    packets_total: int
    packet_errors: int
    slots_total: int
    seed: int
    config_hash: str


def validate(config: SimConfig) -> SimConfig:
    cfg = config.resolved()
    if cfg.scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {cfg.scheme!r}; valid: {', '.join(SCHEMES)}")
    design = build_design(cfg.code)
    constellation = get_constellation(cfg.mod)
    check_compatible(constellation, design.real_only)
    if cfg.relays != design.M:
        raise ConfigurationError(
            f"code {cfg.code!r} serves exactly {design.M} relays, got --relays {cfg.relays}"
        )
    if cfg.sources < 1:
        raise ConfigurationError("need at least one source")
    if cfg.packets < 1:
        raise ConfigurationError("need at least one packet")
    if cfg.packet_bits < 1:
        raise ConfigurationError("packet length must be positive")
    if not cfg.snr_db_list:
        raise ConfigurationError("SNR list must be nonempty")
    if not all(np.isfinite(s) for s in cfg.snr_db_list):
        raise ConfigurationError("SNR values must be finite")
    if cfg.fading not in FADING_MODELS:
        raise ConfigurationError(f"unknown fading model {cfg.fading!r}")
    if cfg.normalization not in KAPPA_MODES:
        raise ConfigurationError(f"unknown normalization {cfg.normalization!r}")
    if cfg.phases_override is not None and cfg.phases_override < 1:
        raise ConfigurationError("phases override must be a positive slot count")
    if constellation.size**cfg.sources > 10**6:
        raise ConfigurationError(
            f"candidate space {constellation.size}^{cfg.sources} too large; "
            "reduce sources or constellation order"
        )
    return cfg


def config_hash(config: SimConfig) -> str:
    """Stable short hash of the result-determining config fields.

    workers and output_path are excluded: they must not affect results.
    """
    cfg = config.resolved()
    fields = asdict(cfg)
    fields.pop("workers")
    fields.pop("output_path")
    fields["snr_db_list"] = [float(s) for s in fields["snr_db_list"]]
    blob = repr(sorted(fields.items())).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _point_seed(config: SimConfig, point_index: int) -> int:
    return int(np.random.SeedSequence([config.seed, point_index]).generate_state(1)[0])


def _simulate_sets(cfg: SimConfig, snr_db: float, point_index: int,
                   set_indices) -> tuple[int, int, int, int]:
    """Run a range of packet sets; returns (bit_errors, bits, packet_errors, slots)."""
    design = build_design(cfg.code)
    constellation = get_constellation(cfg.mod)
    rho = 10.0 ** (snr_db / 10.0)
    sigma2 = 0.0 if cfg.noiseless else 1.0
    be = bits = pe = slots = 0
    for i in set_indices:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, point_index, i]))
        res = simulate_packet_set(
            cfg.scheme, design, constellation, cfg.sources, cfg.relays,
            rho, sigma2, cfg.fading, cfg.normalization, cfg.packet_bits, rng,
            slots_per_block=cfg.phases_override,
        )
        be += res.bit_errors
        bits += res.payload_bits
        pe += res.packet_error
        slots += res.slots
    return be, bits, pe, slots


def run_point(config: SimConfig, snr_db: float, point_index: int = 0) -> SimRecord:
    """Simulate one SNR point: `packets` packet sets, errors counted at destination 0."""
    cfg = validate(config)
    sets = range(cfg.packets)
    if cfg.workers <= 1:
        totals = _simulate_sets(cfg, snr_db, point_index, sets)
    else:
        chunks = np.array_split(np.arange(cfg.packets), min(cfg.workers * 4, cfg.packets))
        chunks = [c for c in chunks if len(c)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(
                _simulate_sets, [cfg] * len(chunks), [snr_db] * len(chunks),
                [point_index] * len(chunks), chunks,
            ))
        totals = tuple(sum(p[i] for p in parts) for i in range(4))
    bit_errors, bits_total, packet_errors, slots_total = totals
    correct_bits = (cfg.packets - packet_errors) * cfg.packet_bits
    return SimRecord(
        snr_db=float(snr_db),
        ber=bit_errors / bits_total,
        per=packet_errors / cfg.packets,
        throughput_bps=correct_bits / slots_total * SYMBOL_RATE,
        bits_total=bits_total,
        bit_errors=bit_errors,
        packets_total=cfg.packets,
        packet_errors=packet_errors,
        slots_total=slots_total,
        seed=_point_seed(cfg, point_index),
        config_hash=config_hash(cfg),
    )


def run_sweep(config: SimConfig) -> list[SimRecord]:
    cfg = validate(config)
    return [run_point(cfg, snr_db, i) for i, snr_db in enumerate(cfg.snr_db_list)]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def emit_csv(records, path, extra_stderr: bool = False) -> None:
    """Write records atomically; byte-identical across runs with the same seed."""
    header = list(CSV_HEADER)
    if extra_stderr:
        header += ["ber_stderr", "per_stderr"]
    lines = [",".join(header)]
    for rec in records:
        row = [_fmt(getattr(rec, name)) for name in CSV_HEADER]
        if extra_stderr:
            row.append(_fmt(_binomial_stderr(rec.ber, rec.bits_total)))
            row.append(_fmt(_binomial_stderr(rec.per, rec.packets_total)))
        lines.append(",".join(row))
    data = "\n".join(lines) + "\n"
    tmp = path + ".tmp"
    try:
        with open(tmp, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _binomial_stderr(p: float, n: int) -> float:
    return float(np.sqrt(p * (1.0 - p) / n))


def read_csv(path) -> list[dict]:
    with open(path) as fh:
        return [dict(row) for row in csv.DictReader(fh)]


def compare_runs(paths, out_path) -> list[list[str]]:
    """Overlay several runs on a shared SNR grid into one wide plot-data table."""
    runs = []
    for path in paths:
        label = os.path.splitext(os.path.basename(path))[0]
        runs.append((label, read_csv(path)))
    grids = [[row["snr_db"] for row in rows] for _, rows in runs]
    ref = grids[0]
    for (label, _), grid in zip(runs[1:], grids[1:]):
        if grid != ref:
            diff = sorted(set(ref).symmetric_difference(grid), key=float)
            raise ConfigurationError(
                f"SNR grid of {label!r} differs from {runs[0][0]!r} at points: {', '.join(diff)}"
            )
    header = (
        ["snr_db"]
        + [f"{label}_ber" for label, _ in runs]
        + [f"{label}_throughput_bps" for label, _ in runs]
    )
    table = [header]
    for i, snr in enumerate(ref):
        row = [snr]
        row += [rows[i]["ber"] for _, rows in runs]
        row += [rows[i]["throughput_bps"] for _, rows in runs]
        table.append(row)
    if out_path is not None:
        tmp = out_path + ".tmp"
        try:
            with open(tmp, "w") as fh:
                fh.write("\n".join(",".join(map(str, row)) for row in table) + "\n")
            os.replace(tmp, out_path)
        except OSError:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    return table
