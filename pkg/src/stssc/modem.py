"""Constellations, bit/symbol mapping and packet framing into coherence blocks."""

from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .errors import ConfigurationError, ConsistencyError, UsageError

CONSTELLATION_NAMES = ("bpsk", "qpsk")
KAPPA_MODES = ("perslot", "paper")


@dataclass(frozen=True)
class Constellation:
    name: str
    points: np.ndarray          # unit average energy
    bits_per_symbol: int
    real_only: bool

    def __post_init__(self):
        self.points.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.points)


def get_constellation(name: str) -> Constellation:
    if name == "bpsk":
        # bit 0 -> +1, bit 1 -> -1
        return Constellation("bpsk", np.array([1.0 + 0j, -1.0 + 0j]), 1, True)
    if name == "qpsk":
        # Gray labeling: bits (b0, b1) -> ((1-2*b0) + 1j*(1-2*b1)) / sqrt(2)
        pts = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / sqrt(2)
        return Constellation("qpsk", pts, 2, False)
    raise ConfigurationError(f"unknown constellation {name!r}; valid: {', '.join(CONSTELLATION_NAMES)}")


def modulate(c: Constellation, bits) -> np.ndarray:
    """Map bits to unit-average-energy symbols (Gray labeling)."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % c.bits_per_symbol:
        raise UsageError(
            f"bit count {bits.size} not divisible by {c.bits_per_symbol}; pad during framing"
        )
    groups = bits.reshape(-1, c.bits_per_symbol)
    idx = np.zeros(len(groups), dtype=np.int64)
    for b in range(c.bits_per_symbol):
        idx = (idx << 1) | groups[:, b]
    return c.points[idx]


def demap_hard(c: Constellation, symbols) -> np.ndarray:
    """Inverse of modulate; input must be exact constellation points."""
    symbols = np.asarray(symbols, dtype=complex).ravel()
    dist = np.abs(symbols[:, None] - c.points[None, :])
    idx = np.argmin(dist, axis=1)
    if np.any(dist[np.arange(len(symbols)), idx] > 1e-9):
        raise ConsistencyError("hard demapper received a non-constellation point")
    bits = np.zeros((len(symbols), c.bits_per_symbol), dtype=np.int64)
    for b in range(c.bits_per_symbol):
        bits[:, c.bits_per_symbol - 1 - b] = (idx >> b) & 1
    return bits.ravel()


@dataclass(frozen=True)
class Packet:
    bits: np.ndarray
    source: int

    def __post_init__(self):
        self.bits.setflags(write=False)


@dataclass(frozen=True)
class SourceBlock:
    """One coherence block of scaled source symbols.

    X = kappa * raw, where raw holds unit-energy constellation points
    (zero in padding positions) and kappa is the transmit scale factor.
    """

    X: np.ndarray       # (N, K) scaled
    raw: np.ndarray     # (N, K) unit-energy points
    kappa: float

    def __post_init__(self):
        self.X.setflags(write=False)
        self.raw.setflags(write=False)

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def K(self) -> int:
        return self.X.shape[1]


def kappa_for(n_sources: int, kappa_mode: str, T: int) -> float:
    """Transmit scale: 1/sqrt(N) (per-slot aggregate power) or 1/sqrt(T*N) (block-energy)."""
    if kappa_mode == "perslot":
        return 1.0 / sqrt(n_sources)
    if kappa_mode == "paper":
        return 1.0 / sqrt(T * n_sources)
    raise ConfigurationError(f"unknown kappa mode {kappa_mode!r}; valid: {', '.join(KAPPA_MODES)}")


def frame_packets(packets, c: Constellation, K: int, kappa_mode: str = "perslot",
                  T: int | None = None) -> list[SourceBlock]:
    """Frame N equal-length packets into coherence blocks of K symbol slots.

    Produces ceil(L / (bits_per_symbol * K)) blocks; row s of each block holds
    source s's next K scaled symbols; the tail is zero-padded.
    """
    if not packets:
        raise UsageError("need at least one packet")
    lengths = {len(p.bits) for p in packets}
    if len(lengths) != 1:
        raise UsageError("all packets must have the same length")
    L = lengths.pop()
    if L == 0:
        raise UsageError("empty packets cannot be framed")
    N = len(packets)
    if T is None:
        T = K
    kappa = kappa_for(N, kappa_mode, T)

    n_blocks = ceil(L / (c.bits_per_symbol * K))
    syms_total = n_blocks * K
    raw = np.zeros((N, syms_total), dtype=complex)
    for s, p in enumerate(packets):
        syms = modulate(c, _pad_bits(p.bits, c.bits_per_symbol))
        raw[s, : len(syms)] = syms
    blocks = []
    for b in range(n_blocks):
        chunk = raw[:, b * K : (b + 1) * K]
        blocks.append(SourceBlock(X=kappa * chunk, raw=chunk.copy(), kappa=kappa))
    return blocks


def _pad_bits(bits: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    rem = len(bits) % bits_per_symbol
    if rem == 0:
        return np.asarray(bits)
    return np.concatenate([bits, np.zeros(bits_per_symbol - rem, dtype=np.int64)])


def recover_bits(c: Constellation, decided_blocks, L: int) -> np.ndarray:
    """Undo framing for one source: hard-demap decided symbols and drop padding."""
    syms = np.concatenate([np.asarray(b, dtype=complex).ravel() for b in decided_blocks])
    n_syms = ceil(L / c.bits_per_symbol)
    bits = demap_hard(c, syms[:n_syms])
    return bits[:L]


def check_compatible(c: Constellation, design_real_only: bool) -> None:
    """Real-only designs must be paired with real constellations."""
    if design_real_only and not c.real_only:
        raise ConfigurationError(
            f"constellation {c.name!r} is complex but the selected code is real-only"
        )
