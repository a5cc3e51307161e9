"""Vectorized per-packet-set simulation used by the Monte Carlo harness.

One packet set is N packets (one per source) framed into coherence
blocks; every block gets an independent channel realization.  All blocks
of a set are simulated as batched numpy arrays, with the candidate search
delegated to the kernels in stssc._kernels.  The per-block reference
pipelines in stssc.schemes / stssc.decoder implement the same math and
are used to cross-check this path in the test suite.

Bit and packet error counts are reported for the designated destination
(source index 0); padding bits are excluded.
"""

from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from . import _kernels
from .channel import _draw_gains
from .decoder import enumerate_candidates
from .designs import OrthogonalDesign
from .modem import Constellation, kappa_for, modulate, demap_hard

SLOT_RULES = {
    "stssc": lambda N, M, K, T: K + M * T,
    "afost": lambda N, M, K, T: (1 + M) * K,
    "dstc": lambda N, M, K, T: N * (K + T),
    "direct": lambda N, M, K, T: N * K,
}


@dataclass
class SetResult:
    bit_errors: int
    payload_bits: int
    packet_error: int
    slots: int


def _batch_awgn(shape, sigma2, rng):
    if sigma2 == 0:
        return np.zeros(shape, dtype=complex)
    return sqrt(sigma2 / 2.0) * (rng.normal(size=shape) + 1j * rng.normal(size=shape))


def _nearest(points: np.ndarray, est: np.ndarray) -> np.ndarray:
    idx = np.argmin(np.abs(est[..., None] - points), axis=-1)
    return points[idx]


def stssc_decode_batch(y, hSR, hRD, g, design, candidates_scaled, rho):
    """Decode batched observations y (B,M,T); returns candidate indices (B,K)."""
    A, Bm = design.A, design.B
    P = np.einsum("ktr,brt->brk", A.conj(), y)
    Q = np.einsum("ktr,brt->brk", Bm, y.conj())
    inner = hRD.conj()[:, :, None] * P + hRD[:, :, None] * Q
    u = np.einsum("br,bsr,brk->bsk", g, hSR.conj(), inner)
    w = g**2 * np.abs(hRD) ** 2
    c = design.column_weights()
    gram = np.einsum("br,tr,bsr,bpr->btsp", w, c, hSR, hSR.conj())
    return _kernels.joint_argmin(u, gram, candidates_scaled, sqrt(rho))


def simulate_packet_set(scheme: str, design: OrthogonalDesign, constellation: Constellation,
                        N: int, M: int, rho: float, sigma2: float, fading: str,
                        kappa_mode: str, packet_bits: int,
                        rng: np.random.Generator,
                        slots_per_block: int | None = None) -> SetResult:
    """Simulate one packet set end to end and count destination-0 errors.

    slots_per_block overrides the scheme's slot accounting rule (throughput
    escape hatch); error counting is unaffected.
    """
    K, T = design.K, design.T
    L = packet_bits
    kappa = kappa_for(N, kappa_mode, T)
    n_blocks = ceil(L / (constellation.bits_per_symbol * K))
    n_syms = ceil(L / constellation.bits_per_symbol)

    bits = rng.integers(0, 2, size=(N, L))
    raw = np.zeros((N, n_blocks * K), dtype=complex)
    for s in range(N):
        raw[s, :n_syms] = modulate(constellation, _pad(bits[s], constellation.bits_per_symbol))
    X = kappa * raw.reshape(N, n_blocks, K).transpose(1, 0, 2)      # (B, N, K)
    B = n_blocks

    if scheme in ("stssc", "afost"):
        hSR = _draw_gains(fading, (B, N, M), rng)
        hRD = _draw_gains(fading, (B, M), rng)
        g = np.sqrt(rho / (rho * np.sum(np.abs(hSR) ** 2, axis=1) + sigma2))   # (B, M)
        q = sqrt(rho) * np.einsum("bnm,bnk->bmk", hSR, X) + _batch_awgn((B, M, K), sigma2, rng)
        cand = enumerate_candidates(constellation, N)
        xc = kappa * cand
        if scheme == "stssc":
            z = g[:, :, None] * (
                np.einsum("ktr,brk->brt", design.A, q)
                + np.einsum("ktr,brk->brt", design.B, q.conj())
            )
            y = hRD[:, :, None] * z + _batch_awgn((B, M, T), sigma2, rng)
            idx = stssc_decode_batch(y, hSR, hRD, g, design, xc, rho)
        else:
            y = (g * hRD)[:, :, None] * q + _batch_awgn((B, M, K), sigma2, rng)
            F = sqrt(rho) * (g * hRD)[:, :, None] * hSR.transpose(0, 2, 1)
            idx = _kernels.afost_argmin(y, F, xc)
        decided0 = cand[idx, 0]                                      # (B, K)

    elif scheme == "dstc":
        # only destination 0's chain is simulated; the other sources' phases
        # are time-orthogonal and enter the slot accounting only
        hSR0 = _draw_gains(fading, (B, M), rng)
        hRD = _draw_gains(fading, (B, M), rng)
        x0 = X[:, 0, :]                                              # (B, K)
        q = sqrt(rho) * hSR0[:, :, None] * x0[:, None, :] + _batch_awgn((B, M, K), sigma2, rng)
        rd = _nearest(constellation.points, q / (sqrt(rho) * kappa * hSR0[:, :, None]))
        cols = (
            np.einsum("ktr,brk->brt", design.A, rd)
            + np.einsum("ktr,brk->brt", design.B, rd.conj())
        )
        scale = sqrt(rho / M) * kappa
        y = scale * np.einsum("br,brt->bt", hRD, cols) + _batch_awgn((B, T), sigma2, rng)
        heff = scale * hRD                                           # (B, M)
        P = np.einsum("ktr,bt->brk", design.A.conj(), y)
        Q = np.einsum("ktr,bt->brk", design.B, y.conj())
        z = np.sum(heff.conj()[:, :, None] * P + heff[:, :, None] * Q, axis=1)   # (B, K)
        heq = np.einsum("km,bm->bk", design.column_weights(), np.abs(heff) ** 2)
        decided0 = _nearest(constellation.points, z / heq)

    elif scheme == "direct":
        hSD0 = _draw_gains(fading, (B,), rng)
        x0 = X[:, 0, :]
        y = sqrt(rho) * hSD0[:, None] * x0 + _batch_awgn((B, K), sigma2, rng)
        decided0 = _nearest(constellation.points, y / (sqrt(rho) * kappa * hSD0[:, None]))

    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    rx_bits = demap_hard(constellation, decided0.ravel()[:n_syms])[:L]
    bit_errors = int(np.count_nonzero(rx_bits != bits[0]))
    per_block = slots_per_block if slots_per_block is not None else SLOT_RULES[scheme](N, M, K, T)
    slots = n_blocks * per_block
    return SetResult(
        bit_errors=bit_errors, payload_bits=L,
        packet_error=int(bit_errors > 0), slots=slots,
    )


def _pad(bits, bps):
    rem = len(bits) % bps
    if rem == 0:
        return bits
    return np.concatenate([bits, np.zeros(bps - rem, dtype=bits.dtype)])
