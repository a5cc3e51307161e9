"""Hot decoding kernels: numba-compiled loops with a pure-numpy fallback.

The candidate search dominates simulation runtime (every coherence block
evaluates |Q|^N candidate vectors per slot).  Set STSSC_NO_NUMBA=1 to
force the numpy einsum path; by default the numba path is used whenever
numba imports cleanly.  Both paths scan candidates in order and keep the
first minimum, so tie-breaking is identical.
"""

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def numba_enabled() -> bool:
    if os.environ.get("STSSC_NO_NUMBA", "").strip().lower() in ("1", "true", "yes"):
        return False
    return _HAVE_NUMBA


def _joint_argmin_numpy(u, gram, xc, sqrt_rho):
    """u: (B,N,K), gram: (B,K,N,N), xc: (C,N) kappa-scaled candidates -> (B,K) indices."""
    rho = sqrt_rho * sqrt_rho
    lin = np.real(np.einsum("bnk,cn->bkc", u, xc.conj()))
    outers = xc[:, :, None] * xc.conj()[:, None, :]             # (C, N, N)
    quad = np.real(np.einsum("bksp,csp->bkc", gram, outers))
    metrics = -4.0 * sqrt_rho * lin + 2.0 * rho * quad
    return np.argmin(metrics, axis=2).astype(np.int64)


def _afost_argmin_numpy(y, F, xc):
    """y: (B,M,K), F: (B,M,N), xc: (C,N) -> (B,K) indices."""
    model = np.einsum("bmn,cn->bmc", F, xc)                     # (B, M, C)
    diff = y[:, :, :, None] - model[:, :, None, :]              # (B, M, K, C)
    metrics = np.sum(np.abs(diff) ** 2, axis=1)                 # (B, K, C)
    return np.argmin(metrics, axis=2).astype(np.int64)


if _HAVE_NUMBA:

    @njit(cache=True)
    def _joint_argmin_numba(u, gram, xc, sqrt_rho):
        B, N, K = u.shape
        C = xc.shape[0]
        rho = sqrt_rho * sqrt_rho
        out = np.empty((B, K), dtype=np.int64)
        for b in range(B):
            for t in range(K):
                best = 0
                best_m = np.inf
                for c in range(C):
                    lin = 0.0
                    for s in range(N):
                        lin += (u[b, s, t] * np.conj(xc[c, s])).real
                    quad = 0.0
                    for s in range(N):
                        for p in range(N):
                            quad += (gram[b, t, s, p] * xc[c, s] * np.conj(xc[c, p])).real
                    m = -4.0 * sqrt_rho * lin + 2.0 * rho * quad
                    if m < best_m:
                        best_m = m
                        best = c
                out[b, t] = best
        return out

    @njit(cache=True)
    def _afost_argmin_numba(y, F, xc):
        B, M, K = y.shape
        C = xc.shape[0]
        N = xc.shape[1]
        out = np.empty((B, K), dtype=np.int64)
        model = np.empty((M, C), dtype=np.complex128)
        for b in range(B):
            for r in range(M):
                for c in range(C):
                    acc = 0.0 + 0.0j
                    for s in range(N):
                        acc += F[b, r, s] * xc[c, s]
                    model[r, c] = acc
            for t in range(K):
                best = 0
                best_m = np.inf
                for c in range(C):
                    m = 0.0
                    for r in range(M):
                        d = y[b, r, t] - model[r, c]
                        m += d.real * d.real + d.imag * d.imag
                    if m < best_m:
                        best_m = m
                        best = c
                out[b, t] = best
        return out


def joint_argmin(u, gram, xc, sqrt_rho):
    """Batched exact-slot-metric candidate argmin; returns (B, K) candidate indices."""
    if numba_enabled():
        return _joint_argmin_numba(
            np.ascontiguousarray(u), np.ascontiguousarray(gram),
            np.ascontiguousarray(xc), float(sqrt_rho),
        )
    return _joint_argmin_numpy(u, gram, xc, float(sqrt_rho))


def afost_argmin(y, F, xc):
    """Batched amplify-and-forward candidate argmin; returns (B, K) candidate indices."""
    if numba_enabled():
        return _afost_argmin_numba(
            np.ascontiguousarray(y), np.ascontiguousarray(F), np.ascontiguousarray(xc)
        )
    return _afost_argmin_numpy(y, F, xc)
