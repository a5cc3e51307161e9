"""Block-fading channel realizations and additive noise."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UsageError

FADING_MODELS = ("unit-mag", "rayleigh")


@dataclass(frozen=True)
class ChannelRealization:
    """Gains for one coherence block, constant across all its phases.

    hSR[s, r] is the source s -> relay r gain, hRD[r] the relay r ->
    destination gain, hSD[s] the direct source -> destination gain.
    """

    hSR: np.ndarray     # (N, M)
    hRD: np.ndarray     # (M,)
    hSD: np.ndarray     # (N,)
    rho: float
    sigma2: float

    def __post_init__(self):
        self.hSR.setflags(write=False)
        self.hRD.setflags(write=False)
        self.hSD.setflags(write=False)

    @property
    def N(self) -> int:
        return self.hSR.shape[0]

    @property
    def M(self) -> int:
        return self.hSR.shape[1]


def _draw_gains(model: str, shape, rng: np.random.Generator) -> np.ndarray:
    if model == "rayleigh":
        return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2.0)
    if model == "unit-mag":
        return np.exp(2j * np.pi * rng.random(size=shape))
    raise ConfigurationError(f"unknown fading model {model!r}; valid: {', '.join(FADING_MODELS)}")


def draw_channel(model: str, N: int, M: int, rho: float, rng: np.random.Generator,
                 sigma2: float = 1.0) -> ChannelRealization:
    """One coherence block's gains: i.i.d. CN(0,1) (rayleigh) or e^{j theta} (unit-mag)."""
    if N < 1 or M < 1:
        raise UsageError("N and M must be >= 1")
    if rho <= 0:
        raise UsageError("rho must be positive")
    return ChannelRealization(
        hSR=_draw_gains(model, (N, M), rng),
        hRD=_draw_gains(model, (M,), rng),
        hSD=_draw_gains(model, (N,), rng),
        rho=float(rho),
        sigma2=float(sigma2),
    )


def awgn(length, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. CN(0, sigma2) samples, variance sigma2/2 per real dimension.

    `length` may be an int or a shape tuple.
    """
    if sigma2 < 0:
        raise UsageError("sigma2 must be nonnegative")
    shape = (length,) if np.isscalar(length) else tuple(length)
    if sigma2 == 0:
        return np.zeros(shape, dtype=complex)
    scale = np.sqrt(sigma2 / 2.0)
    return scale * (rng.normal(size=shape) + 1j * rng.normal(size=shape))
