"""BPSK over AWGN: SNR bookkeeping and channel LLRs."""
from __future__ import annotations

import math

import numpy as np


def sigma_from_ebn0(ebn0_db: float, rate: float) -> float:
    """Noise std for unit-energy BPSK at the given Eb/N0 (dB), with N0 = 2 sigma^2."""
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    return 1.0 / math.sqrt(2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def bpsk(codewords) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(codewords, dtype=np.float64)


def channel_llrs(codewords, sigma: float, rng: np.random.Generator, llr_cap: float | None = None) -> np.ndarray:
    """LLRs ``2 y / sigma^2`` of ``y = bpsk(c) + n``, ``n ~ N(0, sigma^2)``."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = bpsk(codewords)
    y = x + sigma * rng.standard_normal(x.shape)
    llr = 2.0 * y / sigma**2
    if llr_cap is not None:
        np.clip(llr, -llr_cap, llr_cap, out=llr)
    return llr
