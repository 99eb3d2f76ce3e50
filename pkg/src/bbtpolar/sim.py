"""Monte-Carlo FER/BER estimation over BPSK-AWGN."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import channel_llrs, sigma_from_ebn0
from .codec import CRC11, CrcConfig, OpCounter, ca_scl_decode, encode, attach_crc, sc_decode, scl_decode
from .construction import RateProfile, construct
from .psc import extract_subtree, psc_decode, pscl_decode

SCHEMA_VERSION = 1
DECODERS = ("sc", "scl", "ca-scl", "psc", "pscl", "ca-pscl")
RESULT_COLUMNS = ("ebn0_db", "trials", "frame_errors", "bit_errors", "fer", "ber", "llr_ops")

Channel = Callable[[np.ndarray, float, np.random.Generator], np.ndarray]


@dataclass
class SimConfig:
    n: int
    k: int
    construction: str = "pw"
    decoder: str = "sc"
    list_size: int = 1
    tau: int | None = None
    crc: int = 0
    design_snr_db: float = 3.0
    ebn0_db: Sequence[float] = (2.0,)
    max_trials: int = 10_000_000
    min_frame_errors: int = 100
    seed: int = 0
    batch_size: int = 1000
    llr_cap: float | None = None

    def validate(self) -> None:
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; expected one of {DECODERS}")
        if self.max_trials < 1 or self.min_frame_errors < 1 or self.batch_size < 1:
            raise ValueError("max_trials, min_frame_errors and batch_size must be positive")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.decoder.startswith("ca-"):
            if self.crc != 11:
                raise ValueError(f"{self.decoder} needs --crc 11")
        elif self.crc:
            raise ValueError(f"decoder {self.decoder} does not use a CRC")
        if self.crc and self.k + self.crc > self.n:
            raise ValueError("k plus CRC bits exceed the code length")
        if "psc" in self.decoder and (self.tau is None or self.tau < 1):
            raise ValueError(f"{self.decoder} needs a positive tau")
        if self.decoder in ("scl", "ca-scl", "pscl", "ca-pscl") and self.list_size < 1:
            raise ValueError("list size must be at least 1")

    @property
    def crc_config(self) -> CrcConfig | None:
        return CRC11 if self.crc == 11 else None

    @property
    def rate(self) -> float:
        return self.k / self.n


@dataclass
class SnrPoint:
    ebn0_db: float
    trials: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    llr_ops: float

    @property
    def fer_stderr(self) -> float:
        return float(np.sqrt(self.fer * (1.0 - self.fer) / self.trials)) if self.trials else float("nan")


@dataclass
class SimResult:
    config: SimConfig
    results: list[SnrPoint] = field(default_factory=list)

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["ebn0_db"] = list(cfg["ebn0_db"])
        return {"schema_version": SCHEMA_VERSION, "config": cfg, "results": [asdict(p) for p in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for p in self.results:
            row = asdict(p)
            writer.writerow([format(row[c], ".17g") if isinstance(row[c], float) else row[c] for c in RESULT_COLUMNS])
        return buf.getvalue()


def build_profile(config: SimConfig) -> RateProfile:
    return construct(config.n, config.k + config.crc, config.construction, config.design_snr_db, rate_for_sigma=config.rate)


def make_decoder(config: SimConfig, profile: RateProfile) -> Callable[[np.ndarray, OpCounter], np.ndarray]:
    """Callable mapping a batch of LLRs to decoded data bits (CRC stripped)."""
    dec, L, crc = config.decoder, config.list_size, config.crc_config
    if dec == "sc":
        return lambda y, c: sc_decode(profile, y, c)
    if dec == "scl":
        return lambda y, c: scl_decode(profile, y, L, c)
    if dec == "ca-scl":
        return lambda y, c: ca_scl_decode(profile, y, L, crc, c)[0]
    subtree = extract_subtree(profile, config.tau)
    if dec == "psc":
        return lambda y, c: psc_decode(subtree, y, c)
    return lambda y, c: pscl_decode(subtree, y, L, c, crc)


def _awgn(codewords: np.ndarray, sigma: float, rng: np.random.Generator, llr_cap: float | None = None) -> np.ndarray:
    return channel_llrs(codewords, sigma, rng, llr_cap)


def run_point(config: SimConfig, profile: RateProfile, decoder, ebn0_db: float, rng: np.random.Generator, channel: Channel | None = None) -> SnrPoint:
    sigma = sigma_from_ebn0(ebn0_db, config.rate)
    crc = config.crc_config
    trials = frame_errors = bit_errors = 0
    ops = OpCounter()
    decoded = 0
    while trials < config.max_trials and frame_errors < config.min_frame_errors:
        b = min(config.batch_size, config.max_trials - trials)
        data = rng.integers(0, 2, size=(b, config.k), dtype=np.uint8)
        block = attach_crc(data, crc) if crc else data
        codewords = encode(profile, block)
        llrs = channel(codewords, sigma, rng) if channel else _awgn(codewords, sigma, rng, config.llr_cap)
        est = decoder(llrs, ops)
        decoded += b
        wrong_bits = np.count_nonzero(est != data, axis=1)
        wrong = wrong_bits > 0
        # keep frames up to the one that reaches the error target
        cum = frame_errors + np.cumsum(wrong)
        hit = np.flatnonzero(cum >= config.min_frame_errors)
        used = int(hit[0]) + 1 if len(hit) else b
        trials += used
        frame_errors += int(wrong[:used].sum())
        bit_errors += int(wrong_bits[:used].sum())
    return SnrPoint(
        ebn0_db=float(ebn0_db),
        trials=trials,
        frame_errors=frame_errors,
        bit_errors=bit_errors,
        fer=frame_errors / trials,
        ber=bit_errors / (trials * config.k),
        llr_ops=ops.total / decoded,
    )


def run_simulation(config: SimConfig, channel: Channel | None = None) -> SimResult:
    """One independent RNG stream per SNR point, derived from ``(seed, point index)``."""
    config.validate()
    profile = build_profile(config)
    decoder = make_decoder(config, profile)
    result = SimResult(config)
    for idx, ebn0 in enumerate(config.ebn0_db):
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, idx]))
        result.results.append(run_point(config, profile, decoder, ebn0, rng, channel))
    return result
