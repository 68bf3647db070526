"""Monte-Carlo check of the SINR algebra behind the Gaussian two-stage scheme.

Symbols and noise are unit-power circularly-symmetric complex Gaussians. Every
SINR is estimated as (empirical power of the wanted component after
combining) / (empirical power of everything else), both taken from the same
sample stream.

Samples are drawn in fixed-size blocks. Block ``b`` uses its own PCG64 stream
seeded by ``SeedSequence(seed, spawn_key=(b,))``, and per-block sums are reduced
with ``math.fsum``, so results do not depend on how blocks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .gaussian import private_power_fraction
from .model import ChannelParams, DomainError, Regime, classify

MIN_SAMPLES = 1_000
BLOCK_SIZE = 1 << 14
RNG_ALGORITHM = "PCG64, SeedSequence(seed, spawn_key=(block,))"


@dataclass(frozen=True)
class ComplexGains:
    gd: complex
    gc: complex

    @classmethod
    def from_params(cls, params: ChannelParams, phase_direct: float = 0.0,
                    phase_cross: float = 0.0) -> "ComplexGains":
        return cls(params.gain_direct * complex(math.cos(phase_direct), math.sin(phase_direct)),
                   params.gain_cross * complex(math.cos(phase_cross), math.sin(phase_cross)))


@dataclass(frozen=True)
class McConfig:
    params: ChannelParams
    samples: int = 100_000
    seed: int = 20_240_101
    phase_direct: float = 0.0
    phase_cross: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if self.samples < MIN_SAMPLES:
            raise DomainError(f"need at least {MIN_SAMPLES} samples, got {self.samples}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def gains(self) -> ComplexGains:
        return ComplexGains.from_params(self.params, self.phase_direct, self.phase_cross)


@dataclass(frozen=True)
class RatioEstimate:
    """Ratio of two empirical mean powers with a delta-method standard error."""

    value: float
    stderr: float
    target: float

    @property
    def rel_error(self) -> float:
        if self.target == 0:
            return abs(self.value)
        return abs(self.value - self.target) / self.target


def _cn(rng: np.random.Generator, size: int) -> np.ndarray:
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * math.sqrt(0.5)


def _power_sums(signal: np.ndarray, rest: np.ndarray) -> np.ndarray:
    a = np.abs(signal) ** 2
    b = np.abs(rest) ** 2
    return np.array([a.sum(), b.sum(), (a * a).sum(), (b * b).sum(), (a * b).sum()])


def _ratio(sums: list[float], n: int, target: float) -> RatioEstimate:
    sa, sb, saa, sbb, sab = sums
    ma, mb = sa / n, sb / n
    if ma == 0.0:
        return RatioEstimate(0.0, 0.0, target)
    va = saa / n - ma * ma
    vb = sbb / n - mb * mb
    cab = sab / n - ma * mb
    r = ma / mb
    var = (va - 2.0 * r * cab + r * r * vb) / (mb * mb * n)
    return RatioEstimate(r, math.sqrt(max(var, 0.0)), target)


def _block_sizes(samples: int) -> list[int]:
    full, tail = divmod(samples, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([tail] if tail else [])


def _run_blocks(cfg: McConfig, block_fn) -> list[np.ndarray]:
    sizes = _block_sizes(cfg.samples)

    def one(b: int):
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(cfg.seed, spawn_key=(b,))))
        return block_fn(rng, sizes[b])

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(one, range(len(sizes))))
    return [one(b) for b in range(len(sizes))]


def _reduce(parts: list[np.ndarray]) -> list[list[float]]:
    stacked = np.stack(parts)
    return [[math.fsum(stacked[:, row, col]) for col in range(stacked.shape[2])]
            for row in range(stacked.shape[1])]


# -- strong interference -----------------------------------------------------

@dataclass(frozen=True)
class StrongEstimate:
    effective_snr: RatioEstimate
    snr_tx_decode: RatioEstimate
    leakage: float
    samples: int
    seed: int
    rng: str = RNG_ALGORITHM

    @property
    def rate_rx(self) -> float:
        return 0.5 * math.log2(1.0 + self.effective_snr.value)

    @property
    def rate(self) -> float:
        """Both decoding constraints of the scheme, from the empirical SNRs."""
        return min(self.rate_rx, 0.5 * math.log2(1.0 + self.snr_tx_decode.value))


def alamouti_combine(gains: ComplexGains, y_first: np.ndarray, y_second: np.ndarray) -> np.ndarray:
    """Project the two-slot observation onto the direction orthogonal to user 2."""
    return np.conj(gains.gd) * y_first - gains.gc * np.conj(y_second)


def cross_term_leakage(gains: ComplexGains, x2: np.ndarray) -> float:
    """Largest magnitude of user 2's symbol after combining, relative to its scale."""
    first = gains.gc * x2
    second = gains.gd * np.conj(x2)
    out = alamouti_combine(gains, first, second)
    scale = abs(gains.gd) * abs(gains.gc) * float(np.max(np.abs(x2), initial=0.0))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(out))) / scale


def simulate_strong_combining(cfg: McConfig) -> StrongEstimate:
    """Effective SNR of the Alamouti-combined receiver in strong interference.

    Slot 1 carries (x1, x2); in slot 2 transmitter 1 sends conj(x2) and
    transmitter 2 sends -conj(x1). The target is SNR + INR. Also measures the
    SNR at which transmitter 1 decodes x2 from its fed-back output (target INR).
    """
    p = cfg.params
    if classify(p) is not Regime.STRONG:
        raise DomainError(f"strong-regime simulation needs INR >= SNR, got {p}")
    g = cfg.gains
    power = abs(g.gd) ** 2 + abs(g.gc) ** 2

    def block(rng, n):
        x1, x2, z1, z2 = (_cn(rng, n) for _ in range(4))
        y_first = g.gd * x1 + g.gc * x2 + z1
        y_second = g.gd * np.conj(x2) - g.gc * np.conj(x1) + z2
        combined = alamouti_combine(g, y_first, y_second)
        signal = power * x1
        fb_signal = g.gc * x2
        fb = y_first - g.gd * x1
        leak = cross_term_leakage(g, x2)
        return np.vstack([_power_sums(signal, combined - signal),
                          _power_sums(fb_signal, fb - fb_signal),
                          [leak, 0, 0, 0, 0]])

    parts = _run_blocks(cfg, block)
    sums = _reduce(parts)
    leakage = max(float(part[2, 0]) for part in parts)
    return StrongEstimate(
        effective_snr=_ratio(sums[0], cfg.samples, p.snr + p.inr),
        snr_tx_decode=_ratio(sums[1], cfg.samples, p.inr),
        leakage=leakage, samples=cfg.samples, seed=cfg.seed,
    )


# -- weak interference -------------------------------------------------------

@dataclass(frozen=True)
class WeakEstimate:
    sinr_common_rx: RatioEstimate
    sinr_common_tx_decode: RatioEstimate
    sinr_private: RatioEstimate
    lambda_private: float
    samples: int
    seed: int
    rng: str = RNG_ALGORITHM

    @property
    def rate(self) -> float:
        """Private rate plus the relayed common rate, from the empirical SINRs."""
        return (math.log2(1.0 + self.sinr_private.value)
                + 0.5 * math.log2(1.0 + self.sinr_common_tx_decode.value))


def weak_sinr_targets(params: ChannelParams) -> dict[str, float]:
    s, i = params.snr, params.inr
    lp = private_power_fraction(i)
    lc = 1.0 - lp
    return {
        "sinr_common_tx_decode": lc * i / (lp * i + 1.0),
        "sinr_common_rx": lc * (s + i) / (lp * (s + i) + 1.0),
        "sinr_private": lp * s / (lp * i + 1.0),
    }


def simulate_weak_combining(cfg: McConfig) -> WeakEstimate:
    """SINRs of the three decoding steps of the rate-split scheme.

    Common symbols are relayed Alamouti-style in slot 2; fresh private symbols
    are superposed in both slots with power fraction min(1/INR, 1). Measured:
    the transmitter's decode of the other common symbol from feedback, the
    receiver's decode of its common symbol after combining (private symbols
    left as interference), and the private symbols after both common symbols
    are removed (pooled over both slots).
    """
    p = cfg.params
    if classify(p) is not Regime.WEAK:
        raise DomainError(f"weak-regime simulation needs INR < SNR, got {p}")
    g = cfg.gains
    lp = private_power_fraction(p.inr)
    lc = 1.0 - lp
    ac, ap = math.sqrt(lc), math.sqrt(lp)
    power = abs(g.gd) ** 2 + abs(g.gc) ** 2

    def block(rng, n):
        x1c, x2c, x1p, x2p, x1q, x2q, z1, z2 = (_cn(rng, n) for _ in range(8))
        u1 = ac * x1c + ap * x1p
        u2 = ac * x2c + ap * x2p
        y_first = g.gd * u1 + g.gc * u2 + z1
        # transmitter 1 strips its own input from the fed-back output
        fb = y_first - g.gd * u1
        fb_signal = g.gc * ac * x2c
        u1b = ac * np.conj(x2c) + ap * x1q
        u2b = -ac * np.conj(x1c) + ap * x2q
        y_second = g.gd * u1b + g.gc * u2b + z2
        combined = alamouti_combine(g, y_first, y_second)
        rx_signal = power * ac * x1c
        clean_first = y_first - g.gd * ac * x1c - g.gc * ac * x2c
        clean_second = y_second - g.gd * ac * np.conj(x2c) + g.gc * ac * np.conj(x1c)
        priv_signal = np.concatenate([g.gd * ap * x1p, g.gd * ap * x1q])
        priv_total = np.concatenate([clean_first, clean_second])
        return np.vstack([
            _power_sums(rx_signal, combined - rx_signal),
            _power_sums(fb_signal, fb - fb_signal),
            _power_sums(priv_signal, priv_total - priv_signal),
        ])

    sums = _reduce(_run_blocks(cfg, block))
    targets = weak_sinr_targets(p)
    n = cfg.samples
    return WeakEstimate(
        sinr_common_rx=_ratio(sums[0], n, targets["sinr_common_rx"]),
        sinr_common_tx_decode=_ratio(sums[1], n, targets["sinr_common_tx_decode"]),
        sinr_private=_ratio(sums[2], 2 * n, targets["sinr_private"]),
        lambda_private=lp, samples=n, seed=cfg.seed,
    )
