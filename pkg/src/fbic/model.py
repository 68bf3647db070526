"""Parameter types and regime classification shared by every module.

All rates are in bits/s/Hz (base-2 logarithms). Channel parameters are kept
on a linear power scale internally; dB only appears at the CLI boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

MAX_BIT_LEVELS = 63


class DomainError(ValueError):
    """Raised when a parameter lies outside an operation's domain."""


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        return -math.inf
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class ChannelParams:
    """Linear-scale SNR and INR of the symmetric Gaussian interference channel."""

    snr: float
    inr: float

    def __post_init__(self):
        for name in ("snr", "inr"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and nonnegative, got {value!r}")
        object.__setattr__(self, "snr", float(self.snr))
        object.__setattr__(self, "inr", float(self.inr))

    @classmethod
    def from_db(cls, snr_db: float, inr_db: float) -> "ChannelParams":
        return cls(db_to_linear(snr_db), db_to_linear(inr_db))

    def to_db(self) -> tuple[float, float]:
        return linear_to_db(self.snr), linear_to_db(self.inr)

    @property
    def gain_direct(self) -> float:
        """Magnitude of the direct channel gain, |g_d| = sqrt(SNR)."""
        return math.sqrt(self.snr)

    @property
    def gain_cross(self) -> float:
        return math.sqrt(self.inr)


@dataclass(frozen=True)
class DetParams:
    """Bit levels (n, m) of the symmetric linear deterministic channel."""

    n: int
    m: int

    def __post_init__(self):
        for name in ("n", "m"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise DomainError(f"{name} must be an integer, got {value!r}")
            if not 0 <= value <= MAX_BIT_LEVELS:
                raise DomainError(
                    f"{name} must lie in [0, {MAX_BIT_LEVELS}], got {value}")

    @property
    def q(self) -> int:
        """Number of levels a transmitter drives, max(n, m)."""
        return max(self.n, self.m)


class Regime(enum.Enum):
    WEAK = "weak"
    STRONG = "strong"


def classify(params: ChannelParams | DetParams) -> Regime:
    """Interference regime; ties (INR == SNR, m == n) count as strong."""
    if isinstance(params, DetParams):
        return Regime.STRONG if params.m >= params.n else Regime.WEAK
    return Regime.STRONG if params.inr >= params.snr else Regime.WEAK


def det_from_gaussian(params: ChannelParams) -> DetParams:
    """Map (SNR, INR) to bit levels n = floor(log2 SNR), m = floor(log2 INR)."""
    if params.snr < 1 or params.inr < 1:
        raise DomainError("det_from_gaussian needs snr >= 1 and inr >= 1")
    return DetParams(_floor_log2(params.snr), _floor_log2(params.inr))


def _floor_log2(x: float) -> int:
    # frexp is exact, math.log2 can round 2**k - eps up to k
    mantissa, exponent = math.frexp(x)
    return exponent - 1


@dataclass(frozen=True)
class RateReport:
    """A rate together with the terms it was built from.

    ``binding`` names the component that determines ``rate``.
    """

    rate: float
    components: tuple[tuple[str, float], ...] = field(default_factory=tuple)
    binding: str = ""

    def component(self, label: str) -> float:
        for name, value in self.components:
            if name == label:
                return value
        raise KeyError(label)
