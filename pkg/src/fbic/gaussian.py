"""Gaussian interference channel with feedback: achievable rates, outer bound,
constant-gap certificate and generalized degrees of freedom."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .model import ChannelParams, DomainError, RateReport, Regime, classify

WEAK_GAP_BITS = 1.7075
STRONG_GAP_BITS = 1.5
GAP_SLACK = 1e-6

_LN2 = math.log(2.0)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def log2_1p(x):
    """log2(1 + x), accurate for small x; works on scalars and arrays."""
    return np.log1p(x) / _LN2


def private_power_fraction(inr: float) -> float:
    """Private-message power so that it arrives at the noise level: min(1/INR, 1)."""
    return 1.0 if inr <= 1.0 else 1.0 / inr


# -- achievable rates --------------------------------------------------------

def achievable_strong(params: ChannelParams) -> RateReport:
    """Rate of the two-stage relay scheme when INR >= SNR.

    Each transmitter must decode the other's codeword from its fed-back output
    (rate 1/2 log(1 + INR)) and each receiver decodes after Alamouti combining
    (rate 1/2 log(1 + SNR + INR)). The first constraint always binds.
    """
    if classify(params) is not Regime.STRONG:
        raise DomainError(f"achievable_strong needs INR >= SNR, got {params}")
    if params.snr == 0 and params.inr == 0:
        raise DomainError("achievable_strong is undefined for the all-zero channel")
    tx = 0.5 * float(log2_1p(params.inr))
    rx = 0.5 * float(log2_1p(params.snr + params.inr))
    return RateReport(
        rate=min(tx, rx),
        components=(("tx_decode", tx), ("rx_alamouti", rx)),
        binding="tx_decode" if tx <= rx else "rx_alamouti",
    )


def achievable_weak(params: ChannelParams) -> RateReport:
    """Rate of the rate-split two-stage scheme when INR < SNR.

    The rate is ``private + min(common_tx, common_rx)`` where the private part
    is carried in both slots and the common part is relayed once. With the
    power split ``min(1/INR, 1)`` this equals

        log2(1 + SNR/(2 INR)) + 1/2 log2(1 + INR) - 1/2     for INR >= 1
        log2(1 + SNR/(INR + 1))                             for INR <= 1
    """
    if classify(params) is not Regime.WEAK:
        raise DomainError(f"achievable_weak needs INR < SNR, got {params}")
    s, i = params.snr, params.inr
    lp = private_power_fraction(i)
    lc = 1.0 - lp
    private = float(log2_1p(lp * s / (lp * i + 1.0)))
    common_tx = 0.5 * float(log2_1p(lc * i / (lp * i + 1.0)))
    common_rx = 0.5 * float(log2_1p(lc * (s + i) / (lp * (s + i) + 1.0)))
    common = min(common_tx, common_rx)
    return RateReport(
        rate=private + common,
        components=(("private", private), ("common_tx_decode", common_tx),
                    ("common_rx_alamouti", common_rx)),
        binding="common_tx_decode" if common_tx <= common_rx else "common_rx_alamouti",
    )


def achievable(params: ChannelParams) -> RateReport:
    """Achievable symmetric rate in whichever regime ``params`` falls."""
    if params.snr == 0 and params.inr == 0:
        return RateReport(rate=0.0, binding="zero_channel")
    if classify(params) is Regime.STRONG:
        return achievable_strong(params)
    return achievable_weak(params)


# -- outer bound -------------------------------------------------------------

def _objective_t(snr: float, inr: float, t):
    # t = 1 - rho; 1 - rho**2 = t (2 - t) without cancellation near rho = 1
    a = t * (2.0 - t)
    rho = 1.0 - t
    first = log2_1p(a * snr / (1.0 + a * inr))
    second = log2_1p(snr + inr + 2.0 * rho * math.sqrt(snr * inr))
    return 0.5 * (first + second)


def outer_objective(params: ChannelParams, rho: float) -> float:
    """The bracketed objective of the outer bound at correlation ``rho``."""
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    return float(_objective_t(params.snr, params.inr, 1.0 - rho))


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       rel_tol: float = 1e-12, max_iter: int = 300) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= rel_tol * max(abs(a), abs(b)) + 1e-300:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


# uniform in rho plus log-spaced points hugging rho = 1, where the optimum sits
# at 1 - rho ~ 1/INR for large INR
_T_GRID = np.unique(np.concatenate([
    np.linspace(0.0, 1.0, 2001),
    np.logspace(-17.0, 0.0, 341),
]))


@dataclass(frozen=True)
class OuterBound:
    value: float
    rho: float


def outer_bound(params: ChannelParams) -> OuterBound:
    """Maximum of the outer-bound objective over rho in [0, 1].

    Grid search followed by golden-section refinement of the best bracket.
    """
    s, i = params.snr, params.inr
    values = _objective_t(s, i, _T_GRID)
    k = int(np.argmax(values))
    best_t, best = float(_T_GRID[k]), float(values[k])
    lo = float(_T_GRID[max(k - 1, 0)])
    hi = float(_T_GRID[min(k + 1, len(_T_GRID) - 1)])
    if hi > lo:
        t, v = golden_section_max(lambda x: float(_objective_t(s, i, x)), lo, hi)
        if v > best:
            best_t, best = t, v
    return OuterBound(value=best, rho=1.0 - best_t)


# -- gap certificate ---------------------------------------------------------

@dataclass(frozen=True)
class GapCertificate:
    params: ChannelParams
    achievable: float
    outer: float
    gap: float
    regime: Regime
    rho: float
    bound: float

    @property
    def certified(self) -> bool:
        return -1e-9 <= self.gap <= self.bound + GAP_SLACK


def gap_certificate(params: ChannelParams, weak_bound: float = WEAK_GAP_BITS,
                    strong_bound: float = STRONG_GAP_BITS) -> GapCertificate:
    regime = classify(params)
    ach = achievable(params).rate
    ob = outer_bound(params)
    return GapCertificate(
        params=params, achievable=ach, outer=ob.value, gap=ob.value - ach,
        regime=regime, rho=ob.rho,
        bound=strong_bound if regime is Regime.STRONG else weak_bound,
    )


def gap_sweep(snr_db: Iterable[float], inr_db: Iterable[float], **bounds) -> list[GapCertificate]:
    inr_db = list(inr_db)
    return [gap_certificate(ChannelParams.from_db(s, i), **bounds)
            for s in snr_db for i in inr_db]


# -- generalized degrees of freedom -----------------------------------------

@dataclass(frozen=True)
class GdofPoint:
    alpha: float
    d: float


def _check_alpha(alpha: float) -> float:
    if not (alpha >= 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be finite and nonnegative, got {alpha}")
    return float(alpha)


def gdof_feedback(alpha: float) -> GdofPoint:
    """1 - alpha/2 up to alpha = 1, alpha/2 beyond."""
    alpha = _check_alpha(alpha)
    return GdofPoint(alpha, 1.0 - alpha / 2.0 if alpha <= 1.0 else alpha / 2.0)


def gdof_nonfeedback(alpha: float) -> GdofPoint:
    """The W-shaped curve of the channel without feedback."""
    alpha = _check_alpha(alpha)
    if alpha >= 2.0:
        return GdofPoint(alpha, 1.0)
    d = min(1.0, max(alpha / 2.0, 1.0 - alpha / 2.0), max(alpha, 1.0 - alpha))
    return GdofPoint(alpha, d)


def numeric_gdof(rate: Callable[[ChannelParams], float], alpha: float, snr: float) -> float:
    """``rate(SNR, SNR**alpha) / log2(SNR)`` at a single large SNR."""
    return rate(ChannelParams(snr, snr ** alpha)) / math.log2(snr)


def log_slope(rate: Callable[[ChannelParams], float], alpha: float, snr: float,
              ratio: float = 10.0) -> float:
    """Slope of rate against log2(SNR) between ``snr / ratio`` and ``snr``."""
    lo = snr / ratio
    r_hi = rate(ChannelParams(snr, snr ** alpha))
    r_lo = rate(ChannelParams(lo, lo ** alpha))
    return (r_hi - r_lo) / math.log2(ratio)
