"""Kramer's feedback scheme as a baseline.

The correlation coefficient rho* solves a quartic in [0, 1]; the symmetric
rate is then

    log2((1 + SNR + INR + 2 rho* sqrt(SNR INR)) / (1 + (1 - rho*^2) INR)).

Near rho = 1 the quartic's leading coefficients cancel to many digits at high
SNR, so the root search runs in ``t = 1 - rho`` with the polynomial re-expanded
around rho = 1 (exact symbolic expansion, no cancellation of the large terms).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .gaussian import GdofPoint, _check_alpha
from .model import ChannelParams, DomainError, RateReport

log = logging.getLogger(__name__)

SCAN_POINTS = 10_000


class RootNotFoundError(DomainError):
    """No sign change of the rho* quartic was found in [0, 1]."""


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients of the rho* quartic, highest degree first."""

    c4: float
    c3: float
    c2: float
    c1: float
    c0: float

    @classmethod
    def from_params(cls, params: ChannelParams) -> "QuarticCoeffs":
        s, i = params.snr, params.inr
        r = math.sqrt(s * i)
        return cls(2.0 * i * r, i, -4.0 * (i + 1.0) * r, -(2.0 + s + 2.0 * i),
                   2.0 * (i + 1.0) * r)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.c4, self.c3, self.c2, self.c1, self.c0)

    @property
    def scale(self) -> float:
        return max(abs(c) for c in self.as_tuple())

    def __call__(self, rho):
        return np.polyval(self.as_tuple(), rho)


def _shifted_coeffs(params: ChannelParams) -> tuple[float, ...]:
    """Coefficients of p(1 - t) in t, highest degree first."""
    s, i = params.snr, params.inr
    r = math.sqrt(s * i)
    return (2.0 * i * r,
            -i * (8.0 * r + 1.0),
            8.0 * i * r + 3.0 * i - 4.0 * r,
            8.0 * r + s + 2.0 - i,
            -(i + 2.0 * r + s + 2.0))


class _Quartic:
    def __init__(self, params: ChannelParams):
        coeffs = QuarticCoeffs.from_params(params)
        scale = coeffs.scale
        self.near_zero = np.array(coeffs.as_tuple()) / scale
        self.near_one = np.array(_shifted_coeffs(params)) / scale

    def at_t(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.5, np.polyval(self.near_zero, 1.0 - t),
                        np.polyval(self.near_one, t))


def _bisect(f, lo: float, hi: float, f_lo: float, max_iter: int = 400) -> float:
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = float(f(mid))
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_T_SCAN = np.unique(np.concatenate([
    np.linspace(0.0, 1.0, SCAN_POINTS),
    np.logspace(-18.0, -4.0, 141),
]))


def _rate_from_t(params: ChannelParams, t: float) -> float:
    s, i = params.snr, params.inr
    rho = 1.0 - t
    num = 1.0 + s + i + 2.0 * rho * math.sqrt(s * i)
    den = 1.0 + t * (2.0 - t) * i
    return math.log2(num / den)


@dataclass(frozen=True)
class KramerRoot:
    rho: float
    t: float
    one_minus_rho_sq: float
    residual: float
    scale: float
    candidates: int


def kramer_root(params: ChannelParams) -> KramerRoot:
    """Root of the quartic in [0, 1] with full precision in 1 - rho^2."""
    if params.snr <= 0 or params.inr <= 0:
        raise DomainError(f"Kramer's rho* needs SNR > 0 and INR > 0, got {params}")
    quartic = _Quartic(params)
    values = quartic.at_t(_T_SCAN)
    signs = np.sign(values)
    roots = [float(_T_SCAN[k]) for k in np.flatnonzero(values == 0.0)]
    for k in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        roots.append(_bisect(quartic.at_t, float(_T_SCAN[k]), float(_T_SCAN[k + 1]),
                             float(values[k])))
    if not roots:
        raise RootNotFoundError(
            f"no sign change in [0, 1] for {params}: p(0)={values[-1]:.3e}, "
            f"p(1)={values[0]:.3e} (normalized)")
    if len(roots) > 1:
        log.info("quartic has %d roots in [0, 1] for %s; keeping the best rate",
                 len(roots), params)
    t = max(roots, key=lambda x: _rate_from_t(params, x))
    coeffs = QuarticCoeffs.from_params(params)
    return KramerRoot(
        rho=1.0 - t,
        t=t,
        one_minus_rho_sq=t * (2.0 - t),
        residual=float(abs(coeffs(1.0 - t))),
        scale=coeffs.scale,
        candidates=len(roots),
    )


def kramer_rho_star(params: ChannelParams) -> float:
    return kramer_root(params).rho


def kramer_rate(params: ChannelParams) -> RateReport:
    root = kramer_root(params)
    return RateReport(rate=_rate_from_t(params, root.t),
                      components=(("rho_star", root.rho),), binding="rho_star")


def kramer_gdof(alpha: float) -> GdofPoint:
    """1 - a on [0, 1/3), (3 - a)/4 on [1/3, 1), (1 + a)/4 from 1 on."""
    alpha = _check_alpha(alpha)
    if alpha < 1.0 / 3.0:
        d = 1.0 - alpha
    elif alpha < 1.0:
        d = (3.0 - alpha) / 4.0
    else:
        d = (1.0 + alpha) / 4.0
    return GdofPoint(alpha, d)
