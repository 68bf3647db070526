import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbic.gaussian import (GAP_SLACK, STRONG_GAP_BITS, WEAK_GAP_BITS, achievable,
                           achievable_strong, achievable_weak, gap_certificate, gap_sweep,
                           gdof_feedback, gdof_nonfeedback, log_slope, numeric_gdof,
                           outer_bound, outer_objective)
from fbic.model import ChannelParams, DomainError, Regime

DB_GRID = list(range(-10, 71, 5))


def grid_oracle(snr, inr, points=100_001):
    """Brute-force maximum of the outer objective on a uniform rho grid."""
    rho = np.linspace(0.0, 1.0, points)
    a = 1.0 - rho ** 2
    vals = 0.5 * (np.log2(1 + a * snr / (1 + a * inr))
                  + np.log2(1 + snr + inr + 2 * rho * np.sqrt(snr * inr)))
    return float(vals.max())


# -- achievable --------------------------------------------------------------

def test_strong_examples():
    assert achievable_strong(ChannelParams(1, 3)).rate == pytest.approx(1.0, abs=1e-12)
    assert achievable_strong(ChannelParams(10, 100)).rate == pytest.approx(
        0.5 * math.log2(101), abs=1e-12)
    assert 0.5 * math.log2(101) == pytest.approx(3.3291, abs=1e-4)


def test_strong_components():
    r = achievable_strong(ChannelParams(10, 100))
    assert r.component("tx_decode") == pytest.approx(0.5 * math.log2(101))
    assert r.component("rx_alamouti") == pytest.approx(0.5 * math.log2(111))
    assert r.binding == "tx_decode"
    assert r.rate == min(r.component("tx_decode"), r.component("rx_alamouti"))


def test_strong_rejects_zero_channel_and_weak():
    with pytest.raises(DomainError):
        achievable_strong(ChannelParams(0, 0))
    with pytest.raises(DomainError):
        achievable_strong(ChannelParams(4, 1))


def test_weak_examples():
    assert achievable_weak(ChannelParams(16, 2)).rate == pytest.approx(
        math.log2(5) + 0.5 * math.log2(3) - 0.5, abs=1e-12)
    assert math.log2(5) + 0.5 * math.log2(3) - 0.5 == pytest.approx(2.6144, abs=1e-4)
    at_one = achievable_weak(ChannelParams(4, 1)).rate
    assert at_one == pytest.approx(math.log2(3), abs=1e-12)
    assert at_one == pytest.approx(math.log2(1 + 4 / 2) + 0.5 * math.log2(2) - 0.5, abs=1e-12)
    assert achievable_weak(ChannelParams(1, 0)).rate == pytest.approx(1.0, abs=1e-12)


def test_weak_rejects_strong():
    with pytest.raises(DomainError):
        achievable_weak(ChannelParams(1, 4))


@given(st.floats(min_value=1.0001, max_value=1e12),
       st.floats(min_value=0.0, max_value=1.0, exclude_max=True))
def test_weak_components_reconstruct_rate(snr, frac):
    inr = frac * snr
    p = ChannelParams(snr, inr)
    r = achievable_weak(p)
    assert r.rate == pytest.approx(r.component("private") + min(
        r.component("common_tx_decode"), r.component("common_rx_alamouti")), abs=1e-12)
    if inr >= 1:
        closed = math.log2(1 + snr / (2 * inr)) + 0.5 * math.log2(1 + inr) - 0.5
    else:
        closed = math.log2(1 + snr / (inr + 1))
    assert r.rate == pytest.approx(closed, rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("snr", [2.0, 10.0, 1e3, 1e6, 1e12])
def test_weak_continuity_at_inr_one(snr):
    mid = achievable_weak(ChannelParams(snr, 1.0)).rate
    for d in (1e-12, 1e-10):
        assert abs(achievable_weak(ChannelParams(snr, 1.0 - d)).rate - mid) <= 1e-9
        assert abs(achievable_weak(ChannelParams(snr, 1.0 + d)).rate - mid) <= 1e-9


def test_achievable_dispatch():
    assert achievable(ChannelParams(0, 0)).rate == 0.0
    assert achievable(ChannelParams(1, 3)).rate == achievable_strong(ChannelParams(1, 3)).rate
    assert achievable(ChannelParams(3, 1)).rate == achievable_weak(ChannelParams(3, 1)).rate


def test_large_inputs_are_finite():
    for p in (ChannelParams(1e14, 1e14), ChannelParams(1e14, 1.0), ChannelParams(1.0, 1e14)):
        assert math.isfinite(achievable(p).rate)
        assert math.isfinite(outer_bound(p).value)


# -- outer bound -------------------------------------------------------------

def test_outer_objective_examples():
    assert outer_objective(ChannelParams(0, 0), 0.0) == 0.0
    assert outer_objective(ChannelParams(15, 0), 0.0) == pytest.approx(4.0, abs=1e-12)
    assert outer_objective(ChannelParams(1, 1), 1.0) == pytest.approx(0.5 * math.log2(5),
                                                                      abs=1e-12)


def test_outer_bound_zero():
    assert outer_bound(ChannelParams(0, 0)).value == 0.0


@pytest.mark.parametrize("snr, inr", [(100, 10), (1, 1), (10, 1000), (1e4, 1e2), (3, 0.2)])
def test_outer_bound_matches_grid_oracle(snr, inr):
    ob = outer_bound(ChannelParams(snr, inr))
    oracle = grid_oracle(snr, inr)
    assert ob.value >= oracle - 1e-12
    assert abs(ob.value - oracle) <= 1e-6
    assert 0.0 <= ob.rho <= 1.0
    assert outer_objective(ChannelParams(snr, inr), ob.rho) == pytest.approx(ob.value, abs=1e-9)


def test_outer_bound_one_one_closed_form():
    # the objective at (1, 1) written out by hand
    rho = np.linspace(0, 1, 100_001)
    f = 0.5 * (np.log2(1 + (1 - rho ** 2) / (2 - rho ** 2)) + np.log2(3 + 2 * rho))
    assert outer_bound(ChannelParams(1, 1)).value == pytest.approx(f.max(), abs=1e-6)


@pytest.mark.parametrize("inr_db", [-10, 0, 20, 50, 70])
def test_outer_bound_monotone_in_snr(inr_db):
    inr = 10 ** (inr_db / 10)
    vals = [outer_bound(ChannelParams(10 ** (s / 10), inr)).value for s in range(-10, 71)]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


# -- gap ---------------------------------------------------------------------

def test_gap_examples():
    weak = gap_certificate(ChannelParams(1e6, 1e4))
    assert weak.regime is Regime.WEAK and 0 <= weak.gap <= WEAK_GAP_BITS and weak.certified
    strong = gap_certificate(ChannelParams(10, 1000))
    assert strong.regime is Regime.STRONG and 0 <= strong.gap <= STRONG_GAP_BITS
    zero = gap_certificate(ChannelParams(0, 0))
    assert zero.gap == 0.0 and zero.certified


def test_gap_grid_and_sandwich():
    for c in gap_sweep(DB_GRID, DB_GRID):
        assert c.achievable <= c.outer + 1e-9
        limit = WEAK_GAP_BITS if c.regime is Regime.WEAK else STRONG_GAP_BITS
        assert c.gap <= limit + GAP_SLACK
        assert c.certified


def test_gap_constant_matches_chain():
    assert 2 * WEAK_GAP_BITS == pytest.approx(math.log2(2) + math.log2(8 / 3) + 1, abs=1e-4)
    assert 2 * STRONG_GAP_BITS == math.log2(2) + math.log2(4)


def test_tight_bound_is_not_certified():
    certs = gap_sweep(DB_GRID, DB_GRID, weak_bound=1.0)
    assert not all(c.certified for c in certs)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-10, max_value=90), st.floats(min_value=-10, max_value=90))
def test_gap_random_points(snr_db, inr_db):
    c = gap_certificate(ChannelParams.from_db(snr_db, inr_db))
    assert c.certified


# -- generalized degrees of freedom ------------------------------------------

@pytest.mark.parametrize("alpha, fb, nofb", [
    (0, 1, 1), (1 / 3, 5 / 6, 2 / 3), (0.5, 0.75, 0.5), (2 / 3, 2 / 3, 2 / 3),
    (1, 0.5, 0.5), (2, 1, 1), (2.5, 1.25, 1), (3, 1.5, 1),
])
def test_gdof_closed_forms(alpha, fb, nofb):
    assert gdof_feedback(alpha).d == pytest.approx(fb, abs=1e-12)
    assert gdof_nonfeedback(alpha).d == pytest.approx(nofb, abs=1e-12)


def test_gdof_rejects_negative():
    for fn in (gdof_feedback, gdof_nonfeedback):
        with pytest.raises(DomainError):
            fn(-0.1)


def test_gdof_unbounded_gain_region():
    for k in range(1, 501):
        a = k / 100
        diff = gdof_feedback(a).d - gdof_nonfeedback(a).d
        if 2 / 3 <= a <= 2:
            assert abs(diff) <= 1e-12
        else:
            assert diff > 1e-12
    # both curves start at the point-to-point value
    assert gdof_feedback(0).d == gdof_nonfeedback(0).d == 1


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 1.5, 3.0])
def test_numeric_gdof_outer(alpha):
    assert numeric_gdof(lambda p: outer_bound(p).value, alpha, 1e12) == pytest.approx(
        gdof_feedback(alpha).d, abs=0.05)


@pytest.mark.parametrize("alpha", [1.0, 3.0])
def test_numeric_gdof_converges(alpha):
    target = gdof_feedback(alpha).d
    for fn in (lambda p: achievable(p).rate, lambda p: outer_bound(p).value):
        errs = [abs(numeric_gdof(fn, alpha, 10.0 ** k) - target) for k in range(6, 13)]
        assert errs[-1] <= 0.05
        assert errs[-1] <= errs[0]


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.5, 3.0])
def test_log_slope_matches_gdof(alpha):
    for fn in (lambda p: achievable(p).rate, lambda p: outer_bound(p).value):
        assert log_slope(fn, alpha, 1e12) == pytest.approx(gdof_feedback(alpha).d, abs=0.05)
