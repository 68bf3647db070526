import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbic.deterministic import (bits_to_int, det_capacity, encode_from_interference,
                                int_to_bits, ldm_transfer, message_length,
                                run_two_stage_protocol, verify_entropy_identities)
from fbic.model import DetParams, DomainError


def xor(a, b):
    return tuple(x ^ y for x, y in zip(a, b))


# -- transfer ----------------------------------------------------------------

@pytest.mark.parametrize("a1, a2, b1, b2", list(product((0, 1), repeat=4)))
def test_transfer_weak_example(a1, a2, b1, b2):
    y1, y2 = ldm_transfer([a1, a2], [b1, b2], DetParams(2, 1))
    assert y1 == (a1, a2 ^ b1)
    assert y2 == (b1, b2 ^ a1)


def test_transfer_self_cancellation():
    assert ldm_transfer([1], [1], DetParams(1, 1))[0] == (0,)


def test_transfer_zero_interferer():
    assert ldm_transfer([1, 0], [0, 0], DetParams(2, 2))[0] == (1, 0)


def test_transfer_strong_alignment():
    # n=2, m=3: own word arrives shifted down one level, interference at full strength
    y1, _ = ldm_transfer([1, 0, 1], [0, 1, 1], DetParams(2, 3))
    assert y1 == (0, 1 ^ 1, 0 ^ 1)


def test_transfer_length_mismatch():
    with pytest.raises(ValueError):
        ldm_transfer([1, 0], [1], DetParams(2, 1))


def test_bits_round_trip():
    assert bits_to_int(int_to_bits(0b1011, 4)) == 0b1011
    with pytest.raises(ValueError):
        bits_to_int([0, 2])


@st.composite
def transfer_inputs(draw):
    n = draw(st.integers(0, 8))
    m = draw(st.integers(0, 8))
    q = max(n, m)
    vec = st.lists(st.integers(0, 1), min_size=q, max_size=q)
    return DetParams(n, m), [draw(vec) for _ in range(4)]


@given(transfer_inputs())
def test_transfer_linearity(case):
    p, (x1, x2, x1b, x2b) = case
    left = ldm_transfer(xor(x1, x1b), xor(x2, x2b), p)
    a = ldm_transfer(x1, x2, p)
    b = ldm_transfer(x1b, x2b, p)
    assert left[0] == xor(a[0], b[0])
    assert left[1] == xor(a[1], b[1])


# -- capacity ----------------------------------------------------------------

@pytest.mark.parametrize("n, m, cap", [(2, 3, Fraction(3, 2)), (3, 0, Fraction(3)),
                                       (4, 4, Fraction(2)), (0, 0, Fraction(0))])
def test_det_capacity_examples(n, m, cap):
    got = det_capacity(DetParams(n, m))
    assert isinstance(got, Fraction)
    assert got == cap


def test_feedback_exceeds_n_when_m_large():
    for n in range(0, 8):
        for m in range(2 * n + 1, 20):
            assert det_capacity(DetParams(n, m)) > n


# -- protocol ----------------------------------------------------------------

@pytest.mark.parametrize("n, m, rate", [(2, 3, Fraction(3, 2)), (2, 1, Fraction(3, 2)),
                                        (1, 0, Fraction(1))])
def test_protocol_examples(n, m, rate):
    p = DetParams(n, m)
    L = message_length(p)
    for w1, w2 in product(product((0, 1), repeat=L), repeat=2):
        res = run_two_stage_protocol(p, w1, w2)
        assert res.decoded1 == w1 and res.decoded2 == w2
        assert res.rate == rate


@pytest.mark.parametrize("n, m", [(n, m) for n in range(9) for m in range(9)])
def test_protocol_decodes_and_meets_capacity(n, m):
    p = DetParams(n, m)
    rng = random.Random(1000 * n + m)
    L = message_length(p)
    expected = Fraction(m, 2) if m >= n else n - Fraction(m, 2)
    assert det_capacity(p) == expected
    for _ in range(100):
        w1 = [rng.getrandbits(1) for _ in range(L)]
        w2 = [rng.getrandbits(1) for _ in range(L)]
        res = run_two_stage_protocol(p, w1, w2)
        assert res.success
        assert res.rate == expected


def test_protocol_trace_is_consistent():
    p = DetParams(3, 1)
    rng = random.Random(5)
    L = message_length(p)
    res = run_two_stage_protocol(p, [rng.getrandbits(1) for _ in range(L)],
                                 [rng.getrandbits(1) for _ in range(L)])
    assert [s.stage for s in res.trace] == [1, 2]
    for s in res.trace:
        assert s.v1 == s.x1[:p.m] and s.v2 == s.x2[:p.m]
        assert ldm_transfer(s.x1, s.x2, p) == (s.y1, s.y2)
    # slot 2 relays the other user's common word on top
    assert res.trace[1].x1[:p.m] == res.trace[0].x2[:p.m]


def test_protocol_strong_relay():
    p = DetParams(2, 3)
    res = run_two_stage_protocol(p, (1, 0, 1), (0, 1, 1))
    assert res.trace[0].x1 == (1, 0, 1)
    assert res.trace[1].x1 == (0, 1, 1)
    assert res.trace[1].x2 == (1, 0, 1)


def test_protocol_zero_channel():
    res = run_two_stage_protocol(DetParams(0, 0), (), ())
    assert res.success and res.rate == 0


def test_protocol_wrong_length():
    with pytest.raises(ValueError):
        run_two_stage_protocol(DetParams(2, 3), (1, 0), (1, 0, 1))


# -- entropy identities ------------------------------------------------------

@pytest.mark.parametrize("n, m, N", [(n, m, N) for n in range(3) for m in range(3)
                                     for N in (1, 2)])
def test_entropy_identities_exact(n, m, N):
    p = DetParams(n, m)
    rep = verify_entropy_identities(p, N)
    assert isinstance(rep.h_v1_given_w2, Fraction)
    assert isinstance(rep.h_y2_given_w2, Fraction)
    assert rep.identity_holds
    assert rep.reconstruction_holds
    # under this protocol both sides equal N * m bits
    assert rep.h_v1_given_w2 == N * m


def test_entropy_identities_examples():
    assert verify_entropy_identities(DetParams(1, 1), 2).h_v1_given_w2 == 2
    rep = verify_entropy_identities(DetParams(2, 1), 2)
    assert rep.identity_holds and rep.reconstruction_holds
    zero = verify_entropy_identities(DetParams(0, 0), 1)
    assert zero.h_v1_given_w2 == 0 and zero.h_y2_given_w2 == 0


def test_entropy_identities_three_blocks():
    rep = verify_entropy_identities(DetParams(1, 1), 3)
    assert rep.identity_holds and rep.reconstruction_holds


@pytest.mark.parametrize("n, m, N", [(3, 1, 1), (1, 3, 1), (1, 1, 4), (1, 1, 0)])
def test_entropy_identities_guard(n, m, N):
    with pytest.raises(DomainError):
        verify_entropy_identities(DetParams(n, m), N)


def test_reconstruction_from_interference():
    # X1 is a function of W1 and the past V2 sequence
    p = DetParams(3, 2)
    rng = random.Random(7)
    L = message_length(p)
    w1 = [rng.getrandbits(1) for _ in range(L)]
    w2 = [rng.getrandbits(1) for _ in range(L)]
    res = run_two_stage_protocol(p, w1, w2)
    v2_hist = [bits_to_int(res.trace[0].v2)]
    rebuilt = encode_from_interference(1, bits_to_int(w1), v2_hist, p)
    assert [int(x) for x in rebuilt] == [bits_to_int(s.x1) for s in res.trace]
