"""Acceptance criteria, runnable from pytest and from ``fbic accept``.

Each check returns ``(passed, detail)``; :func:`run` adds timing and fails a
criterion that overruns its time budget.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .alamouti import McConfig, cross_term_leakage, ComplexGains
from .deterministic import (det_capacity, message_length, run_two_stage_protocol,
                            verify_entropy_identities)
from .egc import egc_capacity_search, ldm_to_egc
from .gaussian import (STRONG_GAP_BITS, WEAK_GAP_BITS, GAP_SLACK, achievable,
                       achievable_weak, gap_sweep, gdof_feedback, gdof_nonfeedback,
                       log_slope, outer_bound)
from .kramer import kramer_gdof, kramer_rate, kramer_root
from .model import ChannelParams, DetParams, Regime

DB_GRID = list(range(-10, 71, 5))


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def as_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.number}. {self.name} "
                f"({self.seconds:.2f}s / {self.budget:g}s): {self.detail}")


# 1 ---------------------------------------------------------------------------

def check_gap_bounds(weak_bound: float | None = None,
                      strong_bound: float | None = None) -> tuple[bool, str]:
    # module-level lookup so a test can patch the constants
    weak_bound = WEAK_GAP_BITS if weak_bound is None else weak_bound
    strong_bound = STRONG_GAP_BITS if strong_bound is None else strong_bound
    certs = gap_sweep(DB_GRID, DB_GRID, weak_bound=weak_bound, strong_bound=strong_bound)
    weak = [c.gap for c in certs if c.regime is Regime.WEAK]
    strong = [c.gap for c in certs if c.regime is Regime.STRONG]
    ok = (min(c.gap for c in certs) >= 0.0
          and max(weak) <= weak_bound + GAP_SLACK
          and max(strong) <= strong_bound + GAP_SLACK)
    return ok, (f"{len(certs)} points; min gap {min(c.gap for c in certs):.3e}, "
                f"max weak {max(weak):.6f} (<= {weak_bound}), "
                f"max strong {max(strong):.6f} (<= {strong_bound})")


# 2 ---------------------------------------------------------------------------

def check_protocol(levels: int = 8, pairs: int = 100, seed: int = 1) -> tuple[bool, str]:
    rng = random.Random(seed)
    failures = []
    for n in range(levels + 1):
        for m in range(levels + 1):
            p = DetParams(n, m)
            expected = Fraction(max(n, m) + max(n - m, 0), 2)
            L = message_length(p)
            for _ in range(pairs):
                w1 = [rng.getrandbits(1) for _ in range(L)]
                w2 = [rng.getrandbits(1) for _ in range(L)]
                res = run_two_stage_protocol(p, w1, w2)
                if not (res.success and isinstance(res.rate, Fraction) and res.rate == expected
                        and det_capacity(p) == expected):
                    failures.append((n, m))
                    break
    n_pairs = (levels + 1) ** 2
    return not failures, (f"{n_pairs} (n, m) pairs x {pairs} messages; "
                          f"failures: {failures[:5] or 'none'}")


# 3 ---------------------------------------------------------------------------

def check_entropy_identities(levels: int = 2, blocks: int = 2) -> tuple[bool, str]:
    bad = []
    checked = 0
    for n in range(levels + 1):
        for m in range(levels + 1):
            for N in range(1, blocks + 1):
                rep = verify_entropy_identities(DetParams(n, m), N)
                checked += 1
                exact = isinstance(rep.h_v1_given_w2, Fraction)
                if not (exact and rep.identity_holds and rep.reconstruction_holds):
                    bad.append((n, m, N))
    return not bad, f"{checked} (n, m, N) cases, exact equality; failures: {bad or 'none'}"


# 4 ---------------------------------------------------------------------------

# closed-form values at the table's alphas, written out by hand
GDOF_TABLE = {
    # alpha: (feedback, no feedback, Kramer)
    Fraction(0): (Fraction(1), Fraction(1), Fraction(1)),
    Fraction(1, 3): (Fraction(5, 6), Fraction(2, 3), Fraction(2, 3)),
    Fraction(1, 2): (Fraction(3, 4), Fraction(1, 2), Fraction(5, 8)),
    Fraction(2, 3): (Fraction(2, 3), Fraction(2, 3), Fraction(7, 12)),
    Fraction(1): (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
    Fraction(2): (Fraction(1), Fraction(1), Fraction(3, 4)),
    Fraction(3): (Fraction(3, 2), Fraction(1), Fraction(1)),
}


def check_gdof(snr: float = 1e12, tol: float = 0.05) -> tuple[bool, str]:
    problems = []
    for alpha, expected in GDOF_TABLE.items():
        got = (gdof_feedback(float(alpha)).d, gdof_nonfeedback(float(alpha)).d,
               kramer_gdof(float(alpha)).d)
        if any(abs(g - float(e)) > 1e-12 for g, e in zip(got, expected)):
            problems.append(f"table alpha={alpha}: {got}")
    for k in range(0, 301):
        a = k / 100
        diff = gdof_feedback(a).d - gdof_nonfeedback(a).d
        on_plateau = 2 / 3 <= a <= 2
        if (on_plateau and abs(diff) > 1e-12) or (not on_plateau and a > 0 and diff <= 1e-12):
            problems.append(f"crossing alpha={a}: diff {diff}")
    slopes = []
    for a in (0.25, 0.5, 1.5, 3.0):
        target = gdof_feedback(a).d
        for name, fn in (("achievable", lambda p: achievable(p).rate),
                         ("outer", lambda p: outer_bound(p).value)):
            s = log_slope(fn, a, snr)
            slopes.append(abs(s - target))
            if abs(s - target) > tol:
                problems.append(f"log-slope {name} alpha={a}: {s:.4f} vs {target}")
    return not problems, (f"table of {len(GDOF_TABLE)} alphas exact, crossing on [2/3, 2], "
                          f"max log-slope error {max(slopes):.2e}; "
                          f"problems: {problems[:4] or 'none'}")


# 5 ---------------------------------------------------------------------------

def check_kramer() -> tuple[bool, str]:
    problems = []
    worst = 0.0
    for snr_db in (10, 20, 30, 40, 50):
        for alpha in (0.2, 0.6, 1.0, 2.0):
            s = 10.0 ** (snr_db / 10)
            root = kramer_root(ChannelParams(s, s ** alpha))
            ratio = root.residual / root.scale
            worst = max(worst, ratio)
            if ratio > 1e-6:
                problems.append(f"residual at ({snr_db} dB, {alpha}): {ratio:.2e}")
    snr = 1e10
    a = 0.2
    rho = kramer_root(ChannelParams(snr, snr ** a)).rho
    asym = 2.0 * snr ** ((3 * a - 1) / 2)
    if abs(rho / asym - 1.0) > 0.10:
        problems.append(f"small-alpha asymptote ratio {rho / asym:.3f}")
    a = 2.0
    lo, hi = snr / 10.0, snr
    e_lo = kramer_root(ChannelParams(lo, lo ** a)).one_minus_rho_sq
    e_hi = kramer_root(ChannelParams(hi, hi ** a)).one_minus_rho_sq
    slope = math.log10(e_hi / e_lo)
    if abs(slope + (a + 1) / 4) > 0.05:
        problems.append(f"1 - rho^2 log-slope {slope:.4f}")
    s = 1e3
    p = ChannelParams(s, s - math.sqrt(2 * s))
    dist = abs(outer_bound(p).value - kramer_rate(p).rate)
    if dist > 0.2:
        problems.append(f"marker distance {dist:.3f}")
    return not problems, (f"max residual/scale {worst:.1e}; rho*/asymptote {rho / asym:.4f}; "
                          f"1-rho^2 slope {slope:.4f}; marker |outer - kramer| {dist:.2e}; "
                          f"problems: {problems or 'none'}")


# 6 ---------------------------------------------------------------------------

def check_monte_carlo(samples: int = 100_000, seed: int = 20_240_101) -> tuple[bool, str]:
    from .cli import mc_report, mc_text

    problems = []
    strong = mc_report(ChannelParams(1.0, 4.0), samples, seed)
    e = strong["estimates"]["effective_snr"]
    if e["rel_error"] > 0.01:
        problems.append(f"strong effective SNR {e['empirical']:.4f} vs {e['target']}")
    if abs(strong["rate"] - strong["rate_closed_form"]) > 0.03:
        problems.append("strong rate reconstruction")
    weak = mc_report(ChannelParams(100.0, 10.0), samples, seed)
    for name, w in weak["estimates"].items():
        if w["rel_error"] > 0.02:
            problems.append(f"{name} {w['empirical']:.4f} vs {w['target']:.4f}")
    if abs(weak["rate"] - weak["rate_closed_form"]) > 0.03:
        problems.append("weak rate reconstruction")
    text_a = mc_text(mc_report(ChannelParams(100.0, 10.0), samples, seed)).encode()
    text_b = mc_text(weak).encode()
    if text_a != text_b:
        problems.append("fixed seed output differs")
    return not problems, (f"strong rel err {e['rel_error']:.4f}; weak rel errs "
                          + ", ".join(f"{w['rel_error']:.4f}" for w in weak["estimates"].values())
                          + f"; rate errs {abs(strong['rate'] - strong['rate_closed_form']):.4f}, "
                          f"{abs(weak['rate'] - weak['rate_closed_form']):.4f}; "
                          f"problems: {problems or 'none'}")


# 7 ---------------------------------------------------------------------------

EGC_CASES = {(1, 0): 0.05, (1, 1): 0.05, (2, 1): 0.05, (1, 2): 0.1}


def check_egc(restarts: int = 20, seed: int = 0) -> tuple[bool, str]:
    assert restarts <= 200
    parts = []
    ok = True
    for (n, m), tol in EGC_CASES.items():
        p = DetParams(n, m)
        cap = float(det_capacity(p))
        res = egc_capacity_search(ldm_to_egc(p), restarts=restarts, seed=seed)
        good = cap - tol <= res.value <= cap + 1e-9
        ok &= good
        parts.append(f"({n},{m}) {res.value:.5f}/{cap:g}{'' if good else ' FAIL'}")
    return ok, f"{restarts} restarts per |U|: " + ", ".join(parts)


# 8 ---------------------------------------------------------------------------

def check_properties() -> tuple[bool, str]:
    from .cli import GDOF_HEADER, gdof_rows, write_csv
    import io

    problems = []
    for inr_db in (-10, 0, 10, 30, 60):
        inr = 10.0 ** (inr_db / 10)
        values = [outer_bound(ChannelParams(10.0 ** (s / 10), inr)).value
                  for s in np.arange(-10, 70.5, 2.5)]
        if any(b < a - 1e-9 for a, b in zip(values, values[1:])):
            problems.append(f"outer not monotone at INR {inr_db} dB")
    for snr in (2.0, 10.0, 1e3, 1e6):
        at_one = achievable_weak(ChannelParams(snr, 1.0)).rate
        near = [achievable_weak(ChannelParams(snr, 1.0 + d)).rate for d in (-1e-12, 1e-12)]
        if max(abs(x - at_one) for x in near) > 1e-9:
            problems.append(f"discontinuity at INR = 1, SNR {snr}")
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        g = ComplexGains(complex(*rng.normal(size=2)) * 10, complex(*rng.normal(size=2)) * 10)
        x2 = rng.normal(size=1000) + 1j * rng.normal(size=1000)
        worst = max(worst, cross_term_leakage(g, x2))
    if worst > 4 * np.finfo(float).eps:
        problems.append(f"Alamouti leakage {worst:.2e}")
    alphas = [k / 100 for k in range(301)]
    a = write_csv(GDOF_HEADER, gdof_rows(alphas), None, stdout=io.StringIO())
    b = write_csv(GDOF_HEADER, gdof_rows(alphas), None, stdout=io.StringIO())
    if a != b:
        problems.append("CSV output not deterministic")
    return not problems, f"leakage {worst:.1e}; problems: {problems or 'none'}"


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, str]], float]] = {
    1: ("gap bounds on the dB grid", check_gap_bounds, 5.0),
    2: ("two-stage protocol matches deterministic capacity", check_protocol, 5.0),
    3: ("entropy identities by exact enumeration", check_entropy_identities, 10.0),
    4: ("generalized degrees of freedom", check_gdof, 10.0),
    5: ("Kramer baseline", check_kramer, 5.0),
    6: ("Monte-Carlo SINRs", check_monte_carlo, 30.0),
    7: ("El Gamal-Costa search vs deterministic capacity", check_egc, 180.0),
    8: ("property suites", check_properties, 5.0),
}


def run(number: int, check: Callable[[], tuple[bool, str]] | None = None) -> CriterionResult:
    name, default, budget = CRITERIA[number]
    start = time.perf_counter()
    passed, detail = (check or default)()
    seconds = time.perf_counter() - start
    if seconds > budget:
        passed = False
        detail += "; over time budget"
    return CriterionResult(number, name, bool(passed), detail, seconds, budget)


def run_all(only: list[int] | None = None) -> list[CriterionResult]:
    return [run(k) for k in sorted(CRITERIA) if only is None or k in only]


def format_table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return "\n".join(lines)
