"""Command-line interface.

Exit codes: 0 success, 1 failed check or acceptance criterion, 2 usage or
domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from typing import Sequence

from . import acceptance
from .alamouti import McConfig, simulate_strong_combining, simulate_weak_combining
from .deterministic import (det_capacity, message_length, run_two_stage_protocol,
                            verify_entropy_identities)
from .egc import egc_capacity_search, ldm_to_egc, loads_spec
from .gaussian import (achievable, gap_certificate, gdof_feedback, gdof_nonfeedback,
                       outer_bound)
from .kramer import kramer_gdof, kramer_rate
from .model import ChannelParams, DetParams, DomainError, Regime, classify, linear_to_db

DB_RANGE = (-100.0, 140.0)
DEFAULT_SEED = 20_240_101


def fmt(x: float) -> str:
    return f"{x:.9g}"


def _db(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    lo, hi = DB_RANGE
    if not lo <= value <= hi:
        raise argparse.ArgumentTypeError(f"{value} dB outside [{lo:g}, {hi:g}] dB")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _axis(lo: float, hi: float, step: float) -> list[float]:
    if hi < lo:
        raise DomainError(f"empty range [{lo}, {hi}]")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(count)]


def write_csv(header: Sequence[str], rows: Sequence[Sequence[float]], path: str | None,
              stdout=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)
    return text


# -- data builders (shared with the acceptance suite) ------------------------

def gdof_rows(alphas: Sequence[float]) -> list[list[float]]:
    return [[a, gdof_feedback(a).d, gdof_nonfeedback(a).d, kramer_gdof(a).d] for a in alphas]


GDOF_HEADER = ("alpha", "d_feedback", "d_nofeedback", "d_kramer")
COMPARE_HEADER = ("inr_db", "achievable", "outer", "kramer_rate")


def marker_inr(snr: float) -> float:
    """INR = SNR - sqrt(2 SNR), where Kramer's scheme meets capacity."""
    return snr - math.sqrt(2.0 * snr)


def compare_rows(snr_db: float, inr_dbs: Sequence[float], marker: bool = True) -> list[list[float]]:
    snr = 10.0 ** (snr_db / 10.0)
    points = [(i, ChannelParams(snr, 10.0 ** (i / 10.0))) for i in inr_dbs]
    m = marker_inr(snr)
    if marker and m > 0:
        points.append((linear_to_db(m), ChannelParams(snr, m)))
        points.sort(key=lambda item: item[0])
    return [[i, achievable(p).rate, outer_bound(p).value, kramer_rate(p).rate]
            for i, p in points]


def mc_report(params: ChannelParams, samples: int, seed: int) -> dict:
    cfg = McConfig(params=params, samples=samples, seed=seed)
    out = {"snr": params.snr, "inr": params.inr, "samples": samples, "seed": seed}
    if classify(params) is Regime.STRONG:
        est = simulate_strong_combining(cfg)
        out.update(regime="strong", rng=est.rng, leakage=est.leakage, rate=est.rate,
                   rate_closed_form=achievable(params).rate)
        ests = {"effective_snr": est.effective_snr, "snr_tx_decode": est.snr_tx_decode}
    else:
        est = simulate_weak_combining(cfg)
        out.update(regime="weak", rng=est.rng, lambda_private=est.lambda_private,
                   rate=est.rate, rate_closed_form=achievable(params).rate)
        ests = {"sinr_common_rx": est.sinr_common_rx,
                "sinr_common_tx_decode": est.sinr_common_tx_decode,
                "sinr_private": est.sinr_private}
    out["estimates"] = {k: {"empirical": e.value, "target": e.target, "stderr": e.stderr,
                            "rel_error": e.rel_error} for k, e in ests.items()}
    return out


def mc_text(report: dict) -> str:
    lines = [f"regime {report['regime']}  snr {fmt(report['snr'])}  inr {fmt(report['inr'])}",
             f"samples {report['samples']}  seed {report['seed']}  rng {report['rng']}"]
    for name, e in report["estimates"].items():
        lines.append(f"{name:<24} empirical {fmt(e['empirical'])}  target {fmt(e['target'])}"
                     f"  rel_error {fmt(e['rel_error'])}  stderr {fmt(e['stderr'])}")
    lines.append(f"rate empirical {fmt(report['rate'])}  closed_form {fmt(report['rate_closed_form'])}")
    if "leakage" in report:
        lines.append(f"cross-term leakage {fmt(report['leakage'])}")
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------

def cmd_bounds(args) -> int:
    params = ChannelParams.from_db(args.snr_db, args.inr_db)
    cert = gap_certificate(params)
    out = {"snr_db": args.snr_db, "inr_db": args.inr_db, "regime": cert.regime.value,
           "achievable": cert.achievable, "outer": cert.outer, "gap": cert.gap,
           "rho": cert.rho, "gap_bound": cert.bound, "certified": cert.certified}
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        for key, value in out.items():
            print(f"{key:<11} {fmt(value) if isinstance(value, float) else value}")
    return 0 if cert.certified else 1


def cmd_gdof(args) -> int:
    alphas = [args.alpha] if args.alpha is not None else _axis(args.alpha_min, args.alpha_max, args.step)
    write_csv(GDOF_HEADER, gdof_rows(alphas), args.csv)
    return 0


def cmd_compare(args) -> int:
    rows = compare_rows(args.snr_db, _axis(args.inr_min_db, args.inr_max_db, args.step),
                        marker=not args.no_marker)
    write_csv(COMPARE_HEADER, rows, args.csv)
    return 0


def cmd_det(args) -> int:
    p = DetParams(args.n, args.m)
    cap = det_capacity(p)
    rng = random.Random(args.seed)
    length = message_length(p)
    ok = 0
    for _ in range(args.trials):
        w1 = [rng.getrandbits(1) for _ in range(length)]
        w2 = [rng.getrandbits(1) for _ in range(length)]
        res = run_two_stage_protocol(p, w1, w2)
        ok += res.success and res.rate == cap
    out = {"n": p.n, "m": p.m, "capacity": str(cap), "regime": classify(p).value,
           "message_bits": length, "trials": args.trials, "decoded": ok,
           "protocol": "OK" if ok == args.trials else "FAIL"}
    if args.verify:
        rep = verify_entropy_identities(p, args.blocks)
        out.update(blocks=rep.blocks, pairs=rep.pairs,
                   h_v1_given_w2=str(rep.h_v1_given_w2), h_y2_given_w2=str(rep.h_y2_given_w2),
                   identity=rep.identity_holds, reconstruction=rep.reconstruction_holds)
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        for key, value in out.items():
            print(f"{key:<14} {value}")
    passed = out["protocol"] == "OK" and out.get("reconstruction", True) and out.get("identity", True)
    return 0 if passed else 1


def cmd_mc(args) -> int:
    report = mc_report(ChannelParams.from_db(args.snr_db, args.inr_db), args.samples, args.seed)
    sys.stdout.write(json.dumps(report, indent=2) + "\n" if args.json else mc_text(report))
    return 0


def cmd_egc(args) -> int:
    if args.ldm:
        spec = ldm_to_egc(DetParams(*args.ldm))
    else:
        with open(args.spec_file) as fh:
            spec = loads_spec(fh.read())
    res = egc_capacity_search(spec, restarts=args.restarts, seed=args.seed)
    out = {"value": res.value, "kind": res.kind, "best_u": res.n_u, "restarts": res.restarts,
           "evaluations": res.evaluations, "terms": list(res.terms.terms),
           "p_u": res.best.p_u.round(6).tolist()}
    if args.ldm:
        out["ldm_capacity"] = float(det_capacity(DetParams(*args.ldm)))
    if args.json:
        out["p_x1_given_u"] = res.best.p_x1_given_u.tolist()
        out["p_x2_given_u"] = res.best.p_x2_given_u.tolist()
        print(json.dumps(out, indent=2))
    else:
        print(f"value          {fmt(res.value)}  ({res.kind})")
        print(f"best |U|       {res.n_u}")
        print(f"terms          {' '.join(fmt(t) for t in res.terms.terms)}")
        print(f"p(u)           {' '.join(fmt(x) for x in out['p_u'])}")
        if args.ldm:
            print(f"capacity       {fmt(out['ldm_capacity'])}")
    return 0


def cmd_accept(args) -> int:
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = acceptance.run_all(only)
    if args.json:
        print(json.dumps([r.as_dict() for r in results], indent=2))
    else:
        print(acceptance.format_table(results))
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbic", description=(
        "Bounds, protocols and sweeps for the two-user interference channel with feedback."))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="achievable rate, outer bound and gap at one point")
    p.add_argument("--snr-db", type=_db, required=True)
    p.add_argument("--inr-db", type=_db, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gdof", help="generalized degrees-of-freedom curves as CSV")
    p.add_argument("--alpha-min", type=_nonneg_float, default=0.0)
    p.add_argument("--alpha-max", type=_nonneg_float, default=3.0)
    p.add_argument("--step", type=_positive_float, default=0.01)
    p.add_argument("--alpha", type=_nonneg_float, help="single alpha instead of a range")
    p.add_argument("--csv", metavar="PATH", help="write here instead of stdout")
    p.set_defaults(func=cmd_gdof)

    p = sub.add_parser("compare", help="proposed scheme vs Kramer's scheme over an INR sweep")
    p.add_argument("--snr-db", type=_db, default=30.0)
    p.add_argument("--inr-min-db", type=_db, default=0.0)
    p.add_argument("--inr-max-db", type=_db, default=60.0)
    p.add_argument("--step", type=_positive_float, default=1.0)
    p.add_argument("--no-marker", action="store_true",
                   help="omit the INR = SNR - sqrt(2 SNR) row")
    p.add_argument("--csv", metavar="PATH")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("det", help="deterministic model: capacity, protocol run, identities")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--verify", action="store_true", help="exact entropy-identity check")
    p.add_argument("--blocks", type=_positive_int, default=2)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_det)

    p = sub.add_parser("mc", help="Monte-Carlo SINRs of the Gaussian scheme")
    p.add_argument("--snr-db", type=_db, required=True)
    p.add_argument("--inr-db", type=_db, required=True)
    p.add_argument("--samples", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("egc", help="max-min search for El Gamal-Costa channels")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec-file", metavar="PATH")
    src.add_argument("--ldm", nargs=2, type=int, metavar=("N", "M"))
    p.add_argument("--restarts", type=_positive_int, default=50)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_egc)

    p = sub.add_parser("accept", help="run the acceptance suite")
    p.add_argument("--json", action="store_true")
    p.add_argument("--only", metavar="LIST", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_accept)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError, OSError) as exc:
        print(f"fbic {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
