"""Symmetric feedback capacity of El Gamal-Costa deterministic interference
channels, evaluated numerically.

A channel is given by tables ``v1 = g1[x1]``, ``v2 = g2[x2]``,
``y1 = f1[x1][v2]`` and ``y2 = f2[x2][v1]``, with ``f1[x1][.]`` injective for
every ``x1`` (and likewise ``f2``). The capacity is the maximum, over
``p(u) p(x1|u) p(x2|u)``, of the minimum of four entropy expressions.

The maximization is nonconcave. :func:`egc_capacity_search` returns the best
value found by random restarts plus local ascent, which is a lower estimate of
the capacity and is labelled as such.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import DetParams, DomainError

MAX_LDM_LEVELS = 3
MAX_SEARCH_CELLS = 4096
ROW_TOL = 1e-12


class ChannelSpecError(ValueError):
    """Malformed channel tables or a violated injectivity condition."""


@dataclass(frozen=True)
class DetChannelSpec:
    g1: tuple[int, ...]
    g2: tuple[int, ...]
    f1: tuple[tuple[int, ...], ...]
    f2: tuple[tuple[int, ...], ...]
    n_v1: int
    n_v2: int
    n_y1: int
    n_y2: int

    def __post_init__(self):
        self.validate()

    @property
    def n_x1(self) -> int:
        return len(self.g1)

    @property
    def n_x2(self) -> int:
        return len(self.g2)

    @property
    def cardinality_bound(self) -> int:
        return min(self.n_v1 * self.n_v2, self.n_y1, self.n_y2)

    def validate(self) -> None:
        for name, table, size in (("g1", self.g1, self.n_v1), ("g2", self.g2, self.n_v2)):
            if not table:
                raise ChannelSpecError(f"{name} is empty")
            for x, v in enumerate(table):
                if not 0 <= v < size:
                    raise ChannelSpecError(f"{name}[{x}] = {v} outside [0, {size})")
        for name, table, n_x, n_v, n_y in (
                ("f1", self.f1, self.n_x1, self.n_v2, self.n_y1),
                ("f2", self.f2, self.n_x2, self.n_v1, self.n_y2)):
            if len(table) != n_x or any(len(row) != n_v for row in table):
                raise ChannelSpecError(f"{name} must be a {n_x} x {n_v} table")
            for x, row in enumerate(table):
                seen: dict[int, int] = {}
                for v, y in enumerate(row):
                    if not 0 <= y < n_y:
                        raise ChannelSpecError(f"{name}[{x}][{v}] = {y} outside [0, {n_y})")
                    if y in seen:
                        raise ChannelSpecError(
                            f"{name} not injective in the interference argument: "
                            f"{name}[{x}][{seen[y]}] = {name}[{x}][{v}] = {y}")
                    seen[y] = v


def ldm_to_egc(p: DetParams) -> DetChannelSpec:
    """The linear deterministic channel (n, m) written as El Gamal-Costa tables."""
    if max(p.n, p.m) > MAX_LDM_LEVELS:
        raise DomainError(f"ldm_to_egc supports n, m <= {MAX_LDM_LEVELS}, got {p}")
    q = p.q
    xs = range(1 << q)
    g = tuple(x >> (q - p.m) for x in xs)
    f = tuple(tuple((x >> (q - p.n)) ^ v for v in range(1 << p.m)) for x in xs)
    return DetChannelSpec(g1=g, g2=g, f1=f, f2=f, n_v1=1 << p.m, n_v2=1 << p.m,
                          n_y1=1 << q, n_y2=1 << q)


# -- text format -------------------------------------------------------------
#
#   sizes X1 X2 V1 V2 Y1 Y2
#   g1 x1 v1
#   g2 x2 v2
#   f1 x1 v2 y1
#   f2 x2 v1 y2
#
# '#' starts a comment. Every table cell must appear exactly once.

def dumps_spec(spec: DetChannelSpec) -> str:
    out = io.StringIO()
    out.write(f"sizes {spec.n_x1} {spec.n_x2} {spec.n_v1} {spec.n_v2} "
              f"{spec.n_y1} {spec.n_y2}\n")
    for x, v in enumerate(spec.g1):
        out.write(f"g1 {x} {v}\n")
    for x, v in enumerate(spec.g2):
        out.write(f"g2 {x} {v}\n")
    for x, row in enumerate(spec.f1):
        for v, y in enumerate(row):
            out.write(f"f1 {x} {v} {y}\n")
    for x, row in enumerate(spec.f2):
        for v, y in enumerate(row):
            out.write(f"f2 {x} {v} {y}\n")
    return out.getvalue()


def loads_spec(text: str) -> DetChannelSpec:
    sizes = None
    cells: dict[str, dict[tuple[int, ...], int]] = {k: {} for k in ("g1", "g2", "f1", "f2")}
    arity = {"g1": 2, "g2": 2, "f1": 3, "f2": 3}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        key, *fields = line
        try:
            nums = [int(f) for f in fields]
        except ValueError:
            raise ChannelSpecError(f"line {lineno}: non-integer field in {raw!r}") from None
        if key == "sizes":
            if sizes is not None or len(nums) != 6 or min(nums) < 1:
                raise ChannelSpecError(f"line {lineno}: expected one 'sizes' line with 6 positive integers")
            sizes = nums
        elif key in cells:
            if len(nums) != arity[key]:
                raise ChannelSpecError(f"line {lineno}: '{key}' takes {arity[key]} integers")
            index = tuple(nums[:-1])
            if index in cells[key]:
                raise ChannelSpecError(f"line {lineno}: duplicate entry {key}{list(index)}")
            cells[key][index] = nums[-1]
        else:
            raise ChannelSpecError(f"line {lineno}: unknown record {key!r}")
    if sizes is None:
        raise ChannelSpecError("missing 'sizes' header")
    nx1, nx2, nv1, nv2, ny1, ny2 = sizes

    def table1(key, n):
        try:
            return tuple(cells[key][(x,)] for x in range(n))
        except KeyError as exc:
            raise ChannelSpecError(f"missing entry {key}{list(exc.args[0])}") from None

    def table2(key, n, k):
        try:
            return tuple(tuple(cells[key][(x, v)] for v in range(k)) for x in range(n))
        except KeyError as exc:
            raise ChannelSpecError(f"missing entry {key}{list(exc.args[0])}") from None

    return DetChannelSpec(
        g1=table1("g1", nx1), g2=table1("g2", nx2),
        f1=table2("f1", nx1, nv2), f2=table2("f2", nx2, nv1),
        n_v1=nv1, n_v2=nv2, n_y1=ny1, n_y2=ny2)


# -- distributions -----------------------------------------------------------

@dataclass(frozen=True)
class CondDistU:
    """p(u) p(x1|u) p(x2|u) as a probability vector and two row-stochastic tables."""

    p_u: np.ndarray
    p_x1_given_u: np.ndarray
    p_x2_given_u: np.ndarray

    def __post_init__(self):
        for name in ("p_u", "p_x1_given_u", "p_x2_given_u"):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=float))
        if self.p_u.ndim != 1:
            raise ValueError("p_u must be a vector")
        for name, arr in (("p_u", self.p_u[None, :]), ("p_x1_given_u", self.p_x1_given_u),
                          ("p_x2_given_u", self.p_x2_given_u)):
            if arr.ndim != 2 or arr.shape[0] != (1 if name == "p_u" else self.n_u):
                raise ValueError(f"{name} has shape {arr.shape}, expected one row per u")
            if np.any(arr < 0):
                row = int(np.argwhere(arr < 0)[0][0])
                raise ValueError(f"{name} row {row} has a negative entry")
            sums = arr.sum(axis=1)
            bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOL)
            if bad.size:
                raise ValueError(f"{name} row {int(bad[0])} sums to {sums[bad[0]]!r}, not 1")

    @property
    def n_u(self) -> int:
        return len(self.p_u)

    @classmethod
    def independent(cls, p_x1: Sequence[float], p_x2: Sequence[float]) -> "CondDistU":
        return cls([1.0], [list(p_x1)], [list(p_x2)])

    def joint(self) -> np.ndarray:
        return self.p_u[:, None, None] * self.p_x1_given_u[:, :, None] * self.p_x2_given_u[:, None, :]

    def permuted(self, perm: Sequence[int]) -> "CondDistU":
        perm = list(perm)
        return CondDistU(self.p_u[perm], self.p_x1_given_u[perm], self.p_x2_given_u[perm])


# -- objective ---------------------------------------------------------------

VARIABLES = ("U", "X1", "X2", "V1", "V2", "Y1", "Y2")


class _Evaluator:
    """Entropies of (U, X1, X2, V1, V2, Y1, Y2) marginals for a batch of
    joint distributions on the grid U x X1 x X2."""

    def __init__(self, spec: DetChannelSpec, n_u: int):
        self.spec = spec
        self.n_u = n_u
        u, x1, x2 = np.meshgrid(np.arange(n_u), np.arange(spec.n_x1), np.arange(spec.n_x2),
                                indexing="ij")
        g1 = np.array(spec.g1)
        g2 = np.array(spec.g2)
        f1 = np.array(spec.f1)
        f2 = np.array(spec.f2)
        v1 = g1[x1]
        v2 = g2[x2]
        self.labels = {
            "U": (u.ravel(), n_u), "X1": (x1.ravel(), spec.n_x1), "X2": (x2.ravel(), spec.n_x2),
            "V1": (v1.ravel(), spec.n_v1), "V2": (v2.ravel(), spec.n_v2),
            "Y1": (f1[x1, v2].ravel(), spec.n_y1), "Y2": (f2[x2, v1].ravel(), spec.n_y2),
        }
        self._keys: dict[tuple[str, ...], tuple[np.ndarray, int]] = {}

    def _key(self, names: tuple[str, ...]):
        if names not in self._keys:
            key = np.zeros(self.n_u * self.spec.n_x1 * self.spec.n_x2, dtype=np.int64)
            size = 1
            for name in names:
                lab, card = self.labels[name]
                key = key * card + lab
                size *= card
            # compress to the labels that actually occur
            uniq, inv = np.unique(key, return_inverse=True)
            self._keys[names] = (inv.astype(np.int64), len(uniq))
        return self._keys[names]

    def entropy(self, joint: np.ndarray, *names: str) -> np.ndarray:
        """Entropy in bits of the named variables, one value per batch row."""
        batch = joint.shape[0]
        if not names:
            return np.zeros(batch)
        key, size = self._key(tuple(names))
        flat = joint.reshape(batch, -1)
        idx = (np.arange(batch)[:, None] * size + key[None, :]).ravel()
        marg = np.bincount(idx, weights=flat.ravel(), minlength=batch * size).reshape(batch, size)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(marg > 0, -marg * np.log2(np.where(marg > 0, marg, 1.0)), 0.0)
        return terms.sum(axis=1)

    def cond(self, joint, target: Iterable[str], given: Iterable[str]) -> np.ndarray:
        target, given = tuple(target), tuple(given)
        return self.entropy(joint, *given, *target) - self.entropy(joint, *given)

    def terms(self, joint: np.ndarray) -> np.ndarray:
        """The four bounds, shape (batch, 4)."""
        h_y1 = self.entropy(joint, "Y1")
        i_u_y1 = h_y1 - self.cond(joint, ["Y1"], ["U"])
        h_y1_v1v2u = self.cond(joint, ["Y1"], ["U", "V1", "V2"])
        t1 = i_u_y1 + self.cond(joint, ["Y1"], ["U", "V2"])
        t2 = self.cond(joint, ["Y2"], ["U", "X2"]) + h_y1_v1v2u
        t3 = 0.5 * (self.entropy(joint, "Y2") + h_y1_v1v2u)
        t4 = i_u_y1 + self.cond(joint, ["Y1"], ["U", "V1"])
        return np.stack([t1, t2, t3, t4], axis=1)


@dataclass(frozen=True)
class EgcObjective:
    t1: float
    t2: float
    t3: float
    t4: float

    @property
    def terms(self) -> tuple[float, float, float, float]:
        return (self.t1, self.t2, self.t3, self.t4)

    @property
    def min(self) -> float:
        return min(self.terms)


def _check_dist(spec: DetChannelSpec, dist: CondDistU) -> None:
    if dist.p_x1_given_u.shape[1] != spec.n_x1 or dist.p_x2_given_u.shape[1] != spec.n_x2:
        raise ValueError(
            f"distribution is over {dist.p_x1_given_u.shape[1]} x {dist.p_x2_given_u.shape[1]} "
            f"inputs, channel has {spec.n_x1} x {spec.n_x2}")
    if dist.n_u > spec.cardinality_bound:
        raise ValueError(f"|U| = {dist.n_u} exceeds the cardinality bound {spec.cardinality_bound}")


def egc_objective(spec: DetChannelSpec, dist: CondDistU) -> EgcObjective:
    """The four entropy bounds at ``dist`` (bits).

    t1 = I(U;Y1) + H(Y1|V2,U)          t2 = H(Y2|X2,U) + H(Y1|V1,V2,U)
    t3 = (H(Y2) + H(Y1|V1,V2,U)) / 2   t4 = I(U;Y1) + H(Y1|V1,U)
    """
    _check_dist(spec, dist)
    terms = _Evaluator(spec, dist.n_u).terms(dist.joint()[None])[0]
    return EgcObjective(*(float(t) for t in terms))


def joint_entropy(spec: DetChannelSpec, dist: CondDistU, *names: str) -> float:
    """H of any subset of U, X1, X2, V1, V2, Y1, Y2 under ``dist``."""
    _check_dist(spec, dist)
    for name in names:
        if name not in VARIABLES:
            raise ValueError(f"unknown variable {name!r}; choose from {VARIABLES}")
    return float(_Evaluator(spec, dist.n_u).entropy(dist.joint()[None], *names)[0])


# -- search ------------------------------------------------------------------

def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row (last axis) onto the probability simplex."""
    k = v.shape[-1]
    u = -np.sort(-v, axis=-1)
    css = np.cumsum(u, axis=-1) - 1.0
    ind = np.arange(1, k + 1)
    cond = u - css / ind > 0
    rho = k - 1 - np.argmax(cond[..., ::-1], axis=-1)
    theta = np.take_along_axis(css, rho[..., None], axis=-1) / (rho[..., None] + 1)
    return np.maximum(v - theta, 0.0)


@dataclass(frozen=True)
class SearchResult:
    """Best max-min value found. This is a lower estimate of the capacity."""

    value: float
    best: CondDistU
    terms: EgcObjective
    n_u: int
    restarts: int
    evaluations: int
    kind: str = "lower estimate"


class _Problem:
    def __init__(self, spec: DetChannelSpec, n_u: int):
        self.ev = _Evaluator(spec, n_u)
        self.n_u, self.nx1, self.nx2 = n_u, spec.n_x1, spec.n_x2

    def split(self, theta: np.ndarray):
        b = theta.shape[0]
        nu, a1 = self.n_u, self.n_u * self.nx1
        pu = theta[:, :nu]
        p1 = theta[:, nu:nu + a1].reshape(b, nu, self.nx1)
        p2 = theta[:, nu + a1:].reshape(b, nu, self.nx2)
        return pu, p1, p2

    def project(self, theta: np.ndarray) -> np.ndarray:
        pu, p1, p2 = self.split(theta)
        b = theta.shape[0]
        return np.concatenate([project_to_simplex(pu), project_to_simplex(p1).reshape(b, -1),
                               project_to_simplex(p2).reshape(b, -1)], axis=1)

    def random(self, rng: np.random.Generator) -> np.ndarray:
        parts = [rng.dirichlet(np.ones(self.n_u))]
        parts += [rng.dirichlet(np.full(self.nx1, 0.5)) for _ in range(self.n_u)]
        parts += [rng.dirichlet(np.full(self.nx2, 0.5)) for _ in range(self.n_u)]
        return np.concatenate(parts)[None, :]

    def values(self, theta: np.ndarray) -> np.ndarray:
        pu, p1, p2 = self.split(theta)
        joint = pu[:, :, None, None] * p1[:, :, :, None] * p2[:, :, None, :]
        return self.ev.terms(joint).min(axis=1)

    def dist(self, theta: np.ndarray) -> CondDistU:
        pu, p1, p2 = self.split(theta)
        # renormalize away projection round-off
        return CondDistU(pu[0] / pu[0].sum(), p1[0] / p1[0].sum(axis=1, keepdims=True),
                         p2[0] / p2[0].sum(axis=1, keepdims=True))


def _local_ascent(problem: _Problem, theta: np.ndarray, rng: np.random.Generator,
                  iterations: int, tolerance: float, batch: int) -> tuple[np.ndarray, float, int]:
    """Derivative-free ascent: best of ``batch`` Gaussian perturbations per step,
    projected back onto the simplices; the step grows on success and halves
    otherwise."""
    f = float(problem.values(theta)[0])
    sigma = 0.25
    evals = 1
    for _ in range(iterations):
        cand = problem.project(theta + sigma * rng.standard_normal((batch, theta.shape[1])))
        vals = problem.values(cand)
        evals += batch
        j = int(np.argmax(vals))
        if vals[j] > f + 1e-13:
            theta, f = cand[j:j + 1], float(vals[j])
            sigma = min(2.0 * sigma, 0.5)
        else:
            sigma *= 0.5
            if sigma < tolerance:
                break
    return theta, f, evals


def egc_capacity_search(spec: DetChannelSpec, restarts: int = 50, iterations: int = 400,
                        tolerance: float = 1e-6, seed: int = 0, batch: int = 24,
                        max_u: int | None = None) -> SearchResult:
    """Lower estimate of the symmetric feedback capacity by random restarts.

    For every |U| from 1 to the cardinality bound, ``restarts`` Dirichlet
    starting points are each improved by :func:`_local_ascent`. Restart ``r``
    for a given |U| always uses the stream ``(seed, |U|, r)``, so raising
    ``restarts`` can only keep or improve the result.
    """
    bound = spec.cardinality_bound if max_u is None else min(max_u, spec.cardinality_bound)
    cells = bound * spec.n_x1 * spec.n_x2
    if cells > MAX_SEARCH_CELLS:
        raise DomainError(
            f"search grid |U|*|X1|*|X2| = {bound}*{spec.n_x1}*{spec.n_x2} = {cells} "
            f"exceeds {MAX_SEARCH_CELLS}")
    if restarts < 1:
        raise DomainError("restarts must be positive")
    best = None
    evaluations = 0
    for n_u in range(1, bound + 1):
        problem = _Problem(spec, n_u)
        for r in range(restarts):
            rng = np.random.default_rng([seed, n_u, r])
            theta, f, ev = _local_ascent(problem, problem.random(rng), rng,
                                         iterations, tolerance, batch)
            evaluations += ev
            if best is None or f > best[0]:
                best = (f, problem.dist(theta), n_u)
    value, dist, n_u = best
    terms = egc_objective(spec, dist)
    return SearchResult(value=terms.min, best=dist, terms=terms, n_u=n_u,
                        restarts=restarts, evaluations=evaluations)
