"""Network generators: homophyly model plus PA and ER baselines.

All generators are deterministic functions of their parameters; randomness
comes from a numpy PCG64 generator seeded with the supplied 64-bit seed. The
algorithm name is exported as :data:`RNG_ALGORITHM` so reports can record it.

Homophyly construction, per growth step i (1-based, counting nodes):
  * start from the complete graph on d+1 nodes, each a distinct-color seed;
  * with probability p_i = min(1, 1/(ln i)^a) the new node becomes a seed
    with a fresh color and d edges chosen globally, proportional to degree;
  * otherwise it copies a uniformly random existing color and attaches d
    edges within that color class, proportional to degree.

Degree weights are snapshotted at the start of a step: a node's own edges
created during the step do not influence the remaining draws of that step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import GenerationError, InputError
from .graph import (ATTACH_GLOBAL, ATTACH_INITIAL, ATTACH_LOCAL, ColoredGraph,
                    EdgeLogEntry)

RNG_ALGORITHM = "numpy-PCG64"

REPEAT_TARGETS = "repeat-targets"
ATTACH_ALL_AVAILABLE = "attach-all-available"
_POLICIES = (REPEAT_TARGETS, ATTACH_ALL_AVAILABLE)


@dataclass(frozen=True)
class GenParams:
    """Homophyly generator configuration."""

    n: int
    a: float
    d: int
    rng_seed: int
    small_community_policy: str = REPEAT_TARGETS
    probability_clamp: bool = True

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InputError(f"d must be >= 1, got {self.d}")
        if self.n <= self.d + 1:
            raise InputError(f"n must exceed d+1={self.d + 1}, got {self.n}")
        if not self.a > 0:
            raise InputError(f"homophyly exponent a must be > 0, got {self.a}")
        if self.small_community_policy not in _POLICIES:
            raise InputError(
                f"unknown small_community_policy {self.small_community_policy!r}")
        if not self.probability_clamp:
            raise InputError("probability_clamp is fixed to True")


def step_probability(i: int, a: float) -> float:
    """Fresh-color probability at step i: min(1, 1/(ln i)^a).

    Natural logarithm; the value is clamped to 1 where (ln i)^a < 1.
    """
    if i < 2:
        raise InputError(f"step must be >= 2, got {i}")
    if a < 0:
        raise InputError(f"exponent must be >= 0, got {a}")
    return min(1.0, 1.0 / math.log(i) ** a)


def expected_seed_statistics(n: int, a: float, d: int) -> Tuple[float, float]:
    """Analytic mean and variance of the seed count beyond the initial graph.

    Non-initial nodes occupy steps d+2 .. n; each independently seeds with
    probability p_i, so the count is a sum of independent Bernoullis.
    """
    steps = np.arange(d + 2, n + 1, dtype=np.float64)
    p = np.minimum(1.0, 1.0 / np.log(steps) ** a)
    return float(p.sum()), float((p * (1.0 - p)).sum())


class _UniformStream:
    """Buffered uniforms from a numpy Generator (cuts per-call overhead)."""

    __slots__ = ("_rng", "_buf", "_pos", "_chunk")

    def __init__(self, rng: np.random.Generator, chunk: int = 1 << 14) -> None:
        self._rng = rng
        self._chunk = chunk
        self._buf = rng.random(chunk)
        self._pos = 0

    def u(self) -> float:
        if self._pos == self._chunk:
            self._buf = self._rng.random(self._chunk)
            self._pos = 0
        val = self._buf[self._pos]
        self._pos += 1
        return val

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        idx = int(self.u() * n)
        return idx if idx < n else n - 1


def _weighted_draws(candidates: Sequence[int], weights: List[float], count: int,
                    stream: _UniformStream, replace: bool) -> List[int]:
    """`count` draws proportional to `weights`, linear-scan cumulative method.

    Without replacement the chosen candidate's weight is zeroed before the
    next draw (successive conditional sampling). `weights` is consumed.
    """
    total = float(sum(weights))
    if total <= 0:
        raise GenerationError("all candidate weights are zero")
    out: List[int] = []
    for _ in range(count):
        r = stream.u() * total
        acc = 0.0
        pick = len(weights) - 1
        for j, w in enumerate(weights):
            acc += w
            if r < acc:
                pick = j
                break
        out.append(candidates[pick])
        if not replace:
            total -= weights[pick]
            weights[pick] = 0.0
    return out


def preferential_sample(g: ColoredGraph, candidates: Iterable[int], count: int,
                        rng: np.random.Generator,
                        policy: str = REPEAT_TARGETS) -> List[int]:
    """Draw `count` attachment targets from `candidates`, degree-proportional.

    Draws are without replacement while enough candidates remain; a candidate
    set smaller than `count` falls back to the small-community policy
    (repeat-targets draws with replacement, attach-all-available returns every
    candidate once).
    """
    cand = sorted(set(candidates))
    if not cand:
        raise GenerationError("empty candidate set")
    if count < 1:
        raise InputError(f"count must be >= 1, got {count}")
    if policy not in _POLICIES:
        raise InputError(f"unknown policy {policy!r}")
    stream = _UniformStream(rng)
    weights = [float(g.degree(v)) for v in cand]
    if len(cand) >= count:
        return _weighted_draws(cand, weights, count, stream, replace=False)
    if policy == ATTACH_ALL_AVAILABLE:
        return list(cand)
    return _weighted_draws(cand, weights, count, stream, replace=True)


def _initial_complete(g: ColoredGraph, d: int, distinct_colors: bool,
                      log: List[EdgeLogEntry] | None) -> None:
    """Install the complete graph on d+1 nodes (the minimal d-regular graph)."""
    for v in range(d + 1):
        g.add_node(v, v if distinct_colors else 0,
                   v == 0 or distinct_colors, v)
        if log is not None:
            log.append(EdgeLogEntry(v + 1, v, tuple(range(v)), ATTACH_INITIAL))
        for u in range(v):
            g.add_edge(u, v)


def _sample_distinct_from_pool(pool: List[int], limit: int, count: int,
                               stream: _UniformStream) -> List[int]:
    """`count` distinct nodes ∝ degree, via rejection on the endpoint pool.

    `pool` holds one entry per edge endpoint; `limit` restricts draws to the
    start-of-step snapshot (entries appended later in the step are excluded).
    """
    chosen: List[int] = []
    seen = set()
    while len(chosen) < count:
        t = pool[stream.randint(limit)]
        if t not in seen:
            seen.add(t)
            chosen.append(t)
    return chosen


def generate_homophyly(params: GenParams) -> Tuple[ColoredGraph, List[EdgeLogEntry]]:
    """Grow a homophyly network of `params.n` nodes; returns (graph, edge log).

    Identical params (including seed) yield bit-identical graphs and logs.
    """
    d, n, a = params.d, params.n, params.a
    rng = np.random.default_rng(params.rng_seed)
    stream = _UniformStream(rng)
    repeat_policy = params.small_community_policy == REPEAT_TARGETS

    g = ColoredGraph()
    log: List[EdgeLogEntry] = []
    _initial_complete(g, d, distinct_colors=True, log=log)

    adj = g._adj
    # endpoint pool: node v appears deg(v) times; uniform pool draws are
    # degree-proportional draws
    pool: List[int] = []
    for u, v_ in ((u, v_) for u in range(d + 1) for v_ in range(u + 1, d + 1)):
        pool.append(u)
        pool.append(v_)
    members: List[List[int]] = [[c] for c in range(d + 1)]

    for v in range(d + 1, n):
        step = v + 1
        p = step_probability(step, a)
        pool_limit = len(pool)
        if stream.u() < p:
            color = len(members)
            is_seed = True
            kind = ATTACH_GLOBAL
            targets = _sample_distinct_from_pool(pool, pool_limit, d, stream)
            members.append([])
        else:
            color = stream.randint(len(members))
            is_seed = False
            kind = ATTACH_LOCAL
            cand = members[color]
            weights = [float(len(adj[u])) for u in cand]
            if len(cand) >= d:
                targets = _weighted_draws(cand, weights, d, stream, replace=False)
            elif repeat_policy:
                targets = _weighted_draws(cand, weights, d, stream, replace=True)
            else:
                targets = list(cand)

        g.add_node(v, color, is_seed, v)
        for t in targets:
            g.add_edge(v, t)
            pool.append(t)
            pool.append(v)
        members[color].append(v)
        log.append(EdgeLogEntry(step, v, tuple(targets), kind))

    return g, log


def generate_pa(n: int, d: int, rng_seed: int) -> ColoredGraph:
    """Classic preferential attachment on one color (no-community baseline).

    Complete graph on d+1 nodes, then each new node attaches d distinct
    degree-proportional targets.
    """
    if d < 1:
        raise InputError(f"d must be >= 1, got {d}")
    if n <= d:
        raise InputError(f"n must exceed d={d}, got {n}")
    rng = np.random.default_rng(rng_seed)
    stream = _UniformStream(rng)
    g = ColoredGraph()
    _initial_complete(g, d, distinct_colors=False, log=None)
    pool: List[int] = []
    for u in range(d + 1):
        for v_ in range(u + 1, d + 1):
            pool.append(u)
            pool.append(v_)
    for v in range(d + 1, n):
        limit = len(pool)
        targets = _sample_distinct_from_pool(pool, limit, d, stream)
        g.add_node(v, 0, False, v)
        for t in targets:
            g.add_edge(v, t)
            pool.append(t)
            pool.append(v)
    return g


def generate_er(n: int, m: int, rng_seed: int) -> ColoredGraph:
    """Uniform random simple graph with n nodes and exactly m edges, one color."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise InputError(f"m must lie in [0, {total}], got {m}")
    rng = np.random.default_rng(rng_seed)
    g = ColoredGraph()
    for v in range(n):
        g.add_node(v, 0, v == 0, v)
    if m == 0:
        return g
    if total <= 2_000_000:
        rows, cols = np.triu_indices(n, k=1)
        idx = rng.choice(total, size=m, replace=False)
        idx.sort()
        for k in idx:
            g.add_edge(int(rows[k]), int(cols[k]))
        return g
    if m > total // 2:
        raise InputError(
            "dense ER graphs above 2M node pairs are not supported")
    chosen = set()
    while len(chosen) < m:
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        pair = (u, v) if u < v else (v, u)
        chosen.add(pair)
    for u, v in sorted(chosen):
        g.add_edge(u, v)
    return g
