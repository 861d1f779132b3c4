"""Structural metrics over colored graphs.

Every operation is a pure function of an immutable graph. Parallel edges
count with multiplicity in degrees, volumes, cuts, and modularity; self-loops
cannot occur by construction.
"""
from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import InputError, MetricError
from .graph import ColoredGraph, homochromatic_sets, induced_subgraph
from .powerlaw import PowerLawFit, fit_power_law  # re-exported for callers

Partition = Union[Mapping[int, Sequence[int]], Sequence[Sequence[int]]]

EXACT_DIAMETER_LIMIT = 10_000


def _blocks(partition: Partition) -> List[List[int]]:
    """Normalize a partition to an ordered list of node lists."""
    if isinstance(partition, Mapping):
        return [list(partition[key]) for key in sorted(partition)]
    return [list(block) for block in partition]


def _check_cover(g: ColoredGraph, blocks: List[List[int]]) -> None:
    seen: set = set()
    for block in blocks:
        for v in block:
            if v in seen:
                raise InputError(f"partition blocks overlap at node {v}")
            seen.add(v)
    if seen != set(g.nodes()):
        raise InputError("partition does not cover the node set exactly")


# -- degree distribution -----------------------------------------------------

def degree_distribution(g: ColoredGraph) -> Dict[int, int]:
    """Exact histogram degree -> node count over all nodes."""
    hist = Counter(g.degree(v) for v in g.nodes())
    return dict(sorted(hist.items()))


# -- modularity and conductance ----------------------------------------------

def modularity(g: ColoredGraph, partition: Partition) -> float:
    """Newman-Girvan modularity of a covering partition.

    sigma = sum_c [ e_c/m - (deg_c / 2m)^2 ] with e_c the number of edges
    internal to block c and deg_c the block's degree volume.
    """
    blocks = _blocks(partition)
    _check_cover(g, blocks)
    m = g.num_edges
    if m == 0:
        raise MetricError("modularity undefined on an edgeless graph")
    block_of: Dict[int, int] = {}
    for idx, block in enumerate(blocks):
        for v in block:
            block_of[v] = idx
    internal = [0] * len(blocks)   # 2*e_c
    volume = [0] * len(blocks)
    for v in g.nodes():
        b = block_of[v]
        nbrs = g.neighbors(v)
        volume[b] += len(nbrs)
        internal[b] += sum(1 for u in nbrs if block_of[u] == b)
    two_m = 2.0 * m
    return sum(int_c / two_m - (vol_c / two_m) ** 2
               for int_c, vol_c in zip(internal, volume))


def conductance(g: ColoredGraph, block: Iterable[int]) -> float:
    """Cut edges over the smaller side's volume, multiplicities counted."""
    members = set(block)
    if not members:
        raise MetricError("conductance undefined for the empty set")
    unknown = members - set(g.nodes())
    if unknown:
        raise InputError(f"unknown node ids: {sorted(unknown)[:5]}")
    if len(members) == g.n:
        raise MetricError("conductance undefined for the full node set")
    cut = 0
    vol = 0
    for v in members:
        nbrs = g.neighbors(v)
        vol += len(nbrs)
        cut += sum(1 for u in nbrs if u not in members)
    vol_rest = 2 * g.num_edges - vol
    denom = min(vol, vol_rest)
    if denom == 0:
        raise MetricError("conductance undefined: zero volume on one side")
    return cut / denom


def conductance_ratio(g: ColoredGraph, partition: Partition) -> float:
    """Volume-weighted mean conductance complement over the partition.

    theta = 1 - sum_c vol(c)*phi(c) / sum_c vol(c). Zero-volume blocks carry
    no weight and are skipped. This aggregate is recorded in reports as
    "theta_proxy".
    """
    blocks = _blocks(partition)
    _check_cover(g, blocks)
    num = 0.0
    den = 0.0
    for block in blocks:
        vol = sum(g.degree(v) for v in block)
        if vol == 0:
            continue
        num += vol * conductance(g, block)
        den += vol
    if den == 0:
        raise MetricError("conductance ratio undefined on an edgeless graph")
    return 1.0 - num / den


# -- degree priority -----------------------------------------------------------

@dataclass(frozen=True)
class DegreeProfile:
    """Per-color neighbor counts of one node, sorted descending.

    Ties between colors are broken by ascending color id, so `colors[j]` is
    the color contributing `counts[j]` edges. Empty for isolated nodes.
    """

    node: int
    counts: Tuple[int, ...]
    profile_colors: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.counts)

    @property
    def first_degree(self) -> int:
        return self.counts[0] if self.counts else 0


def degree_priority(g: ColoredGraph, v: int) -> DegreeProfile:
    """Sorted per-color neighbor counts of v (multiplicity included)."""
    per_color = Counter(g.color[u] for u in g.neighbors(v))
    ordered = sorted(per_color.items(), key=lambda kv: (-kv[1], kv[0]))
    return DegreeProfile(
        node=v,
        counts=tuple(c for _, c in ordered),
        profile_colors=tuple(col for col, _ in ordered),
    )


def community_width(g: ColoredGraph, block: Iterable[int]) -> int:
    """Number of members whose neighborhoods span more than one color."""
    members = list(block)
    if len({g.color[v] for v in members}) > 1:
        raise InputError("community_width requires a homochromatic set")
    width = 0
    for v in members:
        neighbor_colors = {g.color[u] for u in g.neighbors(v)}
        if len(neighbor_colors) > 1:
            width += 1
    return width


def node_width(g: ColoredGraph, v: int) -> int:
    """Number of foreign communities reached through edges to their non-seeds."""
    own = g.color[v]
    foreign = {g.color[u] for u in g.neighbors(v)
               if not g.is_seed[u] and g.color[u] != own}
    return len(foreign)


# -- diameters ----------------------------------------------------------------

@dataclass(frozen=True)
class DiameterResult:
    """Diameter bounds; low == high and exact=True when computed exactly.

    For disconnected graphs `high` is infinite and `component_bounds` lists
    per-component (low, high) pairs, largest component first.
    """

    low: float
    high: float
    exact: bool
    connected: bool
    n_components: int
    component_bounds: Optional[Tuple[Tuple[float, float], ...]] = None

    def as_pair(self) -> List[float]:
        return [self.low, self.high]


def _exact_diameter_csr(csr, indices: np.ndarray, batch: int = 512) -> int:
    best = 0
    for start in range(0, len(indices), batch):
        chunk = indices[start:start + batch]
        dist = dijkstra(csr, directed=False, indices=chunk, unweighted=True)
        dist = dist[:, indices]
        best = max(best, int(dist.max()))
    return best


def _bfs_distances_csr(csr, source: int) -> np.ndarray:
    return dijkstra(csr, directed=False, indices=source, unweighted=True)


def _double_sweep_bounds(csr, nodes_idx: np.ndarray,
                         degree_order: np.ndarray) -> Tuple[int, int]:
    """Double sweep lower bound plus 2*min-eccentricity upper bound.

    Sweeps start from the max-degree node; the midpoint of the found long
    path tends to be central, tightening the upper bound.
    """
    inside = np.zeros(csr.shape[0], dtype=bool)
    inside[nodes_idx] = True

    def masked_bfs(source: int) -> np.ndarray:
        d = _bfs_distances_csr(csr, source)
        d[~inside] = -1.0
        return d

    start = int(degree_order[0])
    dist = masked_bfs(start)
    ecc_start = int(dist.max())
    low, high = ecc_start, 2 * ecc_start

    far_a = int(np.argmax(dist))
    dist_a = masked_bfs(far_a)
    ecc_a = int(dist_a.max())
    low = max(low, ecc_a)
    far_b = int(np.argmax(dist_a))

    # eccentricity of a midpoint of the long a--b path tightens the upper bound
    mid_candidates = np.where(dist_a == ecc_a // 2)[0]
    probes = {far_b}
    if len(mid_candidates):
        probes.add(int(mid_candidates[0]))
    for probe in sorted(probes - {start, far_a}):
        d = masked_bfs(probe)
        ecc_p = int(d.max())
        low = max(low, ecc_p)
        high = min(high, 2 * ecc_p)
    return low, max(low, high)


def diameter(g: ColoredGraph, exact_limit: int = EXACT_DIAMETER_LIMIT) -> DiameterResult:
    """Graph diameter, exact per component up to `exact_limit` nodes.

    Larger components get certified bounds: a double-sweep lower bound and a
    2*min-eccentricity upper bound. Disconnected graphs report per-component
    bounds and an infinite overall diameter.
    """
    if g.n == 0:
        raise MetricError("diameter undefined on the empty graph")
    if g.n == 1:
        return DiameterResult(0, 0, True, True, 1)
    csr, order = g.to_csr()
    n_comp, labels = connected_components(csr, directed=False)
    comp_results: List[Tuple[float, float]] = []
    sizes = np.bincount(labels)
    degree_arr = np.asarray(csr.sum(axis=1)).ravel()
    for comp in np.argsort(sizes)[::-1]:
        nodes_idx = np.where(labels == comp)[0]
        if len(nodes_idx) == 1:
            comp_results.append((0.0, 0.0))
            continue
        if len(nodes_idx) <= exact_limit:
            exact = _exact_diameter_csr(csr, nodes_idx)
            comp_results.append((float(exact), float(exact)))
        else:
            by_degree = nodes_idx[np.argsort(degree_arr[nodes_idx])[::-1]]
            low, high = _double_sweep_bounds(csr, nodes_idx, by_degree)
            comp_results.append((float(low), float(high)))
    if n_comp == 1:
        low, high = comp_results[0]
        return DiameterResult(low, high, low == high, True, 1)
    low = max(lo for lo, _ in comp_results)
    return DiameterResult(low, math.inf, False, False, n_comp,
                          tuple(comp_results))


def _bfs_levels(adj: Mapping[int, List[int]], members: set, start: int) -> Dict[int, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        for u in adj[v]:
            if u in members and u not in dist:
                dist[u] = dv + 1
                queue.append(u)
    return dist


def community_diameter(g: ColoredGraph, block: Iterable[int]) -> int:
    """Exact diameter of the induced subgraph of `block` (all-pairs BFS)."""
    members = set(block)
    if not members:
        raise MetricError("diameter undefined for the empty set")
    unknown = members - set(g.nodes())
    if unknown:
        raise InputError(f"unknown node ids: {sorted(unknown)[:5]}")
    if len(members) == 1:
        return 0
    adj = g._adj
    best = 0
    for v in members:
        dist = _bfs_levels(adj, members, v)
        if len(dist) != len(members):
            raise MetricError("induced subgraph is disconnected")
        ecc = max(dist.values())
        if ecc > best:
            best = ecc
    return best


def is_connected_subset(g: ColoredGraph, block: Iterable[int]) -> bool:
    members = set(block)
    if not members:
        return True
    start = next(iter(members))
    reached = _bfs_levels(g._adj, members, start)
    return len(reached) == len(members)


# -- king node ------------------------------------------------------------------

def king_node_check(g: ColoredGraph, block: Iterable[int]) -> Tuple[bool, float]:
    """(seed degree >= 2x runner-up degree, the degree ratio) for a community.

    The community seed is its unique seed-flagged member. Raises MetricError
    for singleton communities, where the ratio is undefined.
    """
    members = list(block)
    if len(members) < 2:
        raise MetricError("king ratio undefined for singleton communities")
    seeds = [v for v in members if g.is_seed[v]]
    if len(seeds) != 1:
        raise InputError(f"expected exactly one seed in the community, got {len(seeds)}")
    seed_deg = g.degree(seeds[0])
    runner_up = max(g.degree(v) for v in members if v != seeds[0])
    if runner_up == 0:
        raise MetricError("king ratio undefined: runner-up degree is zero")
    ratio = seed_deg / runner_up
    return ratio >= 2.0, ratio


# -- per-community statistics ----------------------------------------------------

@dataclass(frozen=True)
class CommunityStats:
    """Summary record for one homochromatic set."""

    color: int
    size: int
    conductance: float
    diameter: int
    width: int
    seed_degree: int
    runner_up_degree: Optional[int]
    seed_created_at: int
    is_king: Optional[bool]
    king_ratio: Optional[float]

    def as_dict(self) -> dict:
        return {
            "color": self.color, "size": self.size,
            "conductance": self.conductance, "diameter": self.diameter,
            "width": self.width, "seed_degree": self.seed_degree,
            "runner_up_degree": self.runner_up_degree,
            "seed_created_at": self.seed_created_at,
            "is_king": self.is_king, "king_ratio": self.king_ratio,
        }


def community_stats(g: ColoredGraph) -> List[CommunityStats]:
    """Per-community stats over the homochromatic partition, by color id."""
    out: List[CommunityStats] = []
    for color, members in homochromatic_sets(g).items():
        seeds = [v for v in members if g.is_seed[v]]
        if len(seeds) != 1:
            raise InputError(f"color {color} has {len(seeds)} seeds")
        seed = seeds[0]
        phi = conductance(g, members) if len(members) < g.n else 0.0
        if len(members) >= 2:
            is_king, ratio = king_node_check(g, members)
            runner_up = max(g.degree(v) for v in members if v != seed)
        else:
            is_king, ratio, runner_up = None, None, None
        out.append(CommunityStats(
            color=color, size=len(members), conductance=phi,
            diameter=community_diameter(g, members),
            width=community_width(g, members),
            seed_degree=g.degree(seed), runner_up_degree=runner_up,
            seed_created_at=g.created_at[seed],
            is_king=is_king, king_ratio=ratio,
        ))
    return out
