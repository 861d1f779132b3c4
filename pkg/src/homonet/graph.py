"""Colored undirected multigraph with creation-order bookkeeping.

The graph grows append-only during generation and is treated as immutable
afterwards. Every node carries a color id, a seed flag, and the time step at
which it was created. Parallel edges are allowed (self-loops are not); all
degree counts include multiplicity.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy import sparse

from .errors import InputError

ATTACH_INITIAL = "initial"
ATTACH_GLOBAL = "preferential-global"
ATTACH_LOCAL = "homophyly-local"


@dataclass(frozen=True)
class EdgeLogEntry:
    """Provenance record for one node's creation-time attachments.

    `step` is the 1-based time step (node id + 1), `targets` the attachment
    endpoints in draw order, `kind` one of the ATTACH_* constants.
    """

    step: int
    node: int
    targets: Tuple[int, ...]
    kind: str


class ColoredGraph:
    """Undirected multigraph whose nodes carry color / seed / creation data."""

    __slots__ = ("_adj", "color", "is_seed", "created_at", "_csr_cache")

    def __init__(self) -> None:
        self._adj: Dict[int, List[int]] = {}
        self.color: Dict[int, int] = {}
        self.is_seed: Dict[int, bool] = {}
        self.created_at: Dict[int, int] = {}
        self._csr_cache = None

    # -- construction ------------------------------------------------------

    def add_node(self, node: int, color: int, is_seed: bool, created_at: int) -> None:
        if node in self._adj:
            raise InputError(f"node {node} already exists")
        self._adj[node] = []
        self.color[node] = color
        self.is_seed[node] = is_seed
        self.created_at[node] = created_at
        self._csr_cache = None

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise InputError("self-loops are not allowed")
        if u not in self._adj or v not in self._adj:
            raise InputError(f"edge ({u},{v}) references an unknown node")
        self._adj[u].append(v)
        self._adj[v].append(u)
        self._csr_cache = None

    # -- basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._adj)

    def nodes(self) -> List[int]:
        return list(self._adj.keys())

    def has_node(self, v: int) -> bool:
        return v in self._adj

    def degree(self, v: int) -> int:
        """Number of incident edges, parallel edges counted per copy."""
        try:
            return len(self._adj[v])
        except KeyError:
            raise InputError(f"unknown node {v}") from None

    def neighbors(self, v: int) -> List[int]:
        """Neighbor list with multiplicity (one entry per incident edge)."""
        try:
            return self._adj[v]
        except KeyError:
            raise InputError(f"unknown node {v}") from None

    @property
    def num_edges(self) -> int:
        """Edge count with multiplicity."""
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def edges(self) -> List[Tuple[int, int]]:
        """All edges as (min, max) pairs, one entry per parallel copy, sorted."""
        out: List[Tuple[int, int]] = []
        for u, nbrs in self._adj.items():
            for v in nbrs:
                if u <= v:
                    out.append((u, v))
        out.sort()
        return out

    def colors(self) -> List[int]:
        """Distinct color ids, ascending."""
        return sorted(set(self.color.values()))

    def seeds(self) -> List[int]:
        return sorted(v for v, s in self.is_seed.items() if s)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColoredGraph):
            return NotImplemented
        if (self.color != other.color or self.is_seed != other.is_seed
                or self.created_at != other.created_at):
            return False
        if self._adj.keys() != other._adj.keys():
            return False
        return all(sorted(self._adj[v]) == sorted(other._adj[v]) for v in self._adj)

    def __repr__(self) -> str:
        return (f"ColoredGraph(n={self.n}, m={self.num_edges}, "
                f"colors={len(set(self.color.values()))})")

    # -- sparse view -------------------------------------------------------

    def to_csr(self) -> Tuple[sparse.csr_matrix, List[int]]:
        """CSR adjacency (multiplicity as weight) plus the node-id order used.

        Cached; the cache is dropped on mutation.
        """
        if self._csr_cache is None:
            order = self.nodes()
            index = {v: i for i, v in enumerate(order)}
            indptr = np.zeros(len(order) + 1, dtype=np.int64)
            cols: List[int] = []
            for i, v in enumerate(order):
                nbrs = self._adj[v]
                indptr[i + 1] = indptr[i] + len(nbrs)
                cols.extend(index[u] for u in nbrs)
            data = np.ones(len(cols), dtype=np.int32)
            mat = sparse.csr_matrix(
                (data, np.asarray(cols, dtype=np.int64), indptr),
                shape=(len(order), len(order)))
            mat.sum_duplicates()
            self._csr_cache = (mat, order)
        return self._csr_cache


def homochromatic_sets(g: ColoredGraph) -> Dict[int, List[int]]:
    """Partition of the nodes by color, keyed and ordered by color id.

    Member lists are sorted ascending, so the result is deterministic for a
    given graph regardless of construction order.
    """
    blocks: Dict[int, List[int]] = {}
    for v, c in g.color.items():
        blocks.setdefault(c, []).append(v)
    return {c: sorted(members) for c, members in sorted(blocks.items())}


def induced_subgraph(g: ColoredGraph, nodes: Iterable[int]) -> ColoredGraph:
    """Subgraph on `nodes` keeping only internal edges.

    Colors, seed flags, and creation indices are preserved; node ids are kept
    as-is (they remain creation indices of the parent graph).
    """
    keep = set(nodes)
    unknown = keep - g._adj.keys()
    if unknown:
        raise InputError(f"unknown node ids: {sorted(unknown)[:5]}")
    sub = ColoredGraph()
    for v in sorted(keep):
        sub.add_node(v, g.color[v], g.is_seed[v], g.created_at[v])
    for v in sorted(keep):
        for u in g._adj[v]:
            if u in keep and v < u:
                sub.add_edge(v, u)
    return sub


def degree(g: ColoredGraph, v: int) -> int:
    return g.degree(v)


# -- edge log replay --------------------------------------------------------

def replay_edge_log(log: Sequence[EdgeLogEntry]) -> ColoredGraph:
    """Rebuild the exact graph from its attachment log.

    Colors are recoverable from the log alone: initial nodes take distinct
    colors in id order, a globally-attaching node opens the next fresh color,
    and a locally-attaching node inherits its targets' (common) color.
    """
    g = ColoredGraph()
    next_color = 0
    for entry in log:
        if entry.kind == ATTACH_INITIAL:
            g.add_node(entry.node, next_color, True, entry.node)
            next_color += 1
        elif entry.kind == ATTACH_GLOBAL:
            g.add_node(entry.node, next_color, True, entry.step - 1)
            next_color += 1
        elif entry.kind == ATTACH_LOCAL:
            target_colors = {g.color[t] for t in entry.targets}
            if len(target_colors) != 1:
                raise InputError(
                    f"local entry for node {entry.node} has mixed-color targets")
            g.add_node(entry.node, target_colors.pop(), False, entry.step - 1)
        else:
            raise InputError(f"unknown attachment kind {entry.kind!r}")
        for t in entry.targets:
            g.add_edge(entry.node, t)
    return g


# -- serialization -----------------------------------------------------------

def write_graph(g: ColoredGraph, prefix: str) -> Tuple[str, str]:
    """Write `<prefix>.edges.tsv` and `<prefix>.nodes.tsv` (UTF-8, LF).

    Edge lines are `u<TAB>v` with u <= v, repeated per parallel copy, sorted.
    Node lines are `node<TAB>color<TAB>is_seed<TAB>created_at`.
    """
    from .reporting import atomic_write_text

    edge_path = f"{prefix}.edges.tsv"
    node_path = f"{prefix}.nodes.tsv"
    edge_lines = [f"{u}\t{v}\n" for u, v in g.edges()]
    atomic_write_text(edge_path, "".join(edge_lines))
    node_lines = [
        f"{v}\t{g.color[v]}\t{int(g.is_seed[v])}\t{g.created_at[v]}\n"
        for v in sorted(g.nodes())
    ]
    atomic_write_text(node_path, "".join(node_lines))
    return edge_path, node_path


def load_graph(prefix: str) -> ColoredGraph:
    """Load a graph written by :func:`write_graph`."""
    g = ColoredGraph()
    node_path = f"{prefix}.nodes.tsv"
    edge_path = f"{prefix}.edges.tsv"
    try:
        with open(node_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                v, c, s, t = line.split("\t")
                g.add_node(int(v), int(c), bool(int(s)), int(t))
        with open(edge_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                u, v = line.split("\t")
                g.add_edge(int(u), int(v))
    except OSError as exc:
        raise InputError(f"cannot load graph {prefix!r}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"malformed graph file under {prefix!r}: {exc}") from exc
    return g


def edge_log_to_json(log: Sequence[EdgeLogEntry]) -> str:
    return json.dumps(
        [[e.step, e.node, list(e.targets), e.kind] for e in log],
        separators=(",", ":"))


def edge_log_from_json(text: str) -> List[EdgeLogEntry]:
    return [
        EdgeLogEntry(step, node, tuple(targets), kind)
        for step, node, targets, kind in json.loads(text)
    ]
