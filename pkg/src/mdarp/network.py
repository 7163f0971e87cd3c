"""Road networks, shortest-path tables and the layered expansion used by the MILP export.

Node ids are dense integers ``1..n``.  The dense matrices in
:class:`ShortestPathTables` carry an unused row/column 0 so that node ids index
them directly.
"""
from __future__ import annotations

import heapq
import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_SPEED = 1.0  # miles per minute


class NetworkError(ValueError):
    """Raised for malformed or invalid network data."""


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected network; ``arcs`` maps ``(a, b)`` with ``a < b`` to ``(distance, time)``."""

    n_nodes: int
    arcs: Mapping[tuple[int, int], tuple[float, float]]
    labels: tuple = field(default=())

    def __post_init__(self):
        if self.n_nodes < 1:
            raise NetworkError("network has no nodes")
        for (a, b), (d, t) in self.arcs.items():
            if a == b:
                raise NetworkError(f"self-loop on node {a}")
            if a > b:
                raise NetworkError(f"arc key ({a}, {b}) is not normalised (a < b)")
            if not (1 <= a <= self.n_nodes and 1 <= b <= self.n_nodes):
                raise NetworkError(f"arc ({a}, {b}) references a node outside 1..{self.n_nodes}")
            if not (d > 0 and t > 0) or math.isinf(d) or math.isinf(t):
                raise NetworkError(f"arc ({a}, {b}) has nonpositive weight d={d}, t={t}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, self.n_nodes + 1)))
        elif len(self.labels) != self.n_nodes:
            raise NetworkError("labels must name every node")

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (self.n_nodes == other.n_nodes and dict(self.arcs) == dict(other.arcs)
                and tuple(self.labels) == tuple(other.labels))

    __hash__ = object.__hash__

    @property
    def nodes(self) -> range:
        return range(1, self.n_nodes + 1)

    @cached_property
    def adjacency(self) -> dict[int, list[tuple[int, float, float]]]:
        adj: dict[int, list[tuple[int, float, float]]] = {n: [] for n in self.nodes}
        for (a, b), (d, t) in self.arcs.items():
            adj[a].append((b, d, t))
            adj[b].append((a, d, t))
        for n in adj:
            adj[n].sort()
        return adj

    def has_arc(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.arcs

    def arc(self, a: int, b: int) -> tuple[float, float]:
        """``(distance, time)`` of the arc joining ``a`` and ``b`` in either direction."""
        return self.arcs[(a, b) if a < b else (b, a)]

    @cached_property
    def shortest_paths(self) -> "ShortestPathTables":
        return all_pairs_shortest(self)

    def to_native(self) -> dict:
        return {
            "nodes": list(self.labels),
            "arcs": [
                {"a": self.labels[a - 1], "b": self.labels[b - 1], "dist": d, "time": t}
                for (a, b), (d, t) in sorted(self.arcs.items())
            ],
        }


def network_from_edges(edges: Iterable[tuple], n_nodes: int | None = None,
                       speed: float = DEFAULT_SPEED) -> Network:
    """Build a network from ``(a, b, dist[, time])`` tuples on dense ids."""
    arcs: dict[tuple[int, int], tuple[float, float]] = {}
    top = 0
    for e in edges:
        a, b, d = int(e[0]), int(e[1]), float(e[2])
        t = float(e[3]) if len(e) > 3 and e[3] is not None else d / speed
        if a == b:
            raise NetworkError(f"self-loop on node {a}")
        key = (min(a, b), max(a, b))
        if key in arcs:
            raise NetworkError(f"duplicate arc {key}")
        arcs[key] = (d, t)
        top = max(top, a, b)
    return Network(n_nodes or top, arcs)


# --------------------------------------------------------------------------- loading


def load_network(source: str | Path, format: str = "native", remove_centroids: bool = False,
                 length_scale: float = 1.0, speed: float = DEFAULT_SPEED) -> Network:
    """Load a network from a TNTP ``_net`` file or the native JSON format.

    ``remove_centroids`` drops TNTP zone nodes (ids below ``<FIRST THRU NODE>``)
    together with their arcs.  ``length_scale`` converts file lengths to miles.
    """
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(path)
    if format == "tntp":
        rows, first_thru = _read_tntp(path)
        if remove_centroids and first_thru:
            rows = [r for r in rows if r[1] >= first_thru and r[2] >= first_thru]
        return _build(rows, length_scale, speed, undirected_pairs=True)
    if format == "native":
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise NetworkError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        return network_from_native(data, length_scale=length_scale, speed=speed)
    raise ValueError(f"unknown network format {format!r}")


def network_from_native(data: dict, length_scale: float = 1.0,
                        speed: float = DEFAULT_SPEED) -> Network:
    try:
        arcs = data["arcs"]
        rows = [(i + 1, a["a"], a["b"], a["dist"], a.get("time")) for i, a in enumerate(arcs)]
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"native network is missing field {exc}") from exc
    nodes = data.get("nodes")
    return _build(rows, length_scale, speed, undirected_pairs=False, extra_nodes=nodes)


def _read_tntp(path: Path) -> tuple[list[tuple], int]:
    rows: list[tuple] = []
    first_thru = 0
    columns = None
    in_body = False
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if not in_body:
                if line.startswith("<"):
                    tag, _, value = line[1:].partition(">")
                    tag = tag.strip().upper()
                    if tag == "FIRST THRU NODE":
                        first_thru = int(value.strip())
                    elif tag == "END OF METADATA":
                        in_body = True
                    continue
                if line.startswith("~"):
                    continue
                in_body = True
            if line.startswith("~"):
                columns = _tntp_columns(line)
                continue
            fields = line.rstrip(";").split()
            if columns is None:
                columns = {"init_node": 0, "term_node": 1, "length": 3, "free_flow_time": 4}
            try:
                a = int(fields[columns["init_node"]])
                b = int(fields[columns["term_node"]])
                length = float(fields[columns["length"]])
                fft = float(fields[columns["free_flow_time"]])
            except (IndexError, ValueError) as exc:
                raise NetworkError(f"{path}: line {lineno}: cannot parse arc row ({exc})") from exc
            rows.append((lineno, a, b, length, fft))
    return rows, first_thru


def _tntp_columns(header: str) -> dict[str, int] | None:
    names = [h.strip().lower() for h in header.lstrip("~").rstrip(";").split("\t") if h.strip()]
    if len(names) < 5:
        # space-separated header: fall back to positional layout
        return None
    wanted = {
        "init_node": ("init node", "init_node"),
        "term_node": ("term node", "term_node"),
        "length": ("length",),
        "free_flow_time": ("free flow time", "free_flow_time", "fft"),
    }
    cols = {}
    for key, aliases in wanted.items():
        for i, n in enumerate(names):
            if n in aliases:
                cols[key] = i
        if key not in cols:
            return None
    return cols


def _build(rows: Sequence[tuple], length_scale: float, speed: float,
           undirected_pairs: bool, extra_nodes=None) -> Network:
    """Relabel to dense ids and validate.

    With ``undirected_pairs`` a row ``(b, a)`` after ``(a, b)`` is the reverse
    direction of the same street and merges into one arc (minimum weights);
    repeating the same direction is still a duplicate.
    """
    labels = set(extra_nodes or ())
    for _, a, b, *_ in rows:
        labels.update((a, b))
    ordered = sorted(labels)
    index = {lab: i + 1 for i, lab in enumerate(ordered)}
    arcs: dict[tuple[int, int], tuple[float, float]] = {}
    seen_dir: set[tuple[int, int]] = set()
    for lineno, a, b, length, time in rows:
        if a == b:
            raise NetworkError(f"line {lineno}: self-loop on node {a}")
        d = float(length) * length_scale
        t = float(time) if time is not None else d / speed
        if not (d > 0 and t > 0):
            raise NetworkError(f"line {lineno}: arc ({a}, {b}) has nonpositive weight")
        ia, ib = index[a], index[b]
        key = (min(ia, ib), max(ia, ib))
        if key in arcs:
            if not undirected_pairs or (ia, ib) in seen_dir:
                raise NetworkError(f"line {lineno}: duplicate arc ({a}, {b})")
            d0, t0 = arcs[key]
            arcs[key] = (min(d0, d), min(t0, t))
        else:
            arcs[key] = (d, t)
        seen_dir.add((ia, ib))
    return Network(len(ordered), arcs, tuple(ordered))


# --------------------------------------------------------------------------- shortest paths


class ShortestPathTables:
    """All-pairs shortest distances, times along those paths, and predecessors.

    ``pred[s, v]`` is the node before ``v`` on the stored shortest path from ``s``.
    Among equally short paths the predecessor with the smallest id is kept.
    ``time[s, v]`` is the travel time along the stored (distance-shortest) path.
    """

    def __init__(self, dist: np.ndarray, time: np.ndarray, pred: np.ndarray):
        self.dist = dist
        self.time = time
        self.pred = pred
        self.n_nodes = dist.shape[0] - 1
        self._paths: dict[tuple[int, int], tuple[int, ...]] = {}
        self._search: dict = {}

    @cached_property
    def D(self) -> list[list[float]]:
        """Distance matrix as nested lists (faster scalar lookups than numpy)."""
        return self.dist.tolist()

    @cached_property
    def T(self) -> list[list[float]]:
        return self.time.tolist()

    def path(self, s: int, t: int) -> tuple[int, ...]:
        key = (s, t)
        hit = self._paths.get(key)
        if hit is not None:
            return hit
        nodes = [t]
        pred = self.pred[s]
        v = t
        while v != s:
            v = int(pred[v])
            if v <= 0:
                raise NetworkError(f"no path from {s} to {t}")
            nodes.append(v)
        out = tuple(reversed(nodes))
        self._paths[key] = out
        return out


def all_pairs_shortest(net: Network) -> ShortestPathTables:
    n = net.n_nodes
    dist = np.full((n + 1, n + 1), np.inf)
    time = np.full((n + 1, n + 1), np.inf)
    pred = np.zeros((n + 1, n + 1), dtype=np.int64)
    adj = net.adjacency
    for s in net.nodes:
        d_row, t_row, p_row = _dijkstra(s, n, adj)
        unreachable = [v for v in range(1, n + 1) if math.isinf(d_row[v])]
        if unreachable:
            raise NetworkError(f"network is disconnected: node {unreachable[0]} "
                               f"is unreachable from node {s}")
        dist[s] = d_row
        time[s] = t_row
        pred[s] = p_row
    return ShortestPathTables(dist, time, pred)


def _dijkstra(s: int, n: int, adj) -> tuple[list[float], list[float], list[int]]:
    inf = math.inf
    dist = [inf] * (n + 1)
    pred = [0] * (n + 1)
    dist[s] = 0.0
    pred[s] = s
    done = [False] * (n + 1)
    heap = [(0.0, s)]
    order = []
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        order.append(u)
        for v, w, _ in adj[u]:
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and u < pred[v] and v != s:
                pred[v] = u
    time = [inf] * (n + 1)
    time[s] = 0.0
    # positive weights: a predecessor is always strictly closer than its successor
    for v in sorted(order, key=lambda x: dist[x]):
        if v == s:
            continue
        p = pred[v]
        time[v] = time[p] + _arc_time(adj, p, v)
    dist[0] = inf
    pred[s] = s
    return dist, time, pred


def _arc_time(adj, a: int, b: int) -> float:
    for v, _, t in adj[a]:
        if v == b:
            return t
    raise KeyError((a, b))


def path_length(net: Network, path: Sequence[int]) -> tuple[float, float]:
    """Distance and time of a node path, summed left to right."""
    d = t = 0.0
    for a, b in zip(path, path[1:]):
        ad, at = net.arc(a, b)
        d += ad
        t += at
    return d, t


# --------------------------------------------------------------------------- layers


@dataclass(frozen=True)
class LayeredArc:
    tail: int
    head: int
    dist: float
    time: float
    inter_layer: bool


@dataclass(frozen=True)
class LayeredNetwork:
    """``layers`` copies of ``base``; copy ``l`` of node ``i`` has id ``(l - 1) * n + i``.

    Intra-layer arcs exist in both directions.  Inter-layer arcs run one way,
    from a node's copy on layer ``l`` to its copy on layer ``l + 1``, at zero cost.
    """

    layers: int
    base: Network
    arcs: tuple[LayeredArc, ...]

    @property
    def n_nodes(self) -> int:
        return self.layers * self.base.n_nodes

    def node_id(self, node: int, layer: int) -> int:
        if not (1 <= layer <= self.layers):
            raise ValueError(f"layer {layer} outside 1..{self.layers}")
        return (layer - 1) * self.base.n_nodes + node

    def node_of(self, layered: int) -> tuple[int, int]:
        """Inverse of :meth:`node_id`: ``(base node, layer)``."""
        n = self.base.n_nodes
        return (layered - 1) % n + 1, (layered - 1) // n + 1

    def copies(self, node: int) -> list[int]:
        return [self.node_id(node, l) for l in range(1, self.layers + 1)]

    def contract(self) -> dict[tuple[int, int], tuple[float, float]]:
        """Map intra-layer arcs back onto base arcs (inverse of the expansion)."""
        out: dict[tuple[int, int], tuple[float, float]] = {}
        for arc in self.arcs:
            if arc.inter_layer:
                continue
            a, _ = self.node_of(arc.tail)
            b, _ = self.node_of(arc.head)
            out[(min(a, b), max(a, b))] = (arc.dist, arc.time)
        return out


def expand_layers(net: Network, layers: int = 2) -> LayeredNetwork:
    if layers < 1:
        raise ValueError(f"layer count must be >= 1, got {layers}")
    n = net.n_nodes
    arcs: list[LayeredArc] = []
    for l in range(layers):
        off = l * n
        for (a, b), (d, t) in sorted(net.arcs.items()):
            arcs.append(LayeredArc(a + off, b + off, d, t, False))
            arcs.append(LayeredArc(b + off, a + off, d, t, False))
    for l in range(layers - 1):
        for i in net.nodes:
            arcs.append(LayeredArc(i + l * n, i + (l + 1) * n, 0.0, 0.0, True))
    return LayeredNetwork(layers, net, tuple(arcs))


# --------------------------------------------------------------------------- synthetic networks


def synthetic_road_network(n_nodes: int = 378, n_arcs: int = 796, extent: float = 10.0,
                           seed: int = 0, speed: float = DEFAULT_SPEED,
                           ) -> tuple[Network, dict[int, tuple[float, float]]]:
    """Random planar road-like network plus node coordinates (miles).

    Nodes are scattered uniformly over an ``extent`` x ``extent`` square and
    joined by their Delaunay triangulation; the longest edges are then removed
    while the graph stays connected, until ``n_arcs`` remain.  Arc length is the
    Euclidean length; travel time is length / ``speed``.
    """
    from scipy.spatial import Delaunay

    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, extent, size=(n_nodes, 2))
    tri = Delaunay(pts)
    edges = set()
    for simplex in tri.simplices:
        for i in range(3):
            a, b = int(simplex[i]), int(simplex[(i + 1) % 3])
            edges.add((min(a, b), max(a, b)))
    if n_arcs < n_nodes - 1:
        raise ValueError("a connected network needs at least n_nodes - 1 arcs")
    length = {e: float(np.hypot(*(pts[e[0]] - pts[e[1]]))) for e in edges}
    # Kruskal spanning tree first so removals never disconnect the graph
    parent = list(range(n_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = set()
    for e in sorted(edges, key=lambda e: (length[e], e)):
        ra, rb = find(e[0]), find(e[1])
        if ra != rb:
            parent[ra] = rb
            tree.add(e)
    extra = sorted(edges - tree, key=lambda e: (length[e], e))
    keep = tree | set(extra[: max(0, n_arcs - len(tree))])
    arcs = {}
    for a, b in keep:
        d = round(max(length[(a, b)], 1e-3), 4)
        arcs[(a + 1, b + 1)] = (d, round(d / speed, 4))
    coords = {i + 1: (float(pts[i, 0]), float(pts[i, 1])) for i in range(n_nodes)}
    return Network(n_nodes, arcs), coords


def random_connected_network(n_nodes: int, extra_arcs: int, rng: np.random.Generator,
                             weights: Sequence[int] = (1, 2, 3)) -> Network:
    """Small random connected graph with integer weights (distance == time)."""
    arcs: dict[tuple[int, int], tuple[float, float]] = {}
    order = rng.permutation(n_nodes) + 1
    for i in range(1, n_nodes):
        a = int(order[i])
        b = int(order[rng.integers(0, i)])
        w = float(rng.choice(weights))
        arcs[(min(a, b), max(a, b))] = (w, w)
    tries = 0
    target = len(arcs) + extra_arcs
    max_arcs = n_nodes * (n_nodes - 1) // 2
    while len(arcs) < min(target, max_arcs) and tries < 50 * (extra_arcs + 1):
        tries += 1
        a, b = (int(x) for x in rng.choice(n_nodes, size=2, replace=False) + 1)
        key = (min(a, b), max(a, b))
        if key not in arcs:
            w = float(rng.choice(weights))
            arcs[key] = (w, w)
    return Network(n_nodes, arcs)


def read_coordinates(path: str | Path) -> dict[int, tuple[float, float]]:
    """Read a TNTP ``_node`` file (``node  x  y``); header and comments are skipped."""
    coords = {}
    for line in Path(path).read_text().splitlines():
        parts = line.replace(";", " ").split()
        if len(parts) < 3:
            continue
        try:
            coords[int(parts[0])] = (float(parts[1]), float(parts[2]))
        except ValueError:
            continue
    return coords
