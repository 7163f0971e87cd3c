"""Instance data model, JSON persistence and the randomized scenario generator."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .network import Network, load_network, network_from_native

SPATIAL_MODES = ("U", "C3", "C5", "C10")
TEMPORAL_MODES = ("zero", "U01", "U04")
CLUSTER_COUNT = {"U": 0, "C3": 3, "C5": 5, "C10": 10}
TEMPORAL_RANGE = {"zero": (0.0, 0.0), "U01": (0.0, 1.0), "U04": (0.0, 4.0)}


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class Vehicle:
    id: int
    start: int
    capacity: int
    ready_time: float = 0.0
    end: int | None = None

    def __post_init__(self):
        if self.end is None:
            object.__setattr__(self, "end", self.start)
        if self.capacity < 1:
            raise InstanceError(f"vehicle {self.id}: capacity must be >= 1")
        if self.ready_time < 0:
            raise InstanceError(f"vehicle {self.id}: ready time must be >= 0")


Window = tuple[float, float]


@dataclass(frozen=True)
class Request:
    id: int
    origin: int
    destination: int
    size: int = 1
    release: float = 0.0
    pickup_window: Window | None = None
    dropoff_window: Window | None = None

    def __post_init__(self):
        if self.origin == self.destination:
            raise InstanceError(f"request {self.id}: origin equals destination")
        if self.size < 1:
            raise InstanceError(f"request {self.id}: party size must be >= 1")
        if self.release < 0:
            raise InstanceError(f"request {self.id}: in-system time must be >= 0")
        for name in ("pickup_window", "dropoff_window"):
            w = getattr(self, name)
            if w is not None:
                w = (float(w[0]), float(w[1]))
                if w[0] > w[1]:
                    raise InstanceError(f"request {self.id}: {name} has a > b")
                object.__setattr__(self, name, w)


@dataclass(frozen=True)
class Parameters:
    """Objective weights and platoon settings.

    With ``eta2`` set the two-rate saving model applies: a platooned vehicle
    saves ``eta`` plus ``eta2`` per partner beyond the first.
    """

    alpha: float = 1.0
    beta: float = 1.0
    eta: float = 0.1
    eta2: float | None = None
    u: int = 4
    phi: float = 1.0
    n_max: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or (self.alpha == 0 and self.beta == 0):
            raise InstanceError("alpha and beta must be >= 0 and not both 0")
        if self.u < 2:
            raise InstanceError("maximum platoon length u must be >= 2")
        if self.n_max < 1:
            raise InstanceError("n_max must be >= 1")
        if self.phi < 0:
            raise InstanceError("phi must be >= 0")
        if self.eta < 0 or (self.eta2 is not None and self.eta2 < 0):
            raise InstanceError("saving rates must be >= 0")
        if self.saving_rate(self.u - 1) >= 1:
            raise InstanceError(f"saving rate {self.saving_rate(self.u - 1):g} at full platoon "
                                f"length {self.u} would make arc costs nonpositive")

    @property
    def two_rate(self) -> bool:
        return self.eta2 is not None

    def saving_rate(self, partners: int) -> float:
        """Fraction of an arc's distance saved by a vehicle with ``partners`` platoon partners."""
        if partners <= 0:
            return 0.0
        if self.eta2 is None:
            return self.eta * partners
        return self.eta + self.eta2 * (partners - 1)


@dataclass(eq=False)
class Instance:
    network: Network
    vehicles: list[Vehicle]
    requests: list[Request]
    params: Parameters = field(default_factory=Parameters)
    network_source: dict | None = None

    def __post_init__(self):
        self.vehicles = list(self.vehicles)
        self.requests = list(self.requests)
        if not self.vehicles:
            raise InstanceError("instance needs at least one vehicle")
        if not self.requests:
            raise InstanceError("instance needs at least one request")
        n = self.network.n_nodes
        bad = []
        for v in self.vehicles:
            for node in (v.start, v.end):
                if not 1 <= node <= n:
                    bad.append(f"vehicle {v.id} -> node {node}")
        for r in self.requests:
            for node in (r.origin, r.destination):
                if not 1 <= node <= n:
                    bad.append(f"request {r.id} -> node {node}")
        if bad:
            raise InstanceError(f"dangling node references on a {n}-node network: " + ", ".join(bad))
        for kind, items in (("vehicle", self.vehicles), ("request", self.requests)):
            ids = [x.id for x in items]
            if len(set(ids)) != len(ids):
                raise InstanceError(f"duplicate {kind} ids")
        self.vehicle_by_id = {v.id: v for v in self.vehicles}
        self.request_by_id = {r.id: r for r in self.requests}

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.network == other.network and self.vehicles == other.vehicles
                and self.requests == other.requests and self.params == other.params)

    @property
    def tables(self):
        return self.network.shortest_paths

    def restrict(self, vehicle_ids: Sequence[int], request_ids: Sequence[int]) -> "Instance":
        """Sub-instance sharing this network (and its cached shortest-path tables)."""
        vs = set(vehicle_ids)
        rs = set(request_ids)
        sub = Instance.__new__(Instance)
        sub.network = self.network
        sub.vehicles = [v for v in self.vehicles if v.id in vs]
        sub.requests = [r for r in self.requests if r.id in rs]
        sub.params = self.params
        sub.network_source = self.network_source
        sub.vehicle_by_id = {v.id: v for v in sub.vehicles}
        sub.request_by_id = {r.id: r for r in sub.requests}
        return sub

    def with_params(self, **changes) -> "Instance":
        return Instance(self.network, self.vehicles, self.requests,
                        replace(self.params, **changes), self.network_source)


# --------------------------------------------------------------------------- persistence


def _window_out(w):
    if w is None:
        return None
    return [w[0], None if math.isinf(w[1]) else w[1]]


def _window_in(w):
    if w is None:
        return None
    return (float(w[0]), math.inf if w[1] is None else float(w[1]))


def instance_to_dict(inst: Instance, network_ref: dict | None = None) -> dict:
    ref = network_ref or inst.network_source
    net = ref if ref is not None else inst.network.to_native()
    vehicles = [
        {"id": v.id, "start": v.start, "end": v.end, "capacity": v.capacity,
         "ready_time": v.ready_time}
        for v in inst.vehicles
    ]
    requests = []
    for r in inst.requests:
        d = {"id": r.id, "origin": r.origin, "destination": r.destination, "size": r.size,
             "release": r.release}
        if r.pickup_window is not None:
            d["pickup_window"] = _window_out(r.pickup_window)
        if r.dropoff_window is not None:
            d["dropoff_window"] = _window_out(r.dropoff_window)
        requests.append(d)
    return {"network": net, "vehicles": vehicles, "requests": requests,
            "params": asdict(inst.params)}


def save_instance(inst: Instance, path: str | Path, network_ref: dict | None = None) -> Path:
    """Write ``inst`` as JSON.  The network is embedded unless a ``{"path", "format"}`` reference is given."""
    path = Path(path)
    path.write_text(json.dumps(instance_to_dict(inst, network_ref), indent=1) + "\n")
    return path


def instance_from_dict(data: dict, base_dir: Path | None = None) -> Instance:
    try:
        net_block = data["network"]
        if "path" in net_block:
            p = Path(net_block["path"])
            if not p.is_absolute() and base_dir is not None:
                p = base_dir / p
            net = load_network(p, net_block.get("format", "native"),
                               remove_centroids=net_block.get("remove_centroids", False),
                               length_scale=net_block.get("length_scale", 1.0))
            source = dict(net_block)
        else:
            net = network_from_native(net_block)
            source = None
        vehicles = [Vehicle(id=v["id"], start=v["start"], end=v.get("end"),
                            capacity=v["capacity"], ready_time=v.get("ready_time", 0.0))
                    for v in data["vehicles"]]
        requests = [Request(id=r["id"], origin=r["origin"], destination=r["destination"],
                            size=r.get("size", 1), release=r.get("release", 0.0),
                            pickup_window=_window_in(r.get("pickup_window")),
                            dropoff_window=_window_in(r.get("dropoff_window")))
                    for r in data["requests"]]
        params = Parameters(**data.get("params", {}))
    except KeyError as exc:
        raise InstanceError(f"instance file is missing field {exc}") from exc
    return Instance(net, vehicles, requests, params, source)


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    return instance_from_dict(json.loads(path.read_text()), path.parent)


# --------------------------------------------------------------------------- generation


@dataclass(frozen=True)
class GenerationRanges:
    weights: tuple[tuple[float, float], ...] = ((1.0, 1.0), (3.0, 1.0))
    platoon_length: tuple[int, ...] = (4, 5, 6, 7)
    capacity: tuple[int, ...] = (4, 5, 6, 7)
    eta: tuple[float, ...] = (0.05, 0.06, 0.07, 0.08, 0.09, 0.10)
    party_size: tuple[int, ...] = (1, 2, 3, 4)
    cluster_radius: float = 1.5


def generate_instance(net: Network, n_vehicles: int, n_requests: int, spatial: str = "U",
                      temporal: str = "zero", seed: int = 0,
                      ranges: GenerationRanges = GenerationRanges(),
                      phi: float = 1.0, n_max: int = 4) -> Instance:
    """Random scenario instance.

    Draw order, all from one ``numpy.random.default_rng(seed)`` stream:
    weight pair, platoon length u, vehicle capacity, saving rate, cluster
    centers, then per vehicle its start node, then per request its origin,
    destination, party size and in-system time.
    """
    if n_vehicles <= 0 or n_requests <= 0:
        raise ValueError("need at least one vehicle and one request")
    if spatial not in SPATIAL_MODES:
        raise ValueError(f"unknown spatial mode {spatial!r}; expected one of {SPATIAL_MODES}")
    if temporal not in TEMPORAL_MODES:
        raise ValueError(f"unknown temporal mode {temporal!r}; expected one of {TEMPORAL_MODES}")
    rng = np.random.default_rng(seed)
    alpha, beta = ranges.weights[int(rng.integers(len(ranges.weights)))]
    u = int(ranges.platoon_length[int(rng.integers(len(ranges.platoon_length)))])
    cap = int(ranges.capacity[int(rng.integers(len(ranges.capacity)))])
    eta = float(ranges.eta[int(rng.integers(len(ranges.eta)))])
    params = Parameters(alpha=float(alpha), beta=float(beta), eta=eta, u=u, phi=phi,
                        n_max=n_max, seed=int(seed))

    n = net.n_nodes
    n_centers = CLUSTER_COUNT[spatial]
    if n_centers:
        centers = [int(c) + 1 for c in rng.choice(n, size=min(n_centers, n), replace=False)]
        dist = net.shortest_paths.dist
        balls = [np.flatnonzero(dist[c, 1:] <= ranges.cluster_radius) + 1 for c in centers]
    else:
        centers, balls = [], []

    def draw(exclude: int | None = None) -> int:
        if not n_centers:
            while True:
                node = int(rng.integers(n)) + 1
                if node != exclude:
                    return node
        c = int(rng.integers(len(centers)))
        ball = balls[c]
        if exclude is not None:
            ball = ball[ball != exclude]
            if ball.size == 0:
                ball = _fallback_ball(balls, c, exclude, net)
        return int(ball[int(rng.integers(ball.size))])

    vehicles = [Vehicle(id=k + 1, start=draw(), capacity=cap) for k in range(n_vehicles)]
    lo, hi = TEMPORAL_RANGE[temporal]
    requests = []
    for r in range(n_requests):
        o = draw()
        d = draw(exclude=o)
        q = int(ranges.party_size[int(rng.integers(len(ranges.party_size)))])
        t = float(rng.uniform(lo, hi)) if hi > lo else 0.0
        requests.append(Request(id=r + 1, origin=o, destination=d, size=q, release=t))
    return Instance(net, vehicles, requests, params)


def _fallback_ball(balls, c, exclude, net):
    # the chosen cluster is the single node `exclude`: try the other clusters, then the nearest node
    for b in balls[c + 1:] + balls[:c]:
        b = b[b != exclude]
        if b.size:
            return b
    row = net.shortest_paths.dist[exclude].copy()
    row[0] = row[exclude] = np.inf
    return np.array([int(np.argmin(row))])


def cluster_centers(inst_seed: int, net: Network, spatial: str,
                    ranges: GenerationRanges = GenerationRanges()) -> list[int]:
    """Replay the generator's draws up to the cluster centers for ``inst_seed``."""
    rng = np.random.default_rng(inst_seed)
    rng.integers(len(ranges.weights))
    rng.integers(len(ranges.platoon_length))
    rng.integers(len(ranges.capacity))
    rng.integers(len(ranges.eta))
    k = CLUSTER_COUNT[spatial]
    if not k:
        return []
    return [int(c) + 1 for c in rng.choice(net.n_nodes, size=min(k, net.n_nodes), replace=False)]
