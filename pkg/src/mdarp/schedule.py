"""Plans, synchronized timelines, feasibility reports and the weighted objective.

A plan route is a full walk in the base network: consecutive stops are
distinct nodes joined by an arc.  Stops without actions are pass-through
nodes.  Keeping every node explicit makes platoon paths, transfer arcs and
per-arc capacity directly checkable.

Timing semantics:

* a vehicle arrives at its first stop at ``max(ready time, earliest pickup)``
  and departs every stop as early as allowed;
* all members of a platoon leave the tail of each shared arc together, so an
  early member dwells (with its passengers) until the last one is ready;
* pickup and dropoff times are the vehicle's arrival at the stop; a pickup
  before the request's in-system time is avoided by dwelling at the
  previous stop;
* join, split and transfer operations take no time.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .instance import Instance

PICKUP, DROPOFF, JOIN, SPLIT = "pickup", "dropoff", "join", "split"
ACTION_KINDS = (PICKUP, DROPOFF, JOIN, SPLIT)


class PlanError(ValueError):
    """Structural problem: the plan cannot be timed at all."""


class InfeasiblePlanError(ValueError):
    def __init__(self, report: "FeasibilityReport"):
        self.report = report
        super().__init__("plan is infeasible; see check_feasibility: "
                         + "; ".join(v.message for v in report.violations[:5]))


@dataclass(frozen=True)
class Stop:
    node: int
    actions: tuple[tuple[str, int], ...] = ()

    def has(self, kind: str, ref: int | None = None) -> bool:
        return any(a[0] == kind and (ref is None or a[1] == ref) for a in self.actions)

    @property
    def is_service(self) -> bool:
        return any(a[0] in (PICKUP, DROPOFF) for a in self.actions)


@dataclass(frozen=True)
class PlatoonSegment:
    members: tuple[int, ...]
    path: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))
        object.__setattr__(self, "path", tuple(self.path))
        if len(self.members) < 2 or len(set(self.members)) != len(self.members):
            raise PlanError(f"platoon needs at least two distinct members, got {self.members}")
        if len(self.path) < 2:
            raise PlanError("platoon path needs at least one arc")


@dataclass(frozen=True)
class TransferRecord:
    """Handover of ``request`` from ``from_vehicle`` to ``to_vehicle`` at the tail of ``arc``.

    ``platoon`` optionally pins which platoon's traversal of the arc is meant
    when a walk uses the same arc more than once.
    """

    request: int
    from_vehicle: int
    to_vehicle: int
    arc: tuple[int, int]
    platoon: int | None = None


@dataclass
class Plan:
    routes: dict[int, tuple[Stop, ...]]
    platoons: dict[int, PlatoonSegment] = field(default_factory=dict)
    transfers: tuple[TransferRecord, ...] = ()

    def __post_init__(self):
        self.routes = {k: tuple(v) for k, v in self.routes.items()}
        self.transfers = tuple(self.transfers)

    def walk(self, k: int) -> list[int]:
        return [s.node for s in self.routes[k]]

    def __eq__(self, other):
        if not isinstance(other, Plan):
            return NotImplemented
        return (self.routes == other.routes and self.platoons == other.platoons
                and self.transfers == other.transfers)


@dataclass
class Timeline:
    arrival: dict[int, tuple[float, ...]]
    dwell: dict[int, tuple[float, ...]]
    pickup_time: dict[int, float]
    dropoff_time: dict[int, float]
    layout: "Layout" = field(repr=False, compare=False, default=None)
    # departures are kept as computed so synchronized members compare exactly
    departures: dict[int, tuple[float, ...]] = field(repr=False, compare=False, default=None)

    def departure(self, k: int, pos: int) -> float:
        if self.departures is not None and pos < len(self.departures[k]):
            return self.departures[k][pos]
        return self.arrival[k][pos] + self.dwell[k][pos]


@dataclass(frozen=True)
class CostBreakdown:
    vehicle_travel_cost: float
    passenger_service_time: float
    alpha: float
    beta: float

    @property
    def total(self) -> float:
        return self.alpha * self.vehicle_travel_cost + self.beta * self.passenger_service_time

    def as_dict(self) -> dict:
        return {"vehicle_travel_cost": self.vehicle_travel_cost,
                "passenger_service_time": self.passenger_service_time,
                "alpha": self.alpha, "beta": self.beta, "total": self.total}


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str


@dataclass
class FeasibilityReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


# --------------------------------------------------------------------------- layout


@dataclass
class Layout:
    """Structural analysis of a plan shared by timing, checking and costing."""

    walks: dict[int, list[int]]
    arc_dist: dict[int, list[float]]
    arc_time: dict[int, list[float]]
    group_of: dict[tuple[int, int], int]          # departure event -> group id
    groups: list[list[tuple[int, int]]]
    spans: dict[tuple[int, int], tuple[int, int]]  # (platoon, vehicle) -> (join pos, split pos)
    pickups: dict[int, tuple[int, int]]
    dropoffs: dict[int, tuple[int, int]]
    carried: dict[int, list[tuple[int, int]]]      # request -> departure events carrying it
    transfer_violations: list[str]
    bounds: dict[tuple[int, int], float]           # (vehicle, pos) -> earliest arrival

    def partners(self, k: int, p: int) -> int:
        g = self.group_of.get((k, p))
        return 0 if g is None else len(self.groups[g]) - 1


def plan_layout(inst: Instance, plan: Plan) -> Layout:
    net = inst.network
    walks: dict[int, list[int]] = {}
    arc_dist: dict[int, list[float]] = {}
    arc_time: dict[int, list[float]] = {}
    for v in inst.vehicles:
        route = plan.routes.get(v.id)
        if not route:
            raise PlanError(f"vehicle {v.id} has no route")
        if route[0].node != v.start:
            raise PlanError(f"route of vehicle {v.id} starts at {route[0].node}, not {v.start}")
        w = [s.node for s in route]
        ds, ts = [], []
        for p, (a, b) in enumerate(zip(w, w[1:])):
            key = (a, b) if a < b else (b, a)
            arc = net.arcs.get(key)
            if arc is None:
                raise PlanError(f"vehicle {v.id}: stops {p} and {p + 1} ({a}, {b}) are not adjacent")
            ds.append(arc[0])
            ts.append(arc[1])
        walks[v.id] = w
        arc_dist[v.id] = ds
        arc_time[v.id] = ts
    extra = set(plan.routes) - set(walks)
    if extra:
        raise PlanError(f"routes for unknown vehicles {sorted(extra)}")

    # actions
    pickups: dict[int, tuple[int, int]] = {}
    dropoffs: dict[int, tuple[int, int]] = {}
    joins: dict[tuple[int, int], int] = {}
    splits: dict[tuple[int, int], int] = {}
    for k, route in plan.routes.items():
        for pos, stop in enumerate(route):
            for kind, ref in stop.actions:
                if kind == PICKUP or kind == DROPOFF:
                    table = pickups if kind == PICKUP else dropoffs
                    if ref in table:
                        raise PlanError(f"request {ref} has more than one {kind}")
                    r = inst.request_by_id.get(ref)
                    if r is None:
                        raise PlanError(f"{kind} of unknown request {ref}")
                    want = r.origin if kind == PICKUP else r.destination
                    if stop.node != want:
                        raise PlanError(f"{kind} of request {ref} at node {stop.node}, expected {want}")
                    table[ref] = (k, pos)
                elif kind == JOIN or kind == SPLIT:
                    table = joins if kind == JOIN else splits
                    if (ref, k) in table:
                        raise PlanError(f"vehicle {k} has two {kind} actions for platoon {ref}")
                    table[(ref, k)] = pos
                else:
                    raise PlanError(f"unknown action {kind!r}")
    for r in inst.requests:
        if r.id not in pickups or r.id not in dropoffs:
            raise PlanError(f"request {r.id} lacks a pickup or a dropoff")

    # platoon spans and departure groups (union-find over departure events)
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    spans: dict[tuple[int, int], tuple[int, int]] = {}
    owner: dict[tuple[int, int], int] = {}
    for pid, seg in plan.platoons.items():
        n_arcs = len(seg.path) - 1
        for k in seg.members:
            if k not in walks:
                raise PlanError(f"platoon {pid} names unknown vehicle {k}")
            x = joins.pop((pid, k), None)
            y = splits.pop((pid, k), None)
            if x is None or y is None:
                raise PlanError(f"vehicle {k} lacks the join or split of platoon {pid}")
            if y - x != n_arcs or walks[k][x:y + 1] != list(seg.path):
                raise PlanError(f"vehicle {k} does not traverse the path of platoon {pid}")
            spans[(pid, k)] = (x, y)
            for o in range(n_arcs):
                ev = (k, x + o)
                if ev in owner:
                    raise PlanError(f"vehicle {k} is in platoons {owner[ev]} and {pid} on one arc")
                owner[ev] = pid
                parent.setdefault(ev, ev)
        lead = seg.members[0]
        lx = spans[(pid, lead)][0]
        for k in seg.members[1:]:
            kx = spans[(pid, k)][0]
            for o in range(n_arcs):
                ra, rb = find((lead, lx + o)), find((k, kx + o))
                if ra != rb:
                    parent[ra] = rb
    leftovers = list(joins) + list(splits)
    if leftovers:
        pid, k = leftovers[0]
        raise PlanError(f"vehicle {k} has a join/split for platoon {pid} it is not a member of")
    by_root: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    for ev in sorted(parent):
        by_root[find(ev)].append(ev)
    groups: list[list[tuple[int, int]]] = []
    group_of: dict[tuple[int, int], int] = {}
    for members in sorted(by_root.values()):
        vs = [k for k, _ in members]
        if len(set(vs)) != len(vs):
            raise PlanError(f"vehicle appears twice in one synchronized platoon group {members}")
        for ev in members:
            group_of[ev] = len(groups)
        groups.append(members)

    # carry chains
    by_request: dict[int, list[TransferRecord]] = defaultdict(list)
    for t in plan.transfers:
        if t.request not in inst.request_by_id:
            raise PlanError(f"transfer of unknown request {t.request}")
        by_request[t.request].append(t)
    carried: dict[int, list[tuple[int, int]]] = {}
    violations: list[str] = []
    for r in inst.requests:
        k, cur = pickups[r.id]
        events: list[tuple[int, int]] = []
        for t in by_request.get(r.id, ()):
            if t.from_vehicle != k:
                raise PlanError(f"transfer of request {r.id} from vehicle {t.from_vehicle}, "
                                f"but it is aboard vehicle {k}")
            if t.to_vehicle not in walks or t.to_vehicle == k:
                raise PlanError(f"transfer of request {r.id} to invalid vehicle {t.to_vehicle}")
            p, q, ok = _locate_transfer(t, k, cur, walks, spans, group_of)
            if p is None:
                raise PlanError(f"vehicle {k} does not traverse transfer arc {t.arc} "
                                f"for request {r.id} after its pickup")
            if q is None:
                raise PlanError(f"vehicle {t.to_vehicle} never traverses transfer arc {t.arc}")
            if not ok:
                violations.append(f"transfer of request {r.id} from vehicle {k} to "
                                  f"{t.to_vehicle} on arc {t.arc} where they are not platooned")
            events.extend((k, i) for i in range(cur, p))
            k, cur = t.to_vehicle, q
        dk, dpos = dropoffs[r.id]
        if dk != k:
            raise PlanError(f"request {r.id} is dropped off by vehicle {dk} but carried by {k}")
        if dpos <= cur:
            raise PlanError(f"request {r.id} is dropped off before it is on board")
        events.extend((k, i) for i in range(cur, dpos))
        carried[r.id] = events

    bounds: dict[tuple[int, int], float] = {}
    for r in inst.requests:
        lo = r.release
        if r.pickup_window is not None:
            lo = max(lo, r.pickup_window[0])
        key = pickups[r.id]
        bounds[key] = max(bounds.get(key, 0.0), lo)
        if r.dropoff_window is not None:
            key = dropoffs[r.id]
            bounds[key] = max(bounds.get(key, 0.0), r.dropoff_window[0])
    return Layout(walks, arc_dist, arc_time, group_of, groups, spans, pickups, dropoffs,
                  carried, violations, bounds)


def _locate_transfer(t: TransferRecord, k: int, cur: int, walks, spans, group_of):
    """Positions of the handover in the giver's and receiver's walks, and whether they are platooned."""
    i, j = t.arc
    wk = walks[k]
    wm = walks[t.to_vehicle]
    cand = [p for p in range(cur, len(wk) - 1) if wk[p] == i and wk[p + 1] == j]
    if t.platoon is not None:
        sk = spans.get((t.platoon, k))
        sm = spans.get((t.platoon, t.to_vehicle))
        if sk is not None and sm is not None:
            for p in cand:
                if sk[0] <= p < sk[1]:
                    return p, sm[0] + (p - sk[0]), True
    for p in cand:
        g = group_of.get((k, p))
        if g is None:
            continue
        for q in range(len(wm) - 1):
            if group_of.get((t.to_vehicle, q)) == g:
                return p, q, True
    p = cand[0] if cand else None
    qs = [q for q in range(len(wm) - 1) if wm[q] == i and wm[q + 1] == j]
    return p, (qs[0] if qs else None), False


# --------------------------------------------------------------------------- timeline


def build_timeline(inst: Instance, plan: Plan, layout: Layout | None = None) -> Timeline:
    """Earliest-feasible synchronized timeline for ``plan``."""
    lay = layout or plan_layout(inst, plan)
    walks = lay.walks
    arr = {k: [0.0] * len(w) for k, w in walks.items()}
    dep = {k: [0.0] * max(len(w) - 1, 0) for k, w in walks.items()}
    bounds = lay.bounds
    # Process each vehicle's departures in order; a synchronized group fires
    # once every member has reached its event (Kahn's algorithm on groups).
    next_pos = {k: 0 for k in walks}
    waiting = [0] * len(lay.groups)
    ready: list = []
    for v in inst.vehicles:
        k = v.id
        arr[k][0] = max(v.ready_time, bounds.get((k, 0), 0.0))
    frontier = list(walks)
    fired = 0
    total_events = sum(len(d) for d in dep.values())

    def advance(k):
        # fire solo departures of k until it reaches a grouped event or its end
        nonlocal fired
        w = walks[k]
        p = next_pos[k]
        while p < len(w) - 1:
            g = lay.group_of.get((k, p))
            if g is not None:
                waiting[g] += 1
                if waiting[g] == len(lay.groups[g]):
                    ready.append(g)
                next_pos[k] = p
                return
            tau = lay.arc_time[k][p]
            a = arr[k][p] + tau
            b = bounds.get((k, p + 1))
            if b is not None and b > a:
                a = b
            arr[k][p + 1] = a
            dep[k][p] = max(arr[k][p], a - tau)
            fired += 1
            p += 1
        next_pos[k] = p

    def _earliest(k, p):
        t = arr[k][p]
        b = bounds.get((k, p + 1))
        if b is not None:
            t = max(t, b - lay.arc_time[k][p])
        return t

    for k in frontier:
        advance(k)
    while ready:
        g = ready.pop()
        members = lay.groups[g]
        t = max(_earliest(k, p) for k, p in members)
        for k, p in members:
            dep[k][p] = t
            arr[k][p + 1] = t + lay.arc_time[k][p]
            fired += 1
            next_pos[k] = p + 1
        for k, _ in members:
            advance(k)
    if fired != total_events:
        stuck = sorted({k for k in walks if next_pos[k] < len(walks[k]) - 1})
        raise PlanError(f"cyclic platoon wait dependency among vehicles {stuck}")

    arrival = {k: tuple(a) for k, a in arr.items()}
    dwell = {k: tuple([d - a for d, a in zip(dep[k], arr[k])] + [0.0]) for k in walks}
    pickup_time = {r: arrival[k][p] for r, (k, p) in lay.pickups.items()}
    dropoff_time = {r: arrival[k][p] for r, (k, p) in lay.dropoffs.items()}
    return Timeline(arrival, dwell, pickup_time, dropoff_time, lay,
                    {k: tuple(d) for k, d in dep.items()})


# --------------------------------------------------------------------------- feasibility


def check_feasibility(inst: Instance, plan: Plan, timeline: Timeline | None = None,
                      tol: float = 1e-9) -> FeasibilityReport:
    if timeline is None:
        timeline = build_timeline(inst, plan)
    lay = timeline.layout if timeline.layout is not None else plan_layout(inst, plan)
    out: list[Violation] = []
    u = inst.params.u
    for members in lay.groups:
        if len(members) > u:
            k, p = members[0]
            a = lay.walks[k][p], lay.walks[k][p + 1]
            out.append(Violation("platoon_length",
                                 f"{len(members)} vehicles platooned on arc {a}, limit u={u}"))
    load: dict[tuple[int, int], int] = defaultdict(int)
    for r in inst.requests:
        for ev in lay.carried[r.id]:
            load[ev] += r.size
    for k, w in lay.walks.items():
        cap = inst.vehicle_by_id[k].capacity
        for p in range(len(w) - 1):
            if (k, p) in lay.group_of:
                continue
            if load.get((k, p), 0) > cap:
                out.append(Violation("capacity", f"vehicle {k} carries {load[(k, p)]} > {cap} "
                                                 f"passengers on arc ({w[p]}, {w[p + 1]})"))
    for members in lay.groups:
        tot = sum(load.get(ev, 0) for ev in members)
        cap = sum(inst.vehicle_by_id[k].capacity for k, _ in members)
        if tot > cap:
            k, p = members[0]
            out.append(Violation("capacity",
                                 f"platoon of vehicles {[m for m, _ in members]} carries {tot} > "
                                 f"{cap} passengers on arc ({lay.walks[k][p]}, {lay.walks[k][p + 1]})"))
    for msg in lay.transfer_violations:
        out.append(Violation("transfer", msg))
    for members in lay.groups:
        deps = {timeline.departure(k, p) for k, p in members}
        arrs = {timeline.arrival[k][p + 1] for k, p in members}
        if len(deps) > 1 or len(arrs) > 1:
            out.append(Violation("sync", f"platoon members {members} are not synchronized"))
    for r in inst.requests:
        tp = timeline.pickup_time[r.id]
        td = timeline.dropoff_time[r.id]
        if tp < r.release - tol:
            out.append(Violation("release", f"request {r.id} picked up at {tp:g} before "
                                            f"its in-system time {r.release:g}"))
        for name, w, t in (("pickup", r.pickup_window, tp), ("dropoff", r.dropoff_window, td)):
            if w is not None and not (w[0] - tol <= t <= w[1] + tol):
                out.append(Violation("window", f"request {r.id} {name} at {t:g} outside "
                                               f"[{w[0]:g}, {w[1]:g}]"))
    return FeasibilityReport(out)


# --------------------------------------------------------------------------- cost


def vehicle_cost(inst: Instance, lay: Layout) -> float:
    params = inst.params
    total = 0.0
    for k, ds in lay.arc_dist.items():
        for p, d in enumerate(ds):
            n = lay.partners(k, p)
            total += d * (1.0 - params.saving_rate(n)) if n else d
    return total


def passenger_time(inst: Instance, timeline: Timeline) -> float:
    return sum(r.size * (timeline.dropoff_time[r.id] - r.release) for r in inst.requests)


def evaluate_cost(inst: Instance, plan: Plan, timeline: Timeline | None = None,
                  check: bool = True) -> CostBreakdown:
    if timeline is None:
        timeline = build_timeline(inst, plan)
    if check:
        report = check_feasibility(inst, plan, timeline)
        if not report.ok:
            raise InfeasiblePlanError(report)
    lay = timeline.layout if timeline.layout is not None else plan_layout(inst, plan)
    return CostBreakdown(vehicle_cost(inst, lay), passenger_time(inst, timeline),
                         inst.params.alpha, inst.params.beta)


def evaluate(inst: Instance, plan: Plan) -> tuple[Timeline, FeasibilityReport, CostBreakdown]:
    """Timeline, feasibility report and cost (cost computed even when infeasible)."""
    tl = build_timeline(inst, plan)
    rep = check_feasibility(inst, plan, tl)
    return tl, rep, evaluate_cost(inst, plan, tl, check=False)


def try_total(inst: Instance, plan: Plan) -> float | None:
    """Weighted total of a feasible plan, or ``None`` if it is infeasible or malformed."""
    try:
        tl, rep, cost = evaluate(inst, plan)
    except PlanError:
        return None
    return cost.total if rep.ok else None


def cost_difference(solo_total: float, modular_total: float) -> float:
    """Signed percentage change of modular against solo; negative means modular is cheaper."""
    if not solo_total > 0:
        raise ValueError(f"solo total must be positive, got {solo_total}")
    return (modular_total - solo_total) / solo_total * 100.0


# --------------------------------------------------------------------------- construction helpers


def route_from_keys(inst: Instance, start: int, keys: Sequence[tuple[int, Iterable]]) -> tuple[Stop, ...]:
    """Full-walk route visiting ``keys`` (``(node, actions)``) along stored shortest paths.

    Consecutive keys at the same node are merged into one stop.
    """
    tables = inst.tables
    stops: list[list] = [[start, []]]
    for node, actions in keys:
        if node != stops[-1][0]:
            for n in tables.path(stops[-1][0], node)[1:]:
                stops.append([n, []])
        stops[-1][1].extend(actions)
    return tuple(Stop(n, tuple(a)) for n, a in stops)


def solo_route(inst: Instance, k: int, key_nodes: Sequence[tuple[int, str, int]]) -> tuple[Stop, ...]:
    """Route for vehicle ``k`` through ``(node, kind, request)`` keys."""
    v = inst.vehicle_by_id[k]
    return route_from_keys(inst, v.start, [(n, [(kind, r)]) for n, kind, r in key_nodes])


def strip_platoons(plan: Plan) -> Plan:
    """Same walks with every platoon (and transfer) removed."""
    routes = {k: tuple(Stop(s.node, tuple(a for a in s.actions if a[0] in (PICKUP, DROPOFF)))
                       for s in r) for k, r in plan.routes.items()}
    return Plan(routes, {}, ())


# --------------------------------------------------------------------------- JSON


def plan_to_dict(inst: Instance, plan: Plan, timeline: Timeline | None = None,
                 cost: CostBreakdown | None = None) -> dict:
    out: dict = {
        "routes": {str(k): [{"node": s.node, "actions": [list(a) for a in s.actions]}
                            for s in plan.routes[k]] for k in sorted(plan.routes)},
        "platoons": {str(p): {"members": list(seg.members), "path": list(seg.path)}
                     for p, seg in sorted(plan.platoons.items())},
        "transfers": [{"request": t.request, "from_vehicle": t.from_vehicle,
                       "to_vehicle": t.to_vehicle, "arc": list(t.arc), "platoon": t.platoon}
                      for t in plan.transfers],
    }
    if timeline is not None:
        out["timeline"] = {
            "vehicles": {str(k): {"arrival": list(timeline.arrival[k]),
                                  "dwell": list(timeline.dwell[k]),
                                  "departure": [timeline.departure(k, p)
                                                for p in range(len(timeline.arrival[k]) - 1)]}
                         for k in sorted(timeline.arrival)},
            "requests": {str(r): {"pickup": timeline.pickup_time[r],
                                  "dropoff": timeline.dropoff_time[r]}
                         for r in sorted(timeline.pickup_time)},
        }
    if cost is not None:
        out["costs"] = cost.as_dict()
    return out


def plan_from_dict(data: Mapping) -> Plan:
    routes = {int(k): tuple(Stop(s["node"], tuple((a[0], int(a[1])) for a in s["actions"]))
                            for s in stops) for k, stops in data["routes"].items()}
    platoons = {int(p): PlatoonSegment(tuple(v["members"]), tuple(v["path"]))
                for p, v in data.get("platoons", {}).items()}
    transfers = tuple(TransferRecord(t["request"], t["from_vehicle"], t["to_vehicle"],
                                     tuple(t["arc"]), t.get("platoon"))
                      for t in data.get("transfers", []))
    return Plan(routes, platoons, transfers)


def dump_plan(inst: Instance, plan: Plan, path, with_timeline: bool = True) -> None:
    tl = cost = None
    if with_timeline:
        tl = build_timeline(inst, plan)
        cost = evaluate_cost(inst, plan, tl, check=False)
    with open(path, "w") as fh:
        json.dump(plan_to_dict(inst, plan, tl, cost), fh, indent=1)
        fh.write("\n")


def load_plan(path) -> Plan:
    with open(path) as fh:
        return plan_from_dict(json.load(fh))
