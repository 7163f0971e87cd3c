"""Solo-mode construction by cheapest sequential insertion."""
from __future__ import annotations

import logging

from ..instance import Instance, Vehicle
from ..schedule import DROPOFF, PICKUP, Plan, route_from_keys

log = logging.getLogger(__name__)

EPS = 1e-9

Seq = list  # list of (node, kind, request id)


class InsertionError(RuntimeError):
    pass


def evaluate_sequence(inst: Instance, v: Vehicle, seq: Seq,
                      check_capacity: bool = True) -> tuple[bool, float, float]:
    """Feasibility, travel distance and passenger time of one solo vehicle.

    Mirrors the schedule evaluator for a route without platoons: keys at the
    same node as the previous key share one stop (and one arrival time).
    """
    tables = inst.tables
    D, T = tables.D, tables.T
    req = inst.request_by_id
    cur = v.start
    arr = v.ready_time
    dist = 0.0
    pax = 0.0
    load = 0
    cap = v.capacity
    ok = True
    i = 0
    n = len(seq)
    while i < n:
        node = seq[i][0]
        if node != cur:
            dist += D[cur][node]
            arr += T[cur][node]
        # the stop's keys and its earliest arrival
        j = i
        bound = None
        while j < n and seq[j][0] == node:
            r = req[seq[j][2]]
            if seq[j][1] == PICKUP:
                b = r.release
                if r.pickup_window is not None and r.pickup_window[0] > b:
                    b = r.pickup_window[0]
            elif r.dropoff_window is not None:
                b = r.dropoff_window[0]
            else:
                b = None
            if b is not None and (bound is None or b > bound):
                bound = b
            j += 1
        if bound is not None and bound > arr:
            arr = bound
        for _, kind, rid in seq[i:j]:
            r = req[rid]
            if kind == PICKUP:
                load += r.size
                if r.pickup_window is not None and arr > r.pickup_window[1] + EPS:
                    ok = False
            else:
                load -= r.size
                pax += r.size * (arr - r.release)
                if r.dropoff_window is not None and arr > r.dropoff_window[1] + EPS:
                    ok = False
        if check_capacity and load > cap:
            ok = False
        cur = node
        i = j
    return ok, dist, pax


def sequence_total(inst: Instance, v: Vehicle, seq: Seq, check_capacity: bool = True):
    ok, d, p = evaluate_sequence(inst, v, seq, check_capacity)
    return ok, inst.params.alpha * d + inst.params.beta * p


def insert_request(inst: Instance, v: Vehicle, seq: Seq, rid: int, check_capacity: bool = True):
    """Cheapest feasible ``(increase, i, j, new_seq)`` for request ``rid`` in ``seq``, or ``None``."""
    r = inst.request_by_id[rid]
    ok0, base = sequence_total(inst, v, seq, check_capacity=False)
    pick = (r.origin, PICKUP, rid)
    drop = (r.destination, DROPOFF, rid)
    best = None
    n = len(seq)
    # an insertion never makes an arrival earlier, so alpha times the distance
    # detour bounds the increase from below and lets hopeless slots be skipped
    D = inst.tables.D
    alpha = inst.params.alpha
    o, d = r.origin, r.destination
    nodes = [v.start] + [key[0] for key in seq]
    margin = 1e-9 * max(1.0, abs(base))

    def detour(p, x):  # extra distance for visiting x between keys p-1 and p
        a = nodes[p]
        return D[a][x] if p == n else D[a][x] + D[x][nodes[p + 1]] - D[a][nodes[p + 1]]

    pick_cost = [detour(p, o) for p in range(n + 1)]
    drop_cost = [detour(p, d) for p in range(n + 1)]
    for i in range(n + 1):
        head = seq[:i] + [pick]
        a = nodes[i]
        for j in range(i, n + 1):
            if best is not None:
                if j == i:
                    extra = D[a][o] + D[o][d] - (0.0 if i == n else D[a][nodes[i + 1]])
                    if i < n:
                        extra += D[d][nodes[i + 1]]
                else:
                    extra = pick_cost[i] + drop_cost[j]
                if alpha * extra - margin >= best[0] - EPS:
                    continue
            cand = head + seq[i:j] + [drop] + seq[j:]
            ok, tot = sequence_total(inst, v, cand, check_capacity)
            if not ok:
                continue
            inc = tot - base
            if best is None or inc < best[0] - EPS:
                best = (inc, i, j, cand)
    return best


def solo_sequences(inst: Instance) -> dict[int, Seq]:
    """Insert requests by (in-system time, id) at the cheapest (vehicle, pickup, dropoff) slot."""
    seqs: dict[int, Seq] = {v.id: [] for v in inst.vehicles}
    vehicles = sorted(inst.vehicles, key=lambda v: v.id)
    for r in sorted(inst.requests, key=lambda r: (r.release, r.id)):
        best = None
        for v in vehicles:
            found = insert_request(inst, v, seqs[v.id], r.id)
            if found is not None and (best is None or found[0] < best[0] - EPS):
                best = (found[0], v.id, found[3])
        if best is None:
            raise InsertionError(f"request {r.id} cannot be inserted into any vehicle "
                                 f"(size {r.size}, capacities "
                                 f"{sorted({v.capacity for v in vehicles})})")
        seqs[best[1]] = best[2]
    return seqs


def _without(seq: Seq, rid: int) -> Seq:
    return [key for key in seq if key[2] != rid]


def improve_sequences(inst: Instance, seqs: dict[int, Seq], max_passes: int = 50) -> dict[int, Seq]:
    """Relocate and exchange requests between routes while the total cost drops.

    Relocate moves one request to its cheapest slot in any route; exchange
    swaps two requests between two routes.  Moves are scanned in a fixed
    order and the first improving one is applied.
    """
    seqs = {k: list(v) for k, v in seqs.items()}
    veh = inst.vehicle_by_id
    cost = {k: sequence_total(inst, veh[k], seqs[k])[1] for k in seqs}
    owner = {r: k for k, seq in seqs.items() for _, kind, r in seq if kind == PICKUP}
    vids = sorted(seqs)

    def better(new, old):
        return new < old - EPS * max(1.0, abs(old))

    for _ in range(max_passes):
        moved = False
        for rid in sorted(owner):
            k = owner[rid]
            rest = _without(seqs[k], rid)
            rest_cost = sequence_total(inst, veh[k], rest, check_capacity=False)[1]
            best = None
            for m in vids:
                base = rest if m == k else seqs[m]
                found = insert_request(inst, veh[m], base, rid)
                if found is None:
                    continue
                if m == k:
                    delta = rest_cost + found[0] - cost[k]
                else:
                    delta = rest_cost - cost[k] + found[0]
                if best is None or delta < best[0] - EPS:
                    best = (delta, m, found[3])
            if best is not None and better(best[0], 0.0) and best[1] != k:
                delta, m, new = best
                seqs[k], seqs[m] = rest, new
                cost[k] = sequence_total(inst, veh[k], rest)[1]
                cost[m] = sequence_total(inst, veh[m], new)[1]
                owner[rid] = m
                moved = True
            elif best is not None and better(best[0], 0.0):
                seqs[k] = best[2]
                cost[k] = sequence_total(inst, veh[k], best[2])[1]
                moved = True
        rids = sorted(owner)
        for i, r1 in enumerate(rids):
            for r2 in rids[i + 1:]:
                k1, k2 = owner[r1], owner[r2]
                if k1 == k2:
                    continue
                a = insert_request(inst, veh[k1], _without(seqs[k1], r1), r2)
                if a is None:
                    continue
                b = insert_request(inst, veh[k2], _without(seqs[k2], r2), r1)
                if b is None:
                    continue
                ca = sequence_total(inst, veh[k1], a[3])[1]
                cb = sequence_total(inst, veh[k2], b[3])[1]
                if better(ca + cb, cost[k1] + cost[k2]):
                    seqs[k1], seqs[k2] = a[3], b[3]
                    cost[k1], cost[k2] = ca, cb
                    owner[r1], owner[r2] = k2, k1
                    moved = True
        if not moved:
            break
    return seqs


def plan_from_sequences(inst: Instance, seqs: dict[int, Seq]) -> Plan:
    routes = {}
    for v in inst.vehicles:
        keys = [(n, [(kind, r)]) for n, kind, r in seqs.get(v.id, [])]
        routes[v.id] = route_from_keys(inst, v.start, keys)
    return Plan(routes)


def solo_routes(inst: Instance, improve: bool = True) -> dict[int, Seq]:
    seqs = solo_sequences(inst)
    return improve_sequences(inst, seqs) if improve else seqs


def solve_solo(inst: Instance, improve: bool = True) -> Plan:
    """Solo plan by cheapest insertion, then relocate/exchange improvement unless disabled."""
    return plan_from_sequences(inst, solo_routes(inst, improve))
