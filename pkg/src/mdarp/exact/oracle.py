"""Exhaustive exact solver for tiny instances.

The search space: every request-to-vehicle assignment, every pickup-before-
dropoff ordering per vehicle, and optionally one platoon over any vehicle
subset, any ordered (join, split) node pair and every shortest path between
them, joined at any leg of each member's route.  At the split, every request
aboard a member may be handed to another member and dropped off at any later
position of its route.

Candidates are scored with a lightweight evaluator specialised to this shape;
the winner is re-evaluated by the schedule module, and a mismatch raises.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

from ..instance import Instance
from ..schedule import (DROPOFF, JOIN, PICKUP, SPLIT, CostBreakdown, Plan, PlatoonSegment,
                        TransferRecord, evaluate_cost)

log = logging.getLogger(__name__)

TOL = 1e-9


class OracleRefusal(ValueError):
    """Raised when an instance is too large to enumerate."""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class OracleLimits:
    max_vehicles: int = 2
    max_requests: int = 3
    max_stops: int = 8  # service keys plus join and split per route
    max_candidates: int | None = None  # join/split nodes; None means all eligible nodes
    max_enumeration: int = 5_000_000

    def __post_init__(self):
        for name in ("max_vehicles", "max_requests", "max_stops", "max_enumeration"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass
class OracleResult:
    plan: Plan
    cost: CostBreakdown
    evaluated: int


# --------------------------------------------------------------------------- enumeration pieces


def orderings(rids, inst: Instance):
    """Pickup-before-dropoff key orders of ``rids`` as ``(node, kind, request)`` tuples."""
    req = inst.request_by_id

    def rec(seq, open_, left):
        if not open_ and not left:
            yield tuple(seq)
            return
        for r in sorted(left):
            seq.append((req[r].origin, PICKUP, r))
            yield from rec(seq, open_ | {r}, left - {r})
            seq.pop()
        for r in sorted(open_):
            seq.append((req[r].destination, DROPOFF, r))
            yield from rec(seq, open_ - {r}, left)
            seq.pop()

    yield from rec([], frozenset(), frozenset(rids))


def n_orderings(n: int) -> int:
    return math.factorial(2 * n) // 2 ** n


def shortest_paths_between(inst: Instance, a: int, b: int) -> list[tuple[int, ...]]:
    """Every distance-shortest simple path from ``a`` to ``b``, sorted."""
    net = inst.network
    D = inst.tables.D
    target = D[a][b]
    adj = net.adjacency
    out = []

    def rec(path, dist):
        n = path[-1]
        if n == b:
            out.append(tuple(path))
            return
        for m, w, _ in adj[n]:
            d = dist + w
            # stay on the shortest-path DAG from a to b
            if abs(d + D[m][b] - target) <= TOL * max(1.0, target) and m not in path:
                path.append(m)
                rec(path, d)
                path.pop()

    rec([a], 0.0)
    return sorted(out)


def candidate_nodes(inst: Instance, seqs: dict[int, tuple], limits: OracleLimits) -> list[int]:
    nodes = list(range(1, inst.network.n_nodes + 1))
    if inst.network.n_nodes > 10:
        # nodes on shortest paths between consecutive route points, plus neighbours
        keep: set[int] = set()
        tables = inst.tables
        for v in inst.vehicles:
            pts = [v.start] + [n for n, _, _ in seqs.get(v.id, ())]
            for a, b in zip(pts, pts[1:]):
                keep.update(tables.path(a, b))
        for n in list(keep):
            keep.update(m for m, _, _ in inst.network.adjacency[n])
        nodes = sorted(keep)
    if limits.max_candidates is not None:
        nodes = nodes[:limits.max_candidates]
    return nodes


def estimate_size(inst: Instance, limits: OracleLimits, mode: str = "modular") -> int:
    """Rough count of candidate plans the enumeration would score."""
    K, R = len(inst.vehicles), len(inst.requests)
    N = inst.network.n_nodes if limits.max_candidates is None else min(limits.max_candidates,
                                                                        inst.network.n_nodes)
    seq_pairs = 0
    for counts in itertools.product(range(R + 1), repeat=K):
        if sum(counts) != R:
            continue
        ways = math.factorial(R)
        for c in counts:
            ways //= math.factorial(c)
        seq_pairs += ways * math.prod(n_orderings(c) for c in counts)
    if mode == "solo" or K < 2:
        return seq_pairs
    legs = (2 * R + 1) ** min(K, inst.params.u)
    subsets = 2 ** K - K - 1
    return seq_pairs * (1 + subsets * N * (N - 1) * legs * 2 ** R)


# --------------------------------------------------------------------------- fast evaluation


class LayoutScorer:
    """Scores a key layout with one optional platoon, mirroring the schedule semantics."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.D = inst.tables.D
        self.T = inst.tables.T
        self.req = inst.request_by_id
        self.veh = inst.vehicle_by_id
        p = inst.params
        self.alpha, self.beta = p.alpha, p.beta
        self.bound = {}
        for r in inst.requests:
            lo = r.release
            if r.pickup_window is not None:
                lo = max(lo, r.pickup_window[0])
            self.bound[(PICKUP, r.id)] = lo
            if r.dropoff_window is not None:
                self.bound[(DROPOFF, r.id)] = r.dropoff_window[0]

    def _stops(self, keys, lo, hi):
        """Group ``keys[lo:hi]`` into stops of consecutive same-node keys."""
        i = lo
        while i < hi:
            j = i + 1
            while j < hi and keys[j][0] == keys[i][0]:
                j += 1
            yield keys[i][0], keys[i:j]
            i = j

    def _service(self, acts, t, load, times, cap, check_cap):
        """Apply the actions at one stop at time ``t``; return the new load or ``None``."""
        for _, kind, r in acts:
            if kind == PICKUP:
                load += self.req[r].size
                times[(PICKUP, r)] = t
            elif kind == DROPOFF:
                load -= self.req[r].size
                times[(DROPOFF, r)] = t
        if check_cap and load > cap:
            return None
        return load

    def _bound(self, acts):
        b = None
        for _, kind, r in acts:
            x = self.bound.get((kind, r))
            if x is not None and (b is None or x > b):
                b = x
        return b

    def _run(self, k, keys, lo, hi, cur, t, load, times):
        """Solo stretch of vehicle ``k`` over ``keys[lo:hi]``; returns (node, time, load, dist)."""
        cap = self.veh[k].capacity
        D, T = self.D, self.T
        dist = 0.0
        for node, acts in self._stops(keys, lo, hi):
            if node != cur:
                dist += D[cur][node]
                t += T[cur][node]
            b = self._bound(acts)
            if b is not None and b > t:
                t = b
            load = self._service(acts, t, load, times, cap, True)
            if load is None:
                return None
            cur = node
        return cur, t, load, dist

    def score(self, seqs: dict[int, tuple], platoon=None, handovers=None):
        """Total cost, or ``None`` when infeasible.

        ``platoon`` is ``(members, path, path_dist, path_time, join_index)``
        where each member's keys hold a join marker at ``join_index[k]`` and
        the split marker right after it.  ``handovers`` maps a request to
        ``(giver, taker)``.
        """
        times: dict = {}
        dist_total = 0.0
        if platoon is None:
            for v in self.inst.vehicles:
                keys = seqs[v.id]
                res = self._run(v.id, keys, 0, len(keys), v.start, v.ready_time, 0, times)
                if res is None:
                    return None
                dist_total += res[3]
        else:
            members, path, pd, pt, ji = platoon
            handovers = handovers or {}
            state = {}
            for v in self.inst.vehicles:
                k = v.id
                keys = seqs[k]
                if k not in ji:
                    res = self._run(k, keys, 0, len(keys), v.start, v.ready_time, 0, times)
                    if res is None:
                        return None
                    dist_total += res[3]
                    continue
                # up to and including the join stop
                i = ji[k]
                lo = i
                while lo > 0 and keys[lo - 1][0] == keys[i][0]:
                    lo -= 1
                res = self._run(k, keys, 0, lo, v.start, v.ready_time, 0, times)
                if res is None:
                    return None
                cur, t, load, d = res
                node = keys[i][0]
                if node != cur:
                    d += self.D[cur][node]
                    t += self.T[cur][node]
                acts = keys[lo:i]
                b = self._bound(acts)
                if b is not None and b > t:
                    t = b
                # capacity on platoon arcs is pooled, checked below
                load = self._service(acts, t, load, times, 0, False)
                state[k] = (t, load, d)
                dist_total += d
            tj = max(state[k][0] for k in members)
            pooled = sum(state[k][1] for k in members)
            if pooled > sum(self.veh[k].capacity for k in members):
                return None
            # split stop: split marker plus following keys at the split node
            ends = {}
            bs = None
            for k in members:
                keys = seqs[k]
                si = ji[k] + 1
                hi = si + 1
                while hi < len(keys) and keys[hi][0] == keys[si][0]:
                    hi += 1
                ends[k] = hi
                b = self._bound(keys[si + 1:hi])
                if b is not None and (bs is None or b > bs):
                    bs = b
            ts = tj + pt
            if bs is not None and bs > ts:
                ts = bs
            rate = self.inst.params.saving_rate(len(members) - 1)
            dist_total += len(members) * pd * (1.0 - rate)
            for k in members:
                keys = seqs[k]
                si = ji[k] + 1
                shift = 0
                for r, (g, tk) in handovers.items():
                    if g == k:
                        shift -= self.req[r].size
                    if tk == k:
                        shift += self.req[r].size
                load = state[k][1] + shift
                load = self._service(keys[si + 1:ends[k]], ts, load, times,
                                     self.veh[k].capacity, ends[k] < len(keys))
                if load is None:
                    return None
                res = self._run(k, keys, ends[k], len(keys), keys[si][0], ts, load, times)
                if res is None:
                    return None
                dist_total += res[3]
        pax = 0.0
        for r in self.inst.requests:
            tp = times[(PICKUP, r.id)]
            td = times[(DROPOFF, r.id)]
            if r.pickup_window is not None and tp > r.pickup_window[1] + TOL:
                return None
            if r.dropoff_window is not None and td > r.dropoff_window[1] + TOL:
                return None
            pax += r.size * (td - r.release)
        return self.alpha * dist_total + self.beta * pax


# --------------------------------------------------------------------------- search


def _assignments(inst: Instance):
    vids = [v.id for v in inst.vehicles]
    rids = [r.id for r in inst.requests]
    for combo in itertools.product(vids, repeat=len(rids)):
        yield {k: [r for r, c in zip(rids, combo) if c == k] for k in vids}


def _with_markers(seq, i, j, s, path):
    return seq[:i] + ((j, JOIN, 1), (s, SPLIT, path)) + seq[i:]


def _handover_variants(inst: Instance, seqs, members, ji):
    """Layouts where requests aboard at the split move to another member's later route."""
    onboard = []
    for k in members:
        keys = seqs[k]
        si = ji[k] + 1
        before = {r for _, kind, r in keys[:si] if kind == PICKUP}
        after = {r for _, kind, r in keys[si + 1:] if kind == DROPOFF}
        # requests dropped at the split stop itself gain nothing from moving
        at_split = set()
        for n, kind, r in keys[si + 1:]:
            if n != keys[si][0]:
                break
            if kind == DROPOFF:
                at_split.add(r)
        for r in sorted(before & after - at_split):
            onboard.append((r, k))
    if not onboard:
        return
    for choice in itertools.product(*[[k] + [m for m in members if m != k] for _, k in onboard]):
        moves = [(r, k, t) for (r, k), t in zip(onboard, choice) if t != k]
        if not moves:
            continue
        base = {k: list(seqs[k]) for k in members}
        for r, k, _ in moves:
            base[k] = [key for key in base[k] if not (key[1] == DROPOFF and key[2] == r)]
        # place each moved dropoff at any position after the taker's split marker
        slots = []
        for r, k, t in moves:
            slots.append((r, t, inst.request_by_id[r].destination))
        yield from _place(base, slots, ji, {r: (k, t) for r, k, t in moves}, seqs)


def _place(base, slots, ji, handovers, seqs):
    if not slots:
        out = dict(seqs)
        out.update({k: tuple(v) for k, v in base.items()})
        yield out, dict(handovers)
        return
    (r, t, dest), rest = slots[0], slots[1:]
    keys = base[t]
    si = ji[t] + 1
    for pos in range(si + 1, len(keys) + 1):
        new = dict(base)
        new[t] = keys[:pos] + [(dest, DROPOFF, r)] + keys[pos:]
        yield from _place(new, rest, ji, handovers, seqs)


def enumerate_layouts(inst: Instance, limits: OracleLimits, mode: str = "modular"):
    """Yield every candidate ``(seqs, platoon, handovers)`` of the plan space."""
    K = len(inst.vehicles)
    u = inst.params.u
    path_cache: dict = {}
    vids = [v.id for v in inst.vehicles]
    for assign in _assignments(inst):
        for combo in itertools.product(*[list(orderings(assign[k], inst)) for k in vids]):
            if any(len(s) > limits.max_stops for s in combo):
                continue
            seqs = dict(zip(vids, combo))
            yield seqs, None, None
            if mode == "solo":
                continue
            nodes = candidate_nodes(inst, seqs, limits)
            for size in range(2, min(K, u) + 1):
                for members in itertools.combinations(vids, size):
                    if any(len(seqs[k]) + 2 > limits.max_stops for k in members):
                        continue
                    for j, s in itertools.permutations(nodes, 2):
                        if (j, s) not in path_cache:
                            path_cache[(j, s)] = [
                                (p, sum(inst.network.arc(a, b)[0] for a, b in zip(p, p[1:])),
                                 sum(inst.network.arc(a, b)[1] for a, b in zip(p, p[1:])))
                                for p in shortest_paths_between(inst, j, s)]
                        for path, pd, pt in path_cache[(j, s)]:
                            for legs in itertools.product(*[range(len(seqs[k]) + 1)
                                                            for k in members]):
                                lay = dict(seqs)
                                ji = {}
                                for k, i in zip(members, legs):
                                    lay[k] = _with_markers(seqs[k], i, j, s, path)
                                    ji[k] = i
                                platoon = (members, path, pd, pt, ji)
                                yield lay, platoon, None
                                for var, hand in _handover_variants(inst, lay, members, ji):
                                    yield var, platoon, hand


def brute_force_solve(inst: Instance, limits: OracleLimits | None = None,
                      mode: str = "modular") -> OracleResult:
    """Exact optimum over the enumerated plan space; ties go to the smallest plan encoding."""
    limits = limits or OracleLimits()
    if mode not in ("modular", "solo"):
        raise ValueError(f"unknown mode {mode!r}")
    K, R = len(inst.vehicles), len(inst.requests)
    est = estimate_size(inst, limits, mode)
    if K > limits.max_vehicles or R > limits.max_requests or est > limits.max_enumeration:
        raise OracleRefusal(f"instance with {K} vehicles and {R} requests is beyond the oracle "
                            f"limits (about {est:,} candidate plans)", est)
    scorer = LayoutScorer(inst)
    best = None
    evaluated = 0
    for seqs, platoon, handovers in enumerate_layouts(inst, limits, mode):
        evaluated += 1
        total = scorer.score(seqs, platoon, handovers)
        if total is None:
            continue
        scale = TOL * max(1.0, abs(best[0])) if best is not None else 0.0
        if best is not None and total > best[0] + scale:
            continue
        enc = _encode(seqs, platoon, handovers)
        if best is None or total < best[0] - scale or enc < best[1]:
            best = (total, enc, seqs, platoon, handovers)
    if best is None:
        raise RuntimeError("no feasible plan exists in the enumerated space")
    total, _, seqs, platoon, handovers = best
    plan = layout_plan(inst, seqs, platoon, handovers)
    cost = evaluate_cost(inst, plan)
    if abs(cost.total - total) > 1e-7 * max(1.0, abs(total)):
        raise AssertionError(f"oracle scorer ({total!r}) disagrees with the schedule module "
                             f"({cost.total!r}) on its optimum")
    return OracleResult(plan, cost, evaluated)


def _encode(seqs, platoon, handovers):
    routes = tuple((k, tuple((n, kind, r if kind != SPLIT else -1) for n, kind, r in seqs[k]))
                   for k in sorted(seqs))
    extra = () if platoon is None else (tuple(platoon[1]),)
    hand = () if not handovers else tuple(sorted(handovers.items()))
    return routes, extra, hand


def layout_plan(inst: Instance, seqs, platoon, handovers) -> Plan:
    from ..heuristic.routes import Draft, Key

    routes = {}
    for k, keys in seqs.items():
        out = []
        for n, kind, r in keys:
            if kind == JOIN:
                out.append(Key(n, ((JOIN, 1),)))
            elif kind == SPLIT:
                out.append(Key(n, ((SPLIT, 1),), r))
            else:
                out.append(Key(n, ((kind, r),)))
        routes[k] = out
    platoons = {}
    transfers = []
    if platoon is not None:
        members, path = platoon[0], platoon[1]
        platoons[1] = PlatoonSegment(tuple(sorted(members)), path)
        for r, (g, t) in sorted((handovers or {}).items()):
            transfers.append(TransferRecord(r, g, t, (path[-2], path[-1]), 1))
    return Draft(routes, platoons, transfers).to_plan(inst)


def solo_optimum(inst: Instance, limits: OracleLimits | None = None) -> OracleResult:
    return brute_force_solve(inst, limits, mode="solo")
