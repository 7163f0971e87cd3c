"""End-to-end modular solver: solo insertion, pair platoons, merges and insertions."""
from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field

from ..instance import Instance
from ..schedule import CostBreakdown, Plan, build_timeline, evaluate_cost
from .merge import Cluster, merge_platoons
from .pairs import form_two_vehicle_platoons
from .platoon import EPS, SearchConfig
from .solo import Seq, evaluate_sequence, plan_from_sequences, solo_routes

log = logging.getLogger(__name__)


@dataclass
class ModularResult:
    plan: Plan
    cost: CostBreakdown
    solo_plan: Plan
    solo_cost: CostBreakdown
    clusters: list[Cluster] = field(default_factory=list)
    residual: list[int] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    stage_totals: dict[str, float] = field(default_factory=dict)


def _solo_costs(inst: Instance, seqs: dict[int, Seq]) -> dict[int, float]:
    out = {}
    for v in inst.vehicles:
        ok, d, p = evaluate_sequence(inst, v, seqs[v.id])
        out[v.id] = inst.params.alpha * d + inst.params.beta * p
    return out


def assemble(inst: Instance, clusters: list[Cluster], residual: dict[int, Seq]) -> Plan:
    routes = {}
    platoons = {}
    transfers = []
    for c in clusters:
        plan = c.draft.to_plan(inst)
        routes.update(plan.routes)
        platoons.update(plan.platoons)
        transfers.extend(plan.transfers)
    solo = plan_from_sequences(inst.restrict(sorted(residual), []), residual) if residual else None
    if solo is not None:
        routes.update(solo.routes)
    routes = {k: routes[k] for k in sorted(routes)}
    # dense platoon ids in order of first appearance by vehicle
    order = []
    for k in sorted(routes):
        for stop in routes[k]:
            for kind, ref in stop.actions:
                if kind == "join" and ref not in order:
                    order.append(ref)
    mapping = {p: i + 1 for i, p in enumerate(order)}
    from ..schedule import Stop, TransferRecord
    routes = {k: tuple(Stop(s.node, tuple((kind, mapping[ref]) if kind in ("join", "split")
                                           else (kind, ref) for kind, ref in s.actions))
                       for s in r) for k, r in routes.items()}
    platoons = {mapping[p]: seg for p, seg in platoons.items()}
    transfers = [TransferRecord(t.request, t.from_vehicle, t.to_vehicle, t.arc,
                                mapping.get(t.platoon, t.platoon)) for t in transfers]
    return Plan(routes, dict(sorted(platoons.items())), tuple(transfers))


def solve_modular(inst: Instance, config: SearchConfig | None = None) -> ModularResult:
    """Solo insertion, then two-vehicle platoons, then merges and solo-vehicle insertions.

    The returned plan never costs more than the solo plan.
    """
    cfg = config or SearchConfig(n_max=inst.params.n_max, phi=inst.params.phi,
                                 seed=inst.params.seed)
    timings = {}
    t0 = time.perf_counter()
    seqs = solo_routes(inst, cfg.improve_solo)
    solo_plan = plan_from_sequences(inst, seqs)
    solo_cost = evaluate_cost(inst, solo_plan)
    timings["solo"] = time.perf_counter() - t0
    costs = _solo_costs(inst, seqs)
    next_pid = itertools.count(1)

    t1 = time.perf_counter()
    chosen, residual_ids = form_two_vehicle_platoons(inst, seqs, cfg, costs, next_pid)
    timings["pairs"] = time.perf_counter() - t1
    clusters = [Cluster(p.draft, p.total, [("pair", p.vehicles, p.total)]) for p in chosen]
    residual = {k: seqs[k] for k in residual_ids}
    stage = {"solo": solo_cost.total,
             "pairs": sum(c.total for c in clusters) + sum(costs[k] for k in residual)}

    t2 = time.perf_counter()
    clusters, residual = merge_platoons(inst, clusters, residual, costs, cfg, next_pid)
    timings["merge"] = time.perf_counter() - t2
    stage["merge"] = sum(c.total for c in clusters) + sum(costs[k] for k in residual)

    plan = assemble(inst, clusters, residual) if clusters else solo_plan
    tl = build_timeline(inst, plan)
    cost = evaluate_cost(inst, plan, tl)
    if cost.total > solo_cost.total:
        if cost.total > solo_cost.total + EPS * max(1.0, solo_cost.total):
            log.warning("modular plan (%.6f) worse than solo (%.6f); keeping solo",
                        cost.total, solo_cost.total)
        plan, cost, clusters, residual = solo_plan, solo_cost, [], dict(seqs)
    timings["total"] = time.perf_counter() - t0
    return ModularResult(plan, cost, solo_plan, solo_cost, clusters, sorted(residual), timings,
                         stage)
