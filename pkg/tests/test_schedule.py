import json
from collections import defaultdict
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from mdarp.instance import Instance, Parameters, Request, Vehicle
from mdarp.network import network_from_edges
from mdarp.schedule import (DROPOFF, JOIN, PICKUP, SPLIT, InfeasiblePlanError, Plan, PlanError,
                            PlatoonSegment, Stop, TransferRecord, build_timeline, check_feasibility,
                            cost_difference, dump_plan, evaluate, evaluate_cost, load_plan,
                            plan_to_dict, strip_platoons)

from conftest import path_net, plan_pool


def route(nodes, **acts):
    """``route([1, 2, 3], p0=[(PICKUP, 1)], p2=[(DROPOFF, 1)])``"""
    return tuple(Stop(n, tuple(acts.get(f"p{i}", ()))) for i, n in enumerate(nodes))


def test_chain_arrivals():
    inst = Instance(path_net(3), [Vehicle(1, 1, 1)], [Request(1, 1, 3)],
                    Parameters(beta=1))
    plan = Plan({1: route([1, 2, 3], p0=[(PICKUP, 1)], p2=[(DROPOFF, 1)])})
    tl = build_timeline(inst, plan)
    assert tl.arrival[1] == (0, 1, 2)
    assert tl.dwell[1] == (0, 0, 0)
    assert (tl.pickup_time[1], tl.dropoff_time[1]) == (0, 2)


def sync_instance():
    # vehicle 1 reaches node 4 at t=2, vehicle 2 at t=5; they platoon on (4, 5)
    net = network_from_edges([(1, 4, 2), (2, 3, 2), (3, 4, 3), (4, 5, 1)])
    inst = Instance(net, [Vehicle(1, 1, 2), Vehicle(2, 2, 2)],
                    [Request(1, 1, 5), Request(2, 2, 5)], Parameters(alpha=1, beta=1, eta=0.1))
    plan = Plan({1: route([1, 4, 5], p0=[(PICKUP, 1)], p1=[(JOIN, 1)], p2=[(SPLIT, 1), (DROPOFF, 1)]),
                 2: route([2, 3, 4, 5], p0=[(PICKUP, 2)], p2=[(JOIN, 1)],
                          p3=[(SPLIT, 1), (DROPOFF, 2)])},
                {1: PlatoonSegment((1, 2), (4, 5))})
    return inst, plan


def test_forced_synchronization():
    inst, plan = sync_instance()
    tl = build_timeline(inst, plan)
    assert tl.arrival[1][1] == 2 and tl.dwell[1][1] == 3
    assert tl.departure(1, 1) == tl.departure(2, 2) == 5
    assert tl.arrival[1][2] == tl.arrival[2][3] == 6
    assert check_feasibility(inst, plan, tl).ok


def test_join_delay_hits_passengers_of_early_vehicle():
    inst, plan = sync_instance()
    tl = build_timeline(inst, plan)
    no_wait = inst.tables.time[1, 5]
    assert tl.dropoff_time[1] - inst.request_by_id[1].release > no_wait
    assert tl.dropoff_time[2] == inst.tables.time[2, 5]


def pooled(dest1):
    # two c=4 vehicles platoon on (1, 2) carrying 5 and 3 passengers
    inst = Instance(path_net(3), [Vehicle(1, 1, 4), Vehicle(2, 1, 4)],
                    [Request(1, 1, dest1, size=5), Request(2, 1, 2, size=3)],
                    Parameters(beta=0))
    if dest1 == 2:
        r1 = route([1, 2], p0=[(PICKUP, 1), (JOIN, 1)], p1=[(SPLIT, 1), (DROPOFF, 1)])
    else:
        r1 = route([1, 2, 3], p0=[(PICKUP, 1), (JOIN, 1)], p1=[(SPLIT, 1)], p2=[(DROPOFF, 1)])
    plan = Plan({1: r1, 2: route([1, 2], p0=[(PICKUP, 2), (JOIN, 1)], p1=[(SPLIT, 1), (DROPOFF, 2)])},
                {1: PlatoonSegment((1, 2), (1, 2))})
    return inst, plan


def test_pooled_capacity_boundary():
    inst, plan = pooled(2)
    assert check_feasibility(inst, plan).ok


def test_solo_capacity_after_split():
    inst, plan = pooled(3)
    rep = check_feasibility(inst, plan)
    assert [v.kind for v in rep.violations] == ["capacity"]
    assert "5 > 4" in rep.violations[0].message
    with pytest.raises(InfeasiblePlanError):
        evaluate_cost(inst, plan)


def test_transfer_needs_platoon():
    inst = Instance(path_net(3), [Vehicle(1, 1, 2), Vehicle(2, 1, 2)],
                    [Request(1, 1, 3)], Parameters(beta=0))
    plan = Plan({1: route([1, 2], p0=[(PICKUP, 1)]), 2: route([1, 2, 3], p2=[(DROPOFF, 1)])},
                {}, [TransferRecord(1, 1, 2, (1, 2))])
    rep = check_feasibility(inst, plan)
    assert [v.kind for v in rep.violations] == ["transfer"]
    assert "not platooned" in rep.violations[0].message


def test_transfer_inside_platoon_is_fine():
    inst = Instance(path_net(3), [Vehicle(1, 1, 2), Vehicle(2, 1, 2)],
                    [Request(1, 1, 3)], Parameters(beta=0))
    plan = Plan({1: route([1, 2], p0=[(PICKUP, 1), (JOIN, 1)], p1=[(SPLIT, 1)]),
                 2: route([1, 2, 3], p0=[(JOIN, 1)], p1=[(SPLIT, 1)], p2=[(DROPOFF, 1)])},
                {1: PlatoonSegment((1, 2), (1, 2))}, [TransferRecord(1, 1, 2, (1, 2))])
    tl, rep, cost = evaluate(inst, plan)
    assert rep.ok
    assert tl.layout.carried[1] == [(2, 0), (2, 1)]


def test_two_vehicle_platoon_cost():
    inst = Instance(path_net(4), [Vehicle(1, 1, 2), Vehicle(2, 1, 2)],
                    [Request(1, 1, 4), Request(2, 1, 4)], Parameters(alpha=1, beta=0, eta=0.1))
    plan = Plan({k: route([1, 2, 3, 4], p0=[(PICKUP, k), (JOIN, 1)], p3=[(SPLIT, 1), (DROPOFF, k)])
                 for k in (1, 2)}, {1: PlatoonSegment((1, 2), (1, 2, 3, 4))})
    cost = evaluate_cost(inst, plan)
    assert cost.vehicle_travel_cost == pytest.approx(5.4)
    assert cost.total == pytest.approx(5.4)


def test_two_rate_cost():
    net = network_from_edges([(1, 2, 10)])
    vs = [Vehicle(k, 1, 2) for k in (1, 2, 3)]
    inst = Instance(net, vs, [Request(1, 1, 2)], Parameters(beta=0, eta=0.05, eta2=0.02, u=4))
    plan = Plan({k: route([1, 2], p0=[(JOIN, 1)] + ([(PICKUP, 1)] if k == 1 else []),
                          p1=[(SPLIT, 1)] + ([(DROPOFF, 1)] if k == 1 else []))
                 for k in (1, 2, 3)}, {1: PlatoonSegment((1, 2, 3), (1, 2))})
    assert evaluate_cost(inst, plan).vehicle_travel_cost == pytest.approx(3 * 9.3)


def test_platoon_longer_than_u():
    net = network_from_edges([(1, 2, 10)])
    inst = Instance(net, [Vehicle(k, 1, 2) for k in (1, 2, 3)], [Request(1, 1, 2)],
                    Parameters(beta=0, eta=0.1, u=2))
    plan = Plan({k: route([1, 2], p0=[(JOIN, 1)] + ([(PICKUP, 1)] if k == 1 else []),
                          p1=[(SPLIT, 1)] + ([(DROPOFF, 1)] if k == 1 else []))
                 for k in (1, 2, 3)}, {1: PlatoonSegment((1, 2, 3), (1, 2))})
    assert [v.kind for v in check_feasibility(inst, plan).violations] == ["platoon_length"]


@pytest.mark.parametrize("solo,mod,want", [(140, 133.8, -4.43), (36, 31.8, -11.67),
                                           (104, 102, -1.92), (7.5, 7.5, 0.0)])
def test_cost_difference(solo, mod, want):
    assert round(cost_difference(solo, mod), 2) == want


@pytest.mark.parametrize("solo", [0, -3])
def test_cost_difference_needs_positive_solo(solo):
    with pytest.raises(ValueError):
        cost_difference(solo, 1)


def test_release_waits_at_previous_stop():
    inst = Instance(path_net(3), [Vehicle(1, 1, 1)], [Request(1, 2, 3, release=4)])
    plan = Plan({1: route([1, 2, 3], p1=[(PICKUP, 1)], p2=[(DROPOFF, 1)])})
    tl = build_timeline(inst, plan)
    assert tl.pickup_time[1] == 4 and tl.dwell[1][0] == 3
    assert check_feasibility(inst, plan, tl).ok


def test_window_violation_reported():
    inst = Instance(path_net(3), [Vehicle(1, 1, 1)],
                    [Request(1, 1, 3, dropoff_window=(0, 1.5))])
    plan = Plan({1: route([1, 2, 3], p0=[(PICKUP, 1)], p2=[(DROPOFF, 1)])})
    assert [v.kind for v in check_feasibility(inst, plan).violations] == ["window"]


def test_structural_errors():
    inst = Instance(path_net(3), [Vehicle(1, 1, 1)], [Request(1, 1, 3)])
    with pytest.raises(PlanError, match="not adjacent"):
        build_timeline(inst, Plan({1: route([1, 3], p0=[(PICKUP, 1)], p1=[(DROPOFF, 1)])}))
    with pytest.raises(PlanError, match="starts at"):
        build_timeline(inst, Plan({1: route([2, 3], p0=[(PICKUP, 1)], p1=[(DROPOFF, 1)])}))
    with pytest.raises(PlanError, match="lacks"):
        build_timeline(inst, Plan({1: route([1, 2, 3], p0=[(PICKUP, 1)])}))


def test_cyclic_wait_rejected():
    net = path_net(4)
    inst = Instance(net, [Vehicle(1, 1, 2), Vehicle(2, 3, 2)], [Request(1, 1, 2)])
    plan = Plan({1: route([1, 2, 3, 4], p0=[(PICKUP, 1), (JOIN, 1)], p1=[(SPLIT, 1), (DROPOFF, 1)],
                          p2=[(JOIN, 2)], p3=[(SPLIT, 2)]),
                 2: route([3, 4, 3, 2, 1, 2], p0=[(JOIN, 2)], p1=[(SPLIT, 2)],
                          p4=[(JOIN, 1)], p5=[(SPLIT, 1)])},
                {1: PlatoonSegment((1, 2), (1, 2)), 2: PlatoonSegment((1, 2), (3, 4))})
    with pytest.raises(PlanError, match="cyclic"):
        build_timeline(inst, plan)


def test_member_off_path_rejected():
    inst = Instance(path_net(3), [Vehicle(1, 1, 2), Vehicle(2, 1, 2)], [Request(1, 1, 2)])
    plan = Plan({1: route([1, 2], p0=[(PICKUP, 1), (JOIN, 1)], p1=[(SPLIT, 1), (DROPOFF, 1)]),
                 2: route([1, 2, 3], p0=[(JOIN, 1)], p2=[(SPLIT, 1)])},
                {1: PlatoonSegment((1, 2), (1, 2))})
    with pytest.raises(PlanError, match="does not traverse"):
        build_timeline(inst, plan)


# --------------------------------------------------------------------------- properties


PLANS = plan_pool()


def test_some_plans_platoon():
    assert sum(bool(p.platoons) for _, p in PLANS) >= 10


@pytest.mark.parametrize("idx", range(len(PLANS)))
def test_strip_platoons_decomposition(idx):
    inst, plan = PLANS[idx]
    if plan.transfers:
        pytest.skip("stripping a plan with transfers changes who carries whom")
    tl = build_timeline(inst, plan)
    lay = tl.layout
    cost = evaluate_cost(inst, plan, tl)
    solo = evaluate_cost(inst, strip_platoons(plan), check=False)
    saved = sum(inst.params.eta * lay.arc_dist[k][p] * lay.partners(k, p)
                for k in lay.walks for p in range(len(lay.arc_dist[k])))
    assert solo.vehicle_travel_cost - cost.vehicle_travel_cost == pytest.approx(saved, abs=1e-9)
    assert solo.vehicle_travel_cost >= cost.vehicle_travel_cost


@pytest.mark.parametrize("idx", range(len(PLANS)))
def test_zero_eta_matches_relabelled_solo(idx):
    inst, plan = PLANS[idx]
    if plan.transfers:
        pytest.skip("relabelling needs a transfer-free plan")
    flat = inst.with_params(eta=0.0)
    a = evaluate_cost(flat, plan)
    b = evaluate_cost(flat, strip_platoons(plan), check=False)
    assert a.vehicle_travel_cost == pytest.approx(b.vehicle_travel_cost, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(len(PLANS))), st.integers(0, 1), st.floats(0.0, 5.0))
def test_ready_time_monotone(idx, which, delay):
    inst, plan = PLANS[idx]
    base = build_timeline(inst, plan)
    vs = list(inst.vehicles)
    vs[which] = replace(vs[which], ready_time=vs[which].ready_time + delay)
    later = build_timeline(Instance(inst.network, vs, inst.requests, inst.params), plan)
    for k in base.arrival:
        assert all(b >= a - 1e-12 for a, b in zip(base.arrival[k], later.arrival[k]))


def _recount(inst, plan):
    """Per-arc onboard counts replayed from pickups, dropoffs and handovers."""
    events = defaultdict(list)
    for k, r in plan.routes.items():
        for pos, stop in enumerate(r):
            for kind, ref in stop.actions:
                if kind in (PICKUP, DROPOFF):
                    events[(k, pos)].append((kind, ref))
    loads = {}
    # a request boards at its pickup or at the tail node of an inbound handover
    for k, r in plan.routes.items():
        w = [s.node for s in r]
        aboard = set()
        for pos in range(len(w) - 1):
            for kind, ref in events[(k, pos)]:
                if kind == PICKUP:
                    aboard.add(ref)
                elif ref in aboard:
                    aboard.discard(ref)
            for t in plan.transfers:
                if t.to_vehicle == k and t.arc == (w[pos], w[pos + 1]) and t.request not in aboard:
                    aboard.add(t.request)
                if t.from_vehicle == k and t.arc == (w[pos], w[pos + 1]):
                    aboard.discard(t.request)
            loads[(k, pos)] = sum(inst.request_by_id[x].size for x in aboard)
    return loads


@pytest.mark.parametrize("idx", range(len(PLANS)))
def test_capacity_check_matches_recount(idx):
    inst, plan = PLANS[idx]
    tl = build_timeline(inst, plan)
    lay = tl.layout
    loads = _recount(inst, plan)
    ok = True
    for k, w in lay.walks.items():
        for p in range(len(w) - 1):
            if (k, p) not in lay.group_of and loads[(k, p)] > inst.vehicle_by_id[k].capacity:
                ok = False
    for members in lay.groups:
        if sum(loads[ev] for ev in members) > sum(inst.vehicle_by_id[k].capacity for k, _ in members):
            ok = False
    rep = check_feasibility(inst, plan, tl)
    assert ok == (not any(v.kind == "capacity" for v in rep.violations))


def test_timeline_is_pure():
    inst, plan = PLANS[0]
    assert build_timeline(inst, plan) == build_timeline(inst, plan)


def test_plan_file_round_trip(tmp_path):
    inst, plan = next((i, p) for i, p in PLANS if p.platoons)
    dump_plan(inst, plan, tmp_path / "a.json")
    assert load_plan(tmp_path / "a.json") == plan
    dump_plan(inst, load_plan(tmp_path / "a.json"), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    data = json.loads((tmp_path / "a.json").read_text())
    assert list(data) == ["routes", "platoons", "transfers", "timeline", "costs"]
    assert plan_to_dict(inst, plan)["routes"].keys() == {str(k) for k in plan.routes}
