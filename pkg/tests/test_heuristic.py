import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdarp.exact import brute_force_solve
from mdarp.heuristic import SearchConfig, solve_modular, solve_solo, solo_routes
from mdarp.heuristic.pairs import form_two_vehicle_platoons
from mdarp.heuristic.platoon import sub_instance
from mdarp.heuristic.search import find_lcps, search_join_split
from mdarp.heuristic.solo import InsertionError, evaluate_sequence
from mdarp.instance import Instance, Parameters, Request, Vehicle, generate_instance
from mdarp.network import all_pairs_shortest, random_connected_network
from mdarp.schedule import check_feasibility, dump_plan, evaluate, evaluate_cost

from conftest import corridor_instance, path_net, plan_pool, tiny_instance, transfer_instance


def solo_costs(inst, seqs):
    out = {}
    for v in inst.vehicles:
        _, d, p = evaluate_sequence(inst, v, seqs[v.id])
        out[v.id] = inst.params.alpha * d + inst.params.beta * p
    return out


# --------------------------------------------------------------------------- solo insertion


def test_single_insertion():
    inst = Instance(path_net(3), [Vehicle(1, 1, 1)], [Request(1, 2, 3)], Parameters(beta=1))
    plan = solve_solo(inst)
    assert plan.walk(1) == [1, 2, 3]
    cost = evaluate_cost(inst, plan)
    assert (cost.vehicle_travel_cost, cost.passenger_service_time) == (2, 2)


def test_tie_goes_to_lower_id():
    inst = Instance(path_net(3), [Vehicle(2, 1, 1), Vehicle(1, 1, 1)], [Request(1, 2, 3)])
    plan = solve_solo(inst)
    assert plan.walk(1) == [1, 2, 3] and plan.walk(2) == [1]


def test_no_feasible_insertion_names_request():
    inst = Instance(path_net(3), [Vehicle(1, 1, 2)], [Request(4, 2, 3, size=3)])
    with pytest.raises(InsertionError, match="request 4"):
        solve_solo(inst)


def test_solo_is_deterministic():
    inst = tiny_instance(3)
    assert solve_solo(inst) == solve_solo(inst)


@pytest.mark.parametrize("seed", range(50))
def test_solo_not_below_solo_optimum(seed):
    inst = tiny_instance(seed)
    heur = evaluate_cost(inst, solve_solo(inst)).total
    opt = brute_force_solve(inst, mode="solo").cost.total
    assert heur >= opt - 1e-9


# --------------------------------------------------------------------------- join/split search


def test_midpoint_of_path():
    sp = all_pairs_shortest(path_net(3))
    assert search_join_split(1, 3, sp, 4) == [(2, 2.0)]


def test_delta_substitution():
    # node 4 is 3 from node 1 and 1 from node 5 on a path 1-2-3-4-5
    sp = all_pairs_shortest(path_net(5))
    got = dict(search_join_split(1, 5, sp, 10, phi=1.0))
    assert got[4] == 6.0
    assert 1 not in got and 5 not in got


def test_short_list_when_few_nodes():
    sp = all_pairs_shortest(path_net(3))
    assert len(search_join_split(1, 2, sp, 10)) == 1


def test_same_query_node_rejected():
    with pytest.raises(ValueError):
        search_join_split(1, 1, all_pairs_shortest(path_net(3)), 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 20), st.integers(0, 20), st.integers(1, 8),
       st.sampled_from([0.0, 0.5, 1.0, 2.0]), st.integers(0, 2**31), st.data())
def test_search_matches_full_sort(n, extra, n_max, phi, seed, data):
    net = random_connected_network(n, extra, np.random.default_rng(seed))
    sp = all_pairs_shortest(net)
    n1 = data.draw(st.integers(1, n))
    n2 = data.draw(st.integers(1, n).filter(lambda x: x != n1))
    D = sp.dist
    scored = sorted(((D[n1, i] + D[n2, i]) + phi * abs(D[n1, i] - D[n2, i]), i)
                    for i in range(1, n + 1) if i not in (n1, n2))
    want = [(i, d) for d, i in scored[:n_max]]
    assert search_join_split(n1, n2, sp, n_max, phi) == want


# --------------------------------------------------------------------------- LCPS


def test_lcps_overlap():
    assert find_lcps([1, 2, 3, 4], [9, 2, 3, 7]) == ([2, 3], 1, 1)


def test_lcps_disjoint():
    assert find_lcps([1, 2, 3], [4, 5, 6]) == ([], -1, -1)


def test_lcps_direction_matters():
    assert find_lcps([1, 2, 3], [3, 2, 1])[0] == []


def test_lcps_tie_takes_earliest_in_first():
    assert find_lcps([5, 6, 1, 2], [1, 2, 9, 5, 6])[0] == [5, 6]


def _lcs_bruteforce(a, b):
    best = []
    for i in range(len(a)):
        for j in range(i + 1, len(a) + 1):
            sub = a[i:j]
            if len(sub) > len(best) and any(b[s:s + len(sub)] == sub for s in range(len(b))):
                best = sub
    return best if len(best) >= 2 else []


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 4), max_size=12), st.lists(st.integers(1, 4), max_size=12))
def test_lcps_matches_bruteforce(a, b):
    nodes, sa, sb = find_lcps(a, b)
    want = _lcs_bruteforce(a, b)
    assert len(nodes) == len(want)
    assert nodes == want  # earliest-in-a tie-break agrees with the left-to-right scan
    if nodes:
        assert a[sa:sa + len(nodes)] == nodes == b[sb:sb + len(nodes)]


# --------------------------------------------------------------------------- pair formation


def test_shared_corridor_gives_improving_pair():
    inst, _ = corridor_instance(2)
    seqs = solo_routes(inst)
    chosen, residual = form_two_vehicle_platoons(inst, seqs, SearchConfig(), solo_costs(inst, seqs))
    assert len(chosen) == 1 and residual == []
    assert chosen[0].savings > 0
    sub = sub_instance(inst, chosen[0].draft)
    assert check_feasibility(sub, chosen[0].draft.to_plan(sub)).ok


def test_transfer_configuration():
    inst = transfer_instance()
    res = solve_modular(inst)
    assert res.cost.total < res.solo_cost.total
    assert len(res.plan.platoons) == 1 and len(res.plan.transfers) == 1
    t = res.plan.transfers[0]
    seg = res.plan.platoons[t.platoon]
    assert {t.from_vehicle, t.to_vehicle} == set(seg.members)
    assert t.arc in set(zip(seg.path, seg.path[1:]))


@pytest.mark.parametrize("inst", [inst for inst, _ in plan_pool()])
def test_selected_pairs_are_disjoint_and_feasible(inst):
    seqs = solo_routes(inst)
    chosen, residual = form_two_vehicle_platoons(inst, seqs, SearchConfig(), solo_costs(inst, seqs))
    used = [k for p in chosen for k in p.vehicles]
    assert len(used) == len(set(used))
    assert sorted(used + residual) == sorted(v.id for v in inst.vehicles)
    for p in chosen:
        sub = sub_instance(inst, p.draft)
        tl, rep, cost = evaluate(sub, p.draft.to_plan(sub))
        assert rep.ok and cost.total == pytest.approx(p.total)
        assert p.total < p.baseline


def platoon_free_seeds(n):
    out = []
    for seed in itertools.count():
        inst = tiny_instance(seed)
        opt = brute_force_solve(inst)
        if not opt.plan.platoons:
            out.append((inst, opt))
        if len(out) == n:
            return out


@pytest.mark.parametrize("inst,opt", platoon_free_seeds(8))
def test_no_pairs_when_optimum_is_platoon_free(inst, opt):
    seqs = solo_routes(inst)
    costs = solo_costs(inst, seqs)
    chosen, residual = form_two_vehicle_platoons(inst, seqs, SearchConfig(), costs)
    assert chosen == []
    assert residual == sorted(v.id for v in inst.vehicles)
    res = solve_modular(inst)
    assert res.plan == res.solo_plan


# --------------------------------------------------------------------------- merging


def corridor_optimum(inst, corridor_arcs):
    """Exhaustive over per-arc groupings: routes are forced on this tree, so only the
    partition of the vehicles into platoons on each corridor arc is free."""
    p = inst.params
    ids = [v.id for v in inst.vehicles]

    def partitions(items):
        if not items:
            yield []
            return
        head, rest = items[0], items[1:]
        for part in partitions(rest):
            yield [[head]] + part
            for i in range(len(part)):
                yield part[:i] + [[head] + part[i]] + part[i + 1:]

    total = 0.0
    for a, b in corridor_arcs:
        d = inst.network.arc(a, b)[0]
        total += min(sum(len(g) * d * (1 - p.saving_rate(len(g) - 1)) for g in part)
                     for part in partitions(ids) if all(len(g) <= p.u for g in part))
    spurs = 2 * len(ids) * 1.0
    return p.alpha * (total + spurs)


@pytest.mark.parametrize("u,size", [(4, 3), (3, 3), (2, 2)])
def test_three_vehicle_corridor(u, size):
    inst, idx = corridor_instance(3, u=u)
    arcs = [(idx[10], idx[11]), (idx[11], idx[12]), (idx[12], idx[13])]
    res = solve_modular(inst)
    assert max(len(s.members) for s in res.plan.platoons.values()) == size
    assert res.cost.total == pytest.approx(corridor_optimum(inst, arcs))


def test_residual_insertion_saving_identity():
    inst, idx = corridor_instance(3, u=4)
    res = solve_modular(inst)
    hist = res.clusters[0].history
    inserts = [h for h in hist if h[0] == "insert"]
    if not inserts:
        pytest.skip("the third vehicle joined through a merge rather than an insertion")
    # vehicle 3 gains two partners over the corridor, vehicles 1 and 2 one more each
    d = inst.tables.dist[idx[10], idx[13]]
    saving = inst.params.eta * d * (2 + 1 + 1)
    assert res.stage_totals["pairs"] - res.stage_totals["merge"] == pytest.approx(saving)


# --------------------------------------------------------------------------- end to end


@pytest.mark.parametrize("idx", range(len(plan_pool())))
def test_stage_totals_never_increase(idx):
    inst, _ = plan_pool()[idx]
    res = solve_modular(inst, SearchConfig(seed=idx))
    s = res.stage_totals
    tol = 1e-9 * max(1.0, s["solo"])
    assert s["pairs"] <= s["solo"] + tol and s["merge"] <= s["pairs"] + tol
    assert res.cost.total <= res.solo_cost.total
    assert check_feasibility(inst, res.plan).ok


@pytest.mark.parametrize("seed", range(6))
def test_no_saving_no_platoon(seed, small_road):
    net, _ = small_road
    inst = generate_instance(net, 5, 8, "C3", "zero", seed=seed).with_params(eta=0.0, beta=0.0)
    res = solve_modular(inst, SearchConfig(seed=seed, transfers=False))
    assert res.cost.total == pytest.approx(evaluate_cost(inst, solve_solo(inst)).total, abs=1e-9)


def test_deterministic_plan_files(tmp_path):
    inst, _ = plan_pool()[12]
    for name in ("a.json", "b.json"):
        dump_plan(inst, solve_modular(inst, SearchConfig(seed=5)).plan, tmp_path / name)
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_search_config_validated():
    with pytest.raises(ValueError):
        SearchConfig(n_recon=0)
    with pytest.raises(ValueError):
        SearchConfig(n_max=0)
