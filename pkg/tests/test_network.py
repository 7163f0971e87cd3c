import itertools
import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdarp.network import (NetworkError, all_pairs_shortest, expand_layers, load_network,
                           network_from_edges, path_length, random_connected_network,
                           read_coordinates, synthetic_road_network)

TNTP = """<NUMBER OF ZONES> 2
<NUMBER OF NODES> 5
<FIRST THRU NODE> 3
<NUMBER OF LINKS> 8
<END OF METADATA>

~\tinit node\tterm node\tcapacity\tlength\tfree flow time\tb\tpower\tspeed\ttoll\ttype\t;
\t1\t3\t9000\t1.0\t1.0\t0.15\t4\t0\t0\t1\t;
\t3\t1\t9000\t1.0\t1.0\t0.15\t4\t0\t0\t1\t;
\t2\t4\t9000\t1.0\t1.0\t0.15\t4\t0\t0\t1\t;
\t3\t4\t9000\t2.0\t2.5\t0.15\t4\t0\t0\t1\t;
\t4\t3\t9000\t2.0\t2.0\t0.15\t4\t0\t0\t1\t;
\t4\t5\t9000\t1.5\t1.5\t0.15\t4\t0\t0\t1\t;
\t5\t3\t9000\t4.0\t4.0\t0.15\t4\t0\t0\t1\t;
\t3\t5\t9000\t4.0\t4.0\t0.15\t4\t0\t0\t1\t;
"""


def write_native(tmp_path, arcs, nodes=None):
    p = tmp_path / "net.json"
    data = {"arcs": [dict(a=a, b=b, dist=d, time=t) for a, b, d, t in arcs]}
    if nodes is not None:
        data["nodes"] = nodes
    p.write_text(json.dumps(data))
    return p


def test_minimal_native_file(tmp_path):
    net = load_network(write_native(tmp_path, [(1, 2, 1.0, 1.0)]))
    assert net.n_nodes == 2 and len(net.arcs) == 1


def test_self_loop_rejected(tmp_path):
    with pytest.raises(NetworkError, match="self-loop"):
        load_network(write_native(tmp_path, [(1, 2, 1, 1), (3, 3, 1, 1)]))


@pytest.mark.parametrize("d,t", [(0, 1), (1, -2)])
def test_nonpositive_weight_rejected(tmp_path, d, t):
    with pytest.raises(NetworkError, match="nonpositive"):
        load_network(write_native(tmp_path, [(1, 2, d, t)]))


def test_duplicate_arc_rejected(tmp_path):
    with pytest.raises(NetworkError, match="duplicate"):
        load_network(write_native(tmp_path, [(1, 2, 1, 1), (2, 1, 1, 1)]))


def test_labels_are_made_dense(tmp_path):
    net = load_network(write_native(tmp_path, [(10, 30, 1, 1), (30, 70, 2, 2)]))
    assert net.n_nodes == 3
    assert net.labels == (10, 30, 70)
    assert set(net.arcs) == {(1, 2), (2, 3)}


def test_tntp_parse_and_centroid_removal(tmp_path):
    p = tmp_path / "toy_net.tntp"
    p.write_text(TNTP)
    full = load_network(p, "tntp")
    assert full.n_nodes == 5 and len(full.arcs) == 5
    # the two directions of 3-4 merge to the cheaper time
    assert full.arc(3, 4) == (2.0, 2.0)
    thru = load_network(p, "tntp", remove_centroids=True)
    assert thru.n_nodes == 3 and len(thru.arcs) == 3
    assert thru.labels == (3, 4, 5)


def test_tntp_bad_row_reports_line(tmp_path):
    p = tmp_path / "bad_net.tntp"
    p.write_text(TNTP.replace("\t4\t5\t9000\t1.5", "\t4\tx\t9000\t1.5"))
    with pytest.raises(NetworkError, match="line 13"):
        load_network(p, "tntp")


def test_read_coordinates(tmp_path):
    p = tmp_path / "node.tntp"
    p.write_text("node\tx\ty\t;\n1\t0.5\t2\t;\n2\t-1\t3.25\t;\n")
    assert read_coordinates(p) == {1: (0.5, 2.0), 2: (-1.0, 3.25)}


def test_triangle_shortcut():
    net = network_from_edges([(1, 2, 1), (2, 3, 1), (1, 3, 3)])
    sp = all_pairs_shortest(net)
    assert sp.dist[1, 3] == 2
    assert sp.path(1, 3) == (1, 2, 3)


def test_chain_path():
    net = network_from_edges([(1, 2, 1), (2, 3, 1)])
    sp = all_pairs_shortest(net)
    assert sp.dist[1, 3] == 2 and sp.path(1, 3) == (1, 2, 3)


def test_disconnected_names_pair():
    net = network_from_edges([(1, 2, 1), (3, 4, 1)])
    with pytest.raises(NetworkError, match="unreachable"):
        all_pairs_shortest(net)


def test_tie_break_smallest_predecessor():
    # 1-2-4 and 1-3-4 are equally short; the stored path goes through 2
    net = network_from_edges([(1, 3, 1), (3, 4, 1), (1, 2, 1), (2, 4, 1)])
    assert all_pairs_shortest(net).path(1, 4) == (1, 2, 4)


def _brute_force_dist(net):
    n = net.n_nodes
    best = np.full((n + 1, n + 1), np.inf)
    adj = {i: [v for v, _, _ in net.adjacency[i]] for i in net.nodes}

    def dfs(path, d):
        s, v = path[0], path[-1]
        best[s, v] = min(best[s, v], d)
        for w in adj[v]:
            if w not in path:
                dfs(path + [w], d + net.arc(v, w)[0])

    for s in net.nodes:
        dfs([s], 0.0)
    return best


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 6), st.integers(0, 2**31))
def test_matches_simple_path_enumeration(n, extra, seed):
    net = random_connected_network(n, extra, np.random.default_rng(seed), weights=(1, 2, 3, 5))
    sp = all_pairs_shortest(net)
    bf = _brute_force_dist(net)
    assert np.array_equal(sp.dist[1:, 1:], bf[1:, 1:])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 50), st.integers(0, 40), st.integers(0, 2**31))
def test_table_invariants(n, extra, seed):
    rng = np.random.default_rng(seed)
    net = random_connected_network(n, extra, rng)
    sp = all_pairs_shortest(net)
    D = sp.dist[1:, 1:]
    assert np.all(np.diag(D) == 0) and np.all(np.diag(sp.time[1:, 1:]) == 0)
    assert np.array_equal(D, D.T)
    assert np.all(D[:, :, None] <= D[:, None, :] + D.T[None, :, :] + 1e-9)
    for s, t in itertools.islice(itertools.product(net.nodes, repeat=2), 200):
        d, tt = path_length(net, sp.path(s, t))
        assert d == sp.dist[s, t] and tt == sp.time[s, t]


def test_synthetic_surrogate_against_networkx():
    net, coords = synthetic_road_network()
    assert net.n_nodes == 378 and len(net.arcs) == 796 and len(coords) == 378
    sp = net.shortest_paths
    assert np.all(np.isfinite(sp.dist[1:, 1:]))
    g = nx.Graph()
    for (a, b), (d, _) in net.arcs.items():
        g.add_edge(a, b, weight=d)
    rng = np.random.default_rng(7)
    for s, t in rng.integers(1, 379, size=(20, 2)):
        ref = nx.dijkstra_path_length(g, int(s), int(t))
        assert sp.dist[s, t] == pytest.approx(ref, abs=1e-9)


def test_layers_fig4_shape():
    net = network_from_edges([(1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (1, 5, 1)])
    ln = expand_layers(net, 2)
    assert ln.n_nodes == 10
    inter = [a for a in ln.arcs if a.inter_layer]
    assert len(inter) == 5
    assert all(a.dist == 0 and a.time == 0 for a in inter)
    assert all(ln.node_of(a.head)[1] == ln.node_of(a.tail)[1] + 1 for a in inter)


def test_single_layer_is_identity():
    net = network_from_edges([(1, 2, 1), (2, 3, 2)])
    ln = expand_layers(net, 1)
    assert ln.n_nodes == 3
    assert not any(a.inter_layer for a in ln.arcs)
    assert {(a.tail, a.head) for a in ln.arcs} == {(1, 2), (2, 1), (2, 3), (3, 2)}


def test_triangle_three_layers():
    net = network_from_edges([(1, 2, 1), (2, 3, 1), (1, 3, 1)])
    ln = expand_layers(net, 3)
    assert ln.n_nodes == 9
    assert sum(a.inter_layer for a in ln.arcs) == 6


def test_layer_argument_checked():
    with pytest.raises(ValueError):
        expand_layers(network_from_edges([(1, 2, 1)]), 0)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10), st.integers(1, 4), st.integers(0, 2**31))
def test_contract_recovers_arcs(n, extra, L, seed):
    net = random_connected_network(n, extra, np.random.default_rng(seed))
    ln = expand_layers(net, L)
    assert ln.contract() == dict(net.arcs)
    for node in net.nodes:
        for layer in range(1, L + 1):
            assert ln.node_of(ln.node_id(node, layer)) == (node, layer)
