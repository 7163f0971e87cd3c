import functools

import numpy as np
import pytest

from mdarp.instance import Instance, Parameters, Request, Vehicle, generate_instance
from mdarp.network import network_from_edges, random_connected_network, synthetic_road_network

TEMPORAL = ("zero", "U01", "U04")


def path_net(n, w=1.0):
    return network_from_edges([(i, i + 1, w) for i in range(1, n)])


def tiny_instance(seed, spatial=None):
    """K=2, R=2 on a random connected graph with 6..8 nodes."""
    rng = np.random.default_rng([seed, 99])
    n = int(rng.integers(6, 9))
    net = random_connected_network(n, int(rng.integers(1, 4)), rng)
    spatial = spatial or ("U", "C3")[seed % 2]
    return generate_instance(net, 2, 2, spatial, TEMPORAL[seed % 3], seed=seed)


def corridor_instance(n_vehicles=2, eta=0.1, beta=0.0, u=4, capacity=1):
    """Spurs 1..k feed node 10, a corridor 10-11-12-13, then one spur per vehicle."""
    edges = []
    for k in range(1, n_vehicles + 1):
        edges.append((k, 10, 1.0))
        edges.append((13, 20 + k, 1.0))
    edges += [(10, 11, 5.0), (11, 12, 5.0), (12, 13, 5.0)]
    # relabel to dense ids
    labels = sorted({a for a, b, _ in edges} | {b for a, b, _ in edges})
    idx = {lab: i + 1 for i, lab in enumerate(labels)}
    net = network_from_edges([(idx[a], idx[b], w) for a, b, w in edges])
    vehicles = [Vehicle(k, idx[k], capacity) for k in range(1, n_vehicles + 1)]
    requests = [Request(k, idx[k], idx[20 + k]) for k in range(1, n_vehicles + 1)]
    params = Parameters(alpha=1.0, beta=beta, eta=eta, u=u)
    return Instance(net, vehicles, requests, params), idx


def transfer_instance():
    """Two vehicles, three requests; handing one passenger over on the shared corridor pays."""
    net = network_from_edges([(1, 3, 2), (2, 3, 2), (3, 4, 5), (4, 5, 5), (5, 6, 5), (6, 7, 3),
                              (6, 8, 3)])
    return Instance(net, [Vehicle(1, 1, 2), Vehicle(2, 2, 2)],
                    [Request(1, 1, 7), Request(2, 2, 7), Request(3, 2, 8)],
                    Parameters(alpha=1, beta=0, eta=0.1, u=4))


@pytest.fixture(scope="session")
def road():
    return synthetic_road_network()


@pytest.fixture(scope="session")
def small_road():
    return synthetic_road_network(n_nodes=60, n_arcs=130, extent=4.0, seed=3)


@functools.cache
def plan_pool():
    """(instance, modular plan) pairs with a decent share of platoons and a transfer or two."""
    from mdarp.heuristic import SearchConfig, solve_modular
    out = []
    for seed in range(12):
        inst = tiny_instance(seed)
        out.append((inst, solve_modular(inst, SearchConfig(seed=seed)).plan))
    net, _ = synthetic_road_network(n_nodes=60, n_arcs=130, extent=4.0, seed=3)
    for seed in range(24):
        inst = generate_instance(net, 5, 8, "C3", TEMPORAL[seed % 3], seed=seed).with_params(beta=0.1)
        out.append((inst, solve_modular(inst, SearchConfig(seed=seed)).plan))
    for inst in (transfer_instance(), corridor_instance(3)[0]):
        out.append((inst, solve_modular(inst).plan))
    return out


CRITERIA: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
