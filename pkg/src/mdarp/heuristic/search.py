"""Join/split candidate search and longest common platoon segments."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..network import ShortestPathTables


def search_join_split(n1: int, n2: int, tables: ShortestPathTables, n_max: int,
                      phi: float = 1.0) -> list[tuple[int, float]]:
    """Nodes that could host a join (or split) for two vehicles near ``n1`` and ``n2``.

    Each node ``i`` other than the query nodes is scored by
    ``delta_i = (D[n1, i] + D[n2, i]) + phi * |D[n1, i] - D[n2, i]|``: close to both
    and roughly equidistant.  Returns the ``n_max`` lowest scores in ascending
    order, ties broken by node id.
    """
    if n1 == n2:
        raise ValueError("query nodes must differ")
    key = (n1, n2, n_max, phi)
    hit = tables._search.get(key)
    if hit is not None:
        return hit
    d1 = tables.dist[n1, 1:]
    d2 = tables.dist[n2, 1:]
    delta = (d1 + d2) + phi * np.abs(d1 - d2)
    nodes = np.arange(1, tables.n_nodes + 1)
    keep = (nodes != n1) & (nodes != n2)
    delta, nodes = delta[keep], nodes[keep]
    # lexsort: last key is primary
    order = np.lexsort((nodes, delta))[:n_max]
    out = [(int(nodes[i]), float(delta[i])) for i in order]
    tables._search[key] = out
    return out


def find_lcps(route_a: Sequence[int], route_b: Sequence[int],
              min_nodes: int = 2) -> tuple[list[int], int, int]:
    """Longest contiguous node run shared by two node paths in the same direction.

    Returns ``(nodes, start_a, start_b)``; among equally long runs the one
    starting earliest in ``route_a`` wins (then earliest in ``route_b``).  An
    empty list (with starts -1) means no shared run of ``min_nodes`` nodes.
    """
    a, b = list(route_a), list(route_b)
    best, sa, sb = 0, -1, -1
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                run = prev[j - 1] + 1
                cur[j] = run
                start_a, start_b = i - run, j - run
                if run > best or (run == best and (start_a, start_b) < (sa, sb)):
                    best, sa, sb = run, start_a, start_b
        prev = cur
    if best < min_nodes:
        return [], -1, -1
    return a[sa:sa + best], sa, sb
