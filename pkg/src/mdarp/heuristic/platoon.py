"""Draft surgery shared by the pair search and the merge phase.

Each operation returns candidate drafts; the caller keeps one only if the
schedule module confirms it is feasible and cheaper.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..instance import Instance
from ..schedule import (DROPOFF, JOIN, SPLIT, PlanError, PlatoonSegment, TransferRecord,
                        build_timeline, check_feasibility, evaluate_cost, plan_layout)
from .routes import Draft, Key
from .search import search_join_split

EPS = 1e-9


@dataclass
class SearchConfig:
    n_max: int = 4
    phi: float = 1.0
    n_recon: int = 20
    extension: bool = True
    transfers: bool = True
    seed: int = 0
    n_eval: int = 16
    n_refine: int = 2
    max_rounds: int = 10
    max_transfer_assignments: int = 64
    slack: float = 0.02  # estimate may exceed the bar by this fraction of it
    improve_solo: bool = True

    def __post_init__(self):
        if self.n_recon < 1:
            raise ValueError("n_recon must be >= 1")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


def sub_instance(inst: Instance, draft: Draft) -> Instance:
    return inst.restrict(draft.vehicles, draft.requests())


def draft_cost(inst: Instance, draft: Draft):
    """Exact cost breakdown of a draft, or ``None`` when it is infeasible or malformed."""
    sub = sub_instance(inst, draft)
    try:
        plan = draft.to_plan(sub)
        lay = plan_layout(sub, plan)
        tl = build_timeline(sub, plan, lay)
    except PlanError:
        return None
    if not check_feasibility(sub, plan, tl).ok:
        return None
    return evaluate_cost(sub, plan, tl, check=False)


def draft_total(inst: Instance, draft: Draft) -> float | None:
    cost = draft_cost(inst, draft)
    return None if cost is None else cost.total


def candidates(tables, n1: int, n2: int | None, n_max: int, phi: float) -> list[int]:
    """Anchor nodes themselves followed by the join/split search around them."""
    out = [n1] if n2 is None or n2 == n1 else [n1, n2]
    if n2 is None or n2 == n1:
        row = tables.dist[n1].copy()
        row[0] = row[n1] = np.inf
        order = np.lexsort((np.arange(row.size), row))[:n_max]
        found = [int(i) for i in order if np.isfinite(row[i])]
    else:
        found = [n for n, _ in search_join_split(n1, n2, tables, n_max, phi)]
    for n in found:
        if n not in out:
            out.append(n)
    return out


def _simple(path) -> bool:
    return len(set(path)) == len(path)


# --------------------------------------------------------------------------- extension


def extension_moves(inst: Instance, draft: Draft, pid: int, cfg: SearchConfig) -> list[Draft]:
    """Drafts that start the platoon earlier or end it later along a shortest path."""
    tables = inst.tables
    seg = draft.platoons[pid]
    out = []
    members = seg.members
    j, s = seg.path[0], seg.path[-1]
    ji = {k: draft.join_index(k, pid) for k in members}
    si = {k: draft.split_index(k, pid) for k in members}
    # earlier join: every member's join key must be a bare join not sharing its node
    prev = {}
    ok = True
    for k in members:
        keys = draft.routes[k]
        if keys[ji[k]].actions != ((JOIN, pid),):
            ok = False
            break
        p = keys[ji[k] - 1].node if ji[k] > 0 else inst.vehicle_by_id[k].start
        if p == j:
            ok = False
            break
        prev[k] = p
    if ok:
        anchors = sorted(set(prev.values()))
        cands = candidates(tables, anchors[0], anchors[1] if len(anchors) > 1 else None,
                           cfg.n_max, cfg.phi)
        for c in cands:
            if c in seg.path:
                continue
            new_path = tables.path(c, j) + seg.path[1:]
            if not _simple(new_path):
                continue
            d = draft.copy()
            for k in members:
                keys = d.routes[k]
                keys[ji[k]] = Key(c, ((JOIN, pid),))
                split = keys[si[k]]
                keys[si[k]] = Key(split.node, split.actions, new_path)
            d.platoons[pid] = PlatoonSegment(members, new_path)
            out.append(d)
    # later split
    nxt = {}
    ok = True
    for k in members:
        keys = draft.routes[k]
        if keys[si[k]].actions != ((SPLIT, pid),):
            ok = False
            break
        if si[k] + 1 < len(keys):
            nk = keys[si[k] + 1]
            if nk.node == s or nk.via is not None:
                ok = False
                break
            nxt[k] = nk.node
    if ok and nxt:
        anchors = sorted(set(nxt.values()))
        cands = candidates(tables, anchors[0], anchors[1] if len(anchors) > 1 else None,
                           cfg.n_max, cfg.phi)
        for c in cands:
            if c in seg.path:
                continue
            new_path = seg.path + tables.path(s, c)[1:]
            if not _simple(new_path):
                continue
            d = draft.copy()
            for k in members:
                keys = d.routes[k]
                keys[si[k]] = Key(c, ((SPLIT, pid),), new_path)
            d.platoons[pid] = PlatoonSegment(members, new_path)
            out.append(d)
    return out


# --------------------------------------------------------------------------- transfers


def _onboard_at_split(inst: Instance, draft: Draft, pid: int) -> list[tuple[int, int]]:
    """``(request, carrier)`` pairs aboard on the platoon's last arc and delivered by that carrier
    before its next join."""
    sub = sub_instance(inst, draft)
    plan = draft.to_plan(sub)
    lay = plan_layout(sub, plan)
    seg = draft.platoons[pid]
    out = []
    for k in seg.members:
        x, y = lay.spans[(pid, k)]
        last = (k, y - 1)
        keys = draft.routes[k]
        lo, hi = _free_block(draft, k, pid)
        free = {r for key in keys[lo:hi] for kind, r in key.actions if kind == DROPOFF}
        for r in sorted(free):
            if last in lay.carried[r] and lay.dropoffs[r][0] == k:
                out.append((r, k))
    return out


def _free_block(draft: Draft, k: int, pid: int) -> tuple[int, int]:
    """Key range after the split up to the vehicle's next join; empty if it rejoins at once."""
    keys = draft.routes[k]
    si = draft.split_index(k, pid)
    if any(a[0] == JOIN for a in keys[si].actions):
        return si + 1, si + 1
    end = len(keys)
    for i in range(si + 1, len(keys)):
        if any(a[0] == JOIN for a in keys[i].actions):
            end = i
            break
    return si + 1, end


def _move_dropoff(inst: Instance, d: Draft, pid: int, r: int, giver: int, taker: int) -> bool:
    lo, hi = _free_block(d, taker, pid)
    if hi <= lo and any(a[0] == JOIN for a in d.routes[taker][lo - 1].actions):
        return False
    keys = d.routes[giver]
    for i, key in enumerate(keys):
        if (DROPOFF, r) in key.actions:
            rest = tuple(a for a in key.actions if a != (DROPOFF, r))
            if rest or key.via is not None:
                keys[i] = key.with_actions(rest)
            else:
                del keys[i]
            break
    dest = inst.request_by_id[r].destination
    D = inst.tables.D
    keys = d.routes[taker]
    lo, hi = _free_block(d, taker, pid)
    best = None
    for pos in range(lo, hi + 1):
        prev = keys[pos - 1].node
        if pos < len(keys):
            nk = keys[pos]
            if nk.via is not None:
                continue
            inc = D[prev][dest] + D[dest][nk.node] - D[prev][nk.node]
        else:
            inc = D[prev][dest]
        if best is None or inc < best[0] - EPS:
            best = (inc, pos)
    if best is None:
        return False
    keys.insert(best[1], Key(dest, ((DROPOFF, r),)))
    return True


def transfer_moves(inst: Instance, draft: Draft, pid: int, cfg: SearchConfig,
                   rng: np.random.Generator | None = None, single: bool = False) -> list[Draft]:
    """Drafts that hand onboard requests to other members on the platoon's last arc.

    With ``single`` only one request changes vehicle per draft.
    """
    seg = draft.platoons[pid]
    try:
        onboard = _onboard_at_split(inst, draft, pid)
    except PlanError:
        return []
    if not onboard:
        return []
    members = seg.members
    n = len(onboard)
    total = len(members) ** n
    if single:
        assignments = []
        for i, (r, k) in enumerate(onboard):
            for t in members:
                if t != k:
                    assignments.append(tuple(t if j == i else kk for j, (_, kk) in enumerate(onboard)))
    elif total <= cfg.max_transfer_assignments:
        assignments = list(itertools.product(members, repeat=n))
    else:
        seen = set()
        assignments = []
        for _ in range(cfg.n_recon):
            a = tuple(members[int(i)] for i in rng.integers(len(members), size=n))
            if a not in seen:
                seen.add(a)
                assignments.append(a)
    arc = (seg.path[-2], seg.path[-1])
    out = []
    for assign in assignments:
        moves = [(r, k, t) for (r, k), t in zip(onboard, assign) if t != k]
        if not moves:
            continue
        d = draft.copy()
        ok = True
        for r, k, t in moves:
            if not _move_dropoff(inst, d, pid, r, k, t):
                ok = False
                break
            d.transfers.append(TransferRecord(r, k, t, arc, pid))
        if ok:
            out.append(d)
    return out


# --------------------------------------------------------------------------- refinement loop


def best_of(inst: Instance, drafts: list[Draft], incumbent: float) -> tuple[Draft | None, float]:
    best, best_total = None, incumbent
    for d in drafts:
        t = draft_total(inst, d)
        if t is not None and t < best_total - EPS * max(1.0, abs(best_total)):
            best, best_total = d, t
    return best, best_total


def refine(inst: Instance, draft: Draft, total: float, pid: int, cfg: SearchConfig,
           rng: np.random.Generator) -> tuple[Draft, float]:
    """Alternate platoon extension and transfer search while either improves."""
    rounds = 0
    while rounds < cfg.max_rounds:
        rounds += 1
        if cfg.extension:
            d, t = best_of(inst, extension_moves(inst, draft, pid, cfg), total)
            if d is not None:
                draft, total = d, t
                continue
        if cfg.transfers:
            d, t = best_of(inst, transfer_moves(inst, draft, pid, cfg, rng), total)
            if d is not None:
                draft, total = d, t
                continue
        break
    return draft, total
