"""Multi-vehicle platoons: merge platoons over shared segments, then add solo vehicles."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from ..instance import Instance
from ..schedule import JOIN, SPLIT, PlatoonSegment, TransferRecord
from .pairs import _legs, relabel
from .platoon import EPS, SearchConfig, draft_total, refine
from .routes import Draft, Key, keys_from_solo
from .search import find_lcps
from .solo import Seq

log = logging.getLogger(__name__)


_uid = itertools.count()


@dataclass
class Cluster:
    draft: Draft
    total: float
    history: list = field(default_factory=list)
    uid: int = field(default_factory=lambda: next(_uid))

    @property
    def vehicles(self) -> list[int]:
        return self.draft.vehicles


def _improves(new: float, old: float) -> bool:
    return new < old - EPS * max(1.0, abs(old))


# --------------------------------------------------------------------------- carving


def carve(draft: Draft, pid: int, x: int, y: int, next_pid) -> int:
    """Cut platoon ``pid`` into up to three consecutive platoons; return the middle one's id.

    The middle platoon covers path nodes ``x..y``.  Transfers move to whichever
    piece contains their arc.
    """
    seg = draft.platoons[pid]
    P = seg.path
    last = len(P) - 1
    if not (0 <= x < y <= last):
        raise ValueError(f"bad carve range {x}..{y} on a {len(P)}-node path")
    if x == 0 and y == last:
        return pid
    pre = next(next_pid) if x > 0 else None
    mid = next(next_pid)
    post = next(next_pid) if y < last else None
    for k in seg.members:
        keys = draft.routes[k]
        ji = next(i for i, key in enumerate(keys) if (JOIN, pid) in key.actions)
        si = ji + 1
        jkey, skey = keys[ji], keys[si]
        if (SPLIT, pid) not in skey.actions or skey.via != P:
            raise ValueError(f"draft of vehicle {k} does not pin platoon {pid} right after its join")
        first = pre if pre is not None else mid
        keys[ji] = jkey.with_actions(tuple((JOIN, first) if a == (JOIN, pid) else a
                                           for a in jkey.actions))
        other = tuple(a for a in skey.actions if a != (SPLIT, pid))
        pieces = []
        if pre is not None:
            pieces.append(Key(P[x], ((SPLIT, pre), (JOIN, mid)), P[:x + 1]))
        if post is not None:
            pieces.append(Key(P[y], ((SPLIT, mid), (JOIN, post)), P[x:y + 1]))
            pieces.append(Key(P[last], ((SPLIT, post),) + other, P[y:]))
        else:
            pieces.append(Key(P[y], ((SPLIT, mid),) + other, P[x:y + 1]))
        keys[si:si + 1] = pieces
    del draft.platoons[pid]
    if pre is not None:
        draft.platoons[pre] = PlatoonSegment(seg.members, P[:x + 1])
    draft.platoons[mid] = PlatoonSegment(seg.members, P[x:y + 1])
    if post is not None:
        draft.platoons[post] = PlatoonSegment(seg.members, P[y:])
    arc_at = {(P[o], P[o + 1]): o for o in range(last)}
    moved = []
    for t in draft.transfers:
        if t.platoon == pid:
            o = arc_at[t.arc]
            new = pre if o < x else (mid if o < y else post)
            t = TransferRecord(t.request, t.from_vehicle, t.to_vehicle, t.arc, new)
        moved.append(t)
    draft.transfers = moved
    return mid


def union(a: Draft, b: Draft) -> Draft:
    return Draft({**a.routes, **b.routes}, {**a.platoons, **b.platoons},
                 list(a.transfers) + list(b.transfers))


def absorb(draft: Draft, keep: int, drop: int) -> None:
    """Fold platoon ``drop`` into ``keep`` (same path): members unite."""
    sk, sd = draft.platoons[keep], draft.platoons[drop]
    relabel(draft, {drop: keep})
    draft.platoons[keep] = PlatoonSegment(tuple(sk.members) + tuple(sd.members), sk.path)


# --------------------------------------------------------------------------- merging


def merge_candidates(inst: Instance, A: Cluster, B: Cluster, cfg: SearchConfig, next_pid,
                     rng) -> tuple[Draft, float] | None:
    u = inst.params.u
    best = None
    base = A.total + B.total
    for pa in sorted(A.draft.platoons):
        for pb in sorted(B.draft.platoons):
            sa, sb = A.draft.platoons[pa], B.draft.platoons[pb]
            if len(sa.members) + len(sb.members) > u:
                continue
            nodes, xa, xb = find_lcps(sa.path, sb.path)
            if not nodes:
                continue
            d = union(A.draft.copy(), B.draft.copy())
            ma = carve(d, pa, xa, xa + len(nodes) - 1, next_pid)
            mb = carve(d, pb, xb, xb + len(nodes) - 1, next_pid)
            absorb(d, ma, mb)
            t = draft_total(inst, d)
            if t is None:
                continue
            d, t = refine(inst, d, t, ma, cfg, rng)
            if _improves(t, base) and (best is None or t < best[1] - EPS):
                best = (d, t)
    return best


def merge_round(inst: Instance, clusters: list[Cluster], cfg: SearchConfig, next_pid,
                rng) -> bool:
    found = []
    for ia, ib in itertools.combinations(range(len(clusters)), 2):
        res = merge_candidates(inst, clusters[ia], clusters[ib], cfg, next_pid, rng)
        if res is not None:
            gain = clusters[ia].total + clusters[ib].total - res[1]
            found.append((-gain, ia, ib, res))
    if not found:
        return False
    found.sort(key=lambda f: f[:3])
    taken: set[int] = set()
    merged = []
    for _, ia, ib, (d, t) in found:
        if ia in taken or ib in taken:
            continue
        taken.update((ia, ib))
        merged.append(Cluster(d, t, clusters[ia].history + clusters[ib].history + [("merge", t)]))
    clusters[:] = [c for i, c in enumerate(clusters) if i not in taken] + merged
    return True


# --------------------------------------------------------------------------- solo insertion


def _insertion_estimates(inst: Instance, k: int, seq: Seq, seg: PlatoonSegment):
    """Cheapest estimated ``(est, leg index, x, y)`` choices for joining ``seg`` over ``P[x..y]``."""
    tables = inst.tables
    Dm, Tm = tables.dist, tables.time
    params = inst.params
    P = np.asarray(seg.path)
    n_mem = len(seg.members)
    gain = params.saving_rate(n_mem) + n_mem * (params.saving_rate(n_mem) - params.saving_rate(n_mem - 1))
    arc_d = np.array([inst.network.arc(int(a), int(b))[0] for a, b in zip(P, P[1:])])
    arc_t = np.array([inst.network.arc(int(a), int(b))[1] for a, b in zip(P, P[1:])])
    cum_d = np.concatenate([[0.0], np.cumsum(arc_d)])
    cum_t = np.concatenate([[0.0], np.cumsum(arc_t)])
    seg_d = cum_d[None, :] - cum_d[:, None]
    seg_t = cum_t[None, :] - cum_t[:, None]
    valid = np.triu(np.ones((len(P), len(P)), dtype=bool), 1)
    out = []
    for i, a, b, t0, w in _legs(inst, k, seq):
        dd = Dm[a, P][:, None] + seg_d
        tt = Tm[a, P][:, None] + seg_t
        if b is not None:
            dd = dd + Dm[P, b][None, :] - Dm[a, b]
            tt = tt + Tm[P, b][None, :] - Tm[a, b]
        est = params.alpha * (dd - gain * seg_d) + params.beta * w * tt
        est = np.where(valid, est, np.inf)
        flat = np.argsort(est, axis=None, kind="stable")[:3]
        for f in flat:
            x, y = divmod(int(f), len(P))
            if np.isfinite(est[x, y]):
                out.append((float(est[x, y]), i, x, y))
    out.sort()
    return out


def insert_vehicle(inst: Instance, cluster: Cluster, k: int, seq: Seq, solo_cost: float,
                   cfg: SearchConfig, next_pid, rng, n_try: int = 4) -> tuple[Draft, float] | None:
    u = inst.params.u
    base = cluster.total + solo_cost
    slack = cfg.slack * max(1.0, base)
    best = None
    for pid in sorted(cluster.draft.platoons):
        seg = cluster.draft.platoons[pid]
        if len(seg.members) >= u:
            continue
        for est, i, x, y in _insertion_estimates(inst, k, seq, seg)[:n_try]:
            if est > slack:
                break
            d = cluster.draft.copy()
            mid = carve(d, pid, x, y, next_pid)
            P = seg.path
            keys = keys_from_solo(seq)
            keys[i:i] = [Key(P[x], ((JOIN, mid),)), Key(P[y], ((SPLIT, mid),), P[x:y + 1])]
            d.routes[k] = keys
            d.platoons[mid] = PlatoonSegment(d.platoons[mid].members + (k,), P[x:y + 1])
            t = draft_total(inst, d)
            if t is None:
                continue
            d, t = refine(inst, d, t, mid, cfg, rng)
            if _improves(t, base) and (best is None or t < best[1] - EPS):
                best = (d, t)
    return best


def merge_platoons(inst: Instance, clusters: list[Cluster], residual: dict[int, Seq],
                   solo_costs: dict[int, float], cfg: SearchConfig, next_pid
                   ) -> tuple[list[Cluster], dict[int, Seq]]:
    """Merge platoons until no merge improves, then insert residual solo vehicles."""
    rng = np.random.default_rng([cfg.seed, 3])
    clusters = list(clusters)
    while merge_round(inst, clusters, cfg, next_pid, rng):
        pass
    residual = dict(residual)
    cache: dict[tuple[int, int], tuple] = {}
    while residual and clusters:
        best = None
        for ci, c in enumerate(clusters):
            for k in sorted(residual):
                key = (c.uid, k)
                if key not in cache:
                    cache[key] = insert_vehicle(inst, c, k, residual[k], solo_costs[k], cfg,
                                                next_pid, rng)
                res = cache[key]
                if res is None:
                    continue
                gain = c.total + solo_costs[k] - res[1]
                if best is None or gain > best[0] + EPS:
                    best = (gain, ci, k, res)
        if best is None:
            break
        _, ci, k, (d, t) = best
        old = clusters[ci]
        clusters[ci] = Cluster(d, t, old.history + [("insert", k, t)])
        del residual[k]
    return clusters, residual
