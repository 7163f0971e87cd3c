"""Two-vehicle platoon formation.

For every vehicle pair the two solo routes are pooled and rebuilt several
ways.  For each rebuilt route pair, every pair of route legs is tried as the
place to divert both vehicles into a shared join-to-split path.  Candidates are
ranked with a vectorized estimate and the best few are evaluated exactly, then
refined by extension and en-route transfers.  Finally vehicle-disjoint pairs
are picked greedily by savings.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from ..instance import Instance
from ..schedule import DROPOFF, JOIN, PICKUP, SPLIT, PlatoonSegment
from .platoon import EPS, SearchConfig, candidates, draft_cost, refine, transfer_moves
from .routes import Draft, Key, keys_from_solo
from .solo import Seq, evaluate_sequence, insert_request

log = logging.getLogger(__name__)


@dataclass
class Proposal:
    vehicles: tuple[int, int]
    draft: Draft
    total: float
    baseline: float  # solo cost of the two vehicles

    @property
    def savings(self) -> float:
        return self.baseline - self.total


# --------------------------------------------------------------------------- reconstructions


def _orderings(reqs: list, inst: Instance):
    """Every key order of ``reqs`` with each pickup before its dropoff."""
    if not reqs:
        yield []
        return
    req = inst.request_by_id

    def rec(seq, open_, left):
        if not open_ and not left:
            yield list(seq)
            return
        for r in sorted(left):
            seq.append((req[r].origin, PICKUP, r))
            yield from rec(seq, open_ | {r}, left - {r})
            seq.pop()
        for r in sorted(open_):
            seq.append((req[r].destination, DROPOFF, r))
            yield from rec(seq, open_ - {r}, left)
            seq.pop()

    yield from rec([], frozenset(), frozenset(reqs))


def _count_reconstructions(n: int) -> int:
    # sum over splits of n requests between two vehicles of the valid orderings on each
    total = 0
    for a in range(n + 1):
        b = n - a
        total += math.comb(n, a) * (math.factorial(2 * a) // 2 ** a) * (math.factorial(2 * b) // 2 ** b)
    return total


def reconstructions(inst: Instance, k: int, m: int, seqs: dict[int, Seq], cfg: SearchConfig,
                    rng: np.random.Generator) -> list[tuple[Seq, Seq]]:
    """The original pair of sequences first, then rebuilt ones.

    Small pools are enumerated completely; larger ones are rebuilt by
    inserting requests in random order into a random vehicle at the cheapest
    position, ignoring capacity.
    """
    original = (list(seqs[k]), list(seqs[m]))
    pool = sorted({r for _, kind, r in seqs[k] + seqs[m] if kind == PICKUP})
    out = [original]
    seen = {(tuple(original[0]), tuple(original[1]))}
    if _count_reconstructions(len(pool)) <= cfg.n_recon:
        for mask in itertools.product((0, 1), repeat=len(pool)):
            ra = [r for r, b in zip(pool, mask) if b == 0]
            rb = [r for r, b in zip(pool, mask) if b == 1]
            for sa in _orderings(ra, inst):
                for sb in _orderings(rb, inst):
                    key = (tuple(sa), tuple(sb))
                    if key not in seen:
                        seen.add(key)
                        out.append((sa, sb))
        return out
    vk, vm = inst.vehicle_by_id[k], inst.vehicle_by_id[m]
    for _ in range(cfg.n_recon):
        sa, sb = [], []
        for idx in rng.permutation(len(pool)):
            r = pool[int(idx)]
            if rng.random() < 0.5:
                found = insert_request(inst, vk, sa, r, check_capacity=False)
                sa = found[3]
            else:
                found = insert_request(inst, vm, sb, r, check_capacity=False)
                sb = found[3]
        key = (tuple(sa), tuple(sb))
        if key not in seen:
            seen.add(key)
            out.append((sa, sb))
    return out


# --------------------------------------------------------------------------- legs


def _legs(inst: Instance, k: int, seq: Seq):
    """Insertion legs ``(index, from node, to node or None, departure time, weight)``.

    ``weight`` is the number of passengers whose dropoff comes at or after the
    leg, i.e. who are delayed by a detour on it.
    """
    v = inst.vehicle_by_id[k]
    T = inst.tables.T
    req = inst.request_by_id
    times = []
    cur, t = v.start, v.ready_time
    for n, kind, r in seq:
        if n != cur:
            t += T[cur][n]
        rq = req[r]
        b = None
        if kind == PICKUP:
            b = rq.release
            if rq.pickup_window is not None:
                b = max(b, rq.pickup_window[0])
        elif rq.dropoff_window is not None:
            b = rq.dropoff_window[0]
        if b is not None and b > t:
            t = b
        times.append(t)
        cur = n
    weights = [0] * (len(seq) + 1)
    acc = 0
    for i in range(len(seq) - 1, -1, -1):
        n, kind, r = seq[i]
        if kind == DROPOFF:
            acc += req[r].size
        weights[i] = acc
    legs = []
    for i in range(len(seq) + 1):
        a = v.start if i == 0 else seq[i - 1][0]
        ta = v.ready_time if i == 0 else times[i - 1]
        b = seq[i][0] if i < len(seq) else None
        if b is not None and b == a:
            continue
        legs.append((i, a, b, ta, weights[i] if i < len(seq) else 0))
    return legs


def _with_platoon(k: int, m: int, sk: Seq, sm: Seq, ik: int, im: int, j: int, s: int,
                  path: tuple, pid: int) -> Draft:
    rk = keys_from_solo(sk)
    rm = keys_from_solo(sm)
    for keys, i in ((rk, ik), (rm, im)):
        keys[i:i] = [Key(j, ((JOIN, pid),)), Key(s, ((SPLIT, pid),), path)]
    return Draft({k: rk, m: rm}, {pid: PlatoonSegment((k, m), path)}, [])


# --------------------------------------------------------------------------- pair search


def _relaxed(inst: Instance, k: int, seq: Seq) -> tuple[float, float]:
    """Distance and weighted total of a sequence with capacity ignored."""
    ok, d, p = evaluate_sequence(inst, inst.vehicle_by_id[k], seq, check_capacity=False)
    return d, inst.params.alpha * d + inst.params.beta * p


def pair_proposal(inst: Instance, k: int, m: int, seqs: dict[int, Seq], baseline: float,
                  cfg: SearchConfig, pid: int = 1) -> Proposal | None:
    """Best platooned plan for vehicles ``k`` and ``m`` that beats their solo cost, if any.

    The platoon must also lower the vehicle travel cost of the rebuilt routes
    it was added to, so a plan is never credited for re-routing alone: with no
    platoon saving, nothing is proposed.
    """
    rng = np.random.default_rng([cfg.seed, k, m])
    tables = inst.tables
    Dm, Tm = tables.dist, tables.time
    params = inst.params
    rate = params.saving_rate(1)
    alpha, beta = params.alpha, params.beta
    tol = EPS * max(1.0, abs(baseline))
    recons = reconstructions(inst, k, m, seqs, cfg, rng)
    memo: dict = {}

    def near(n1, n2):
        if (n1, n2) not in memo:
            memo[n1, n2] = candidates(tables, n1, n2, cfg.n_max, cfg.phi)
        return memo[n1, n2]

    pool: list[tuple[float, int, int, int, int, int]] = []  # (est - baseline, recon, ik, im, j, s)
    recon_dist = []
    for ri, (sk, sm) in enumerate(recons):
        dk, tk_ = _relaxed(inst, k, sk)
        dm, tm_ = _relaxed(inst, m, sm)
        relaxed = tk_ + tm_
        recon_dist.append(dk + dm)
        lk = _legs(inst, k, sk)
        lm = _legs(inst, m, sm)
        rows = []
        for (ik, ak, bk, tk, wk) in lk:
            for (im, am, bm, tm, wm) in lm:
                if bk is None and bm is None:
                    continue
                J = near(ak, am)
                S = near(bk, bm) if bk is not None and bm is not None else \
                    near(bk if bk is not None else bm, None)
                rows.append((ik, ak, bk, tk, wk, im, am, bm, tm, wm, J, S))
        if not rows:
            continue
        e, ed = _estimate(rows, Dm, Tm, rate, alpha, beta)
        for q, a, b in np.argwhere(np.isfinite(e) & (ed < 1e-9)):
            row = rows[q]
            pool.append((relaxed + float(e[q, a, b]) - baseline, ri, row[0], row[5],
                         row[10][int(a)], row[11][int(b)]))
    if not pool:
        return None
    pool.sort()
    slack = cfg.slack * max(1.0, baseline)
    # the global top list plus the best entry of every reconstruction, so a
    # rebuild whose payoff only appears after a handover is still looked at
    chosen = pool[:cfg.n_eval]
    seen = {c[1] for c in chosen}
    for c in pool[cfg.n_eval:]:
        if c[1] not in seen:
            seen.add(c[1])
            chosen.append(c)
    best: Proposal | None = None
    evaluated = []
    for gap, ri, ik, im, j, s in chosen:
        if gap > slack:
            continue
        sk, sm = recons[ri]
        path = tables.path(j, s)
        draft = _with_platoon(k, m, sk, sm, ik, im, j, s, path, pid)
        cost = draft_cost(inst, draft)
        if cost is None:
            continue
        variants = [(cost, draft)]
        if cfg.transfers:
            for d in transfer_moves(inst, draft, pid, cfg, single=True):
                c = draft_cost(inst, d)
                if c is not None:
                    variants.append((c, d))
        limit = recon_dist[ri] - EPS * max(1.0, recon_dist[ri])
        ok = [(c, d) for c, d in variants
              if c.total < baseline - tol and c.vehicle_travel_cost < limit]
        if not ok:
            continue
        c, d = min(ok, key=lambda x: x[0].total)
        evaluated.append((c.total, ri, ik, im, j, s, d))
    if not evaluated:
        return None
    evaluated.sort(key=lambda x: x[:6])
    for total, *_, draft in evaluated[:cfg.n_refine]:
        draft, total = refine(inst, draft, total, pid, cfg, rng)
        if best is None or total < best.total - EPS:
            best = Proposal((k, m), draft, total, baseline)
    return best


def _estimate(rows, Dm, Tm, rate, alpha, beta) -> tuple[np.ndarray, np.ndarray]:
    """Estimated change of total cost and of vehicle distance for each (join, split) choice.

    Rows are stacked into ``(row, join, split)`` arrays; padding slots come out as ``inf``.
    """
    n = len(rows)
    wj = max(len(r[10]) for r in rows)
    ws = max(len(r[11]) for r in rows)
    J = np.zeros((n, wj), dtype=np.int64)
    S = np.zeros((n, ws), dtype=np.int64)
    valid = np.zeros((n, wj, ws), dtype=bool)
    for q, r in enumerate(rows):
        J[q, :len(r[10])] = r[10]
        J[q, len(r[10]):] = r[10][0]
        S[q, :len(r[11])] = r[11]
        S[q, len(r[11]):] = r[11][0]
        valid[q, :len(r[10]), :len(r[11])] = True
    dJS = Dm[J[:, :, None], S[:, None, :]]
    tJS = Tm[J[:, :, None], S[:, None, :]]
    parts = []
    arrive = []
    for cols in ((1, 2, 3, 4), (6, 7, 8, 9)):
        a = np.array([r[cols[0]] for r in rows])
        has_b = np.array([r[cols[1]] is not None for r in rows])
        b = np.array([r[cols[1]] if r[cols[1]] is not None else r[cols[0]] for r in rows])
        t0 = np.array([r[cols[2]] for r in rows], dtype=float)
        w = np.array([r[cols[3]] for r in rows], dtype=float)
        dd = Dm[a[:, None], J][:, :, None] + dJS
        tt = Tm[a[:, None], J][:, :, None] + tJS
        back = has_b[:, None, None]
        dd = np.where(back, dd + Dm[S, b[:, None]][:, None, :] - Dm[a, b][:, None, None], dd)
        tt = np.where(back, tt + Tm[S, b[:, None]][:, None, :] - Tm[a, b][:, None, None], tt)
        parts.append((dd, tt, w))
        arrive.append(t0[:, None] + Tm[a[:, None], J])
    sync = np.maximum(arrive[0], arrive[1])
    e = np.zeros_like(dJS)
    ed = np.zeros_like(dJS)
    for (dd, tt, w), arr in zip(parts, arrive):
        wait = (sync - arr)[:, :, None]
        veh = dd - rate * dJS
        ed = ed + veh
        e = e + alpha * veh + beta * w[:, None, None] * (tt + wait)
    e = np.where(valid & (J[:, :, None] != S[:, None, :]), e, np.inf)
    ed = np.where(valid, ed, np.inf)
    return e, ed


def form_two_vehicle_platoons(inst: Instance, seqs: dict[int, Seq], cfg: SearchConfig,
                              solo_costs: dict[int, float], next_pid=None
                              ) -> tuple[list[Proposal], list[int]]:
    """Greedy vehicle-disjoint selection of improving pair proposals.

    Returns the selected proposals (in selection order) and the vehicles left
    in solo mode.
    """
    vehicles = sorted(seqs)
    proposals = []
    for k, m in itertools.combinations(vehicles, 2):
        if not seqs[k] and not seqs[m]:
            continue
        base = solo_costs[k] + solo_costs[m]
        p = pair_proposal(inst, k, m, seqs, base, cfg)
        if p is not None and p.savings > EPS * max(1.0, base):
            proposals.append(p)
    proposals.sort(key=lambda p: (-p.savings, p.vehicles))
    used: set[int] = set()
    chosen = []
    for p in proposals:
        if used.isdisjoint(p.vehicles):
            used.update(p.vehicles)
            chosen.append(p)
    if next_pid is not None:
        for p in chosen:
            _renumber(p.draft, next_pid)
    residual = [k for k in vehicles if k not in used]
    return chosen, residual


def _renumber(draft: Draft, next_pid) -> None:
    mapping = {pid: next(next_pid) for pid in sorted(draft.platoons)}
    relabel(draft, mapping)


def relabel(draft: Draft, mapping: dict[int, int]) -> None:
    """Rename platoon ids in place."""
    for k, keys in draft.routes.items():
        new = []
        for key in keys:
            acts = tuple((kind, mapping.get(ref, ref)) if kind in (JOIN, SPLIT) else (kind, ref)
                         for kind, ref in key.actions)
            new.append(Key(key.node, acts, key.via))
        draft.routes[k] = new
    draft.platoons = {mapping.get(p, p): seg for p, seg in draft.platoons.items()}
    draft.transfers = [type(t)(t.request, t.from_vehicle, t.to_vehicle, t.arc,
                               mapping.get(t.platoon, t.platoon)) for t in draft.transfers]
