"""Export of the full mixed-integer model in CPLEX-LP format.

The model lives on the layered network (``expand_layers``) plus one sink
node ``E`` that every vehicle enters at zero cost when its route ends.
Variables follow the usual naming: ``X_i_j_k`` (vehicle arc use),
``Y_i_j_k_r`` (request carried), ``S_k_r_i`` (service assignment),
``F_r_i_k_m`` (handover), ``TV_i_k``/``TU_i_k`` (arrival/dwell),
``TQ_i_r`` (service time), ``P_i_j_k_m`` (platoon pair), ``PN_i_j_k``
(partner count), ``PV_i_j_k`` (platooned flag, two-rate variant only) and the
linearization dummies ``Z``, ``U``, ``W``, ``C``.

The objective constant (the in-system times) is kept out of the LP text and
reported as ``objective_offset``.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from ..instance import Instance
from ..network import expand_layers

SINK = "E"
VARIANTS = ("time_windows", "two_rate")

# constraint families in emission order
FAMILIES = (
    "vehicle_start", "vehicle_end", "vehicle_flow",
    "request_pickup", "request_dropoff", "request_flow", "single_carrier",
    "ready_time", "time_symmetry", "time_active", "time_upper", "time_lower",
    "dwell_active", "dwell_upper", "dwell_lower",
    "pickup_assignment", "dropoff_assignment",
    "service_time", "service_active", "service_upper", "service_lower",
    "sync_depart_fwd", "sync_depart_bwd", "sync_arrive_fwd", "sync_arrive_bwd",
    "platoon_arc", "partner_count", "platoon_length",
    "transfer_detect", "transfer_platoon",
    "pooled_capacity", "partner_load_active", "partner_load_upper", "partner_load_lower",
    "release",
    "pickup_window", "dropoff_window", "platoon_flag_upper", "platoon_flag_lower",
)


@dataclass
class MilpArtifact:
    lp_text: str
    variables: dict[str, dict]          # name -> {"symbol": ..., "indices": {...}}
    census: dict[str, int]              # constraint family -> count
    objective_offset: float
    big_m: float
    load_m: float
    layers: int
    variants: tuple[str, ...] = ()
    node_map: dict[int, tuple[int, int]] = field(default_factory=dict)  # layered id -> (node, layer)

    def write(self, path: str | Path) -> tuple[Path, Path]:
        """Write ``<path>`` (LP text) and ``<path>.vars.json`` (variable dictionary)."""
        lp = Path(path)
        lp.write_text(self.lp_text)
        side = lp.with_name(lp.name + ".vars.json")
        side.write_text(json.dumps({"objective_offset": self.objective_offset,
                                    "big_m": self.big_m, "load_m": self.load_m,
                                    "layers": self.layers, "variants": list(self.variants),
                                    "census": self.census, "variables": self.variables},
                                   indent=1, sort_keys=True))
        return lp, side


def horizon(inst: Instance, layers: int) -> float:
    """Latest release or ready time plus the travel time of every layered arc."""
    t0 = max([v.ready_time for v in inst.vehicles] + [r.release for r in inst.requests])
    # each undirected base arc appears twice per layer; inter-layer arcs cost nothing
    return t0 + 2 * layers * sum(t for _, t in inst.network.arcs.values())


def _fmt(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


class _Writer:
    def __init__(self):
        self.rows: list[str] = []
        self.census: dict[str, int] = defaultdict(int)
        self.used: set[str] = set()

    def add(self, family: str, name: str, terms, sense: str, rhs: float):
        """Append ``sum(coef * var) sense rhs``; terms with zero coefficients are dropped."""
        acc: dict[str, float] = {}
        for coef, var in terms:
            if coef:
                acc[var] = acc.get(var, 0.0) + coef
        parts = []
        for var, coef in acc.items():
            if coef == 0:
                continue
            self.used.add(var)
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            parts.append(f"{sign} {var}" if mag == 1 else f"{sign} {_fmt(mag)} {var}")
        expr = _wrap(parts) if parts else "0"
        self.rows.append(f" {name}: {expr} {sense} {_fmt(rhs)}")
        self.census[family] += 1


def _wrap(parts: list[str], width: int = 200) -> str:
    lines, cur = [], ""
    for p in parts:
        if cur and len(cur) + len(p) + 1 > width:
            lines.append(cur)
            cur = p
        else:
            cur = f"{cur} {p}" if cur else p
    lines.append(cur)
    text = "\n   ".join(lines)
    return text[2:] if text.startswith("+ ") else text


def export_milp(inst: Instance, layers: int = 2, big_m="horizon",
                include_variants=()) -> MilpArtifact:
    """Build the LP text, variable dictionary and constraint census for ``inst``."""
    variants = tuple(include_variants)
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {v!r}; choose from {VARIANTS}")
    if isinstance(big_m, str):
        if big_m != "horizon":
            raise ValueError(f"unknown big-M policy {big_m!r}; use 'horizon' or a positive number")
        M = horizon(inst, layers)
    else:
        M = float(big_m)
        if not (M > 0 and math.isfinite(M)):
            raise ValueError(f"big-M must be a positive finite number, got {big_m!r}")
    params = inst.params
    two_rate = "two_rate" in variants
    if two_rate and params.eta2 is None:
        raise ValueError("the two-rate variant needs eta2 in the instance parameters")
    LM = float(sum(r.size for r in inst.requests))  # bound on any vehicle's load

    ln = expand_layers(inst.network, layers)
    L = layers
    V = list(range(1, ln.n_nodes + 1))
    A = [(a.tail, a.head, a.dist, a.time) for a in ln.arcs]
    # vehicles travel together only on road arcs, never on a layer switch
    AP = [(a.tail, a.head, a.dist, a.time) for a in ln.arcs if not a.inter_layer]
    platoon_set = {(i, j) for i, j, _, _ in AP}
    arc_set = {(i, j) for i, j, _, _ in A}
    # orientations whose reverse is missing (one-way inter-layer arcs)
    reverse_only = [(j, i) for i, j, _, _ in A if (j, i) not in arc_set]
    O = [(i, j) for i, j, _, _ in A] + reverse_only
    tau = {(i, j): t for i, j, _, t in A}
    out_arcs = defaultdict(list)
    in_arcs = defaultdict(list)
    for i, j, _, _ in A:
        out_arcs[i].append(j)
        in_arcs[j].append(i)
    K = [v.id for v in inst.vehicles]
    R = [r.id for r in inst.requests]
    veh = inst.vehicle_by_id
    req = inst.request_by_id
    pairs = [(k, m) for k in K for m in K if k != m]
    start = {k: ln.node_id(veh[k].start, 1) for k in K}
    o_copies = {r: ln.copies(req[r].origin) for r in R}
    d_copies = {r: ln.copies(req[r].destination) for r in R}

    X = lambda i, j, k: f"X_{i}_{j}_{k}"
    Y = lambda i, j, k, r: f"Y_{i}_{j}_{k}_{r}"
    S = lambda k, r, i: f"S_{k}_{r}_{i}"
    F = lambda r, i, k, m: f"F_{r}_{i}_{k}_{m}"
    TV = lambda i, k: f"TV_{i}_{k}"
    TU = lambda i, k: f"TU_{i}_{k}"
    TQ = lambda i, r: f"TQ_{i}_{r}"
    P = lambda i, j, k, m: f"P_{i}_{j}_{k}_{m}"
    PN = lambda i, j, k: f"PN_{i}_{j}_{k}"
    PV = lambda i, j, k: f"PV_{i}_{j}_{k}"
    Z = lambda i, j, k: f"Z_{i}_{j}_{k}"
    U = lambda i, j, k: f"U_{i}_{j}_{k}"
    W = lambda k, r, i: f"W_{k}_{r}_{i}"
    C = lambda i, j, k, m: f"C_{i}_{j}_{k}_{m}"

    def xvar(i, j, k):
        # constant zero for orientations that are not arcs
        return X(i, j, k) if (i, j) in arc_set else None

    w = _Writer()

    # ---------------------------------------------------------------- objective
    obj: dict[str, float] = defaultdict(float)
    for k in K:
        for i, j, d, _ in A:
            if d == 0:
                continue
            obj[X(i, j, k)] += params.alpha * d
            if two_rate:
                eta1, eta2 = params.eta, params.eta2
                obj[PV(i, j, k)] -= params.alpha * d * (eta1 - eta2)
                obj[PN(i, j, k)] -= params.alpha * d * eta2
            else:
                obj[PN(i, j, k)] -= params.alpha * d * params.eta
    for r in R:
        for i in d_copies[r]:
            obj[TQ(i, r)] += params.beta * req[r].size
    offset = -params.beta * sum(req[r].size * req[r].release for r in R) + 0.0

    # ---------------------------------------------------------------- routing
    for k in K:
        w.add("vehicle_start", f"start_k{k}", [(1, X(start[k], j, k)) for j in out_arcs[start[k]]]
              + [(1, X(start[k], SINK, k))], "=", 1)
    for k in K:
        w.add("vehicle_end", f"end_k{k}", [(1, X(i, SINK, k)) for i in V], "=", 1)
    for k in K:
        for i in V:
            if i == start[k]:
                continue
            terms = [(1, X(i, j, k)) for j in out_arcs[i]] + [(1, X(i, SINK, k))]
            terms += [(-1, X(j, i, k)) for j in in_arcs[i]]
            w.add("vehicle_flow", f"vflow_k{k}_i{i}", terms, "=", 0)
    for r in R:
        terms = []
        for i in o_copies[r]:
            for k in K:
                terms += [(1, Y(i, j, k, r)) for j in out_arcs[i]]
                terms += [(-1, Y(j, i, k, r)) for j in in_arcs[i]]
        w.add("request_pickup", f"pick_r{r}", terms, "=", 1)
    for r in R:
        terms = []
        for i in d_copies[r]:
            for k in K:
                terms += [(1, Y(j, i, k, r)) for j in in_arcs[i]]
                terms += [(-1, Y(i, j, k, r)) for j in out_arcs[i]]
        w.add("request_dropoff", f"drop_r{r}", terms, "=", 1)
    for r in R:
        skip = set(o_copies[r]) | set(d_copies[r])
        for i in V:
            if i in skip:
                continue
            terms = []
            for k in K:
                terms += [(1, Y(i, j, k, r)) for j in out_arcs[i]]
                terms += [(-1, Y(j, i, k, r)) for j in in_arcs[i]]
            w.add("request_flow", f"rflow_r{r}_i{i}", terms, "=", 0)
    for r in R:
        for i, j, _, _ in A:
            w.add("single_carrier", f"one_r{r}_{i}_{j}", [(1, Y(i, j, k, r)) for k in K], "<=", 1)

    # ---------------------------------------------------------------- time continuity
    for k in K:
        w.add("ready_time", f"ready_k{k}", [(1, TV(start[k], k))], ">=", veh[k].ready_time)
    for k in K:
        for i, j, _, _ in A:
            w.add("time_symmetry", f"zsym_k{k}_{i}_{j}", [(1, Z(i, j, k)), (-1, Z(j, i, k))], "=", 0)
    for k in K:
        for i, j in O:
            act = [(M, v) for v in (xvar(i, j, k), xvar(j, i, k)) if v]
            w.add("time_active", f"zact_k{k}_{i}_{j}", [(1, Z(i, j, k))] + [(-c, v) for c, v in act],
                  "<=", 0)
    for k in K:
        for i, j in O:
            t = tau.get((i, j), 0.0)
            terms = [(1, Z(i, j, k)), (-1, TV(i, k))]
            if (i, j) in arc_set:
                terms += [(-t, X(i, j, k)), (-1, U(i, j, k))]
            w.add("time_upper", f"zup_k{k}_{i}_{j}", terms, "<=", 0)
    for k in K:
        for i, j in O:
            t = tau.get((i, j), 0.0)
            # Z >= TV + tau X + U - (1 - X_ij - X_ji) M
            terms = [(1, Z(i, j, k)), (-1, TV(i, k))]
            if (i, j) in arc_set:
                terms += [(-t, X(i, j, k)), (-1, U(i, j, k))]
            terms += [(-M, v) for v in (xvar(i, j, k), xvar(j, i, k)) if v]
            w.add("time_lower", f"zlo_k{k}_{i}_{j}", terms, ">=", -M)
    for k in K:
        for i, j, _, _ in A:
            w.add("dwell_active", f"uact_k{k}_{i}_{j}", [(1, U(i, j, k)), (-M, X(i, j, k))], "<=", 0)
    for k in K:
        for i, j, _, _ in A:
            w.add("dwell_upper", f"uup_k{k}_{i}_{j}", [(1, U(i, j, k)), (-1, TU(i, k))], "<=", 0)
    for k in K:
        for i, j, _, _ in A:
            w.add("dwell_lower", f"ulo_k{k}_{i}_{j}",
                  [(1, U(i, j, k)), (-1, TU(i, k)), (-M, X(i, j, k))], ">=", -M)

    # ---------------------------------------------------------------- service assignment and time
    for k in K:
        for r in R:
            for i in o_copies[r]:
                terms = [(1, S(k, r, i))]
                terms += [(-1, Y(i, j, k, r)) for j in out_arcs[i]]
                terms += [(1, Y(j, i, k, r)) for j in in_arcs[i]]
                w.add("pickup_assignment", f"spick_k{k}_r{r}_i{i}", terms, "=", 0)
    for k in K:
        for r in R:
            for i in d_copies[r]:
                terms = [(1, S(k, r, i))]
                terms += [(-1, Y(j, i, k, r)) for j in in_arcs[i]]
                terms += [(1, Y(i, j, k, r)) for j in out_arcs[i]]
                w.add("dropoff_assignment", f"sdrop_k{k}_r{r}_i{i}", terms, "=", 0)
    service_nodes = {r: list(o_copies[r]) + list(d_copies[r]) for r in R}
    for r in R:
        for i in service_nodes[r]:
            w.add("service_time", f"tq_r{r}_i{i}", [(1, TQ(i, r))] + [(-1, W(k, r, i)) for k in K],
                  "=", 0)
    for k in K:
        for r in R:
            for i in service_nodes[r]:
                w.add("service_active", f"wact_k{k}_r{r}_i{i}", [(1, W(k, r, i)), (-M, S(k, r, i))],
                      "<=", 0)
    for k in K:
        for r in R:
            for i in service_nodes[r]:
                w.add("service_upper", f"wup_k{k}_r{r}_i{i}", [(1, W(k, r, i)), (-1, TV(i, k))],
                      "<=", 0)
    for k in K:
        for r in R:
            for i in service_nodes[r]:
                w.add("service_lower", f"wlo_k{k}_r{r}_i{i}",
                      [(1, W(k, r, i)), (-1, TV(i, k)), (-M, S(k, r, i))], ">=", -M)

    # ---------------------------------------------------------------- platoons
    for fam, sgn, at_head in (("sync_depart_fwd", 1, False), ("sync_depart_bwd", -1, False),
                              ("sync_arrive_fwd", 1, True), ("sync_arrive_bwd", -1, True)):
        for k, m in pairs:
            for i, j, _, _ in AP:
                if at_head:
                    terms = [(sgn, TV(j, k)), (-sgn, TV(j, m))]
                else:
                    terms = [(sgn, TV(i, k)), (sgn, TU(i, k)), (-sgn, TV(i, m)), (-sgn, TU(i, m))]
                terms.append((M, P(i, j, k, m)))
                w.add(fam, f"{fam}_k{k}_m{m}_{i}_{j}", terms, "<=", M)
    for k, m in pairs:
        for i, j, _, _ in AP:
            w.add("platoon_arc", f"parc_k{k}_m{m}_{i}_{j}",
                  [(2, P(i, j, k, m)), (-1, X(i, j, k)), (-1, X(i, j, m))], "<=", 0)
    for k in K:
        for i, j, _, _ in AP:
            w.add("partner_count", f"pn_k{k}_{i}_{j}",
                  [(1, PN(i, j, k))] + [(-1, P(i, j, k, m)) for m in K if m != k], "<=", 0)
    for k in K:
        for i, j, _, _ in AP:
            w.add("platoon_length", f"plen_k{k}_{i}_{j}", [(1, PN(i, j, k))], "<=",
                  params.u - 1)

    # ---------------------------------------------------------------- transfers
    for r in R:
        for i in V:
            for k, m in pairs:
                terms = [(1, Y(j, i, k, r)) for j in in_arcs[i]]
                terms += [(1, Y(i, j, m, r)) for j in out_arcs[i]]
                terms.append((-1, F(r, i, k, m)))
                w.add("transfer_detect", f"fdet_r{r}_i{i}_k{k}_m{m}", terms, "<=", 1)
    for r in R:
        for i in V:
            for k, m in pairs:
                terms = [(1, F(r, i, k, m))]
                terms += [(-1, P(i, j, k, m)) for j in out_arcs[i] if (i, j) in platoon_set]
                terms += [(-1, P(j, i, k, m)) for j in in_arcs[i] if (j, i) in platoon_set]
                w.add("transfer_platoon", f"fpl_r{r}_i{i}_k{k}_m{m}", terms, "<=", 0)

    # ---------------------------------------------------------------- pooled capacity
    for k in K:
        for i, j, _, _ in A:
            pooled = (i, j) in platoon_set
            terms = [(req[r].size, Y(i, j, k, r)) for r in R]
            terms += [(1, C(i, j, k, m)) for m in K if m != k and pooled]
            terms.append((-veh[k].capacity, X(i, j, k)))
            terms += [(-veh[m].capacity, P(i, j, k, m)) for m in K if m != k and pooled]
            w.add("pooled_capacity", f"cap_k{k}_{i}_{j}", terms, "<=", 0)
    for k, m in pairs:
        for i, j, _, _ in AP:
            w.add("partner_load_active", f"cact_k{k}_m{m}_{i}_{j}",
                  [(1, C(i, j, k, m)), (-LM, P(i, j, k, m))], "<=", 0)
    for k, m in pairs:
        for i, j, _, _ in AP:
            w.add("partner_load_upper", f"cup_k{k}_m{m}_{i}_{j}",
                  [(1, C(i, j, k, m))] + [(-req[r].size, Y(i, j, m, r)) for r in R], "<=", 0)
    for k, m in pairs:
        for i, j, _, _ in AP:
            w.add("partner_load_lower", f"clo_k{k}_m{m}_{i}_{j}",
                  [(1, C(i, j, k, m))] + [(-req[r].size, Y(i, j, m, r)) for r in R]
                  + [(-LM, P(i, j, k, m))], ">=", -LM)

    # ---------------------------------------------------------------- release times
    for r in R:
        for i in o_copies[r]:
            w.add("release", f"rel_r{r}_i{i}",
                  [(1, TQ(i, r))] + [(-req[r].release, S(k, r, i)) for k in K], ">=", 0)

    # ---------------------------------------------------------------- variants
    if "time_windows" in variants:
        for fam, copies, attr in (("pickup_window", o_copies, "pickup_window"),
                                  ("dropoff_window", d_copies, "dropoff_window")):
            for r in R:
                win = getattr(req[r], attr)
                if win is None:
                    continue
                a, b = win
                for i in copies[r]:
                    w.add(fam, f"{fam}_lo_r{r}_i{i}",
                          [(1, TQ(i, r))] + [(-a, S(k, r, i)) for k in K], ">=", 0)
                    if math.isfinite(b):
                        w.add(fam, f"{fam}_hi_r{r}_i{i}", [(1, TQ(i, r))], "<=", b)
    if two_rate:
        for k in K:
            for i, j, _, _ in AP:
                w.add("platoon_flag_upper", f"pvup_k{k}_{i}_{j}",
                      [(1, P(i, j, k, m)) for m in K if m != k] + [(-M, PV(i, j, k))], "<=", 0)
        for k in K:
            for i, j, _, _ in AP:
                w.add("platoon_flag_lower", f"pvlo_k{k}_{i}_{j}",
                      [(1, PV(i, j, k))] + [(-1, P(i, j, k, m)) for m in K if m != k], "<=", 0)

    # ---------------------------------------------------------------- declarations
    variables: dict[str, dict] = {}

    def declare(name, symbol, **idx):
        variables[name] = {"symbol": symbol, "indices": idx}

    sink_arcs = [(i, SINK) for i in V]
    for k in K:
        for i, j in [(i, j) for i, j, _, _ in A] + sink_arcs:
            declare(X(i, j, k), "X", i=i, j=j, k=k)
        for i, j, _, _ in A:
            for r in R:
                declare(Y(i, j, k, r), "Y", i=i, j=j, k=k, r=r)
            declare(U(i, j, k), "U", i=i, j=j, k=k)
        for i, j, _, _ in AP:
            declare(PN(i, j, k), "P^N", i=i, j=j, k=k)
            if two_rate:
                declare(PV(i, j, k), "P^V", i=i, j=j, k=k)
        for i, j in O:
            declare(Z(i, j, k), "Z", i=i, j=j, k=k)
        for i in V:
            declare(TV(i, k), "T^V", i=i, k=k)
            declare(TU(i, k), "T^U", i=i, k=k)
        for r in R:
            for i in service_nodes[r]:
                declare(W(k, r, i), "W", k=k, r=r, i=i)
            for i in o_copies[r] + d_copies[r]:
                declare(S(k, r, i), "S", k=k, r=r, i=i)
    for r in R:
        for i in service_nodes[r]:
            declare(TQ(i, r), "T^Q", i=i, r=r)
        for i in V:
            for k, m in pairs:
                declare(F(r, i, k, m), "F", r=r, i=i, k=k, m=m)
    for k, m in pairs:
        for i, j, _, _ in AP:
            declare(P(i, j, k, m), "P", i=i, j=j, k=k, m=m)
            declare(C(i, j, k, m), "C", i=i, j=j, k=k, m=m)

    binaries = [n for n, v in variables.items() if v["symbol"] in ("X", "Y", "S", "F", "P", "P^V")]
    generals = [n for n, v in variables.items() if v["symbol"] == "P^N"]
    continuous = [n for n, v in variables.items()
                  if v["symbol"] in ("T^V", "T^U", "T^Q", "Z", "U", "W", "C")]

    lines = ["\\ modular dial-a-ride model", f"\\ layers={L} big_m={_fmt(M)} load_m={_fmt(LM)}",
             f"\\ objective offset {_fmt(offset)}", "Minimize"]
    obj_terms = []
    for var in variables:
        c = obj.get(var, 0.0)
        if c:
            obj_terms.append(f"{'-' if c < 0 else '+'} {_fmt(abs(c))} {var}")
    lines.append(" obj: " + (_wrap(obj_terms) if obj_terms else "0 " + next(iter(variables))))
    lines.append("Subject To")
    lines.extend(w.rows)
    lines.append("Bounds")
    for n in continuous:
        lines.append(f" {n} >= 0")
    for n in generals:
        lines.append(f" 0 <= {n} <= {params.u - 1}")
    lines.append("Binaries")
    lines.extend(_chunks(binaries))
    lines.append("Generals")
    lines.extend(_chunks(generals))
    lines.append("End")
    census = {f: w.census.get(f, 0) for f in FAMILIES}
    node_map = {i: ln.node_of(i) for i in V}
    return MilpArtifact("\n".join(lines) + "\n", variables, census, offset, M, LM, L, variants,
                        node_map)


def _chunks(names: list[str], per_line: int = 8) -> list[str]:
    return [" " + " ".join(names[i:i + per_line]) for i in range(0, len(names), per_line)]


def solve_milp(art: MilpArtifact, time_limit: float = 600.0, path: str | Path | None = None
               ) -> tuple[float, dict[str, float]]:
    """Solve the exported text with HiGHS; return (objective including offset, solution).

    Raises ``ImportError`` when ``highspy`` is not installed.
    """
    import tempfile

    import highspy

    with tempfile.TemporaryDirectory() as tmp:
        lp = Path(path) if path is not None else Path(tmp) / "model.lp"
        lp.write_text(art.lp_text)
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("time_limit", float(time_limit))
        h.setOptionValue("mip_rel_gap", 0.0)
        h.setOptionValue("mip_abs_gap", 1e-9)
        # big-M rows amplify the default 1e-6 feasibility slack into the objective
        h.setOptionValue("mip_feasibility_tolerance", 1e-9)
        h.setOptionValue("primal_feasibility_tolerance", 1e-9)
        status = h.readModel(str(lp))
        if status != highspy.HighsStatus.kOk:
            raise RuntimeError(f"HiGHS could not read the model: {status}")
        h.run()
        ms = h.getModelStatus()
        if ms != highspy.HighsModelStatus.kOptimal:
            raise RuntimeError(f"HiGHS finished with status {h.modelStatusToString(ms)}")
        lp_model = h.getLp()
        values = h.getSolution().col_value
        names = [h.getColName(i)[1] for i in range(lp_model.num_col_)]
        sol = dict(zip(names, values))
        return h.getInfo().objective_function_value + art.objective_offset, sol
