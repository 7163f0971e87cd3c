"""Scenario matrix runner and summary tables."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..heuristic.platoon import SearchConfig
from ..heuristic.solver import solve_modular
from ..instance import SPATIAL_MODES, TEMPORAL_MODES, generate_instance
from ..network import Network
from ..schedule import Plan, cost_difference

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
GRID_SIZES = ((5, 8), (5, 10), (10, 15), (10, 20), (15, 20), (15, 30),
               (20, 30), (20, 40), (25, 40), (25, 50))

COLUMNS = (
    "schema_version", "row", "k", "r", "spatial", "temporal", "replication", "seed",
    "alpha", "beta", "eta", "platoon_len", "veh_cap",
    "solo_vehicle", "solo_service", "solo_total",
    "mod_vehicle", "mod_service", "mod_total",
    "vehicle_diff", "service_diff", "total_diff",
    "platoons", "transfers", "platooned_vehicles", "mean_platoon_size",
    "platoons_per_100_veh", "transfers_per_100_req", "vehicles_in_platoon_pct",
    "status",
)
TIMING_COLUMNS = ("row", "seed", "solo_seconds", "modular_seconds")


@dataclass
class MatrixConfig:
    sizes: tuple = GRID_SIZES
    spatial: tuple = ("U", "C10", "C5", "C3")
    temporal: tuple = TEMPORAL_MODES  # one is drawn per instance
    replications: int = 6
    seed: int = 0
    search: dict = field(default_factory=dict)  # SearchConfig overrides

    def __post_init__(self):
        self.sizes = tuple(tuple(int(x) for x in s) for s in self.sizes)
        self.spatial = tuple(self.spatial)
        self.temporal = tuple(self.temporal)
        if not self.sizes or not self.spatial or not self.temporal or self.replications < 1:
            raise ValueError("scenario grid is empty")
        for s in self.spatial:
            if s not in SPATIAL_MODES:
                raise ValueError(f"unknown spatial mode {s!r}")
        for t in self.temporal:
            if t not in TEMPORAL_MODES:
                raise ValueError(f"unknown temporal mode {t!r}")

    @classmethod
    def from_json(cls, path: str | Path, **overrides) -> "MatrixConfig":
        data = json.loads(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def cells(self):
        """Scenario cells in output order: size, then spatial mode, then replication."""
        for k, r in self.sizes:
            for sp in self.spatial:
                for rep in range(self.replications):
                    yield k, r, sp, rep


def cell_seed(master: int, k: int, r: int, spatial: str, rep: int) -> int:
    """Per-instance seed, independent of every other cell."""
    key = f"{master}|{k}|{r}|{spatial}|{rep}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def plan_metrics(plan: Plan, n_vehicles: int, n_requests: int) -> dict:
    members = [len(p.members) for p in plan.platoons.values()]
    platooned = set().union(*(p.members for p in plan.platoons.values())) if members else set()
    return {
        "platoons": len(members),
        "transfers": len(plan.transfers),
        "platooned_vehicles": len(platooned),
        "mean_platoon_size": float(np.mean(members)) if members else float("nan"),
        "platoons_per_100_veh": 100.0 * len(members) / n_vehicles,
        "transfers_per_100_req": 100.0 * len(plan.transfers) / n_requests,
        "vehicles_in_platoon_pct": 100.0 * len(platooned) / n_vehicles,
    }


def _run_cell(args) -> tuple[dict, dict]:
    net, master, idx, (k, r, sp, rep), temporal_modes, search = args
    seed = cell_seed(master, k, r, sp, rep)
    temporal = temporal_modes[int(np.random.default_rng([seed, 1]).integers(len(temporal_modes)))]
    row = dict.fromkeys(COLUMNS, "")
    row.update(schema_version=SCHEMA_VERSION, row=idx, k=k, r=r, spatial=sp, temporal=temporal,
               replication=rep, seed=seed)
    timing = {"row": idx, "seed": seed, "solo_seconds": "", "modular_seconds": ""}
    try:
        inst = generate_instance(net, k, r, sp, temporal, seed=seed)
        p = inst.params
        row.update(alpha=p.alpha, beta=p.beta, eta=p.eta, platoon_len=p.u,
                   veh_cap=inst.vehicles[0].capacity)
        t0 = time.perf_counter()
        res = solve_modular(inst, SearchConfig(**{"seed": seed % 2**32, **search}))
        timing["modular_seconds"] = round(time.perf_counter() - t0, 3)
        timing["solo_seconds"] = round(res.timings.get("solo", float("nan")), 3)
        s, m = res.solo_cost, res.cost
        row.update(solo_vehicle=s.vehicle_travel_cost, solo_service=s.passenger_service_time,
                   solo_total=s.total, mod_vehicle=m.vehicle_travel_cost,
                   mod_service=m.passenger_service_time, mod_total=m.total)
        row.update(_diffs(row))
        row.update(plan_metrics(res.plan, k, r))
        row["status"] = "ok"
    except Exception as exc:  # recorded, never fatal for the matrix
        log.warning("cell %s failed: %s", idx, exc)
        row["status"] = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
    return row, timing


def _diffs(row) -> dict:
    return {"vehicle_diff": cost_difference(row["solo_vehicle"], row["mod_vehicle"]),
            "service_diff": cost_difference(row["solo_service"], row["mod_service"]),
            "total_diff": cost_difference(row["solo_total"], row["mod_total"])}


def run_matrix(net: Network, config: MatrixConfig, out: str | Path | None = None,
               workers: int = 1) -> pd.DataFrame:
    """Run every scenario cell; write ``out`` (CSV) and ``out.timing.csv``.

    Wall-clock times live in the sidecar so the main table is byte-identical
    across reruns with the same master seed.
    """
    jobs = [(net, config.seed, i, cell, config.temporal, config.search)
            for i, cell in enumerate(config.cells())]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_cell, jobs))  # map keeps grid order
    else:
        results = [_run_cell(j) for j in jobs]
    rows = [r for r, _ in results]
    if out is not None:
        out = Path(out)
        write_rows(out, rows, COLUMNS)
        write_rows(out.with_name(out.name + ".timing.csv"), [t for _, t in results], TIMING_COLUMNS)
    df = pd.DataFrame([{k: (np.nan if v == "" else v) for k, v in r.items()} for r in rows],
                      columns=list(COLUMNS))
    return df.infer_objects()


def write_rows(path: Path, rows, columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({c: _cell(row[c]) for c in columns})


def _cell(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return v


def load_results(path: str | Path) -> pd.DataFrame:
    df = pd.read_csv(path, keep_default_na=False, na_values=[""])
    if "schema_version" in df and len(df) and int(df["schema_version"].iloc[0]) != SCHEMA_VERSION:
        raise ValueError(f"results schema {df['schema_version'].iloc[0]} != {SCHEMA_VERSION}")
    return df


# --------------------------------------------------------------------------- summary

TEMPORAL_LABELS = {"U04": "[0,4]", "U01": "[0,1]", "zero": "T = 0"}
METRICS = ("vehicle_diff", "service_diff", "total_diff", "platoons_per_100_veh",
           "transfers_per_100_req", "vehicles_in_platoon_pct", "mean_platoon_size")
METRIC_LABELS = {
    "vehicle_diff": "Vehicle travel cost",
    "service_diff": "Request service time",
    "total_diff": "Total cost",
    "platoons_per_100_veh": "Number of platoons (per 100 vehicles)",
    "transfers_per_100_req": "En-route transfers (per 100 requests)",
    "vehicles_in_platoon_pct": "Vehicles in platoon (%)",
    "mean_platoon_size": "Platoon size (avg.)",
}


@dataclass
class Summary:
    overall: pd.DataFrame        # rows: cost metric, columns: mean/std/min/max
    by_spatial: pd.DataFrame     # rows: metric, columns: spatial mode
    by_temporal: pd.DataFrame    # rows: metric, columns: temporal mode
    n: int

    def to_markdown(self) -> str:
        out = [f"# Cost differences (n = {self.n})", "", "| Metric | Mean | Std | Min | Max |",
               "|---|---|---|---|---|"]
        for name, rec in self.overall.iterrows():
            out.append(f"| {METRIC_LABELS[name]} | "
                       + " | ".join(_pct(rec[c]) for c in ("mean", "std", "min", "max")) + " |")
        for title, tab in (("Grouped by spatial mode", self.by_spatial),
                           ("Grouped by temporal mode", self.by_temporal)):
            cols = list(tab.columns)
            out += ["", f"## {title}", "", "| Metric | " + " | ".join(map(str, cols)) + " |",
                    "|---" * (len(cols) + 1) + "|"]
            for name, rec in tab.iterrows():
                fmt = _pct if name.endswith("diff") or name.endswith("pct") else _num
                out.append(f"| {METRIC_LABELS[name]} | " + " | ".join(fmt(rec[c]) for c in cols) + " |")
        return "\n".join(out) + "\n"


def _pct(x) -> str:
    return "n/a" if pd.isna(x) else f"{x:+.2f}%" if x > 0 else f"{x:.2f}%"


def _num(x) -> str:
    return "n/a" if pd.isna(x) else f"{x:.2f}"


def summarize(results: pd.DataFrame) -> Summary:
    """Overall statistics and grouped means; differences are recomputed from the breakdowns."""
    df = results
    if "status" in df:
        df = df[df["status"] == "ok"]
    if df.empty:
        raise ValueError("no successful rows to summarize")
    df = df.copy()
    for col, (s, m) in {"vehicle_diff": ("solo_vehicle", "mod_vehicle"),
                        "service_diff": ("solo_service", "mod_service"),
                        "total_diff": ("solo_total", "mod_total")}.items():
        df[col] = [cost_difference(a, b) for a, b in zip(df[s], df[m])]
    cost_cols = ["vehicle_diff", "service_diff", "total_diff"]
    overall = pd.DataFrame({"mean": df[cost_cols].mean(), "std": df[cost_cols].std(ddof=1),
                            "min": df[cost_cols].min(), "max": df[cost_cols].max()})
    metrics = [m for m in METRICS if m in df]
    sp_order = [s for s in ("U", "C10", "C5", "C3") if s in set(df["spatial"])]
    by_spatial = df.groupby("spatial")[metrics].mean().T.reindex(columns=sp_order)
    tm = df.groupby("temporal")[metrics].mean().T
    tm_order = [t for t in ("U04", "U01", "zero") if t in tm.columns]
    by_temporal = tm.reindex(columns=tm_order).rename(columns=TEMPORAL_LABELS)
    return Summary(overall, by_spatial, by_temporal, len(df))


def config_dict(config: MatrixConfig) -> dict:
    d = asdict(config)
    d["sizes"] = [list(s) for s in config.sizes]
    return d
