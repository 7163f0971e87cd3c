import math
import warnings
import xml.etree.ElementTree as ET

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from mdarp.bench import (MatrixConfig, RankDeficiencyError, design_matrix, grid_layout, load_results,
                         ols_fit, regress, render_plan, run_matrix, summarize)
from mdarp.bench.experiments import COLUMNS, cell_seed
from mdarp.heuristic import solve_modular, solve_solo
from mdarp.instance import generate_instance
from mdarp.schedule import cost_difference

from conftest import transfer_instance

# --------------------------------------------------------------------------- matrix


def test_default_grid_has_240_cells():
    assert len(list(MatrixConfig().cells())) == 240


def test_empty_or_unknown_grid_rejected():
    with pytest.raises(ValueError):
        MatrixConfig(sizes=())
    with pytest.raises(ValueError):
        MatrixConfig(spatial=("C4",))
    with pytest.raises(ValueError):
        MatrixConfig(replications=0)


def test_singleton_row(small_road, tmp_path):
    net, _ = small_road
    df = run_matrix(net, MatrixConfig(sizes=((3, 4),), spatial=("C3",), replications=1, seed=2),
                    tmp_path / "r.csv")
    assert len(df) == 1
    row = df.iloc[0]
    assert row["status"] == "ok"
    optional = {"mean_platoon_size"} if row["platoons"] == 0 else set()
    assert not row.drop(list(optional)).isna().any()
    assert row["total_diff"] == pytest.approx(cost_difference(row["solo_total"], row["mod_total"]))
    assert (tmp_path / "r.csv.timing.csv").exists()


GRID = MatrixConfig(sizes=((2, 3), (3, 5)), spatial=("U", "C3"), replications=2, seed=9)


def test_rerun_is_byte_identical(small_road, tmp_path):
    net, _ = small_road
    run_matrix(net, GRID, tmp_path / "a.csv")
    run_matrix(net, GRID, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert list(load_results(tmp_path / "a.csv").columns) == list(COLUMNS)


def test_workers_do_not_change_rows(small_road, tmp_path):
    net, _ = small_road
    run_matrix(net, GRID, tmp_path / "a.csv")
    run_matrix(net, GRID, tmp_path / "b.csv", workers=2)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_rows_are_independent(small_road):
    net, _ = small_road
    full = run_matrix(net, GRID)
    one = run_matrix(net, MatrixConfig(sizes=((3, 5),), spatial=("C3",), replications=2, seed=9))
    sub = full[(full.k == 3) & (full.spatial == "C3")].drop(columns="row").reset_index(drop=True)
    pd.testing.assert_frame_equal(sub, one.drop(columns="row"))


def test_cell_seeds_differ():
    seeds = {cell_seed(0, k, r, s, rep) for k, r, s, rep in MatrixConfig().cells()}
    assert len(seeds) == 240


def test_failures_are_recorded(small_road):
    net, _ = small_road
    df = run_matrix(net, MatrixConfig(sizes=((2, 3),), spatial=("U",), replications=2,
                                      search={"n_recon": 0}))
    assert len(df) == 2
    assert all(s.startswith("error: ValueError") for s in df["status"])


# --------------------------------------------------------------------------- summary


def hand_table():
    rows = [  # solo, modular for all three cost pairs
        ("U", "zero", 100, 90, 10, 2.0),
        ("U", "U04", 100, 95, 20, 3.0),
        ("C3", "zero", 50, 50, 0, math.nan),
        ("C3", "U04", 200, 150, 30, 2.0),
    ]
    recs = []
    for sp, tm, s, m, p100, size in rows:
        recs.append(dict(spatial=sp, temporal=tm, solo_vehicle=s, mod_vehicle=m, solo_service=s,
                         mod_service=m, solo_total=s, mod_total=m, total_diff=999.0,
                         platoons_per_100_veh=p100, mean_platoon_size=size, status="ok"))
    return pd.DataFrame(recs)


def test_summary_by_hand():
    s = summarize(hand_table())
    # diffs are -10, -5, 0, -25 (the stale 999 column is ignored)
    o = s.overall.loc["total_diff"]
    assert o["mean"] == pytest.approx(-10.0)
    assert o["std"] == pytest.approx(math.sqrt(350 / 3))
    assert (o["min"], o["max"]) == (-25.0, 0.0)
    assert s.by_spatial.loc["total_diff", "U"] == pytest.approx(-7.5)
    assert s.by_spatial.loc["total_diff", "C3"] == pytest.approx(-12.5)
    assert s.by_temporal.loc["total_diff", "T = 0"] == pytest.approx(-5.0)
    assert s.by_temporal.loc["total_diff", "[0,4]"] == pytest.approx(-15.0)
    assert s.by_spatial.loc["platoons_per_100_veh", "C3"] == pytest.approx(15.0)
    assert s.by_temporal.loc["platoons_per_100_veh", "[0,4]"] == pytest.approx(25.0)
    assert s.by_spatial.loc["mean_platoon_size", "C3"] == pytest.approx(2.0)
    assert s.n == 4


def test_single_row_summary():
    s = summarize(hand_table().iloc[[3]])
    o = s.overall.loc["vehicle_diff"]
    assert o["mean"] == o["min"] == o["max"] == -25.0


def test_markdown_percent_format():
    df = hand_table().astype({"mod_vehicle": float})
    df.loc[3, "mod_vehicle"] = 200 * (1 - 0.5204)
    text = summarize(df).to_markdown()
    assert "-52.04%" in text
    assert "| Vehicle travel cost |" in text and "Grouped by spatial mode" in text


def test_failed_rows_skipped_and_empty_rejected():
    df = hand_table()
    df.loc[0, "status"] = "error: boom"
    assert summarize(df).n == 3
    df["status"] = "error"
    with pytest.raises(ValueError):
        summarize(df)


# --------------------------------------------------------------------------- OLS


def test_perfect_fit():
    x = np.arange(10.0)
    fit = ols_fit(np.column_stack([x, np.ones(10)]), 4 - 0.5 * x)
    assert fit.r2 == 1.0 and fit.residual_se == pytest.approx(0, abs=1e-12)
    assert fit.coefficients == pytest.approx([-0.5, 4])


def test_planted_model():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, 200)
    y = 2 - 3 * x + rng.normal(0, 0.01, 200)
    fit = ols_fit(np.column_stack([np.ones(200), x]), y, ["Constant", "x"])
    assert abs(fit.coefficients[0] - 2) <= 3 * fit.standard_errors[0]
    assert abs(fit.coefficients[1] + 3) <= 3 * fit.standard_errors[1]
    assert 0 <= fit.adj_r2 <= fit.r2 <= 1
    assert fit.t_stats == pytest.approx(fit.coefficients / fit.standard_errors)


def test_intercept_only_is_mean():
    y = np.array([1.0, 4.0, 7.0, 2.0])
    fit = ols_fit(np.ones((4, 1)), y)
    assert fit.coefficients[0] == pytest.approx(y.mean())
    assert fit.r2 == 0.0


def test_against_independent_solution():
    rng = np.random.default_rng(3)
    X = np.column_stack([np.ones(40), rng.normal(size=(40, 3))])
    y = X @ [1, 2, 0, -1] + rng.normal(size=40)
    fit = ols_fit(X, y)
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    s2 = resid @ resid / (40 - 4)
    se = np.sqrt(np.diag(s2 * np.linalg.inv(X.T @ X)))
    p = 2 * stats.t.sf(np.abs(beta / se), 36)
    assert fit.coefficients == pytest.approx(beta)
    assert fit.standard_errors == pytest.approx(se)
    assert fit.p_values == pytest.approx(p, abs=1e-6)


def test_rank_deficiency_names_columns():
    x = np.arange(6.0)
    X = np.column_stack([np.ones(6), x, 2 * x])
    with pytest.raises(RankDeficiencyError) as exc:
        ols_fit(X, x, ["Constant", "a", "b"])
    assert exc.value.columns == ["b"]


def test_too_few_rows():
    with pytest.raises(ValueError):
        ols_fit(np.ones((1, 2)), [1.0])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_row_order_irrelevant(seed):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(30), rng.normal(size=(30, 2))])
    y = rng.normal(size=30)
    perm = rng.permutation(30)
    a, b = ols_fit(X, y), ols_fit(X[perm], y[perm])
    assert a.coefficients == pytest.approx(b.coefficients, rel=1e-9, abs=1e-12)
    assert a.standard_errors == pytest.approx(b.standard_errors, rel=1e-9, abs=1e-12)


def test_formula_terms():
    df = pd.DataFrame({"total_diff": [1.0, 2, 3, 5, 8, 13], "veh_cap": [4, 5, 6, 7, 4, 5],
                       "spatial": ["U", "C3", "C5", "U", "C3", "C5"],
                       "temporal": ["zero"] * 6})
    X, y, names = design_matrix("total_diff ~ Spatial_C3 + C5 + veh_cap", df)
    assert names == ["Spatial_C3", "C5", "veh_cap", "Constant"]
    assert X[:, 0].tolist() == [0, 1, 0, 0, 1, 0]
    X, _, names = design_matrix("total_diff ~ veh_cap - 1", df)
    assert names == ["veh_cap"]
    with pytest.raises(ValueError, match="unknown term"):
        design_matrix("total_diff ~ bogus", df)
    with pytest.raises(RankDeficiencyError) as exc:
        regress("total_diff ~ C10 + veh_cap", df)
    assert exc.value.columns == ["C10"]


def test_markdown_table():
    x = np.arange(8.0)
    y = 1 + x + np.sin(x)
    md = ols_fit(np.column_stack([x, np.ones(8)]), y, ["x", "Constant"]).to_markdown()
    assert "| Variable | Coefficient | Standard Error | t Stat | P-value |" in md
    assert "| Observations |" in md.splitlines()[0]


# --------------------------------------------------------------------------- rendering


def test_two_vehicle_plan_drawing():
    inst = transfer_instance()
    plan = solve_modular(inst).plan
    with pytest.warns(UserWarning, match="grid layout"):
        svg = render_plan(plan, inst.network)
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    routes = [e for e in root.iter(f"{ns}polyline") if e.get("class") == "route"]
    heavy = [e for e in root.iter(f"{ns}polyline") if e.get("class") == "platoon"]
    assert len(routes) == 2 and len(heavy) == 1
    classes = [e.get("class") for e in root.iter(f"{ns}circle")]
    assert classes.count("join") == 1 and classes.count("split") == 1
    assert classes.count("transfer") == 1


def test_no_platoons_no_heavy_strokes():
    inst = transfer_instance()
    plan = solve_solo(inst)
    coords = grid_layout(inst.network)
    svg = render_plan(plan, inst.network, coords)
    assert 'class="platoon"' not in svg and "stroke-width=\"6\"" not in svg
    dot = render_plan(plan, inst.network, coords, fmt="dot")
    assert dot.startswith("digraph plan {") and "penwidth=6" not in dot


def test_dot_marks_platoon_arcs():
    inst = transfer_instance()
    dot = render_plan(solve_modular(inst).plan, inst.network, grid_layout(inst.network), fmt="dot")
    assert "penwidth=6" in dot and 'xlabel="join"' in dot


def test_large_plan_is_well_formed(road, tmp_path):
    net, coords = road
    inst = generate_instance(net, 25, 50, "C3", "U04", seed=1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        render_plan(solve_solo(inst), net, coords, path=tmp_path / "p.svg")
    root = ET.parse(tmp_path / "p.svg").getroot()
    assert root.tag.endswith("svg")


def test_unknown_format():
    inst = transfer_instance()
    with pytest.raises(ValueError):
        render_plan(solve_solo(inst), inst.network, grid_layout(inst.network), fmt="png")
