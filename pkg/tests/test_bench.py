import csv
import itertools
import json

import numpy as np
import pytest

from glen.bench import (
    CsvParseError,
    ExperimentConfig,
    RunRecord,
    cgl_baseline,
    config_from_json,
    config_to_json,
    export_report,
    ingest_csv_matrix,
    run_suite,
    select_structure_setting,
    select_weight_setting,
)
from glen.graphs import ErdosRenyi, GraphModelSpec, validate_laplacian
from glen.metrics import EvalReport
from glen.simulate import SyntheticDatasetSpec, generate_dataset


def tiny_config(**kw):
    base = dict(
        models={"er": GraphModelSpec(ErdosRenyi(p=0.4), n_nodes=8)},
        n_graphs=2, n_signals=100,
        methods=("glen", "cgl-baseline"),
        alphas=(0.05, 0.1), betas=(0.4,), seed=5,
    )
    base.update(kw)
    return ExperimentConfig(**base)


# -- config validation -----------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        tiny_config(n_graphs=0)
    with pytest.raises(ValueError):
        tiny_config(methods=("glen", "mystery"))
    with pytest.raises(ValueError):
        tiny_config(alphas=())
    with pytest.raises(ValueError):
        tiny_config(models={})


def test_grid_for_methods():
    cfg = tiny_config(methods=("glen", "glen-tv", "cgl-baseline"),
                      gammas=(0.1, 0.5))
    assert cfg.grid_for("cgl-baseline") == [(0.05, 0.0, 0.0), (0.1, 0.0, 0.0)]
    assert cfg.grid_for("glen") == [(0.05, 0.4, 0.0), (0.1, 0.4, 0.0)]
    assert len(cfg.grid_for("glen-tv")) == 4


def test_config_json_round_trip():
    cfg = tiny_config()
    assert config_from_json(config_to_json(cfg)) == cfg


# -- suite execution -------------------------------------------------------


def test_run_suite_complete_and_deterministic():
    cfg = tiny_config()
    r1 = run_suite(cfg)
    r2 = run_suite(cfg)
    # 2 grid points x 2 graphs x 2 methods
    assert len(r1) == 8
    assert all(r.converged for r in r1)
    keys = [(r.model, r.method, r.alpha, r.beta, r.gamma, r.graph_index)
            for r in r1]
    assert keys == sorted(keys)
    for a, b in zip(r1, r2):
        assert a.report == b.report and a.converged == b.converged


def test_run_suite_records_failures_without_aborting():
    cfg = tiny_config(family="nonsense")
    records = run_suite(cfg)
    assert len(records) == 8
    assert all(not r.converged for r in records)
    assert all(r.report is None for r in records)
    assert all("nonsense" in r.error for r in records)


# -- baseline --------------------------------------------------------------


def test_cgl_baseline_valid_and_rejects_negative():
    spec = SyntheticDatasetSpec(
        graph_spec=GraphModelSpec(ErdosRenyi(p=0.4), n_nodes=8),
        n_signals=200, seed=2)
    ds = generate_dataset(spec, 0)
    L = cgl_baseline(ds.X, 0.05)
    validate_laplacian(L)
    with pytest.raises(ValueError):
        cgl_baseline(-np.ones((3, 4)), 0.05)


# -- selection rules -------------------------------------------------------


def fake_record(alpha, beta, f, re, graph=0):
    rep = EvalReport(precision=0.5, recall=0.5, f_score=f, nmi=0.1, re_l=re,
                     re_edge_l1=re, re_edge_l2=re, re_deg_l1=re, re_deg_l2=re)
    return RunRecord("m", graph, "glen", alpha, beta, 0.0, rep, 0.0, True)


def test_selection_brute_force_oracle():
    rng = np.random.default_rng(0)
    alphas = [0.01, 0.05, 0.1]
    betas = [0.2, 0.5]
    records = []
    table = {}
    for a, b in itertools.product(alphas, betas):
        fs = rng.uniform(0.4, 0.9, 3)
        res = rng.uniform(0.2, 0.8, 3)
        table[(a, b, 0.0)] = (fs.mean(), res.mean())
        records += [fake_record(a, b, f, r, g)
                    for g, (f, r) in enumerate(zip(fs, res))]
    rng.shuffle(records)

    s_point, s_means = select_structure_setting(records)
    best_f = max(v[0] for v in table.values())
    assert table[s_point][0] == pytest.approx(best_f)
    assert s_means["f_score"] == pytest.approx(best_f)

    w_point, w_means = select_weight_setting(records)
    eligible = {k: v for k, v in table.items() if v[0] >= best_f - 0.02}
    assert table[w_point][1] == pytest.approx(min(v[1] for v in eligible.values()))
    # weight pick never concedes more than the window in structure score
    assert w_means["f_score"] >= s_means["f_score"] - 0.02


def test_selection_tie_breaking():
    records = [
        fake_record(0.1, 0.2, 0.8, 0.5),
        fake_record(0.05, 0.2, 0.8, 0.3),  # same F, lower RE wins
        fake_record(0.2, 0.2, 0.7, 0.1),
    ]
    point, _ = select_structure_setting(records)
    assert point == (0.05, 0.2, 0.0)
    # exact tie in both -> lexicographically smallest point
    records = [fake_record(0.1, 0.2, 0.8, 0.3), fake_record(0.05, 0.2, 0.8, 0.3)]
    assert select_structure_setting(records)[0] == (0.05, 0.2, 0.0)


def test_selection_ignores_failed_runs():
    records = [fake_record(0.1, 0.2, 0.9, 0.3),
               RunRecord("m", 1, "glen", 0.05, 0.2, 0.0, None, 0.0, False, "x")]
    assert select_structure_setting(records)[0] == (0.1, 0.2, 0.0)
    with pytest.raises(ValueError):
        select_structure_setting([records[1]])


# -- CSV ingestion ---------------------------------------------------------


def test_ingest_csv_matrix_good(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1,2,3\n4,5.5,-6\n")
    np.testing.assert_allclose(ingest_csv_matrix(p),
                               [[1, 2, 3], [4, 5.5, -6]])


def test_ingest_csv_matrix_header(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("a,b\n1,2\n")
    np.testing.assert_allclose(ingest_csv_matrix(p, header=True), [[1, 2]])


def test_ingest_csv_errors_name_location(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,oops\n")
    with pytest.raises(CsvParseError, match="row 2, column 2"):
        ingest_csv_matrix(p)
    p.write_text("1,2\n3\n")
    with pytest.raises(CsvParseError, match="ragged row 2"):
        ingest_csv_matrix(p)
    p.write_text("")
    with pytest.raises(CsvParseError, match="no data rows"):
        ingest_csv_matrix(p)


# -- report export ---------------------------------------------------------


def test_export_report(tmp_path):
    records = run_suite(tiny_config())
    export_report(records, tmp_path)
    with open(tmp_path / "records.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(records)
    assert float(rows[0]["f_score"]) == records[0].report.f_score
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary) == {"er"}
    assert set(summary["er"]) == {"glen", "cgl-baseline"}
    for method in summary["er"].values():
        assert {"structure", "weight"} <= set(method)
        assert 0.0 <= method["structure"]["f_score"] <= 1.0
        assert method["weight"]["re_l"] <= method["structure"]["re_l"] + 1e-12
