import json
import math

import numpy as np
import pytest

from heinzlab import lab
from heinzlab import operators as ops
from heinzlab import scalar as sc


def small_cfg(**kw):
    base = dict(lambda_grid=[0.1, 0.5, 0.9], spd_dims=[2, 3], ensemble_size=4,
                functional_size=1, grid_lambda_grid=[0.3], grid_n=65,
                search_t_points=200, search_lambda_points=50)
    base.update(kw)
    return lab.SweepConfig(**base)


def test_default_sweep_shape():
    cfg = lab.SweepConfig()
    assert len(cfg.lambda_grid) == 21 and cfg.lambda_grid[0] == 0.01 and cfg.lambda_grid[-1] == 0.99
    assert len(cfg.ab_grid) == 13 and cfg.ab_grid[0] == pytest.approx(1e-3)
    assert cfg.p_grid == [0.0, 0.25, 0.5, 0.75, 1.0]


@pytest.mark.parametrize("kw", [{"lambda_grid": []}, {"p_grid": [1.5]}, {"ab_grid": [0.0]},
                                {"spd_dims": [0]}, {"ensemble_size": 0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        lab.SweepConfig(**kw)


def test_every_check_id_is_registered():
    rep = lab.run_all(small_cfg())
    assert set(rep.checks) <= {f"{s}/{c}" for s in ("scalar", "operator", "functional") for c in lab.CHECKS}
    assert rep.ok


def test_tally_records_and_sorts_violations():
    rep = lab.Report("t", {})
    tally = lab.Tally(rep)
    tally.add("op-young", np.array([3e-8, -1.0, 2e-8]), 1e-8, lambda i: {"pair": int(i[0])})
    tally.finish(0.0)
    assert [v.params["pair"] for v in rep.violations] == [0, 2]
    assert rep.worst_residual == pytest.approx(3.0)
    assert rep.checks["op-young"]["violations"] == 2
    with pytest.raises(KeyError):
        tally.add("nope", [0.0], 1.0, dict)
    with pytest.raises(FloatingPointError):
        tally.add("op-young", [math.nan], 1.0, dict)


def test_operator_suite_deterministic():
    a = lab.run_operator_suite(small_cfg())
    b = lab.run_operator_suite(small_cfg())
    assert a.checks == b.checks and a.worst_residual == b.worst_residual


def test_operator_checks_on_1x1_match_scalar_sandwiches():
    a, b = 0.3, 40.0
    checks = lab.operator_checks(np.array([[a]]), np.array([[b]]), [0.25], [0.5])
    by_id = {}
    for cid, _, _, T, S in checks:
        by_id.setdefault(cid, []).append(float((S - T)[0, 0]))
    gm, am = math.sqrt(a * b), (a + b) / 2
    hz = sc.heinz(a, b, 0.25)
    assert by_id["op-heinz-sandwich"] == pytest.approx([hz - gm, am - hz])
    lo, hi = sc.young_gap_bounds(a, b, 0.25)
    gap = sc.weighted_mean(a, b, 0.25) - sc.weighted_mean(a, b, 0.25, "geometric")
    assert by_id["op-young-refine"] == pytest.approx([gap - lo, hi - gap])


def test_equal_pair_gives_nonnegative_margins():
    A = ops.random_spd(np.random.default_rng(0), 4)
    checks = lab.operator_checks(A, A, [0.2, 0.5], [0.0, 1.0])
    T = np.stack([c[3] for c in checks])
    S = np.stack([c[4] for c in checks])
    D = ops.symmetrize(S - T)
    assert np.linalg.eigvalsh(D).min() >= -1e-13 * np.abs(A).max()


def test_report_formats():
    rep = lab.run_scalar_suite(small_cfg(ab_grid=[0.5, 2.0]))
    d = json.loads(rep.to_json())
    assert {"suite", "config", "cases_run", "violations", "worst_residual", "elapsed_s"} <= set(d)
    csv_lines = rep.to_csv().splitlines()
    assert csv_lines[0] == "check_id,lambda,p,a,b,dim,seed,residual,pass"
    assert all(line.endswith("true") for line in csv_lines[1:])
    assert "young-refine" in rep.to_text()


def test_counterexamples_report():
    rep = lab.reproduce_counterexamples()
    assert rep.ok and rep.elapsed_s < 1.0
    assert float(rep.extra["f_0.9"]["0.75"]) < 0


def test_search_is_labelled_evidence():
    rep = lab.search_open_inequality(small_cfg())
    assert any("not a proof" in n for n in rep.notes)
    assert rep.extra["minimum"] >= -1e-9
    assert rep.extra["minimum"] <= rep.extra["grid_minimum"]


def test_grid_library_pairs_are_convex_samples():
    for f, g in lab.grid_library(33).values():
        for h in (f, g):
            y = h.vals[h.dom]
            assert np.all(y[2:] - 2 * y[1:-1] + y[:-2] >= -1e-12)


def test_sabotaged_mean_is_caught(monkeypatch):
    real = sc.heinz
    monkeypatch.setattr(sc, "heinz", lambda a, b, l: real(a, b, l) * (1 + 1e-6))
    rep = lab.run_scalar_suite(small_cfg(ab_grid=[0.5, 2.0]))
    assert not rep.ok
    assert "heinz-sandwich" in {v.check_id for v in rep.violations}
    assert rep.worst_residual > 1


def test_sabotaged_operator_mean_is_caught(monkeypatch):
    real = ops.sharp_many
    monkeypatch.setattr(ops, "sharp_many", lambda A, B, ts: real(A, B, ts) * 1.01)
    rep = lab.run_operator_suite(small_cfg(spd_dims=[2], ensemble_size=2))
    assert not rep.ok
    v = rep.violations[0]
    assert "A:" in v.witness and "eigenvector" in v.witness
