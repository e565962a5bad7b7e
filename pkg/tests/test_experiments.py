import math

import numpy as np
import pytest

from qslkit import (
    BdTestConfig,
    HMinConfig,
    NoiseScanConfig,
    OatGridConfig,
    SummaryStats,
    ValidationError,
    XYScanConfig,
    run_bd_test,
    run_h_min_table,
    run_noise_scan,
    run_oat_grid,
    run_xy_scan,
    write_csv,
)


def test_summary_stats_guards_fractions():
    with pytest.raises(ValidationError):
        SummaryStats({"bad_fraction": 1.2})
    with pytest.raises(ValidationError):
        SummaryStats({"bad_fraction": -0.1})
    s = SummaryStats({"ok_fraction": 0.5, "anything": 42.0,
                      "nan_fraction": math.nan})
    assert s["ok_fraction"] == 0.5


def test_bd_test_small_uniform():
    res = run_bd_test(BdTestConfig(n_pairs=300, seed=11))
    s = res.stats
    assert 0.8 < s["positive_fraction"] < 1.0
    assert s["unreached_fraction"] == 0.0
    total = (s["positive_fraction"] + s["equality_fraction"]
             + np.mean(res.tables["bd_test"].column("diff") < -1e-12))
    assert total == pytest.approx(1.0, abs=1e-12)
    assert len(res.tables["bd_test"].rows) == 300
    assert res.tables["bd_test"].header[:2] == ("index", "e0")


def test_bd_test_symmetric_mode_never_undercuts():
    res = run_bd_test(BdTestConfig(n_pairs=300, seed=11, mode="symmetric"))
    s = res.stats
    assert s["nonnegative_fraction"] == 1.0
    # equality happens exactly when the drawn pair is the extreme one
    assert 0.03 < s["equality_fraction"] < 0.2


def test_bd_test_is_deterministic_and_worker_invariant(tmp_path):
    cfg = BdTestConfig(n_pairs=200, seed=4)
    a = run_bd_test(cfg)
    b = run_bd_test(cfg)
    assert a.tables["bd_test"].rows == b.tables["bd_test"].rows
    c = run_bd_test(BdTestConfig(n_pairs=200, seed=4, workers=2))
    assert a.tables["bd_test"].rows == c.tables["bd_test"].rows
    p1 = write_csv(tmp_path / "a.csv", a.tables["bd_test"])
    p2 = write_csv(tmp_path / "c.csv", c.tables["bd_test"])
    assert p1.read_bytes() == p2.read_bytes()


def test_bd_test_rejects_bad_mode():
    with pytest.raises(ValidationError):
        BdTestConfig(mode="gaussian")
    with pytest.raises(ValidationError):
        BdTestConfig(dim=1)


def test_xy_scan_small():
    res = run_xy_scan(XYScanConfig(n_states=500, seed=3))
    s = res.stats
    assert s["violations_in_valid_region"] == 0.0
    assert 0.6 < s["in_s_fraction"] <= 1.0
    t = res.tables["xy_scan"]
    assert len(t.rows) == 500
    violation = t.column("violation") == 1.0
    assert float(violation.sum()) == s["violation_count"]
    in_s = t.column("in_s") == 1.0
    valid = t.column("bd_valid") == 1.0
    assert not np.any(violation & valid)
    assert np.all(in_s[violation])
    # the tangent value ignores the positivity corner, so it can only
    # overshoot the constrained worst case; they agree on the tangent
    # branch
    tau_m = t.column("tau_m")
    tau_t = t.column("tau_bd")
    ok = np.isfinite(tau_m) & np.isfinite(tau_t)
    assert np.all(tau_m[ok] <= tau_t[ok] + 1e-12)
    assert np.any(np.abs(tau_m[ok] - tau_t[ok]) <= 1e-12)


def test_oat_grid_small():
    cfg = OatGridConfig(fraction_grid=201, table_grid=41, curve_points=51,
                        phi_points=41)
    res = run_oat_grid(cfg)
    s = res.stats
    assert s["tau_delta0"] == pytest.approx(
        4.0 * cfg.theta / (cfg.chi * cfg.n**2), rel=1e-14
    )
    assert 0.05 < s["r_lt_1pct_fraction"] < 0.11
    assert 0.12 < s["r_band_1_to_10pct_fraction"] < 0.21
    assert s["min_ratio"] >= -1e-9
    assert abs(
        s["r_lt_1pct_fraction"] + s["r_band_1_to_10pct_fraction"]
        - s["r_lt_10pct_fraction"]
    ) <= 1e-12
    assert len(res.tables["oqsl_curve"].rows) == 51
    assert len(res.tables["profiles"].rows) == 4 * 41
    assert len(res.tables["ratio_grid"].rows) == 41 * 41
    # the curve is the closed-form oqsl, non-increasing in delta
    taus = res.tables["oqsl_curve"].column("tau")
    assert np.all(np.diff(taus) <= 1e-15)


def test_noise_scan_tiny():
    cfg = NoiseScanConfig(
        n_states=6, gamma_grid=(0.0, 0.2), horizon=60.0, seed=7
    )
    res = run_noise_scan(cfg)
    s = res.stats
    assert s["zero_gamma_fraction"] == 1.0
    assert s["max_gamma_fraction"] == 0.0
    assert s["spearman_rho"] <= -0.9
    t = res.tables["reach_counts"]
    assert [row[0] for row in t.rows] == [0.0, 0.2]
    assert all(row[2] == 6 for row in t.rows)


def test_h_min_table_small():
    res = run_h_min_table(HMinConfig(theta_points=9))
    assert res.stats["global_min"] >= 1.0 - 1e-9
    t = res.tables["h_min"]
    assert len(t.rows) == 9
    assert float(t.column("min_value").min()) == res.stats["global_min"]
    np.testing.assert_allclose(
        t.column("min_value"),
        np.minimum(t.column("h1_min"), t.column("h2_min")),
        atol=0,
    )
