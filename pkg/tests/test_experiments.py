import csv
import json

import numpy as np
import pytest

from ecdsim.experiments import (
    ScanResult,
    default_tf_grid,
    run_dissipation_grid,
    run_ecd_scan,
    run_gap_report,
    run_robustness,
    run_sweep_comparison,
)
from ecdsim.model import TWO_PI


class TestGrid:
    def test_default_tf_grid(self):
        grid = default_tf_grid()
        assert grid[0] == pytest.approx(10e-9)
        assert grid[-1] == pytest.approx(10e-6)
        assert len(grid) == 121
        ratios = grid[1:] / grid[:-1]
        assert np.allclose(ratios, ratios[0])


class TestScanResult:
    def test_write_roundtrip(self, tmp_path):
        result = ScanResult(
            rows=[{"x": 1.5, "status": "ok"}, {"x": float("nan"),
                                               "status": "error: boom"}],
            metadata={"experiment": "demo"},
        )
        base = tmp_path / "demo"
        path = result.write(str(base))
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["x"] == "1.500000000000e+00"
        assert rows[1]["status"] == "error: boom"
        meta = json.loads((tmp_path / "demo.meta.json").read_text())
        assert meta["experiment"] == "demo"
        assert len(result.ok_rows()) == 1


class TestSweepComparison:
    def test_rows_and_metadata(self, params):
        result = run_sweep_comparison([50e-9, 20e-9], kinds=("lz",),
                                      params=params)
        assert [r["t_f_s"] for r in result.rows] == [20e-9, 50e-9]
        for row in result.rows:
            assert row["status"] == "ok"
            assert 0.0 <= row["infidelity"] <= 1.0
        assert result.metadata["experiment"] == "sweep-compare"
        assert result.metadata["derived"]["f0"] == pytest.approx(0.2)

    def test_infidelity_decreases_with_duration(self, params):
        result = run_sweep_comparison([20e-9, 2e-6], kinds=("pl",),
                                      params=params)
        fast, slow = result.rows[0], result.rows[1]
        assert slow["infidelity"] < fast["infidelity"]


class TestEcdScan:
    def test_modes_and_columns(self, params):
        result = run_ecd_scan([50e-9], k_list=(1.0,),
                              fixed_omegas_hz=(1e9,), params=params,
                              n_grid=801)
        modes = {row["mode"] for row in result.rows}
        assert modes == {"ceiling", "fixed"}
        for row in result.rows:
            assert row["status"] == "ok"
            assert row["omega_rad_s"] > 0
        ceiling_row = next(r for r in result.rows if r["mode"] == "ceiling")
        assert ceiling_row["ceiling_binding"] in ("yes", "no")


class TestRobustness:
    def test_deterministic_for_fixed_seed(self, params):
        kwargs = dict(n_eps=3, seed=7, params=params,
                      omega=TWO_PI * 1e9, n_grid=801)
        a = run_robustness([30e-9], **kwargs)
        b = run_robustness([30e-9], **kwargs)
        assert a.rows == b.rows

    def test_seed_changes_samples(self, params):
        a = run_robustness([30e-9], n_eps=3, seed=0, params=params,
                           omega=TWO_PI * 1e9, n_grid=801)
        b = run_robustness([30e-9], n_eps=3, seed=1, params=params,
                           omega=TWO_PI * 1e9, n_grid=801)
        assert a.rows[0]["infidelity_mean"] != b.rows[0]["infidelity_mean"]

    def test_row_statistics_consistent(self, params):
        result = run_robustness([30e-9], n_eps=4, seed=0, params=params,
                                omega=TWO_PI * 1e9, n_grid=801)
        row = result.rows[0]
        assert row["status"] == "ok"
        assert row["infidelity_min"] <= row["infidelity_mean"] \
            <= row["infidelity_max"]
        assert row["n_eps"] == 4


class TestDissipation:
    def test_zero_rate_point(self, params):
        result = run_dissipation_grid([0.0], [0.0], t_f=100e-9,
                                      params=params, omega=TWO_PI * 7e9,
                                      n_grid=801)
        row = result.rows[0]
        assert row["status"] == "ok"
        assert 0.97 < row["fidelity"] <= 1.0 + 1e-9


class TestGapReport:
    def test_contents(self, params):
        report = run_gap_report(params)
        assert report["two_g0_mhz"] == pytest.approx(2.265707854, rel=1e-6)
        assert report["renorm_over_rwa"] == pytest.approx(
            report["renormalized_coupling_rad_s"]
            / report["rwa_coupling_rad_s"])
        assert report["gap_enlarged_by_counter_rotating"] is True
