import textwrap

import numpy as np
import pytest
from click.testing import CliRunner

from netcurv.cli import main
from netcurv.pipeline import (
    IngestError,
    PipelineConfig,
    emit_network_snapshot,
    indicators_csv_bytes,
    ingest_prices,
    network_snapshot,
    run_pipeline,
)

from .panels import factor_returns, panel_csv_text, panel_from_returns, small_demo_panel


def write_csv(tmp_path, text, name="prices.csv"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return path


class TestIngest:
    def test_clean_panel(self, tmp_path):
        path = write_csv(tmp_path, """\
            date,AAA,BBB,CCC
            2020-01-01,10,20,30
            2020-01-02,10.5,19,31
            2020-01-03,10.7,19.5,30.5
        """)
        panel = ingest_prices(path)
        assert panel.rows == 3
        assert panel.tickers == ("AAA", "BBB", "CCC")
        assert panel.index_prices is None

    def test_index_column_split_off(self, tmp_path):
        path = write_csv(tmp_path, """\
            date,AAA,INDEX,BBB
            2020-01-01,10,100,20
            2020-01-02,11,101,21
            2020-01-03,12,103,22
        """)
        panel = ingest_prices(path)
        assert panel.tickers == ("AAA", "BBB")
        assert panel.index_prices == pytest.approx([100.0, 101.0, 103.0])

    def test_missing_cell_drop_policy(self, tmp_path, caplog):
        path = write_csv(tmp_path, """\
            date,AAA,BBB
            2020-01-01,10,20
            2020-01-02,,21
            2020-01-03,12,22
            2020-01-04,13,23
        """)
        panel = ingest_prices(path, policy="drop")
        assert panel.rows == 3
        assert "2020-01-02" not in panel.dates

    def test_missing_cell_ffill_policy(self, tmp_path):
        path = write_csv(tmp_path, """\
            date,AAA,BBB
            2020-01-01,10,20
            2020-01-02,,21
            2020-01-03,12,22
        """)
        panel = ingest_prices(path, policy="ffill")
        assert panel.rows == 3
        assert panel.prices[1, 0] == 10.0

    def test_ffill_drops_leading_gap_rows(self, tmp_path):
        path = write_csv(tmp_path, """\
            date,AAA,BBB
            2020-01-01,,20
            2020-01-02,11,21
            2020-01-03,12,22
        """)
        panel = ingest_prices(path, policy="ffill", min_rows=2)
        assert panel.rows == 2

    def test_nonpositive_price_names_row_and_ticker(self, tmp_path):
        path = write_csv(tmp_path, """\
            date,AAA,BBB
            2020-01-01,10,20
            2020-01-02,-1,21
            2020-01-03,12,22
        """)
        with pytest.raises(IngestError, match="AAA.*row 3"):
            ingest_prices(path)

    @pytest.mark.parametrize("rows,message", [
        ("2020-01-02,10,20\n2020-01-02,11,21", "duplicate dates"),
        ("2020-01-03,10,20\n2020-01-02,11,21", "ascending"),
        ("2020-01-02,abc,20\n2020-01-03,11,21", "non-numeric"),
    ])
    def test_structural_errors(self, tmp_path, rows, message):
        path = write_csv(tmp_path, f"date,AAA,BBB\n{rows}\n")
        with pytest.raises(IngestError, match=message):
            ingest_prices(path)

    def test_all_missing_column(self, tmp_path):
        path = write_csv(tmp_path, """\
            date,AAA,BBB
            2020-01-01,10,
            2020-01-02,11,
        """)
        with pytest.raises(IngestError, match="no values"):
            ingest_prices(path)

    def test_too_few_rows_after_cleaning(self, tmp_path):
        path = write_csv(tmp_path, """\
            date,AAA,BBB
            2020-01-01,10,20
            2020-01-02,,21
            2020-01-03,12,22
        """)
        with pytest.raises(IngestError, match="clean rows"):
            ingest_prices(path, policy="drop", min_rows=3)

    def test_bad_header(self, tmp_path):
        path = write_csv(tmp_path, "time,AAA\n1,2\n")
        with pytest.raises(IngestError, match="date"):
            ingest_prices(path)


class TestRunPipeline:
    def test_epoch_count_matches_window_arithmetic(self):
        panel = panel_from_returns(factor_returns(10, 199, rho=0.3, seed=1))
        result = run_pipeline(PipelineConfig(), panel)  # 200 price rows
        assert result.series.row_count() == (199 - 22) // 5 + 1 == 36

    def test_curvature_columns_follow_flags(self):
        panel = small_demo_panel(with_index=False)
        base = run_pipeline(PipelineConfig(tau=22, delta=22), panel)
        trimmed = run_pipeline(
            PipelineConfig(tau=22, delta=22, ollivier=False, haantjes=False), panel)
        assert "ore" in base.series.columns and "hre" in base.series.columns
        assert "ore" not in trimmed.series.columns
        assert "hre" not in trimmed.series.columns
        for col in ("mu", "sigma_p", "ne", "ce", "fre", "edge_count"):
            assert trimmed.series.data[col] == pytest.approx(base.series.data[col])

    def test_index_columns_only_with_index(self):
        with_idx = run_pipeline(PipelineConfig(delta=22), small_demo_panel(with_index=True))
        without = run_pipeline(PipelineConfig(delta=22), small_demo_panel(with_index=False))
        assert "r" in with_idx.series.columns and "volatility" in with_idx.series.columns
        assert "r" not in without.series.columns and "volatility" not in without.series.columns

    def test_edge_count_has_mst_floor(self):
        panel = small_demo_panel(with_index=False)
        result = run_pipeline(PipelineConfig(delta=10), panel)
        n = len(panel.tickers)
        assert np.all(result.series.data["edge_count"] >= n - 1)

    def test_byte_identical_reruns(self, tmp_path):
        panel = small_demo_panel(with_index=False)
        cfg_a = PipelineConfig(delta=22, perturb_sigma=0.01, seed=9,
                               out_dir=str(tmp_path / "a"))
        cfg_b = PipelineConfig(delta=22, perturb_sigma=0.01, seed=9,
                               out_dir=str(tmp_path / "b"))
        run_pipeline(cfg_a, panel)
        run_pipeline(cfg_b, panel)
        assert (tmp_path / "a" / "indicators.csv").read_bytes() == \
            (tmp_path / "b" / "indicators.csv").read_bytes()
        assert (tmp_path / "a" / "correlogram.csv").read_bytes() == \
            (tmp_path / "b" / "correlogram.csv").read_bytes()

    def test_different_seed_changes_perturbed_run(self):
        panel = small_demo_panel(with_index=False)
        a = run_pipeline(PipelineConfig(delta=22, perturb_sigma=0.05, seed=1), panel)
        b = run_pipeline(PipelineConfig(delta=22, perturb_sigma=0.05, seed=2), panel)
        assert not np.array_equal(a.series.data["mu"], b.series.data["mu"])

    def test_short_panel_rejected(self):
        panel = small_demo_panel(n_days=10, with_index=False)
        with pytest.raises(IngestError, match="tau"):
            run_pipeline(PipelineConfig(tau=22), panel)

    def test_csv_layout(self, tmp_path):
        panel = small_demo_panel(with_index=False)
        result = run_pipeline(PipelineConfig(delta=22), panel)
        text = indicators_csv_bytes(result.series).decode()
        lines = text.strip().split("\n")
        assert lines[0].split(",") == list(result.series.columns)
        assert len(lines) == result.series.row_count() + 1

    def test_manifest_contents(self, tmp_path):
        panel = small_demo_panel(with_index=False)
        cfg = PipelineConfig(delta=22, out_dir=str(tmp_path))
        result = run_pipeline(cfg, panel)
        m = result.manifest
        assert m["epochs"] == result.series.row_count()
        assert m["panel_hash"] == panel.content_hash()
        assert set(m["outputs"]) == {"indicators.csv", "correlogram.csv"}
        assert (tmp_path / "manifest.json").exists()


class TestThresholdMonotonicity:
    def test_higher_threshold_fewer_edges_and_smaller_fre_magnitude(self):
        returns = factor_returns(20, 150, rho=0.2, crash=(60, 110, 0.85), seed=5)
        panel = panel_from_returns(returns)
        runs = {}
        for threshold in (0.65, 0.75, 0.85):
            cfg = PipelineConfig(delta=11, threshold=threshold, ollivier=False)
            runs[threshold] = run_pipeline(cfg, panel).series
        e65 = runs[0.65].data["edge_count"]
        e75 = runs[0.75].data["edge_count"]
        e85 = runs[0.85].data["edge_count"]
        assert np.all(e85 <= e75) and np.all(e75 <= e65)
        # on dense crash epochs the curvature magnitude shrinks with threshold
        crash = e65 >= 3 * (len(panel.tickers) - 1)
        assert crash.any()
        f65 = np.abs(runs[0.65].data["fre"][crash])
        f85 = np.abs(runs[0.85].data["fre"][crash])
        assert np.all(f85 <= f65)


class TestSnapshot:
    def test_rows_and_partition(self):
        panel = small_demo_panel(with_index=False)
        cfg = PipelineConfig(delta=22)
        end_date = panel.dates[22]
        rows = network_snapshot(cfg, panel, end_date)
        assert len(rows) >= len(panel.tickers) - 1
        community_of = {}
        for ti, tj, corr, dist, ci, cj in rows:
            assert community_of.setdefault(ti, ci) == ci
            assert community_of.setdefault(tj, cj) == cj
        assert set(community_of) == set(panel.tickers)  # connected graph covers all

    def test_mst_only_epoch_has_n_minus_1_rows(self):
        returns = factor_returns(8, 60, rho=0.0, seed=3)
        panel = panel_from_returns(returns)
        rows = network_snapshot(PipelineConfig(threshold=0.9999), panel, panel.dates[22])
        assert len(rows) == 7

    def test_unknown_end_date(self):
        panel = small_demo_panel(with_index=False)
        with pytest.raises(IngestError, match="not an epoch end date"):
            network_snapshot(PipelineConfig(), panel, "never")

    def test_emit_writes_csv(self, tmp_path):
        panel = small_demo_panel(with_index=False)
        path = emit_network_snapshot(PipelineConfig(), panel, panel.dates[22], tmp_path)
        lines = open(path).read().strip().split("\n")
        assert lines[0] == "ticker_i,ticker_j,corr,dist,community_i,community_j"
        assert len(lines) >= len(panel.tickers)


class TestCli:
    def run_cli(self, args):
        return CliRunner().invoke(main, args, catch_exceptions=False)

    def test_analyze_writes_outputs(self, tmp_path):
        csv_path = tmp_path / "prices.csv"
        csv_path.write_text(panel_csv_text(small_demo_panel(with_index=False)))
        out = tmp_path / "out"
        res = self.run_cli(["analyze", "--prices", str(csv_path), "--out", str(out),
                            "--delta", "22"])
        assert res.exit_code == 0, res.output
        assert (out / "indicators.csv").exists()
        assert (out / "correlogram.csv").exists()
        assert (out / "manifest.json").exists()

    def test_analyze_with_snapshot(self, tmp_path):
        panel = small_demo_panel(with_index=False)
        csv_path = tmp_path / "prices.csv"
        csv_path.write_text(panel_csv_text(panel))
        out = tmp_path / "out"
        res = self.run_cli(["analyze", "--prices", str(csv_path), "--out", str(out),
                            "--delta", "22", "--no-ore",
                            "--snapshot", panel.dates[22]])
        assert res.exit_code == 0, res.output
        assert (out / f"network_{panel.dates[22]}.csv").exists()

    def test_missing_file_is_input_error(self, tmp_path):
        res = CliRunner().invoke(main, ["analyze", "--prices",
                                        str(tmp_path / "nope.csv"),
                                        "--out", str(tmp_path / "o")])
        assert res.exit_code == 2

    def test_unknown_snapshot_date_is_input_error(self, tmp_path):
        csv_path = tmp_path / "prices.csv"
        csv_path.write_text(panel_csv_text(small_demo_panel(with_index=False)))
        res = CliRunner().invoke(main, ["analyze", "--prices", str(csv_path),
                                        "--out", str(tmp_path / "o"),
                                        "--delta", "22", "--snapshot", "never"])
        assert res.exit_code == 2

    def test_numerical_failure_exit_code(self, tmp_path):
        # constant INDEX column: zero-variance GARCH input fails the run
        panel = small_demo_panel(with_index=False)
        lines = panel_csv_text(panel).strip().split("\n")
        lines[0] += ",INDEX"
        lines[1:] = [f"{row},100" for row in lines[1:]]
        csv_path = tmp_path / "prices.csv"
        csv_path.write_text("\n".join(lines) + "\n")
        res = CliRunner().invoke(main, ["analyze", "--prices", str(csv_path),
                                        "--out", str(tmp_path / "o"), "--delta", "22"])
        assert res.exit_code == 3
        assert "numerical" in res.output or "numerical" in (res.stderr or "")
