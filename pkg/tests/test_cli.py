import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from entspread.analysis import MomentSeries
from entspread.cli import (
    BoundaryBudgetError,
    analytic_series,
    main,
    run_analytic,
    run_fit,
    run_simulate,
    run_sweep,
    run_verify,
)
from entspread.config import SCHEMA_VERSION, config_from_dict
from entspread.observables import MomentSample
from entspread.seriesio import (
    CSV_COLUMNS,
    read_series_csv,
    write_series_csv,
)

GOLDEN_HEADER = "time,m,w,alpha0_abs,m_o,m_d,norm_error"
GOLDEN_ANALYTIC_HEADER = GOLDEN_HEADER + ",w_lower_bound,w_upper_bound,w_asymptote,m_asymptote"


def make_config(**tweaks):
    raw = {
        "schema_version": SCHEMA_VERSION,
        "chain": {"num_sites": 201, "disorder": {"half_width": 3, "low": 0.0, "high": 2.5}},
        "times": {"t_start": 0.0, "t_end": 20.0, "num_samples": 41},
        "ensemble": {"num_realizations": 2, "base_seed": 7},
        "outputs": {"directory": "unused", "formats": ["csv", "json"]},
    }
    for key, value in tweaks.items():
        raw[key] = value
    return raw


def write_config(tmp_path, raw, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path


def synthetic_power_law_csv(path, prefactor=3.0, exponent=2.5):
    times = np.linspace(1.0, 100.0, 2000)
    m = prefactor * times**exponent
    samples = tuple(
        MomentSample(float(t), float(v), float(v), 0.5, float(v), 0.0, 0.0)
        for t, v in zip(times, m)
    )
    write_series_csv(path, MomentSeries(samples=samples))


class TestSeriesIO:
    def test_golden_header(self, tmp_path):
        path = tmp_path / "series.csv"
        samples = (MomentSample(0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0),)
        write_series_csv(path, MomentSeries(samples=samples))
        assert path.read_text().splitlines()[0] == GOLDEN_HEADER

    def test_round_trip_is_exact(self, tmp_path, rng):
        samples = tuple(
            MomentSample(float(t), rng.random(), rng.random() * 1e8, rng.random(),
                         rng.random(), rng.random(), rng.random() * 1e-9)
            for t in range(20)
        )
        path = tmp_path / "series.csv"
        write_series_csv(path, MomentSeries(samples=samples))
        back = read_series_csv(path)
        for a, b in zip(samples, back.samples):
            assert a == b

    def test_missing_columns_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,m\n0.0,0.0\n")
        with pytest.raises(ValueError, match="missing columns"):
            read_series_csv(path)


class TestSimulate:
    def test_ordered_matches_analytic(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 4001},
            times={"t_start": 0.0, "t_end": 100.0, "num_samples": 11},
            ensemble={"num_realizations": 1, "base_seed": 0},
        )
        config = config_from_dict(raw)
        run_simulate(config, tmp_path / "sim")
        run_analytic(config, tmp_path / "ana")
        sim = read_series_csv(tmp_path / "sim" / "series_r0000.csv")
        ana = read_series_csv(tmp_path / "ana" / "series_analytic.csv")
        for s, a in zip(sim.samples, ana.samples):
            if a.m == 0.0:
                assert abs(s.m) <= 1e-9
            else:
                assert abs(s.m - a.m) <= 1e-6 * max(abs(s.m), abs(a.m))

    def test_single_time_zero_row(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 51},
            times={"t_start": 0.0, "t_end": 0.0, "num_samples": 1},
            ensemble={"num_realizations": 1, "base_seed": 0},
        )
        run_simulate(config_from_dict(raw), tmp_path)
        series = read_series_csv(tmp_path / "series_r0000.csv")
        row = series.samples[0]
        assert (row.m, row.w, row.alpha0_abs) == (0.0, 0.0, 1.0)

    def test_reruns_byte_identical(self, tmp_path):
        config = config_from_dict(make_config())
        run_simulate(config, tmp_path / "a")
        run_simulate(config, tmp_path / "b")
        for name in ("series_r0000.csv", "series_r0001.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_manifest_contents(self, tmp_path):
        config = config_from_dict(make_config())
        manifest = run_simulate(config, tmp_path)
        assert manifest["command"] == "simulate"
        assert len(manifest["realizations"]) == 2
        on_disk = json.loads((tmp_path / "manifest.json").read_text())
        assert on_disk["config_digest"] == manifest["config_digest"]
        assert {r["index"] for r in on_disk["realizations"]} == {0, 1}

    @pytest.mark.filterwarnings("ignore::entspread.propagator.ReflectionBudgetWarning")
    def test_boundary_budget_enforced(self, tmp_path):
        raw = make_config(times={"t_start": 0.0, "t_end": 200.0, "num_samples": 11})
        with pytest.raises(BoundaryBudgetError):
            run_simulate(config_from_dict(raw), tmp_path)
        run_simulate(config_from_dict(raw), tmp_path, allow_reflections=True)

    def test_seed_override_changes_output(self, tmp_path):
        config = config_from_dict(make_config())
        run_simulate(config, tmp_path / "a")
        run_simulate(config, tmp_path / "b", seed_override=123)
        assert (tmp_path / "a" / "series_r0000.csv").read_bytes() != (
            tmp_path / "b" / "series_r0000.csv"
        ).read_bytes()

    def test_parallel_jobs_match_serial(self, tmp_path):
        config = config_from_dict(make_config())
        run_simulate(config, tmp_path / "serial", jobs=1)
        run_simulate(config, tmp_path / "par", jobs=2)
        for name in ("series_r0000.csv", "series_r0001.csv"):
            assert (tmp_path / "serial" / name).read_bytes() == (
                tmp_path / "par" / name
            ).read_bytes()


class TestAnalytic:
    def test_extra_columns_and_lower_bound(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 201},
            times={"t_start": 0.0, "t_end": 5.0, "num_samples": 6},
            ensemble={"num_realizations": 1, "base_seed": 0},
        )
        run_analytic(config_from_dict(raw), tmp_path)
        lines = (tmp_path / "series_analytic.csv").read_text().splitlines()
        assert lines[0] == GOLDEN_ANALYTIC_HEADER
        header = lines[0].split(",")
        for line in lines[1:]:
            row = dict(zip(header, (float(v) for v in line.split(","))))
            assert row["w_lower_bound"] == 2.0 * row["time"] ** 2

    def test_first_rows_match_frozen_values(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 201},
            times={"t_start": 0.0, "t_end": 1.0, "num_samples": 2},
            ensemble={"num_realizations": 1, "base_seed": 0},
        )
        run_analytic(config_from_dict(raw), tmp_path)
        series = read_series_csv(tmp_path / "series_analytic.csv")
        assert series.samples[0].m == 0.0
        assert series.samples[1].w == pytest.approx(7.8439635000430841, abs=1e-9)
        assert series.samples[1].m == pytest.approx(3.5123821991601201, abs=1e-9)

    def test_rejects_disordered_config(self):
        config = config_from_dict(make_config())
        with pytest.raises(Exception, match="ordered"):
            analytic_series(config)


class TestFit:
    def test_exact_power_law_report(self, tmp_path):
        # averaging disabled: a pure power law is already smooth and the
        # window's curvature bias would shift the exponent at small t
        path = tmp_path / "synthetic.csv"
        synthetic_power_law_csv(path)
        report = run_fit([path], window=(2.0, 95.0), average_window=0.0)
        entry = report["realizations"][0]
        assert entry["exponent"] == pytest.approx(2.5, abs=1e-6)
        assert entry["prefactor"] == pytest.approx(3.0, rel=1e-4)
        assert report["ensemble"]["median_exponent"] == pytest.approx(2.5, abs=1e-6)

    def test_ensemble_median(self, tmp_path):
        paths = []
        for k, expo in enumerate((2.0, 2.5, 3.0)):
            path = tmp_path / f"s{k}.csv"
            synthetic_power_law_csv(path, exponent=expo)
            paths.append(path)
        report = run_fit(paths, window=(2.0, 95.0), average_window=0.0)
        assert report["ensemble"]["median_exponent"] == pytest.approx(2.5, abs=1e-6)
        assert report["ensemble"]["count"] == 3


class TestVerify:
    def test_analytic_config_passes(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 901},
            times={"t_start": 1.0, "t_end": 200.0, "num_samples": 200},
            ensemble={"num_realizations": 1, "base_seed": 0},
        )
        report = run_verify(config=config_from_dict(raw))
        assert report["passed"]
        assert report["bounds"]["lower_failures"] == 0
        assert report["bounds"]["upper_failures"] == 0
        sum_checks = [c for c in report["bessel_identities"] if c["name"] == "even_order_sum"]
        assert any(c["a"] == 50.0 and c["error"] <= 1e-6 for c in sum_checks)
        assert all(c["ok"] for c in report["bessel_identities"])

    def test_corrupted_csv_fails(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 901},
            times={"t_start": 1.0, "t_end": 100.0, "num_samples": 100},
            ensemble={"num_realizations": 1, "base_seed": 0},
        )
        config = config_from_dict(raw)
        series, extras = analytic_series(config)
        halved = MomentSeries(
            samples=tuple(
                MomentSample(s.time, s.m, 0.1 * s.w, s.alpha0_abs, s.m_o, s.m_d, s.norm_error)
                for s in series.samples
            )
        )
        path = tmp_path / "corrupt.csv"
        write_series_csv(path, halved)
        report = run_verify(csv_path=path)
        assert not report["passed"]
        assert report["bounds"]["lower_failures"] > 0

    def test_requires_exactly_one_source(self):
        with pytest.raises(ValueError):
            run_verify()


class TestSweep:
    def sweep_config(self, tmp_path):
        return config_from_dict(
            make_config(
                chain={"num_sites": 401, "disorder": {"half_width": 5, "low": 0.0, "high": 2.5}},
                times={"t_start": 0.0, "t_end": 60.0, "num_samples": 241},
                ensemble={"num_realizations": 1, "base_seed": 3},
            )
        )

    def test_single_realization_matches_simulate_plus_fit(self, tmp_path):
        config = self.sweep_config(tmp_path)
        window = (10.0, 60.0)
        aggregate = run_sweep(config, tmp_path / "sweep", window=window)
        run_simulate(config, tmp_path / "sim")
        assert (tmp_path / "sweep" / "series_r0000.csv").read_bytes() == (
            tmp_path / "sim" / "series_r0000.csv"
        ).read_bytes()
        fit_report = run_fit([tmp_path / "sim" / "series_r0000.csv"], window=window)
        assert aggregate["realizations"][0]["exponent"] == pytest.approx(
            fit_report["realizations"][0]["exponent"], abs=1e-12
        )
        assert aggregate["ensemble"]["count"] == 1

    def test_rerun_bitwise_identical(self, tmp_path):
        config = self.sweep_config(tmp_path)
        run_sweep(config, tmp_path / "a", window=(10.0, 60.0))
        run_sweep(config, tmp_path / "b", window=(10.0, 60.0))
        assert (tmp_path / "a" / "series_r0000.csv").read_bytes() == (
            tmp_path / "b" / "series_r0000.csv"
        ).read_bytes()

    def test_partial_failures_recorded(self, tmp_path):
        config = self.sweep_config(tmp_path)
        aggregate = run_sweep(config, tmp_path, window=(1000.0, 2000.0))
        assert aggregate["ensemble"]["median_exponent"] is None
        assert len(aggregate["failures"]) == 1
        assert (tmp_path / "aggregate.json").exists()


class TestCommandLine:
    def test_config_error_exit_code(self, tmp_path):
        raw = make_config()
        raw["chain"]["bogus_key"] = 1
        path = write_config(tmp_path, raw)
        result = CliRunner().invoke(main, ["simulate", "--config", str(path)])
        assert result.exit_code == 2
        assert "config.chain" in result.output

    def test_boundary_violation_exit_code(self, tmp_path):
        raw = make_config(times={"t_start": 0.0, "t_end": 200.0, "num_samples": 5})
        path = write_config(tmp_path, raw)
        out = tmp_path / "out"
        result = CliRunner().invoke(main, ["simulate", "--config", str(path), "--out", str(out)])
        assert result.exit_code == 1
        assert "boundary budget" in result.output

    def test_analytic_rejects_disorder_exit_code(self, tmp_path):
        path = write_config(tmp_path, make_config())
        result = CliRunner().invoke(main, ["analytic", "--config", str(path)])
        assert result.exit_code == 2
        assert "ordered" in result.output

    def test_simulate_and_fit_end_to_end(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 401, "disorder": {"half_width": 5, "low": 0.0, "high": 2.5}},
            times={"t_start": 0.0, "t_end": 60.0, "num_samples": 241},
            ensemble={"num_realizations": 1, "base_seed": 3},
        )
        path = write_config(tmp_path, raw)
        out = tmp_path / "out"
        result = CliRunner().invoke(
            main, ["simulate", "--config", str(path), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        report_path = tmp_path / "fit.json"
        result = CliRunner().invoke(
            main,
            [
                "fit",
                str(out / "series_r0000.csv"),
                "--window",
                "10:60",
                "--out",
                str(report_path),
            ],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(report_path.read_text())
        assert report["ensemble"]["count"] == 1

    def test_fit_missing_columns_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("time,m\n1.0,1.0\n2.0,4.0\n")
        result = CliRunner().invoke(main, ["fit", str(bad), "--window", "1:2"])
        assert result.exit_code == 2

    def test_fit_bad_window_flag(self, tmp_path):
        path = tmp_path / "s.csv"
        synthetic_power_law_csv(path)
        result = CliRunner().invoke(main, ["fit", str(path), "--window", "oops"])
        assert result.exit_code == 2

    def test_verify_pass_and_fail_exit_codes(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 901},
            times={"t_start": 1.0, "t_end": 200.0, "num_samples": 200},
            ensemble={"num_realizations": 1, "base_seed": 0},
        )
        path = write_config(tmp_path, raw)
        result = CliRunner().invoke(main, ["verify", "--config", str(path)])
        assert result.exit_code == 0, result.output
        assert "PASS" in result.output

        config = config_from_dict(raw)
        series, _ = analytic_series(config)
        halved = MomentSeries(
            samples=tuple(
                MomentSample(s.time, s.m, 0.1 * s.w, s.alpha0_abs, s.m_o, s.m_d, s.norm_error)
                for s in series.samples
            )
        )
        corrupt = tmp_path / "corrupt.csv"
        write_series_csv(corrupt, halved)
        result = CliRunner().invoke(main, ["verify", "--csv", str(corrupt)])
        assert result.exit_code == 1
        assert "FAIL" in result.output

    def test_verify_requires_one_source(self):
        result = CliRunner().invoke(main, ["verify"])
        assert result.exit_code == 2

    def test_sweep_cli(self, tmp_path):
        raw = make_config(
            chain={"num_sites": 401, "disorder": {"half_width": 5, "low": 0.0, "high": 2.5}},
            times={"t_start": 0.0, "t_end": 60.0, "num_samples": 241},
            ensemble={"num_realizations": 2, "base_seed": 3},
        )
        path = write_config(tmp_path, raw)
        out = tmp_path / "out"
        result = CliRunner().invoke(
            main,
            ["sweep", "--config", str(path), "--out", str(out), "--window", "10:60", "--jobs", "2"],
        )
        assert result.exit_code == 0, result.output
        aggregate = json.loads((out / "aggregate.json").read_text())
        assert aggregate["ensemble"]["count"] == 2
        assert (out / "series_r0001.csv").exists()
