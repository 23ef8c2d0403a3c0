"""Sweep tables, canned experiments, and the command-line interface."""

import csv
import io
import json

import pytest

import ehrelay.cli
from ehrelay import (
    CriterionResult,
    McConfig,
    SchemeSpec,
    SweepSpec,
    SystemParams,
    fig,
    outage_dynamic_ps,
    run_sweep,
)
from ehrelay.cli import main
from ehrelay.sweeps import CSV_COLUMNS, SWEEPABLE_PARAMS, _apply_param

REF_Z_A = 2849.964970428562

FAST_MC = McConfig(trials=4096, seed=7)


def _spec(param, values, schemes, base=None, mc=FAST_MC):
    return SweepSpec(swept_param=param, values=values, schemes=schemes,
                     base=base or SystemParams(), mc=mc)


def _parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(CSV_COLUMNS)
    return rows[1:]


class TestSchemeSpec:
    def test_label_without_args(self):
        assert SchemeSpec("improved").label() == "improved"

    def test_label_formats_and_sorts_args(self):
        spec = SchemeSpec("dynamic_ps", {"theta": 0.30})
        assert spec.label() == "dynamic_ps:theta=0.3"
        multi = SchemeSpec("static_equal", {"rho": 0.5, "alpha": 2.0})
        assert multi.label() == "static_equal:alpha=2,rho=0.5"


class TestSweepSpecValidation:
    def test_unknown_parameter(self):
        with pytest.raises(ValueError):
            _spec("bogus", (1.0,), (SchemeSpec("improved"),))

    def test_values_must_be_nonempty_and_increasing(self):
        with pytest.raises(ValueError):
            _spec("rate", (), (SchemeSpec("improved"),))
        with pytest.raises(ValueError):
            _spec("rate", (2.0, 2.0), (SchemeSpec("improved"),))
        with pytest.raises(ValueError):
            _spec("rate", (3.0, 1.0), (SchemeSpec("improved"),))

    def test_domain_checks(self):
        improved = (SchemeSpec("improved"),)
        with pytest.raises(ValueError):
            _spec("theta", (0.5, 1.0), improved)
        with pytest.raises(ValueError):
            _spec("M", (2.5,), improved)
        with pytest.raises(ValueError):
            _spec("dist_a", (20.0,), improved)
        with pytest.raises(ValueError):
            _spec("beta", (0.5,), improved)
        with pytest.raises(ValueError):
            _spec("rate", (0.0,), improved)

    def test_schemes_validated_up_front(self):
        with pytest.raises(ValueError):
            _spec("rate", (1.0,), ())
        with pytest.raises(ValueError):
            _spec("rate", (1.0,), (SchemeSpec("dynamic_ps", {"theta": 1.0}),))
        with pytest.raises(ValueError):
            _spec("rate", (1.0,), (SchemeSpec("improved", {"rho": 0.5}),))


class TestApplyParam:
    def test_relay_position_preserves_separation(self):
        moved = _apply_param(SystemParams(), "dist_a", 4.0)
        assert moved.dist_a == 4.0
        assert moved.dist_b == 16.0

    def test_order_and_sensitivity(self):
        assert _apply_param(SystemParams(), "M", 5.0).quad_order == 5
        gated = _apply_param(SystemParams(), "sensitivity", -20.0)
        assert gated.circuit_sensitivity_dbm == -20.0

    def test_theta_leaves_system_untouched(self):
        base = SystemParams()
        assert _apply_param(base, "theta", 0.3) == base


class TestRunSweep:
    def test_single_value_row_layout(self):
        schemes = (SchemeSpec("improved"),
                   SchemeSpec("dynamic_ps", {"theta": 0.5}),
                   SchemeSpec("static_equal", {"rho": 0.5}))
        result = run_sweep(_spec("rate", (2.0,), schemes))
        assert [r.scheme_id for r in result.rows] == [
            "dynamic_ps:theta=0.5", "improved", "static_equal:rho=0.5"]
        for row in result.rows:
            assert row.param_value == 2.0
            assert 0.0 <= row.mc_outage <= 1.0
            assert row.capacity is not None
        static = result.rows[2]
        assert static.analytic_outage is None
        assert static.relative_error is None

    def test_csv_serialization(self):
        schemes = (SchemeSpec("static_equal", {"rho": 0.5}),)
        result = run_sweep(_spec("rate", (2.0,), schemes))
        body = _parse_csv(result.to_csv())
        assert len(body) == 1
        row = body[0]
        assert row[0] == "2.0"
        assert row[1] == "static_equal:rho=0.5"
        assert row[2] == "" and row[6] == ""
        assert float(row[3]) == result.rows[0].mc_outage

    def test_json_serialization(self):
        result = run_sweep(_spec("rate", (2.0,), (SchemeSpec("improved"),)))
        payload = json.loads(result.to_json())
        assert len(payload) == 1
        assert set(payload[0]) == set(CSV_COLUMNS)
        assert payload[0]["scheme"] == "improved"
        assert payload[0]["analytic"] == result.rows[0].analytic_outage

    def test_theta_sweep_is_v_shaped(self):
        values = tuple(round(0.1 * k, 1) for k in range(1, 10))
        result = run_sweep(_spec(
            "theta", values, (SchemeSpec("dynamic_ps", {"theta": 0.5}),),
            mc=McConfig(trials=2048, seed=7)))
        assert [r.scheme_id for r in result.rows] == ["dynamic_ps"] * 9
        analytic = [r.analytic_outage for r in result.rows]
        for v, got in zip(values, analytic):
            assert got == pytest.approx(outage_dynamic_ps(SystemParams(), v),
                                        rel=1e-12)
        best = analytic.index(min(analytic))
        assert 0 < best < len(analytic) - 1
        assert all(a > b for a, b in zip(analytic[:best], analytic[1:best + 1]))
        assert all(a < b for a, b in zip(analytic[best:], analytic[best + 1:]))

    def test_csv_is_shard_invariant(self):
        def table(shards):
            spec = _spec("tx_power", (10.0, 30.0),
                         (SchemeSpec("dynamic_ps", {"theta": 0.5}),),
                         mc=McConfig(trials=20_000, seed=12, shards=shards))
            return run_sweep(spec).to_csv()

        assert table(1) == table(2)


class TestFigures:
    def test_index_domain(self):
        with pytest.raises(ValueError):
            fig(2)
        with pytest.raises(ValueError):
            fig(10)

    def test_quadrature_order_sweep(self):
        result = fig(3, mc=FAST_MC)
        assert result.swept_param == "M"
        assert [r.param_value for r in result.rows] == [2.0, 3.0, 5.0, 10.0, 20.0]
        for row in result.rows:
            assert row.scheme_id == "dynamic_ps:theta=0.5"
            assert row.analytic_outage is not None
            assert row.relative_error is not None

    def test_power_sweep_scheme_ordering(self):
        result = fig(5, mc=McConfig(trials=2048, seed=7))
        assert len(result.rows) == 5 * 7
        by_value = {}
        for row in result.rows:
            by_value.setdefault(row.param_value, {})[row.scheme_id] = row
        for point in by_value.values():
            improved = point["improved"].analytic_outage
            dynamic = point["dynamic_ps:theta=0.5"].analytic_outage
            assert improved <= dynamic

    def test_rate_sweep_grid(self):
        result = fig(7, mc=FAST_MC)
        values = sorted({r.param_value for r in result.rows})
        assert values == [float(u) for u in range(1, 11)]
        assert len(result.rows) == 30

    def test_sensitivity_sweep_reports_energy_rows(self):
        result = fig(9, mc=FAST_MC)
        energy = [r for r in result.rows if r.scheme_id == "energy_outage"]
        assert len(energy) == 5
        for row in energy:
            assert row.capacity is None
            assert row.analytic_outage is not None
        assert len(result.rows) == 5 * 4

    def test_overrides_reach_the_base_point(self):
        stock = fig(3, mc=FAST_MC)
        moved = fig(3, overrides={"rate_bps_hz": 4.0}, mc=FAST_MC)
        assert moved.rows[0].analytic_outage > stock.rows[0].analytic_outage


class TestCli:
    def test_sweep_writes_csv_to_stdout(self, capsys):
        rc = main(["sweep", "--param", "rate", "--values", "1,2",
                   "--scheme", "dynamic_ps:theta=0.5",
                   "--trials", "2048", "--seed", "7"])
        assert rc == 0
        body = _parse_csv(capsys.readouterr().out)
        assert len(body) == 2
        assert body[0][1] == "dynamic_ps:theta=0.5"

    def test_sweep_json_and_out_file(self, tmp_path):
        target = tmp_path / "sweep.json"
        rc = main(["sweep", "--param", "rate", "--values", "2",
                   "--scheme", "improved", "--trials", "2048", "--seed", "7",
                   "--json", "--out", str(target)])
        assert rc == 0
        payload = json.loads(target.read_text())
        assert payload[0]["scheme"] == "improved"

    def test_sweep_respects_overrides(self, capsys):
        argv = ["sweep", "--param", "rate", "--values", "2",
                "--scheme", "dynamic_ps:theta=0.5",
                "--trials", "2048", "--seed", "7"]
        main(argv)
        stock = _parse_csv(capsys.readouterr().out)[0]
        main(argv + ["--tx-power-dbm", "20"])
        weaker = _parse_csv(capsys.readouterr().out)[0]
        assert float(weaker[2]) > float(stock[2])

    def test_fig_subcommand(self, capsys):
        rc = main(["fig", "3", "--trials", "2048", "--seed", "7"])
        assert rc == 0
        body = _parse_csv(capsys.readouterr().out)
        assert len(body) == 5

    def test_params_text_output(self, capsys):
        rc = main(["params"])
        assert rc == 0
        text = capsys.readouterr().out
        assert "[system]" in text and "[derived]" in text
        assert "tx_power_dbm = 30.0" in text

    def test_params_json_reports_derived_constants(self, capsys):
        rc = main(["params", "--json", "--m", "5"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["theta"] == 0.5
        assert payload["system"]["quad_order"] == 5
        assert payload["derived"]["z_a"] == pytest.approx(REF_Z_A, rel=1e-12)

    def test_config_file_layering(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"rate_bps_hz": 3.0, "trials": 2048}))
        rc = main(["params", "--json", "--config", str(config),
                   "--rate", "4.0"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["system"]["rate_bps_hz"] == 4.0

    def test_bad_inputs_exit_2(self, tmp_path, capsys):
        assert main(["sweep", "--param", "rate", "--values", "3,1",
                     "--trials", "64"]) == 2
        assert main(["sweep", "--param", "rate", "--values", "1",
                     "--scheme", "oracle", "--trials", "64"]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"nonsense": 1}))
        assert main(["params", "--config", str(bad)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_validate_exit_codes(self, monkeypatch, capsys):
        passing = [CriterionResult(index=i, name=f"check_{i}", passed=True,
                                   detail="ok") for i in range(1, 13)]
        monkeypatch.setattr(ehrelay.cli, "run_all", lambda progress: passing)
        assert main(["validate"]) == 0
        capsys.readouterr()

        failing = passing[:-1] + [CriterionResult(index=12, name="check_12",
                                                  passed=False, detail="off")]
        monkeypatch.setattr(ehrelay.cli, "run_all", lambda progress: failing)
        assert main(["validate", "--json"]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload[-1]["status"] == "FAIL"
