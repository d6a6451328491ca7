"""End-to-end smoke tests for the Python bindings and the CLI."""

import math
import os
import subprocess
import sys

import pytest

import dsrcsim as ds


TABLE = ds.CoefficientTable.builtin()


def test_reception_model_basics():
    assert TABLE.at(1, 0, 0) == 0.0209865
    assert TABLE.at(4, 1, 0) == -9.32859e-05
    for xi in (0.0, 1000.0, 4400.0):
        assert ds.reception_probability(TABLE, 0.0, xi, 300.0) == pytest.approx(1.0, abs=1e-12)
    # frozen against the independent oracle
    assert ds.reception_probability(TABLE, 150.0, 500.0, 300.0) == pytest.approx(
        0.964691038144772, rel=1e-12
    )
    assert ds.communication_density(100.0, 300.0, 10.0) == pytest.approx(300.0)


def test_curve_monotone_in_distance():
    values = [ds.reception_probability(TABLE, float(x), 1500.0, 300.0) for x in range(301)]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
    assert values[-1] < 0.5


def test_trial_loop():
    rng = ds.Rng(7)
    out = ds.run_constant_trial(1.0, rng)
    assert out.success and out.attempts_used == 1
    out = ds.run_constant_trial(0.0, rng)
    assert not out.success and out.attempts_used == 5
    fails = sum(1 for _ in range(20000) if not ds.run_constant_trial(0.93, ds.Rng(_)).success)
    assert fails <= 2  # (1-0.93)^5 ~ 1.7e-6


def test_local_density_and_trial():
    roster = ds.BroadcastRoster([900.0, 950.0, 1000.0, 1100.0, 1250.0, 1299.0])
    delta = ds.local_broadcaster_density(1000.0, roster, 300.0, False)
    assert delta == pytest.approx(10.0)
    rng = ds.Rng(3)
    out = ds.reception_trial(1000.0, 20.0, roster, True, TABLE, ds.DsrcParams(), rng)
    assert out.attempts_used >= 1


def test_fallback_state_machine():
    params = ds.ControllerParams()
    C, A, H = ds.ControlMode.CACC_PLATOONED, ds.ControlMode.ACC_FALLBACK, ds.ControlMode.HUMAN
    assert ds.fallback_step(C, ds.FallbackEvent.PACKET_DROP, 0, params) == A
    assert ds.fallback_step(C, ds.FallbackEvent.ODD_EXIT, 0, params) == H
    assert ds.fallback_step(A, None, params.rejoin_threshold, params) == C
    assert ds.fallback_step(H, None, 1000, params) == H


def test_controllers():
    ctl = ds.ControllerParams()
    ctl.gap_gain, ctl.speed_gain = 0.23, 0.07
    assert ds.cacc_accel(25.0, 30.0, 30.0, 33.33, 0.6, ctl) == pytest.approx(1.15)
    idm = ds.IdmParams()
    assert ds.human_accel(40.0, 30.0, 30.0, 33.3, idm) == pytest.approx(
        -0.636533961217501, rel=1e-12
    )
    assert ds.human_accel(None, 33.3, 0.0, 33.3, idm) == 0.0


def _tiny_scenario():
    cfg = ds.ScenarioConfig()
    cfg.network.policy = ds.LanePolicy.UML
    cfg.network.length_m = 2000.0
    cfg.network.lane_count = 3
    cfg.demand.volume_vph = 4500.0
    cfg.demand.mpr = 0.8
    cfg.horizon_s = 240.0
    cfg.warmup_s = 60.0
    cfg.replications = 1
    return cfg


def test_replication_runs_and_is_deterministic():
    cfg = _tiny_scenario()
    a = ds.run_replication(cfg, 0)
    b = ds.run_replication(cfg, 0)
    assert not a.failed
    assert a.trials > 0
    assert a.trials == b.trials and a.successes == b.successes
    assert a.xi_samples == b.xi_samples
    assert a.spawned == a.retired + a.remaining
    agg = ds.aggregate([a, b])
    assert agg.reception_rate == a.reception_rate


def test_perfect_communication_override():
    cfg = _tiny_scenario()
    cfg.reception_override = 1.0
    r = ds.run_replication(cfg, 0)
    assert r.trials > 0
    assert r.reception_rate == 1.0
    assert r.fallback_packet_drop == 0


def _cli():
    path = os.environ.get("DSRCSIM_BIN")
    if not path or not os.path.exists(path):
        pytest.skip("DSRCSIM_BIN not set")
    return path


def test_cli_curves_row_count(tmp_path):
    out = subprocess.run(
        [_cli(), "curves", "--xi", "500,1500,3000", "--phi", "300", "--xmax", "300",
         "--dx", "1"],
        capture_output=True, text=True, check=True,
    )
    rows = [ln for ln in out.stdout.splitlines() if ln and not ln.startswith(("#", "x_m"))]
    assert len(rows) == 3 * 301
    x, xi, p = rows[0].split(",")
    assert float(x) == 0.0 and float(p) == 1.0


def test_cli_validate_coefficients():
    out = subprocess.run([_cli(), "validate-coefficients"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "all checks passed" in out.stdout


def test_cli_missing_config_exits_config_code(tmp_path):
    out = subprocess.run(
        [_cli(), "run", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert out.returncode == 2
    assert not (tmp_path / "o" / "summary.csv").exists()


def test_cli_run_writes_summary(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text(
        "[scenario]\npolicy = DL\nmpr = 0.5\nhorizon_s = 240\nwarmup_s = 60\n"
        "replications = 1\n[network]\nlength_m = 2000\nlanes = 3\n"
        "[demand]\nvolume_vph = 4000\n"
    )
    out_dir = tmp_path / "out"
    res = subprocess.run(
        [_cli(), "run", "--config", str(cfg), "--out", str(out_dir), "--fallback-log"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
    summary = (out_dir / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("#")
    assert summary[1].startswith("strategy,mpr,replication")
    assert len(summary) >= 4  # header comment, columns, one replication, pooled
    assert (out_dir / "fallback_rep0.csv").exists()
    assert not list(out_dir.glob("*.tmp"))


def test_cli_env_var_overrides_output_dir(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text(
        "[scenario]\npolicy = UML\nmpr = 0\nhorizon_s = 60\nwarmup_s = 10\nreplications = 1\n"
        "[network]\nlength_m = 1000\nlanes = 2\n[demand]\nvolume_vph = 1000\n"
    )
    env_dir = tmp_path / "env_out"
    env = dict(os.environ, DSRCSIM_OUTPUT_DIR=str(env_dir))
    res = subprocess.run(
        [_cli(), "run", "--config", str(cfg), "--out", str(tmp_path / "flag_out")],
        capture_output=True, text=True, env=env,
    )
    assert res.returncode == 0, res.stderr
    assert (env_dir / "summary.csv").exists()
    assert not (tmp_path / "flag_out").exists()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))


def test_cli_sweep_full_matrix_and_determinism(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text(
        "[scenario]\nhorizon_s = 240\nwarmup_s = 60\nreplications = 1\nbase_seed = 5\n"
        "[network]\nlength_m = 2000\nlanes = 3\n[demand]\nvolume_vph = 4000\n"
    )
    mprs = ",".join(str(round(0.1 * k, 1)) for k in range(1, 11))
    outs = []
    for name in ("a", "b"):
        out_dir = tmp_path / name
        res = subprocess.run(
            [_cli(), "sweep", "--config", str(cfg), "--out", str(out_dir),
             "--strategies", "BASE,UML,MML,DL,DLA", "--mprs", mprs, "--jobs", "8"],
            capture_output=True, text=True,
        )
        assert res.returncode == 0, res.stderr
        outs.append((out_dir / "summary.csv").read_bytes())
    assert outs[0] == outs[1]  # same seed, byte-identical summaries
    lines = outs[0].decode().splitlines()
    data = [ln for ln in lines if ln and not ln.startswith(("#", "strategy"))]
    assert len(data) == 5 * 10 * 2  # one replication row + one pooled row per cell
    pooled = [ln for ln in data if ",pooled," in ln]
    assert len(pooled) == 50


def test_cli_help_lists_every_flag():
    for sub, flags in {
        "run": ["--config", "--out", "--seed", "--replications", "--jobs",
                "--reception-log", "--fallback-log", "--trajectory-log", "--verbose"],
        "sweep": ["--config", "--out", "--strategies", "--mprs", "--seed", "--jobs"],
        "curves": ["--xi", "--phi", "--f", "--xmax", "--dx", "--out", "--table"],
        "validate-coefficients": ["--table"],
    }.items():
        out = subprocess.run([_cli(), sub, "--help"], capture_output=True, text=True)
        assert out.returncode == 0
        for flag in flags:
            assert flag in out.stdout, f"{sub} help misses {flag}"


def test_replication_reports_model_diagnostics():
    cfg = _tiny_scenario()
    r = ds.run_replication(cfg, 0)
    # clamping near zero distance happens routinely at platoon gaps
    assert r.reception_diag.total() >= 0


def test_cli_curves_accepts_custom_table(tmp_path):
    table_text = ds.CoefficientTable.builtin().write_text()
    table_file = tmp_path / "table.txt"
    table_file.write_text(table_text)
    out = subprocess.run(
        [_cli(), "curves", "--xi", "1500", "--xmax", "10", "--dx", "5",
         "--table", str(table_file)],
        capture_output=True, text=True, check=True,
    )
    rows = [ln for ln in out.stdout.splitlines() if ln and not ln.startswith(("#", "x_m"))]
    assert len(rows) == 3
    out_bad = subprocess.run(
        [_cli(), "curves", "--table", str(tmp_path / "missing.txt")],
        capture_output=True, text=True,
    )
    assert out_bad.returncode == 4  # i/o error
