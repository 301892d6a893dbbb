import json

import pytest

from crlsim.cli import main, load_scenario, build_config, ConfigError


def scenario_file(tmp_path, name="scen", **extra):
    body = {
        "steps": 40,
        "rng_seed": 3,
        "weights": {"gamma_t": 0.5, "gamma_p": 0.5},
        "workload": {"task_arrival_rate": 4.0, "source_arrival_rate": 8.0},
    }
    body.update(extra)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(body))
    return path


def test_run_twice_is_byte_identical(tmp_path):
    cfg = scenario_file(tmp_path)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["run", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(out2)]) == 0
    f1 = out1 / "scen_crl_seed3.csv"
    f2 = out2 / "scen_crl_seed3.csv"
    assert f1.read_bytes() == f2.read_bytes()


def test_run_writes_effective_config(tmp_path):
    cfg = scenario_file(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--steps", "10"]) == 0
    effective = json.loads((out / "effective_config.json").read_text())
    assert effective["steps"] == 10          # flag overrides file
    assert effective["rng_seed"] == 3        # file value preserved
    assert effective["weights"]["gamma_t"] == 0.5


def test_missing_config_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2
    captured = capsys.readouterr()
    assert "usage" in captured.err.lower()


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"steps": 10, "bogus": 1}))
    assert main(["run", "--config", str(path)]) == 2


def test_unknown_nested_key_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"workload": {"task_arrival_rate": 1.0, "oops": 2}}))
    with pytest.raises(ConfigError, match="oops"):
        load_scenario(path)


def test_invalid_field_named_in_diagnostic(tmp_path, capsys):
    path = scenario_file(tmp_path, steps=0)
    assert main(["run", "--config", str(path)]) == 2
    assert "steps" in capsys.readouterr().err


def test_flag_overrides_are_total():
    # every scenario field is reachable by a flag
    config = build_config({}, {
        "steps": 5, "step_seconds": 2.0, "rng_seed": 9, "policy": "cloud",
        "gamma_t": 0.1, "gamma_p": 0.2, "gamma_n": 0.3, "gamma_m": 0.4,
        "conversion_rate_r": 2.0, "max_rounds_w": 4, "tau_s": 0.2,
        "task_arrival_rate": 1.0, "source_arrival_rate": 2.0,
        "cycles_range": (1.0, 2.0), "value_range": (0.0, 1.0),
        "deadline_range": (1.0, 9.0), "idle_range": (1.0, 5.0),
        "rate_range": (1.0, 3.0), "device_count": 7,
    })
    assert config.steps == 5 and config.policy == "cloud"
    assert config.weights.max_rounds_w == 4
    assert config.workload.device_count == 7


def test_compare_zero_arrivals_no_migration(tmp_path, capsys):
    cfg = scenario_file(tmp_path, workload={"task_arrival_rate": 0.0, "source_arrival_rate": 0.0})
    out = tmp_path / "out"
    assert main(["compare", "--config", str(cfg), "--out", str(out), "--steps", "10"]) == 0
    summary = json.loads((out / "scen_compare_seed3.json").read_text())
    assert summary["mean_migrated_value_cum_crl"] == 0.0
    assert summary["mean_migrated_value_cum_cloud"] == 0.0
    assert (out / "scen_crl_seed3.csv").exists()
    assert (out / "scen_cloud_seed3.csv").exists()


def test_sweep_w_outputs_non_increasing_final_migration(tmp_path):
    from crlsim.metrics import load_report_csv
    out = tmp_path / "sweep"
    assert main([
        "sweep-w", "--w-values", "1,2,3,5", "--seed", "1", "--steps", "100",
        "--out", str(out),
    ]) == 0
    finals = []
    for w in (1, 2, 3, 5):
        samples = load_report_csv(out / f"default_w{w}_crl_seed1.csv")
        finals.append(samples[-1].migrated_value_cum)
    assert all(a >= b - 1e-9 for a, b in zip(finals, finals[1:]))


def test_json_format_output(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--steps", "5", "--seed", "2", "--format", "json", "--out", str(out)]) == 0
    data = json.loads((out / "default_crl_seed2.json").read_text())
    assert data["seed"] == 2 and len(data["samples"]) == 5
