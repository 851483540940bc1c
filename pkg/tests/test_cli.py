import json

import numpy as np
import pytest

from kpimc.cli import main
from kpimc.config import load_config
from kpimc.errors import ConfigError

TINY_CONFIG = {
    "seed": 5,
    "draw_count": 400,
    "bootstrap": {"resample_count": 300},
    "mcmc": {"iterations": 1200},
    "scenarios": [
        {"name": "mini", "generator": "normal",
         "generator_params": {"mu": 10.0, "sigma": 3.0,
                              "population_size": 1500},
         "dataset_size": 120, "dataset_count": 3},
    ],
}


def _write_config(tmp_path, doc=None):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc or TINY_CONFIG))
    return path


def test_generate_adhoc_normal_is_deterministic(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    argv = ["generate", "--scenario", "normal", "--n", "5000",
            "--mu", "10", "--sigma", "3", "--seed", "42"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    a = (out1 / "normal.csv").read_bytes()
    assert a == (out2 / "normal.csv").read_bytes()
    values = np.loadtxt(out1 / "normal.csv", skiprows=1)
    assert values.shape == (5000,)
    assert abs(values.mean() - 10.0) < 0.2


def test_generate_rejects_bad_sigma(tmp_path, capsys):
    rc = main(["generate", "--scenario", "normal", "--sigma", "0",
               "--out", str(tmp_path)])
    assert rc != 0
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert len(err.strip().splitlines()) == 1


def test_generate_from_config(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "pop"
    assert main(["generate", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "mini.csv").exists()


def test_fit_mc_exact_cdf(tmp_path):
    data = tmp_path / "data.csv"
    data.write_text("value\n1.0\n2.0\n3.0\n")
    out = tmp_path / "fit"
    rc = main(["fit", "--method", "mc", "--input", str(data),
               "--lower", "0", "--upper", "4", "--out", str(out)])
    assert rc == 0
    lines = (out / "cdf.csv").read_text().splitlines()
    assert lines == ["support,prob", "0.0,0.0", "1.0,0.25", "2.0,0.5",
                     "3.0,0.75", "4.0,1.0"]


def test_fit_mc_requires_both_bounds(tmp_path, capsys):
    data = tmp_path / "data.csv"
    data.write_text("value\n1.0\n2.0\n")
    rc = main(["fit", "--method", "mc", "--input", str(data),
               "--lower", "0", "--out", str(tmp_path)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_fit_unknown_method_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["fit", "--method", "bogus", "--input", "x.csv"])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert "mc" in err and "mcmc" in err


def test_fit_mcmc_outputs(tmp_path):
    gen_out = tmp_path / "gen"
    assert main(["generate", "--scenario", "normal", "--n", "1500",
                 "--mu", "10", "--sigma", "3", "--seed", "1",
                 "--out", str(gen_out)]) == 0
    fit_out = tmp_path / "fit"
    rc = main(["fit", "--method", "mcmc", "--input",
               str(gen_out / "normal.csv"), "--seed", "2",
               "--out", str(fit_out)])
    assert rc == 0
    summary = json.loads((fit_out / "fit_summary.json").read_text())
    assert 9.7 <= summary["mu_hat"] <= 10.3
    assert 2.7 <= summary["sigma_hat"] <= 3.3
    trace = (fit_out / "chain.csv").read_text().splitlines()
    assert trace[0] == "step,mu,sigma,log_posterior,accepted"
    assert len(trace) == 1 + summary["iterations"] - summary["burn_in_count"]


def test_fit_empty_input_fails(tmp_path, capsys):
    data = tmp_path / "empty.csv"
    data.write_text("value\n")
    rc = main(["fit", "--method", "mc", "--input", str(data),
               "--out", str(tmp_path)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_coverage_run_and_determinism(tmp_path):
    cfg = _write_config(tmp_path)
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    assert main(["coverage", "--config", str(cfg), "--out", str(out1),
                 "--emit-intervals"]) == 0
    assert main(["coverage", "--config", str(cfg), "--out", str(out2),
                 "--emit-intervals"]) == 0
    assert (out1 / "report.csv").read_bytes() == \
           (out2 / "report.csv").read_bytes()
    assert (out1 / "intervals.csv").read_bytes() == \
           (out2 / "intervals.csv").read_bytes()
    doc = json.loads((out1 / "report.json").read_text())
    assert doc["interval_total"] == 2 * 2 * 3
    assert doc["master_seed"] == 5
    assert doc["level"] == 0.9
    # json differs across runs only in wall-clock fields
    doc2 = json.loads((out2 / "report.json").read_text())
    for key in ("cells", "averages", "interval_total", "scenarios"):
        assert doc[key] == doc2[key]


def test_coverage_level_flag_overrides(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "lvl"
    assert main(["coverage", "--config", str(cfg), "--out", str(out),
                 "--level", "0.8"]) == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["level"] == 0.8


def test_seed_flag_changes_outputs(tmp_path):
    cfg = _write_config(tmp_path)
    out1 = tmp_path / "s1"
    out2 = tmp_path / "s2"
    assert main(["coverage", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["coverage", "--config", str(cfg), "--out", str(out2),
                 "--seed", "6"]) == 0
    assert (out1 / "report.csv").read_text() != \
           (out2 / "report.csv").read_text()


def test_config_unknown_keys_rejected(tmp_path):
    doc = dict(TINY_CONFIG, extra_knob=1)
    path = _write_config(tmp_path, doc)
    with pytest.raises(ConfigError, match="extra_knob"):
        load_config(path)
    doc = json.loads(json.dumps(TINY_CONFIG))
    doc["scenarios"][0]["generator_params"]["typo"] = 1
    path = _write_config(tmp_path, doc)
    with pytest.raises(ConfigError, match=r"scenarios\[0\]"):
        load_config(path)


def test_config_invalid_values_name_key_path(tmp_path):
    doc = json.loads(json.dumps(TINY_CONFIG))
    doc["bootstrap"]["resample_count"] = 5
    path = _write_config(tmp_path, doc)
    with pytest.raises(ConfigError, match="resample_count"):
        load_config(path)


def test_cli_config_error_is_single_line(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    rc = main(["coverage", "--config", str(path), "--out", str(tmp_path)])
    assert rc == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert len(err.strip().splitlines()) == 1
