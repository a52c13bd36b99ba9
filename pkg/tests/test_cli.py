import json

import pytest

from fedsim.cli import main


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "exp.json"
    p.write_text(json.dumps({
        "algorithm": "bcrs_opwa", "gamma": 3, "rounds": 3, "n_samples": 400,
        "n_features": 6, "n_classes": 4, "hidden_units": 6,
    }))
    return p


def test_run(tmp_path, config, capsys):
    m = tmp_path / "m.csv"
    o = tmp_path / "o.csv"
    assert main(["run", "--config", str(config), "--metrics", str(m), "--overlap-report", str(o)]) == 0
    assert len(m.read_text().splitlines()) == 4
    assert o.read_text().startswith("round,degree,fraction")
    assert "bcrs_opwa: 3 rounds" in capsys.readouterr().out


def test_partition_report(tmp_path, config):
    out = tmp_path / "p.json"
    assert main(["partition-report", "--config", str(config), "--out", str(out)]) == 0
    parts = json.loads(out.read_text())
    assert len(parts) == 10
    assert all(len(v) == 4 for v in parts.values())
    assert sum(sum(v) for v in parts.values()) == 320


def test_overlap_report(tmp_path, config):
    out = tmp_path / "h.csv"
    assert main(["overlap-report", "--config", str(config), "--out", str(out)]) == 0
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 3 * 5
    for rnd in range(3):
        fr = [float(r.split(",")[2]) for r in rows if r.startswith(f"{rnd},")]
        assert sum(fr) == pytest.approx(1.0)


def test_sweep(tmp_path, config, capsys):
    m = tmp_path / "m.csv"
    assert main(["sweep", "--config", str(config), "--param", "gamma", "--values", "1", "5", "--metrics", str(m)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "param,value,final_acc,best_acc,cum_actual"
    assert len(out) == 3
    assert (tmp_path / "m_gamma1.csv").exists() and (tmp_path / "m_gamma5.csv").exists()


def test_sweep_alpha_default_values(tmp_path, config, capsys):
    assert main(["sweep", "--config", str(config), "--param", "alpha"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 6


def test_bad_config_fails_closed(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"rounds": 2, "mystery": 1}))
    assert main(["run", "--config", str(p)]) == 1
    assert "mystery" in capsys.readouterr().err
