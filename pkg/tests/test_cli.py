import json

import numpy as np
import pytest

from bulkedge.cli import (EXIT_GAP, EXIT_OK, EXIT_SCHEMA, config_hash, load_config,
                          main, parse_number)
from bulkedge.errors import ConfigError

ATOMIC = """
[experiment]
invariant = chern
seed = 3

[model]
kind = atomic
M = 1.0
mu = 0.0

[disorder]
kind = point
count = 1

[geometry]
bulk = 12 12
ribbon = 24 12
depth = 5

[edge]
window = -0.3 0.3
margin = 4

[output]
dir = {out}
figures = {figures}
"""


def _write(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_parse_number_forms():
    assert parse_number("0.25") == 0.25
    assert parse_number("pi") == pytest.approx(np.pi)
    assert parse_number("-pi/2") == pytest.approx(-np.pi / 2)
    assert parse_number("3*pi/4") == pytest.approx(3 * np.pi / 4)
    with pytest.raises(ValueError):
        parse_number("two")


def test_validate_ok(tmp_path, capsys):
    cfg = _write(tmp_path, ATOMIC.format(out=tmp_path / "o", figures="false"))
    assert main(["validate", str(cfg)]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] and len(out["config_hash"]) == 16


def test_schema_errors_name_the_field(tmp_path, capsys):
    bad = ATOMIC.format(out=tmp_path, figures="false").replace("M = 1.0", "mass = 1.0")
    assert main(["validate", str(_write(tmp_path, bad))]) == EXIT_SCHEMA
    assert "[model]" in capsys.readouterr().err
    bad = ATOMIC.format(out=tmp_path, figures="false").replace("bulk = 12 12", "bulk = twelve")
    assert main(["validate", str(_write(tmp_path, bad))]) == EXIT_SCHEMA
    assert "[geometry] bulk" in capsys.readouterr().err
    bad = ATOMIC.format(out=tmp_path, figures="false").replace("kind = atomic", "kind = hubbard")
    assert main(["validate", str(_write(tmp_path, bad))]) == EXIT_SCHEMA
    assert "[model] kind" in capsys.readouterr().err


def test_window_must_contain_mu(tmp_path):
    bad = ATOMIC.format(out=tmp_path, figures="false").replace("window = -0.3 0.3",
                                                               "window = 0.1 0.3")
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, bad))


def test_json_config_equivalent(tmp_path):
    cfg_path = _write(tmp_path, ATOMIC.format(out="o", figures="false"))
    cfg = load_config(cfg_path)
    json_path = tmp_path / "exp.json"
    json_path.write_text(json.dumps(cfg))
    assert load_config(json_path) == cfg
    assert config_hash(load_config(json_path)) == config_hash(cfg)


def test_run_atomic_and_reports(tmp_path, capsys):
    out = tmp_path / "res"
    cfg = _write(tmp_path, ATOMIC.format(out=out, figures="true"))
    assert main(["run", str(cfg)]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["verdict"] == "pass" and summary["bulk"] == 0
    report = json.loads((out / "report.json").read_text())
    assert report["verdict"] == "pass"
    assert report["bulk_value"] == {"value": 0, "provenance": "formula"}
    for row in report["samples"]:
        for key in ("bulk_gap", "bulk_value", "edge_value"):
            assert set(row[key]) == {"value", "provenance"}
    assert (out / "report.csv").exists()
    for fig in ("spectrum.png", "edge_bands.png", "samples.png"):
        assert (out / fig).exists()
    csv_lines = (out / "report.csv").read_text().splitlines()
    assert csv_lines[0].startswith("sample,status,bulk_gap")
    assert len(csv_lines) == 2


def test_reports_are_byte_identical(tmp_path, capsys):
    out = tmp_path / "res"
    cfg = _write(tmp_path, ATOMIC.format(out=out, figures="false"))
    assert main(["run", str(cfg)]) == EXIT_OK
    first = (out / "report.json").read_bytes()
    first_csv = (out / "report.csv").read_bytes()
    assert main(["run", str(cfg)]) == EXIT_OK
    assert (out / "report.json").read_bytes() == first
    assert (out / "report.csv").read_bytes() == first_csv
    capsys.readouterr()


def test_run_gapless_model_exits_gap_closed(tmp_path, capsys):
    text = ATOMIC.format(out=tmp_path / "g", figures="false")
    text = text.replace("kind = atomic", "kind = haldane").replace("M = 1.0", "M = 0.0")
    assert main(["run", str(_write(tmp_path, text))]) == EXIT_GAP
    capsys.readouterr()


def test_oracle_subcommand(capsys):
    rc = main(["oracle", "berry-chern", "--param", "t2=0.1", "--param", "phi=pi/2",
               "--param", "nk=24"])
    assert rc == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert round(out["value"]) == 1
    assert out["convergence"]["integer_residual"] < 1e-8
    rc = main(["oracle", "kramers-count", "--param", "t2=0.1", "--param", "phi=pi/2",
               "--param", "model=kane_mele", "--param", "rashba=0.2",
               "--param", "mu=0.05", "--param", "nk=160", "--param", "depth=20"])
    assert rc == EXIT_OK
    assert json.loads(capsys.readouterr().out)["value"] == 1.0
    rc = main(["oracle", "berry-chern", "--param", "bogus=1"])
    assert rc == EXIT_SCHEMA


def test_missing_config_file():
    assert main(["validate", "/nonexistent/path.cfg"]) == EXIT_SCHEMA
