import pytest

from multivax.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main

SCENARIO = """
[model]
preset = {preset}
{extra}
[mesh]
dt = {dt}
horizon_T = 60
stride = 1

[strategy]
kind = {kind}

[output]
dir = cli
"""


def _write(tmp_path, preset="single_vaccine", extra="", dt=0.25, kind="zero"):
    path = tmp_path / "scn.ini"
    path.write_text(SCENARIO.format(preset=preset, extra=extra, dt=dt, kind=kind))
    return path


def test_simulate_writes_series(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MULTIVAX_OUTPUT_ROOT", str(tmp_path / "out"))
    assert main(["simulate", str(_write(tmp_path))]) == EXIT_OK
    assert (tmp_path / "out" / "cli" / "scn.csv").exists()
    assert (tmp_path / "out" / "cli" / "manifest.csv").exists()
    assert "deaths" in capsys.readouterr().out


def test_sweep(tmp_path):
    scn = _write(tmp_path, kind="threshold\nS_star = 0")
    code = main(["--out", str(tmp_path / "o"), "sweep", str(scn), "--vary", "strategy.S_star=0:20:10"])
    assert code == EXIT_OK
    rows = (tmp_path / "o" / "cli" / "sweep.csv").read_text().splitlines()
    assert rows[0] == "strategy.S_star,deaths_total,doses_total_1"
    assert len(rows) == 4


def test_invalid_scenario_exit_code(tmp_path, capsys):
    assert main(["simulate", str(_write(tmp_path, dt=0))]) == EXIT_INVALID
    assert "mesh" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "missing.ini")]) == EXIT_INVALID
    assert main(["sweep", str(_write(tmp_path)), "--vary", "nonsense"]) == EXIT_INVALID


def test_numerical_failure_exit_code(tmp_path):
    scn = _write(tmp_path, extra="theta = 3", dt=1)
    assert main(["--out", str(tmp_path), "simulate", str(scn)]) == EXIT_NUMERICAL


def test_presets_list(capsys):
    assert main(["presets", "list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "two_classes" in out and "infinite_TR" in out


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["fly"])
