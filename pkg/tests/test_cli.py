import json
import os

import numpy as np
import pytest

from dressedfwm import cli
from dressedfwm.config import (
    bundled_config_names,
    load_config,
    parse_config,
    parse_quantity,
)
from dressedfwm.model import TWO_PI

SMALL = """
[run]
observables = gain, intensity_noise, duan, sideband_pairs

[drives]
pump_rabi = 480 MHz
one_photon_detuning = 800 MHz
atom_number = 2.0e10

[doppler]
points = 3

[sweep.1]
parameter = two_photon_detuning
start = -110 MHz
stop = -80 MHz
count = 2

[sweep.2]
parameter = frequency
start = 1 MHz
stop = 11 MHz
count = 3
"""


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


@pytest.mark.parametrize(
    "text,dim,value",
    [
        ("480 MHz", "frequency", TWO_PI * 480e6),
        ("3.035GHz", "frequency", TWO_PI * 3.035e9),
        ("-12 kHz", "frequency", -TWO_PI * 12e3),
        ("1e6 rad/s", "frequency", 1e6),
        ("12.5 mm", "length", 0.0125),
        ("400 K", "temperature", 400.0),
        ("0.2", "none", 0.2),
    ],
)
def test_quantities(text, dim, value):
    assert parse_quantity(text, dim) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text,dim", [("480", "frequency"), ("3 mm", "frequency"), ("fast", "none")])
def test_bad_quantities(text, dim):
    with pytest.raises(ValueError):
        parse_quantity(text, dim)


def test_empty_config_has_diagnostics():
    cfg, diags = parse_config("")
    assert cfg is None and len(diags) >= 1


def test_every_problem_is_reported_with_its_line():
    text = "[drives]\npump_rabi = 480\nbogus = 1 MHz\natom_number = 1e9\n[sweep.1]\nparameter = colour\n"
    _, diags = parse_config(text)
    lines = {d.line for d in diags}
    assert {2, 3, 6} <= lines
    assert len(diags) >= 3


def test_three_sweep_axes_are_rejected():
    extra = "".join(
        f"\n[sweep.{i}]\nparameter = {p}\nstart = 1 MHz\nstop = 2 MHz\ncount = 2\n"
        for i, p in ((3, "pump_rabi"),)
    )
    _, diags = parse_config(SMALL + extra)
    assert any("at most 2" in d.message for d in diags)


def test_dressing_on_four_level_scheme_is_rejected():
    text = SMALL.replace("[run]", "[run]\nscheme = rb-double-lambda-4").replace(
        "atom_number", "dressing_rabi = 20 MHz\natom_number"
    )
    _, diags = parse_config(text)
    assert any("dressing" in d.message for d in diags)


def test_zero_count_is_rejected():
    _, diags = parse_config(SMALL.replace("count = 2", "count = 0"))
    assert diags


@pytest.mark.parametrize("name", bundled_config_names())
def test_bundled_configs_validate_clean(name):
    cfg = load_config(name)
    assert 1 <= len(cfg.axes) <= 2


def test_zero_coupling_is_exactly_unit(tmp_path):
    cfg, diags = parse_config(SMALL.replace("atom_number", "g_a = 0 rad/s\ng_b = 0 rad/s\natom_number"))
    assert not diags
    res = cli.run(cfg)
    assert np.all(res.column("gain_probe") == 1.0)
    assert np.all(res.column("gain_conjugate") == 0.0)
    for col in ("noise_diff", "noise_sum"):
        assert np.all(res.column(col) == 1.0)
    for col in ("duan", "P1_diff", "P2_diff", "P1_sum", "P2_sum"):
        assert np.allclose(res.column(col), 2.0, rtol=0, atol=1e-12)


def test_grid_order_and_columns():
    cfg, _ = parse_config(SMALL)
    res = cli.run(cfg)
    assert res.columns[:2] == ("delta_MHz", "frequency_MHz")
    assert res.rows.shape == (6, len(res.columns))
    assert np.allclose(res.column("delta_MHz"), [-110, -110, -110, -80, -80, -80])
    assert np.allclose(res.column("frequency_MHz"), [1, 6, 11] * 2)
    # gain does not depend on the analysis frequency
    g = res.column("gain_probe")
    assert g[0] == g[1] == g[2]


def test_reruns_and_worker_counts_are_byte_identical(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    cfg_path = write(tmp_path, SMALL)
    outs = []
    for n, threads in enumerate(("1", "1", "2")):
        out = tmp_path / f"o{n}.csv"
        assert cli.main(["simulate", str(cfg_path), "--out", str(out), "--threads", threads]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    head = outs[0].decode().splitlines()
    assert head[0] == "# schema: dressedfwm-sweep/1"
    assert any(line.startswith("# config_hash: ") for line in head)
    assert "# timestamp: 2023-11-14T22:13:20Z" in head


def test_thread_env_override(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli.resolve_threads() == 3
    assert cli.resolve_threads(2) == 2
    monkeypatch.delenv(cli.THREADS_ENV)
    assert cli.resolve_threads() == (os.cpu_count() or 1)


def test_json_mirrors_csv(tmp_path):
    cfg_path = write(tmp_path, SMALL)
    j = tmp_path / "o.json"
    c = tmp_path / "o.csv"
    assert cli.main(["simulate", str(cfg_path), "--out", str(j), "--format", "json", "--no-doppler"]) == 0
    assert cli.main(["simulate", str(cfg_path), "--out", str(c), "--no-doppler"]) == 0
    doc = json.loads(j.read_text())
    lines = [l for l in c.read_text().splitlines() if not l.startswith("#")]
    assert doc["columns"] == lines[0].split(",")
    assert doc["provenance"]["schema"] == "dressedfwm-sweep/1"
    assert doc["provenance"]["doppler"] is False
    csv_rows = [[float(x) for x in l.split(",")] for l in lines[1:]]
    assert doc["rows"] == csv_rows


def test_validate_and_schemes_commands(tmp_path, capsys):
    good = write(tmp_path, SMALL)
    bad = write(tmp_path, "[drives]\npump_rabi = lots\n", "bad.cfg")
    assert cli.main(["validate", str(good)]) == 0
    assert cli.main(["validate", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "bad.cfg:2:" in err
    assert cli.main(["validate", "no-such-config"]) == 2
    assert cli.main(["schemes"]) == 0
    assert "rb-double-lambda" in capsys.readouterr().out


def test_numerical_failure_names_the_grid_point(tmp_path, capsys):
    # an absurd density overflows the propagator
    text = SMALL.replace("atom_number = 2.0e10", "atom_number = 1e16")
    path = write(tmp_path, text)
    assert cli.main(["simulate", str(path), "--out", str(tmp_path / "x.csv")]) == 3
    assert "two_photon_detuning=" in capsys.readouterr().err
