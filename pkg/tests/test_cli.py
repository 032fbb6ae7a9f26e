import csv
import io
import json
import math

import pytest

from ising_qfi.cli import parse_values, run
from ising_qfi.errors import ConfigError


def read_csv(path):
    text = path.read_text()
    meta = [l for l in text.splitlines() if l.startswith("#")]
    body = "\n".join(l for l in text.splitlines() if not l.startswith("#"))
    return meta, list(csv.DictReader(io.StringIO(body)))


def numeric_cells_finite(rows, skip=("backend", "method", "error", "L", "beta")):
    for row in rows:
        for key, value in row.items():
            if key in skip or value == "":
                continue
            assert math.isfinite(float(value)), (key, value)


@pytest.mark.parametrize(
    "spec,expected",
    [("0:0.3:0.1", [0.0, 0.1, 0.2, 0.3]), ("1,10,inf", [1.0, 10.0, math.inf]), (2.5, [2.5]),
     ({"start": 1, "stop": 2, "step": 0.5}, [1.0, 1.5, 2.0]), (["inf", 3], [math.inf, 3.0])],
)
def test_parse_values(spec, expected):
    assert parse_values(spec, "x") == expected


@pytest.mark.parametrize("spec", ["1:0:0.1", "0:1:0", "0:1", "abc", [], "nan"])
def test_parse_values_rejects(spec):
    with pytest.raises(ConfigError):
        parse_values(spec, "x")


def test_qfi_scan_csv(tmp_path):
    out = tmp_path / "scan.csv"
    assert run(["qfi-scan", "--L", "2,4,inf", "--J", "1", "--h", "0.5:1.5:0.5", "--beta", "20,inf", "--out", str(out)]) == 0
    meta, rows = read_csv(out)
    assert meta[0].startswith("# tool: ising-qfi")
    assert any(m.startswith("# config_sha256: ") for m in meta)
    assert list(rows[0]) == ["L", "J", "h", "beta", "backend", "G_J", "G1", "G2", "gamma_J", "error"]
    assert len(rows) == 3 * 3 * 2
    numeric_cells_finite(rows)
    crit = [r for r in rows if r["L"] == "inf" and r["h"] == "1.0" and r["beta"] == "inf"][0]
    assert crit["error"] and crit["G_J"] == ""
    exact = [r for r in rows if r["L"] == "4" and r["h"] == "1.0" and r["beta"] == "inf"][0]
    assert float(exact["G_J"]) == pytest.approx(1.5) and float(exact["gamma_J"]) == 1.0


def test_gamma_ratio_curves(tmp_path):
    cfg = tmp_path / "gamma.json"
    cfg.write_text(json.dumps({"L": [2], "beta": [1, 10, 100, 1000, "inf"], "J": [0.5],
                               "h": {"start": 0, "stop": 3, "step": 0.01}}))
    out = tmp_path / "gamma.csv"
    assert run(["qfi-scan", "--config", str(cfg), "--out", str(out), "--threads", "4"]) == 0
    _, rows = read_csv(out)
    curves = {}
    for r in rows:
        if r["gamma_J"]:
            curves.setdefault(r["beta"], []).append((float(r["h"]), float(r["gamma_J"])))
    for beta in ("10.0", "100.0"):
        assert min(g for h, g in curves[beta] if h <= 0.1) < 0.99
    for beta in ("1.0", "10.0", "100.0", "1000.0"):
        assert max(g for _, g in curves[beta]) > 1.01
    # h = 0 has no zero-temperature information, so no ratio is emitted
    assert all(r["gamma_J"] == "" for r in rows if r["h"] == "0.0")


def test_infinite_chain_cusp_scan(tmp_path):
    out = tmp_path / "cusp.csv"
    assert run(["qfi-scan", "--L", "inf", "--J", "1", "--h", "0.5:1.5:0.01", "--beta", "20", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    g = [float(r["G_J"]) for r in rows]
    i = max(range(len(g)), key=g.__getitem__)
    assert float(rows[i]["h"]) == 1.0
    left, right = g[i] - g[i - 1], g[i + 1] - g[i]
    assert left > 0 > right
    assert abs(abs(left) - abs(right)) > 1e-3 * abs(left)


def test_empty_range_writes_nothing(tmp_path, capsys):
    out = tmp_path / "never.csv"
    assert run(["qfi-scan", "--L", "2", "--h", "1:0:0.1", "--out", str(out)]) == 2
    assert not out.exists()
    assert "field 'h'" in capsys.readouterr().err


def test_config_json_error_reports_line(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "L": [2],\n  "J": [1,]\n}')
    assert run(["qfi-scan", "--config", str(cfg)]) == 2
    assert "line 3" in capsys.readouterr().err


@pytest.mark.parametrize("args", [["--J", "-1"], ["--beta", "0"], ["--L", "1"], ["--L", "2.5"], ["--seed", "-3"]])
def test_config_validation(args, tmp_path):
    assert run(["qfi-scan", "--h", "1", *args, "--out", str(tmp_path / "x.csv")]) == 2


def test_unwritable_output(tmp_path):
    assert run(["qfi-scan", "--h", "1", "--out", str(tmp_path / "missing" / "x.csv")]) == 2


def test_bad_subcommand():
    assert run(["frobnicate"]) == 2


def test_deterministic_across_thread_counts(tmp_path):
    texts = []
    for threads in (1, 4):
        out = tmp_path / f"t{threads}.csv"
        run(["qfi-scan", "--L", "2,3,8", "--J", "0.5,1", "--h", "0:2:0.25", "--beta", "3,inf",
             "--threads", str(threads), "--out", str(out)])
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_optimal_field(tmp_path):
    out = tmp_path / "opt.csv"
    assert run(["optimal-field", "--L", "2,3,4,50,inf", "--J", "1", "--beta", "inf,20", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    numeric_cells_finite(rows)
    for r in rows:
        if r["beta"] == "inf" and r["L"] != "inf":
            assert abs(float(r["h_star"]) - 1.0) < 1e-6
    inf_row = [r for r in rows if r["L"] == "inf" and r["beta"] == "20.0"][0]
    assert inf_row["backend"] == "thermo"
    peak = 2 * 0.9159655941772190 / math.pi**2 * 20
    assert float(inf_row["G_J"]) == pytest.approx(peak, rel=0.05)
    zero_t_inf = [r for r in rows if r["L"] == "inf" and r["beta"] == "inf"][0]
    assert zero_t_inf["error"]


def test_optimal_field_two_sites_temperature_drift(tmp_path):
    out = tmp_path / "drift.csv"
    run(["optimal-field", "--L", "2", "--J", "0.1,0.5,5,8", "--beta", "1,10", "--out", str(out)])
    _, rows = read_csv(out)
    h = {(r["J"], r["beta"]): float(r["h_star"]) for r in rows}
    # hot and weakly coupled: peak at or near zero field
    assert h[("0.1", "1.0")] < 0.05 and h[("0.5", "1.0")] < 0.05
    # h*/J is a function of beta J alone: (J, beta) = (0.5, 10) and (5, 1) coincide
    assert h[("0.5", "10.0")] / 0.5 == pytest.approx(h[("5.0", "1.0")] / 5.0, rel=1e-6)
    assert h[("5.0", "1.0")] < 5.0


def test_sld_dump(tmp_path):
    out = tmp_path / "sld.json"
    assert run(["sld-dump", "--L", "2", "--J", "1", "--h", "1", "--beta", "inf", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    diag = data["diagnostics"]
    assert diag["closed_form_residual"] < 1e-8
    assert abs(diag["trace_rho_sld"]) < 1e-8
    assert diag["trace_rho_sld2"] == pytest.approx(diag["qfi"], abs=1e-8)
    assert data["beta"] == "inf"
    assert json.loads(json.dumps(data)) == data


def test_sld_dump_capacity():
    assert run(["sld-dump", "--L", "13", "--J", "1", "--h", "1"]) == 4


def test_fisher_mag(tmp_path):
    out = tmp_path / "fm.csv"
    assert run(["fisher-mag", "--L", "2,3", "--J", "1", "--h", "0.5:1.5:0.5", "--beta", "3,1000", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    numeric_cells_finite(rows)
    for r in rows:
        assert float(r["F_J"]) <= float(r["G_J"]) + 1e-9


def test_fisher_mag_optimize(tmp_path):
    out = tmp_path / "eff.csv"
    assert run(["fisher-mag", "--optimize", "--L", "2", "--J", "1,4", "--beta", "10", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert [r["J"] for r in rows] == ["1.0", "4.0"]
    assert all(float(r["ratio"]) <= 1 + 1e-9 for r in rows)


def test_bayes_sim(tmp_path):
    cfg = tmp_path / "bayes.json"
    cfg.write_text(json.dumps({"M_schedule": [1, 100, 500], "n_sets": 20}))
    out = tmp_path / "bayes.csv"
    assert run(["bayes-sim", "--config", str(cfg), "--seed", "3", "--out", str(out)]) == 0
    meta, rows = read_csv(out)
    assert "# seed: 3" in meta
    numeric_cells_finite(rows)
    last = rows[-1]
    assert float(last["bayes_variance"]) == pytest.approx(float(last["cr_bound"]), rel=0.2)
    summary = json.loads(out.with_suffix(".summary.json").read_text())
    assert summary["true_J"] == 3.0 and len(summary["rows"]) == 3


def test_bayes_sim_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(["bayes-sim", "--seed", "11", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_scaling(tmp_path):
    out = tmp_path / "scaling.csv"
    assert run(["scaling", "--L", "64,128,256,512", "--J", "1", "--h", "1", "--out", str(out)]) == 0
    meta, rows = read_csv(out)
    exponent = float([m for m in meta if m.startswith("# fit_exponent")][0].split(": ")[1])
    assert abs(exponent - 2.0) < 0.02
    summary = json.loads(out.with_suffix(".summary.json").read_text())
    assert summary["exponent"] == exponent


def test_scaling_thermal_density(tmp_path):
    out = tmp_path / "thermal.csv"
    assert run(["scaling", "--L", "256,512,1024,2048", "--J", "1", "--h", "1", "--beta", "20", "--out", str(out)]) == 0
    summary = json.loads(out.with_suffix(".summary.json").read_text())
    assert summary["qfi_values"][-1] / 2048 == pytest.approx(summary["thermo_density"], rel=1e-6)


def test_scaling_needs_three_sizes():
    assert run(["scaling", "--L", "64,128"]) == 2
