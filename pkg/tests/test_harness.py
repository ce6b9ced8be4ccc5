import csv
import io
import math

import numpy as np
import pytest

from lagvar.harness import battery, cli
from lagvar.harness.config import ConfigError, from_mapping, load_config
from lagvar.harness.experiments import default_resolution, family_members, ratio_cell
from lagvar.harness.report import csv_text, fmt, read_csv, serialize_rows
from lagvar.specfun import AlphaParam
from lagvar.varlp import ExponentField


def write(tmp_path, text):
    p = tmp_path / "cfg.yaml"
    p.write_text(text)
    return str(p)


def test_default_config():
    cfg = load_config(None, battery.metric_names())
    assert cfg.n == 1 and cfg.alpha == (0.0,)
    assert cfg.exponent_field.p_minus == 2.0


@pytest.mark.parametrize("text, msg", [
    ("bogus: 1\n", "unknown keys"),
    ("n: two\n", "expected int"),
    ("n: 3\n", "n must be"),
    ("alpha: [-1.0]\n", "alpha"),
    ("exponent: {kind: constant, p: 1.0}\n", "hypothesis violation"),
    ("exponent: {kind: wavy}\n", "exponent block"),
    ("operators: [fourier]\n", "unknown operators"),
    ("tolerances: {nope: 1.0}\n", "unknown tolerance"),
    ("seed: -3\n", "unsigned"),
    ("[1, 2]\n", "mapping"),
    ("n: [\n", "YAML"),
])
def test_config_errors(tmp_path, text, msg):
    with pytest.raises(ConfigError, match=msg):
        load_config(write(tmp_path, text), battery.metric_names())


def test_p_minus_one_allowed_without_theorem_operators():
    cfg = from_mapping({"operators": [], "exponent": {"kind": "constant", "p": 1.0}})
    assert cfg.operators == ()


def test_selection_semantics():
    cfg = from_mapping({"operators": []})
    suites = {s for cid, s, _, gate in battery.CRITERIA if battery.selected(cfg, gate)}
    assert suites == {"specfun", "geometry", "varlp"}
    cfg = from_mapping({"operators": ["riesz"]})
    picked = {cid for cid, _, _, gate in battery.CRITERIA if battery.selected(cfg, gate)}
    assert "C10" in picked and "C09" not in picked


def test_every_criterion_reported():
    assert [c[0] for c in battery.CRITERIA] == [f"C{i:02d}" for i in range(1, 17)]
    assert set(battery.CHECKS) == {c[0] for c in battery.CRITERIA}


def test_row_pass_is_recomputable():
    for rel, v, tol, want in [("<=", 1.0, 1.0, True), ("<", 1.0, 1.0, False), (">=", 2.0, 1.0, True),
                              ("==", 0.0, 0.0, True), ("<=", math.nan, 1.0, False)]:
        row = battery.Row("C00", "x", "m", v, tol, rel)
        assert row.passed is want
        assert battery.row_passes(v, tol, rel) is want


def test_fmt_and_csv():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(True) == "true" and fmt(np.bool_(False)) == "false"
    assert fmt(np.int64(3)) == "3"
    assert float(fmt(math.pi)) == math.pi
    text = csv_text(("a", "b"), [(1, 2.5), ("x,y", math.inf)])
    assert list(csv.reader(io.StringIO(text))) == [["a", "b"], ["1", "2.5"], ["x,y", "inf"]]
    rows = [battery.Row("C01", "e", "m", 1e-9, 1e-8)]
    assert serialize_rows(rows).splitlines()[1] == b"C01,e,m,1.0000000000000001e-09,1e-08,<=,true"


def test_family_members_are_seeded():
    a = AlphaParam.of((0.0,))
    c1 = [m.coeffs for _, m in family_members("expansion", a, 3)]
    c2 = [m.coeffs for _, m in family_members("expansion", a, 3)]
    c3 = [m.coeffs for _, m in family_members("expansion", a, 4)]
    assert all(np.array_equal(x, y) for x, y in zip(c1, c2))
    assert not np.array_equal(c1[0], c3[0])
    with pytest.raises(ValueError):
        family_members("fractal", a, 0)


def test_identity_and_constant_cells():
    a = AlphaParam.of((0.0,))
    p = ExponentField.decay_power(2.0, 1.0, 2.0)
    res = default_resolution(1)
    for fam in ("expansion", "gaussian", "plateau"):
        assert ratio_cell("identity", fam, a, p, res, 0) == pytest.approx(1.0, abs=1e-10)
    assert ratio_cell("maximal_heat", "one", a, p, res, 0) == pytest.approx(1.0, abs=1e-12)
    assert ratio_cell("multiplier_unit", "mean_zero", a, ExponentField.constant(2.0), res, 0) <= 1 + 1e-6


def test_cli_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "exponent: {kind: constant, p: 1.0}\n")
    assert cli.main(["verify", "--config", bad, "--out", str(tmp_path / "o")]) == 2
    assert "hypothesis violation" in capsys.readouterr().err
    assert cli.main(["report", "--out", str(tmp_path / "missing")]) == 2
    blocked = tmp_path / "file"
    blocked.write_text("")
    assert cli.main(["verify", "--out", str(blocked / "sub")]) == 2
    assert cli.main(["kernels", "warp", "--out", str(tmp_path / "k")]) == 2


def test_cli_verify_subset_and_report(tmp_path, capsys):
    out = tmp_path / "v"
    assert cli.main(["verify", "--out", str(out), "--filter", "C0[127]"]) == 0
    summary = read_csv(out / "summary.csv")
    status = {r["criterion"]: r["status"] for r in summary}
    assert len(summary) == 16
    assert status["C01"] == status["C02"] == status["C07"] == "pass"
    assert status["C03"] == "skip"
    for suite in battery.SUITES:
        assert (out / f"{suite}.csv").exists()
    for r in read_csv(out / "specfun.csv"):
        assert (r["pass"] == "true") == battery.row_passes(float(r["value"]), float(r["tolerance"]), r["relation"])
    capsys.readouterr()
    assert cli.main(["report", "--out", str(out)]) == 0
    assert "C01 PASS" in capsys.readouterr().out


def test_cli_kernel_tables(tmp_path):
    out = tmp_path / "k"
    assert cli.main(["kernels", "heat", "riesz", "--out", str(out)]) == 0
    heat = read_csv(out / "kernel_heat.csv")
    assert max(float(r["max_pairwise_dev"]) for r in heat) <= 1e-6
    vals = {(r["x1"], r["y1"], r["t"]): float(r["bessel_product"]) for r in heat}
    for (x, y, t), v in vals.items():
        assert vals[(y, x, t)] == pytest.approx(v, rel=1e-12)
    assert len(read_csv(out / "kernel_riesz.csv")) == 8 * 8 - 8


def test_cli_norms(tmp_path):
    out = tmp_path / "n"
    assert cli.main(["norms", "--out", str(out)]) == 0
    rows = read_csv(out / "norms.csv")
    for r in rows:
        if r["family"] == "zero":
            assert float(r["norm"]) == 0.0
        elif r["exponent_id"].startswith("constant"):
            assert float(r["norm"]) == pytest.approx(float(r["classical"]), rel=1e-8)
        else:
            assert math.isfinite(float(r["pe_inf"])) and math.isfinite(float(r["lhinf"]))
        assert r["flag"] == "ok"


def test_cli_operators(tmp_path):
    cfg = write(tmp_path, "operators: [maximal_heat, multiplier]\n")
    out = tmp_path / "op"
    assert cli.main(["operators", "--config", cfg, "--out", str(out)]) == 0
    rows = read_csv(out / "operators.csv")
    assert {r["operator"] for r in rows} == {"identity", "maximal_heat", "multiplier", "multiplier_unit"}
    for r in rows:
        assert r["pass"] == "true"
        if r["operator"] == "identity" or r["family"] == "one":
            assert float(r["estimate"]) == pytest.approx(1.0, abs=1e-10)
