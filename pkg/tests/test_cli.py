import csv
import json
import subprocess
import sys
from pathlib import Path

import mpmath
import pytest

from hadamard_kit.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def trailer(err):
    return json.loads(err.strip().splitlines()[-1])


def test_eval_writes_csv_manifest_and_cycle(tmp_path, capsys):
    out = tmp_path / "vals.csv"
    cyc = tmp_path / "cycle.json"
    code, _, _ = run(["eval", "--config", str(CONFIGS / "dilog.json"), "--out", str(out),
                      "--dump-cycle", str(cyc)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert rows[0].keys() == {"re_z", "im_z", "re_val", "im_val", "err_est"}
    for r in rows:
        z = complex(float(r["re_z"]), float(r["im_z"]))
        v = complex(float(r["re_val"]), float(r["im_val"]))
        assert abs(v - complex(mpmath.polylog(2, z))) < 1e-9
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert manifest["tolerances"]["quadrature_tol"] == 1e-10
    assert len(manifest["cycle_hash"]) == 64
    assert json.loads(cyc.read_text())


def test_eval_is_byte_identical_across_runs(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["eval", "--config", str(CONFIGS / "geometric_grid.json"), "--out", str(a)], capsys)[0] == 0
    assert run(["eval", "--config", str(CONFIGS / "geometric_grid.json"), "--out", str(b),
                "--threads", "4"], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_eval_localized(capsys):
    code, out, _ = run(["eval", "--config", str(CONFIGS / "dilog_localized.json")], capsys)
    assert code == 0
    assert len(out.strip().splitlines()) == 6


def test_point_in_product_exits_2(capsys):
    code, _, err = run(["eval", "--config", str(CONFIGS / "in_product.json")], capsys)
    assert code == 2
    assert trailer(err)["error"] == "PointInProduct"


def test_star_product(capsys):
    code, out, _ = run(["star", "--set", "preset:ray(pi,1)", "--set", "preset:ray(pi,1)"], capsys)
    assert code == 0
    body = json.loads(out)
    assert body["product"]["boxes"] == [{"rho": [0.0, "+inf"], "arc": [0.0, 0.0]}]
    assert body["strongly_convolvable"] is True


def test_unrepresentable_set_exits_2(capsys):
    code, _, err = run(["star", "--set", "preset:factorial(2)", "--set", "preset:ray(pi,1)"], capsys)
    assert code == 2 and trailer(err)["error"] == "UnrepresentableSet"


def test_cycle_reports_certificate(capsys):
    code, out, _ = run(["cycle", "--config", str(CONFIGS / "cycle_dilog.json")], capsys)
    body = json.loads(out)
    assert code == 0 and body["ok"] and body["zero_winding"] == 1


def test_unknown_suite_exits_64(capsys):
    code, _, err = run(["verify", "nope"], capsys)
    assert code == 64 and trailer(err)["error"] == "UsageError"


def test_verify_suite(capsys):
    code, out, err = run(["verify", "quadrature"], capsys)
    assert code == 0 and json.loads(out)["ok"]
    assert "PASS quadrature" in err


def test_oracle_series(capsys):
    code, out, _ = run(["oracle", "series", "--expr", "1/(1-z/2)", "--expr2", "1/(1-z/3)",
                        "--r", "1", "--n", "40", "--z", "1"], capsys)
    body = json.loads(out)
    assert code == 0
    assert abs(complex(*body["series_value"]) - 1.2) < 1e-12


def test_missing_config_exits_2(tmp_path, capsys):
    code, _, err = run(["eval", "--config", str(tmp_path / "none.json")], capsys)
    assert code == 2 and trailer(err)["error"] == "ConfigError"


def test_bad_subcommand_via_subprocess():
    proc = subprocess.run([sys.executable, "-m", "hadamard_kit.cli", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 64
    assert json.loads(proc.stderr.strip().splitlines()[-1])["exit_code"] == 64


@pytest.mark.parametrize("argv", [["--version"], ["eval", "--help"]])
def test_help_and_version_exit_0(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 0
