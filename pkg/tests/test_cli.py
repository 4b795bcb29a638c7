"""Command-line interface: formats, round-trips, exit codes."""

import csv
import io
import json

import pytest

from wallcurve.cli import _fmt, main


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_walk_zero_steps(capsys):
    code, out, _ = run_cli(capsys, "walk", "--steps", "0")
    assert code == 0
    assert out == "k,site,height\n0,0,1\n"


def test_walk_row_count_and_determinism(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["walk", "--steps", "1000", "--seed", "5", "-o", str(out1)]) == 0
    assert main(["walk", "--steps", "1000", "--seed", "5", "-o", str(out2)]) == 0
    data1 = out1.read_bytes()
    assert data1 == out2.read_bytes()
    assert data1.decode().count("\n") == 1002  # header + 1001 rows


def test_walk_emits_full_resolution_by_default(tmp_path):
    out = tmp_path / "wall.csv"
    assert main(["walk", "--steps", "1000000", "--seed", "3", "-o", str(out)]) == 0
    with out.open() as fh:
        assert sum(1 for _ in fh) == 10**6 + 2  # header + one row per block


def test_csv_round_trip_is_byte_identical(tmp_path):
    out = tmp_path / "curve.csv"
    assert main(["curve", "--steps", "500", "--n", "500", "--seed", "8", "-o", str(out)]) == 0
    text = out.read_text()
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    assert header == ["t", "x", "h"]
    rebuilt = [",".join(header)]
    for row in reader:
        rebuilt.append(",".join(_fmt(float(v)) for v in row))
    assert "\n".join(rebuilt) + "\n" == text


def test_curve_mirrors_under_negative_position_factor(capsys):
    code, plus, _ = run_cli(capsys, "curve", "--steps", "50", "--n", "50", "--seed", "4")
    assert code == 0
    code, minus, _ = run_cli(
        capsys, "curve", "--steps", "50", "--n", "50", "--seed", "4", "--c", "-1"
    )
    assert code == 0
    for row_p, row_m in zip(plus.splitlines()[1:], minus.splitlines()[1:]):
        t_p, x_p, h_p = row_p.split(",")
        t_m, x_m, h_m = row_m.split(",")
        assert (t_p, h_p) == (t_m, h_m)
        assert float(x_m) == pytest.approx(-float(x_p))


def test_curve_strided_row_count(capsys):
    code, out, _ = run_cli(
        capsys, "curve", "--steps", "1000", "--n", "1000", "--stride", "100"
    )
    assert code == 0
    assert len(out.splitlines()) == 1 + 1000 // 100 + 1


def test_profile_emits_levels(capsys):
    code, out, _ = run_cli(
        capsys,
        "profile", "--steps", "400", "--n", "400", "--t", "0.5",
        "--ymin", "-1", "--ymax", "1", "--levels", "11",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "y,local_time"
    assert len(lines) == 12


def test_verify_area_passes_with_exit_zero(capsys, tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", "area", "--t", "1", "--n", "2000", "-o", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["verdict"] == "pass"
    assert report["statistic"] < 1e-9
    assert set(report) == {
        "test_name", "statistic", "p_value", "n_samples", "seed", "params", "verdict",
    }
    assert report["params"]["alpha"] == 0.001


def test_verify_json_round_trip(tmp_path):
    out = tmp_path / "report.json"
    main(["verify", "area", "--n", "1000", "-o", str(out)])
    text = out.read_text()
    assert json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n" == text


def test_table_json_round_trip(tmp_path):
    out = tmp_path / "walk.json"
    main(["walk", "--steps", "50", "--seed", "2", "--format", "json", "-o", str(out)])
    text = out.read_text()
    rows = json.loads(text)
    assert len(rows) == 51
    assert rows[0] == {"k": 0, "site": 0, "height": 1}
    assert json.dumps(rows, indent=2, sort_keys=True) + "\n" == text


def test_verify_statistical_failure_exits_one(capsys):
    # alpha = 1 cannot be exceeded by any p-value, forcing a fail verdict.
    code, out, _ = run_cli(
        capsys,
        "verify", "knight", "--replicates", "600", "--n", "500", "--alpha", "1.0",
    )
    assert code == 1
    assert json.loads(out)["verdict"] == "fail"


def test_verify_reports_are_byte_deterministic(tmp_path):
    args = ["verify", "reversal", "--replicates", "600", "--n", "1000", "--seed", "12"]
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(args + ["-o", str(out1)]) == 0
    assert main(args + ["-o", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_verify_unknown_experiment_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "bogus"])
    assert exc.value.code == 2


def test_invalid_parameters_exit_two(capsys):
    code, _, err = run_cli(capsys, "verify", "area", "--t", "-1")
    assert code == 2
    assert "error" in err


def test_unwritable_output_exits_two(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "walk", "--steps", "1", "-o", str(tmp_path / "missing" / "x.csv")
    )
    assert code == 2
    assert "error" in err


def test_float_formatting_round_trips():
    for x in (0.25, 1 / 3, 1e-17, 123456.789012345678, 2.0**-52):
        assert float(_fmt(x)) == x
        assert _fmt(float(_fmt(x))) == _fmt(x)
