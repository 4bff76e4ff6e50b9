import json
import math

import pytest

from hhorseshoe import __version__, thermo as th
from hhorseshoe.cli import main
from hhorseshoe.serialize import format_value, from_csv, from_json, parse_value, to_csv, to_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(out, fmt="csv"):
    return (from_csv if fmt == "csv" else from_json)(out)


def test_params_check_defaults(capsys):
    code, out, _ = run(capsys, "params-check")
    assert code == 0
    cols, rows = rows_of(out)
    assert cols == ["name", "value", "bound", "ok"] and all(r[3] is True for r in rows)


def test_params_check_violation(capsys):
    code, out, err = run(capsys, "params-check", "--beta0", "6")
    assert code == 1 and "beta0" in err


def test_malformed_config_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("sigma=0.2\nnot a pair\n")
    assert run(capsys, "params-check", "--config", str(bad))[0] == 2
    bad.write_text("colour=blue\n")
    assert run(capsys, "params-check", "--config", str(bad))[0] == 2
    bad.write_text("sigma=abc\n")
    assert run(capsys, "params-check", "--config", str(bad))[0] == 2
    assert run(capsys, "params-check", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "pressure", "--depth", "40")[0] == 2
    assert run(capsys, "pressure", "--format", "xml")[0] == 2
    assert run(capsys, "orbit", "--start", "1,2")[0] == 2
    assert run(capsys, "lyap")[0] == 2
    assert run(capsys, "lyap", "--word", "101")[0] == 2
    assert run(capsys, "pressure", "--tol", "-1")[0] == 2
    assert run(capsys, "pressure", "--t-min", "0.5", "--t-max", "0.1", "--steps", "3")[0] == 2


def test_constraint_violation_in_other_command(capsys):
    assert run(capsys, "pressure", "--sigma", "0.4")[0] == 1


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment\nbeta0 = 6.0\ndepth=4\n")
    code, out, _ = run(capsys, "params-check", "--config", str(cfg))
    assert code == 1
    code, out, _ = run(capsys, "params-check", "--config", str(cfg), "--beta0", "7")
    assert code == 0
    assert dict((r[0], r[1]) for r in rows_of(out)[1])["beta0"] == 7


def test_orbit_rows(capsys):
    code, out, _ = run(capsys, "orbit", "--start", "0,0,0", "--steps", "10")
    cols, rows = rows_of(out)
    assert code == 0 and len(rows) == 10 and all(r == [i, 0, 0, 0, "0"] for i, r in enumerate(rows))
    code, out, _ = run(capsys, "orbit", "--start", "0,0,0.5", "--steps", "10")
    cols, rows = rows_of(out)
    assert len(rows) == 1 and rows[0][4] == "escape:gap_z"


def test_itinerary(capsys):
    code, out, _ = run(capsys, "itinerary", "--start", "0.5,0.5,1.0", "--steps", "3")
    cols, rows = rows_of(out)
    assert rows[0][0] == "1" and rows[0][3] == "gap_z"


def test_lyap_command(capsys):
    code, out, _ = run(capsys, "lyap", "--word", "0", "--word", "10")
    cols, rows = rows_of(out)
    assert [r[3] for r in rows[:2]] == [1, -1]
    assert rows[2][3] == th.lyap_of_periodic("10")
    code, out, _ = run(capsys, "lyap", "--max-period", "6")
    cols, rows = rows_of(out)
    assert all(r[3] < 0 for r in rows if "1" in r[0])
    assert "00001" in [r[0] for r in rows]


def test_pressure_single_row(capsys):
    code, out, _ = run(capsys, "pressure", "--t-min", "0", "--steps", "1", "--depth", "8")
    cols, rows = rows_of(out)
    assert len(rows) == 1
    assert abs(rows[0][2] - 0.4812118250596034) < 1e-9 and abs(rows[0][3] - 0.4812118250596034) < 1e-9


def test_pressure_crosses_diagonal_once(capsys):
    code, out, _ = run(capsys, "pressure", "--t-min", "0.2", "--t-max", "0.6", "--steps", "41")
    cols, rows = rows_of(out)
    gap = [r[3] - r[0] > 1e-12 for r in rows]
    assert gap[0] and not gap[-1]
    assert sum(a != b for a, b in zip(gap, gap[1:])) == 1


def test_pressure_round_trip(capsys):
    for fmt in ("csv", "json"):
        code, out, _ = run(capsys, "pressure", "--t-min", "0.1", "--t-max", "0.5", "--steps", "5", "--format", fmt)
        cols, rows = rows_of(out, fmt)
        curve = th.pressure_curve(12, 0.1, 0.5, 5)
        for row, e in zip(rows, curve):
            assert row == [e.t, e.depth, e.p_low, e.p_high]


def test_t0_command(capsys):
    code, out, _ = run(capsys, "t0", "--depth", "8")
    cols, rows = rows_of(out)
    assert code == 0 and [r[0] for r in rows] == ["root_of_pressure", "variational_sup"]
    assert all(0 < r[2] <= r[3] <= 0.482 for r in rows)


def test_t0_tolerance_halving(capsys):
    widths = []
    for tol in ("1e-4", "5e-5"):
        _, out, _ = run(capsys, "t0", "--depth", "8", "--tol", tol)
        row = rows_of(out)[1][0]
        widths.append(row[3] - row[2])
    assert widths[1] <= widths[0]


def test_t0_disagreement_exits_one(capsys, monkeypatch):
    real = th.t0_variational
    fake = lambda k, sigma: th.PhaseTransitionEstimate(k, 0.01, 0.02, "variational_sup")
    monkeypatch.setattr(th, "t0_variational", fake)
    assert run(capsys, "t0", "--depth", "6")[0] == 1
    monkeypatch.setattr(th, "t0_variational", real)


def test_measure_and_entropy(capsys):
    code, out, _ = run(capsys, "measure", "--t", "0", "--depth", "8", "--format", "json")
    cols, rows = rows_of(out, "json")
    row = dict(zip(cols, rows[0]))
    assert abs(row["entropy"] - 0.4812118250596034) < 1e-10
    assert "mass[000000]" in row and "mass[1]" in row
    code, out, _ = run(capsys, "entropy")
    cols, rows = rows_of(out)
    assert abs(rows[0][1] - rows[1][1]) < 1e-15


def test_verify_single_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "convergence")
    cols, rows = rows_of(out)
    assert code == 0 and all(r[2] is True for r in rows)


def test_verify_failure_exit(capsys, monkeypatch):
    from hhorseshoe import verify as vf

    bad = lambda: [vf.Check("map", "forced", False, 1.0, 0.0)]
    monkeypatch.setitem(vf.SUITES, "map", bad)
    code, out, err = run(capsys, "verify", "--suite", "map")
    assert code == 1 and "forced" in err


def test_output_files_and_manifest(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    code, out, _ = run(capsys, "pressure", "--steps", "1", "--out", str(tmp_path), "--depth", "6")
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["pressure-20231114T221320Z.csv", "pressure-20231114T221320Z.manifest.json"]
    assert (tmp_path / files[0]).read_text() == out
    manifest = json.loads((tmp_path / files[1]).read_text())
    assert manifest["version"] == __version__ and len(manifest["config_sha256"]) == 64
    assert manifest["config"]["depth"] == 6


def test_byte_identical_reruns(capsys):
    for argv in (["orbit", "--start", "0.3,0.7,0.05", "--steps", "20"],
                 ["pressure", "--t-min", "0", "--t-max", "0.6", "--steps", "7", "--format", "json"],
                 ["measure", "--t", "0.3", "--depth", "10"],
                 ["lyap", "--max-period", "5"]):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second


def test_serialize_round_trip_17_digits():
    values = [math.pi, 1 / 3, 2.0**-1074, 1.7976931348623157e308, -0.0, 0.1 + 0.2]
    assert [parse_value(format_value(v)) for v in values] == values
    cols, rows = from_csv(to_csv(["a", "b"], [[v, i] for i, v in enumerate(values)]))
    assert [r[0] for r in rows] == values
    cols, rows = from_json(to_json(["a"], [[v] for v in values]))
    assert [r[0] for r in rows] == values
    assert format_value(float("inf")) == "inf" and parse_value("nan") != parse_value("nan")


def test_pressure_gap_closes_once_across_transition(capsys):
    code, out, _ = run(capsys, "pressure", "--t-min", "0.2", "--t-max", "0.6", "--steps", "41")
    _, rows = rows_of(out)
    open_gap = [r[3] - r[0] > 0 for r in rows]
    assert code == 0 and open_gap[0] and not open_gap[-1]
    assert sum(a != b for a, b in zip(open_gap, open_gap[1:])) == 1
