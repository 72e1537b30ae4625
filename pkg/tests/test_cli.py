import csv
import json
import shutil
import subprocess

import pytest

from adsgeo import cli
from adsgeo.report import Check, Report, run_checks


def _run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = cli.main(list(args) + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def _strip_times(text):
    d = json.loads(text)
    for e in d["entries"]:
        e.pop("wall_time")
    return d


def test_malformed_parameter_exits_2_without_report(tmp_path, capsys):
    code, report, out = _run(tmp_path, "static", "--param", "M=x")
    assert code == 2
    assert report is None and not out.exists()
    assert "M" in capsys.readouterr().err


@pytest.mark.parametrize(
    "args",
    [
        ["static", "--tol", "static.residual=-1"],
        ["static", "--tol", "static.residual=abc"],
        ["static", "--tol", "no.such.check=1e-3"],
        ["static", "--param", "M"],
        ["compactify", "--metric", "shooting"],
        ["static", "--n", "2"],
    ],
)
def test_configuration_errors(tmp_path, args):
    code, report, _ = _run(tmp_path, *args)
    assert code == 2 and report is None


def test_unknown_metric_is_rejected_at_parse_time():
    with pytest.raises(SystemExit) as exc:
        cli.main(["static", "--metric", "kerr"])
    assert exc.value.code == 2


def test_static_horizon_entry(tmp_path):
    code, report, _ = _run(tmp_path, "static", "--metric", "schwarzschild-ads", "--param", "M=1")
    assert code == 0
    horizon = [e for e in report["entries"] if e["check_name"] == "static.horizon"]
    assert len(horizon) == 1
    assert abs(horizon[0]["lhs"] - 0.6823278) < 1e-6
    assert horizon[0]["pass"] is True


def test_failed_check_gives_exit_1(tmp_path):
    code, report, _ = _run(tmp_path, "static", "--metric", "ads", "--tol", "static.residual=1e-300")
    assert code == 1
    failed = [e for e in report["entries"] if not e["pass"]]
    assert failed and all(e["check_name"] == "static.residual" for e in failed)
    assert report["summary"]["failed"] == len(failed)


def test_report_layout(tmp_path):
    code, report, _ = _run(tmp_path, "obata")
    assert code == 0
    assert report["schema"] == "adsgeo-report/1"
    assert report["generator"] == "numpy.random.PCG64"
    assert set(report) == {"schema", "command", "generator", "config", "summary", "entries"}
    keys = {"check_name", "metric_id", "params", "point_index", "point", "lhs", "rhs", "residual",
            "tolerance", "pass", "error", "wall_time"}
    names = []
    for e in report["entries"]:
        assert set(e) == keys
        assert e["pass"] == (e["residual"] <= e["tolerance"])
        names.append((e["check_name"], e["point_index"]))
    assert names == sorted(names)


def test_determinism_and_thread_independence(tmp_path, monkeypatch):
    monkeypatch.setenv("ADSGEO_THREADS", "1")
    _, _, a = _run(tmp_path, "twist", name="a.json")
    monkeypatch.setenv("ADSGEO_THREADS", "4")
    _, _, b = _run(tmp_path, "twist", name="b.json")
    _, _, c = _run(tmp_path, "twist", "--seed", "7", name="c.json")
    assert _strip_times(a.read_text()) == _strip_times(b.read_text())
    assert _strip_times(a.read_text()) != _strip_times(c.read_text())


@pytest.mark.parametrize(
    "args, header",
    [
        (["fg-expand"], "order,A2_coeff,B2_coeff"),
        (["static", "--metric", "schwarzschild-ads"], "r,V,f,W"),
        (["obata"], "s,phi,f"),
        (["twist"], "check_name,metric_id,params,point_index,point,lhs,rhs,residual,tolerance,pass,error,wall_time"),
    ],
)
def test_csv_tables(tmp_path, args, header):
    table = tmp_path / "t.csv"
    code, _, _ = _run(tmp_path, *args, "--csv", str(table))
    assert code == 0
    with open(table) as fh:
        rows = list(csv.reader(fh))
    assert ",".join(rows[0]) == header
    assert len(rows) > 2


def test_module_errors_become_failed_entries():
    def boom():
        raise RuntimeError("integrator gave up")

    ok = Check("a.ok", "ads", {}, 0, [1.0], lambda: (1.0, 1.0, 0.0), 1e-9)
    bad = Check("b.bad", "ads", {}, 0, [1.0], boom, 1e-9)
    entries = run_checks([bad, ok], threads=2)
    assert [e.check_name for e in entries] == ["a.ok", "b.bad"]
    assert entries[1].passed is False and "integrator gave up" in entries[1].error
    rep = Report("x", {}, entries)
    assert not rep.all_passed
    assert json.loads(rep.to_json())["entries"][1]["residual"] == "nan"


def test_eps_ladder_and_dimension(tmp_path):
    code, report, _ = _run(tmp_path, "twist", "--param", "eps=0.2,0.1", "--n", "3")
    assert code == 0
    flux = [e for e in report["entries"] if e["check_name"] == "twist.static_flux"]
    assert [e["point"] for e in flux] == [[0.2], [0.1]]


@pytest.mark.skipif(shutil.which("adsgeo") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(["adsgeo", "obata", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(out.read_text())["summary"]["failed"] == 0
