import json
import math

import pytest

from zeromb import report
from zeromb.criteria import CriterionReport
from zeromb.growth import fixed_point_lambda
from zeromb.params import Params
from zeromb.report import SweepReport, SweepSpec, emit, parse_values, render, run_sweep
from zeromb.timedomain import EnergyTrace


def small_spec(workers=1, **kw):
    return SweepSpec(R_values=[35.0, 50.0, 45.0], Q_values=[0.0, 100.0, 1e5], N=16, a_max=6.0,
                     workers=workers, **kw)


def test_parse_values():
    assert parse_values("1,2, 3") == [1.0, 2.0, 3.0]
    assert parse_values("0:1:3") == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        parse_values("0:1")


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(R_values=[], Q_values=[0.0])
    with pytest.raises(ValueError):
        SweepSpec(R_values=[1.0], Q_values=[-1.0])
    with pytest.raises(ValueError):
        SweepSpec(R_values=[1.0], Q_values=[0.0], tau=0.5)


@pytest.fixture(scope="module")
def sweep():
    return run_sweep(small_spec())


def test_sweep_rows_sorted_and_complete(sweep):
    assert len(sweep.rows) == 9
    keys = [(r["R"], r["Q"]) for r in sweep.rows]
    assert keys == sorted(keys)
    assert {r["classification"] for r in sweep.rows} <= {"ProvablyStable", "ProvablyUnstable", "Indeterminate"}
    assert all(r["classification"] == "ProvablyStable" for r in sweep.rows if r["R"] == 35.0)


def test_sweep_worker_independent(sweep):
    assert render(run_sweep(small_spec(workers=2)), "csv") == render(sweep, "csv")


def test_sweep_records_cell_errors(monkeypatch):
    def boom(*a, **k):
        raise ArithmeticError("x")
    monkeypatch.setattr(report, "classify", boom)
    rep = run_sweep(SweepSpec(R_values=[50.0], Q_values=[0.0, 1.0], N=16, a_max=4.0))
    assert [r["error"] for r in rep.rows] == ["ArithmeticError", "ArithmeticError"]


def test_csv_layout(sweep):
    text = render(sweep, "csv")
    assert "\r" not in text
    lines = text.splitlines()
    header = [ln for ln in lines if not ln.startswith("#")]
    assert header[0] == ",".join(report.ROW_COLUMNS)
    assert len(header) == 10
    assert any(ln.startswith("# bc=") for ln in lines)
    assert all('"' not in ln for ln in lines)


def test_empty_rows_header_only():
    text = render(SweepReport([], {"params": {"N": 8}}), "csv")
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert body == [",".join(report.ROW_COLUMNS)]


def test_json_roundtrip_growth(tmp_path):
    g = fixed_point_lambda(Params(R=50.0, Q=0.05), None, 24)
    path = tmp_path / "g.json"
    emit(g, "json", str(path))
    d = json.loads(path.read_text())
    assert d == json.loads(json.dumps(g.as_dict()))
    assert d["lambda"] == g.lam
    assert d["trace"] == [list(t) for t in g.trace]
    csv = render(g, "csv")
    assert "iteration,s,alpha" in csv and f"# lambda={'%.17g' % g.lam}" in csv


def test_json_roundtrip_sweep(sweep):
    d = json.loads(render(sweep, "json"))
    assert d["rows"][0]["R"] == sweep.rows[0]["R"]
    assert [r["upsilon2"] for r in d["rows"]] == [r["upsilon2"] for r in sweep.rows]


def test_trace_and_report_emission():
    tr = EnergyTrace([(0.0, 1.0, 0.5, 0.25)], identity_residual=0.0)
    text = render(tr, "csv", params={"R": 50.0})
    assert text.splitlines()[-2:] == ["t,E,D,S", "0,1,0.5,0.25"]
    cr = CriterionReport(1.0, 1.0, 1.0, 0.5, math.nan, 10.0, True, 0.1, False, -0.1, 16.0)
    d = json.loads(render(cr, "json", params={"R": 50.0}))
    assert d["params"] == {"R": 50.0} and d["upsilon2"] == 0.5
    with pytest.raises(TypeError):
        render(object(), "csv")
    with pytest.raises(ValueError):
        render(tr, "xml")


def test_emit_bad_path():
    with pytest.raises(OSError, match="/nonexistent/dir/x.csv"):
        emit({"a": 1.0}, "csv", "/nonexistent/dir/x.csv")


def test_default_workers(monkeypatch):
    monkeypatch.delenv(report.WORKERS_ENV, raising=False)
    assert report.default_workers() == 1
    monkeypatch.setenv(report.WORKERS_ENV, "3")
    assert report.default_workers() == 3
