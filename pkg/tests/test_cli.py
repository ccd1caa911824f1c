from __future__ import annotations

import json

import numpy as np
import pytest

from roughstruct.cli import main


def _run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_gen_writes_expected_rows(tmp_path, capsys):
    out = tmp_path / "w.csv"
    code, _ = _run(
        capsys, "--grid-level", "8", "--out", str(out),
        "gen", "--kind", "sin_cos", "--dim", "2",
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 258  # header + 2^8 + 1 nodes
    assert lines[0] == "t,x1,x2"


def test_gen_deterministic(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for out in (a, b):
        code, _ = _run(
            capsys, "--grid-level", "7", "--seed", "5", "--out", str(out),
            "gen", "--kind", "fbm", "--hurst", "0.4",
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_error_exits_one(capsys):
    assert main(["gen", "--kind", "nonsense"]) == 1


def test_holder_report(tmp_path, capsys):
    w = tmp_path / "w.csv"
    _run(capsys, "--grid-level", "8", "--out", str(w),
         "gen", "--kind", "polynomial", "--coeffs", "0,1")
    code, out = _run(capsys, "--alpha", "1.0", "--json", "holder", str(w))
    assert code == 0
    payload = json.loads(out)
    assert payload["seminorm"] == pytest.approx(1.0)


def test_lift_then_chen_pipeline(tmp_path, capsys):
    w = tmp_path / "w.csv"
    rp = tmp_path / "rp.json"
    _run(capsys, "--grid-level", "8", "--out", str(w),
         "gen", "--kind", "sin_cos", "--dim", "2")
    code, _ = _run(capsys, "--alpha", "0.45", "--out", str(rp),
                   "lift", str(w), "--mode", "wavelet")
    assert code == 0
    code, out = _run(capsys, "--json", "chen", str(rp))
    assert code == 0
    payload = json.loads(out)
    assert payload["defect"] <= 1e-8


def test_chen_violation_exits_two(tmp_path, capsys):
    # interval-tensor storage is Chen-consistent by construction, so the
    # report can only fail against a tolerance; drive it below round-off
    w = tmp_path / "w.csv"
    rp = tmp_path / "rp.json"
    _run(capsys, "--grid-level", "6", "--out", str(w),
         "gen", "--kind", "sin_cos", "--dim", "2")
    _run(capsys, "--out", str(rp), "lift", str(w), "--mode", "linear")
    code, out = _run(capsys, "--json", "chen", str(rp), "--tol", "1e-30")
    assert code == 2
    assert "error" in json.loads(out)


def test_integrate_routes_agree(tmp_path, capsys):
    w = tmp_path / "w.csv"
    _run(capsys, "--grid-level", "10", "--out", str(w),
         "gen", "--kind", "sin_cos", "--dim", "2")
    finals = {}
    for route in ("rough-riemann", "rough-wavelet"):
        out = tmp_path / f"{route}.csv"
        code, text = _run(
            capsys, "--json", "--alpha", "0.45", "--out", str(out),
            "integrate", str(w), "--route", route, "--lift-mode", "sin_cos",
        )
        assert code == 0
        finals[route] = np.array(json.loads(text)["final"])
    assert np.allclose(finals["rough-riemann"], finals["rough-wavelet"], atol=2e-3)


def test_young_integrate(tmp_path, capsys):
    w = tmp_path / "w.csv"
    _run(capsys, "--grid-level", "10", "--out", str(w),
         "gen", "--kind", "polynomial", "--coeffs", "0,0,1")
    y = tmp_path / "y.csv"
    _run(capsys, "--grid-level", "10", "--out", str(y),
         "gen", "--kind", "polynomial", "--coeffs", "0,1")
    out = tmp_path / "I.csv"
    code, text = _run(
        capsys, "--json", "--out", str(out), "integrate", str(w),
        "--route", "young", "--y-csv", str(y), "--y-prime-csv", str(y),
    )
    assert code == 0
    assert json.loads(text)["final"][0] == pytest.approx(2.0 / 3.0, abs=1e-3)


def test_solve_exponential(tmp_path, capsys):
    w = tmp_path / "w.csv"
    _run(capsys, "--grid-level", "10", "--out", str(w),
         "gen", "--kind", "polynomial", "--coeffs", "0,1")
    sol = tmp_path / "sol.csv"
    diag = tmp_path / "diag.json"
    code, text = _run(
        capsys, "--json", "--out", str(sol), "solve", str(w),
        "--F", "linear", "--xi", "1", "--diagnostics", str(diag),
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["final"][0] == pytest.approx(np.e, abs=1e-3)
    assert payload["max_ratio"] < 1.0
    diag_payload = json.loads(diag.read_text())
    assert diag_payload["windows"]
    header = sol.read_text().splitlines()[0]
    assert header == "t,y1,yp11"


def test_reconstruct_certificate(tmp_path, capsys):
    w = tmp_path / "w.csv"
    _run(capsys, "--grid-level", "10", "--out", str(w),
         "gen", "--kind", "sin_cos", "--dim", "2")
    cert = tmp_path / "cert.csv"
    code, text = _run(
        capsys, "--json", "--alpha", "0.45", "--out", str(cert),
        "reconstruct", str(w), "--lift-mode", "sin_cos",
    )
    assert code == 0
    lines = cert.read_text().splitlines()
    assert lines[0] == "lambda,s,ratio"
    assert len(lines) > 10


def test_convergence_fit(tmp_path, capsys):
    samples = tmp_path / "samples.csv"
    rows = ["scale,error"] + [f"{2.0**-k},{2.0**(-2*k)}" for k in range(8)]
    samples.write_text("\n".join(rows) + "\n")
    code, text = _run(capsys, "--json", "convergence", str(samples))
    assert code == 0
    payload = json.loads(text)
    assert payload["slope"] == pytest.approx(2.0, abs=0.01)
