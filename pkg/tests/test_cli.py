import io
import json
import subprocess
import sys

import numpy as np
import pytest

from kms.borderline import trace_curve
from kms.cli import CURVE_HEADER, SCAN_HEADER, emit_curve_csv, read_curve_csv, run
from kms.core import EigType, parse_complex


class _Out(io.StringIO):
    """Text sink without a binary buffer, so run() writes decoded text."""


def _run(*argv):
    out, err = _Out(), _Out()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_classify_origin():
    code, out, _ = _run("classify", "--n", 5, "--rho", "0")
    assert code == 0
    assert json.loads(out) == {"j1": 0, "j2": 0}


def test_cusps_n5():
    code, out, _ = _run("cusps", "--n", 5, "--type", 1)
    assert code == 0
    rows = json.loads(out)
    assert sorted(r["rho0"] for r in rows) == ["0.00000+2.00000i", "0.00000-2.00000i"]
    code, out, _ = _run("cusps", "--n", 5, "--type", 1, "--json")
    full = sorted((parse_complex(r["rho0"]) for r in json.loads(out)), key=lambda z: z.imag)
    assert abs(full[0] + 2j) < 1e-10 and abs(full[1] - 2j) < 1e-10


def test_spectrum_identity():
    code, out, _ = _run("spectrum", "--n", 3, "--rho", "0")
    rows = json.loads(out)
    assert code == 0
    assert sum(r["multiplicity"] for r in rows) == 3
    assert all(r["class"] == "ordinary" for r in rows)


def test_trace_csv_row_at_zero():
    code, out, _ = _run("trace", "--n", 6, "--type", 1, "--samples", 64)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(CURVE_HEADER)
    assert "0,0,1.4,0,-6,0,0,0" in lines


def test_trace_round_trip(tmp_path):
    path = tmp_path / "c.csv"
    assert _run("trace", "--n", 7, "--type", 2, "--samples", 200, "--out", path)[0] == 0
    with open(path, newline="") as fh:
        back = read_curve_csv(fh, EigType.TYPE2, 7)
    ref = trace_curve(7, EigType.TYPE2, base_samples=200)
    assert np.array_equal(back.u, ref.u)
    assert np.array_equal(back.rho, ref.rho)
    sink = io.StringIO(newline="")
    emit_curve_csv(back, sink)
    assert sink.getvalue() == path.read_text()


def test_trace_is_deterministic():
    a = _run("trace", "--n", 9, "--type", 1)[1]
    b = _run("trace", "--n", 9, "--type", 1)[1]
    assert a == b


def test_scan_header():
    code, out, _ = _run("scan", "--n", 7, "--type", 1, "--start", "0.7757-1.4922i", "--dir", "1", "--steps", 3)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(SCAN_HEADER)
    assert len(lines) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ("classify", "--n", 1, "--rho", "0"),
        ("classify", "--n", "x", "--rho", "0"),
        ("classify", "--n", 5, "--rho", "1+"),
        ("trace", "--n", 5, "--type", 3),
        ("trace", "--n", 5, "--type", 1, "--samples", 5),
        ("figure", "--id", "nope", "--n", 5),
        ("scan", "--n", 7, "--type", 1, "--start", "0", "--dir", "0"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_2(argv):
    code, out, err = _run(*argv)
    assert code == 2
    assert out == ""
    assert err


def test_numerical_failure_exits_1():
    code, _, err = _run("cusps", "--n", 2, "--type", 1)
    assert code in (0, 1)
    if code == 1:
        assert err.startswith("kms cusps")


def test_figure_svg(tmp_path):
    path = tmp_path / "f.svg"
    assert _run("figure", "--id", "curves", "--n", 5, "--resolution", 60, "--out", path)[0] == 0
    text = path.read_text()
    assert text.startswith("<?xml") and "<svg" in text


def test_console_script_pipe():
    proc = subprocess.run(
        [sys.executable, "-m", "kms.cli", "classify", "--n", "5", "--rho", "10+10i"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"j1": 1, "j2": 1}
