import json
import subprocess
import sys

import pytest

from maass52.cli import main
from maass52.qseries import FracQSeries


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_basis_g(capsys):
    code, out, _ = run(capsys, "basis", "g", "--m", "25", "--terms", "4")
    assert code == 0
    obj = json.loads(out)
    assert [t["c"] for t in obj["terms"]] == ["1", "196885", "21690645", "886187500"]
    # parse and re-serialize: byte-identical
    again = json.dumps(FracQSeries.from_json_obj(obj).to_json_obj(), indent=2) + "\n"
    assert again == out


def test_basis_h_negative(capsys):
    code, out, _ = run(capsys, "basis", "h", "--m", "-23", "--terms", "5", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["n,c", "-23,1", "1,-1", "25,-196885", "49,-42790636", "73,-2549715506"]


def test_basis_h_positive_reports_convergence(capsys):
    code, out, _ = run(capsys, "basis", "h", "--m", "1", "--terms", "2", "--cmax", "500")
    assert code == 3
    assert json.loads(out)["converged"] is False
    code, _, _ = run(capsys, "basis", "h", "--m", "1", "--terms", "2", "--cmax", "500", "--allow-unconverged")
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["basis", "g", "--m", "13"],
        ["basis", "g", "--m", "-23"],
        ["basis", "g", "--m", "1", "--terms", "0"],
        ["partition", "--n", "0"],
        ["mock-coeff", "--m", "1", "--n", "2"],
        ["verify", "hecke", "--m", "1", "--ell", "4"],
        ["verify", "symmetry", "--m", "1"],
        ["basis", "g", "--m", "1", "--digits", "10"],
        ["frobnicate"],
        ["basis", "x", "--m", "1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_partition(capsys):
    code, out, _ = run(capsys, "partition", "--n", "100")
    assert code == 0 and json.loads(out)["p"] == "190569292"
    code, out, _ = run(capsys, "partition", "--n", "200", "--method", "both")
    obj = json.loads(out)
    assert code == 0 and obj["recurrence"] == obj["rademacher"]["p"] == "3972999029388"
    code, out, _ = run(capsys, "partition", "--n", "1", "--method", "recurrence", "--format", "pretty")
    assert code == 0 and "p " in out
    code, out, _ = run(capsys, "partition", "--n", "300", "--cmax-partition", "2")
    assert code == 3 and json.loads(out)["rademacher"]["certified"] is False


def test_kloosterman_and_mock(capsys):
    code, out, _ = run(capsys, "kloosterman", "--m", "5", "--n", "-3", "--c", "1")
    assert code == 0 and float(json.loads(out)["value"]) == 1.0
    code, out, _ = run(capsys, "mock-coeff", "--m", "1", "--n", "-23", "--cmax", "3000", "--tol", "1e-2")
    obj = json.loads(out)
    assert code == 0 and obj["kind"] == "nonholomorphic"
    assert abs(float(obj["value"]) + 23 ** 1.5) < 1e-2
    code, out, _ = run(capsys, "mock-coeff", "--m", "1", "--n", "1", "--cmax", "200", "--allow-unconverged")
    assert code == 0 and "imaginary" in json.loads(out)


def test_verify_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "hecke", "--ell", "5", "--m", "-23", "--terms", "15")
    obj = json.loads(out)
    assert code == 0 and obj["pass"] and obj["exact"] is True
    code, out, _ = run(capsys, "verify", "symmetry", "--m", "1", "--n", "25", "--cmax", "1500")
    assert code == 0 and json.loads(out)["relative_error"] < 1e-3
    code, out, _ = run(capsys, "verify", "vanishing", "--m", "1", "--n", "25", "--cmax", "1500")
    assert code == 1 and not json.loads(out)["pass"]
    code, out, _ = run(capsys, "verify", "vanishing", "--m", "1", "--n", "25", "--cmax", "1500", "--tol-check", "0.1")
    assert code == 0
    dest = tmp_path / "grid.json"
    code, out, _ = run(capsys, "verify", "duality", "--output", str(dest))
    assert code == 0 and out == "" and json.loads(dest.read_text())["pass"]
    code, out, _ = run(capsys, "verify", "xi", "--m", "1", "--terms", "2", "--cmax", "10000")
    assert code == 0


def test_env_precision(capsys, monkeypatch):
    monkeypatch.setenv("MAASS52_DIGITS", "20")
    code, out, _ = run(capsys, "kloosterman", "--m", "0", "--n", "1", "--c", "7")
    assert code == 0 and len(json.loads(out)["value"].lstrip("-").replace(".", "")) <= 21
    monkeypatch.setenv("MAASS52_DIGITS", "lots")
    assert main(["kloosterman", "--m", "0", "--n", "1", "--c", "7"]) == 2


def test_deterministic_output(capsys):
    first = run(capsys, "basis", "g", "--m", "49", "--terms", "6")[1]
    second = run(capsys, "basis", "g", "--m", "49", "--terms", "6")[1]
    assert first == second


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "maass52", "basis", "g", "--m", "1", "--terms", "3", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["n,c", "-1,1", "23,1", "47,2"]
