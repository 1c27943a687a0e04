import json
import subprocess
import sys

import pytest

from sicps.cli import main
from sicps.io import load_state
from sicps.localization import verify_sic

FID3 = '{"d":3,"amplitudes":[[0,0],[0.7071067811865475,0],[-0.7071067811865475,0]]}'


@pytest.fixture
def fid3(tmp_path):
    p = tmp_path / "fid3.json"
    p.write_text(FID3)
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_fiducial(fid3, capsys):
    code, out, _ = run(["verify", "--input", fid3, "--tol", "1e-10"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["pass"] is True and doc["max_dev"] <= 1e-15


def test_verify_failure_exit_code(tmp_path, capsys):
    p = tmp_path / "pos.txt"
    p.write_text("1 0\n0 0\n0 0\n0 0\n0 0\n")
    code, out, _ = run(["verify", "--input", str(p)], capsys)
    assert code == 1 and json.loads(out)["pass"] is False


def test_zauner_cycles(capsys):
    code, out, _ = run(["zauner", "cycles", "--d", "7"], capsys)
    c = json.loads(out)["counts"]
    assert code == 0 and (c["N0"], c["N+1"], c["N-1"], c["phases"]) == (12, 2, 2, 8)


def test_zauner_eigenbasis_and_hamiltonian(capsys):
    code, out, _ = run(["zauner", "eigenbasis", "--d", "7"], capsys)
    rows = json.loads(out)["entries"]
    assert code == 0 and rows[0]["k_signed"] == -1 and abs(rows[6]["energy"] - 1.341048616015) < 1e-10
    code, out, _ = run(["zauner", "hamiltonian", "--d", "5"], capsys)
    assert code == 0 and len(json.loads(out)["eigenvalues"]) == 5
    code, out, _ = run(["zauner", "classical-h"], capsys)
    assert code == 0 and out.startswith("q,p,h\n")
    code, _, err = run(["zauner", "cycles"], capsys)
    assert code == 2 and "--d" in err


def test_search_then_verify(tmp_path, capsys):
    state = tmp_path / "s5.json"
    code, out, _ = run(["search", "--d", "5", "--restarts", "50", "--tol", "1e-9",
                        "--seed", "1", "--output", str(state)], capsys)
    assert code == 0 and json.loads(out)["converged"]
    code, out, _ = run(["verify", "--input", str(state)], capsys)
    assert code == 0
    assert verify_sic(load_state(state), 1e-8).passed


def test_search_nonconvergence_exit(capsys):
    code, out, _ = run(["search", "--d", "7", "--sector", "2", "--restarts", "2", "--seed", "0"], capsys)
    assert code == 1 and json.loads(out)["converged"] is False


def test_zauner_expand(tmp_path, capsys):
    state = tmp_path / "s7.json"
    run(["search", "--d", "7", "--sector", "0", "--restarts", "100", "--seed", "0",
         "--output", str(state)], capsys)
    code, out, _ = run(["zauner", "expand", "--input", str(state)], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["sector"] == 0


def test_repr_outputs(fid3, tmp_path, capsys):
    code, out, _ = run(["repr", "wigner", "--input", fid3], capsys)
    assert code == 0 and out.splitlines()[0] == "x1,x2,w" and len(out.splitlines()) == 10
    pgm = tmp_path / "h.pgm"
    code, _, _ = run(["repr", "husimi", "--input", fid3, "--format", "pgm",
                      "--grid", "32", "--output", str(pgm)], capsys)
    assert code == 0 and pgm.read_text().startswith("P2\n32 32\n255\n")
    code, _, err = run(["repr", "chord", "--input", fid3, "--format", "pgm"], capsys)
    assert code == 2 and "PGM" in err
    code, out, _ = run(["repr", "bargmann-zeros", "--input", fid3], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["zeros"]) == 3 and doc["centroid_residual"] < 1e-8
    code, _, _ = run(["repr", "chord", "--d", "5", "--input", fid3], capsys)
    assert code == 2


def test_localize(fid3, capsys):
    code, out, _ = run(["localize", "m", "--input", fid3], capsys)
    assert code == 0 and abs(json.loads(out)["value"] - 0.5) < 1e-12
    code, out, _ = run(["localize", "ipr", "--input", fid3], capsys)
    assert abs(json.loads(out)["value"] - 0.5) < 1e-12


def test_haar_seed_fallback(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("SICPS_SEED", "5")
    _, out, _ = run(["haar", "p", "--d", "5", "--n", "500"], capsys)
    assert json.loads(out)["seed"] == 5
    _, out2, _ = run(["haar", "p", "--d", "5", "--n", "500", "--seed", "6"], capsys)
    assert json.loads(out2)["seed"] == 6
    hist = tmp_path / "h.csv"
    code, out, _ = run(["haar", "m", "--d", "5", "--n", "2000", "--seed", "1",
                        "--histogram", str(hist)], capsys)
    lines = hist.read_text().splitlines()
    assert lines[0] == "bin_lo,bin_hi,count" and len(lines) == 501
    assert sum(int(ln.split(",")[2]) for ln in lines[1:]) == 2000
    assert json.loads(out)["reference_lines"]["fiducial"] == 3.0
    monkeypatch.setenv("SICPS_SEED", "oops")
    code, _, _ = run(["haar", "p", "--d", "5", "--n", "500"], capsys)
    assert code == 2


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d":3,"amplitudes":[[0.5,0],[0.5,0],[0,0]]}')
    code, _, err = run(["verify", "--input", str(bad)], capsys)
    assert code == 2 and "norm" in err
    code, _, _ = run(["verify", "--input", str(tmp_path / "missing.json")], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["haar", "p", "--d", "5"])
    assert exc.value.code == 2


def test_module_entry_point(fid3):
    proc = subprocess.run([sys.executable, "-m", "sicps", "verify", "--input", fid3],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["pass"] is True
