import json

import numpy as np
import pytest

from sicps import __version__
from sicps.errors import DimensionError, NotNormalizable, ParseError, UnsupportedFormat
from sicps.io import export_grid, grid_text, load_state, parse_state, pgm_text, save_state
from sicps.phase_reps import chord_transform, wigner_transform
from sicps.torus import husimi_grid

from conftest import FIDUCIAL_3, random_state

FID3_JSON = '{"d":3,"amplitudes":[[0,0],[0.7071067811865475,0],[-0.7071067811865475,0]]}'


def test_load_json_fiducial(tmp_path):
    p = tmp_path / "fid3.json"
    p.write_text(FID3_JSON)
    s = load_state(p)
    assert s.d == 3 and s.fidelity(FIDUCIAL_3) > 1 - 1e-15


def test_load_text(tmp_path, rng):
    s = random_state(7, rng)
    p = tmp_path / "s.txt"
    p.write_text("\n".join(f"{float(a.real)!r} {float(a.imag)!r}" for a in s.amps) + "\n")
    t = load_state(p)
    assert t.d == 7 and t.fidelity(s) > 1 - 1e-14


def test_text_with_comments_and_real_only():
    s = parse_state("# coefficients\n0\n0.7071067811865475\n-0.7071067811865475  # last\n")
    assert s.fidelity(FIDUCIAL_3) > 1 - 1e-15


def test_not_normalizable():
    with pytest.raises(NotNormalizable):
        parse_state('{"d":3,"amplitudes":[[0.5,0],[0.5,0],[0.5,0]]}')
    with pytest.raises(NotNormalizable):
        parse_state("0.5 0\n0 0.5\n0 0\n")


def test_renormalizes_small_deviation():
    s = parse_state('{"d":3,"amplitudes":[[0,0],[0.7071070,0],[-0.7071070,0]]}')
    assert abs(np.linalg.norm(s.amps) - 1) < 1e-15


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_state("")
    with pytest.raises(ParseError):
        parse_state("{not json")
    with pytest.raises(ParseError):
        parse_state('{"d":3}')
    with pytest.raises(ParseError):
        parse_state("1 2 3\n")
    with pytest.raises(ParseError):
        parse_state("a b\n")
    with pytest.raises(ParseError):
        load_state("/nonexistent/state.json")


def test_dimension_errors():
    with pytest.raises(DimensionError):
        parse_state('{"d":5,"amplitudes":[[1,0],[0,0],[0,0]]}')
    with pytest.raises(DimensionError):
        parse_state("1 0\n0 0\n")


def test_round_trip(tmp_path, rng):
    for d in (3, 5, 11):
        s = random_state(d, rng).canonical()
        p = tmp_path / f"s{d}.json"
        save_state(s, p, label="x", source="test")
        t = load_state(p)
        assert np.abs(t.amps - s.amps).max() <= 1e-15
        doc = json.loads(p.read_text())
        assert doc["label"] == "x" and doc["version"] == __version__


def test_wigner_csv_layout(rng):
    g = wigner_transform(random_state(5, rng))
    lines = grid_text(g, "csv").splitlines()
    assert lines[0] == "x1,x2,w" and len(lines) == 26
    coords = [tuple(map(int, ln.split(",")[:2])) for ln in lines[1:]]
    assert coords[0] == (-2, -2) and coords[-1] == (2, 2)
    assert all(-2 <= a <= 2 and -2 <= b <= 2 for a, b in coords)
    row = {c: float(ln.split(",")[2]) for c, ln in zip(coords, lines[1:])}
    assert row[(-1, 2)] == g.values[4, 2]


def test_chord_exports(rng):
    g = chord_transform(random_state(5, rng))
    doc = json.loads(grid_text(g, "json"))
    assert doc["kind"] == "chord" and len(doc["rows"]) == 25 and doc["version"] == __version__
    with pytest.raises(UnsupportedFormat):
        grid_text(g, "pgm")
    with pytest.raises(UnsupportedFormat):
        grid_text(g, "png")


def test_husimi_pgm(tmp_path, rng):
    g = husimi_grid(random_state(5, rng), 160)
    p = tmp_path / "h.pgm"
    export_grid(g, "pgm", p)
    tokens = p.read_text().split()
    assert tokens[:4] == ["P2", "160", "160", "255"]
    px = np.array(tokens[4:], dtype=int)
    assert px.size == 160 * 160 and px.max() == 255 and px.min() >= 0
    csv = grid_text(g, "csv").splitlines()
    assert csv[0] == "q,p,h" and len(csv) == 160 * 160 + 1


def test_exports_deterministic(rng):
    s = random_state(7, rng)
    for fmt in ("csv", "json"):
        assert grid_text(wigner_transform(s), fmt) == grid_text(wigner_transform(s), fmt)
    assert grid_text(husimi_grid(s, 64), "pgm") == grid_text(husimi_grid(s, 64), "pgm")


def test_pgm_scaling():
    text = pgm_text(np.array([[0.0, 1.0], [0.5, 2.0]]))
    # values[iq, ip]; image rows run from the top p value down
    assert text.split()[4:] == ["128", "255", "0", "64"]
    with pytest.raises(UnsupportedFormat):
        pgm_text(np.array([[-1.0, 1.0]]))
