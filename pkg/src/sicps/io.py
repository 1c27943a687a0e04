"""State files and grid exports (JSON, CSV, plain-text PGM)."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DimensionError, NotNormalizable, ParseError, UnsupportedFormat
from .phase_reps import ChordGrid, WignerGrid
from .torus import HusimiGrid
from .weyl import PureState, check_dim

LOAD_NORM_TOL = 1e-6
FORMATS = ("csv", "json", "pgm")


def _finish(amps: np.ndarray, d: int | None) -> PureState:
    if d is not None and int(d) != amps.size:
        raise DimensionError(f"declared d={d} but {amps.size} amplitudes given")
    try:
        check_dim(amps.size)
    except DimensionError as exc:
        raise DimensionError(f"{amps.size} amplitudes: {exc}") from None
    if not np.all(np.isfinite(amps)):
        raise ParseError("amplitudes must be finite")
    norm = np.linalg.norm(amps)
    if abs(norm * norm - 1.0) > LOAD_NORM_TOL:
        raise NotNormalizable(f"squared norm {norm * norm:.9g} deviates from 1 by more than {LOAD_NORM_TOL}")
    return PureState(amps / norm).canonical()


def parse_state(text: str) -> PureState:
    """Parse a JSON state document or plain "re im" lines."""
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty state file")
    if stripped[0] == "{":
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        try:
            pairs = doc["amplitudes"]
            amps = np.array([complex(float(re), float(im)) for re, im in pairs])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"amplitudes must be a list of [re, im] pairs ({exc})") from None
        return _finish(amps, doc.get("d"))
    vals = []
    for n, line in enumerate(stripped.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        try:
            if len(parts) == 1:
                vals.append(complex(float(parts[0]), 0.0))
            elif len(parts) == 2:
                vals.append(complex(float(parts[0]), float(parts[1])))
            else:
                raise ValueError
        except ValueError:
            raise ParseError(f"line {n}: expected 're im', got {line!r}") from None
    return _finish(np.array(vals, dtype=complex), None)


def load_state(path) -> PureState:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_state(text)


def state_document(state: PureState, label: str | None = None, source: str | None = None) -> dict:
    amps = state.canonical().amps
    doc = {"d": state.d, "amplitudes": [[float(a.real), float(a.imag)] for a in amps]}
    if label is not None:
        doc["label"] = label
    if source is not None:
        doc["source"] = source
    doc["version"] = __version__
    return doc


def save_state(state: PureState, path, label: str | None = None, source: str | None = None) -> None:
    Path(path).write_text(json.dumps(state_document(state, label, source), indent=2) + "\n")


def _centered(d: int) -> np.ndarray:
    return (np.arange(d) + (d - 1) // 2) % d - (d - 1) // 2


def grid_rows(grid) -> tuple[str, list[str], list[tuple]]:
    """(kind, column names, rows) for a grid, in centered coordinates for lattice grids."""
    if isinstance(grid, ChordGrid):
        d = grid.d
        c = _centered(d)
        return "chord", ["a1", "a2", "re", "im"], [
            (int(c[i]), int(c[j]), float(grid.values[i, j].real), float(grid.values[i, j].imag))
            for i in np.argsort(c) for j in np.argsort(c)]
    if isinstance(grid, WignerGrid):
        d = grid.d
        c = _centered(d)
        return "wigner", ["x1", "x2", "w"], [
            (int(c[i]), int(c[j]), float(grid.values[i, j]))
            for i in np.argsort(c) for j in np.argsort(c)]
    if isinstance(grid, HusimiGrid):
        n = grid.n
        return "husimi", ["q", "p", "h"], [
            (i / n, j / n, float(grid.values[i, j])) for i in range(n) for j in range(n)]
    raise UnsupportedFormat(f"cannot export {type(grid).__name__}")


def _fmt(v) -> str:
    return str(v) if isinstance(v, int) else repr(float(v))


def grid_text(grid, fmt: str) -> str:
    if fmt not in FORMATS:
        raise UnsupportedFormat(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if fmt == "pgm":
        if not isinstance(grid, HusimiGrid):
            raise UnsupportedFormat("PGM export needs a nonnegative real grid (husimi)")
        return pgm_text(grid.values)
    kind, cols, rows = grid_rows(grid)
    if fmt == "csv":
        lines = [",".join(cols)] + [",".join(_fmt(v) for v in r) for r in rows]
        return "\n".join(lines) + "\n"
    res = grid.n if isinstance(grid, HusimiGrid) else grid.d
    doc = {"kind": kind, "d": grid.d, "resolution": res, "columns": cols,
           "rows": [list(r) for r in rows], "version": __version__}
    return json.dumps(doc) + "\n"


def pgm_text(values: np.ndarray) -> str:
    """Plain (P2) 8-bit PGM, linear from zero to the maximum."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.min() < 0:
        raise UnsupportedFormat("PGM export needs a nonnegative real 2-D array")
    top = v.max()
    px = np.zeros(v.shape, dtype=int) if top == 0 else np.rint(255 * v / top).astype(int)
    # image rows run from high p to low p
    px = px.T[::-1]
    lines = ["P2", f"{px.shape[1]} {px.shape[0]}", "255"]
    lines += [" ".join(str(x) for x in row) for row in px]
    return "\n".join(lines) + "\n"


def export_grid(grid, fmt: str, path) -> None:
    Path(path).write_text(grid_text(grid, fmt))


def write_json(doc, path=None) -> str:
    text = json.dumps(doc, indent=2, default=_json_default) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, (np.ndarray, tuple)):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
