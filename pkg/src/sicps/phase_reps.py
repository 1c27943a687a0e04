"""Chord and Wigner representations of operators on the odd-d torus.

Grids are indexed ``values[a1, a2]`` with canonical coordinates in [0, d).
Transforms contract the operator directly against the matrix-element form
of T_alpha / R_x; for each a1 (or x1) the relevant entries of the operator
lie on a single cyclic diagonal, so one DFT-matrix product finishes the row.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .errors import DimensionError, InconsistentPhases, NotFiducial
from .weyl import (
    PureState, centered, check_dim, dft_matrix, half, lattice, omega_pow,
    tau_pow,
)

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ChordGrid:
    d: int
    values: np.ndarray  # complex (d, d), C[a1, a2] = tr(A T_a^dagger)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    d: int
    values: np.ndarray  # real (d, d), W[x1, x2] = Re tr(A R_x)
    max_imag_residual: float = 0.0

    @property
    def is_real(self) -> bool:
        return self.max_imag_residual <= HERMITIAN_TOL


Grid = Union[ChordGrid, WignerGrid]


def _as_op(A) -> tuple[np.ndarray, int]:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"operator must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("operator has non-finite entries")
    return A, check_dim(A.shape[0])


def chord_transform(A) -> ChordGrid:
    """C(alpha) = tr(A T_alpha^dagger) for all alpha in Z_d^2."""
    if isinstance(A, PureState):
        A = A.projector()
    A, d = _as_op(A)
    j = np.arange(d)
    h = half(d)
    # rows g[a1, j] = A[j + a1/2, j - a1/2]
    a1 = np.arange(d)[:, None]
    g = A[(j + a1 * h) % d, (j - a1 * h) % d]
    return ChordGrid(d, g @ dft_matrix(d, -1))


def wigner_transform(A) -> WignerGrid:
    """W(x) = tr(A R_x); the imaginary part is kept only as a residual."""
    if isinstance(A, PureState):
        A = A.projector()
    A, d = _as_op(A)
    j = np.arange(d)
    h = half(d)
    x1 = np.arange(d)[:, None]
    g = A[(x1 - j * h) % d, (x1 + j * h) % d]
    w = g @ dft_matrix(d, 1)
    return WignerGrid(d, w.real.copy(), float(np.abs(w.imag).max()))


def _check_grid(grid, d=None) -> int:
    vals = np.asarray(grid.values)
    gd = check_dim(grid.d)
    if vals.shape != (gd, gd):
        raise DimensionError(f"grid of shape {vals.shape} does not match d={gd}")
    if d is not None and d != gd:
        raise DimensionError(f"grid dimension {gd} does not match {d}")
    return gd


def reconstruct(grid: Grid) -> np.ndarray:
    """Invert a chord or Wigner transform: A = (1/d) sum grid * (T or R)."""
    d = _check_grid(grid)
    j = np.arange(d)
    h = half(d)
    A = np.zeros((d, d), dtype=complex)
    rows = np.arange(d)[:, None]
    if isinstance(grid, ChordGrid):
        # entry (j + a1/2, j - a1/2) gets (1/d) sum_a2 C(a1, a2) omega^(a2 j)
        coef = np.asarray(grid.values, dtype=complex) @ dft_matrix(d, 1) / d
        A[(j + rows * h) % d, (j - rows * h) % d] = coef
    elif isinstance(grid, WignerGrid):
        # entry (x1 + j/2, x1 - j/2) gets (1/d) sum_x2 W(x1, x2) omega^(x2 j)
        coef = np.asarray(grid.values, dtype=complex) @ dft_matrix(d, 1) / d
        A[(rows + j * h) % d, (rows - j * h) % d] = coef
    else:
        raise TypeError(f"not a grid: {type(grid).__name__}")
    return A


def chord_purity_residual(grid: ChordGrid) -> float:
    """max_alpha |C(alpha) - (1/d) sum_beta C(beta) C(alpha-beta) tau^<alpha,beta>|."""
    d = _check_grid(grid)
    C = np.asarray(grid.values, dtype=complex)
    b1, b2 = np.ogrid[:d, :d]
    worst = 0.0
    for a1 in range(d):
        for a2 in range(d):
            shifted = C[(a1 - b1) % d, (a2 - b2) % d]
            ph = tau_pow(d, a2 * b1 - a1 * b2)
            rhs = np.sum(C * shifted * ph) / d
            worst = max(worst, abs(C[a1, a2] - rhs))
    return float(worst)


def wigner_purity_residual(grid: WignerGrid) -> float:
    """max_x |W(x) - (1/d^2) sum W(x1) W(x2) omega^(2<x-x1, x-x2>)|.

    Uses <x-x1, x-x2> = <x, x1> - <x, x2> + <x1, x2> to factor the double sum
    through Wh(y) = sum_x2 W(x2) omega^(2<y, x2>).
    """
    d = _check_grid(grid)
    W = np.asarray(grid.values, dtype=complex)
    # <y, x2> = y2*x21 - y1*x22  ->  Wh = F2 . W . F1 with sign conventions
    F = dft_matrix(d, 2)   # omega^(2 j k)
    Fm = dft_matrix(d, -2)
    # Wh[y1, y2] = sum_{x21, x22} W[x21, x22] omega^(2 y2 x21) omega^(-2 y1 x22)
    Wh = Fm @ W.T @ F
    i1, i2 = np.ogrid[:d, :d]
    worst = 0.0
    for x1 in range(d):
        for x2 in range(d):
            # sum_{x1'} W(x1') omega^(2<x, x1'>) Wh(x1' - x)
            ph = omega_pow(d, 2 * (x2 * i1 - x1 * i2))
            sh = Wh[(i1 - x1) % d, (i2 - x2) % d]
            rhs = np.sum(W * ph * sh) / d**2
            worst = max(worst, abs(W[x1, x2] - rhs))
    return float(worst)


def purity_residual(grid: Grid) -> float:
    """Residual of the nonlinear pure-state relation for the grid's basis."""
    if isinstance(grid, ChordGrid):
        return chord_purity_residual(grid)
    if isinstance(grid, WignerGrid):
        return wigner_purity_residual(grid)
    raise TypeError(f"not a grid: {type(grid).__name__}")


def _wrap(phi):
    """Reduce angles to (-pi, pi]."""
    out = np.mod(np.asarray(phi, dtype=float) + np.pi, 2 * np.pi) - np.pi
    out = np.where(out <= -np.pi, np.pi, out)
    return float(out) if np.ndim(out) == 0 else out


def representative(alpha, d: int) -> tuple[int, int]:
    """Lexicographically smaller centered coordinate of the pair (alpha, -alpha)."""
    c = centered(alpha, d)
    return min(c, (-c[0], -c[1]))


@dataclass(frozen=True, eq=False)
class PhaseField:
    """Chord phases psi_alpha of a putative fiducial, one entry per +-alpha pair.

    Keys are centered coordinates; ``phase(alpha)`` applies psi_{-a} = -psi_a.
    """

    d: int
    psi: dict = field(default_factory=dict)

    def __post_init__(self):
        d = check_dim(self.d)
        reps = {}
        for key, val in self.psi.items():
            c = centered(key, d)
            if c == (0, 0):
                raise InconsistentPhases("the origin carries no phase")
            r = representative(c, d)
            v = _wrap(val if r == c else -val)
            if r in reps and abs(_wrap(reps[r] - v)) > 1e-9:
                raise InconsistentPhases(
                    f"psi at {c} and {(-c[0], -c[1])} are not antisymmetric")
            reps[r] = v
        missing = (d * d - 1) // 2 - len(reps)
        if missing:
            raise InconsistentPhases(f"{missing} phase pairs are missing")
        object.__setattr__(self, "psi", dict(sorted(reps.items())))

    def phase(self, alpha) -> float:
        c = centered(alpha, self.d)
        r = representative(c, self.d)
        return self.psi[r] if r == c else _wrap(-self.psi[r])

    def as_array(self) -> np.ndarray:
        """Full (d, d) array of psi in canonical coordinates, 0 at the origin."""
        out = np.zeros((self.d, self.d))
        for a in lattice(self.d):
            if a != (0, 0):
                out[a] = self.phase(a)
        return out

    @classmethod
    def from_array(cls, arr) -> "PhaseField":
        arr = np.asarray(arr, dtype=float)
        d = arr.shape[0]
        return cls(d, {a: arr[a] for a in lattice(d) if a != (0, 0)})


def extract_sic_phases(state: PureState, tol: float = 1e-8) -> PhaseField:
    """Chord phases of a fiducial, checking |C(alpha)| sqrt(d+1) = 1."""
    d = state.d
    C = chord_transform(state.projector()).values
    mag = np.abs(C) * np.sqrt(d + 1)
    mag[0, 0] = 1.0
    dev = float(np.abs(mag - 1).max())
    if dev > tol:
        raise NotFiducial(f"chord magnitude deviates by {dev:.3e} > {tol:.1e}")
    psi = {}
    for a in lattice(d):
        if a != (0, 0) and representative(a, d) == centered(a, d):
            psi[a] = np.angle(C[a])
    return PhaseField(d, psi)


class Sigma(NamedTuple):
    op: np.ndarray
    min_eigenvalue: float


def assemble_sigma(phases: PhaseField) -> Sigma:
    """sigma = (1/d)[I + (d+1)^(-1/2) sum_{alpha != 0} e^(i psi_alpha) T_alpha].

    Hermitian with unit trace and purity by construction; positivity is not
    guaranteed, so the minimum eigenvalue is returned alongside.
    """
    if not isinstance(phases, PhaseField):
        raise TypeError("expected a PhaseField")
    d = phases.d
    C = np.exp(1j * phases.as_array()) / np.sqrt(d + 1)
    C[0, 0] = 1.0
    sigma = reconstruct(ChordGrid(d, C))
    sigma = (sigma + sigma.conj().T) / 2
    return Sigma(sigma, float(np.linalg.eigvalsh(sigma)[0]))
