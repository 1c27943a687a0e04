"""Zauner's order-three Clifford unitary, its lattice map and a symmetric Hamiltonian.

The classical map sends alpha -> (-a2, a1 - a2) mod d and satisfies
Z T_alpha Z^dagger = T_(Z alpha).  Its orbits on the lattice are the origin,
up to two further fixed points when 3 | d, and 3-cycles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LabelAmbiguous, NotAnOrbit
from .weyl import (
    PureState, centered, check_dim, displacement, lattice, parity, reduce,
    schwinger_uv, tau_pow,
)

DEGENERACY_GAP = 1e-8
LABEL_SNAP = 0.1
SUPPORT_TOL = 1e-8


def zauner_unitary(d: int) -> np.ndarray:
    """<k|Z|j> = exp(i chi) tau^(2kj + k^2) / sqrt(d) with chi = pi (d-1)/12."""
    d = check_dim(d)
    k = np.arange(d)[:, None]
    j = np.arange(d)[None, :]
    chi = math.pi * (d - 1) / 12
    return np.exp(1j * chi) * tau_pow(d, 2 * k * j + k * k) / math.sqrt(d)


def classical_map(d: int, alpha) -> tuple[int, int]:
    a1, a2 = alpha
    return reduce((-a2, a1 - a2), d)


def region_of(d: int, alpha) -> int:
    """Invariant-region label in {-1, 0, 1} for a lattice point.

    Uses the nearest integer to (a1 - a2)/d on centered coordinates; the
    difference lies in [-(d-1), d-1], so the label is always one of three.
    """
    c1, c2 = centered(alpha, d)
    return int(np.floor((c1 - c2) / d + 0.5))


def orbit(d: int, alpha) -> tuple[tuple[int, int], ...]:
    out = [reduce(alpha, d)]
    while True:
        nxt = classical_map(d, out[-1])
        if nxt == out[0]:
            return tuple(out)
        out.append(nxt)


def expected_counts(d: int) -> dict[str, int]:
    """Closed-form orbit counts for odd d."""
    d = check_dim(d)
    div3 = d % 3 == 0
    return {
        "N0": (d * d - 1) // 4,
        "N1": (d * d - 9) // 24 if div3 else (d * d - 1) // 24,
        "fixed": 3 if div3 else 1,
        "phases": (d * d + 3) // 6 if div3 else (d * d - 1) // 6,
    }


@dataclass(frozen=True)
class CycleSet:
    d: int
    fixed_points: list
    cycles: list
    regions: dict = field(default_factory=dict)  # orbit -> region label

    def count(self, eps: int) -> int:
        """Number of 3-cycles in region eps."""
        return sum(1 for c in self.cycles if self.regions[c] == eps)

    def census(self, eps: int) -> int:
        """Number of lattice points in region eps."""
        return sum(len(o) for o, r in self.regions.items() if r == eps)

    @property
    def independent_phases(self) -> int:
        """Orbits other than the origin, paired under alpha -> -alpha."""
        return (len(self.fixed_points) - 1 + len(self.cycles)) // 2

    def to_dict(self) -> dict:
        cen = lambda o: [list(centered(a, self.d)) for a in o]  # noqa: E731
        return {
            "d": self.d,
            "fixed_points": [list(centered(a, self.d)) for (a,) in self.fixed_points],
            "cycles": [{"points": cen(c), "region": self.regions[c]} for c in self.cycles],
            "counts": {"N0": self.count(0), "N+1": self.count(1), "N-1": self.count(-1),
                       "fixed": len(self.fixed_points), "phases": self.independent_phases},
            "formula": expected_counts(self.d),
        }


def enumerate_cycles(d: int) -> CycleSet:
    d = check_dim(d)
    seen = set()
    fixed, cycles, regions = [], [], {}
    for a in lattice(d):
        if a in seen:
            continue
        o = orbit(d, a)
        seen.update(o)
        labels = {region_of(d, p) for p in o}
        if len(labels) != 1:
            raise RuntimeError(f"region label not constant on orbit {o}")
        regions[o] = labels.pop()
        (fixed if len(o) == 1 else cycles).append(o)
    cs = CycleSet(d, fixed, cycles, regions)
    exp = expected_counts(d)
    got = {"N0": cs.count(0), "N1": cs.count(1), "fixed": len(fixed),
           "phases": cs.independent_phases}
    if cs.count(-1) != cs.count(1) or any(got[k] != exp[k] for k in got):
        raise RuntimeError(f"orbit census {got} disagrees with closed forms {exp}")
    return cs


def _check_orbit(d: int, cycle) -> tuple[tuple[int, int], ...]:
    pts = [reduce(a, d) for a in cycle]
    if not pts:
        raise NotAnOrbit("empty orbit")
    o = orbit(d, pts[0])
    if sorted(pts) != sorted(o):
        raise NotAnOrbit(f"{cycle} is not a Zauner orbit (expected points {o})")
    return o


def cycle_operator(d: int, cycle) -> np.ndarray:
    """Sum of displacement operators over a Zauner orbit."""
    d = check_dim(d)
    return sum(displacement(d, a) for a in _check_orbit(d, cycle))


def orbit_hamiltonian(d: int, cycle) -> np.ndarray:
    """Hermitian part of ``cycle_operator``; commutes with Z and parity."""
    M = cycle_operator(d, cycle)
    return (M + M.conj().T) / 2


def harper_hamiltonian(d: int) -> np.ndarray:
    """(U + U^dag)/2 + (V + V^dag)/2 + (U V tau* + h.c.)/2."""
    d = check_dim(d)
    U, V = schwinger_uv(d)
    W = U @ V * tau_pow(d, -1)
    H = (U + V + W) / 2
    return H + H.conj().T


def classical_h(q, p):
    """cos 2pi q + cos 2pi p - cos 2pi(q - p)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return np.cos(2 * np.pi * q) + np.cos(2 * np.pi * p) - np.cos(2 * np.pi * (q - p))


def classical_h_csv(n: int = 101) -> str:
    g = np.linspace(0.0, 1.0, n, endpoint=False)
    rows = ["q,p,h"]
    for q in g:
        for p in g:
            rows.append(f"{float(q)!r},{float(p)!r},{float(classical_h(q, p))!r}")
    return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class EigenEntry:
    index: int
    energy: float
    r: int
    k: int
    vector: PureState

    @property
    def k_signed(self) -> int:
        """k with 2 written as -1."""
        return -1 if self.k == 2 else self.k


@dataclass(frozen=True)
class LabeledEigenbasis:
    d: int
    entries: list

    def matrix(self) -> np.ndarray:
        """Columns are the eigenvectors in entry order."""
        return np.column_stack([e.vector.amps for e in self.entries])

    def to_dict(self) -> dict:
        return {"d": self.d, "entries": [
            {"i": e.index, "energy": e.energy, "r": e.r, "k": e.k, "k_signed": e.k_signed}
            for e in self.entries]}


def _snap(x: float, targets) -> tuple[int, float]:
    dist = [abs(x - t) for t in targets]
    i = int(np.argmin(dist))
    return i, dist[i]


def _labels(v: np.ndarray, Z: np.ndarray, R: np.ndarray) -> tuple[int, int]:
    rv = np.vdot(v, R @ v).real
    r_idx, r_err = _snap(rv, (1.0, -1.0))
    zv = np.vdot(v, Z @ v)
    if abs(zv) < 1 - LABEL_SNAP:
        raise LabelAmbiguous(f"vector is not a Zauner eigenvector (|<Z>| = {abs(zv):.3g})")
    k = int(round(np.angle(zv) / (2 * np.pi / 3))) % 3
    k_err = abs(zv - np.exp(2j * np.pi * k / 3))
    if r_err > LABEL_SNAP or k_err > LABEL_SNAP:
        raise LabelAmbiguous(f"labels not sharp: <R0> = {rv:.3g}, <Z> = {zv:.3g}")
    return (1 if r_idx == 0 else -1), k


def _resolve(block: np.ndarray, Z: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Re-diagonalize a degenerate block against Z, then parity within each Z sector."""
    if block.shape[1] == 1:
        return block
    Zs = block.conj().T @ Z @ block
    out = []
    for k in range(3):
        # Hermitian projector onto the sector inside the block
        w = np.exp(-2j * np.pi * k / 3)
        P = (np.eye(Zs.shape[0]) + w * Zs + w * w * (Zs @ Zs)) / 3
        ev, S = np.linalg.eigh((P + P.conj().T) / 2)
        sub = block @ S[:, ev > 0.5]
        if sub.shape[1] == 0:
            continue
        Rs = sub.conj().T @ R @ sub
        _, P = np.linalg.eigh((Rs + Rs.conj().T) / 2)
        out.append(sub @ P)
    return np.column_stack(out)


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Make the largest component real positive; ties go to the lowest index."""
    mag = np.abs(v)
    k = int(np.flatnonzero(mag >= mag.max() * (1 - 1e-9))[0])
    v = v * (abs(v[k]) / v[k])
    v[k] = abs(v[k])
    return v / np.linalg.norm(v)


def _commutes(H: np.ndarray, A: np.ndarray) -> bool:
    return np.abs(H @ A - A @ H).max() <= 1e-10 * max(1.0, np.abs(H).max())


def _sector_eigh(H: np.ndarray, Z: np.ndarray, R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize H inside each joint eigenspace of Z and parity."""
    d = H.shape[0]
    I = np.eye(d)
    energies, cols = [], []
    for k in range(3):
        Pk = sector_projector(d, k)
        for r in (1, -1):
            P = Pk @ (I + r * R) / 2
            ev, S = np.linalg.eigh((P + P.conj().T) / 2)
            B = S[:, ev > 0.5]
            if B.shape[1] == 0:
                continue
            Hs = B.conj().T @ H @ B
            w, X = np.linalg.eigh((Hs + Hs.conj().T) / 2)
            energies.append(w)
            cols.append(B @ X)
    w = np.concatenate(energies)
    V = np.column_stack(cols)
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def labeled_eigenbasis(d: int, hamiltonian: np.ndarray | None = None) -> LabeledEigenbasis:
    """Eigenbasis of H labeled by parity r and Zauner sector k, sorted by energy.

    When H commutes with Z and parity it is diagonalized inside each joint
    (k, r) eigenspace, so labels stay sharp even for nearly degenerate levels.
    Otherwise eigenvalue clusters closer than DEGENERACY_GAP are rotated to
    diagonalize Z and then parity before labeling.
    """
    d = check_dim(d)
    H = harper_hamiltonian(d) if hamiltonian is None else np.asarray(hamiltonian, dtype=complex)
    Z = zauner_unitary(d)
    R = parity(d)
    if _commutes(H, Z) and _commutes(H, R):
        w, V = _sector_eigh(H, Z, R)
    else:
        w, V = np.linalg.eigh(H)
        cols = []
        start = 0
        for i in range(1, d + 1):
            if i == d or w[i] - w[i - 1] >= DEGENERACY_GAP:
                cols.append(_resolve(V[:, start:i], Z, R))
                start = i
        V = np.column_stack(cols)
    entries = []
    for i in range(d):
        v = _phase_fix(V[:, i])
        energy = float(np.vdot(v, H @ v).real)
        r, k = _labels(v, Z, R)
        entries.append(EigenEntry(i, energy, r, k, PureState(v)))
    return LabeledEigenbasis(d, entries)


def weyl_symbol_h(d: int) -> np.ndarray:
    """Discrete Weyl symbol tr(H R_x) of the Harper-type Hamiltonian."""
    from .phase_reps import wigner_transform
    return wigner_transform(harper_hamiltonian(d)).values


def shifted_map(q, p):
    """Continuous map (q, p) -> (-p, q - p + 1/2) mod 1, which preserves classical_h."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return np.mod(-p, 1.0), np.mod(q - p + 0.5, 1.0)


@dataclass(frozen=True)
class ExpansionCoeffs:
    d: int
    coeffs: np.ndarray
    sector: int | str  # shared k of the support, or "mixed"
    support: tuple = ()

    def to_dict(self, basis: LabeledEigenbasis | None = None) -> dict:
        rows = []
        for i, a in enumerate(self.coeffs):
            row = {"i": i, "re": float(a.real), "im": float(a.imag), "abs": float(abs(a))}
            if basis is not None:
                row.update(r=basis.entries[i].r, k=basis.entries[i].k)
            rows.append(row)
        return {"d": self.d, "sector": self.sector, "support": list(self.support), "coeffs": rows}


def expand_in_eigenbasis(state: PureState, basis: LabeledEigenbasis,
                         tol: float = SUPPORT_TOL) -> ExpansionCoeffs:
    """Coefficients a_i = <v_i|psi> and the common Zauner sector of the support."""
    if state.d != basis.d:
        raise ValueError(f"state dimension {state.d} does not match basis dimension {basis.d}")
    a = basis.matrix().conj().T @ state.amps
    support = tuple(int(i) for i in np.flatnonzero(np.abs(a) > tol))
    ks = {basis.entries[i].k for i in support}
    sector = ks.pop() if len(ks) == 1 else "mixed"
    return ExpansionCoeffs(basis.d, a, sector, support)


def sector_projector(d: int, k: int) -> np.ndarray:
    """Orthogonal projector onto the eigenspace Z = exp(2 pi i k / 3)."""
    Z = zauner_unitary(d)
    I = np.eye(d)
    w = np.exp(2j * np.pi * k / 3)
    # (1/3) sum_n (w^* Z)^n
    P = (I + Z / w + (Z @ Z) / (w * w)) / 3
    return (P + P.conj().T) / 2


def sector_basis(d: int, k: int) -> np.ndarray:
    """Orthonormal columns spanning the Zauner sector k."""
    w, V = np.linalg.eigh(sector_projector(d, k))
    return V[:, w > 0.5]
