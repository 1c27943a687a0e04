"""Numerical search for SIC fiducials by minimizing the phase-space measure M.

Each restart minimizes M(x/|x|) with L-BFGS from a Haar-random start, then
polishes with Levenberg-Marquardt on the overlap residuals
|<x|T_a|x>|^2 - |x|^4/(d+1).  The polish matters because M itself sits at
2/(d+1) and double precision cannot resolve gaps much below 1e-16, while the
overlaps can be driven to machine precision directly.

With a sector k the state is written as x = B y, where the columns of B span
the Zauner eigenspace, so every iterate lies exactly in the sector.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize

from .errors import ZeroProjection
from .localization import chord_batch
from .weyl import PureState, check_dim, dft_matrix, half
from .zauner import sector_basis, sector_projector

METHOD = "L-BFGS-B on M, then Levenberg-Marquardt on overlap residuals"
POLISH_START = 1e-4  # gap below which the least-squares polish is attempted


@dataclass(frozen=True)
class SearchConfig:
    d: int
    sector: int | None = None
    restarts: int = 20
    max_iters: int = 2000
    tol: float = 1e-9
    seed: int = 0
    stop_on_success: bool = True

    def __post_init__(self):
        check_dim(self.d)
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.sector is not None and self.sector not in (0, 1, 2):
            raise ValueError("sector must be 0, 1 or 2")


@dataclass(frozen=True)
class SearchResult:
    best_state: PureState
    m_value: float
    gap: float
    converged: bool
    restart_index: int
    iterations: int
    seed: int
    config: SearchConfig
    history: list = field(default_factory=list)  # best-so-far gap after each restart
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        amps = self.best_state.canonical().amps
        return {
            "config": asdict(self.config),
            "seed": self.seed,
            "m_value": self.m_value,
            "gap": self.gap,
            "converged": self.converged,
            "restart_index": self.restart_index,
            "iterations": self.iterations,
            "history": list(self.history),
            "metadata": dict(self.metadata),
            "state": {"d": self.best_state.d,
                      "amplitudes": [[float(a.real), float(a.imag)] for a in amps]},
        }


def _shifted(x: np.ndarray) -> np.ndarray:
    """S[a1, j] = x[j - a1/2], the input to row a1 of T_a x."""
    d = x.size
    h = half(d)
    j = np.arange(d)
    a1 = np.arange(d)[:, None]
    return x[(j - a1 * h) % d]


def _overlaps(x: np.ndarray) -> np.ndarray:
    """c[a1, a2] = <x|T_a|x> for an unnormalized vector."""
    return chord_batch(x)[0].conj()


def _weighted_action(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum_a w[a] T_a x."""
    d = x.size
    h = half(d)
    j = np.arange(d)
    rows = (w @ dft_matrix(d, 1)) * _shifted(x)  # rows[a1, j] lands on j + a1/2
    out = np.zeros(d, dtype=complex)
    np.add.at(out, (j[None, :] + np.arange(d)[:, None] * h) % d, rows)
    return out


def _raw_gradient(x: np.ndarray) -> tuple[float, np.ndarray]:
    """g(x) = (1/d) sum |<x|T_a|x>|^4 and its gradient as a complex vector."""
    d = x.size
    c = _overlaps(x)
    p = np.abs(c) ** 2
    g = float(np.sum(p * p) / d)
    G = (8.0 / d) * _weighted_action(x, p * c.conj())
    return g, G


def cost_and_gradient(state) -> tuple[float, np.ndarray]:
    """M(psi) and its gradient over the 2d real parameters (Re psi, Im psi).

    The gradient is that of M(x/|x|), i.e. the raw gradient projected onto
    the tangent space of the unit sphere at psi.
    """
    x = state.amps if isinstance(state, PureState) else np.asarray(state, dtype=complex)
    x = x / np.linalg.norm(x)
    g, G = _raw_gradient(x)
    G = G - np.vdot(x, G).real * x
    return g, np.concatenate([G.real, G.imag])


def project_to_sector(state: PureState, k: int) -> PureState:
    """Apply the Zauner sector projector and renormalize."""
    v = sector_projector(state.d, k) @ state.amps
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        raise ZeroProjection(f"state has no component in sector {k}")
    return PureState(v / nrm)


def overlap_gap(x: np.ndarray) -> float:
    """M - 2/(d+1) for a normalized vector, as (1/d) sum_(a != 0) (|c_a|^2 - 1/(d+1))^2.

    Equal to the gap because sum_a |c_a|^2 = d for any pure state; this form
    is accurate to machine precision near a fiducial.
    """
    d = x.size
    r = np.abs(_overlaps(x)) ** 2 - 1.0 / (d + 1)
    r[0, 0] = 0.0
    return float(np.sum(r * r) / d)


def _lbfgs(B: np.ndarray, y0: np.ndarray, max_iters: int, tol: float):
    m = B.shape[1]

    def fun(p):
        y = p[:m] + 1j * p[m:]
        ny = np.linalg.norm(y)
        u = B @ (y / ny)
        g, G = _raw_gradient(u)
        G = G - np.vdot(u, G).real * u
        Gy = B.conj().T @ G / ny
        return g, np.concatenate([Gy.real, Gy.imag])

    res = minimize(fun, np.concatenate([y0.real, y0.imag]), jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iters, "gtol": 1e-12, "ftol": 1e-15})
    y = res.x[:m] + 1j * res.x[m:]
    return y / np.linalg.norm(y), int(res.nit)


def _polish(B: np.ndarray, y0: np.ndarray, max_iters: int):
    d, m = B.shape
    mask = np.ones((d, d), dtype=bool)
    mask[0, 0] = False
    h = half(d)
    j = np.arange(d)
    a1 = np.arange(d)[:, None, None]
    a2 = np.arange(d)[None, :, None]
    jj = j[None, None, :]
    phase = dft_matrix(d, 1)[None, :, :]  # omega^(a2 j)
    tgt = (jj + a1 * h) % d

    def residuals(p):
        y = p[:m] + 1j * p[m:]
        x = B @ y
        n2 = np.vdot(x, x).real
        r = np.abs(_overlaps(x)) ** 2 - n2 * n2 / (d + 1)
        return np.concatenate([r[mask], [n2 - 1.0]])

    def jac(p):
        y = p[:m] + 1j * p[m:]
        x = B @ y
        n2 = np.vdot(x, x).real
        c = _overlaps(x)
        # Tx[a1, a2, :] = T_a x and Tdx = T_a^dagger x = T_(-a) x
        vals = phase * _shifted(x)[:, None, :]
        Tx = np.zeros((d, d, d), dtype=complex)
        np.put_along_axis(Tx, np.broadcast_to(tgt, (d, d, d)), vals, axis=2)
        Tdx = Tx[(-np.arange(d)) % d][:, (-np.arange(d)) % d]
        G = 2 * (c.conj()[..., None] * Tx + c[..., None] * Tdx)
        G = G - (4 * n2 / (d + 1)) * x[None, None, :]
        Gy = G[mask] @ B.conj()
        rows = np.concatenate([Gy, [2 * (B.conj().T @ x)]])
        return np.hstack([rows.real, rows.imag])

    res = least_squares(residuals, np.concatenate([y0.real, y0.imag]), jac=jac,
                        method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=max_iters)
    y = res.x[:m] + 1j * res.x[m:]
    return y / np.linalg.norm(y), int(res.nfev)


def _restart(config: SearchConfig, B: np.ndarray, seq: np.random.SeedSequence):
    d, m = B.shape
    rng = np.random.Generator(np.random.PCG64(seq))
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    y = B.conj().T @ (z / np.linalg.norm(z))
    if np.linalg.norm(y) < 1e-12:
        raise ZeroProjection("random start has no component in the sector")
    y /= np.linalg.norm(y)
    y, iters = _lbfgs(B, y, config.max_iters, config.tol)
    gap = overlap_gap(B @ y)
    if gap < POLISH_START:
        y2, n = _polish(B, y, config.max_iters)
        iters += n
        gap2 = overlap_gap(B @ y2)
        if gap2 <= gap:
            y, gap = y2, gap2
    return B @ y, gap, iters


def search(config: SearchConfig) -> SearchResult:
    """Deterministic multi-start minimization of M; returns the best restart."""
    d = config.d
    B = np.eye(d, dtype=complex) if config.sector is None else sector_basis(d, config.sector)
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    best = None
    history = []
    total_iters = 0
    for i, seq in enumerate(children):
        x, gap, iters = _restart(config, B, seq)
        total_iters += iters
        # strict improvement keeps the lowest index among ties
        if best is None or gap < best[1]:
            best = (x, gap, iters, i)
        history.append(best[1])
        if config.stop_on_success and best[1] <= config.tol:
            break
    x, gap, iters, idx = best
    state = PureState(x / np.linalg.norm(x)).canonical()
    meta = {
        "method": METHOD,
        "rng": "numpy.random.PCG64",
        "seed_rule": "SeedSequence(seed).spawn(restarts)[i] for restart i",
        "sector_dim": int(B.shape[1]),
        "restarts_run": len(history),
        "total_iterations": total_iters,
    }
    return SearchResult(state, 2.0 / (d + 1) + gap, gap, gap <= config.tol, idx, iters,
                        config.seed, config, history, meta)
