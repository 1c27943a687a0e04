"""Localization measures, SIC verification and Haar-random statistics."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .phase_reps import chord_transform, wigner_transform
from .weyl import PureState, check_dim, dft_matrix, half, reduce

RNG_NAME = "numpy.random.PCG64"
BLOCK_SIZE = 4096  # samples per independently seeded block
M_AGREEMENT_TOL = 1e-11
HIST_BINS = 500


def ipr(state: PureState) -> float:
    """Inverse participation ratio sum_i |<i|psi>|^4 in the position basis."""
    p = np.abs(state.amps) ** 2
    return float(np.sum(p * p))


def chord_batch(amps: np.ndarray) -> np.ndarray:
    """Chord grids of many pure states at once.

    ``amps`` has shape (n, d); the result has shape (n, d, d) with
    C[k, a1, a2] = <psi_k| T_(a1,a2)^dagger |psi_k>.
    """
    amps = np.atleast_2d(np.asarray(amps, dtype=complex))
    d = check_dim(amps.shape[1])
    h = half(d)
    j = np.arange(d)
    a1 = np.arange(d)[:, None]
    g = amps[:, (j + a1 * h) % d] * amps[:, (j - a1 * h) % d].conj()
    return g @ dft_matrix(d, -1)


def _m_from_chord(C: np.ndarray) -> np.ndarray:
    d = C.shape[-1]
    return np.sum(np.abs(C) ** 4, axis=(-2, -1)) / d


def phase_space_m(state: PureState) -> float:
    """M = (1/d) sum_alpha |<psi|T_alpha|psi>|^4.

    The chord value is cross-checked against the Wigner form (1/d) sum W^4.
    """
    d = state.d
    m_chord = float(np.sum(np.abs(chord_transform(state).values) ** 4) / d)
    m_wigner = float(np.sum(wigner_transform(state).values ** 4) / d)
    if abs(m_chord - m_wigner) > M_AGREEMENT_TOL * max(1.0, m_chord):
        raise ArithmeticError(f"chord and Wigner forms of M disagree: {m_chord} vs {m_wigner}")
    return m_chord


@dataclass(frozen=True)
class SicReport:
    d: int
    max_dev: float
    m_value: float
    p_value: float
    tol: float
    passed: bool

    @property
    def pass_(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


def sic_overlaps(state: PureState) -> np.ndarray:
    """|<psi|T_alpha|psi>|^2 on the full lattice; entry (0, 0) is 1."""
    return np.abs(chord_batch(state.amps)[0]) ** 2


def verify_sic(state: PureState, tol: float = 1e-8) -> SicReport:
    d = state.d
    ov = sic_overlaps(state)
    dev = np.abs(ov - 1.0 / (d + 1))
    dev[0, 0] = 0.0
    max_dev = float(dev.max())
    return SicReport(d, max_dev, phase_space_m(state), ipr(state), float(tol), max_dev <= tol)


def haar_sample(d: int, rng: np.random.Generator) -> PureState:
    """Unitarily invariant random state: normalized complex Gaussian vector."""
    d = check_dim(d)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState.from_amplitudes(z)


def haar_batch(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """(n, d) array of normalized Haar-random amplitude vectors."""
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


STATISTICS = ("P", "M", "T4")


def analytic_value(stat: str, d: int, alpha=(1, 0)) -> float:
    """Haar average of the statistic (second-moment identities)."""
    if stat == "P":
        return 2.0 / (d + 1)
    if stat == "M":
        return 3.0 / (d + 2)
    if stat == "T4":
        return 1.0 if reduce(alpha, d) == (0, 0) else 2.0 / ((d + 1) * (d + 2))
    raise ValueError(f"unknown statistic {stat!r}; expected one of {STATISTICS}")


def statistic_values(stat: str, amps: np.ndarray, alpha=(1, 0)) -> np.ndarray:
    """Per-state values of P, M or |<psi|T_alpha|psi>|^4 for a batch."""
    if stat == "P":
        p = np.abs(amps) ** 2
        return np.sum(p * p, axis=1)
    if stat == "M":
        return _m_from_chord(chord_batch(amps))
    if stat == "T4":
        d = amps.shape[1]
        a1, a2 = reduce(alpha, d)
        h = half(d)
        j = np.arange(d)
        g = amps[:, (j + a1 * h) % d] * amps[:, (j - a1 * h) % d].conj()
        c = g @ dft_matrix(d, -1)[:, a2]
        return np.abs(c) ** 4
    raise ValueError(f"unknown statistic {stat!r}; expected one of {STATISTICS}")


@dataclass(frozen=True)
class HaarEstimate:
    statistic: str
    d: int
    n_samples: int
    mean: float
    stderr: float
    analytic: float | None
    seed: int | None
    alpha: tuple[int, int] | None = None
    rng: str = RNG_NAME
    extra: dict = field(default_factory=dict)

    @property
    def z_score(self) -> float:
        if self.analytic is None or self.stderr == 0:
            return 0.0
        return (self.mean - self.analytic) / self.stderr

    def within(self, k: float = 3.0) -> bool:
        """True when the analytic value lies within k standard errors."""
        if self.analytic is None:
            return True
        return abs(self.mean - self.analytic) <= k * self.stderr

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = self.within()
        return out


def _block(args):
    stat, d, size, alpha, seq = args
    rng = np.random.Generator(np.random.PCG64(seq))
    v = statistic_values(stat, haar_batch(d, size, rng), alpha)
    return v.size, float(v.sum()), float(np.sum(v * v))


def _block_sizes(n: int) -> list[int]:
    full, rest = divmod(n, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def haar_estimate(stat: str, d: int, n: int, seed: int | None = None,
                  alpha=(1, 0), workers: int = 1) -> HaarEstimate:
    """Monte Carlo mean and standard error of a statistic over Haar states.

    Samples are drawn in fixed-size blocks, each from its own child seed, so
    the estimate does not depend on ``workers``.
    """
    d = check_dim(d)
    if n < 100:
        raise ValueError("need at least 100 samples")
    if stat not in STATISTICS:
        raise ValueError(f"unknown statistic {stat!r}; expected one of {STATISTICS}")
    alpha = reduce(alpha, d) if stat == "T4" else None
    sizes = _block_sizes(n)
    root = np.random.SeedSequence(seed)
    seed = root.entropy  # recorded even when drawn from the OS
    children = root.spawn(len(sizes))
    jobs = [(stat, d, s, alpha, c) for s, c in zip(sizes, children)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_block, jobs))
    else:
        parts = [_block(j) for j in jobs]
    # accumulate in block order for a worker-independent result
    cnt = sum(p[0] for p in parts)
    s1 = math.fsum(p[1] for p in parts)
    s2 = math.fsum(p[2] for p in parts)
    mean = s1 / cnt
    var = max(s2 - cnt * mean * mean, 0.0) / (cnt - 1)
    return HaarEstimate(stat, d, cnt, mean, math.sqrt(var / cnt),
                        analytic_value(stat, d, alpha or (0, 0)), seed, alpha)


def haar_values(stat: str, d: int, n: int, seed: int | None = None, alpha=(1, 0)) -> np.ndarray:
    """Per-sample values using the same block seeding as ``haar_estimate``."""
    sizes = _block_sizes(n)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    out = []
    for s, c in zip(sizes, children):
        rng = np.random.Generator(np.random.PCG64(c))
        out.append(statistic_values(stat, haar_batch(d, s, rng), alpha))
    return np.concatenate(out)


def coherent_reference(d: int) -> PureState:
    """State whose Bargmann zeros all sit at the far corner of the unit cell."""
    from .torus import Z0, Constellation, stellar_reconstruct
    return stellar_reconstruct(Constellation(d, np.full(d, Z0)))


def reference_lines(d: int) -> dict[str, dict[str, float]]:
    """Inverse P and M for a position state, a coherent state and a fiducial."""
    pos = PureState.basis(d, 0)
    coh = coherent_reference(d)
    return {
        "position": {"P_inv": 1.0 / ipr(pos), "M_inv": 1.0 / phase_space_m(pos)},
        "coherent": {"P_inv": 1.0 / ipr(coh), "M_inv": 1.0 / phase_space_m(coh)},
        "fiducial": {"P_inv": (d + 1) / 2.0, "M_inv": (d + 1) / 2.0},
    }


def inverse_histogram(values: np.ndarray, d: int, bins: int = HIST_BINS):
    """Histogram of 1/values with ``bins`` equal bins over [0, d].

    Returns (edges, counts); edges has length bins + 1.
    """
    inv = 1.0 / np.asarray(values, dtype=float)
    counts, edges = np.histogram(inv, bins=bins, range=(0.0, float(d)))
    return edges, counts


def histogram_csv(values: np.ndarray, d: int, bins: int = HIST_BINS) -> str:
    edges, counts = inverse_histogram(values, d, bins)
    lines = ["bin_lo,bin_hi,count"]
    lines += [f"{float(lo)!r},{float(hi)!r},{int(c)}" for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
    return "\n".join(lines) + "\n"
