"""Modular phase-space arithmetic and the Weyl-Heisenberg operators for odd d.

Phase-space points are pairs of integers ``(a1, a2)``. Internally every
coordinate is reduced to ``[0, d)``; the centered window
``[-(d-1)/2, (d-1)/2]`` is only used for display and export.

Operators are plain dense ``(d, d)`` complex numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DimensionError

NORM_TOL = 1e-12


def check_dim(d) -> int:
    """Validate and return an odd dimension ``d >= 3``."""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise DimensionError(f"dimension must be an integer, got {d!r}")
    d = int(d)
    if d < 3 or d % 2 == 0:
        raise DimensionError(f"dimension must be odd and >= 3, got {d}")
    return d


def half(d: int) -> int:
    """Modular inverse of 2, i.e. (d+1)/2."""
    return (d + 1) // 2


class PhaseRoots(NamedTuple):
    omega: complex
    tau: complex
    epsilon: float


def phase_roots(d: int) -> PhaseRoots:
    d = check_dim(d)
    tau = np.exp(1j * np.pi * (d + 1) / d)
    return PhaseRoots(np.exp(2j * np.pi / d), complex(tau), 1.0)


_ROOTS: dict[int, np.ndarray] = {}


def _roots(d: int) -> np.ndarray:
    # omega^(d-k) is stored as the exact conjugate of omega^k
    if d not in _ROOTS:
        k = np.arange(d)
        r = np.exp(2j * np.pi * np.minimum(k, d - k) / d)
        r[k > d - k] = r[k > d - k].conj()
        r.setflags(write=False)
        _ROOTS[d] = r
    return _ROOTS[d]


def omega_pow(d: int, k) -> np.ndarray | complex:
    """omega**k with the exponent reduced mod d before exponentiation."""
    out = _roots(d)[np.mod(k, d)]
    return complex(out) if np.ndim(out) == 0 else out


def tau_pow(d: int, k) -> np.ndarray | complex:
    """tau**k for odd d, where tau = omega**((d+1)/2) has order d."""
    return omega_pow(d, np.mod(np.asarray(k) * half(d), d))


def symplectic(alpha, beta) -> int:
    """<alpha, beta> = alpha2*beta1 - alpha1*beta2."""
    return alpha[1] * beta[0] - alpha[0] * beta[1]


def reduce(alpha, d: int) -> tuple[int, int]:
    return (int(alpha[0]) % d, int(alpha[1]) % d)


def centered(alpha, d: int) -> tuple[int, int]:
    """Representative of ``alpha`` in the window [-(d-1)/2, (d-1)/2]."""
    h = (d - 1) // 2
    return tuple(((int(a) + h) % d) - h for a in alpha)


def negate(alpha, d: int) -> tuple[int, int]:
    return ((-alpha[0]) % d, (-alpha[1]) % d)


def lattice(d: int) -> Iterator[tuple[int, int]]:
    """All d*d points, a1-major, canonical representatives."""
    for a1 in range(d):
        for a2 in range(d):
            yield (a1, a2)


def dft_matrix(d: int, sign: int = 1) -> np.ndarray:
    """Matrix of omega**(sign*j*k), unnormalized."""
    j = np.arange(d)
    return omega_pow(d, sign * np.outer(j, j))


def schwinger_uv(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (U, V): the clock U|n> = omega^n|n> and shift V|n> = |n+1>."""
    d = check_dim(d)
    n = np.arange(d)
    U = np.diag(omega_pow(d, n)).astype(complex)
    V = np.zeros((d, d), dtype=complex)
    V[(n + 1) % d, n] = 1.0
    return U, V


def displacement(d: int, alpha) -> np.ndarray:
    """Displacement operator T_alpha = V^a1 U^a2 tau^(a1*a2).

    Built from the matrix-element form
    sum_j |j + a1/2><j - a1/2| omega^(a2*j), with 1/2 the modular inverse.
    """
    d = check_dim(d)
    a1, a2 = reduce(alpha, d)
    j = np.arange(d)
    h = half(d)
    T = np.zeros((d, d), dtype=complex)
    T[(j + a1 * h) % d, (j - a1 * h) % d] = omega_pow(d, a2 * j)
    return T


def reflection(d: int, x) -> np.ndarray:
    """Reflection (phase-space point) operator R_x.

    sum_j |x1 + j/2><x1 - j/2| omega^(x2*j); Hermitian, unitary, R_x^2 = 1.
    """
    d = check_dim(d)
    x1, x2 = reduce(x, d)
    j = np.arange(d)
    h = half(d)
    R = np.zeros((d, d), dtype=complex)
    R[(x1 + j * h) % d, (x1 - j * h) % d] = omega_pow(d, x2 * j)
    return R


def parity(d: int) -> np.ndarray:
    """R_{0,0}: |j> -> |-j>."""
    return reflection(d, (0, 0))


def fourier(d: int) -> np.ndarray:
    """Unitary Fourier operator with elements omega^(-ij)/sqrt(d)."""
    d = check_dim(d)
    return dft_matrix(d, -1) / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector <n|psi> in the position basis."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).reshape(-1)
        check_dim(a.size)
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        norm = np.vdot(a, a).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def from_amplitudes(cls, amps) -> "PureState":
        """Normalize arbitrary nonzero amplitudes."""
        a = np.asarray(amps, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(a)
        if not nrm > 0:
            raise ValueError("cannot normalize a zero vector")
        return cls(a / nrm)

    @classmethod
    def basis(cls, d: int, n: int) -> "PureState":
        a = np.zeros(check_dim(d), dtype=complex)
        a[n % d] = 1.0
        return cls(a)

    @property
    def d(self) -> int:
        return self.amps.size

    def canonical(self) -> "PureState":
        """Same ray, with the largest-modulus amplitude real and nonnegative."""
        a = self.amps
        k = int(np.argmax(np.abs(a)))
        phase = a[k] / abs(a[k])
        b = a / phase
        b[k] = abs(a[k])
        return PureState(b / np.linalg.norm(b))

    def projector(self) -> np.ndarray:
        return np.outer(self.amps, self.amps.conj())

    def apply(self, op: np.ndarray) -> "PureState":
        return PureState.from_amplitudes(op @ self.amps)

    def fidelity(self, other: "PureState") -> float:
        return abs(np.vdot(self.amps, other.amps)) ** 2

    def __repr__(self):
        return f"PureState(d={self.d})"
