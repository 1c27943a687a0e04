"""Bargmann and Husimi representations on the unit torus (hbar = 1/(2 pi d)).

A state is mapped to the entire function
B(z) = sum_n <z|n/d>_d <n|psi>, with the periodized coherent kernel written
through the Jacobi theta function theta3(z|tau) = sum_mu exp(i pi tau mu^2 + 2 i mu z).
B has exactly d zeros in each cell of the lattice (1, i) and the zeros fix
the state up to normalization and phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionError, InvalidConstellation, NonConvergent, ResolutionTooLow, SingularSampling,
    ZeroCountMismatch,
)
from .weyl import PureState, check_dim

Z0 = 0.5 + 0.5j
THETA_MIN_TERMS = 12
THETA_REL_TOL = 1e-17
STELLAR_LINE = (0.13, 0.37)  # sampling offsets inside each lattice cell


class TorusConstants(NamedTuple):
    d: int
    hbar: float
    z0: complex


def torus_constants(d: int) -> TorusConstants:
    d = check_dim(d)
    return TorusConstants(d, 1.0 / (2 * math.pi * d), Z0)


def _theta_terms(z, tau_mod, deriv: bool):
    tau_mod = complex(tau_mod)
    if not tau_mod.imag > 0:
        raise NonConvergent(f"theta3 needs Im(tau) > 0, got {tau_mod}")
    z = np.asarray(z, dtype=complex)
    t = tau_mod.imag
    # term modulus ~ exp(-pi t mu^2 - 2 mu Im z), peaked at mu* = -Im z / (pi t)
    centre = -z.imag / (math.pi * t)
    lo = math.floor(np.min(centre)) if z.size else 0
    hi = math.ceil(np.max(centre)) if z.size else 0
    # beyond k from the peak, terms are below exp(-pi t k^2) relative to the max
    k = max(THETA_MIN_TERMS, math.ceil(math.sqrt(-math.log(THETA_REL_TOL) / (math.pi * t))) + 1)
    if hi - lo > 100000:
        raise NonConvergent("argument spread too large for a direct theta sum")
    mus = np.arange(lo - k, hi + k + 1)
    out = np.zeros(z.shape, dtype=complex)
    dout = np.zeros(z.shape, dtype=complex) if deriv else None
    for mu in mus:
        term = np.exp(1j * math.pi * tau_mod * mu * mu + 2j * mu * z)
        out += term
        if deriv:
            dout += 2j * mu * term
    return out, dout


def theta3(z, tau_mod):
    """Jacobi theta3(z | tau) = sum_mu exp(i pi tau mu^2) exp(2 i mu z)."""
    out, _ = _theta_terms(z, tau_mod, False)
    return complex(out) if np.ndim(out) == 0 else out


def theta3_prime(z, tau_mod):
    """d/dz theta3(z | tau), summed term by term."""
    _, dout = _theta_terms(z, tau_mod, True)
    return complex(dout) if np.ndim(dout) == 0 else dout


def _kernel(d: int, z, n: int, deriv: bool = False):
    z = np.asarray(z, dtype=complex)
    expo = 2 * math.pi * d * (z * z / 4 - (z - n / d) ** 2 / 2)
    w = 1j * math.pi * (n - d * z)
    th, dth = _theta_terms(w, 1j * d, deriv)
    pre = np.exp(expo)
    val = pre * th
    if not deriv:
        return val, None
    dexpo = 2 * math.pi * d * (z / 2 - (z - n / d))
    return val, pre * (dexpo * th - 1j * math.pi * d * dth)


def coherent_overlap(d: int, z, n: int):
    """Periodized coherent kernel <z|n/d>_d.

    exp{2 pi d [z^2/4 - (z - n/d)^2/2]} theta3(i pi (n - d z) | i d).
    """
    d = check_dim(d)
    if not 0 <= n < d:
        raise ValueError(f"n must lie in [0, {d}), got {n}")
    val, _ = _kernel(d, z, n)
    return complex(val) if np.ndim(val) == 0 else val


def elementary(z):
    """The d = 1 factor psi_1(z) = exp(-pi z^2/2) theta3(-i pi z | i)."""
    z = np.asarray(z, dtype=complex)
    val = np.exp(-math.pi * z * z / 2) * theta3(-1j * math.pi * z, 1j)
    return complex(val) if np.ndim(val) == 0 else val


def _elementary_prime(z):
    z = np.asarray(z, dtype=complex)
    w = -1j * math.pi * z
    th, dth = _theta_terms(w, 1j, True)
    pre = np.exp(-math.pi * z * z / 2)
    return pre * (-math.pi * z * th - 1j * math.pi * dth)


def elementary_husimi(z):
    """d = 1 Husimi function |psi_1(z)|^2 exp(-pi |z|^2); doubly periodic."""
    z = np.asarray(z, dtype=complex)
    return np.abs(elementary(z)) ** 2 * np.exp(-math.pi * np.abs(z) ** 2)


def _amps(state) -> np.ndarray:
    if isinstance(state, PureState):
        return state.amps
    a = np.asarray(state, dtype=complex).reshape(-1)
    check_dim(a.size)
    return a


def bargmann(state, z):
    """B_psi(z) = sum_n <z|n/d>_d <n|psi>, vectorized over z."""
    a = _amps(state)
    d = a.size
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for n in range(d):
        if a[n] != 0:
            out += _kernel(d, z, n)[0] * a[n]
    return complex(out) if np.ndim(out) == 0 else out


def bargmann_prime(state, z):
    """Analytic derivative dB/dz from the term-by-term differentiated series."""
    a = _amps(state)
    d = a.size
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for n in range(d):
        if a[n] != 0:
            out += _kernel(d, z, n, deriv=True)[1] * a[n]
    return complex(out) if np.ndim(out) == 0 else out


def husimi(state, z):
    """H(z) = |B(z)|^2 exp(-pi d |z|^2), with z = q - i p."""
    d = _amps(state).size
    z = np.asarray(z, dtype=complex)
    return np.abs(bargmann(state, z)) ** 2 * np.exp(-math.pi * d * np.abs(z) ** 2)


@dataclass(frozen=True, eq=False)
class HusimiGrid:
    d: int
    n: int
    values: np.ndarray  # values[iq, ip] at q = iq/n, p = ip/n

    def coordinates(self):
        g = np.arange(self.n) / self.n
        return g, g


def min_resolution(d: int) -> int:
    return 8 * math.ceil(math.sqrt(d))


def husimi_grid(state, n: int) -> HusimiGrid:
    a = _amps(state)
    d = a.size
    if n < min_resolution(d):
        raise ResolutionTooLow(f"n={n} below minimum {min_resolution(d)} for d={d}")
    g = np.arange(n) / n
    q, p = np.meshgrid(g, g, indexing="ij")
    vals = husimi(a, q - 1j * p)
    return HusimiGrid(d, n, np.maximum(vals, 0.0))


def reduce_to_cell(z):
    """Representative with real and imaginary parts in [0, 1)."""
    z = np.asarray(z, dtype=complex)
    re = np.mod(z.real, 1.0)
    im = np.mod(z.imag, 1.0)
    re = np.where(re >= 1.0, 0.0, re)
    im = np.where(im >= 1.0, 0.0, im)
    out = re + 1j * im
    return complex(out) if np.ndim(out) == 0 else out


def lattice_distance(z, w) -> float:
    """Distance between z and w modulo the lattice (1, i)."""
    delta = complex(z) - complex(w)
    return abs(complex(delta.real - round(delta.real), delta.imag - round(delta.imag)))


def _lattice_residual(s: complex) -> float:
    return abs(complex(s.real - round(s.real), s.imag - round(s.imag)))


@dataclass(frozen=True, eq=False)
class Constellation:
    """The d zeros of a Bargmann function inside the cell [0,1) x [0,1).

    Multiple zeros are repeated according to multiplicity.
    """

    d: int
    zeros: np.ndarray

    @property
    def centroid_residual(self) -> float:
        """Distance of sum(z_i) - d (1+i)/2 from the lattice (1, i)."""
        return _lattice_residual(complex(np.sum(self.zeros)) - self.d * Z0)

    def multiplicities(self, tol: float = 1e-6) -> list[tuple[complex, int]]:
        groups: list[list] = []
        for z in self.zeros:
            for g in groups:
                if lattice_distance(z, g[0]) < tol:
                    g[1] += 1
                    break
            else:
                groups.append([complex(z), 1])
        return [(z, m) for z, m in groups]


def _dphi(a, b):
    return np.mod(b - a + np.pi, 2 * np.pi) - np.pi


def _winding_grid(f, n: int, offset: tuple[float, float]):
    """Plaquette winding numbers of f over the cell, on an (n+1)^2 node grid."""
    g = (np.arange(n + 1) + np.asarray(offset)[:, None]) / n
    X, Y = np.meshgrid(g[0], g[1], indexing="ij")
    ph = np.angle(f(X + 1j * Y))
    # counterclockwise: (i,j)->(i+1,j)->(i+1,j+1)->(i,j+1)->(i,j)
    w = (_dphi(ph[:-1, :-1], ph[1:, :-1]) + _dphi(ph[1:, :-1], ph[1:, 1:])
         + _dphi(ph[1:, 1:], ph[:-1, 1:]) + _dphi(ph[:-1, 1:], ph[:-1, :-1]))
    wind = np.rint(w / (2 * np.pi)).astype(int)
    centres = (X[:-1, :-1] + X[1:, 1:]) / 2 + 1j * (Y[:-1, :-1] + Y[1:, 1:]) / 2
    return wind, centres


def contour_winding(f, path, max_jump: float = np.pi / 4, max_points: int = 200000) -> int:
    """Winding number of f along a closed polygon, bisecting large phase jumps."""
    pts = np.asarray(path, dtype=complex)
    pts = np.append(pts, pts[0])
    vals = f(pts)
    while True:
        jump = np.abs(_dphi(np.angle(vals[:-1]), np.angle(vals[1:])))
        bad = np.flatnonzero(jump > max_jump)
        if bad.size == 0:
            break
        if pts.size + bad.size > max_points:
            raise ZeroCountMismatch("a zero lies on the counting contour")
        mids = (pts[bad] + pts[bad + 1]) / 2
        pts = np.insert(pts, bad + 1, mids)
        vals = np.insert(vals, bad + 1, f(mids))
    total = _dphi(np.angle(vals[:-1]), np.angle(vals[1:])).sum()
    return int(round(total / (2 * np.pi)))


def _square(corner: complex, side: float, m: int = 64) -> np.ndarray:
    t = np.arange(m) / m
    return np.concatenate([corner + side * t, corner + side + 1j * side * t,
                           corner + side * (1 + 1j) - side * t,
                           corner + 1j * side - 1j * side * t])


def _circle(z: complex, radius: float, m: int = 64) -> np.ndarray:
    return z + radius * np.exp(2j * np.pi * np.arange(m) / m)


def _newton(f, fp, z: np.ndarray, mult=1, max_iter: int = 60) -> np.ndarray:
    """Damped Newton iteration run on all seeds at once."""
    z = np.array(z, dtype=complex)
    mult = np.broadcast_to(mult, z.shape)
    active = np.ones(z.shape, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        za = z[active]
        with np.errstate(all="ignore"):
            dz = mult[active] * f(za) / fp(za)
        dz = np.where(np.isfinite(dz), dz, 0.0)
        big = np.abs(dz) > 0.25
        dz[big] *= 0.25 / np.abs(dz[big])
        z[active] = za - dz
        idx = np.flatnonzero(active)
        active[idx[np.abs(dz) < 1e-15]] = False
    return z


def _clusters(points: list[complex], tol: float) -> list[list[complex]]:
    """Single-linkage groups of points closer than tol modulo the lattice."""
    groups: list[list[complex]] = []
    for p in points:
        hits = [g for g in groups if any(lattice_distance(p, q) < tol for q in g)]
        merged = [p]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    return groups


def _centre(group: list[complex]) -> complex:
    ref = group[0]
    offs = [complex(q - ref) for q in group]
    offs = [complex(o.real - round(o.real), o.imag - round(o.imag)) for o in offs]
    return complex(ref + sum(offs) / len(offs))


def _count_clusters(f, roots: list[complex], d: int, n: int):
    """Group refined roots and attach multiplicities from local windings.

    Groups are merged at growing distance until the windings add up to d;
    numerically multiple zeros scatter Newton endpoints by ~eps^(1/m).
    """
    for tol in (1e-6, 1e-5, 1e-4, 1e-3, 1e-2):
        groups = _clusters(roots, tol)
        centres = [_centre(g) for g in groups]
        out = []
        for i, (g, c) in enumerate(zip(groups, centres)):
            spread = max(lattice_distance(q, c) for q in g)
            nn = min((lattice_distance(c, o) for j, o in enumerate(centres) if j != i),
                     default=1.0)
            radius = min(max(4 * spread, 1.0 / n), 0.4 * nn)
            try:
                m = contour_winding(f, _circle(c, radius), max_points=4096)
            except ZeroCountMismatch:
                # circle too tight: |f| is at the rounding floor
                break
            if m > 0:
                out.append((c, m))
        else:
            if sum(m for _, m in out) == d:
                return out
    return None


def _find_zeros(f, fp, weight, d: int, n: int) -> np.ndarray:
    """Locate the d zeros of a quasi-periodic f in the unit cell.

    Seeds are local minima of the weighted modulus |f| w (the square root of
    the Husimi density) together with plaquettes whose phase winds; Newton
    polishes every seed. The winding around the whole cell is an independent
    count that must equal d.
    """
    corner = complex(-0.0113, -0.0171)
    total = contour_winding(f, _square(corner, 1.0, 4 * n))
    if total != d:
        raise ZeroCountMismatch(f"phase winding counts {total} zeros, expected {d}")

    roots: list[complex] = []
    for attempt in range(3):
        m = n * (attempt + 1)
        offset = (0.3137 + 0.17 * attempt, 0.2718 + 0.23 * attempt)
        wind, centres = _winding_grid(f, m, offset)
        g = (np.arange(m) + 0.5) / m
        X, Y = np.meshgrid(g, g, indexing="ij")
        Z = X + 1j * Y
        hus = np.abs(f(Z)) * weight(Z)
        smax = float(hus.max())
        is_min = np.ones_like(hus, dtype=bool)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx or dy:
                    is_min &= hus <= np.roll(np.roll(hus, dx, 0), dy, 1)
        seeds = np.concatenate([centres[wind != 0], Z[is_min]])
        polished = _newton(f, fp, seeds)
        ok = np.abs(f(polished)) * weight(polished) / smax <= 1e-9
        roots.extend(complex(reduce_to_cell(r)) for r in polished[ok])
        found = _count_clusters(f, roots, d, n)
        if found is not None:
            break
    else:
        raise ZeroCountMismatch(f"could not isolate {d} zeros with multiplicity")

    zeros = []
    for c, mult in found:
        if mult > 1:
            c = complex(_newton(f, fp, np.array([c]), mult)[0])
        zeros.extend([complex(reduce_to_cell(c))] * mult)
    zeros.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return np.array(zeros, dtype=complex)


def seeding_resolution(d: int) -> int:
    return 32 * math.ceil(math.sqrt(d))


def find_zeros(state: PureState, n: int | None = None) -> Constellation:
    """Bargmann zero constellation of a pure state."""
    a = _amps(state)
    d = a.size
    n = n or seeding_resolution(d)

    def f(z):
        return bargmann(a, z)

    def fp(z):
        return bargmann_prime(a, z)

    def weight(z):
        return np.exp(-math.pi * d * np.abs(z) ** 2 / 2)

    return Constellation(d, _find_zeros(f, fp, weight, d, n))


def find_elementary_zero() -> complex:
    """Zero of the d = 1 factor psi_1 in the unit cell."""
    def weight(z):
        return np.exp(-math.pi * np.abs(z) ** 2 / 2)
    return complex(_find_zeros(elementary, _elementary_prime, weight, 1, 32)[0])


def stellar_function(zeros, z):
    """prod_i psi_1(z + z0 - z_i), with representatives shifted so that sum z_i = d z0."""
    zs = _balanced(np.asarray(zeros, dtype=complex))
    z = np.asarray(z, dtype=complex)
    out = np.ones(z.shape, dtype=complex)
    for zi in zs:
        out = out * elementary(z + Z0 - zi)
    return out


def _balanced(zeros: np.ndarray) -> np.ndarray:
    zs = zeros.astype(complex).copy()
    s = zs.size * Z0 - complex(np.sum(zs))
    zs[0] += complex(round(s.real), round(s.imag))
    return zs


def sampling_points(d: int, shift: float = 0.0) -> np.ndarray:
    """d*d points (j + 0.13)/d + i (k + 0.37)/d covering the cell."""
    x0, y0 = STELLAR_LINE
    j = np.arange(d)
    return ((j[:, None] + x0 + shift) / d + 1j * (j[None, :] + y0 + shift) / d).ravel()


def stellar_reconstruct(c: Constellation, max_tries: int = 3) -> PureState:
    """Rebuild the state whose Bargmann function vanishes on the constellation.

    The product of elementary factors is sampled on a d x d grid over the cell
    and matched against the kernel <z|n/d>_d by weighted least squares; with
    the Husimi weight exp(-pi d |z|^2 / 2) the system is a tight frame.
    """
    d = check_dim(c.d)
    zeros = np.asarray(c.zeros, dtype=complex)
    if zeros.size != d:
        raise DimensionError(f"constellation has {zeros.size} zeros, expected {d}")
    if c.centroid_residual > 1e-6:
        raise InvalidConstellation(
            f"zeros violate the centroid constraint (residual {c.centroid_residual:.3e})")
    for attempt in range(max_tries):
        pts = sampling_points(d, 0.21 * attempt)
        w = np.exp(-math.pi * d * np.abs(pts) ** 2 / 2)
        K = np.stack([_kernel(d, pts, n)[0] for n in range(d)], axis=1) * w[:, None]
        if np.linalg.cond(K) > 1e10:
            continue
        rhs = stellar_function(zeros, pts) * w
        coef = np.linalg.lstsq(K, rhs, rcond=None)[0]
        return PureState.from_amplitudes(coef).canonical()
    raise SingularSampling("sampling matrix is numerically singular at every tried offset")


def husimi_from_constellation(c: Constellation, z):
    """Unnormalized Husimi function prod_i h_1(z + z0 - z_i) of the d=1 factors."""
    z = np.asarray(z, dtype=complex)
    out = np.ones(z.shape)
    for zi in c.zeros:
        out = out * elementary_husimi(z + Z0 - zi)
    return out
