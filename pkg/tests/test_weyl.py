import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sicps.errors import DimensionError
from sicps.weyl import (
    PureState, centered, check_dim, displacement, fourier, lattice, parity,
    phase_roots, reflection, schwinger_uv, symplectic, tau_pow,
)

ODD = [3, 5, 7, 9, 11]


def product_form(d, alpha):
    U, V = schwinger_uv(d)
    a1, a2 = alpha
    return (np.linalg.matrix_power(V, a1 % d) @ np.linalg.matrix_power(U, a2 % d)
            * phase_roots(d).tau ** (a1 * a2))


@pytest.mark.parametrize("bad", [0, 1, 2, 4, -3, 10, 3.0, True])
def test_check_dim_rejects(bad):
    with pytest.raises(DimensionError):
        check_dim(bad)


@pytest.mark.parametrize("d", ODD)
def test_phase_roots(d):
    omega, tau, eps = phase_roots(d)
    assert abs(omega - tau**2) < 1e-14
    assert abs(tau ** (2 * d) - 1) < 1e-12
    assert abs(tau ** (d * d) - 1) < 1e-11
    assert abs(tau**d - eps) < 1e-12 and eps == 1.0


def test_schwinger_d3():
    U, V = schwinger_uv(3)
    e2 = np.zeros(3)
    e2[2] = 1
    np.testing.assert_array_equal(V @ e2, [1, 0, 0])
    w = np.exp(2j * np.pi / 3)
    np.testing.assert_allclose(np.diag(U), [1, w, w * w], atol=1e-15)


@pytest.mark.parametrize("d", ODD)
def test_schwinger_periods(d):
    U, V = schwinger_uv(d)
    eye = np.eye(d)
    assert np.abs(np.linalg.matrix_power(U, d) - eye).max() < 1e-12
    assert np.abs(np.linalg.matrix_power(V, d) - eye).max() < 1e-12


def test_commutation_d5():
    U, V = schwinger_uv(5)
    w = np.exp(2j * np.pi / 5)
    assert np.abs(U @ V - w * V @ U).max() < 1e-14


def test_displacement_special_values():
    for d in ODD:
        assert np.abs(displacement(d, (0, 0)) - np.eye(d)).max() == 0
    U, V = schwinger_uv(3)
    np.testing.assert_array_equal(displacement(3, (1, 0)), V)


def test_displacement_composition_example_d5():
    d = 5
    lhs = displacement(d, (1, 0)) @ displacement(d, (0, 1))
    assert symplectic((1, 0), (0, 1)) == -1
    rhs = phase_roots(d).tau ** -1 * displacement(d, (1, 1))
    assert np.abs(lhs - rhs).max() < 1e-14


@pytest.mark.parametrize("d", [3, 5, 7])
def test_displacement_matches_product_form(d):
    for a in lattice(d):
        assert np.abs(displacement(d, a) - product_form(d, a)).max() < 1e-12


@pytest.mark.parametrize("d", [3, 5, 7])
def test_displacement_algebra_exhaustive(d):
    T = {a: displacement(d, a) for a in lattice(d)}
    for a in T:
        neg = ((-a[0]) % d, (-a[1]) % d)
        assert np.abs(T[a].conj().T - T[neg]).max() < 1e-13
        for b in T:
            s = (a[0] + b[0]) % d, (a[1] + b[1]) % d
            comp = tau_pow(d, symplectic(a, b)) * T[s]
            assert np.abs(T[a] @ T[b] - comp).max() < 1e-12
            tr = np.trace(T[b] @ T[a].conj().T)
            assert abs(tr - (d if a == b else 0)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([9, 11, 13, 31]), st.integers(-100, 100), st.integers(-100, 100),
       st.integers(-100, 100), st.integers(-100, 100))
def test_composition_sampled(d, a1, a2, b1, b2):
    lhs = displacement(d, (a1, a2)) @ displacement(d, (b1, b2))
    rhs = tau_pow(d, symplectic((a1, a2), (b1, b2))) * displacement(d, (a1 + b1, a2 + b2))
    assert np.abs(lhs - rhs).max() < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(ODD), st.integers(-20, 20), st.integers(-20, 20),
       st.integers(-5, 5), st.integers(-5, 5))
def test_lattice_periodicity(d, a1, a2, b1, b2):
    assert np.abs(displacement(d, (a1 + d * b1, a2 + d * b2))
                  - displacement(d, (a1, a2))).max() == 0


def test_parity_d5():
    R = reflection(5, (0, 0))
    for j in range(5):
        e = np.zeros(5)
        e[j] = 1
        np.testing.assert_array_equal(R @ e, np.eye(5)[(-j) % 5])


def test_reflection_involution_d5():
    R = reflection(5, (1, 2))
    assert np.abs(R @ R - np.eye(5)).max() <= 1e-13
    assert np.abs(R - R.conj().T).max() == 0


def test_reflection_trace_orthogonality_d7():
    d = 7
    R = {x: reflection(d, x) for x in lattice(d)}
    for x, y in itertools.product(R, R):
        tr = np.trace(R[x] @ R[y])
        assert abs(tr - (d if x == y else 0)) < 1e-12


@pytest.mark.parametrize("d", [3, 5, 7])
def test_reflection_is_symplectic_fourier_of_translations(d):
    T = {a: displacement(d, a) for a in lattice(d)}
    for x in lattice(d):
        s = sum(np.exp(2j * np.pi * symplectic(x, a) / d) * T[a] for a in T) / d
        assert np.abs(s - reflection(d, x)).max() < 1e-12


@pytest.mark.parametrize("d", [3, 5, 7, 9, 11])
def test_special_value_sums(d):
    sum_T = sum(displacement(d, a) for a in lattice(d)) / d
    sum_R = sum(reflection(d, x) for x in lattice(d)) / d
    assert np.abs(sum_T - parity(d)).max() < 1e-12
    assert np.abs(sum_R - np.eye(d)).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5, 7, 9]), st.data())
def test_reflection_conjugation(d, data):
    pt = st.tuples(st.integers(0, d - 1), st.integers(0, d - 1))
    a, x = data.draw(pt), data.draw(pt)
    R, T = reflection(d, x), displacement(d, a)
    expected = np.exp(2j * np.pi * 2 * symplectic(a, x) / d) * T.conj().T
    assert np.abs(R @ T @ R - expected).max() < 1e-12


def test_fourier():
    F3 = fourier(3)
    np.testing.assert_allclose(F3[0], np.full(3, 1 / np.sqrt(3)), atol=1e-15)
    F5 = fourier(5)
    assert np.abs(F5 @ F5.conj().T - np.eye(5)).max() < 1e-13
    F7 = fourier(7)
    assert np.abs(F7 @ F7 - parity(7)).max() < 1e-12
    for d in ODD:
        F = fourier(d)
        assert np.abs(np.linalg.matrix_power(F, 4) - np.eye(d)).max() < 1e-12


def test_centered():
    assert centered((4, 3), 5) == (-1, -2)
    assert centered((2, 0), 5) == (2, 0)
    assert centered((-7, 9), 7) == (0, 2)


def test_pure_state():
    s = PureState.from_amplitudes([1, 1j, -1])
    assert abs(np.linalg.norm(s.amps) - 1) < 1e-15
    c = PureState.from_amplitudes([0.1, -2j, 0.3]).canonical()
    k = np.argmax(np.abs(c.amps))
    assert c.amps[k].imag == 0 and c.amps[k].real > 0
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0, 0.0]))
    with pytest.raises(DimensionError):
        PureState.from_amplitudes([1, 0, 0, 0])
