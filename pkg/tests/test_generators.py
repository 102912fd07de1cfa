"""Generator basis, closed-form exponentials and adjoint-action relations."""
import numpy as np
import pytest
from scipy.linalg import expm

from euler_haar.controllers.generators import (
    ad_relation_residual, decode_index, exp_generator, generator, so_indices, trace_pairing,
)


def test_decode_index():
    assert decode_index(3, 1) == (1, 1)
    assert decode_index(3, 3) == (1, 3)
    assert decode_index(3, 4) == (2, 1)
    assert decode_index(3, 8) == (2, 5)
    for bad in (0, 9):
        with pytest.raises(ValueError):
            decode_index(3, bad)


def test_su2_generators():
    np.testing.assert_array_equal(generator(2, 1), [[0, 1j], [1j, 0]])
    np.testing.assert_array_equal(generator(2, 2), [[0, 1], [-1, 0]])
    np.testing.assert_array_equal(generator(2, 3), [[1j, 0], [0, -1j]])


def test_diagonal_generator_of_su3():
    np.testing.assert_array_equal(generator(3, 8), np.diag([1j, 1j, -2j]))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_generators_are_antihermitian_and_traceless(n):
    for j in range(1, n * n):
        lam = generator(n, j)
        np.testing.assert_array_equal(lam, -lam.conj().T)
        assert np.trace(lam) == 0


@pytest.mark.parametrize("n", [3, 4])
def test_trace_pairing_is_diagonal(n):
    for j in range(1, n * n):
        jj, k = decode_index(n, j)
        expected = -jj * (jj + 1) if k == 2 * jj + 1 else -2
        assert trace_pairing(n, j, j) == expected
        for other in range(1, n * n):
            if other != j:
                assert trace_pairing(n, j, other) == 0


def test_generator_returns_a_copy():
    lam = generator(3, 2)
    lam[0, 1] = 99
    assert generator(3, 2)[0, 1] == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_exp_generator_matches_expm(n):
    for j in range(1, n * n):
        for t in (-1.3, 0.4, 2.9):
            np.testing.assert_allclose(exp_generator(n, j, t), expm(t * generator(n, j)), atol=1e-12)


@pytest.mark.parametrize("n, j, plane, imaginary", [
    (2, 1, (0, 1), True),
    (3, 4, (0, 2), True),
    (3, 6, (1, 2), True),
    (4, 11, (1, 3), True),
    (4, 12, (1, 3), False),
])
def test_exp_generator_closed_form_off_the_diagonal(n, j, plane, imaginary):
    t = 0.83
    a, b = plane
    expected = np.eye(n, dtype=complex)
    expected[a, a] = expected[b, b] = np.cos(t)
    if imaginary:
        expected[a, b] = expected[b, a] = 1j * np.sin(t)
    else:
        expected[a, b], expected[b, a] = np.sin(t), -np.sin(t)
    u = exp_generator(n, j, t)
    np.testing.assert_allclose(u, expected, atol=1e-15)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(n), atol=1e-14)
    assert np.linalg.det(u) == pytest.approx(1)


def test_exp_generator_closed_form_on_an_inner_diagonal():
    t = 0.6
    expected = np.diag(np.exp(1j * t * np.array([1, 1, -2, 0])))
    np.testing.assert_allclose(exp_generator(4, 8, t), expected, atol=1e-15)


@pytest.mark.parametrize("j", [0, 9])
def test_exp_generator_index_range(j):
    with pytest.raises(ValueError):
        exp_generator(3, j, 0.5)


def test_exp_generator_is_vectorised():
    t = np.array([[0.1, 0.2, 0.3], [1.0, 2.0, 3.0]])
    out = exp_generator(3, 5, t)
    assert out.shape == (2, 3, 3, 3)
    np.testing.assert_allclose(out[1, 2], exp_generator(3, 5, 3.0))


def test_one_parameter_subgroup(rng):
    s, t = rng.uniform(-3, 3, 2)
    for j in range(1, 16):
        np.testing.assert_allclose(exp_generator(4, j, s + t), exp_generator(4, j, s) @ exp_generator(4, j, t),
                                   atol=1e-12)


def test_real_generators_span_so():
    assert so_indices(3) == [2, 5, 7]
    for j in so_indices(4):
        assert not np.any(generator(4, j).imag)
    assert len(so_indices(5)) == 10


@pytest.mark.parametrize("n", [3, 4, 5])
def test_adjoint_relations(n, rng):
    for _ in range(20):
        phi, psi = rng.uniform(0, 2 * np.pi, 2)
        for q in range(2, n):
            assert ad_relation_residual(1, n, q, phi) < 1e-12
            assert ad_relation_residual(2, n, q, phi, psi) < 1e-12
            for p in range(q + 1, n):
                assert ad_relation_residual(3, n, q, phi, psi, p=p) < 1e-12
                assert ad_relation_residual(4, n, q, phi, psi, p=p) < 1e-12


def test_adjoint_relation_argument_checks():
    with pytest.raises(ValueError):
        ad_relation_residual(5, 4, 2, 0.1)
    with pytest.raises(ValueError):
        ad_relation_residual(1, 3, 3, 0.1)
    with pytest.raises(ValueError):
        ad_relation_residual(3, 4, 2, 0.1, 0.2)
    with pytest.raises(ValueError):
        ad_relation_residual(3, 4, 3, 0.1, 0.2, p=3)
