import numpy as np
import pytest
import scipy.linalg

from daepencil.expm import expm


def test_zero_matrix():
    np.testing.assert_array_equal(expm(np.zeros((3, 3))), np.eye(3))


def test_diagonal():
    D = np.diag([1.0, -2.0, 0.5])
    np.testing.assert_allclose(expm(D), np.diag(np.exp([1.0, -2.0, 0.5])), rtol=1e-14)


def test_nilpotent_truncates():
    N = np.eye(3, k=1)
    expected = np.eye(3) + N + N @ N / 2  # series ends at N^2
    np.testing.assert_allclose(expm(N), expected, rtol=1e-15, atol=1e-15)


def test_rotation_block():
    t = 0.7
    J = np.array([[0.0, -t], [t, 0.0]])
    expected = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    np.testing.assert_allclose(expm(J), expected, rtol=1e-14, atol=1e-15)


def test_inverse_relation():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((5, 5))
    np.testing.assert_allclose(expm(M) @ expm(-M), np.eye(5), atol=1e-12)


@pytest.mark.parametrize("scale", [0.01, 1.0, 30.0, 300.0])
def test_against_scipy(scale):
    rng = np.random.default_rng(int(scale * 10))
    for _ in range(5):
        n = int(rng.integers(1, 9))
        M = rng.standard_normal((n, n))
        M *= scale / np.linalg.norm(M, 2)  # exp stays representable
        ours = expm(M)
        ref = scipy.linalg.expm(M)
        norm = max(np.linalg.norm(ref, 2), 1e-300)
        assert np.linalg.norm(ours - ref, 2) / norm <= 1e-9


def test_complex_argument():
    rng = np.random.default_rng(2)
    M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    ref = scipy.linalg.expm(M)
    assert np.linalg.norm(expm(M) - ref, 2) / np.linalg.norm(ref, 2) <= 1e-12


def test_empty_matrix():
    assert expm(np.zeros((0, 0))).shape == (0, 0)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        expm(np.ones((2, 3)))
