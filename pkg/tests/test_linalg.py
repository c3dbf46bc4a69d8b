import numpy as np
import pytest
from hypothesis import given, strategies as st

from dcsit_ia import linalg
from dcsit_ia.linalg import LinalgError

from conftest import cgauss


def rref_rank(a, tol=1e-9):
    """Gaussian elimination with partial pivoting, independent of the SVD."""
    a = np.array(a, dtype=complex)
    rows, cols = a.shape
    scale = np.abs(a).max() or 1.0
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= tol * scale:
            continue
        a[[r, p]] = a[[p, r]]
        a[r + 1:] -= np.outer(a[r + 1:, c] / a[r, c], a[r])
        r += 1
    return r


# -- rank -----------------------------------------------------------------

def test_rank_identity():
    assert linalg.rank(np.eye(4), 1e-9) == 4


def test_rank_zero():
    assert linalg.rank(np.zeros((3, 3))) == 0


def test_rank_empty_matrix():
    with pytest.raises(LinalgError, match="degenerate dimensions"):
        linalg.rank(np.zeros((0, 3)))


def test_rank_tolerance_range():
    with pytest.raises(LinalgError):
        linalg.rank(np.eye(2), 1.0)


def test_rank_random_tall_matches_elimination():
    agree = 0
    for seed in range(1000):
        a = cgauss(np.random.default_rng(seed), 5, 4)
        if linalg.rank(a) == 4 == rref_rank(a):
            agree += 1
    assert agree >= 999


def test_rank_rejects_nan():
    with pytest.raises(LinalgError, match="non-finite"):
        linalg.rank(np.array([[1.0, np.nan]]))


# -- left null vector -----------------------------------------------------

def test_null_vector_forced():
    w = linalg.left_null_vector(np.array([[1.0], [0.0]]))
    assert np.allclose(w, [0, 1])


def test_null_vector_residual_random_products():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        q = np.diag(cgauss(rng, 5)) @ cgauss(rng, 5, 4)
        w = linalg.left_null_vector(q)
        assert np.linalg.norm(q.T @ w) / np.linalg.norm(q) <= 1e-10
        assert np.isclose(np.linalg.norm(w), 1.0)
        k = int(np.argmax(np.abs(w)))
        assert abs(w[k].imag) < 1e-15 and w[k].real > 0


def test_null_vector_shape_mismatch():
    with pytest.raises(LinalgError, match="nullity mismatch"):
        linalg.left_null_vector(np.ones((4, 4)))


def test_null_vector_rank_deficient():
    q = np.zeros((3, 2), dtype=complex)
    q[:, 0] = [1, 2, 3]
    q[:, 1] = [2, 4, 6]
    with pytest.raises(LinalgError, match="nullity mismatch"):
        linalg.left_null_vector(q)


def test_null_vector_deterministic(rng):
    q = cgauss(rng, 6, 5)
    a = linalg.left_null_vector(q.copy())
    b = linalg.left_null_vector(q.copy())
    assert a.tobytes() == b.tobytes()


# -- solve ------------------------------------------------------------------

def test_solve_identity(rng):
    b = cgauss(rng, 5)
    assert np.array_equal(linalg.solve(np.eye(5), b), b)


def test_solve_planted():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        a = cgauss(rng, 4, 4) + 3 * np.eye(4)
        x = cgauss(rng, 4)
        xh = linalg.solve(a, a @ x)
        assert np.linalg.norm(xh - x) / np.linalg.norm(x) <= 1e-9


def test_solve_singular():
    a = np.ones((3, 3))
    with pytest.raises(LinalgError, match="singular system"):
        linalg.solve(a, np.ones(3))


def test_solve_nonsquare():
    with pytest.raises(LinalgError, match="singular system"):
        linalg.solve(np.ones((3, 2)), np.ones(3))


# -- smallest singular value --------------------------------------------------

def test_sigma_min_identity():
    assert linalg.min_singular_value(np.eye(7)) == pytest.approx(1.0)


def test_sigma_min_rank_one(rng):
    u, v = cgauss(rng, 5), cgauss(rng, 5)
    assert linalg.min_singular_value(np.outer(u, v)) <= 1e-12


def test_sigma_min_against_gram_eigenvalues():
    for seed in range(20):
        a = cgauss(np.random.default_rng(seed), 6, 6)
        oracle = np.sqrt(np.linalg.eigvalsh(a.conj().T @ a)[0])
        assert linalg.min_singular_value(a) == pytest.approx(oracle, rel=1e-10)


# -- genericity lemmas ---------------------------------------------------------

@given(st.integers(1, 12), st.integers(0, 12), st.integers(0, 2**32 - 1))
def test_product_of_random_matrices_full_rank(m, extra, seed):
    n = m + extra
    rng = np.random.default_rng(seed)
    a, b = cgauss(rng, m, n), cgauss(rng, n, m)
    assert linalg.rank(a @ b) == m


def test_product_full_rank_sweep():
    fails = 0
    for seed in range(1000):
        rng = np.random.default_rng(seed)
        m = 1 + seed % 12
        n = m + seed % 5
        fails += linalg.rank(cgauss(rng, m, n) @ cgauss(rng, n, m)) != m
    assert fails <= 1


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1), st.booleans())
def test_bordered_matrix_full_rank(m, n, seed, zero_c):
    rng = np.random.default_rng(seed)
    a, b = cgauss(rng, m, m), cgauss(rng, n, n)
    c = np.zeros((m, n)) if zero_c else cgauss(rng, m, n)
    bordered = np.block([[c, a], [b, np.zeros((n, m))]])
    assert linalg.rank(bordered) == m + n


@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_rank_invariant_under_diagonal_scaling(r, c, seed):
    rng = np.random.default_rng(seed)
    k = rng.integers(1, min(r, c) + 1)
    m = cgauss(rng, r, k) @ cgauss(rng, k, c)
    d1, d2 = np.diag(cgauss(rng, r)), np.diag(cgauss(rng, c))
    assert linalg.rank(d1 @ m) == linalg.rank(m) == linalg.rank(m @ d2)


# -- orthonormal frames ------------------------------------------------------

@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_orthonormalize_frames(r, c, seed):
    a = cgauss(np.random.default_rng(seed), r, c)
    q = linalg.orthonormalize(a)
    assert q.shape == (r, c)
    if r >= c:
        assert np.allclose(q.conj().T @ q, r * np.eye(c))
    else:
        assert np.allclose(q @ q.conj().T, c * np.eye(r))
