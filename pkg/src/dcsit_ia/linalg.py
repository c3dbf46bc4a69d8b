"""Dense complex linear algebra used by every scheme step.

Matrices are plain ``numpy`` complex arrays. The reference factorization is
the SVD; ranks are counted relative to the largest singular value.
"""

import hashlib

import numpy as np

RANK_REL_TOL = 1e-9


class LinalgError(ValueError):
    """Raised when a matrix violates a precondition at the working tolerance."""


def as_cmatrix(m):
    """Return ``m`` as a 2-D complex array, checking shape and finiteness."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.size == 0:
        raise LinalgError("degenerate dimensions")
    if not np.all(np.isfinite(a)):
        raise LinalgError("non-finite entries")
    return a


def fingerprint(m):
    """Short stable hash of a matrix, used to tag rank failures."""
    a = np.ascontiguousarray(np.asarray(m, dtype=complex))
    h = hashlib.sha256(repr(a.shape).encode() + a.tobytes()).hexdigest()
    return h[:16]


def singular_values(m):
    return np.linalg.svd(as_cmatrix(m), compute_uv=False)


def rank(m, rel_tol=None):
    """Number of singular values above ``rel_tol`` times the largest one.

    ``None`` means the module default :data:`RANK_REL_TOL`.
    """
    if rel_tol is None:
        rel_tol = RANK_REL_TOL
    if not 0 <= rel_tol < 1:
        raise LinalgError("rel_tol must lie in [0, 1)")
    s = singular_values(m)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def min_singular_value(m):
    """Smallest singular value (0 for a rank-deficient non-square shape)."""
    a = as_cmatrix(m)
    s = np.linalg.svd(a, compute_uv=False)
    if len(s) < min(a.shape):
        return 0.0
    return float(s[-1])


def left_null_vector(q, rel_tol=None):
    """Unit vector ``w`` with ``q.T @ w == 0`` for a generic (n+1) x n matrix.

    The transpose is the plain (non-conjugate) one. The returned vector is
    normalised so that its first entry of largest magnitude is positive
    real, which makes the result a deterministic function of ``q``.
    """
    a = as_cmatrix(q)
    rows, cols = a.shape
    if rows != cols + 1:
        raise LinalgError(f"nullity mismatch: shape {a.shape} is not (n+1) x n")
    if rank(a, rel_tol) != cols:
        raise LinalgError(f"nullity mismatch: rank deficient [{fingerprint(a)}]")
    # null(q.T): last right-singular vector of q.T, conjugated back
    _, _, vh = np.linalg.svd(a.T)
    w = vh[-1].conj()
    k = int(np.argmax(np.abs(w)))
    w = w * (abs(w[k]) / w[k])
    w = w / np.linalg.norm(w)
    if np.linalg.norm(a.T @ w) > 1e-9 * np.linalg.norm(a):
        raise LinalgError(f"nullity mismatch: residual too large [{fingerprint(a)}]")
    return w


def solve(a, b, rel_tol=None):
    """Solve the square system ``a @ x = b``."""
    a = as_cmatrix(a)
    b = np.asarray(b, dtype=complex).reshape(-1)
    n, k = a.shape
    if n != k:
        raise LinalgError(f"singular system: matrix is {n} x {k}, not square")
    if b.shape[0] != n:
        raise LinalgError("right-hand side length mismatch")
    if rank(a, rel_tol) < n:
        raise LinalgError(f"singular system [{fingerprint(a)}]")
    x = np.linalg.solve(a, b)
    resid = np.linalg.norm(a @ x - b)
    if resid > 1e-8 * (np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(b)):
        raise LinalgError(f"singular system: residual {resid:.3e} [{fingerprint(a)}]")
    return x


def relative_sigma_min(m):
    """``sigma_min / ||m||_F``, the genericity margin reported by the runs."""
    a = as_cmatrix(m)
    return min_singular_value(a) / np.linalg.norm(a)


def orthonormalize(a):
    """Haar-distributed frame from a Gaussian draw, scaled to unit mean power.

    Tall input gets orthonormal columns, wide input orthonormal rows; the QR
    phases are fixed by the diagonal of ``R`` so the map is deterministic.
    """
    a = as_cmatrix(a)
    r, c = a.shape
    wide = r < c
    q, rr = np.linalg.qr(a.T if wide else a)
    d = np.diag(rr)
    q = q * np.where(d == 0, 1.0, d / np.abs(d))
    q = q * np.sqrt(q.shape[0])
    return q.T if wide else q
