"""Dense linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects, real or complex. Every routine
treats them as operators on C^n with the inner product ``<x, y> = y^* x``
(linear in the first argument). Real arrays are a storage optimization only.
"""

import numpy as np
import scipy.linalg

from .errors import (
    DecompositionFailure,
    DimensionMismatch,
    NotHermitian,
    NotPositive,
    ZeroSubspace,
)

__all__ = [
    "SYM_TOL",
    "PINV_CUTOFF",
    "RANK_TOL",
    "adjoint",
    "is_hermitian",
    "hermitian_spectrum",
    "psd_sqrt",
    "svd",
    "operator_norm",
    "trace_norm",
    "pinv",
    "orthonormalize",
    "subspace_intersection",
]

SYM_TOL = 1e-9
PINV_CUTOFF = 1e-12
RANK_TOL = 1e-10


def adjoint(M):
    return np.conj(M).T


def _check_finite(M):
    if not np.all(np.isfinite(M)):
        raise DecompositionFailure("matrix has non-finite entries")


def _norm2(M):
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def is_hermitian(M, tol=SYM_TOL):
    """True when ``||M - M*|| <= tol * max(1, ||M||)`` in the spectral norm."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    return _norm2(M - adjoint(M)) <= tol * max(1.0, _norm2(M))


def hermitian_spectrum(M, tol=SYM_TOL):
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as ``(M + M*)/2`` once it passes the symmetry
    check.

    Parameters
    ----------
    M : ndarray, shape (n, n)
    tol : float
        Relative symmetry tolerance.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Real, ascending.
    eigenvectors : ndarray, shape (n, n)
        Unitary; column ``k`` belongs to ``eigenvalues[k]``.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    _check_finite(M)
    if not is_hermitian(M, tol):
        raise NotHermitian(
            f"||M - M*|| = {_norm2(M - adjoint(M)):.3e} exceeds tolerance"
        )
    H = 0.5 * (M + adjoint(M))
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    return w, V


def psd_sqrt(M, tol=SYM_TOL):
    """Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in ``[-tol*max(1, ||M||), 0)`` are clamped to zero, as are
    positive ones below the roundoff floor ``n * eps * max(1, ||M||)``;
    anything more negative raises :class:`NotPositive`.
    """
    w, V = hermitian_spectrum(M, tol)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    if w.size and w[0] < -tol * scale:
        raise NotPositive(f"smallest eigenvalue {w[0]:.3e} is negative")
    # eigenvalues at roundoff level are zeros; sqrt would inflate them to ~1e-8
    floor = max(1, w.size) * np.finfo(float).eps * scale
    root = np.sqrt(np.where(w > floor, w, 0.0))
    R = (V * root) @ adjoint(V)
    return 0.5 * (R + adjoint(R))


def svd(M):
    """Thin SVD ``M = U diag(s) V*`` with ``s`` descending.

    Returns ``(U, s, V)``; note ``V`` is returned, not ``V*``.
    """
    M = np.asarray(M)
    _check_finite(M)
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    return U, s, adjoint(Vh)


def operator_norm(M):
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    _, s, _ = svd(M)
    return float(s[0])


def trace_norm(M):
    """Sum of singular values, i.e. ``tr |M|``."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"trace norm needs a square matrix, got {M.shape}")
    _, s, _ = svd(M)
    return float(np.sum(s))


def pinv(M, rel_cutoff=PINV_CUTOFF):
    """Moore-Penrose pseudo-inverse through the SVD.

    Singular values below ``rel_cutoff * s_max`` are treated as zero.
    """
    M = np.asarray(M)
    U, s, V = svd(M)
    out_dtype = np.result_type(M.dtype, np.float64)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=out_dtype)
    keep = s >= rel_cutoff * s[0]
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (V * inv_s) @ adjoint(U)


def orthonormalize(columns, tol=RANK_TOL):
    """Orthonormal basis for the column span of ``columns``.

    Uses QR with column pivoting; the numerical rank counts diagonal entries
    of R above ``tol * |R[0, 0]|``. Basis vectors are signed so the matching
    diagonal entries of R are real and positive.
    """
    A = np.asarray(columns)
    if A.ndim == 1:
        A = A[:, None]
    _check_finite(A)
    if A.shape[1] == 0 or not np.any(A):
        raise ZeroSubspace("columns span the zero subspace")
    try:
        Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise DecompositionFailure(str(exc)) from exc
    d = np.abs(np.diag(R))
    rank = int(np.sum(d > tol * d[0]))
    if rank == 0:
        raise ZeroSubspace("numerical rank is zero")
    Q = Q[:, :rank]
    diag = np.diag(R)[:rank]
    phase = diag / np.abs(diag)
    return Q * np.conj(phase)


def subspace_intersection(bases, tol=RANK_TOL):
    """Orthonormal basis of the intersection of several subspaces.

    Each subspace is given by an orthonormal basis. The intersection is the
    null space of the stacked complement projections ``I - U_k U_k^*``;
    a right singular vector counts as null when its singular value is at most
    ``tol``. The result may have zero columns.
    """
    bases = [np.asarray(B) for B in bases]
    if not bases:
        raise DimensionMismatch("need at least one subspace")
    n = bases[0].shape[0]
    if any(B.ndim != 2 or B.shape[0] != n for B in bases):
        raise DimensionMismatch("bases must share one ambient dimension")
    dtype = np.result_type(*bases, np.float64)
    if any(B.shape[1] == 0 for B in bases):
        return np.zeros((n, 0), dtype=dtype)
    eye = np.eye(n, dtype=dtype)
    stacked = np.vstack([eye - B @ adjoint(B) for B in bases])
    _check_finite(stacked)
    try:
        _, s, Vh = np.linalg.svd(stacked, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    sig = np.zeros(n)
    sig[: s.size] = s
    null = sig <= tol
    return adjoint(Vh)[:, null]
