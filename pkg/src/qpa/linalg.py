"""Dense Hermitian linear algebra at desk scale.

Two eigensolvers are available behind :func:`eig_hermitian`: LAPACK (through
numpy, the default) and a cyclic complex Jacobi sweep written here.  The
Jacobi solver needs nothing beyond elementwise numpy and serves as an
independent cross-check of the LAPACK path.
"""

import numpy as np

from .errors import DimensionOverflow, NoConvergence, NotHermitian

DIM_CAP = 4096
HERM_TOL = 1e-12
RANK_TOL = 1e-9
JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-14


def as_matrix(A):
    """Return ``A`` as a 2-d complex array, rejecting NaN/Inf entries."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2:
        raise ValueError("expected a 2-d matrix, got shape %r" % (M.shape,))
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def hermitian_defect(A):
    """Largest entrywise deviation ``|A[i,j] - conj(A[j,i])|``."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A - A.conj().swapaxes(-1, -2))))


def check_hermitian(A, tol=HERM_TOL):
    """Validate and return ``A`` as a complex Hermitian matrix.

    The tolerance is relative to the largest entry magnitude.
    """
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise NotHermitian("matrix is not square: %r" % (M.shape,))
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    defect = hermitian_defect(M)
    if defect > tol * max(scale, 1e-300):
        raise NotHermitian("hermitian defect %.3e exceeds %.1e * %.3e" % (defect, tol, scale))
    return M


def jacobi_eigh(A, max_sweeps=JACOBI_MAX_SWEEPS, tol=JACOBI_TOL):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot ``A[p, q]`` and then
    applies the classic real 2x2 rotation.  Sweeps stop once the off-diagonal
    Frobenius norm falls below ``tol * ||A||_F``.

    Returns
    -------
    (w, V) : eigenvalues in ascending order and the unitary of eigenvectors,
        with ``A = V diag(w) V^H``.
    """
    A = check_hermitian(A).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    norm = np.linalg.norm(A)
    if n == 1 or norm == 0.0:
        return np.real(np.diag(A)).copy(), V
    threshold = tol * norm

    def off_norm(M):
        return np.linalg.norm(M - np.diag(np.diag(M)))

    for _ in range(max_sweeps):
        if off_norm(A) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                mag = abs(b)
                if mag <= 1e-300 or mag <= threshold * 1e-3 / n:
                    continue
                phase = b / mag
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                U = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ U
                A[idx, :] = U.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ U
        # guard against drift of the symmetric part
        A = 0.5 * (A + A.conj().T)
    else:
        if off_norm(A) > threshold:
            raise NoConvergence("Jacobi did not converge in %d sweeps" % max_sweeps)
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def eig_hermitian(A, method="lapack"):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    A : array_like
        Square Hermitian matrix.
    method : {"lapack", "jacobi"}
        Backend.  Both return the same contract.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Eigenvalues sorted descending and the unitary whose columns are the
        matching eigenvectors.
    """
    M = check_hermitian(A)
    if method == "lapack":
        w, V = np.linalg.eigh(M)
    elif method == "jacobi":
        w, V = jacobi_eigh(M)
    else:
        raise ValueError("unknown eigensolver %r" % (method,))
    return w[::-1].copy(), V[:, ::-1].copy()


def eigvalsh(A, method="lapack"):
    """Eigenvalues of a Hermitian matrix, descending."""
    if method == "lapack":
        return np.linalg.eigvalsh(check_hermitian(A))[::-1].copy()
    return eig_hermitian(A, method=method)[0]


def eigvalsh_batch(stack):
    """Eigenvalues (ascending) of a stack of Hermitian matrices, shape (..., d, d).

    No validation: callers build the stack from validated operators.
    """
    stack = np.asarray(stack)
    if stack.shape[-1] == 1:
        return np.real(stack[..., 0])
    return np.linalg.eigvalsh(stack)


def kron(A, B, cap=DIM_CAP):
    """Kronecker product with a cap on the result dimension."""
    A = as_matrix(A)
    B = as_matrix(B)
    rows = A.shape[0] * B.shape[0]
    cols = A.shape[1] * B.shape[1]
    if max(rows, cols) > cap:
        raise DimensionOverflow("kron result %dx%d exceeds cap %d" % (rows, cols, cap))
    return np.kron(A, B)


def trace_norm(A, method="lapack"):
    """``tr|A|`` for Hermitian ``A``: the sum of absolute eigenvalues."""
    return float(np.sum(np.abs(eigvalsh(A, method=method))))


def rank(A, rel_tol=RANK_TOL):
    """Numerical rank: eigenvalues of ``|A|`` above ``rel_tol * max|lambda|``."""
    w = np.abs(eigvalsh(A))
    if w.size == 0 or w.max() == 0.0:
        return 0
    return int(np.count_nonzero(w > rel_tol * w.max()))


def random_hermitian(rng, dim, scale=1.0):
    """Random complex Hermitian matrix with Gaussian entries."""
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (G + G.conj().T)


def random_unitary(rng, dim):
    """Haar-random unitary (QR of a Ginibre matrix with phase fix)."""
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def hermitian_with_rank(rng, dim, r):
    """Random Hermitian matrix of exact rank ``r``, built as ``V diag(lam) V^H``.

    The zero eigenvalues are explicit, so the rank does not depend on any
    numerical threshold.
    """
    lam = np.zeros(dim)
    mags = rng.uniform(0.1, 1.0, size=r)
    signs = rng.choice([-1.0, 1.0], size=r)
    lam[:r] = mags * signs
    V = random_unitary(rng, dim)
    return (V * lam) @ V.conj().T
