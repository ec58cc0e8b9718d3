"""Cyclic Jacobi eigenvalues for small Hermitian matrices."""
import numpy as np


def _check_hermitian(A, tol):
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(A - A.conj().T), initial=0.0) > tol * scale:
        raise ValueError("matrix is not Hermitian")


def jacobi_eigenvalues(A, tol=1e-12, max_sweeps=60):
    """Eigenvalues (ascending) of a Hermitian matrix by cyclic Jacobi sweeps.

    Each pivot (p, q) is first made real by a diagonal phase, then annihilated
    by a real plane rotation.  Sweeps stop when the off-diagonal Frobenius
    norm falls below tol times the full norm.
    """
    A = np.array(A, dtype=np.complex128)
    _check_hermitian(A, 1e-12)
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    total = np.linalg.norm(A)
    if n == 1 or total == 0.0:
        return np.sort(A.diagonal().real)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(A.diagonal()))
        if off <= tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app, aqq = A[p, p].real, A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                U = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ U
                A[idx, :] = U.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    return np.sort(A.diagonal().real)


def min_eigenvalue(G, tol=1e-12):
    return float(jacobi_eigenvalues(G, tol)[0])
