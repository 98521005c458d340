"""
Dense complex linear algebra for the small (dim <= 64) operators used here.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
Nothing in this module mutates its inputs.
"""

from __future__ import annotations

from functools import reduce
from typing import Callable, NamedTuple

import numpy as np

from .errors import NotHermitian, NotPsd

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
SUPPORT_CUTOFF = 1e-12


class EigDecomposition(NamedTuple):
    """Eigenvalues in ascending order and the matching orthonormal eigenvectors.

    ``eigenvectors[:, k]`` belongs to ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    return np.asarray(m, dtype=complex)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the left (most significant) factor."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(*factors) -> np.ndarray:
    if not factors:
        raise ValueError("tensor_all needs at least one factor")
    return reduce(tensor, factors)


def outer(ket: np.ndarray, bra: np.ndarray | None = None) -> np.ndarray:
    """|ket><bra|; ``bra`` defaults to ``ket``."""
    ket = np.asarray(ket, dtype=complex)
    bra = ket if bra is None else np.asarray(bra, dtype=complex)
    return np.outer(ket, bra.conj())


def hermiticity_error(m: np.ndarray) -> float:
    m = as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return float("inf")
    return float(np.max(np.abs(m - dagger(m)), initial=0.0))


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {m.shape}")
    err = hermiticity_error(m)
    if err > tol:
        raise NotHermitian(f"matrix is not Hermitian (max |M - M^H| = {err:.3e})")
    return m


def _canonical_phase(vectors: np.ndarray) -> np.ndarray:
    # first non-negligible component of each column made real positive
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size:
            z = col[idx[0]]
            out[:, k] = col * (abs(z) / z)
    return out


def hermitian_eig(m) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned in ascending order. Each eigenvector is phase
    fixed so that its first non-negligible component is real and positive,
    which makes the output reproducible between calls.

    Raises
    ------
    NotHermitian
        If ``m`` is not square or deviates from its adjoint by more than 1e-10.
    """
    m = check_hermitian(m)
    evals, evecs = np.linalg.eigh(0.5 * (m + dagger(m)))
    return EigDecomposition(evals, _canonical_phase(evecs))


def eigvalsh(m) -> np.ndarray:
    m = check_hermitian(m)
    return np.linalg.eigvalsh(0.5 * (m + dagger(m)))


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvalsh(m))))


def psd_apply(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    cutoff: float = SUPPORT_CUTOFF,
) -> np.ndarray:
    """Apply ``f`` to a PSD matrix through its spectrum.

    ``f`` is evaluated only on eigenvalues above ``cutoff``; the rest of the
    spectrum maps to zero, so ``f = x**-0.5`` yields the pseudo-inverse square
    root on the support. Small negative round-off eigenvalues are clamped.

    Raises
    ------
    NotPsd
        If an eigenvalue is below -1e-10.
    """
    evals, evecs = hermitian_eig(m)
    if evals.size and evals[0] < -PSD_TOL:
        raise NotPsd(f"matrix has eigenvalue {evals[0]:.3e} < -{PSD_TOL}")
    evals = np.clip(evals, 0.0, None)
    on_support = evals > cutoff
    fvals = np.zeros_like(evals)
    if np.any(on_support):
        fvals[on_support] = f(evals[on_support])
    return (evecs * fvals) @ dagger(evecs)


def min_eigenvalue(m) -> float:
    return float(eigvalsh(m)[0])


def is_psd(m, tol: float = PSD_TOL) -> bool:
    return min_eigenvalue(m) >= -tol


def support_projector(m, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    return psd_apply(m, np.ones_like, cutoff)


def orthonormal_basis(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Columns spanning the same space as the columns of ``vectors``."""
    u, s, _ = np.linalg.svd(np.asarray(vectors, dtype=complex), full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return u[:, :rank]
