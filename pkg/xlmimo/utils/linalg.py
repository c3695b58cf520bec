"""Hermitian linear algebra helpers shared by the numerical models."""
import numpy as np
import scipy.linalg

from xlmimo.utils.exceptions import IndefiniteCovariance, SolveFailure


PSD_TOLERANCE = 1e-10


def hermitian_part(matrix):
    return (matrix + np.swapaxes(matrix, -1, -2).conj()) / 2


def psd_sqrt(matrix, tolerance=PSD_TOLERANCE):
    """Symmetric square root of a Hermitian PSD matrix.

    Eigenvalues slightly below zero (above -tolerance * eigmax) are clamped.

    Args:
        matrix: (N, N) Hermitian matrix.
        tolerance: relative tolerance on negative eigenvalues.

    Returns:
        (N, N) Hermitian matrix S with S @ S = matrix.
    """
    eigvals, eigvecs = np.linalg.eigh(hermitian_part(matrix))
    max_eig = eigvals[-1] if eigvals.size else 0.
    if eigvals.size and eigvals[0] < -tolerance * max(max_eig, 0.):
        raise IndefiniteCovariance(eigvals[0], max_eig)
    eigvals = np.clip(eigvals, 0., None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T


def hermitian_factor(matrix):
    """Cholesky factorization of a Hermitian positive definite matrix."""
    try:
        return scipy.linalg.cho_factor(matrix, lower=True,
                                       check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as err:
        raise SolveFailure(str(err)) from err


def factored_solve(factor, rhs):
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def hermitian_solve(matrix, rhs):
    """Solves matrix @ x = rhs for a Hermitian positive definite matrix."""
    return factored_solve(hermitian_factor(matrix), rhs)


def block_diag(blocks):
    """Block-diagonal matrix from a sequence of square blocks."""
    if len(blocks) == 0:
        return np.zeros((0, 0), dtype=complex)
    return scipy.linalg.block_diag(*blocks)
