"""
Instrumented LDL^H path used to evaluate tr(A^-1 B) for Hermitian positive
definite A, with counts of real multiplications.

A complex multiplication counts as three real multiplications and the
division of a complex number by a real pivot as two. For an N x N system
with N right-hand sides the stages cost:

    factorization           N^3 - N
    forward solves          3/2 (N^3 - N^2)
    diagonal solves         2 N^2
    partial back solves     1/2 (N^3 - N)

which add up to 3 N^3 + 1/2 N^2 - 3/2 N.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np
import scipy.linalg

from xlmimo.utils.exceptions import SolveFailure
from xlmimo.utils.linalg import factored_solve, hermitian_factor


REAL_PER_COMPLEX_MULT = 3
REAL_PER_REAL_DIVISION = 2
STAGES = ('factorization', 'forward', 'diagonal', 'back')


class MultiplicationCounter():
    """Real multiplications accumulated per stage."""
    def __init__(self):
        self.stages = {stage: 0 for stage in STAGES}

    def add(self, stage, count):
        self.stages[stage] += int(count)

    @property
    def total(self):
        return sum(self.stages.values())

    def reset(self):
        for stage in STAGES:
            self.stages[stage] = 0

    def __str__(self):
        return ', '.join(f"{stage}: {count}"
                         for stage, count in self.stages.items()) + \
            f", total: {self.total}"


def ldl_factorize(A, counter=None):  # pylint: disable=C0103
    """A = L D L^H with unit lower triangular L and positive diagonal D.

    Args:
        A: (N, N) Hermitian positive definite matrix.
        counter: optional MultiplicationCounter.

    Returns:
        (L, d) with d the (N,) real diagonal of D.
    """
    N = A.shape[0]  # pylint: disable=C0103
    lower = np.eye(N, dtype=complex)
    d = np.zeros(N)
    for j in range(N):
        # each of the j terms l_ik d_k conj(l_jk) takes two complex products
        weighted = d[:j] * lower[j, :j].conj()
        d[j] = np.real(A[j, j] - lower[j, :j] @ weighted)
        if not d[j] > 0:
            raise SolveFailure(f"nonpositive pivot {d[j]:.3e} at {j}")
        lower[j + 1:, j] = (A[j + 1:, j] - lower[j + 1:, :j] @ weighted) / d[j]
        if counter is not None:
            counter.add('factorization',
                        2 * REAL_PER_COMPLEX_MULT * j * (N - j))
    return lower, d


def forward_solve(lower, B, counter=None):  # pylint: disable=C0103
    """Solves L Y = B for unit lower triangular L."""
    N = lower.shape[0]  # pylint: disable=C0103
    Y = scipy.linalg.solve_triangular(lower, B, lower=True,  # pylint: disable=C0103
                                      unit_diagonal=True, check_finite=False)
    if counter is not None:
        columns = B.shape[1] if B.ndim > 1 else 1
        counter.add('forward',
                    REAL_PER_COMPLEX_MULT * columns * N * (N - 1) // 2)
    return Y


def diagonal_solve(d, Y, counter=None):  # pylint: disable=C0103
    """Solves D Z = Y for real diagonal D."""
    Z = Y / (d[:, None] if Y.ndim > 1 else d)  # pylint: disable=C0103
    if counter is not None:
        counter.add('diagonal', REAL_PER_REAL_DIVISION * Y.size)
    return Z


def partial_back_solve_diag(lower, Z, counter=None):  # pylint: disable=C0103
    """Diagonal of X where L^H X = Z.

    Column c only needs rows N-1 down to c, the rows above are never
    computed.
    """
    N = lower.shape[0]  # pylint: disable=C0103
    diagonal = np.zeros(N, dtype=complex)
    x = np.zeros(N, dtype=complex)
    for c in range(N):
        for i in range(N - 1, c - 1, -1):
            x[i] = Z[i, c] - lower[i + 1:, i].conj() @ x[i + 1:]
        diagonal[c] = x[c]
        if counter is not None:
            counter.add('back', REAL_PER_COMPLEX_MULT *
                        (N - c) * (N - c - 1) // 2)
    return diagonal


def trace_inv_product(A, B, counter=None):  # pylint: disable=C0103
    """tr(A^-1 B) for Hermitian positive definite A.

    Without a counter a Cholesky factorization is used, with a counter the
    instrumented LDL^H path.
    """
    if counter is None:
        return float(np.real(np.trace(factored_solve(hermitian_factor(A), B))))
    lower, d = ldl_factorize(A, counter)
    Z = diagonal_solve(d, forward_solve(lower, B, counter), counter)  # pylint: disable=C0103
    return float(np.real(np.sum(partial_back_solve_diag(lower, Z, counter))))
