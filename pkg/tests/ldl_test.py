"""
Tests of the instrumented LDL^H path and its multiplication counts.

Licensed under the MIT License
Written by Jean Da Rolt
"""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from tests.scenarios import random_hermitian_pd
from xlmimo.functions import ldl
from xlmimo.models.deterministic import complexity_count
from xlmimo.utils.exceptions import SolveFailure


def test_factorization_reconstructs():
    A = random_hermitian_pd(np.random.default_rng(0), 6)  # pylint: disable=C0103
    lower, d = ldl.ldl_factorize(A)
    np.testing.assert_allclose(np.diag(lower), 1.)
    np.testing.assert_allclose(np.triu(lower, 1), 0.)
    assert np.all(d > 0)
    np.testing.assert_allclose(lower @ np.diag(d) @ lower.conj().T, A,
                               atol=1e-10)


def test_nonpositive_pivot():
    with pytest.raises(SolveFailure, match='pivot'):
        ldl.ldl_factorize(np.diag([1., -1.]).astype(complex))


def test_solves():
    rng = np.random.default_rng(1)
    A = random_hermitian_pd(rng, 5)  # pylint: disable=C0103
    B = random_hermitian_pd(rng, 5)  # pylint: disable=C0103
    lower, d = ldl.ldl_factorize(A)
    Y = ldl.forward_solve(lower, B)  # pylint: disable=C0103
    np.testing.assert_allclose(lower @ Y, B, atol=1e-10)
    Z = ldl.diagonal_solve(d, Y)  # pylint: disable=C0103
    np.testing.assert_allclose(np.diag(d) @ Z, Y, atol=1e-10)
    diagonal = ldl.partial_back_solve_diag(lower, Z)
    np.testing.assert_allclose(diagonal, np.diag(np.linalg.solve(A, B)),
                               atol=1e-10)


@pytest.mark.parametrize('n', [1, 2, 7])
def test_trace_paths_agree(n):
    rng = np.random.default_rng(n)
    A = random_hermitian_pd(rng, n)  # pylint: disable=C0103
    B = random_hermitian_pd(rng, n)  # pylint: disable=C0103
    expected = np.real(np.trace(np.linalg.solve(A, B)))
    counter = ldl.MultiplicationCounter()
    assert ldl.trace_inv_product(A, B) == pytest.approx(expected)
    assert ldl.trace_inv_product(A, B, counter) == pytest.approx(expected)


@given(st.integers(min_value=1, max_value=10))
def test_stage_counts(n):
    rng = np.random.default_rng(n)
    A = random_hermitian_pd(rng, n)  # pylint: disable=C0103
    counter = ldl.MultiplicationCounter()
    ldl.trace_inv_product(A, np.eye(n, dtype=complex), counter)
    assert counter.stages['factorization'] == n ** 3 - n
    assert 2 * counter.stages['forward'] == 3 * (n ** 3 - n ** 2)
    assert counter.stages['diagonal'] == 2 * n ** 2
    assert 2 * counter.stages['back'] == n ** 3 - n
    assert counter.total == \
        complexity_count('ergodic', 'centralized', n, 1, 1)


def test_counter_accumulates_and_resets():
    counter = ldl.MultiplicationCounter()
    A = random_hermitian_pd(np.random.default_rng(2), 3)  # pylint: disable=C0103
    ldl.trace_inv_product(A, A, counter)
    once = counter.total
    ldl.trace_inv_product(A, A, counter)
    assert counter.total == 2 * once
    assert 'total' in str(counter)
    counter.reset()
    assert counter.total == 0
