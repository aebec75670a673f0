from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qjordan.fp_linalg import (
    ConfigurationError,
    DimensionError,
    FpMatrix,
    RowReducer,
    append_and_reduce,
    as_fraction,
    check_prime,
    inverse_mod,
    is_prime,
    matmul_mod,
    nullspace_basis,
    rank,
    rcf,
    recognize_rational,
    symmetric_lift,
)

PRIMES = [3, 7, 101, 103, 1009]


def division_free_rank_mod(rows: list[list[int]], p: int) -> int:
    """Division-free (cross-multiplying) elimination; independent of the library kernels."""
    a = [[x % p for x in r] for r in rows]
    n_rows, n_cols = len(a), len(a[0]) if a else 0
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, n_rows):
            a[i] = [(a[r][c] * a[i][j] - a[i][c] * a[r][j]) for j in range(n_cols)]
            a[i] = [x % p for x in a[i]]
        r += 1
    return r


def bareiss_rank(rows: list[list[int]]) -> int:
    """Fraction-free Bareiss elimination over the integers: the rank over Q."""
    a = [list(r) for r in rows]
    n_rows, n_cols = len(a), len(a[0])
    r, prev = 0, 1
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, n_rows):
            a[i] = [(a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev for j in range(n_cols)]
        prev = a[r][c]
        r += 1
    return r


def python_rref(rows: list[list[int]], p: int) -> list[list[int]]:
    a = [[x % p for x in r] for r in rows]
    r = 0
    n_cols = len(a[0]) if a else 0
    for c in range(n_cols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
    return a[:r]


matrices = st.integers(1, 9).flatmap(
    lambda r: st.integers(1, 9).flatmap(
        lambda c: st.lists(st.lists(st.integers(-5, 5), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("p", [0, 1, 2, 4, 100, -7, 2**61 - 1])
def test_check_prime_rejects(p):
    with pytest.raises(ConfigurationError):
        check_prime(p)


@settings(max_examples=150, deadline=None)
@given(matrices, st.sampled_from(PRIMES))
def test_rank_matches_division_free_oracle(rows, p):
    assert rank(FpMatrix.from_rows(rows, p)) == division_free_rank_mod(rows, p)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_rank_large_prime_matches_integer_rank(rows):
    # a nonzero minor is divisible by a prime this large with negligible probability
    assert rank(FpMatrix.from_rows(rows, 1_000_003)) == bareiss_rank(rows)


@settings(max_examples=150, deadline=None)
@given(matrices, st.sampled_from(PRIMES))
def test_rcf_matches_reference(rows, p):
    reduced, r, pivots = rcf(FpMatrix.from_rows(rows, p))
    ref = python_rref(rows, p)
    assert r == len(ref)
    assert reduced.entries[:r].tolist() == ref
    assert not reduced.entries[r:].any()
    for i, c in enumerate(pivots):
        col = reduced.entries[:r, c]
        assert col[i] == 1 and np.count_nonzero(col) == 1


@settings(max_examples=100, deadline=None)
@given(matrices, st.sampled_from(PRIMES))
def test_rcf_idempotent(rows, p):
    once = rcf(FpMatrix.from_rows(rows, p))[0]
    assert rcf(once)[0] == once


@settings(max_examples=100, deadline=None)
@given(matrices, st.sampled_from(PRIMES))
def test_nullspace(rows, p):
    m = FpMatrix.from_rows(rows, p)
    basis = nullspace_basis(m)
    assert len(basis) == m.n_cols - rank(m)
    for v in basis:
        assert not (m.entries @ v % p).any()


@settings(max_examples=100, deadline=None)
@given(matrices, matrices, st.sampled_from(PRIMES))
def test_incremental_matches_batch(a, b, p):
    if len(a[0]) != len(b[0]):
        b = [r[: len(a[0])] + [0] * (len(a[0]) - len(r)) for r in b]
    state, r1 = append_and_reduce(rcf(FpMatrix.from_rows(a, p))[0], np.array(b))
    full, r2, _ = rcf(FpMatrix.from_rows(a + b, p))
    assert r1 == r2
    assert state.entries.tolist() == full.entries[:r2].tolist()


def test_row_reducer_add_and_residual():
    p = 101
    red = RowReducer(4, p)
    assert red.add([[1, 2, 3, 4], [2, 4, 6, 8]]) == 1
    assert red.contains([3, 6, 9, 12])
    assert not red.contains([0, 0, 0, 1])
    assert red.residual([0, 1, 0, 0]).tolist() == [[0, 1, 0, 0]]
    assert red.add(sp.csr_matrix(np.array([[0, 0, 1, 0]]))) == 1
    assert red.rank == 2 and red.pivots == [0, 2]
    with pytest.raises(DimensionError):
        red.add([[1, 2, 3]])


@pytest.mark.parametrize("p", [101, 1009])
def test_matmul_mod_exact_long_inner_dimension(p):
    rng = np.random.default_rng(1)
    a = rng.integers(0, p, (7, 5000))
    b = rng.integers(0, p, (5000, 6))
    expected = (a.astype(object) @ b.astype(object)) % p
    assert (matmul_mod(a, b, p) == expected.astype(np.int64)).all()


def test_fp_matrix_ops():
    p = 7
    a = FpMatrix.from_rows([[1, 2], [3, 4]], p)
    assert (a @ FpMatrix.identity(2, p)) == a
    with pytest.raises(DimensionError):
        a @ FpMatrix.zeros(3, 1, p)
    assert FpMatrix.from_tsv(a.to_tsv()) == a
    assert FpMatrix.from_rows([[-1]], p).entries[0, 0] == 6


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6), st.sampled_from(PRIMES))
def test_inverse(n, seed, p):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, (n, n))
    if division_free_rank_mod(a.tolist(), p) < n:
        with pytest.raises(ValueError):
            inverse_mod(a, p)
    else:
        assert (matmul_mod(a, inverse_mod(a, p), p) == np.eye(n, dtype=np.int64)).all()


def test_symmetric_lift_and_rational_recognition():
    assert [symmetric_lift(r, 7) for r in range(7)] == [0, 1, 2, 3, -3, -2, -1]
    p = 101
    for frac in [Fraction(1, 2), Fraction(-3, 4), Fraction(5, 3), Fraction(-7)]:
        r = frac.numerator * pow(frac.denominator, -1, p) % p
        assert as_fraction(r, p, 10, 4) == frac
    assert recognize_rational(50, 101, 3, 1) is None
