from fractions import Fraction

import numpy as np
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import invariant_factors

import oracles

from orientifold.intlinalg import gf2_form, kernel_basis, rank_rational, smith_form, solve_mod_integers, sparse_rank_rational

matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m))
)


def _sympy_factors(A):
    return [abs(int(f)) for f in invariant_factors(sympy.Matrix(A)) if f != 0]


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_smith_form_matches_sympy(rows):
    A = np.array(rows, dtype=np.int64)
    snf = smith_form(A)
    assert snf.diag == _sympy_factors(rows)
    S = snf.L @ A @ snf.R
    D = np.zeros_like(S)
    for i, d in enumerate(snf.diag):
        D[i, i] = d
    assert np.array_equal(S, D)
    assert np.array_equal(snf.L @ snf.Linv, np.eye(A.shape[0], dtype=np.int64))
    assert np.array_equal(snf.R @ snf.Rinv, np.eye(A.shape[1], dtype=np.int64))
    assert all(b % a == 0 for a, b in zip(snf.diag, snf.diag[1:]))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_right_only_transforms(rows):
    A = np.array(rows, dtype=np.int64)
    full, right = smith_form(A), smith_form(A, transforms="right")
    assert right.diag == full.diag and right.L is None
    assert np.array_equal(right.R @ right.Rinv, np.eye(A.shape[1], dtype=np.int64))


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_ranks(rows):
    A = np.array(rows, dtype=np.int64)
    r = sympy.Matrix(rows).rank()
    assert rank_rational(A) == r
    assert sparse_rank_rational([{j: v for j, v in enumerate(row) if v} for row in rows]) == r
    f = gf2_form(A)
    assert f.rank == oracles.rank_mod2(A)
    D = (f.L.astype(np.int64) @ (A % 2) @ f.R.astype(np.int64)) % 2
    expect = np.zeros_like(D)
    for i in range(f.rank):
        expect[i, i] = 1
    assert np.array_equal(D, expect)


def test_gf2_rank_known():
    A = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert gf2_form(A).rank == 2
    assert rank_rational(A) == 3


def test_large_entries_promote_to_python_ints():
    A = np.array([[2**40, 3], [5, 2**41 + 1]], dtype=object)
    snf = smith_form(A)
    assert snf.diag == _sympy_factors(A.tolist())


def test_large_sparse_rank_uses_modular_path():
    rng = np.random.default_rng(0)
    A = rng.integers(-2, 3, size=(250, 200))
    A[:, 150:] = A[:, :50] * 2 - A[:, 50:100]
    assert rank_rational(A) == 150


@settings(max_examples=80, deadline=None)
@given(matrices, st.data())
def test_solve_mod_integers(rows, data):
    A = np.array(rows, dtype=np.int64)
    m, n = A.shape
    snf = smith_form(A)
    u0 = [Fraction(data.draw(st.integers(0, 7)), 8) for _ in range(n)]
    noise = [data.draw(st.integers(-2, 2)) for _ in range(m)]
    c = [sum(int(A[i, j]) * u0[j] for j in range(n)) + noise[i] for i in range(m)]
    u = solve_mod_integers(snf, c)
    assert u is not None
    assert all((sum(int(A[i, j]) * u[j] for j in range(n)) - c[i]).denominator == 1 for i in range(m))


def test_solve_mod_integers_detects_impossible():
    A = np.array([[2], [0]])
    assert solve_mod_integers(smith_form(A), [Fraction(0), Fraction(1, 2)]) is None


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_basis(rows):
    A = np.array(rows, dtype=np.int64)
    K = kernel_basis(A)
    assert K.shape[1] == A.shape[1] - sympy.Matrix(rows).rank()
    assert not (A @ K).any()
