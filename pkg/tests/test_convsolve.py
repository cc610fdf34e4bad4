from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellify import exact
from ellify.convsolve import (GradeMismatchError, convolution_matrix, measured_nullity_M,
                              nullspace_dimension_check, solve_M, solve_NB_eq_Q,
                              stack_high_first, xi_map)
from ellify.minbases import dual_kronecker_pair, is_dual_pair
from ellify.polycore import MatrixPolynomial, random_polynomial

seeds = st.integers(0, 10**6)


def rand(r, c, g, seed, field="Q"):
    return random_polynomial(r, c, g, np.random.default_rng(seed), field)


def test_convolution_matrix_layout():
    Q1 = np.array([[1, 2]], dtype=object)
    Q0 = np.array([[3, 4]], dtype=object)
    Q = MatrixPolynomial([Q0, Q1])
    C = convolution_matrix(Q, 1).matrix
    z = [0, 0]
    assert C.tolist() == [[1, 2] + z, [3, 4, 1, 2], z + [3, 4]]
    assert convolution_matrix(Q, 0).matrix.tolist() == [[1, 2], [3, 4]]
    A = MatrixPolynomial([np.array([[2, 1], [0, 3]], dtype=object)])
    C2 = convolution_matrix(A, 2).matrix
    assert C2.tolist() == np.kron(np.eye(3, dtype=int), [[2, 1], [0, 3]]).tolist()


@given(seeds, st.integers(0, 3), st.integers(0, 3))
def test_convolution_encodes_multiplication(seed, q, b):
    Q = rand(2, 3, q, seed)
    B = rand(3, 2, b, seed + 7)
    lhs = convolution_matrix(Q, b).matrix.dot(stack_high_first(B))
    assert lhs.tolist() == stack_high_first(Q @ B).tolist()


def _scalar_example():
    N = MatrixPolynomial([[[0, 1]], [[1, 0]]])          # [lambda, 1]
    K = MatrixPolynomial([[[-1, 0]], [[0, 1]]])         # [-1, lambda]
    Q = MatrixPolynomial([[[0]], [[1]], [[1]]])         # lambda^2 + lambda
    return N, K, Q


def test_scalar_example_exact_and_min_norm():
    N, K, Q = _scalar_example()
    is_dual_pair(K, N)
    fam = solve_NB_eq_Q(N, K, Q, 1)
    assert fam.nullity == 1
    B = fam.particular
    assert (N @ B).same_polynomial(Q)
    (b0, c0), (b1, c1) = B.coeffs[0][:, 0], B.coeffs[1][:, 0]
    assert b1 == 1 and c0 == 0 and b0 + c1 == 1
    Bf = solve_NB_eq_Q(N.to_float(), K.to_float(), Q.to_float(), 1).particular
    assert np.allclose([Bf.coeffs[0][0, 0], Bf.coeffs[1][1, 0]], [0.5, 0.5])


def test_grade_and_degree_errors():
    N, K, Q = _scalar_example()
    with pytest.raises(GradeMismatchError):
        solve_NB_eq_Q(N, K, Q, 2)
    with pytest.raises(GradeMismatchError):
        solve_NB_eq_Q(N, K, MatrixPolynomial([[[1]]]), 0)


@given(seeds, st.integers(1, 3), st.integers(1, 2), st.integers(1, 2), st.integers(0, 2),
       st.integers(1, 2))
def test_kronecker_solve_exact_residual_and_degree(seed, k, ell, p, extra, r):
    pair, E = dual_kronecker_pair(k, ell, p)
    b = ell + extra
    Q = rand(p, r, k * ell + b, seed)
    fam = solve_NB_eq_Q(E.N, E.K, Q, b, pair)
    assert (E.N @ fam.particular).same_polynomial(Q)
    assert fam.particular.degree() == b
    assert fam.nullity == (b - ell + 1) * E.K.rows * r


@pytest.mark.parametrize("k,ell,p,b", [(2, 1, 1, 1), (2, 1, 1, 3), (1, 2, 2, 2), (3, 1, 2, 2)])
def test_nullity_law_by_exact_rank(k, ell, p, b):
    pair, E = dual_kronecker_pair(k, ell, p)
    assert nullspace_dimension_check(E.N, E.K, b)


def test_nullity_of_Lambda2_example():
    pair, E = dual_kronecker_pair(2, 1, 1)
    C = convolution_matrix(E.N, 1).matrix
    assert C.shape == (4, 6) and C.shape[1] - exact.rank(C) == 2


@given(seeds)
def test_float_min_norm_matches_pseudoinverse(seed):
    pair, E = dual_kronecker_pair(2, 1, 2)
    N, K = E.N.to_float(), E.K.to_float()
    Q = rand(2, 2, 2 + 2, seed, "F64")
    B = solve_NB_eq_Q(N, K, Q, 2).particular
    C = convolution_matrix(N, 2).matrix
    oracle = np.linalg.pinv(C) @ stack_high_first(Q)
    got = stack_high_first(B)
    assert np.linalg.norm(got - oracle) <= 1e-10 * np.linalg.norm(oracle)
    assert np.linalg.norm(C @ got - stack_high_first(Q)) <= 1e-10 * np.linalg.norm(Q.stacked())


def test_solve_M_quartic_example():
    from ellify.golden import quartic_rank_one, quartic_wing
    E = quartic_wing()
    pair = is_dual_pair(E.K, E.N, embedding=E)
    P = quartic_rank_one()
    fam = solve_M(pair, pair, P, 2)
    assert (E.N @ fam.particular @ E.N.T).same_polynomial(P)
    known = MatrixPolynomial.monomial(np.diag([1, 0, 0]).astype(object), 2)
    assert (E.N @ known @ E.N.T).same_polynomial(P)
    assert fam.nullity == measured_nullity_M(E.N, E.N, 2) == 7


@pytest.mark.parametrize("k1,k2,ell,m,n", [(1, 1, 2, 2, 2), (2, 1, 1, 1, 2), (0, 2, 1, 2, 1),
                                           (1, 0, 2, 1, 1), (2, 2, 1, 1, 1)])
def test_solve_M_nullity_law(k1, k2, ell, m, n):
    pair1 = dual_kronecker_pair(k1, ell, n)[0] if k1 else None
    pair2 = dual_kronecker_pair(k2, ell, m)[0] if k2 else None
    P = rand(m, n, ell * (k1 + k2 + 1), 11 * k1 + k2)
    fam = solve_M(pair1, pair2, P, ell)
    N1 = pair1.N if pair1 else MatrixPolynomial.identity(n)
    N2 = pair2.N if pair2 else MatrixPolynomial.identity(m)
    assert (N2 @ fam.particular @ N1.T).same_polynomial(P)
    assert fam.particular.degree() == ell
    m1, m2, e1 = k1 * n, k2 * m, k1 * ell
    assert fam.nullity == m2 * n * (e1 + 1) + (m2 + m) * m1
    assert fam.nullity == measured_nullity_M(N1, N2, ell)


def test_solve_M_parametrization_is_complete_for_pencils():
    # ell = 1: the slots (X, Y) sweep the entire solution set
    pair1, _ = dual_kronecker_pair(2, 1, 1)
    pair2, _ = dual_kronecker_pair(1, 1, 2)
    P = rand(2, 1, 4, 5)
    fam = solve_M(pair1, pair2, P, 1)
    base = fam.particular.stacked().flatten()
    cols = []
    xr, xc = fam.x_shape
    for t in range(fam.x_grade + 1):
        for i in range(xr):
            for j in range(xc):
                E = np.zeros((xr, xc), dtype=object)
                E[i, j] = 1
                X = MatrixPolynomial.monomial(E, t, grade=fam.x_grade)
                M = fam.member(X=X)
                assert (pair2.N @ M @ pair1.N.T).same_polynomial(P)
                cols.append(M.stacked().flatten() - base)
    yr, yc = fam.y_shape
    for i in range(yr):
        for j in range(yc):
            E = np.zeros((yr, yc), dtype=object)
            E[i, j] = 1
            M = fam.member(Y=E)
            assert (pair2.N @ M @ pair1.N.T).same_polynomial(P)
            cols.append(M.stacked().flatten() - base)
    assert exact.rank(np.column_stack(cols)) == fam.nullity


def test_solve_M_rejects_bad_grade():
    pair1, _ = dual_kronecker_pair(1, 1, 1)
    with pytest.raises(GradeMismatchError):
        solve_M(pair1, None, rand(1, 1, 4, 0), 1)


def test_xi_map_of_example_block():
    # M = [[l^2 P6 + l P5, l P3 + P2], [l^2 P4, l P1 + P0]] with scalar P_i = i + 1
    c = [Fraction(i + 1) for i in range(7)]
    M = MatrixPolynomial([
        [[0, c[2]], [0, c[0]]],
        [[c[5], c[3]], [0, c[1]]],
        [[c[6], 0], [c[4], 0]],
    ])
    out = xi_map(M, 1, 1, 2, 1, 1)
    assert out.grade == 6 and out.entry(0, 0) == tuple(c)
    assert xi_map(MatrixPolynomial.zeros(2, 2, 2), 1, 1, 2, 1, 1).is_zero()
    with pytest.raises(ValueError):
        xi_map(M, 2, 1, 2, 1, 1)
