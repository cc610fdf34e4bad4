from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellify import golden
from ellify.constructors import block_kronecker_companion, frobenius_companion
from ellify.polycore import MatrixPolynomial, evaluate, hstack, random_polynomial
from ellify.recovery import (NotNullVectorError, PartitionError, RecoveryContext,
                             extract_minimal_basis_kronecker, kronecker_one_sided_residuals,
                             lift_left_null_vector, lift_right_null_vector,
                             minimal_indices_of, one_sided_residuals,
                             recover_eigenvector, recover_minimal_basis_general,
                             right_minimal_basis, left_minimal_basis,
                             shift_minimal_indices)
from ellify.verify import polynomial_eigenvalues

from conftest import singular_instance

seeds = st.integers(0, 10**6)


def rand(r, c, g, seed, field="Q"):
    return random_polynomial(r, c, g, np.random.default_rng(seed), field)


def as_matrix(cols):
    g = max(c.grade for c in cols)
    return hstack([c.with_grade(g) for c in cols])


def test_quartic_indices_and_shift():
    sb = golden.symmetric_quartic_quadratification()
    P = golden.quartic_rank_one()
    ctx = RecoveryContext.from_sbmb(sb)
    ip, il = minimal_indices_of(P), minimal_indices_of(sb.L)
    assert ip.right_minimal_indices == [0] and ip.left_minimal_indices == [0]
    assert il.right_minimal_indices == [1] and il.left_minimal_indices == [1]
    assert shift_minimal_indices([0], ctx, "right") == [1]
    assert shift_minimal_indices([1], ctx, "left", inverse=True) == [0]
    with pytest.raises(ValueError):
        shift_minimal_indices([0], ctx, "right", inverse=True)


def test_row_vector_minimal_index():
    P = MatrixPolynomial([[[0, 0]], [[1, 0]], [[0, 1]]])      # [lambda, lambda^2]
    info = minimal_indices_of(P)
    assert info.right_minimal_indices == [1] and info.left_minimal_indices == []
    R = right_minimal_basis(P)
    assert (P @ R).is_zero() and R.degree() == 1


def test_regular_polynomial_has_no_indices():
    P = MatrixPolynomial([[[1, 0], [0, 2]], [[0, 1], [1, 0]]])
    info = minimal_indices_of(P)
    assert info.right_minimal_indices == [] and info.left_minimal_indices == []
    assert info.normal_rank == 2


def test_quartic_lift_and_recover():
    sb = golden.symmetric_quartic_quadratification()
    h = MatrixPolynomial([[[0], [1]]])
    z = lift_right_null_vector(h, sb)
    assert (sb.L @ z).is_zero()
    assert [z.entry(i, 0) for i in range(4)] == [(), (0, 1), (1,), ()]
    assert recover_minimal_basis_general(z, sb).same_polynomial(h)
    with pytest.raises(NotNullVectorError):
        lift_right_null_vector(MatrixPolynomial([[[1], [0]]]), sb)
    with pytest.raises(NotNullVectorError):
        lift_right_null_vector(MatrixPolynomial([[[0], [0]]]), sb)


def test_quartic_at_grade6_under_kronecker_quadratification():
    P = golden.quartic_rank_one().with_grade(6)
    bk = block_kronecker_companion(P, 1, 1, 2)
    ctx = RecoveryContext.from_sbmb(bk)
    R = right_minimal_basis(bk.L)
    assert R.cols == 1 and R.degree() == 2
    out = extract_minimal_basis_kronecker([R], ctx, "right", certify=True, P=P)
    assert out[0].same_polynomial(MatrixPolynomial([[[0], [1]]]))
    assert minimal_indices_of(bk.L).right_minimal_indices == [2]
    assert extract_minimal_basis_kronecker([], ctx, "right") == []


def test_partition_mismatch():
    ctx = RecoveryContext.kronecker(1, 0, 2, 2, 3)
    with pytest.raises(PartitionError):
        extract_minimal_basis_kronecker([MatrixPolynomial.zeros(4, 1, 1)], ctx, "right")


@pytest.mark.parametrize("seed", range(6))
def test_shift_law_and_round_trip(seed):
    rng = np.random.default_rng(100 + seed)
    m, n = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    if m == n == 1:
        n = 2
    d = int(rng.choice([2, 4, 6]))
    ell = int(rng.choice([l for l in (1, 2) if d % l == 0 and d // l >= 2]))
    k = d // ell
    eps = int(rng.integers(0, k))
    P = singular_instance(seed, m, n, d)
    bk = block_kronecker_companion(P, eps, k - 1 - eps, ell)
    ctx = RecoveryContext.from_sbmb(bk)
    iP, iL = minimal_indices_of(P), minimal_indices_of(bk.L)
    assert iL.right_minimal_indices == shift_minimal_indices(iP.right_minimal_indices, ctx, "right")
    assert iL.left_minimal_indices == shift_minimal_indices(iP.left_minimal_indices, ctx, "left")
    RP = right_minimal_basis(P)
    if RP is not None:
        z = lift_right_null_vector(RP, bk)
        assert (bk.L @ z).is_zero()
        assert z.degree() == RP.degree() + eps * ell
        back = as_matrix(extract_minimal_basis_kronecker(z, ctx, "right", certify=True, P=P))
        assert back.same_polynomial(RP)
    LP = left_minimal_basis(P)
    if LP is not None:
        w = lift_left_null_vector(LP.T, bk)
        assert (w.T @ bk.L).is_zero()
        back = as_matrix(extract_minimal_basis_kronecker(w, ctx, "left", certify=True, P=P))
        assert back.same_polynomial(LP.T)


def test_general_recovery_matches_kronecker_selection():
    P = singular_instance(7, 2, 3, 4)
    bk = block_kronecker_companion(P, 1, 0, 2)
    R = right_minimal_basis(bk.L)
    sb = bk.to_sbmb()
    a = recover_minimal_basis_general(R, sb)
    b = as_matrix(extract_minimal_basis_kronecker(R, RecoveryContext.from_sbmb(bk), "right"))
    assert a.same_polynomial(b)


def test_eigenvector_of_scalar_quadratic():
    # P = (lambda^2 - 1) I_2, Frobenius pencil; z lifted from x = [1; 0] at lambda0 = 1
    P = MatrixPolynomial([-np.eye(2, dtype=int).astype(object), np.zeros((2, 2), dtype=object),
                          np.eye(2, dtype=int).astype(object)])
    bk = frobenius_companion(P)
    ctx = RecoveryContext.from_sbmb(bk)
    z = np.array([1, 0, 1, 0], dtype=object)
    assert not evaluate(bk.L, 1).dot(z).any()
    x = recover_eigenvector(z, Fraction(1), ctx)
    assert list(x) == [1, 0]
    assert list(recover_eigenvector(3 * z, Fraction(1), ctx)) == [3, 0]


def test_eigenvector_at_infinity():
    # P_d = diag(1, 0): the vector at infinity must lie in the null space of P_d
    P = MatrixPolynomial([np.eye(2, dtype=int).astype(object),
                          np.diag([1, 0]).astype(object)])
    P = P.with_grade(2)
    bk = frobenius_companion(P)
    L1 = bk.L.coeffs[-1]
    from ellify import exact
    Z = exact.nullspace(L1)
    ctx = RecoveryContext.from_sbmb(bk)
    x = recover_eigenvector(Z[:, 0], "inf", ctx)
    assert not P.coeffs[2].dot(x).any() and any(x)


def test_zero_block_is_rejected():
    ctx = RecoveryContext.kronecker(1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        recover_eigenvector(np.array([0.0, 0.0, 1.0]), 2.0, ctx)


def test_float_recovery_uses_largest_block():
    # z = [lambda x; x] at lambda = 1e3: the top block carries x at full accuracy
    ctx = RecoveryContext.kronecker(1, 0, 1, 1, 2)
    z = np.array([1e3, 2e3, 1.0, 2.0])
    assert np.allclose(recover_eigenvector(z, 1e3, ctx), [1e3, 2e3])


@given(seeds, st.sampled_from([1, 2, 3]), st.integers(1, 3))
def test_float_eigenvector_residual(seed, ell, n):
    P = rand(n, n, 6, seed)
    k = 6 // ell
    bk = block_kronecker_companion(P, (k - 1) // 2, k - 1 - (k - 1) // 2, ell)
    ctx = RecoveryContext.from_sbmb(bk)
    Lf, Pf = bk.L.to_float(), P.to_float()
    vals, _ = polynomial_eigenvalues(Lf)
    for lam in vals[:3]:
        _, _, vh = np.linalg.svd(evaluate(Lf, lam))
        z = vh[-1].conj()
        x = recover_eigenvector(z, lam, ctx)
        res = np.linalg.norm(evaluate(Pf, lam) @ x)
        # backward-error scale: sum_i |lambda|^i ||P_i||
        scale = sum(abs(lam) ** i * np.linalg.norm(c) for i, c in enumerate(Pf.coeffs))
        assert res <= 1e-12 * scale * np.linalg.norm(x)


def test_one_sided_residuals_vanish():
    sb = golden.symmetric_quartic_quadratification()
    for r in one_sided_residuals(sb):
        assert r.is_zero()
    P = rand(2, 3, 6, 4)
    bk = block_kronecker_companion(P, 1, 1, 2)
    for r in kronecker_one_sided_residuals(bk, P) + one_sided_residuals(bk):
        assert r.is_zero()
    for r in one_sided_residuals(golden.grade6_quadratification(P).to_sbmb()):
        assert r.is_zero()
