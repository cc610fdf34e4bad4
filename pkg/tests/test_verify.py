from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellify import golden
from ellify.constructors import (StrongBlockMinimalBasesPolynomial, block_kronecker_companion,
                                 frobenius_like_ellification)
from ellify.polycore import MatrixPolynomial, random_polynomial
from ellify.verify import (SingularPolynomialError, VerificationReport, eigenvalue_agreement,
                           finite_eigenvalues, is_regular, match_spectra,
                           polynomial_eigenvalues, verify_ellification)

seeds = st.integers(0, 10**6)
CHECKS = ["shape", "dual-certification", "q-identity", "strongness-row-degrees",
          "reversal-structure", "anti-triangular-reduction"]


def rand(r, c, g, seed, field="Q"):
    return random_polynomial(r, c, g, np.random.default_rng(seed), field)


def scalar(*coeffs, field="Q"):
    return MatrixPolynomial([[[c]] for c in coeffs], field)


def test_quartic_example_passes_everything():
    rep = verify_ellification(golden.symmetric_quartic_quadratification(),
                              golden.quartic_rank_one())
    assert [c[0] for c in rep.checks] == CHECKS
    assert rep.overall


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), seeds)
def test_block_kronecker_verifies(m, n, ell, k, seed):
    P = rand(m, n, ell * k, seed)
    eps = seed % k
    rep = verify_ellification(block_kronecker_companion(P, eps, k - 1 - eps, ell), P)
    assert rep.overall, rep.format()


def test_grade6_forms_verify_with_spectra():
    P = rand(2, 2, 6, 8)
    for builder in (golden.grade6_linearization, golden.grade6_quadratification,
                    golden.grade6_cubification, golden.grade6_frobenius_like):
        rep = verify_ellification(builder(P), P, float_check=True)
        assert rep.overall and rep.check("eigenvalue-agreement")[0], rep.format()


def test_tampered_M_gives_coefficient_witness():
    P = rand(2, 2, 4, 1)
    bk = block_kronecker_companion(P, 1, 0, 2)
    E = np.zeros(bk.M.shape, dtype=object)
    E[0, 0] = 1
    bad = StrongBlockMinimalBasesPolynomial(bk.M + MatrixPolynomial.monomial(E, 2), bk.K1,
                                            bk.K2, bk.N1, bk.N2, bk.embedding1,
                                            bk.embedding2)
    rep = verify_ellification(bad, P)
    ok, witness = rep.check("q-identity")
    assert not ok and not rep.overall
    assert "coefficient of λ^4 differs at (0,0)" in witness


def test_tampered_wing_fails_certification():
    P = rand(1, 1, 4, 2)
    bk = block_kronecker_companion(P, 1, 0, 2)
    K1 = bk.K1 + MatrixPolynomial([[[0, 1]], [[0, 0]], [[0, 0]]])
    bad = StrongBlockMinimalBasesPolynomial(bk.M, K1, None, bk.N1, bk.N2,
                                            replace(bk.embedding1, K=K1))
    rep = verify_ellification(bad, P)
    assert not rep.check("dual-certification")[0]


def test_missing_embedding_is_a_failure_not_a_pass():
    sb = golden.symmetric_quartic_quadratification()
    bare = StrongBlockMinimalBasesPolynomial(sb.M, sb.K1, sb.K2, sb.N1, sb.N2)
    rep = verify_ellification(bare, golden.quartic_rank_one())
    assert not rep.check("anti-triangular-reduction")[0]
    assert not rep.overall


def test_report_skip_does_not_fail():
    rep = VerificationReport()
    rep.add("a", True)
    rep.add("b", None, "not applicable")
    assert rep.overall and "SKIP  b" in rep.format()
    rep.add("c", False)
    assert not rep.overall


def test_scalar_eigenvalues():
    vals, ninf = polynomial_eigenvalues(scalar(2, -3, 1))
    assert np.allclose(vals, [1, 2]) and ninf == 0
    P = MatrixPolynomial([-np.diag([4, 9]).astype(object), np.zeros((2, 2), dtype=object),
                          np.eye(2, dtype=int).astype(object)])
    vals, _ = polynomial_eigenvalues(P)
    assert np.allclose(vals, [-3, -2, 2, 3])


def test_declared_grade_gives_infinite_eigenvalue():
    info = finite_eigenvalues(scalar(-1, 0, 1, 0))
    assert [v for v, _ in info.finite_eigenvalues] == pytest.approx([-1, 1])
    assert info.infinite_multiplicity == 1


def test_multiplicities_are_grouped():
    info = finite_eigenvalues(scalar(1, -2, 1))
    assert len(info.finite_eigenvalues) == 1 and info.finite_eigenvalues[0][1] == 2


def test_singular_polynomial_rejected():
    P = MatrixPolynomial([np.array([[1, 1], [1, 1]], dtype=object),
                          np.array([[1, 1], [1, 1]], dtype=object)])
    assert not is_regular(P)
    with pytest.raises(SingularPolynomialError):
        finite_eigenvalues(P)
    assert is_regular(scalar(2, -3, 1))


def test_agreement_rejects_nonpositive_tolerance():
    P = scalar(2, -3, 1)
    bk = block_kronecker_companion(P, 1, 0, 1)
    with pytest.raises(ValueError):
        eigenvalue_agreement(P, bk, 0)


def test_agreement_linear_kronecker_to_1e10():
    A = np.array([[2, 1], [1, 3]], dtype=object)
    P = MatrixPolynomial([-A, np.zeros((2, 2), dtype=object), np.eye(2, dtype=int).astype(object)])
    rep = eigenvalue_agreement(P, block_kronecker_companion(P, 1, 0, 1), 1e-10)
    assert rep.passed and rep.finite_P == rep.finite_L == 4


def test_agreement_with_injected_backend():
    import scipy.linalg

    calls = []

    def backend(A, B):
        calls.append(A.shape)
        w = scipy.linalg.eigvals(A, B, homogeneous_eigvals=True)
        return w[0], w[1]

    P = rand(2, 2, 4, 9)
    rep = eigenvalue_agreement(P, frobenius_like_ellification(P, 2), 1e-8, backend=backend)
    assert rep.passed and len(calls) == 2


def test_match_spectra_is_optimal():
    pairs, worst, _ = match_spectra([0.0, 1.0], [1.0 + 1e-9, 1e-9])
    assert sorted(pairs) == [(0, 1), (1, 0)] and worst < 1e-8
