"""Convolution matrices and constructive solvers for ``N B = Q`` and ``N2 M N1^T = P``.

Coefficients of an unknown ``B`` of grade ``b`` are stacked highest power
first, ``[B_b; ...; B_0]``.  With that ordering ``N B = Q`` reads
``C_b(N) [B_b; ...; B_0] = [Q_{n+b}; ...; Q_0]``.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import exact
from .polycore import MatrixPolynomial, _zeros, matmul, transpose


class GradeMismatchError(ValueError):
    """Grades of the operands do not satisfy the solver's precondition."""


@dataclass(frozen=True)
class ConvolutionMatrix:
    source: MatrixPolynomial
    j: int
    matrix: np.ndarray


@dataclass(frozen=True)
class SolutionFamily:
    """A particular solution plus the size of the solution set.

    ``member(X, Y)`` returns another element of the family when the slots
    are available (strong pairs with wing degree equal to the target
    grade); ``x_shape``/``x_grade``/``y_shape`` describe those slots.
    """

    particular: MatrixPolynomial
    nullity: int
    x_shape: Optional[tuple] = None
    x_grade: Optional[int] = None
    y_shape: Optional[tuple] = None
    _member: Optional[Callable] = None

    def member(self, X=None, Y=None):
        if self._member is None:
            raise NotImplementedError("this family exposes no parametrization")
        return self._member(X, Y)


def convolution_matrix(Q, j):
    """Block Toeplitz matrix with ``j+1`` block columns; block ``(r, c)`` is ``Q_{q-r+c}``."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    q = Q.grade
    r_, c_ = Q.shape
    C = _zeros((q + j + 1) * r_, (j + 1) * c_, Q.field)
    for c in range(j + 1):
        for t in range(q + 1):
            r = q - t + c
            C[r * r_:(r + 1) * r_, c * c_:(c + 1) * c_] = Q.coeffs[t]
    return ConvolutionMatrix(source=Q, j=j, matrix=C)


def stack_high_first(B):
    """``[B_g; ...; B_0]`` as one block column."""
    return np.vstack(list(reversed(B.coeffs)))


def unstack_high_first(S, rows, field):
    g = S.shape[0] // rows - 1
    blocks = [S[i * rows:(i + 1) * rows] for i in range(g + 1)]
    return MatrixPolynomial._raw(list(reversed(blocks)), field)


def _check_pair(K, N):
    from .polycore import row_degrees
    kd = set(row_degrees(K)) if K.rows else {0}
    nd = set(row_degrees(N))
    if len(kd) != 1 or len(nd) != 1:
        raise ValueError("pair must have constant row degrees")
    return kd.pop(), nd.pop()


def solve_NB_eq_Q(N, K, Q, b, pair=None):
    """Solve ``N B = Q`` for ``B`` of grade ``b``.

    Exact backend: the two-stage elimination (triangular stage for
    ``B_b .. B_k`` with free variables zero, then the square system with
    ``C_{k-1}(N)``).  Float backend: minimum-norm solution
    ``C_b(N)^+ C_0(Q)``.  ``K`` is the dual partner of ``N``.
    """
    if pair is not None and not pair.certified:
        raise ValueError("dual pair is not certified")
    k, n = _check_pair(K, N)
    if Q.grade != n + b:
        raise GradeMismatchError(f"grade(Q)={Q.grade} but deg N + b = {n + b}")
    if b < k:
        raise GradeMismatchError(f"b={b} is smaller than deg K = {k}")
    if Q.rows != N.rows:
        raise ValueError("row count of Q must equal that of N")
    s, r = K.rows, Q.cols
    nullity = (b - k + 1) * s * r
    if N.field == "F64":
        C = convolution_matrix(N, b).matrix
        rhs = stack_high_first(Q)
        X = np.linalg.lstsq(C, rhs, rcond=None)[0]
        return SolutionFamily(unstack_high_first(X, N.cols, "F64"), nullity)
    B = _two_stage(N, Q, b, k, n)
    if not matmul(N, B).same_polynomial(Q):
        raise AssertionError("exact residual of N B = Q is not zero")
    return SolutionFamily(B, nullity)


def _two_stage(N, Q, b, k, n):
    p, w = N.shape
    Bc = {}
    Nn = N.coeffs[n]
    # stage 1: N_n B_{b-t} = Q_{n+b-t} - sum_{c<t} N_{n-t+c} B_{b-c}
    for t in range(b - k + 1):
        rhs = Q.coeffs[n + b - t].copy()
        for c in range(t):
            idx = n - t + c
            if 0 <= idx <= n:
                rhs = rhs - N.coeffs[idx] @ Bc[b - c]
        Bc[b - t] = exact.solve_particular(Nn, rhs)
    # stage 2: square system C_{k-1}(N) [B_{k-1}; ...; B_0] = remaining rhs
    if k > 0:
        C = convolution_matrix(N, k - 1).matrix
        rows = []
        for t in range(b - k + 1, n + b + 1):
            rhs = Q.coeffs[n + b - t].copy()
            for c in range(b - k + 1):
                idx = n - t + c
                if 0 <= idx <= n:
                    rhs = rhs - N.coeffs[idx] @ Bc[b - c]
            rows.append(rhs)
        R = np.vstack(rows)
        if C.shape[0] != C.shape[1]:
            raise AssertionError("C_{k-1}(N) is not square")
        X = exact.solve_unique(C, R)
        for c in range(k):
            Bc[k - 1 - c] = X[c * w:(c + 1) * w]
    coeffs = [np.asarray(Bc[i], dtype=object) for i in range(b + 1)]
    from .polycore import _normalize_array
    return MatrixPolynomial._raw([_normalize_array(c) for c in coeffs], "Q")


def nullspace_dimension_check(N, K, b, r=1):
    """Exact check that ``C_b(N)`` has nullity ``(b - k + 1) s`` per column."""
    k, _ = _check_pair(K, N)
    if b < k:
        raise GradeMismatchError("b smaller than deg K")
    C = convolution_matrix(N, b).matrix
    nul = C.shape[1] - exact.rank(C)
    return nul * r == (b - k + 1) * K.rows * r


def _apply_right_solver(N1, K1, B, ell):
    """``M`` with ``M N1^T = B``, computed as the transpose of a left solve."""
    return transpose(solve_NB_eq_Q(N1, K1, transpose(B), ell).particular)


def solve_M(pair1, pair2, P, ell):
    """Solve ``N2 M N1^T = P`` for ``M`` of grade ``ell``.

    ``pair1 = (K1, N1)`` and ``pair2 = (K2, N2)``; either may be ``None``,
    meaning the corresponding wing is absent and ``N_i`` is the identity.
    """
    for pair in (pair1, pair2):
        if pair is not None and not pair.certified:
            raise ValueError("dual pair is not certified")
    m, n = P.shape
    eps = 0 if pair1 is None else _check_pair(pair1.K, pair1.N)[1]
    eta = 0 if pair2 is None else _check_pair(pair2.K, pair2.N)[1]
    if P.grade != ell + eps + eta:
        raise GradeMismatchError(f"grade(P)={P.grade} but ell+eps+eta={ell + eps + eta}")
    if pair2 is not None and pair2.N.rows != m:
        raise ValueError("N2 row count must equal rows of P")
    if pair1 is not None and pair1.N.rows != n:
        raise ValueError("N1 row count must equal columns of P")
    m1 = 0 if pair1 is None else pair1.K.rows
    m2 = 0 if pair2 is None else pair2.K.rows
    k1 = ell if pair1 is None else _check_pair(pair1.K, pair1.N)[0]
    k2 = ell if pair2 is None else _check_pair(pair2.K, pair2.N)[0]

    if pair2 is None:
        B = P
        null2 = 0
    else:
        fam = solve_NB_eq_Q(pair2.N, pair2.K, P, ell + eps)
        B, null2 = fam.particular, fam.nullity
    if pair1 is None:
        M = B
        null1 = 0
    else:
        M = _apply_right_solver(pair1.N, pair1.K, B, ell)
        null1 = (ell - k1 + 1) * m1 * (m + m2)
    nullity = null2 + null1

    x_shape = y_shape = x_grade = None
    if pair1 is not None and pair2 is not None and k1 == ell and k2 == ell:
        x_shape, x_grade, y_shape = (m2, n), eps, (m1, m + m2)

        def member(X=None, Y=None):
            out = M
            if X is not None:
                Z = matmul(transpose(X.with_grade(eps)), pair2.K)
                out = out + _apply_right_solver(pair1.N, pair1.K, transpose(Z), ell)
            if Y is not None:
                Yp = Y if isinstance(Y, MatrixPolynomial) else MatrixPolynomial([Y], M.field)
                out = out + matmul(transpose(Yp), pair1.K)
            return out.with_grade(ell)
    else:
        member = None

    if M.field == "Q" and not matmul(_n_or_id(pair2, m, M.field),
                                      matmul(M, transpose(_n_or_id(pair1, n, M.field)))
                                      ).same_polynomial(P):
        raise AssertionError("exact residual of N2 M N1^T = P is not zero")
    return SolutionFamily(M.with_grade(ell), nullity, x_shape, x_grade, y_shape, member)


def _n_or_id(pair, size, field):
    return MatrixPolynomial.identity(size, field) if pair is None else pair.N


def psi_matrix(N1, N2, ell):
    """Matrix of ``M -> N2 M N1^T`` on grade-``ell`` inputs (column-major vec)."""
    rows_out = N2.rows * N1.rows
    cols_in = N2.cols * N1.cols
    g = ell + N1.grade + N2.grade
    A = _zeros((g + 1) * rows_out, (ell + 1) * cols_in, N1.field)
    for s in range(ell + 1):
        for a, Na in enumerate(N2.coeffs):
            if not Na.any():
                continue
            for bb, Nb in enumerate(N1.coeffs):
                if not Nb.any():
                    continue
                t = s + a + bb
                blk = np.kron(Nb, Na)
                A[t * rows_out:(t + 1) * rows_out, s * cols_in:(s + 1) * cols_in] += blk
    return A


def measured_nullity_M(N1, N2, ell):
    """Exact dimension of ``{M of grade ell : N2 M N1^T = 0}``."""
    A = psi_matrix(N1, N2, ell)
    return A.shape[1] - exact.rank(A)


def xi_map(M, eps, eta, ell, m, n):
    """``(Lambda_eta(lambda^ell)^T (x) I_m) M (Lambda_eps(lambda^ell) (x) I_n)``."""
    if M.shape != ((eta + 1) * m, (eps + 1) * n):
        raise ValueError(f"M has shape {M.shape}, expected {((eta + 1) * m, (eps + 1) * n)}")
    if M.grade > ell:
        M = M.with_grade(ell)
    d = ell * (eps + eta + 1)
    out = [_zeros(m, n, M.field) for _ in range(d + 1)]
    for i in range(eta + 1):
        for j in range(eps + 1):
            shift = ell * (eta - i) + ell * (eps - j)
            for t, A in enumerate(M.coeffs):
                blk = A[i * m:(i + 1) * m, j * n:(j + 1) * n]
                if blk.any():
                    out[shift + t] = out[shift + t] + blk
    return MatrixPolynomial._raw(out, M.field)
