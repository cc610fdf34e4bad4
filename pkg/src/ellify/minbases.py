"""Minimal bases, dual pairs and the parameter calculus of l-ifications."""

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import flint
import numpy as np

from . import exact
from .polycore import (ZERO_DEGREE, MatrixPolynomial, highest_row_degree_matrix,
                       kron_identity_right, matmul, reversal, row_degrees,
                       substitute_power, transpose)

DEFAULT_MAX_MINORS = 5000


class CertificationError(ValueError):
    """A dual-pair certification failed; ``failures`` lists every failed check."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class MinorGuardExceeded(RuntimeError):
    """The number of maximal minors exceeds the configured limit."""


@dataclass(frozen=True)
class DualMinimalBasisPair:
    K: MatrixPolynomial
    N: MatrixPolynomial
    certified: bool
    method: str
    status: str = "certified"
    k_row_degree: object = None
    n_row_degree: object = None


@dataclass(frozen=True)
class EmbeddingPair:
    """Unimodular completion ``U = [K; K_hat]`` with inverse ``[N_hat^T, N^T]``."""

    K: MatrixPolynomial
    K_hat: MatrixPolynomial
    N: MatrixPolynomial
    N_hat: MatrixPolynomial

    # the fields are immutable, so derived matrices are computed once

    @cached_property
    def U(self):
        return _vcat(self.K, self.K_hat)

    @cached_property
    def U_inv(self):
        return _hcat(transpose(self.N_hat), transpose(self.N))

    @cached_property
    def holds(self):
        """Exact check ``U U^{-1} = I``."""
        n = self.K.cols
        if self.U.rows != n or self.U_inv.rows != n or self.U_inv.cols != n:
            return False
        prod = matmul(self.U, self.U_inv)
        return prod.same_polynomial(MatrixPolynomial.identity(n, prod.field))

    @cached_property
    def certificate(self):
        """``is_dual_pair(K, N)`` witnessed by this embedding (raises on failure)."""
        return is_dual_pair(self.K, self.N, embedding=self)

    @cached_property
    def memo(self):
        """Scratch space for other wing-only results keyed by the caller."""
        return {}


@dataclass(frozen=True, order=True)
class LIficationParameters:
    m1: int
    m2: int
    epsilon: int
    eta: int

    def __iter__(self):
        return iter((self.m1, self.m2, self.epsilon, self.eta))


def _vcat(A, B):
    from .polycore import vstack
    return vstack([A, B])


def _hcat(A, B):
    from .polycore import hstack
    return hstack([A, B])


# structured bases -----------------------------------------------------------

def make_Lk(k, field="Q"):
    """``k x (k+1)`` pencil with ``-1`` on the diagonal and ``lambda`` above it."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    A0 = MatrixPolynomial.zeros(k, k + 1, 1, field).coeffs[0].copy()
    A1 = A0.copy()
    for i in range(k):
        A0[i, i] = -1
        A1[i, i + 1] = 1
    return MatrixPolynomial([A0, A1], field)


def make_Lambda(k, field="Q"):
    """Column ``[lambda**k, ..., lambda, 1]^T`` at grade ``k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    coeffs = [MatrixPolynomial.zeros(k + 1, 1, 0, field).coeffs[0].copy()
              for _ in range(k + 1)]
    for i in range(k + 1):
        coeffs[k - i][i, 0] = 1
    return MatrixPolynomial(coeffs, field)


def make_Lambda_hat(k, field="Q"):
    """``(k+1) x k`` completion with ``V^{-1} = [Lambda_hat, Lambda]`` where ``V = [L_k; e_{k+1}^T]``.

    Entry ``(i, j)`` is ``-lambda**(j-i)`` for ``j >= i`` and zero otherwise.
    """
    coeffs = [MatrixPolynomial.zeros(k + 1, k, 0, field).coeffs[0].copy()
              for _ in range(max(k, 1))]
    for i in range(k + 1):
        for j in range(i, k):
            coeffs[j - i][i, j] = -1
    return MatrixPolynomial(coeffs, field).with_grade(max(k - 1, 0))


@lru_cache(maxsize=256)
def kronecker_embedding(k, ell, p, field="Q"):
    """Embedding of the pair ``L_k(lambda^ell) (x) I_p`` and ``Lambda_k(lambda^ell)^T (x) I_p``."""
    K = kron_identity_right(substitute_power(make_Lk(k, field), ell), p)
    N = kron_identity_right(transpose(substitute_power(make_Lambda(k, field), ell)), p)
    e = MatrixPolynomial.zeros(1, k + 1, 0, field).coeffs[0].copy()
    e[0, k] = 1
    K_hat = kron_identity_right(MatrixPolynomial([e], field), p)
    N_hat = kron_identity_right(
        transpose(substitute_power(make_Lambda_hat(k, field), ell)), p)
    return EmbeddingPair(K=K, K_hat=K_hat, N=N, N_hat=N_hat)


def swap_embedding(E):
    """``(K, N, K_hat, N_hat) -> (N, K, N_hat, K_hat)``."""
    return EmbeddingPair(K=E.N, K_hat=E.N_hat, N=E.K, N_hat=E.K_hat)


def embedding_holds(E):
    """Exact check ``U U^{-1} = I`` (cached on the embedding)."""
    return E.holds


# certification ------------------------------------------------------------

def is_row_reduced(Q):
    """Full row rank of the highest row degree coefficient matrix."""
    if Q.rows == 0:
        raise ValueError("empty matrix")
    if any(d is ZERO_DEGREE for d in row_degrees(Q)):
        return False
    H = highest_row_degree_matrix(Q)
    if Q.field == "Q":
        return exact.rank(H) == Q.rows
    return np.linalg.matrix_rank(H) == Q.rows


def maximal_minor_gcd(Q, max_minors=DEFAULT_MAX_MINORS):
    """Monic gcd of all maximal minors, with early exit once it is constant."""
    if Q.field != "Q":
        raise ValueError("minor gcd needs the exact backend")
    r, c = Q.shape
    total = math.comb(c, r)
    if total > max_minors:
        raise MinorGuardExceeded(f"{total} maximal minors exceed the limit {max_minors}")
    entries = [[Q.entry(i, j) for j in range(c)] for i in range(r)]
    g = flint.fmpq_poly([])
    for cols in itertools.combinations(range(c), r):
        g = g.gcd(exact.poly_det([[entries[i][j] for j in cols] for i in range(r)]))
        if g.degree() == 0:
            return (1,)
    return exact.from_fmpq_poly(g)


def is_minimal_basis(Q, max_minors=DEFAULT_MAX_MINORS):
    """True iff the rows of ``Q`` form a minimal basis of the rational row space.

    Row reduced, and full row rank at every point (the maximal minors have a
    constant gcd).  Exact backend only.
    """
    if Q.rows == 0 or Q.cols == 0:
        raise ValueError("empty matrix")
    if Q.rows > Q.cols:
        raise ValueError("more rows than columns")
    if not is_row_reduced(Q):
        return False
    return maximal_minor_gcd(Q, max_minors) == (1,)


def _constant_row_degree(P):
    degs = row_degrees(P)
    if degs and all(d == degs[0] for d in degs) and degs[0] is not ZERO_DEGREE:
        return degs[0]
    return None


def is_dual_pair(K, N, max_minors=DEFAULT_MAX_MINORS, embedding=None):
    """Certify ``(K, N)`` as dual minimal bases.

    With an :class:`EmbeddingPair` the full-rank part is witnessed by the
    exact identity ``U U^{-1} = I``; otherwise maximal minors are used.
    Raises :class:`CertificationError` listing every failed check.  If the
    minor count exceeds ``max_minors`` the pair comes back uncertified.
    """
    failures = []
    if K.cols != N.cols:
        raise CertificationError([f"column counts differ: {K.cols} vs {N.cols}"])
    if K.rows + N.rows != K.cols:
        failures.append(f"row counts {K.rows} + {N.rows} != {K.cols}")
    prod = matmul(K, transpose(N))
    if not prod.is_zero():
        failures.append("K N^T is not zero")
    status = "certified"
    certified = True
    method = "embedding" if embedding is not None else "minors"
    for name, Q in (("K", K), ("N", N)):
        if Q.rows == 0:
            continue
        if not is_row_reduced(Q):
            failures.append(f"{name} is not row reduced")
    if embedding is not None:
        if not (embedding.K == K and embedding.N == N):
            failures.append("embedding does not match the pair")
        elif not embedding_holds(embedding):
            failures.append("embedding identity U U^-1 = I fails")
    else:
        for name, Q in (("K", K), ("N", N)):
            if Q.rows == 0 or failures:
                continue
            try:
                if maximal_minor_gcd(Q, max_minors) != (1,):
                    failures.append(f"{name} loses rank at some point")
            except MinorGuardExceeded as exc:
                certified = False
                status = f"uncertified: {exc}"
    if failures:
        raise CertificationError(failures)
    return DualMinimalBasisPair(K=K, N=N, certified=certified, method=method,
                                status=status,
                                k_row_degree=_constant_row_degree(K),
                                n_row_degree=_constant_row_degree(N))


def reversal_dual_check(pair, max_minors=DEFAULT_MAX_MINORS):
    """Whether reversing both members (at constant row degrees) gives a dual pair."""
    dk, dn = pair.k_row_degree, pair.n_row_degree
    if dk is None or dn is None:
        raise ValueError("reversal check needs constant row degrees")
    Kr = reversal(pair.K.with_grade(dk), dk)
    Nr = reversal(pair.N.with_grade(dn), dn)
    try:
        res = is_dual_pair(Kr, Nr, max_minors=max_minors)
    except CertificationError:
        return False
    return res.certified


def dual_kronecker_pair(k, ell, p, field="Q"):
    """Certified Kronecker pair via its explicit embedding."""
    E = kronecker_embedding(k, ell, p, field)
    return is_dual_pair(E.K, E.N, embedding=E), E


# parameters ---------------------------------------------------------------

def enumerate_parameters(m, n, d, ell):
    """All nonnegative ``(m1, m2, epsilon, eta)`` admitting a strong l-ification.

    The solutions of ``ell*m1 = n*epsilon``, ``ell*m2 = m*eta`` and
    ``epsilon + eta = d - ell`` form one arithmetic progression in
    ``epsilon`` with step ``ell / gcd(ell, n, m)``.  When ``ell`` does not
    divide ``m d`` the problem is solved for the transposed sizes; if it
    divides neither ``m d`` nor ``n d`` a ValueError is raised.
    """
    for v, name in ((m, "m"), (n, "n"), (d, "d"), (ell, "ell")):
        if v < 1:
            raise ValueError(f"{name} must be positive")
    if ell >= d:
        raise ValueError("need d > ell")
    if (m * d) % ell == 0:
        return _params_m_divisible(m, n, d, ell)
    if (n * d) % ell == 0:
        sols = _params_m_divisible(n, m, d, ell)
        return sorted(LIficationParameters(s.m2, s.m1, s.eta, s.epsilon) for s in sols)
    raise ValueError(f"ell={ell} divides neither m*d={m * d} nor n*d={n * d}")


def _params_m_divisible(m, n, d, ell):
    gamma = ell // math.gcd(ell, math.gcd(n, m))
    out = []
    for k in range((d - ell) // gamma + 1):
        m1 = k * n * gamma // ell
        m2 = m * d // ell - k * m * gamma // ell - m
        eps = k * gamma
        eta = d - ell - k * gamma
        if m2 < 0 or eta < 0:
            continue
        if (k * n * gamma) % ell or (k * m * gamma) % ell:
            continue
        out.append(LIficationParameters(m1, m2, eps, eta))
    return sorted(out)
