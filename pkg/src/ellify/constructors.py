"""Block minimal bases matrix polynomials and companion l-ifications.

Every companion form here is a :class:`BlockKroneckerPolynomial`: a grade
``ell`` block ``M`` bordered by the wings ``L_eta(lambda^ell)^T (x) I_m`` and
``L_eps(lambda^ell) (x) I_n``.  The Frobenius forms and the Frobenius-like
forms are the cases ``eta = 0`` or ``eps = 0``.
"""

import warnings
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import exact
from .minbases import (CertificationError, DualMinimalBasisPair, is_dual_pair,
                       kronecker_embedding, make_Lk)
from .polycore import (ZERO_DEGREE, MatrixPolynomial, _zeros, block, kron_identity_right,
                       matmul, row_degrees, substitute_power, transpose)


class ShapeError(ValueError):
    """Block sizes do not fit together."""


class StrongBlockMinimalBasesPolynomial:
    """``[M, K2^T; K1, 0]`` together with the dual bases ``N1``, ``N2``.

    An absent wing is ``None``; its dual is then the identity and it
    contributes no rows or columns.
    """

    def __init__(self, M, K1, K2, N1, N2, embedding1=None, embedding2=None,
                 pair1=None, pair2=None):
        self.M = M
        self.K1, self.K2 = K1, K2
        self.N1, self.N2 = N1, N2
        self.embedding1, self.embedding2 = embedding1, embedding2
        self.pair1, self.pair2 = pair1, pair2

    @property
    def ell(self):
        return self.M.grade

    @property
    def field(self):
        return self.M.field

    @property
    def m1(self):
        return 0 if self.K1 is None else self.K1.rows

    @property
    def m2(self):
        return 0 if self.K2 is None else self.K2.rows

    @property
    def m(self):
        return self.M.rows - self.m2

    @property
    def n(self):
        return self.M.cols - self.m1

    @property
    def strong(self):
        for K in (self.K1, self.K2):
            if K is not None and any(d != self.ell for d in row_degrees(K)):
                return False
        for N in (self.N1, self.N2):
            degs = row_degrees(N)
            if len(set(degs)) != 1 or degs[0] is ZERO_DEGREE:
                return False
        return True

    @property
    def deg_N1(self):
        return _const_degree(self.N1)

    @property
    def deg_N2(self):
        return _const_degree(self.N2)

    @cached_property
    def L(self):
        """The assembled matrix polynomial at grade ``ell``."""
        rows = [[self.M, None if self.K2 is None else transpose(self.K2)]]
        if self.K1 is not None:
            rows.append([self.K1, None])
        if self.K2 is None:
            rows = [[r[0]] for r in rows]
        if self.K1 is not None and self.K2 is not None:
            rows[1][1] = MatrixPolynomial.zeros(self.m1, self.m2, 0, self.field)
        return block(rows).with_grade(self.ell)

    def __repr__(self):
        return (f"{type(self).__name__}(m={self.m}, n={self.n}, m1={self.m1}, "
                f"m2={self.m2}, ell={self.ell}, strong={self.strong})")


def _const_degree(N):
    degs = row_degrees(N)
    if len(set(degs)) != 1 or degs[0] is ZERO_DEGREE:
        return N.degree()
    return degs[0]


class BlockKroneckerPolynomial(StrongBlockMinimalBasesPolynomial):
    """Block Kronecker form with parameters ``(eps, eta, ell)`` and sizes ``m x n``.

    The wings are certified structurally through their explicit unimodular
    embeddings, so no minors are ever computed.
    """

    def __init__(self, M, epsilon, eta, ell, m, n):
        if M.shape != ((eta + 1) * m, (epsilon + 1) * n):
            raise ShapeError(f"M is {M.shape}, expected {((eta + 1) * m, (epsilon + 1) * n)}")
        if M.grade != ell:
            M = M.with_grade(ell)
        field = M.field
        self.epsilon, self.eta = epsilon, eta
        self._m, self._n = m, n
        E1 = kronecker_embedding(epsilon, ell, n, field)
        E2 = kronecker_embedding(eta, ell, m, field)
        K1 = E1.K if epsilon > 0 else None
        K2 = E2.K if eta > 0 else None
        p1 = DualMinimalBasisPair(E1.K, E1.N, True, "kronecker-structure",
                                  k_row_degree=ell if epsilon else None,
                                  n_row_degree=epsilon * ell)
        p2 = DualMinimalBasisPair(E2.K, E2.N, True, "kronecker-structure",
                                  k_row_degree=ell if eta else None,
                                  n_row_degree=eta * ell)
        super().__init__(M, K1, K2, E1.N, E2.N, E1, E2, p1, p2)
        self._ell = ell

    @property
    def ell(self):
        return self._ell

    @property
    def m(self):
        return self._m

    @property
    def n(self):
        return self._n

    def to_sbmb(self, max_minors=None):
        """Re-certify the wings through minbases and return a plain sbmb."""
        kw = {} if max_minors is None else {"max_minors": max_minors}
        return assemble_sbmb(self.M, self.K1, self.K2, self.N1, self.N2,
                             embedding1=self.embedding1 if self.K1 is not None else None,
                             embedding2=self.embedding2 if self.K2 is not None else None,
                             **kw)

    def __repr__(self):
        return (f"BlockKroneckerPolynomial(eps={self.epsilon}, eta={self.eta}, "
                f"ell={self.ell}, m={self.m}, n={self.n})")


def assemble_sbmb(M, K1=None, K2=None, N1=None, N2=None, embedding1=None,
                  embedding2=None, max_minors=5000):
    """Certify both dual pairs and assemble ``[M, K2^T; K1, 0]``.

    A pair is certified through its embedding when one is given and by
    maximal minors otherwise.  Raises :class:`CertificationError` or
    :class:`ShapeError`.
    """
    field = M.field
    pairs = []
    for name, K, N, E, width in (("1", K1, N1, embedding1, M.cols),
                                 ("2", K2, N2, embedding2, M.rows)):
        if K is None:
            size = width
            Nid = MatrixPolynomial.identity(size, field)
            if N is not None and not N.same_polynomial(Nid):
                raise ShapeError(f"N{name} must be the identity when K{name} is absent")
            pairs.append((None, Nid))
            continue
        if N is None:
            raise ShapeError(f"N{name} is required when K{name} is present")
        if K.cols != width:
            raise ShapeError(f"K{name} has {K.cols} columns, block needs {width}")
        pair = is_dual_pair(K, N, max_minors=max_minors, embedding=E)
        if not pair.certified:
            raise CertificationError([f"pair {name}: {pair.status}"])
        if K.grade > M.grade and K.degree() is not ZERO_DEGREE and K.degree() > M.grade:
            raise ShapeError(f"K{name} has degree above grade(M)")
        pairs.append((pair, N))
    (p1, N1), (p2, N2) = pairs
    K1g = None if K1 is None else K1.with_grade(max(M.grade, K1.grade))
    K2g = None if K2 is None else K2.with_grade(max(M.grade, K2.grade))
    return StrongBlockMinimalBasesPolynomial(M, K1g, K2g, N1, N2,
                                             embedding1, embedding2, p1, p2)


def q_of(sbmb):
    """``N2 M N1^T`` at grade ``ell + deg N1 + deg N2``."""
    if sbmb.N1 is None or sbmb.N2 is None:
        raise ValueError("dual bases are not attached")
    Q = matmul(sbmb.N2, matmul(sbmb.M, transpose(sbmb.N1)))
    g = sbmb.ell + sbmb.deg_N1 + sbmb.deg_N2
    return Q.with_grade(g)


# B_j splitting and Sigma ---------------------------------------------------

def b_blocks(P, ell):
    """``[B_1, ..., B_k]`` with ``P = sum_j lambda^(ell(j-1)) B_j``, each of grade ``ell``."""
    d = P.grade
    if d % ell:
        raise ValueError(f"ell={ell} does not divide grade {d}")
    k = d // ell
    out = []
    for j in range(1, k + 1):
        coeffs = [_zeros(P.rows, P.cols, P.field) for _ in range(ell + 1)]
        lo = 0 if j == 1 else 1
        for t in range(lo, ell + 1):
            coeffs[t] = P.coeffs[ell * (j - 1) + t].copy()
        out.append(MatrixPolynomial._raw(coeffs, P.field))
    return out


def sigma_block(P, epsilon, eta, ell):
    """Grade-``ell`` block matrix with first row ``[B_k ... B_{eta+1}]``,
    last column ``[B_{eta+1}; ...; B_1]`` and zeros elsewhere."""
    if ell * (epsilon + eta + 1) != P.grade:
        raise ValueError("ell (eps + eta + 1) must equal the grade of P")
    m, n = P.shape
    B = b_blocks(P, ell)
    k = len(B)
    grid = [[MatrixPolynomial.zeros(m, n, ell, P.field) for _ in range(epsilon + 1)]
            for _ in range(eta + 1)]
    for c in range(epsilon + 1):
        grid[0][c] = B[k - c - 1]
    for r in range(eta + 1):
        grid[r][epsilon] = B[eta - r]
    return block(grid)


def block_kronecker_companion(P, epsilon, eta, ell):
    """Block Kronecker companion form with ``M = Sigma_P``."""
    return BlockKroneckerPolynomial(sigma_block(P, epsilon, eta, ell),
                                    epsilon, eta, ell, P.rows, P.cols)


def frobenius_like_ellification(P, ell, side="first"):
    """Frobenius-like companion form of degree ``ell`` (``ell | d``, ``d/ell >= 2``)."""
    d = P.grade
    if d % ell:
        raise ValueError(f"ell={ell} does not divide grade {d}")
    k = d // ell
    if k < 2:
        raise ValueError("d/ell must be at least 2")
    if side == "first":
        return block_kronecker_companion(P, k - 1, 0, ell)
    if side == "second":
        return block_kronecker_companion(P, 0, k - 1, ell)
    raise ValueError(f"side must be 'first' or 'second', got {side!r}")


def frobenius_companion(P, side="first"):
    """First or second Frobenius companion pencil."""
    d = P.grade
    if d < 2:
        raise ValueError("grade must be at least 2")
    m, n = P.shape
    field = P.field
    lead = MatrixPolynomial._raw([P.coeffs[d - 1].copy(), P.coeffs[d].copy()], field)
    rest = [MatrixPolynomial.constant(P.coeffs[i], field, grade=1)
            for i in range(d - 2, -1, -1)]
    if side == "first":
        M = block([[lead] + rest])
        return BlockKroneckerPolynomial(M, d - 1, 0, 1, m, n)
    if side == "second":
        M = block([[b] for b in [lead] + rest])
        return BlockKroneckerPolynomial(M, 0, d - 1, 1, m, n)
    raise ValueError(f"side must be 'first' or 'second', got {side!r}")


# perturbations -------------------------------------------------------------

def block_kronecker_perturb(base, B, C, D=None):
    """``M + (lambda [0; D] + B)(L_eps (x) I_n) + (L_eta^T (x) I_m)(lambda [0, -D] + C)``.

    ``B`` is ``(eta+1)m x eps n`` and ``C`` is ``eta m x (eps+1)n``, both
    constant.  ``D`` (grade ``ell - 2``, size ``eta m x eps n``) exists only
    for ``ell >= 2``.
    """
    eps, eta, ell, m, n = base.epsilon, base.eta, base.ell, base.m, base.n
    field = base.field
    Bp = B if isinstance(B, MatrixPolynomial) else MatrixPolynomial([B], field)
    Cp = C if isinstance(C, MatrixPolynomial) else MatrixPolynomial([C], field)
    if Bp.shape != ((eta + 1) * m, eps * n):
        raise ShapeError(f"B must be {((eta + 1) * m, eps * n)}")
    if Cp.shape != (eta * m, (eps + 1) * n):
        raise ShapeError(f"C must be {(eta * m, (eps + 1) * n)}")
    if D is not None and ell < 2:
        raise ShapeError("D is only defined for ell >= 2")
    left = Bp
    right = Cp
    if D is not None and ell >= 2:
        if D.shape != (eta * m, eps * n):
            raise ShapeError(f"D must be {(eta * m, eps * n)}")
        lamD = MatrixPolynomial._raw([_zeros(*D.shape, field)] + list(D.coeffs), field)
        top_m = MatrixPolynomial.zeros(m, eps * n, 0, field)
        left_n = MatrixPolynomial.zeros(eta * m, n, 0, field)
        left = left + block([[top_m], [lamD]])
        right = right + block([[left_n, -lamD]])
    Leps = kron_identity_right(substitute_power(make_Lk(eps, field), ell), n)
    Leta = kron_identity_right(transpose(substitute_power(make_Lk(eta, field), ell)), m)
    out = base.M + matmul(left, Leps) + matmul(Leta, right)
    # the lambda^(ell+1) D terms cancel; what remains has grade ell
    out = out.with_grade(max(out.grade, ell))
    for c in out.coeffs[ell + 1:]:
        if c.any():
            raise AssertionError("perturbation did not collapse to grade ell")
    return BlockKroneckerPolynomial(out.with_grade(ell), eps, eta, ell, m, n)


def _perturbation_slots(eps, eta, ell, m, n):
    slots = [("B", (eta + 1) * m, eps * n, 0), ("C", eta * m, (eps + 1) * n, 0)]
    if ell >= 2:
        slots.append(("D", eta * m, eps * n, ell - 2))
    return slots


def perturbation_map_matrix(eps, eta, ell, m, n):
    """Exact matrix of ``(B, C, D) -> M' - M``; columns follow the slot coordinates."""
    zeroP = MatrixPolynomial.zeros(m, n, ell * (eps + eta + 1), "Q")
    base = block_kronecker_companion(zeroP, eps, eta, ell)
    cols = []
    slots = _perturbation_slots(eps, eta, ell, m, n)
    for name, r, c, g in slots:
        for t in range(g + 1):
            for i in range(r):
                for j in range(c):
                    parts = {s[0]: MatrixPolynomial.zeros(s[1], s[2], s[3], "Q")
                             for s in slots}
                    E = _zeros(r, c, "Q")
                    E[i, j] = 1
                    parts[name] = MatrixPolynomial.monomial(E, t, "Q", grade=g)
                    out = block_kronecker_perturb(base, parts["B"][0], parts["C"][0],
                                                  parts.get("D"))
                    cols.append(out.M.stacked().flatten())
    if not cols:
        return np.zeros((base.M.rows * base.M.cols * (ell + 1), 0), dtype=object)
    return np.column_stack(cols)


def perturbation_params(base, target_M):
    """Solve exactly for ``(B, C, D)`` turning ``base.M`` into ``target_M``."""
    eps, eta, ell, m, n = base.epsilon, base.eta, base.ell, base.m, base.n
    A = perturbation_map_matrix(eps, eta, ell, m, n)
    rhs = (target_M.with_grade(ell) - base.M).stacked().flatten()
    x = exact.solve_particular(A, rhs)
    out = {}
    pos = 0
    for name, r, c, g in _perturbation_slots(eps, eta, ell, m, n):
        coeffs = []
        for t in range(g + 1):
            coeffs.append(np.array(x[pos:pos + r * c], dtype=object).reshape(r, c))
            pos += r * c
        out[name] = MatrixPolynomial(coeffs, "Q")
    return out["B"][0], out["C"][0], out.get("D")


# structured templates ------------------------------------------------------

def symmetric_companion_quadratification(P):
    """Symmetric block Kronecker quadratification for grade ``d = 4k + 2``."""
    m, n = P.shape
    if m != n:
        raise ValueError("P must be square")
    d = P.grade
    if d % 4 != 2:
        raise ValueError("grade must be 2 mod 4")
    if not all(np.array_equal(A, A.T) for A in P.coeffs):
        warnings.warn("P is not symmetric; the quadratification will not be either")
    k = (d - 2) // 4
    field = P.field
    half = Fraction(1, 2) if field == "Q" else 0.5
    grid = [[MatrixPolynomial.zeros(n, n, 2, field) for _ in range(k + 1)]
            for _ in range(k + 1)]
    for j in range(k + 1):
        top = d - 4 * j
        grid[j][j] = MatrixPolynomial._raw(
            [P.coeffs[top - 2].copy(), P.coeffs[top - 1].copy(), P.coeffs[top].copy()], field)
        if j < k:
            off = MatrixPolynomial.monomial(P.coeffs[top - 3], 1, field, grade=2) * half
            grid[j][j + 1] = off
            grid[j + 1][j] = off
    return BlockKroneckerPolynomial(block(grid), k, k, 2, n, n)


def transpose_construction(sbmb):
    """Transpose of an sbmb: the two dual pairs trade places."""
    if isinstance(sbmb, BlockKroneckerPolynomial):
        return BlockKroneckerPolynomial(transpose(sbmb.M), sbmb.eta, sbmb.epsilon,
                                        sbmb.ell, sbmb.n, sbmb.m)
    return StrongBlockMinimalBasesPolynomial(
        transpose(sbmb.M), sbmb.K2, sbmb.K1, sbmb.N2, sbmb.N1,
        sbmb.embedding2, sbmb.embedding1, sbmb.pair2, sbmb.pair1)


def default_split(k):
    """Balanced ``(eps, eta)`` with ``eps + eta = k - 1``."""
    eta = (k - 1) // 2
    return k - 1 - eta, eta
