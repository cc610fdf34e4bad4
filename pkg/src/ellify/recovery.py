"""Recovery of minimal indices, minimal bases and eigenvectors from an l-ification."""

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import exact
from .constructors import BlockKroneckerPolynomial, q_of
from .convsolve import convolution_matrix
from .minbases import EmbeddingPair
from .polycore import (Eigenstructure, MatrixPolynomial, _zeros, block, evaluate,
                       matmul, transpose)

DEFAULT_MAX_CONVOLUTION_COLS = 4000


class NotNullVectorError(ValueError):
    """The supplied vector is not in the required nullspace."""


class PartitionError(ValueError):
    """Vectors do not match the block partition of the l-ification."""


class SizeGuardExceeded(RuntimeError):
    """A convolution matrix would exceed the configured size."""


@dataclass(frozen=True)
class RecoveryContext:
    """Partition data and index shifts of an l-ification.

    ``kind`` is ``"block-kronecker"`` or ``"general-sbmb"``.  For the
    general kind the embeddings carry ``K_hat1`` and ``K_hat2``.
    """

    kind: str
    ell: int
    m: int
    n: int
    shift_right: int
    shift_left: int
    epsilon: Optional[int] = None
    eta: Optional[int] = None
    embedding1: Optional[EmbeddingPair] = None
    embedding2: Optional[EmbeddingPair] = None
    m1: int = 0
    m2: int = 0

    @classmethod
    def from_sbmb(cls, sbmb):
        if isinstance(sbmb, BlockKroneckerPolynomial):
            return cls.kronecker(sbmb.epsilon, sbmb.eta, sbmb.ell, sbmb.m, sbmb.n)
        return cls("general-sbmb", sbmb.ell, sbmb.m, sbmb.n, sbmb.deg_N1, sbmb.deg_N2,
                   embedding1=sbmb.embedding1, embedding2=sbmb.embedding2,
                   m1=sbmb.m1, m2=sbmb.m2)

    @classmethod
    def kronecker(cls, epsilon, eta, ell, m, n):
        return cls("block-kronecker", ell, m, n, epsilon * ell, eta * ell,
                   epsilon=epsilon, eta=eta, m1=epsilon * n, m2=eta * m)


# minimal indices -------------------------------------------------------------

def shift_minimal_indices(indices, ctx, side, inverse=False):
    """Add (or with ``inverse`` subtract) the uniform shift of the given side."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    s = ctx.shift_right if side == "right" else ctx.shift_left
    if inverse:
        out = [i - s for i in indices]
        if any(i < 0 for i in out):
            raise ValueError("inverse shift produced a negative index; "
                             "the l-ification and polynomial do not match")
        return sorted(out)
    return sorted(i + s for i in indices)


def normal_rank(P, seed=0):
    """Exact normal rank: the maximum rank of ``P`` over ``min(m,n)*d + 1`` distinct points."""
    if P.field != "Q":
        raise ValueError("normal rank needs the exact backend")
    m, n = P.shape
    if m == 0 or n == 0:
        return 0
    count = min(m, n) * P.grade + 1
    rng = random.Random(seed)
    points = set()
    while len(points) < count:
        points.add(Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 3)))
    best = 0
    for x in sorted(points):
        best = max(best, exact.rank(evaluate(P, x)))
        if best == min(m, n):
            break
    return best


def _right_indices(P, r, max_cols):
    n = P.cols
    want = n - r
    if want == 0:
        return []
    out = []
    prev_dim = 0
    prev_count = 0
    j = 0
    bound = r * P.grade
    while len(out) < want:
        if j > bound:
            raise AssertionError("minimal index search exceeded the degree bound")
        if (j + 1) * n > max_cols:
            raise SizeGuardExceeded(f"C_{j}(P) would have {(j + 1) * n} columns")
        C = convolution_matrix(P, j).matrix
        dim = (j + 1) * n - exact.rank(C)
        count = dim - prev_dim
        out.extend([j] * (count - prev_count))
        prev_dim, prev_count = dim, count
        j += 1
    return out


def minimal_indices_of(P, max_cols=DEFAULT_MAX_CONVOLUTION_COLS):
    """Right and left minimal indices from the rank profile of ``C_j(P)``."""
    r = normal_rank(P)
    right = _right_indices(P, r, max_cols)
    left = _right_indices(transpose(P), r, max_cols)
    return Eigenstructure(right_minimal_indices=right, left_minimal_indices=left,
                          normal_rank=r)


def right_minimal_basis(P, max_cols=DEFAULT_MAX_CONVOLUTION_COLS):
    """A right minimal basis as the columns of a matrix polynomial (``None`` if trivial).

    Degree by degree, null vectors of ``C_j(P)`` are added when they are not
    spanned by shifts of the vectors already chosen.
    """
    r = normal_rank(P)
    n = P.cols
    want = n - r
    if want == 0:
        return None
    chosen = []  # (degree, coefficient vectors low-first)
    j = 0
    while len(chosen) < want:
        if j > r * P.grade:
            raise AssertionError("minimal basis search exceeded the degree bound")
        if (j + 1) * n > max_cols:
            raise SizeGuardExceeded(f"C_{j}(P) would have {(j + 1) * n} columns")
        Nul = exact.nullspace(convolution_matrix(P, j).matrix)
        # stacked high-first: [x_j; ...; x_0]
        span = []
        for deg, vecs in chosen:
            for s in range(j - deg + 1):
                v = np.zeros((j + 1) * n, dtype=object)
                for t, c in enumerate(vecs):
                    p = t + s
                    v[(j - p) * n:(j - p + 1) * n] = c
                span.append(v)
        base_rank = exact.rank(np.array(span, dtype=object)) if span else 0
        for k in range(Nul.shape[1]):
            cand = Nul[:, k]
            trial = span + [cand]
            rk = exact.rank(np.array(trial, dtype=object))
            if rk > base_rank:
                span = trial
                base_rank = rk
                vecs = [cand[(j - t) * n:(j - t + 1) * n] for t in range(j + 1)]
                chosen.append((j, vecs))
                if len(chosen) == want:
                    break
        j += 1
    g = max(d for d, _ in chosen)
    coeffs = [_zeros(n, len(chosen), "Q") for _ in range(g + 1)]
    for col, (deg, vecs) in enumerate(chosen):
        for t, c in enumerate(vecs):
            coeffs[t][:, col] = c
    return MatrixPolynomial(coeffs, "Q")


def left_minimal_basis(P, max_cols=DEFAULT_MAX_CONVOLUTION_COLS):
    """Left minimal basis as the rows of a matrix polynomial."""
    R = right_minimal_basis(transpose(P), max_cols)
    return None if R is None else transpose(R)


def column_degrees(R):
    return [transpose(R).block(i, i + 1, 0, R.rows).degree() for i in range(R.cols)]


# null vector lifts -----------------------------------------------------------

def _as_columns(h):
    return h if isinstance(h, MatrixPolynomial) else MatrixPolynomial([np.asarray(h).reshape(-1, 1)])


def lift_right_null_vector(h, sbmb):
    """``z = [N1^T; -N_hat2 M N1^T] h`` for ``h`` in the right nullspace of ``Q``."""
    h = _as_columns(h)
    if h.is_zero():
        raise NotNullVectorError("zero vector")
    if sbmb.embedding2 is None and sbmb.K2 is not None:
        raise ValueError("lift needs the embedding of (K2, N2)")
    Q = q_of(sbmb)
    if h.field == "Q" and not matmul(Q, h).is_zero():
        raise NotNullVectorError("h is not in the right nullspace of Q")
    N1T = transpose(sbmb.N1)
    top = matmul(N1T, h)
    if sbmb.K2 is None:
        return top
    bottom = -matmul(sbmb.embedding2.N_hat, matmul(sbmb.M, top))
    return block([[top], [bottom]])


def lift_left_null_vector(g, sbmb):
    """``w^T = g^T [N2, -N2 M N_hat1^T]`` for ``g`` in the left nullspace of ``Q``.

    ``g`` and the result are columns.
    """
    g = _as_columns(g)
    if g.is_zero():
        raise NotNullVectorError("zero vector")
    if sbmb.embedding1 is None and sbmb.K1 is not None:
        raise ValueError("lift needs the embedding of (K1, N1)")
    Q = q_of(sbmb)
    gT = transpose(g)
    if g.field == "Q" and not matmul(gT, Q).is_zero():
        raise NotNullVectorError("g is not in the left nullspace of Q")
    left = matmul(gT, sbmb.N2)
    if sbmb.K1 is None:
        return transpose(left)
    right = -matmul(left, matmul(sbmb.M, transpose(sbmb.embedding1.N_hat)))
    return transpose(block([[left, right]]))


def _kron_block(ctx, side, which):
    if side == "right":
        size, first = ctx.n, ctx.epsilon + 1
        total = (ctx.epsilon + 1) * ctx.n + ctx.eta * ctx.m
    else:
        size, first = ctx.m, ctx.eta + 1
        total = (ctx.eta + 1) * ctx.m + ctx.epsilon * ctx.n
    idx = first - 1 if which == "last" else 0
    return idx * size, (idx + 1) * size, total


def extract_minimal_basis_kronecker(vectors, ctx, side, certify=False, P=None):
    """Select the ``(eps+1)``-th (right) or ``(eta+1)``-th (left) block of each vector.

    ``vectors`` is a list of column polynomials or one matrix whose columns
    are the vectors.  With ``certify`` and ``P`` the result is checked to
    be a minimal basis of the corresponding nullspace of ``P``.
    """
    if ctx.kind != "block-kronecker":
        raise ValueError("context is not of block Kronecker kind")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if isinstance(vectors, MatrixPolynomial):
        vectors = [vectors.block(0, vectors.rows, j, j + 1) for j in range(vectors.cols)]
    if not vectors:
        return []
    r0, r1, total = _kron_block(ctx, side, "last")
    out = []
    for v in vectors:
        if v.rows != total:
            raise PartitionError(f"vector has {v.rows} rows, partition needs {total}")
        out.append(v.block(r0, r1, 0, 1))
    if certify:
        _certify_basis(out, P, side)
    return out


def _certify_basis(cols, P, side):
    from .minbases import is_minimal_basis
    if P is None:
        raise ValueError("certification needs P")
    g = max(c.grade for c in cols)
    R = block([[c.with_grade(g) for c in cols]])
    prod = matmul(P, R) if side == "right" else matmul(transpose(P), R)
    if not prod.is_zero():
        raise AssertionError("recovered vectors are not null vectors of P")
    expected = P.cols - normal_rank(P) if side == "right" else P.rows - normal_rank(P)
    if R.cols != expected:
        raise AssertionError("recovered basis has the wrong size")
    if not is_minimal_basis(transpose(R)):
        raise AssertionError("recovered vectors are not a minimal basis")


def recover_minimal_basis_general(R_L, sbmb, side="right"):
    """``[K_hat1, 0] R_L`` (right) or ``[K_hat2, 0] R_L`` (left); columns are vectors."""
    if R_L is None:
        return None
    if side == "right":
        E, K, width = sbmb.embedding1, sbmb.K1, sbmb.n + sbmb.m1
    elif side == "left":
        E, K, width = sbmb.embedding2, sbmb.K2, sbmb.m + sbmb.m2
    else:
        raise ValueError("side must be 'left' or 'right'")
    if K is None:
        return R_L.block(0, width, 0, R_L.cols)
    if E is None:
        raise ValueError("recovery needs the embedding")
    Kh = E.K_hat
    top = R_L.block(0, width, 0, R_L.cols)
    return matmul(Kh, top)


# eigenvectors ---------------------------------------------------------------

def recover_eigenvector(v, lam0, ctx, side="right", rtol=1e-12):
    """Eigenvector of ``P`` from an eigenvector ``v`` of the l-ification at ``lam0``.

    ``lam0`` may be ``"inf"`` / ``float('inf')`` (Kronecker kind only).  For
    the Kronecker kind in floating point the largest of the first ``eps+1``
    (right) or ``eta+1`` (left) blocks is returned; they are all multiples of
    the same eigenvector.
    """
    v = np.asarray(v)
    if v.ndim != 1:
        v = v.reshape(-1)
    inf = _is_inf(lam0)
    if ctx.kind == "block-kronecker":
        r0, r1, total = _kron_block(ctx, side, "first" if inf else "last")
        if v.shape[0] != total:
            raise PartitionError(f"vector has {v.shape[0]} entries, partition needs {total}")
        x = v[r0:r1]
        if v.dtype != object and not inf:
            # blocks 1..(eps+1) are lambda0^(j ell) x; in floating point the
            # largest one carries the most relative accuracy
            size = r1 - r0
            blocks = [v[i * size:(i + 1) * size] for i in range(r1 // size)]
            x = max(blocks, key=np.linalg.norm)
    else:
        if inf:
            raise NotImplementedError("eigenvalue at infinity needs the block Kronecker kind")
        if side == "right":
            E, width = ctx.embedding1, ctx.n + ctx.m1
        else:
            E, width = ctx.embedding2, ctx.m + ctx.m2
        if E is None:
            raise ValueError("recovery for a general l-ification needs its embedding")
        else:
            Kh = E.K_hat
            if v.dtype == object:
                Khv = evaluate(Kh, lam0)
            else:
                Khv = evaluate(Kh.to_float(), complex(lam0) if np.iscomplexobj(v) or
                               isinstance(lam0, complex) else float(lam0))
            x = Khv.dot(v[:width])
    if v.dtype == object:
        if not any(e != 0 for e in x):
            raise ValueError("extracted block is zero")
    else:
        if np.linalg.norm(x) <= rtol * np.linalg.norm(v):
            raise ValueError("extracted block is numerically zero")
    return x


def _is_inf(lam0):
    if isinstance(lam0, str):
        return lam0.lower() in ("inf", "infinity", "∞")
    try:
        return np.isinf(lam0)
    except TypeError:
        return False


# one-sided factorizations ------------------------------------------------------

def one_sided_residuals(sbmb):
    """``(L F - G Q, E L - Q H)`` for the right and left factorizations; both vanish."""
    Q = q_of(sbmb)
    L = sbmb.L
    f = sbmb.field
    N1T = transpose(sbmb.N1)
    if sbmb.K2 is not None:
        if sbmb.embedding2 is None:
            raise ValueError("embedding of (K2, N2) is required")
        F = block([[N1T], [-matmul(sbmb.embedding2.N_hat, matmul(sbmb.M, N1T))]])
        G = block([[transpose(sbmb.embedding2.K_hat)],
                   [MatrixPolynomial.zeros(sbmb.m1, sbmb.m, 0, f)]]) if sbmb.K1 is not None \
            else transpose(sbmb.embedding2.K_hat)
    else:
        F = N1T
        G = _identity_top(sbmb.m, sbmb.m1, f)
    if sbmb.K1 is not None:
        if sbmb.embedding1 is None:
            raise ValueError("embedding of (K1, N1) is required")
        Eleft = block([[sbmb.N2, -matmul(sbmb.N2, matmul(sbmb.M, transpose(sbmb.embedding1.N_hat)))]])
        H = block([[sbmb.embedding1.K_hat, MatrixPolynomial.zeros(sbmb.n, sbmb.m2, 0, f)]]) \
            if sbmb.K2 is not None else sbmb.embedding1.K_hat
    else:
        Eleft = sbmb.N2
        H = transpose(_identity_top(sbmb.n, sbmb.m2, f))
    r1 = matmul(L, F) - matmul(G, Q)
    r2 = matmul(Eleft, L) - matmul(Q, H)
    return r1, r2


def _identity_top(size, extra, field):
    I = MatrixPolynomial.identity(size, field)
    if extra == 0:
        return I
    return block([[I], [MatrixPolynomial.zeros(extra, size, 0, field)]])


def kronecker_one_sided_residuals(bk, P):
    """Block Kronecker form of the factorizations with ``[e_{eta+1}; 0] (x) P``."""
    from .minbases import kronecker_embedding
    eps, eta, ell, m, n = bk.epsilon, bk.eta, bk.ell, bk.m, bk.n
    f = bk.field
    L = bk.L
    N1T = transpose(bk.N1)
    top = N1T
    if eta > 0:
        E2 = kronecker_embedding(eta, ell, m, f)
        top = block([[N1T], [-matmul(E2.N_hat, matmul(bk.M, N1T))]])
    e = _zeros(L.rows, m, f)
    e[eta * m:(eta + 1) * m, :] = _eye_like(m, f)
    sel = MatrixPolynomial([e], f)
    r1 = matmul(L, top) - matmul(sel, P)
    left = bk.N2
    if eps > 0:
        E1 = kronecker_embedding(eps, ell, n, f)
        left = block([[bk.N2, -matmul(bk.N2, matmul(bk.M, transpose(E1.N_hat)))]])
    e2 = _zeros(n, L.cols, f)
    e2[:, eps * n:(eps + 1) * n] = _eye_like(n, f)
    sel2 = MatrixPolynomial([e2], f)
    r2 = matmul(left, L) - matmul(P, sel2)
    return r1, r2


def _eye_like(n, field):
    return MatrixPolynomial.identity(n, field).coeffs[0]
