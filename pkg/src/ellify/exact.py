"""Exact rational kernels.

Constant-matrix linear algebra over Q (rank, rref, nullspace, particular
solutions) is delegated to python-flint.  Scalar polynomial arithmetic,
the subresultant gcd and the fraction-free determinant of polynomial
matrices are implemented here because they operate on our own
coefficient-tuple representation.

Scalars are Python ``int`` or ``fractions.Fraction``.  Scalar polynomials
are tuples of scalars, lowest degree first, with no trailing zeros; the
zero polynomial is the empty tuple.
"""

from fractions import Fraction

import flint
import numpy as np


class InconsistentSystemError(ValueError):
    """Raised when a linear system has no exact solution."""


def normalize(x):
    """Return ``x`` as an int when integral, else as a Fraction."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, flint.fmpq):
        p, q = int(x.p), int(x.q)
        return p if q == 1 else Fraction(p, q)
    if isinstance(x, flint.fmpz):
        return int(x)
    raise TypeError(f"not an exact rational scalar: {x!r} ({type(x).__name__})")


def _all_int(A):
    return all(type(v) is int for v in A.flat)


def _to_flint(A):
    A = np.asarray(A, dtype=object)
    r, c = A.shape
    if _all_int(A):
        return flint.fmpz_mat(r, c, [int(v) for v in A.flat])
    entries = [flint.fmpq(v.numerator, v.denominator) if isinstance(v, Fraction)
               else flint.fmpq(int(v)) for v in A.flat]
    return flint.fmpq_mat(r, c, entries)


def _from_flint(F):
    r, c = F.nrows(), F.ncols()
    out = np.empty((r, c), dtype=object)
    vals = [normalize(v) for v in F.entries()]
    for i in range(r):
        for j in range(c):
            out[i, j] = vals[i * c + j]
    return out


def rank(A):
    """Exact rank of a constant rational matrix."""
    A = np.asarray(A, dtype=object)
    if A.size == 0:
        return 0
    return int(_to_flint(A).rank())


def rref(A):
    """Reduced row echelon form and pivot columns of a constant matrix."""
    A = np.asarray(A, dtype=object)
    r, c = A.shape
    if A.size == 0:
        return np.zeros((r, c), dtype=object), []
    F = _to_flint(A)
    if isinstance(F, flint.fmpz_mat):
        F = flint.fmpq_mat(F)
    R, rk = F.rref()
    R = _from_flint(R)
    pivots = []
    for i in range(int(rk)):
        row = R[i]
        j = next(j for j in range(c) if row[j] != 0)
        pivots.append(j)
    return R, pivots


def nullspace(A):
    """Basis of the right nullspace, returned as the columns of a matrix."""
    A = np.asarray(A, dtype=object)
    r, c = A.shape
    R, pivots = rref(A)
    free = [j for j in range(c) if j not in set(pivots)]
    N = np.zeros((c, len(free)), dtype=object)
    for k, f in enumerate(free):
        N[f, k] = 1
        for i, p in enumerate(pivots):
            N[p, k] = -R[i, f]
    return N


def solve_particular(A, B):
    """One exact solution of ``A X = B`` with every free variable set to zero."""
    A = np.asarray(A, dtype=object)
    B = np.asarray(B, dtype=object)
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    r, c = A.shape
    if B.shape[0] != r:
        raise ValueError("row count mismatch")
    R, pivots = rref(np.hstack([A, B]))
    pivots_a = [p for p in pivots if p < c]
    if len(pivots_a) != len(pivots):
        raise InconsistentSystemError("system has no exact solution")
    X = np.zeros((c, B.shape[1]), dtype=object)
    for i, p in enumerate(pivots_a):
        X[p, :] = R[i, c:]
    return X[:, 0] if vec else X


def solve_unique(A, B):
    """Solve a square nonsingular system exactly."""
    A = np.asarray(A, dtype=object)
    B = np.asarray(B, dtype=object)
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix is not square")
    if A.shape[0] == 0:
        X = np.zeros((0, B.shape[1]), dtype=object)
        return X[:, 0] if vec else X
    FA = _to_flint(A)
    FB = _to_flint(B)
    if isinstance(FA, flint.fmpz_mat):
        FA = flint.fmpq_mat(FA)
    if isinstance(FB, flint.fmpz_mat):
        FB = flint.fmpq_mat(FB)
    try:
        X = _from_flint(FA.solve(FB))
    except ZeroDivisionError as exc:
        raise InconsistentSystemError("matrix is singular") from exc
    return X[:, 0] if vec else X


def det(A):
    """Exact determinant of a constant square matrix."""
    A = np.asarray(A, dtype=object)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix is not square")
    if A.shape[0] == 0:
        return 1
    F = _to_flint(A)
    return normalize(F.det())


# scalar polynomials ---------------------------------------------------------

def ptrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(normalize(v) for v in p)


def to_fmpq_poly(p):
    """Coefficient tuple (low to high) as a flint polynomial."""
    return flint.fmpq_poly([flint.fmpq(Fraction(v).numerator, Fraction(v).denominator)
                            for v in p])


def from_fmpq_poly(f):
    return ptrim([normalize(c) for c in f.coeffs()])


def poly_det(entries):
    """Determinant of a square matrix of scalar polynomials, as an fmpq_poly.

    ``entries`` is a list of rows of coefficient tuples.  Fraction-free
    Bareiss elimination with row pivoting; every division is exact.
    """
    a = [[to_fmpq_poly(e) for e in row] for row in entries]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if n == 0:
        return flint.fmpq_poly([1])
    sign = 1
    prev = flint.fmpq_poly([1])
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return flint.fmpq_poly([])
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]
