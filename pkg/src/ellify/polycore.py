"""Matrix polynomials with an explicit grade.

A :class:`MatrixPolynomial` stores ``grade + 1`` coefficient matrices,
lowest power first.  The grade is part of the value: reversal and every
companion construction are defined relative to it, so it is never
inferred from the coefficients.

Two scalar backends are supported.  ``"Q"`` keeps entries as Python
``int``/``Fraction`` inside numpy object arrays and is exact.  ``"F64"``
uses float64 arrays.  Mixing the two in one operation is an error.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact

FIELDS = ("Q", "F64")


class FieldMismatchError(TypeError):
    """Raised when exact and floating data meet in one operation."""


class _ZeroDegree:
    """Degree of the zero polynomial."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ZERO_DEGREE"

    def __reduce__(self):
        return (_ZeroDegree, ())


ZERO_DEGREE = _ZeroDegree()


def _coerce_q(x):
    if isinstance(x, (float, complex, np.floating, np.complexfloating)):
        raise FieldMismatchError(f"floating value {x!r} in an exact matrix")
    if isinstance(x, str):
        return exact.normalize(Fraction(x))
    return exact.normalize(x)


def _as_array(c, field):
    if field == "Q":
        a = np.asarray(c, dtype=object)
        if a.ndim != 2:
            raise ValueError("coefficients must be 2-D")
        out = np.empty(a.shape, dtype=object)
        for idx, v in np.ndenumerate(a):
            out[idx] = _coerce_q(v)
        return out
    a = np.asarray(c)
    if a.dtype == object:
        if any(isinstance(v, Fraction) for v in a.flat):
            raise FieldMismatchError("exact Fraction in a floating matrix")
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("coefficients must be 2-D")
    return a


class MatrixPolynomial:
    """An ``m x n`` matrix polynomial of fixed grade over Q or F64."""

    __slots__ = ("_coeffs", "field", "rows", "cols", "_int64")

    def __init__(self, coeffs, field="Q", shape=None):
        if field not in FIELDS:
            raise ValueError(f"unknown field {field!r}")
        coeffs = [_as_array(c, field) for c in coeffs]
        if not coeffs:
            raise ValueError("need at least one coefficient (grade >= 0)")
        shapes = {c.shape for c in coeffs}
        if len(shapes) != 1:
            raise ValueError(f"coefficient shapes differ: {sorted(shapes)}")
        if shape is not None and tuple(shape) != coeffs[0].shape:
            raise ValueError("shape does not match coefficients")
        self._set(coeffs, field)

    def _set(self, coeffs, field):
        for c in coeffs:
            c.flags.writeable = False
        self._coeffs = tuple(coeffs)
        self.field = field
        self.rows, self.cols = coeffs[0].shape
        self._int64 = None

    def _int_view(self):
        """``(max |entry|, int64 array, D)`` with ``coefficients = array / D``
        for exact data over a common denominator that fits, else False.

        Computed once; the coefficients never change after construction.
        """
        if self._int64 is None:
            self._int64 = _scaled_int(self._coeffs) if self.field == "Q" else False
        return self._int64

    @classmethod
    def _raw(cls, coeffs, field):
        obj = cls.__new__(cls)
        obj._set(list(coeffs), field)
        return obj

    # construction helpers -------------------------------------------------

    @classmethod
    def zeros(cls, rows, cols, grade=0, field="Q"):
        return cls._raw([_zeros(rows, cols, field) for _ in range(grade + 1)], field)

    @classmethod
    def identity(cls, n, field="Q", grade=0):
        c = [_zeros(n, n, field) for _ in range(grade + 1)]
        c[0] = _eye(n, field)
        return cls._raw(c, field)

    @classmethod
    def constant(cls, A, field="Q", grade=0):
        A = _as_array(A, field)
        return cls._raw([A] + [_zeros(*A.shape, field) for _ in range(grade)], field)

    @classmethod
    def monomial(cls, A, power, field="Q", grade=None):
        """``A * lambda**power`` at the given grade (default ``power``)."""
        A = _as_array(A, field)
        grade = power if grade is None else grade
        if grade < power:
            raise ValueError("grade smaller than the power")
        c = [_zeros(*A.shape, field) for _ in range(grade + 1)]
        c[power] = A
        return cls._raw(c, field)

    # basic properties -----------------------------------------------------

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def grade(self):
        return len(self._coeffs) - 1

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, i):
        return self._coeffs[i]

    def degree(self):
        """Actual degree, or :data:`ZERO_DEGREE` for the zero polynomial."""
        for t in range(self.grade, -1, -1):
            if self._coeffs[t].any():
                return t
        return ZERO_DEGREE

    def is_zero(self):
        return self.degree() is ZERO_DEGREE

    def entry(self, i, j):
        """Entry ``(i, j)`` as a trimmed coefficient tuple (exact backend)."""
        return exact.ptrim([c[i, j] for c in self._coeffs])

    def with_grade(self, grade):
        """Same polynomial viewed at another grade."""
        if grade < 0:
            raise ValueError("grade must be nonnegative")
        if grade >= self.grade:
            extra = [_zeros(self.rows, self.cols, self.field)
                     for _ in range(grade - self.grade)]
            return MatrixPolynomial._raw(list(self._coeffs) + extra, self.field)
        for c in self._coeffs[grade + 1:]:
            if c.any():
                raise ValueError("cannot lower grade below the degree")
        return MatrixPolynomial._raw(self._coeffs[:grade + 1], self.field)

    def block(self, r0, r1, c0, c1):
        return MatrixPolynomial._raw([c[r0:r1, c0:c1].copy() for c in self._coeffs],
                                     self.field)

    def to_float(self):
        if self.field == "F64":
            return self
        return MatrixPolynomial._raw([c.astype(np.float64) for c in self._coeffs], "F64")

    def stacked(self):
        """Coefficients stacked horizontally, ``[P_0, P_1, ..., P_g]``."""
        return np.hstack(self._coeffs)

    def frobenius_norm(self):
        return float(np.linalg.norm(self.to_float().stacked().astype(np.float64)))

    # comparisons ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        if (self.field, self.shape, self.grade) != (other.field, other.shape, other.grade):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self._coeffs, other._coeffs))

    def __hash__(self):
        return hash((self.field, self.shape, self.grade,
                     tuple(tuple(c.flat) for c in self._coeffs)))

    def same_polynomial(self, other):
        """Equality of values, ignoring the declared grade."""
        g = max(self.grade, other.grade)
        return self.with_grade(g) == other.with_grade(g)

    def __repr__(self):
        return (f"MatrixPolynomial({self.rows}x{self.cols}, grade={self.grade}, "
                f"field={self.field})")

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, -other)

    def __neg__(self):
        return scale(self, -1)

    def __matmul__(self, other):
        return matmul(self, other)

    def __mul__(self, c):
        return scale(self, c)

    __rmul__ = __mul__

    @property
    def T(self):
        return transpose(self)


def _zeros(r, c, field):
    if field == "Q":
        out = np.empty((r, c), dtype=object)
        out.fill(0)
        return out
    return np.zeros((r, c))


def _eye(n, field):
    out = _zeros(n, n, field)
    for i in range(n):
        out[i, i] = 1 if field == "Q" else 1.0
    return out


def _check_fields(*ps):
    fields = {p.field for p in ps}
    if len(fields) > 1:
        raise FieldMismatchError("cannot mix Q and F64 matrix polynomials")
    return fields.pop()


def _check_scalar(x, field):
    if field == "Q":
        return _coerce_q(x)
    if isinstance(x, Fraction):
        raise FieldMismatchError("exact Fraction used with a floating polynomial")
    return x


def add(P, Q):
    """Sum at grade ``max(grade P, grade Q)``."""
    field = _check_fields(P, Q)
    if P.shape != Q.shape:
        raise ValueError(f"shape mismatch {P.shape} vs {Q.shape}")
    g = max(P.grade, Q.grade)
    a, b = P.with_grade(g), Q.with_grade(g)
    return MatrixPolynomial._raw([x + y for x, y in zip(a.coeffs, b.coeffs)], field)


def scale(P, c):
    c = _check_scalar(c, P.field)
    if P.field == "Q":
        out = []
        for A in P.coeffs:
            B = A * c
            if isinstance(c, Fraction):
                B = np.vectorize(exact.normalize, otypes=[object])(B) if B.size else B
            out.append(B)
        return MatrixPolynomial._raw(out, "Q")
    return MatrixPolynomial._raw([A * c for A in P.coeffs], P.field)


def transpose(P):
    return MatrixPolynomial._raw([A.T.copy() for A in P.coeffs], P.field)


def _scaled_int(arrs):
    """``(bound, int64 array, D)`` with ``arrs = array / D``, or False."""
    dens = set()
    for A in arrs:
        for v in A.flat:
            t = type(v)
            if t is Fraction:
                dens.add(v.denominator)
            elif t is not int:
                return False
    D = math.lcm(*dens) if dens else 1
    if D == 1:
        flat = [v for A in arrs for v in A.flat]
    else:
        flat = [v * D if type(v) is int else v.numerator * (D // v.denominator)
                for A in arrs for v in A.flat]
    bound = max(map(abs, flat), default=0)
    if bound >= 2 ** 62:
        return False
    shape = (len(arrs),) + arrs[0].shape
    return bound, np.array(flat, dtype=np.int64).reshape(shape), D


def _over(A, D):
    """Object array ``A / D`` with integral entries kept as ints."""
    out = np.empty(A.shape, dtype=object)
    for idx, a in np.ndenumerate(A):
        a = int(a)
        out[idx] = a // D if a % D == 0 else Fraction(a, D)
    return out


def matmul(P, Q):
    """Product at grade ``grade P + grade Q``.

    Zero coefficient matrices are skipped.  Integer-only exact products whose
    result provably fits in int64 run through numpy integer arithmetic.
    """
    field = _check_fields(P, Q)
    if P.cols != Q.rows:
        raise ValueError(f"inner dimensions differ: {P.shape} @ {Q.shape}")
    g = P.grade + Q.grade
    if field == "Q":
        vp, vq = P._int_view(), Q._int_view()
        if vp and vq:
            terms = min(P.grade, Q.grade) + 1
            if vp[0] * vq[0] * terms * max(P.cols, 1) < 2 ** 62:
                # all coefficient products in one broadcast, then shifted sums
                prod = vp[1][:, None] @ vq[1][None, :]
                acc = np.zeros((g + 1, P.rows, Q.cols), dtype=np.int64)
                for i in range(P.grade + 1):
                    acc[i:i + Q.grade + 1] += prod[i]
                D = vp[2] * vq[2]
                if D == 1:
                    res = MatrixPolynomial._raw(list(acc.astype(object)), field)
                    res._int64 = (int(np.abs(acc).max(initial=0)), acc, 1)
                    acc.flags.writeable = False
                else:
                    res = MatrixPolynomial._raw(list(_over(acc, D)), field)
                return res
    out = [_zeros(P.rows, Q.cols, field) for _ in range(g + 1)]
    pa = [(i, A) for i, A in enumerate(P.coeffs) if A.any()]
    qb = [(j, B) for j, B in enumerate(Q.coeffs) if B.any()]
    if not pa or not qb:
        return MatrixPolynomial._raw(out, field)
    for i, A in pa:
        for j, B in qb:
            out[i + j] = out[i + j] + A @ B
    if field == "Q":
        out = [_normalize_array(o) for o in out]
    return MatrixPolynomial._raw(out, field)


def _normalize_array(A):
    if A.size == 0:
        return A
    if all(type(v) is int for v in A.flat):
        return A
    out = np.empty(A.shape, dtype=object)
    for idx, v in np.ndenumerate(A):
        out[idx] = exact.normalize(v)
    return out


def evaluate(P, x):
    """Evaluate ``P`` at a scalar by Horner's rule."""
    if P.field == "Q":
        x = _coerce_q(x)
        acc = P.coeffs[-1].copy()
        for A in reversed(P.coeffs[:-1]):
            acc = acc * x + A
        return _normalize_array(acc)
    x = _check_scalar(x, P.field)
    acc = np.array(P.coeffs[-1], dtype=np.result_type(P.coeffs[-1], type(x)))
    for A in reversed(P.coeffs[:-1]):
        acc = acc * x + A
    return acc


def reversal(P, d=None):
    """``lambda**d * P(1/lambda)``; ``d`` defaults to the grade and may not be below the degree."""
    d = P.grade if d is None else d
    Pd = P.with_grade(d)
    return MatrixPolynomial._raw(list(reversed(Pd.coeffs)), P.field)


def kron_identity_right(P, p):
    """``P (x) I_p``: each entry ``e`` becomes ``e * I_p``."""
    out = []
    for A in P.coeffs:
        B = _zeros(A.shape[0] * p, A.shape[1] * p, P.field)
        for a in range(p):
            B[a::p, a::p] = A
        out.append(B)
    return MatrixPolynomial._raw(out, P.field)


def substitute_power(P, ell):
    """``P(lambda**ell)`` at grade ``ell * grade P``."""
    if ell < 1:
        raise ValueError("ell must be positive")
    g = P.grade * ell
    out = [_zeros(P.rows, P.cols, P.field) for _ in range(g + 1)]
    for t, A in enumerate(P.coeffs):
        out[t * ell] = A.copy()
    return MatrixPolynomial._raw(out, P.field)


def row_degrees(P):
    """Degree of each row; :data:`ZERO_DEGREE` for zero rows."""
    degs = []
    for i in range(P.rows):
        d = ZERO_DEGREE
        for t in range(P.grade, -1, -1):
            if P.coeffs[t][i].any():
                d = t
                break
        degs.append(d)
    return degs


def highest_row_degree_matrix(P):
    """Constant matrix whose row ``i`` is the coefficient of ``lambda**d_i`` in row ``i``."""
    H = _zeros(P.rows, P.cols, P.field)
    for i, d in enumerate(row_degrees(P)):
        if d is ZERO_DEGREE:
            raise ValueError(f"row {i} is zero; highest row degree matrix undefined")
        H[i] = P.coeffs[d][i]
    return H


def block(rows):
    """Assemble a block matrix; ``None`` entries are zero blocks.

    Every block row needs one block with a known height and every block
    column one with a known width.  Grades are unified to the maximum.
    """
    heights = []
    for r in rows:
        h = {b.rows for b in r if b is not None}
        if len(h) != 1:
            raise ValueError("inconsistent or unknown block row height")
        heights.append(h.pop())
    widths = []
    for j in range(len(rows[0])):
        w = {r[j].cols for r in rows if r[j] is not None}
        if len(w) != 1:
            raise ValueError("inconsistent or unknown block column width")
        widths.append(w.pop())
    present = [b for r in rows for b in r if b is not None]
    field = _check_fields(*present)
    g = max(b.grade for b in present)
    if field == "Q":
        out = np.empty((g + 1, sum(heights), sum(widths)), dtype=object)
        out.fill(0)
    else:
        out = np.zeros((g + 1, sum(heights), sum(widths)))
    r0 = 0
    for i, r in enumerate(rows):
        c0 = 0
        for j, b in enumerate(r):
            if b is not None:
                for t, C in enumerate(b.coeffs):
                    out[t, r0:r0 + heights[i], c0:c0 + widths[j]] = C
            c0 += widths[j]
        r0 += heights[i]
    return MatrixPolynomial._raw(list(out), field)


def hstack(blocks):
    return block([list(blocks)])


def vstack(blocks):
    return block([[b] for b in blocks])


def random_polynomial(rows, cols, grade, rng, field="Q", low=-9, high=9, full_grade=True):
    """Random matrix polynomial with small integer (Q) or normal (F64) entries."""
    if field == "Q":
        coeffs = [rng.integers(low, high + 1, size=(rows, cols)).astype(object)
                  for _ in range(grade + 1)]
        coeffs = [np.vectorize(int, otypes=[object])(c) if c.size else c for c in coeffs]
        if full_grade and rows and cols:
            while not coeffs[-1].any():
                coeffs[-1] = np.vectorize(int, otypes=[object])(
                    rng.integers(low, high + 1, size=(rows, cols)).astype(object))
        return MatrixPolynomial._raw(coeffs, "Q")
    return MatrixPolynomial._raw([rng.standard_normal((rows, cols)) for _ in range(grade + 1)],
                                 "F64")


@dataclass
class Eigenstructure:
    """Eigenvalues, minimal indices and normal rank of a matrix polynomial.

    Fields that were not computed stay ``None``.
    """

    finite_eigenvalues: list = None
    has_infinite_eigenvalue: bool = None
    infinite_multiplicity: int = None
    right_minimal_indices: list = None
    left_minimal_indices: list = None
    normal_rank: int = None


# text format ----------------------------------------------------------------

def _fmt(v, field):
    if field == "Q":
        if isinstance(v, Fraction):
            return f"{v.numerator}/{v.denominator}"
        return str(int(v))
    return repr(float(v))


def dumps(P):
    """Serialize to the ``mp`` text format."""
    lines = [f"mp {P.rows} {P.cols} {P.grade} {P.field}"]
    for A in P.coeffs:
        for i in range(P.rows):
            lines.append(" ".join(_fmt(v, P.field) for v in A[i]))
    return "\n".join(lines) + "\n"


def loads(text):
    """Parse the ``mp`` text format.  Blank lines and ``#`` comments are ignored."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty input")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "mp":
        raise ValueError(f"bad header: {lines[0]!r}")
    m, n, d = (int(x) for x in head[1:4])
    field = head[4]
    if field not in FIELDS:
        raise ValueError(f"unknown field {field!r}")
    if min(m, n, d) < 0:
        raise ValueError("negative size in header")
    body = lines[1:]
    if len(body) != (d + 1) * m:
        raise ValueError(f"expected {(d + 1) * m} rows, found {len(body)}")
    coeffs = []
    for t in range(d + 1):
        A = _zeros(m, n, field)
        for i in range(m):
            toks = body[t * m + i].split()
            if len(toks) != n:
                raise ValueError(f"row {t * m + i + 1}: expected {n} entries")
            for j, tok in enumerate(toks):
                A[i, j] = exact.normalize(Fraction(tok)) if field == "Q" else float(tok)
        coeffs.append(A)
    return MatrixPolynomial._raw(coeffs, field)


def read_mp(path):
    with open(path) as fh:
        return loads(fh.read())


def write_mp(path, P):
    with open(path, "w") as fh:
        fh.write(dumps(P))
