"""Worked constructions and a symbolic renderer for companion templates.

The renderer probes an affine builder ``P -> L(P)`` with scalar
monomials ``lambda**i`` and reads off, entry by entry, which multiple of
each coefficient ``P_i`` appears.  This reproduces block matrices such as
``[[lambda^2 P6 + lambda P5, -I_m], ...]`` without any symbolic algebra
package.
"""

from fractions import Fraction

import numpy as np

from .constructors import (BlockKroneckerPolynomial, assemble_sbmb,
                           block_kronecker_companion, frobenius_like_ellification)
from .minbases import EmbeddingPair
from .polycore import MatrixPolynomial, _zeros, block


# rank-one quartic with a symmetric quadratification ------------------------

def quartic_rank_one():
    """``P = diag(lambda^4, 0)``."""
    return MatrixPolynomial.monomial([[1, 0], [0, 0]], 4)


def quartic_wing():
    """``K = [1, -lambda, lambda^2]``, its dual ``N`` and a unimodular embedding."""
    K = MatrixPolynomial([[[1, 0, 0]], [[0, -1, 0]], [[0, 0, 1]]])
    N = MatrixPolynomial([[[0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, 0]]])
    K_hat = MatrixPolynomial([[[0, 1, 0], [0, 0, 1]], [[0, 0, -1], [0, 0, 0]]])
    N_hat = MatrixPolynomial([[[1, 0, 0]]])
    return EmbeddingPair(K=K, K_hat=K_hat, N=N, N_hat=N_hat)


def symmetric_quartic_quadratification():
    """``[M, K^T; K, 0]`` with ``M = diag(lambda^2, 0, 0)``: a symmetric strong
    quadratification of ``diag(lambda^4, 0)``."""
    E = quartic_wing()
    M = MatrixPolynomial.monomial(np.diag([1, 0, 0]).astype(object), 2)
    return assemble_sbmb(M, E.K, E.K, E.N, E.N, embedding1=E, embedding2=E)


# grade-6 companion forms -----------------------------------------------------

def _lift(A, field, grade, power):
    return MatrixPolynomial.monomial(A, power, field, grade=grade)


def _entry(P, terms, grade):
    """Sum of ``lambda**power * P_i`` over ``terms = [(power, i), ...]``."""
    field = P.field
    out = MatrixPolynomial.zeros(P.rows, P.cols, grade, field)
    for power, i in terms:
        out = out + _lift(P.coeffs[i], field, grade, power)
    return out


def grade6_linearization(P):
    """Block Kronecker pencil with ``eps = 3``, ``eta = 2`` and a staircase ``M``."""
    _require_grade(P, 6)
    Z = MatrixPolynomial.zeros(P.rows, P.cols, 1, P.field)
    M = block([
        [_entry(P, [(1, 6)], 1), Z, Z, Z],
        [_entry(P, [(1, 5)], 1), _entry(P, [(1, 4)], 1), Z, Z],
        [Z, _entry(P, [(1, 3)], 1), _entry(P, [(1, 2)], 1), _entry(P, [(1, 1), (0, 0)], 1)],
    ])
    return BlockKroneckerPolynomial(M, 3, 2, 1, P.rows, P.cols)


def grade6_quadratification(P):
    """Block Kronecker quadratic with ``eps = eta = 1`` and a non-Sigma ``M``."""
    _require_grade(P, 6)
    M = block([
        [_entry(P, [(2, 6), (1, 5)], 2), _entry(P, [(1, 3), (0, 2)], 2)],
        [_entry(P, [(2, 4)], 2), _entry(P, [(1, 1), (0, 0)], 2)],
    ])
    return BlockKroneckerPolynomial(M, 1, 1, 2, P.rows, P.cols)


def grade6_cubification(P):
    """Block Kronecker cubic with ``eps = 1``, ``eta = 0``."""
    _require_grade(P, 6)
    M = block([[_entry(P, [(3, 6), (2, 5), (1, 4), (0, 3)], 3),
                _entry(P, [(2, 2), (1, 1), (0, 0)], 3)]])
    return BlockKroneckerPolynomial(M, 1, 0, 3, P.rows, P.cols)


def grade6_sigma_quadratification(P):
    """``Sigma_P`` with ``eps = eta = 1``, ``ell = 2``."""
    _require_grade(P, 6)
    return block_kronecker_companion(P, 1, 1, 2)


def grade6_frobenius_like(P):
    """First Frobenius-like form of degree 2."""
    _require_grade(P, 6)
    return frobenius_like_ellification(P, 2, "first")


def _require_grade(P, d):
    if P.grade != d:
        raise ValueError(f"expected grade {d}, got {P.grade}")


# rendering -----------------------------------------------------------------

_LAM = "λ"


def _lam(t):
    if t == 0:
        return ""
    if t == 1:
        return _LAM
    return f"{_LAM}^{t}"


def _term(coef, t, symbol):
    """One signed monomial ``coef * lambda^t * symbol`` (``symbol`` may be empty)."""
    c = Fraction(coef)
    sign = "-" if c < 0 else "+"
    c = abs(c)
    num, den = c.numerator, c.denominator
    lead = "" if num == 1 else str(num)
    body = " ".join(x for x in (lead, _lam(t), symbol) if x)
    if not body:
        body = "1"
    if den != 1:
        body += f"/{den}"
    return sign, body


def _join(terms):
    if not terms:
        return "0"
    out = ""
    for k, (sign, body) in enumerate(terms):
        if k == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out


def render_polynomial_entry(coeffs, symbol=""):
    """Render ``sum_t coeffs[t] lambda^t`` times ``symbol``, highest power first."""
    terms = [_term(c, t, symbol) for t, c in reversed(list(enumerate(coeffs))) if c != 0]
    return _join(terms)


def render_numeric(P):
    """Entry strings of a scalar-entry exact matrix polynomial."""
    return [[render_polynomial_entry(P.entry(i, j)) for j in range(P.cols)]
            for i in range(P.rows)]


def render_template(builder, d, identity_labels=None):
    """Symbolic block matrix of an affine companion builder at grade ``d``.

    ``builder`` maps a 1x1 polynomial of grade ``d`` to a
    :class:`BlockKroneckerPolynomial`.  ``identity_labels`` gives the
    subscript for identity blocks per block row; by default the first
    ``eta + 1`` rows are ``m`` and the rest ``n``.
    """
    base = builder(MatrixPolynomial.zeros(1, 1, d))
    L0 = base.L
    probes = []
    for i in range(d + 1):
        c = _zeros(1, 1, "Q")
        c[0, 0] = 1
        Li = builder(MatrixPolynomial.monomial(c, i, grade=d)).L
        probes.append(Li - L0)
    if identity_labels is None:
        eta = getattr(base, "eta", 0)
        identity_labels = ["m"] * (eta + 1) + ["n"] * (L0.rows - eta - 1)
    out = []
    for r in range(L0.rows):
        row = []
        for c in range(L0.cols):
            terms = []
            for i in range(d, -1, -1):
                e = probes[i].entry(r, c)
                for t in range(len(e) - 1, -1, -1):
                    if e[t] != 0:
                        terms.append((t, i, e[t]))
            rendered = [_term(coef, t, f"P{i}") for t, i, coef in terms]
            e0 = L0.entry(r, c)
            rendered += [_term(e0[t], t, f"I_{identity_labels[r]}")
                         for t in range(len(e0) - 1, -1, -1) if e0[t] != 0]
            row.append(_join(rendered))
        out.append(row)
    return out


def format_table(rows):
    """Left-aligned columns separated by two spaces."""
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))]
    return "\n".join("  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip() for r in rows)


# golden tables -------------------------------------------------------------

GOLDEN_QUARTIC = [
    ["λ^2", "0", "0", "1"],
    ["0", "0", "0", "-λ"],
    ["0", "0", "0", "λ^2"],
    ["1", "-λ", "λ^2", "0"],
]

GOLDEN_GRADE6_LINEAR = [
    ["λ P6", "0", "0", "0", "-I_m", "0"],
    ["λ P5", "λ P4", "0", "0", "λ I_m", "-I_m"],
    ["0", "λ P3", "λ P2", "λ P1 + P0", "0", "λ I_m"],
    ["-I_n", "λ I_n", "0", "0", "0", "0"],
    ["0", "-I_n", "λ I_n", "0", "0", "0"],
    ["0", "0", "-I_n", "λ I_n", "0", "0"],
]

GOLDEN_GRADE6_QUADRATIC = [
    ["λ^2 P6 + λ P5", "λ P3 + P2", "-I_m"],
    ["λ^2 P4", "λ P1 + P0", "λ^2 I_m"],
    ["-I_n", "λ^2 I_n", "0"],
]

GOLDEN_GRADE6_CUBIC = [
    ["λ^3 P6 + λ^2 P5 + λ P4 + P3", "λ^2 P2 + λ P1 + P0"],
    ["-I_n", "λ^3 I_n"],
]

GOLDEN_GRADE6_SIGMA = [
    ["λ^2 P6 + λ P5", "λ^2 P4 + λ P3", "-I_m"],
    ["0", "λ^2 P2 + λ P1 + P0", "λ^2 I_m"],
    ["-I_n", "λ^2 I_n", "0"],
]

GOLDEN_GRADE6_FROBENIUS_LIKE = [
    ["λ^2 P6 + λ P5", "λ^2 P4 + λ P3", "λ^2 P2 + λ P1 + P0"],
    ["-I_n", "λ^2 I_n", "0"],
    ["0", "-I_n", "λ^2 I_n"],
]

# the middle diagonal block carries P4 as a constant term
GOLDEN_SYMMETRIC_GRADE10 = [
    ["λ^2 P10 + λ P9 + P8", "λ P7/2", "0", "-I_n", "0"],
    ["λ P7/2", "λ^2 P6 + λ P5 + P4", "λ P3/2", "λ^2 I_n", "-I_n"],
    ["0", "λ P3/2", "λ^2 P2 + λ P1 + P0", "0", "λ^2 I_n"],
    ["-I_n", "λ^2 I_n", "0", "0", "0"],
    ["0", "-I_n", "λ^2 I_n", "0", "0"],
]


def symmetric_labels(base):
    return ["n"] * base.L.rows
