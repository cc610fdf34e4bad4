"""Exact certification of l-ifications and the floating-point eigenvalue pipeline."""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from . import exact
from .constructors import frobenius_companion, q_of
from .minbases import (CertificationError, EmbeddingPair, embedding_holds, is_dual_pair,
                       is_row_reduced)
from .polycore import (Eigenstructure, MatrixPolynomial, evaluate, matmul,
                       reversal, row_degrees, transpose)

INF_TOL = 1e-12

CHECK_NAMES = ("shape", "dual-certification", "q-identity", "strongness-row-degrees",
               "reversal-structure", "anti-triangular-reduction", "eigenvalue-agreement")


class SingularPolynomialError(ValueError):
    """The matrix polynomial is not regular."""


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, name, passed, witness=""):
        """Record a check; ``passed=None`` marks it as skipped."""
        self.checks.append((name, None if passed is None else bool(passed), witness))

    @property
    def overall(self):
        return all(p is not False for _, p, _ in self.checks)

    def check(self, name):
        for n, p, w in self.checks:
            if n == name:
                return p, w
        raise KeyError(name)

    def format(self):
        tag = {True: "PASS", False: "FAIL", None: "SKIP"}
        lines = [f"{tag[p]}  {n}" + (f"  ({w})" if w else "")
                 for n, p, w in self.checks]
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


# exact certification ---------------------------------------------------------

@lru_cache(maxsize=64)
def _trivial_embedding(size, field):
    I = MatrixPolynomial.identity(size, field)
    empty = MatrixPolynomial.zeros(0, size, 0, field)
    return EmbeddingPair(K=empty, K_hat=I, N=I, N_hat=empty)


def _wing(sbmb, side):
    if side == 1:
        return sbmb.K1, sbmb.N1, sbmb.embedding1, sbmb.pair1, sbmb.n + sbmb.m1
    return sbmb.K2, sbmb.N2, sbmb.embedding2, sbmb.pair2, sbmb.m + sbmb.m2


def _effective_embedding(sbmb, side):
    K, N, E, _, width = _wing(sbmb, side)
    if K is None:
        return _trivial_embedding(width, sbmb.field)
    return E


def _first_difference(A, B):
    g = max(A.grade, B.grade)
    A, B = A.with_grade(g), B.with_grade(g)
    for t in range(g + 1):
        diff = np.argwhere(A.coeffs[t] != B.coeffs[t])
        if len(diff):
            i, j = diff[0]
            return (f"coefficient of λ^{t} differs at ({i},{j}): "
                    f"{A.coeffs[t][i, j]} vs {B.coeffs[t][i, j]}")
    return ""


def _check_shape(sbmb, P, report):
    problems = []
    m, n = P.shape
    if (sbmb.m, sbmb.n) != (m, n):
        problems.append(f"sbmb is for {sbmb.m}x{sbmb.n}, target is {m}x{n}")
    M = sbmb.M
    if M.shape != (sbmb.m + sbmb.m2, sbmb.n + sbmb.m1):
        problems.append(f"M has shape {M.shape}")
    if sbmb.K1 is not None and sbmb.K1.shape != (sbmb.m1, sbmb.n + sbmb.m1):
        problems.append(f"K1 has shape {sbmb.K1.shape}")
    if sbmb.K2 is not None and sbmb.K2.shape != (sbmb.m2, sbmb.m + sbmb.m2):
        problems.append(f"K2 has shape {sbmb.K2.shape}")
    if sbmb.N1.shape != (sbmb.n, sbmb.n + sbmb.m1):
        problems.append(f"N1 has shape {sbmb.N1.shape}")
    if sbmb.N2.shape != (sbmb.m, sbmb.m + sbmb.m2):
        problems.append(f"N2 has shape {sbmb.N2.shape}")
    for name, K in (("K1", sbmb.K1), ("K2", sbmb.K2)):
        if K is not None and not K.is_zero() and K.degree() > sbmb.ell:
            problems.append(f"{name} has degree above ell")
    L = sbmb.L
    if L.shape != (sbmb.m + sbmb.m2 + sbmb.m1, sbmb.n + sbmb.m1 + sbmb.m2):
        problems.append(f"assembled matrix has shape {L.shape}")
    report.add("shape", not problems, "; ".join(problems) or f"L is {L.rows}x{L.cols}")
    return not problems


def _check_duals(sbmb, report, max_minors):
    notes = []
    ok = True
    for side in (1, 2):
        K, N, E, pair, width = _wing(sbmb, side)
        if K is None:
            if not N.same_polynomial(MatrixPolynomial.identity(width, N.field)):
                ok = False
                notes.append(f"N{side} must be the identity for an absent wing")
            continue
        try:
            if E is not None and K is E.K and N is E.N:
                res = E.certificate
            else:
                res = is_dual_pair(K, N, max_minors=max_minors, embedding=E)
        except CertificationError as exc:
            ok = False
            notes.append(f"pair {side}: {exc}")
            continue
        if not res.certified:
            ok = False
            notes.append(f"pair {side}: {res.status}")
        else:
            notes.append(f"pair {side} certified by {res.method}")
    report.add("dual-certification", ok, "; ".join(notes))
    return ok


def _check_q(sbmb, P, report):
    Q = q_of(sbmb)
    if Q.grade != P.grade:
        report.add("q-identity", False, f"grade of Q is {Q.grade}, target grade is {P.grade}")
        return False
    if Q == P:
        report.add("q-identity", True, f"N2 M N1^T = P at grade {P.grade}")
        return True
    report.add("q-identity", False, _first_difference(Q, P))
    return False


def _check_strong(sbmb, report):
    notes = []
    for name, K in (("K1", sbmb.K1), ("K2", sbmb.K2)):
        if K is None:
            continue
        degs = row_degrees(K)
        if any(d != sbmb.ell for d in degs):
            notes.append(f"{name} row degrees {degs} != {sbmb.ell}")
    for name, N in (("N1", sbmb.N1), ("N2", sbmb.N2)):
        degs = set(row_degrees(N))
        if len(degs) != 1:
            notes.append(f"{name} row degrees are not constant")
    report.add("strongness-row-degrees", not notes, "; ".join(notes))
    return not notes


def _coefficient_full_row_rank(P, t):
    A = P.with_grade(max(P.grade, t)).coeffs[t]
    return exact.rank(A) == P.rows


def _check_reversal(sbmb, P, full_rank_known, report):
    """``rev_ell L`` is a block minimal bases polynomial whose Q is ``rev_d P``.

    The reversed wings are dual minimal bases when ``K N^T`` reversed still
    vanishes, both reversed matrices are row reduced, and they keep full
    row rank everywhere.  Away from zero the latter follows from the
    unreversed pair; at zero it is the rank of the top coefficient.
    """
    ell = sbmb.ell
    notes = []
    revN = {}
    for side in (1, 2):
        K, N, E, _, _ = _wing(sbmb, side)
        if K is not None and not full_rank_known:
            notes.append(f"pair {side} not certified")
            continue
        if E is not None and K is E.K and N is E.N:
            key = ("reversal", side, ell)
            if key not in E.memo:
                E.memo[key] = _reversed_wing(K, N, ell, side)
            wing_notes, Nr = E.memo[key]
        else:
            wing_notes, Nr = _reversed_wing(K, N, ell, side)
        notes.extend(wing_notes)
        if Nr is not None:
            revN[side] = Nr
    if not notes:
        Mr = reversal(sbmb.M.with_grade(ell), ell)
        Qr = matmul(revN[2], matmul(Mr, transpose(revN[1])))
        d = P.grade
        target = reversal(P, d)
        if not Qr.same_polynomial(target):
            g = max(Qr.grade, d)
            notes.append("Q of the reversed form != rev_d P: "
                         + _first_difference(Qr.with_grade(g), target.with_grade(g)))
    report.add("reversal-structure", not notes, "; ".join(notes))
    return not notes


def _reversed_wing(K, N, ell, side):
    """Wing-only part of the reversal check: ``(failure notes, rev N)``."""
    notes = []
    dn = _const_deg(N)
    if dn is None:
        return [f"N{side} has no constant row degree"], None
    Nr = reversal(N.with_grade(dn), dn)
    if K is None:
        return notes, Nr
    Kr = reversal(K.with_grade(ell), ell)
    if not matmul(Kr, transpose(Nr)).is_zero():
        notes.append(f"rev K{side} rev N{side}^T != 0")
    if not is_row_reduced(Kr) or not is_row_reduced(Nr):
        notes.append(f"reversed pair {side} is not row reduced")
    if not _coefficient_full_row_rank(K, ell):
        notes.append(f"rev K{side} drops rank at 0")
    if not _coefficient_full_row_rank(N, dn):
        notes.append(f"rev N{side} drops rank at 0")
    return notes, Nr


def _const_deg(N):
    degs = set(row_degrees(N))
    if len(degs) != 1:
        return None
    return degs.pop()


def _check_anti_triangular(sbmb, P, report):
    E1 = _effective_embedding(sbmb, 1)
    E2 = _effective_embedding(sbmb, 2)
    if E1 is None or E2 is None:
        report.add("anti-triangular-reduction", False, "embeddings unavailable")
        return False
    if not (embedding_holds(E1) and embedding_holds(E2)):
        report.add("anti-triangular-reduction", False, "embedding identity fails")
        return False
    m, n, m1, m2 = sbmb.m, sbmb.n, sbmb.m1, sbmb.m2
    # R = diag(U2^-T, I) L diag(U1^-1, I) with L = [[M, K2^T], [K1, 0]].
    # Row blocks m2, m, m1 and column blocks m1, n, m2; only six blocks are
    # constrained, and they come from three small products.
    notes = []
    if m2:
        notes += _memo_wing(sbmb.K2, E2, ("anti-triangular", 2),
                            lambda: _k_times_inverse(sbmb.K2, E2, m2, m, "top-right", "(1,2)"))
    if m1:
        notes += _memo_wing(sbmb.K1, E1, ("anti-triangular", 1),
                            lambda: _k_times_inverse(sbmb.K1, E1, m1, n, "bottom-left", "(2,1)"))
    # block (2,2) of L is structurally zero, so it is zero in R as well
    if not matmul(E2.N, matmul(sbmb.M, transpose(E1.N))).same_polynomial(P):
        notes.append("central block is not P")
    report.add("anti-triangular-reduction", not notes, "; ".join(notes))
    return not notes


def _memo_wing(K, E, key, compute):
    """``compute()``, cached on ``E`` when ``K`` is the embedding's own matrix."""
    if K is not E.K:
        return compute()
    if key not in E.memo:
        E.memo[key] = compute()
    return E.memo[key]


def _k_times_inverse(K, E, k, p, corner, zero_block):
    """``K [N_hat^T, N^T] = [I, 0]``; this is both the identity corner and a zero block of R."""
    notes = []
    prod = matmul(K, E.U_inv)
    if not prod.block(0, k, 0, k).same_polynomial(MatrixPolynomial.identity(k, K.field)):
        notes.append(f"{corner} block is not I")
    if not prod.block(0, k, k, k + p).is_zero():
        notes.append(f"block {zero_block} is not zero")
    return notes


def verify_ellification(sbmb, P, float_check=False, tol=1e-8, max_minors=5000, seed=0):
    """Run every structural check of ``sbmb`` against the target ``P``."""
    if sbmb.field != "Q" or P.field != "Q":
        raise ValueError("verification needs the exact backend")
    report = VerificationReport()
    if not _check_shape(sbmb, P, report):
        return report
    duals_ok = _check_duals(sbmb, report, max_minors)
    _check_q(sbmb, P, report)
    _check_strong(sbmb, report)
    _check_reversal(sbmb, P, duals_ok, report)
    _check_anti_triangular(sbmb, P, report)
    if float_check:
        try:
            agr = eigenvalue_agreement(P, sbmb, tol, seed=seed)
            report.add("eigenvalue-agreement", agr.passed, agr.summary())
        except SingularPolynomialError as exc:
            report.add("eigenvalue-agreement", None, f"{exc}; no spectrum to compare")
    return report


# eigenvalue pipeline ----------------------------------------------------------

def scipy_backend(A, B):
    """Reference generalized eigenvalue backend returning ``(alpha, beta)``."""
    w = scipy.linalg.eig(A, B, right=False, homogeneous_eigvals=True)
    return w[0], w[1]


def is_regular(P, seed=0):
    """Exact regularity test from determinants at ``d max(m,n) + 1`` points."""
    m, n = P.shape
    if m != n:
        return False
    if P.field != "Q":
        raise ValueError("exact regularity test needs the exact backend")
    count = P.grade * max(m, n) + 1
    rng = random.Random(seed)
    points = set()
    while len(points) < count:
        points.add(Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 3)))
    return any(exact.det(evaluate(P, x)) != 0 for x in points)


def _pencil(P):
    if P.grade == 0:
        return None
    if P.grade == 1:
        return P
    return frobenius_companion(P).L


def polynomial_eigenvalues(P, backend=None, inf_tol=INF_TOL):
    """``(finite values sorted by real then imaginary part, number of infinite ones)``."""
    backend = backend or scipy_backend
    L = _pencil(P)
    if L is None:
        return np.zeros(0, dtype=complex), 0
    Lf = L.to_float()
    A = -np.asarray(Lf.coeffs[0], dtype=float)
    B = np.asarray(Lf.coeffs[1], dtype=float)
    alpha, beta = backend(A, B)
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    amax = np.abs(alpha).max(initial=0.0)
    scale = max(amax, np.abs(beta).max(initial=0.0))
    # |beta| <= inf_tol * max|alpha| flags an infinite eigenvalue
    inf_mask = np.abs(beta) <= inf_tol * amax
    zero_pair = (np.abs(alpha) <= inf_tol * scale) & (np.abs(beta) <= inf_tol * scale)
    if zero_pair.any():
        raise SingularPolynomialError("pencil has a 0/0 eigenvalue; P is singular")
    finite = alpha[~inf_mask] / beta[~inf_mask]
    order = np.lexsort((finite.imag, finite.real))
    return finite[order], int(inf_mask.sum())


def _group(values, rtol):
    out = []
    for v in values:
        if out and abs(v - out[-1][0]) <= rtol * max(1.0, abs(v)):
            val, mult = out[-1]
            out[-1] = ((val * mult + v) / (mult + 1), mult + 1)
        else:
            out.append((v, 1))
    return out


def finite_eigenvalues(P, backend=None, inf_tol=INF_TOL, seed=0, group_rtol=1e-8):
    """Eigenvalues of a regular ``P`` via the first Frobenius companion pencil."""
    if P.field == "Q":
        if not is_regular(P, seed):
            raise SingularPolynomialError("P is singular")
    elif P.rows != P.cols:
        raise SingularPolynomialError("P is not square")
    finite, ninf = polynomial_eigenvalues(P, backend, inf_tol)
    vals = [complex(v) if abs(v.imag) > 0 else float(v.real) for v in finite]
    return Eigenstructure(finite_eigenvalues=_group(vals, group_rtol),
                          has_infinite_eigenvalue=ninf > 0, infinite_multiplicity=ninf,
                          right_minimal_indices=[], left_minimal_indices=[],
                          normal_rank=P.rows)


@dataclass
class AgreementReport:
    passed: bool
    worst_error: float
    worst_pair: tuple
    finite_P: int
    finite_L: int
    infinite_P: int
    infinite_L: int

    def summary(self):
        return (f"finite {self.finite_P}/{self.finite_L}, infinite {self.infinite_P}/"
                f"{self.infinite_L}, worst relative error {self.worst_error:.2e}")


def match_spectra(a, b):
    """Optimal pairing of two equally long lists under relative distance."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if len(a) == 0:
        return [], 0.0, None
    cost = np.abs(a[:, None] - b[None, :]) / np.maximum(
        1.0, np.maximum(np.abs(a)[:, None], np.abs(b)[None, :]))
    rows, cols = linear_sum_assignment(cost)
    errs = cost[rows, cols]
    k = int(np.argmax(errs))
    return list(zip(rows, cols)), float(errs[k]), (complex(a[rows[k]]), complex(b[cols[k]]))


def eigenvalue_agreement(P, lification, tol, backend=None, inf_tol=INF_TOL, seed=0):
    """Compare finite spectra of ``P`` and of the assembled l-ification."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if P.field == "Q" and not is_regular(P, seed):
        raise SingularPolynomialError("P is singular")
    fp, ip = polynomial_eigenvalues(P, backend, inf_tol)
    fl, il = polynomial_eigenvalues(lification.L, backend, inf_tol)
    if len(fp) != len(fl):
        return AgreementReport(False, float("inf"), None, len(fp), len(fl), ip, il)
    _, worst, pair = match_spectra(fp, fl)
    return AgreementReport(worst <= tol, worst, pair, len(fp), len(fl), ip, il)
