from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def eval_poly_fraction(P, x):
    """Independent evaluation of an exact matrix polynomial at a rational point."""
    x = Fraction(x)
    out = [[Fraction(0)] * P.cols for _ in range(P.rows)]
    for t, C in enumerate(P.coeffs):
        for i in range(P.rows):
            for j in range(P.cols):
                out[i][j] += Fraction(C[i, j]) * x ** t
    return out


def matmul_lists(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def fraction_rank(A):
    """Plain Gaussian elimination over Fractions."""
    M = [[Fraction(v) for v in row] for row in np.asarray(A, dtype=object).tolist()]
    r = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def brute_force_parameters(m, n, d, ell):
    """Every nonnegative (m1, m2, eps, eta) with ell m1 = n eps, ell m2 = m eta, eps + eta = d - ell."""
    out = set()
    for eps in range(d + 1):
        for eta in range(d + 1):
            if eps + eta != d - ell:
                continue
            for m1 in range(n * d + 1):
                if ell * m1 != n * eps:
                    continue
                for m2 in range(m * d + 1):
                    if ell * m2 == m * eta:
                        out.add((m1, m2, eps, eta))
    return out


def random_rational(m, n, d, rng, den=5):
    """Matrix polynomial with entries a/b, |a| <= 9, 1 <= b <= den."""
    from ellify.polycore import MatrixPolynomial
    num = rng.integers(-9, 10, (d + 1, m, n))
    dens = rng.integers(1, den + 1, (d + 1, m, n))
    coeffs = []
    for t in range(d + 1):
        C = np.empty((m, n), dtype=object)
        for i in range(m):
            for j in range(n):
                C[i, j] = Fraction(int(num[t, i, j]), int(dens[t, i, j]))
        coeffs.append(C)
    return MatrixPolynomial(coeffs)


def singular_instance(seed, m, n, d):
    """Rank-deficient P = A(lambda) B(lambda) with inner size below min(m, n)."""
    from ellify.polycore import random_polynomial
    rng = np.random.default_rng(seed)
    r = max(1, min(m, n) - 1)
    a = int(rng.integers(0, d + 1))
    A = random_polynomial(m, r, a, rng, low=-3, high=3)
    B = random_polynomial(r, n, d - a, rng, low=-3, high=3)
    return A @ B


# one line per acceptance criterion, repeated after the test run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
