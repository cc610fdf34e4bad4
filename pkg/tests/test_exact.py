from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellify import exact
from conftest import fraction_rank

small = st.integers(-5, 5)


@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_matches_fraction_oracle(r, c, data):
    A = np.array([[data.draw(small) for _ in range(c)] for _ in range(r)], dtype=object)
    if data.draw(st.booleans()):
        A[0, 0] = Fraction(1, 3)
    assert exact.rank(A) == fraction_rank(A)


@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_nullspace_is_annihilated(r, c, data):
    A = np.array([[data.draw(small) for _ in range(c)] for _ in range(r)], dtype=object)
    Z = exact.nullspace(A)
    assert Z.shape[1] == c - fraction_rank(A)
    assert not np.any(A.dot(Z))


def test_solve_particular_sets_free_variables_to_zero():
    A = np.array([[1, 2, 0], [0, 0, 1]], dtype=object)
    x = exact.solve_particular(A, np.array([3, 4], dtype=object))
    assert list(x) == [3, 0, 4]


def test_solve_particular_inconsistent():
    A = np.array([[1, 1], [1, 1]], dtype=object)
    with pytest.raises(exact.InconsistentSystemError):
        exact.solve_particular(A, np.array([1, 2], dtype=object))


def test_normalize_rejects_float():
    assert exact.normalize(Fraction(4, 2)) == 2 and type(exact.normalize(Fraction(4, 2))) is int
    with pytest.raises(TypeError):
        exact.normalize(0.5)


def _peval(p, x):
    return sum(Fraction(c) * x ** k for k, c in enumerate(p))


poly = st.lists(small, min_size=0, max_size=3).map(lambda c: exact.ptrim(tuple(c)))


@given(st.integers(1, 3), st.data())
def test_poly_det_matches_pointwise_det(n, data):
    entries = [[data.draw(poly) for _ in range(n)] for _ in range(n)]
    d = exact.from_fmpq_poly(exact.poly_det(entries))
    for x in (Fraction(-2), Fraction(1, 3), Fraction(5)):
        A = np.array([[_peval(e, x) for e in row] for row in entries], dtype=object)
        assert _peval(d, x) == exact.det(A)


@given(poly, poly, poly, poly, poly)
def test_poly_det_keeps_row_factor(g, a, b, c, e):
    G = exact.to_fmpq_poly(g)
    row = [exact.from_fmpq_poly(G * exact.to_fmpq_poly(a)),
           exact.from_fmpq_poly(G * exact.to_fmpq_poly(b))]
    d = exact.poly_det([row, [c, e]])
    if G != 0:
        assert d % G == 0


def test_poly_det_matches_flint_det():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.integers(-6, 7, size=(4, 4))
        entries = [[(int(v),) for v in row] for row in A]
        got = exact.from_fmpq_poly(exact.poly_det(entries))
        assert got == exact.ptrim((exact.det(A.astype(object)),))
