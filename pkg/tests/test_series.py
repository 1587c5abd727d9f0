from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from twistlab.series import (
    QSeries,
    SeriesError,
    eisenstein,
    eta_quotient,
    int_poly_mul,
    pentagonal_product,
    series_inverse,
)

coeff = st.one_of(
    st.integers(-10**6, 10**6),
    st.fractions(min_value=-50, max_value=50, max_denominator=12),
)


@st.composite
def three_series(draw):
    B = draw(st.integers(0, 24))
    lists = [draw(st.lists(coeff, min_size=B + 1, max_size=B + 1)) for _ in range(3)]
    return [QSeries(c) for c in lists]


def test_small_products():
    a = QSeries([1, 1], precision=4)
    assert (a * a).coeffs == [1, 2, 1, 0, 0]
    assert (a**3).coeffs == [1, 3, 3, 1, 0]
    assert QSeries([Fraction(1, 2), 3]) * 2 == QSeries([1, 6])


def test_inverse_of_one_minus_q():
    inv = series_inverse(QSeries([1, -1], precision=6))
    assert inv.coeffs == [1] * 7


def test_inverse_needs_unit():
    with pytest.raises(SeriesError):
        series_inverse(QSeries([0, 1]))


def test_truncate_cannot_extend():
    with pytest.raises(SeriesError):
        QSeries([1, 2]).truncate(5)


@settings(max_examples=1000, deadline=None)
@given(three_series())
def test_ring_axioms(abc):
    a, b, c = abc
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a - a == QSeries.zero(a.precision)
    assert a * QSeries.one(a.precision) == a


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.integers(-2**70, 2**70), min_size=1, max_size=60),
    st.lists(st.integers(-2**70, 2**70), min_size=1, max_size=60),
)
def test_kronecker_matches_schoolbook(a, b):
    B = len(a) + len(b)
    assert int_poly_mul(a, b, B) == oracles.mul(a + [0] * B, b + [0] * B, B)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=2, max_size=20), st.integers(0, 8))
def test_pow_is_repeated_product(c, e):
    a = QSeries(c)
    expect = QSeries.one(a.precision)
    for _ in range(e):
        expect = expect * a
    assert a**e == expect


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=20).filter(lambda c: c[0] != 0))
def test_inverse_is_inverse(c):
    a = QSeries(c)
    assert a * series_inverse(a) == QSeries.one(a.precision)


@pytest.mark.parametrize("step", [1, 2, 3, 7])
def test_pentagonal_against_product(step):
    assert pentagonal_product(200, step).integer_coeffs() == oracles.product_expansion([(step, 1)], 200)


@pytest.mark.parametrize(
    "spec",
    [[(1, 24)], [(1, 2), (11, 2)], [(2, 2), (10, 2)], [(3, 2), (9, 2)], [(4, 2), (8, 2)], [(6, 4)]],
)
def test_eta_quotients_against_product(spec):
    assert eta_quotient(spec, 300).integer_coeffs() == oracles.eta_product(spec, 300)


def test_eta_quotient_with_negative_exponent():
    # eta(2t)^16 / eta(t)^8: offset 1, integral coefficients
    spec = [(2, 16), (1, -8)]
    assert eta_quotient(spec, 120).integer_coeffs() == oracles.eta_product(spec, 120)


def test_delta_first_terms():
    assert eta_quotient([(1, 24)], 7).integer_coeffs() == [0, 1, -24, 252, -1472, 4830, -6048, -16744]


def test_delta_integral_at_large_precision():
    d = eta_quotient([(1, 24)], 5000)
    assert d.is_integral()
    assert d[1] == 1


def test_eta_quotient_rejects_bad_specs():
    with pytest.raises(SeriesError):
        eta_quotient([(1, 1)], 10)
    with pytest.raises(SeriesError):
        eta_quotient([(1, -24)], 10)
    assert eta_quotient([(1, 24 * 20)], 10) == QSeries.zero(10)


@pytest.mark.parametrize("k", [4, 6])
def test_eisenstein_against_divisor_sums(k):
    assert eisenstein(k, 200).integer_coeffs() == oracles.eisenstein(k, 200)


def test_e4_cubed_minus_e6_squared_is_1728_delta():
    B = 100
    e4, e6 = eisenstein(4, B), eisenstein(6, B)
    assert (e4**3 - e6 * e6) == eta_quotient([(1, 24)], B).scale(1728)
