from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qfrob.errors import DenominatorNotUnit, NonUnitDivisor, PrecisionExceeded
from qfrob.padic import (PadicScalar, as_prational, digits, invert_unit, lift_int, lift_rational,
                         recompose, valuation, vp_int, vp_rational)

primes = st.sampled_from([2, 3, 5, 7])


def test_lift_matches_printed_approximations():
    # integral approximations of h = 1/2 and a_1 = 1/5 mod 3^7
    assert lift_int(Fraction(1, 2), 3, 7) == 1094
    assert lift_int(Fraction(1, 5), 3, 7) == 875


def test_digits_of_golden_constant():
    assert digits(PadicScalar(3, 9, 10648), 9) == [1, 0, 1, 1, 2, 1, 2, 1, 1]


def test_valuations():
    assert vp_int(0, 3) is None
    assert vp_int(162, 3) == 4
    assert vp_rational(Fraction(9, 2), 3) == 2
    assert vp_rational(Fraction(2, 27), 3) == -3
    assert valuation(PadicScalar(3, 5, 0)) == ">=5"
    assert valuation(PadicScalar(3, 5, 18)) == 2


def test_errors():
    with pytest.raises(DenominatorNotUnit):
        as_prational("1/3", 3)
    with pytest.raises(NonUnitDivisor):
        invert_unit(PadicScalar(3, 4, 6))
    with pytest.raises(PrecisionExceeded):
        digits(PadicScalar(3, 4, 1), 5)
    with pytest.raises(ValueError):
        PadicScalar(3, 4, 1) + PadicScalar(3, 5, 1)


@given(primes, st.integers(1, 12), st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_lift_is_a_ring_map(p, W, num, den):
    if den % p == 0:
        den += 1
    x = Fraction(num, den)
    y = Fraction(den, 1) + 3
    X, Y = lift_rational(x, p, W), lift_rational(y, p, W)
    assert X + Y == lift_rational(x + y, p, W)
    assert X * Y == lift_rational(x * y, p, W)
    assert -X == lift_rational(-x, p, W)
    assert (X.r * den - num) % p**W == 0


@given(primes, st.integers(1, 12), st.integers(0, 10**9))
def test_digits_roundtrip(p, W, r):
    x = PadicScalar(p, W, r)
    ds = digits(x, W)
    assert all(0 <= d < p for d in ds)
    assert recompose(ds, p) == x


@given(primes, st.integers(1, 10), st.integers(1, 10**9))
def test_unit_inverse(p, W, r):
    if r % p == 0:
        r += 1
    x = PadicScalar(p, W, r)
    assert x * invert_unit(x) == PadicScalar(p, W, 1)
