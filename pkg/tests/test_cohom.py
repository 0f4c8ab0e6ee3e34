from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from qfrob.cohom import (ODEParams, bessel_constant_matrix, bessel_frame, bessel_gamma_search,
                         bessel_residual, classical_analytic_fundamental, classical_hyper_coefficients,
                         dwork_closed_form, dwork_search, hypergeometric_residual, projective_closed_form,
                         projective_residual, projective_scale, projective_search)
from qfrob.errors import MultipleSurvivors
from qfrob.frobq import SearchConfig, closed_form_constant
from qfrob.hyperq import QHParams
from qfrob.padic import vp_int
from qfrob.qspecial import QContext, gamma_p

F = Fraction
GOLDEN = ODEParams(3, (F(1, 5), F(0)), F(1, 2))

small_rationals = st.builds(F, st.integers(-6, 6), st.sampled_from([2, 4, 7, 8]))


def test_first_coefficient_oracle():
    # (1/2)/1 * (1/5 + 1/2)/(1/5 + 1) = 7/24
    assert classical_hyper_coefficients(GOLDEN.a, GOLDEN.h, 0, 3)[1] == F(7, 24)
    # zero-th solution with h = 0 is the constant 1
    assert classical_hyper_coefficients(GOLDEN.a, F(0), 1, 5) == [1, 0, 0, 0, 0, 0]


@settings(max_examples=25, deadline=None)
@given(a=small_rationals, h=small_rationals)
def test_hypergeometric_residual_vanishes(a, h):
    # integer exponent differences make a rising factorial vanish
    assume(a.denominator > 1)
    params = ODEParams(3, (a, F(0)), h)
    for i in range(2):
        assert all(x == 0 for x in hypergeometric_residual(params, i, 8))


@settings(max_examples=25, deadline=None)
@given(a=small_rationals, b=small_rationals)
def test_projective_residual_vanishes(a, b):
    exps = (a, b, F(0))
    assume(all((exps[i] - exps[j]).denominator > 1 for i in range(3) for j in range(i)))
    params = ODEParams(5, exps)
    for i in range(params.n):
        assert all(x == 0 for x in projective_residual(params, i, 8))


def test_constant_term_is_vandermonde():
    params = ODEParams(3, (F(1, 2), F(1, 4), F(0)), F(1, 2))
    frame = classical_analytic_fundamental(params, 4, 8)
    mod = 3**8
    for k in range(3):
        for j, aj in enumerate(params.a):
            want = aj**k
            got = frame.entries[k][j].c[0]
            scale = 3**frame.shift
            assert (got - want.numerator * pow(want.denominator, -1, mod) * scale) % mod == 0


@pytest.mark.parametrize("params", [
    GOLDEN,
    ODEParams(3, (F(1, 2), F(0)), F(1, 4)),
    ODEParams(5, (F(1, 2), F(0)), F(1, 3)),
    ODEParams(3, (F(1, 2), F(1, 4), F(0)), F(1, 2)),
])
def test_dwork_matches_gamma_formula(params):
    res = dwork_search(params, SearchConfig(s_max=4))
    assert res.match is True
    assert res.stable is True


def test_dwork_golden_digits():
    res = dwork_search(GOLDEN, SearchConfig(s_max=4))
    assert res.digits == [[1, 0, 2, 1]]
    assert dwork_closed_form(GOLDEN, 4)[0].r == 46


def _morita(x, p, prec):
    """Gamma_p(x) mod p^prec from the defining product at a positive integer representative."""
    mod = p**prec
    n = x.numerator * pow(x.denominator, -1, mod) % mod
    n = n or mod
    out = -1 if n % 2 else 1
    for i in range(1, n):
        if i % p:
            out = out * i % mod
    return out % mod


def test_dwork_gamma_formula_oracle():
    # U_11 / U_22 reduces to G(3(a+h)) G(-3a) / (G(3a) G(3(h-a))) for a = (1/5, 0)
    p, a, h, prec = 3, F(1, 5), F(1, 2), 6
    mod = p**prec
    g = lambda x: _morita(x, p, prec)
    want = g(p * (a + h)) * g(-p * a) * pow(g(p * a) * g(p * (h - a)), -1, mod) % mod
    assert dwork_closed_form(GOLDEN, prec)[0].r == want


def test_dwork_trivial_exponent_is_ambiguous():
    params = ODEParams(3, (F(1, 5), F(0)), F(0))
    with pytest.raises(MultipleSurvivors):
        dwork_search(params, SearchConfig(s_max=3, W=8))
    assert dwork_closed_form(params, 4)[0].r == 1


@pytest.mark.parametrize("a", [(F(1, 5), F(0)), (F(1, 2), F(0)), (F(2, 7), F(0))])
def test_projective_matches_reciprocal_gamma_ratio(a):
    res = projective_search(ODEParams(3, a), SearchConfig(s_max=4))
    assert res.extra["reciprocal_match"] is True
    assert res.stable is True


def test_projective_literal_ratio_disagrees():
    params = ODEParams(3, (F(1, 5), F(0)))
    res = projective_search(params, SearchConfig(s_max=4))
    assert res.match is False
    # the search finds the inverse of the literal product ratio
    lit = projective_closed_form(params, 4)[0].r
    assert (lit * res.residues[0]) % 81 == 1


def test_projective_scale():
    assert projective_scale(3, 2) == -3
    assert projective_scale(3, 4) == 9
    assert projective_scale(5, 4) == -5
    with pytest.raises(ValueError):
        projective_scale(5, 2)


def test_bessel_frame():
    fr = bessel_frame(2, 6)
    # Theta(0) = identity
    assert [[fr.rows[k][l][0] for l in range(2)] for k in range(2)] == [[1, 0], [0, 1]]
    # x^0 part of g is sum z^d / d!^2, the z x part is -2
    fact = 1
    for d in range(7):
        fact *= max(d, 1)
        assert fr.g[d][0] == F(1, fact**2)
    assert fr.g[1][1] == -2
    assert all(x == 0 for poly in bessel_residual(2, 8) for x in poly)
    assert all(x == 0 for poly in bessel_residual(3, 8) for x in poly)


def _power_taylor_oracle(p, n, K, prec):
    """b_1, b_2 of Gamma_p(x)^n from values at x = p^K and 2 p^K."""
    mod = p ** (3 * K + prec)
    h = p**K
    f1 = pow(gamma_p(p, h, 3 * K + prec).r, n, mod)
    f2 = pow(gamma_p(p, 2 * h, 3 * K + prec).r, n, mod)
    b2 = ((f2 - 2 * f1 + 1) // (h * h)) * pow(2, -1, p**K) % p**K
    b1 = ((f1 - 1 - b2 * h * h) // h) % p**K
    return b1, b2


@pytest.mark.parametrize("p,n", [(3, 2), (3, 3), (5, 2), (5, 3)])
def test_bessel_constant_matrix_oracle(p, n):
    K = 3
    b1, b2 = _power_taylor_oracle(p, n, K, 2)
    m = bessel_constant_matrix(p, n, K + 1)
    mod = p ** (K + 1)
    assert m[0][0] == 1 and m[1][0] == 0
    assert m[0][1] % mod == (b1 * p) % mod
    assert m[1][1] == p
    if n >= 3:
        assert m[0][2] % mod == (b2 * p * p) % mod
        assert m[1][2] % mod == (b1 * p * p) % mod
        assert m[2][2] == p * p % mod


def test_bessel_constant_matrix_rank_one():
    assert bessel_constant_matrix(3, 1, 4) == [[1]]


def test_bessel_gamma_is_minus_two_p_gamma_prime():
    res = bessel_gamma_search(3, SearchConfig(M=81, s_max=4))
    out = res.to_json()
    assert out["gamma"] == 63
    assert out["minus_n_match"] is True
    assert out["p_gamma_prime"] == 9
    assert out["match"] is False
    assert out["stable"] is True


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_q_to_one_limit(k):
    """With t = 3^k the q-closed form agrees with the Gamma_p formula to k+1 digits."""
    q = QHParams(GOLDEN.a, GOLDEN.h, QContext(3, F(3**k), 10))
    qval = closed_form_constant(q, 6)[0].r
    cval = dwork_closed_form(GOLDEN, 6)[0].r
    assert vp_int(qval - cval, 3) >= k + 1
