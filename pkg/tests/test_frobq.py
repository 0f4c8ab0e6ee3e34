from fractions import Fraction

import pytest

from qfrob.errors import MultipleSurvivors, NoSurvivor, PrecisionExhausted
from qfrob.frobq import (LinearFamily, SearchConfig, build_family, closed_form_constant, digit_search,
                         intertwiner_series, rationality_test, search_family, step_snapshot,
                         verify_main_theorem)
from qfrob.hyperq import QHParams
from qfrob.qseries import SeriesMatrix, TruncSeries
from qfrob.qspecial import QContext

GOLDEN_DIGITS = [1, 0, 1, 1, 2, 1, 2, 1, 1]


def poly(terms, length=20):
    out = [0] * length
    for k, c in terms.items():
        out[k] = c
    return out


ONE, ZERO = poly({0: 1}), poly({})


def test_golden_digits(golden_params):
    res = digit_search(golden_params, SearchConfig(M=40, W=15, s_max=9))
    assert res.digits == [GOLDEN_DIGITS]
    assert res.residues == [10648]
    assert res.certified == 9
    assert all(st["survivors"] >= 1 for st in res.stages)


def test_closed_form_golden(golden_params):
    c = closed_form_constant(golden_params, 9)
    assert c[0].r == 10648
    assert c[1].r == 1


def test_verify_report(golden_params):
    rep = verify_main_theorem(golden_params, SearchConfig())
    assert rep["match"] is True
    assert rep["stable"] is True


@pytest.mark.parametrize("c,lower_left", [
    (1, poly({12: 1, 15: 2})),
    (10, ZERO),
    (19, poly({12: 2, 15: 1})),
])
def test_step2_snapshots(golden_params, c, lower_left):
    snap = step_snapshot(golden_params, c, s=1)
    assert snap == [[ONE, ZERO], [lower_left, ONE]]


@pytest.mark.parametrize("c,tail", [
    (10, {12: 3, 13: 3, 14: 3, 15: 6, 16: 6, 17: 6}),
    (37, {}),
    (64, {12: 6, 13: 6, 14: 6, 15: 3, 16: 3, 17: 3}),
])
def test_step3_snapshots(golden_params, c, tail):
    snap = step_snapshot(golden_params, c, s=2, m=2)
    assert snap[0] == [poly({0: 1, 1: 1, 2: 1}), ZERO]
    assert snap[1] == [poly({1: 6, **tail}), poly({0: 1, 1: 7, 2: 1})]


def test_identity_mod_p_with_true_constant(golden_params):
    assert step_snapshot(golden_params, 10648, s=1) == [[ONE, ZERO], [ZERO, ONE]]


def test_rationality_test_separates(golden_params):
    cfg = SearchConfig()
    good, _ = intertwiner_series(golden_params, [10648], 40, 15)
    bad, _ = intertwiner_series(golden_params, [10648 + 3**5], 40, 15)
    assert rationality_test(good, 6, cfg).passed
    assert not rationality_test(bad, 6, cfg).passed


def test_raw_frame_differs_but_is_available(golden_params):
    raw, loss = intertwiner_series(golden_params, [10648, 1], 20, 10, normalized=False)
    assert raw.n == 2 and loss >= 0


def test_independent_instance_p5():
    P = QHParams((Fraction(1, 2), Fraction(0)), Fraction(1, 3), QContext(5, Fraction(5), 10))
    rep = verify_main_theorem(P, SearchConfig(s_max=4, W=10))
    assert rep["match"] and rep["stable"]


def test_rank_three_instance():
    P = QHParams((Fraction(1, 2), Fraction(1, 4), Fraction(0)), Fraction(1, 2),
                 QContext(3, Fraction(3), 10))
    rep = verify_main_theorem(P, SearchConfig(s_max=3, W=9, recheck=False))
    assert rep["match"]


def test_family_precision_matches_request(golden_params):
    fam = build_family(golden_params, SearchConfig(W=12))
    assert fam.W - fam.shift >= 12
    assert fam.trusted(100) == fam.W - fam.shift


def _toy_family(base_rows, basis_rows, p=3, W=6):
    def mat(rows):
        return SeriesMatrix([[TruncSeries(p, W, e) for e in row] for row in rows])
    return LinearFamily(mat(base_rows), [mat(basis_rows)])


def test_no_survivor_and_ambiguity():
    M = 8
    z_geo = [1] * (M + 1)
    zero = [0] * (M + 1)
    # U(c) = 1/(1-z) * (1 + c): every c passes, so digits are never pinned down
    fam = _toy_family([[z_geo]], [[z_geo]])
    with pytest.raises((MultipleSurvivors, PrecisionExhausted)):
        search_family(fam, 1, SearchConfig(M=M, W=6, s_max=3, m_max=2, extra_stages=1))
    # U(c) = exp-like tail that never becomes polynomial, independent of c
    fam = _toy_family([[[1] + [1] * M]], [[zero]])
    with pytest.raises(NoSurvivor):
        search_family(fam, 1, SearchConfig(M=M, W=6, s_max=3, m_max=0))


def test_unique_toy_solution():
    # U(c) = (c - 5) * g(z) + 1 with g non-rational mod 3: only c = 5 works
    M = 8
    g = [k * k + 1 for k in range(M + 1)]
    base = [[[-5 * x + (1 if k == 0 else 0) for k, x in enumerate(g)]]]
    fam = _toy_family(base, [[g]], W=8)
    res = search_family(fam, 1, SearchConfig(M=M, W=8, s_max=4, m_max=0))
    assert res.residues == [5]
