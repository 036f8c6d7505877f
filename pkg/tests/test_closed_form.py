import numpy as np
import pytest
from hypothesis import given, strategies as st

from _helpers import diagonal_family, random_problem
from fredres import fixtures, reexpand_at_one
from fredres.closed_form import (closed_form_inverse, compute_G, compute_H, psi_closed_form,
                                 quotient_closed_form, verify_annihilation, verify_nesting)
from fredres.errors import BudgetError, SingularLeadingCoefficientError
from fredres.quotient import factorize, laurent_inverse_sequential
from fredres.series import TaylorSeries, series_inverse_taylor

HALF = np.sqrt(0.5)


def test_f3_closed_quotient_differs_from_sequential():
    # 2x2 hand arithmetic: P_1 N + (P_2 - P_1) I  vs  P_2 A^(1)_0 + Q_2 A^(1)_1
    ch = factorize(fixtures.f3())
    cf = quotient_closed_form(fixtures.f3(), ch.projectors, 2)
    np.testing.assert_allclose(cf, [[-0.5, 1.5], [0.5, 0.5]], atol=1e-14)
    np.testing.assert_allclose(ch.leading(2), [[0.5, 1], [-0.5, 1]], atol=1e-14)


def test_f3_annihilation_table():
    ch = factorize(fixtures.f3())
    ann = verify_annihilation(ch.projectors, 2)
    assert not ann["pass"]
    assert ann["residuals"]["(P1-P0)(P2-P1)"] == pytest.approx(HALF)
    assert ann["residuals"]["(P1-P0)(I-P1)"] == pytest.approx(0.0)
    assert verify_nesting(ch.projectors) == [False, True]


def test_f3_closed_form_is_flagged():
    cf = closed_form_inverse(factorize(fixtures.f3()), 3)
    assert cf.status == "unverified"
    # H_0 (I - P_2) with H_0 = G_0^{-1}, worked out by hand
    np.testing.assert_allclose(cf.psi.psi(-2), [[-1, 1], [0, 0]], atol=1e-14)
    np.testing.assert_allclose(cf.G[0], [[-0.5, 1.5], [0.5, 0.5]], atol=1e-14)


def test_f6_closed_form_is_flagged():
    ch = factorize(reexpand_at_one(fixtures.ar_f6()))
    cf = closed_form_inverse(ch, 3)
    seq = laurent_inverse_sequential(ch, 3)
    assert cf.status == "unverified"
    assert np.linalg.norm(cf.psi.psi(-2) - seq.psi(-2)) > 1e-3


@pytest.mark.parametrize("make", [fixtures.f1, fixtures.f2])
def test_nested_fixtures_agree(make):
    ch = factorize(make())
    cf = closed_form_inverse(ch, 5)
    seq = laurent_inverse_sequential(ch, 5)
    assert cf.verified and cf.checks["quotient_residual"] < 1e-14
    for j in seq.degrees:
        np.testing.assert_allclose(cf.psi.psi(j), seq.psi(j), atol=1e-12)


def test_f2_values():
    cf = closed_form_inverse(factorize(fixtures.f2()), 2)
    np.testing.assert_allclose(cf.psi.psi(-1), np.diag([1, 0]))
    np.testing.assert_allclose(cf.psi.psi(0), np.diag([0, 1]))


def test_compute_H_matches_series_inverse(rng):
    s = random_problem(rng, 3, 1)
    ch = factorize(s)
    G = [compute_G(s, ch.projectors, ch.d, k) for k in range(7)]
    H = compute_H(G, 6)
    ref = series_inverse_taylor(TaylorSeries(np.stack(G)), 6)
    for j in range(7):
        np.testing.assert_allclose(H[j], ref.coeffs[j], atol=1e-9 * max(1, np.abs(ref.coeffs[j]).max()))


def test_compute_H_errors():
    with pytest.raises(SingularLeadingCoefficientError):
        compute_H([np.zeros((2, 2))], 0)
    with pytest.raises(BudgetError):
        compute_H([np.eye(2)], 3)


def test_psi_needs_enough_H():
    ch = factorize(fixtures.f2())
    with pytest.raises(IndexError):
        psi_closed_form([np.eye(2)], ch.projectors, 1, 3)


def test_closed_form_budget():
    s = TaylorSeries(fixtures.f3().padded(4).coeffs)
    with pytest.raises(BudgetError):
        closed_form_inverse(factorize(s), 2)


def test_quotient_closed_form_range():
    ch = factorize(fixtures.f2())
    with pytest.raises(ValueError):
        quotient_closed_form(fixtures.f2(), ch.projectors, 3)


@given(st.lists(st.integers(0, 3), min_size=2, max_size=4).filter(lambda e: max(e) > 0),
       st.integers(0, 2 ** 32 - 1))
def test_unitarily_diagonal_families_agree(exponents, seed):
    s = diagonal_family(np.random.default_rng(seed), exponents)
    ch = factorize(s)
    cf = closed_form_inverse(ch, 4)
    assert cf.verified and all(cf.checks["nesting"])
    seq = laurent_inverse_sequential(ch, 4)
    for j in seq.degrees:
        scale = max(1.0, np.abs(seq.psi(j)).max())
        np.testing.assert_allclose(cf.psi.psi(j), seq.psi(j), atol=1e-8 * scale)
