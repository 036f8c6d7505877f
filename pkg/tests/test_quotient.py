import numpy as np
import pytest
from hypothesis import given, strategies as st

from _helpers import random_problem, smith_problem
from fredres import fixtures
from fredres.errors import BudgetError, PoleOrderExceededError
from fredres.oracle import OracleConfig, contour_coefficients
from fredres.quotient import (factor_product, factorize, inverse_factor_product, invert,
                              laurent_inverse_sequential, probe_determinant, quotient_step)
from fredres.series import TaylorSeries, evaluate, series_multiply


def test_f1_single_step():
    ch = factorize(fixtures.f1())
    assert ch.d == 1
    np.testing.assert_allclose(ch.projector(1), 0)  # ran A_0 = {0}
    np.testing.assert_allclose(ch.leading(1), [[1]])


def test_f3_frozen_quotients():
    # hand computation with orthogonal projectors (2x2 arithmetic)
    ch = factorize(fixtures.f3())
    assert ch.d == 2
    np.testing.assert_allclose(ch.projector(1), [[1, 0], [0, 0]], atol=1e-14)
    np.testing.assert_allclose(ch.leading(1), [[0, 1], [0, 1]], atol=1e-14)
    np.testing.assert_allclose(ch.projector(2), 0.5 * np.ones((2, 2)), atol=1e-14)
    np.testing.assert_allclose(ch.leading(2), [[0.5, 1], [-0.5, 1]], atol=1e-14)
    assert ch.nesting == (False, True)


def test_projector_convention():
    ch = factorize(fixtures.f2())
    np.testing.assert_allclose(ch.projector(0), 0)
    np.testing.assert_allclose(ch.projector(ch.d + 1), np.eye(2))


def test_identity_no_steps():
    ch = factorize(fixtures.identity(3))
    assert ch.d == 0
    _, e = invert(fixtures.identity(3), 2)
    np.testing.assert_allclose(e.psi(0), np.eye(3))
    np.testing.assert_allclose(e.psi(2), 0)


def test_quotient_step_refuses_invertible():
    with pytest.raises(ValueError):
        quotient_step(fixtures.identity())


def test_factorization_identity():
    # A = (P_1 + w Q_1) ... (P_d + w Q_d) A^(d)
    for s in (fixtures.f1(), fixtures.f2(), fixtures.f3(), fixtures.f3(center=2.0)):
        ch = factorize(s)
        back = series_multiply(factor_product(ch), ch.quotient)
        for k in range(s.trunc_order + 3):
            np.testing.assert_allclose(back.coeff(k), s.coeff(k), atol=1e-13)


def test_inverse_factor_product_is_laurent_polynomial():
    ch = factorize(fixtures.f3())
    p = inverse_factor_product(ch)
    assert p.exact and p.min_degree == -2


def test_not_isolated():
    s = TaylorSeries(np.array([np.diag([0, 0]), np.diag([1, 0])], dtype=complex), exact=True)
    assert probe_determinant(s) < 1e-12
    with pytest.raises(PoleOrderExceededError, match="not isolated"):
        factorize(s, max_pole_order=4)


def test_pole_order_cap():
    s = smith_problem(np.random.default_rng(1), [3, 0])
    with pytest.raises(PoleOrderExceededError, match="raise max_pole_order"):
        factorize(s, max_pole_order=2)


def _truncated_f3(order):
    # F3 treated as a series known only through ``order``
    return TaylorSeries(fixtures.f3().padded(order).coeffs)


def test_budget_errors():
    with pytest.raises(BudgetError):
        factorize(_truncated_f3(1))  # second step has nothing left to shift
    ch = factorize(_truncated_f3(3))
    assert ch.quotient.trunc_order == 1
    with pytest.raises(BudgetError):
        laurent_inverse_sequential(ch, 0)  # needs the quotient through degree 2
    with pytest.raises(BudgetError):
        factorize(_truncated_f3(6), output_order=3)


def test_truncated_input_consumes_one_order_per_step():
    ch = factorize(_truncated_f3(6))
    assert [q.trunc_order for q in ch.quotients] == [6, 5, 4]
    e = laurent_inverse_sequential(ch, 2)
    np.testing.assert_allclose(e.psi(-2), [[0, -1], [0, 0]], atol=1e-13)
    np.testing.assert_allclose(e.psi(-1), np.eye(2), atol=1e-13)


def test_nonzero_center_matches_oracle():
    s = fixtures.f3(center=1 + 1j)
    _, e = invert(s, 4)
    orc = contour_coefficients(s, OracleConfig(0.5, 64), range(-2, 5))
    for j in range(-2, 5):
        np.testing.assert_allclose(e.psi(j), orc[j + 2], atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_oblique_kernel_gives_same_inverse(seed):
    s = random_problem(np.random.default_rng(seed), 3, 2)
    _, ref = invert(s, 5)
    _, obl = invert(s, 5, rng=np.random.default_rng(100 + seed))
    for j in ref.degrees:
        np.testing.assert_allclose(obl.psi(j), ref.psi(j), atol=1e-8 * max(1, np.abs(ref.psi(j)).max()))


@given(st.lists(st.integers(0, 3), min_size=2, max_size=4), st.integers(0, 2 ** 32 - 1))
def test_smith_pole_order_and_reconstruction(exponents, seed):
    s = smith_problem(np.random.default_rng(seed), exponents)
    ch, e = invert(s, 30)
    assert ch.d == max(exponents)
    # Psi(w) A(w) = I on a small circle
    n = len(exponents)
    for k in range(6):
        z = 0.02 * np.exp(2j * np.pi * k / 6)
        np.testing.assert_allclose(evaluate(e.as_series(), z) @ evaluate(s, z), np.eye(n), atol=1e-7)
