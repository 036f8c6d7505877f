import numpy as np
import pytest

from _helpers import random_problem, smith_problem
from fredres import check_conditions, factorize, fixtures, reexpand_at_one
from fredres.conditions import range_accumulation

FIXTURES = {
    "F1": fixtures.f1, "F2": fixtures.f2, "F3": fixtures.f3,
    "F4@1": lambda: reexpand_at_one(fixtures.ar_f4()),
    "F5@1": lambda: reexpand_at_one(fixtures.ar_f5()),
    "F6@1": lambda: reexpand_at_one(fixtures.ar_f6()),
}


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_all_criteria_agree_on_fixtures(name):
    ch = factorize(FIXTURES[name]())
    rep = check_conditions(ch, oracle_order=ch.d)
    assert rep.agreement["all_agree"] and all(rep.agreement["verdicts"].values())
    assert rep.rank_kernel_duality
    assert rep.summed_matrix_rank == ch.dim
    assert rep.hilbert_direct_sum["holds"]


def test_identity_is_vacuous():
    rep = check_conditions(factorize(fixtures.identity()))
    assert rep.vacuous and rep.cond_invertibility
    assert rep.to_dict()["d_claimed"] == 0


def test_accumulation_nested_vs_not():
    ch = factorize(fixtures.f2())
    assert all(range_accumulation(fixtures.f2(), ch.projectors, k)["match"] for k in (1, 2))
    # F3: ran A_0 + ran (I - P_1) A_1 is the whole plane, ran P_2 is a line
    ch = factorize(fixtures.f3())
    r = range_accumulation(fixtures.f3(), ch.projectors, 2)
    assert not r["match"] and r["rhs_rank"] == 2 and r["target_rank"] == 1
    assert range_accumulation(fixtures.f3(), ch.projectors, 3)["match"]
    with pytest.raises(ValueError):
        range_accumulation(fixtures.f3(), ch.projectors, 4)


def test_direct_sum_fails_without_nesting():
    assert not check_conditions(factorize(fixtures.f3())).cond_range_sum_direct
    assert check_conditions(factorize(fixtures.f2())).cond_range_sum_direct


def test_oracle_disagreement_is_reported():
    rep = check_conditions(factorize(fixtures.f2()), oracle_order=2)
    assert rep.agreement["verdicts"]["i_oracle"] is False
    assert not rep.agreement["all_agree"]


@pytest.mark.parametrize("seed", range(6))
def test_random_and_smith_problems(seed):
    rng = np.random.default_rng(seed)
    for s in (random_problem(rng, 3, 1 + seed % 2), smith_problem(rng, [1 + seed % 3, 0, 1])):
        ch = factorize(s)
        rep = check_conditions(ch)
        assert rep.cond_invertibility
        assert rep.rank_kernel_duality
        assert rep.agreement["iii_iv_agree"]
