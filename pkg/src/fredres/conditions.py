"""Pole-order characterizations and range-accumulation identities.

For a chain with pole order ``d`` the four equivalent criteria are evaluated
independently of one another:

(i)   the pole order itself (taken from the chain; compare with an oracle),
(ii)  ``A^(d)(z0)`` invertible while ``A^(d-1)(z0)`` is not,
(iii) ``sum_j ran (P_{j+1}-P_j) A_j`` is the whole space and ``P_d != I``,
(iv)  ``cap_j ker (P_{j+1}-P_j) A_j = {0}`` and ``P_d != I``.
"""
from dataclasses import asdict, dataclass, field

import numpy as np

from .closed_form import _P, _coeff, _proj_list, quotient_closed_form
from .series import is_invertible
from .subspace import containment_residual, kernel_intersection, null_basis, range_basis, subspace_sum


@dataclass
class IdConditionReport:
    d_claimed: int
    vacuous: bool = False
    cond_invertibility: bool = None
    cond_invertibility_closed_form: bool = None
    cond_range_sum: bool = None
    cond_range_sum_direct: bool = None
    cond_kernel_intersection: bool = None
    cond_pd_not_identity: bool = None
    summed_matrix_rank: int = None
    summed_matrix_kernel_dim: int = None
    rank_kernel_duality: bool = None
    summand_ranks: list = field(default_factory=list)
    hilbert_direct_sum: dict = field(default_factory=dict)
    accumulation_check: list = field(default_factory=list)
    agreement: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _summands(a, plist, d, n):
    return [(_P(plist, j + 1, n, d) - _P(plist, j, n, d)) @ _coeff(a, j) for j in range(d + 1)]


def range_accumulation(coeffs, projectors, k, tol=None):
    """Compare ``ran A_0 + sum_{j=1}^{k-2} ran (P_{j+1}-P_j) A_j + ran (I-P_{k-1}) A_{k-1}``
    with ``ran P_k`` (or with the whole space when ``k = d + 1``).

    Returns ``{"k", "rhs_basis", "rhs_rank", "target_rank", "defect_rhs_in_target",
    "defect_target_in_rhs", "match"}``.
    """
    a = coeffs
    plist = _proj_list(projectors)
    d = len(plist)
    n = a.dim
    if not 1 <= k <= d + 1:
        raise ValueError(f"k must lie in 1..{d + 1}")
    terms = []
    for j in range(k):
        if j == k - 1:
            left = np.eye(n) - _P(plist, k - 1, n, d)
        else:
            left = _P(plist, j + 1, n, d) - _P(plist, j, n, d)
        terms.append(range_basis(left @ _coeff(a, j), tol))
    rhs = subspace_sum(*terms, tol=tol)
    target = np.eye(n, dtype=np.complex128) if k == d + 1 else projectors[k - 1].range_basis
    fwd = containment_residual(rhs, target)
    back = containment_residual(target, rhs)
    return {
        "k": k,
        "rhs_basis": rhs,
        "rhs_rank": rhs.shape[1],
        "target_rank": target.shape[1],
        "defect_rhs_in_target": fwd,
        "defect_target_in_rhs": back,
        "match": bool(fwd < 1e-8 and back < 1e-8),
    }


def check_conditions(chain, tol=None, oracle_order=None):
    """Evaluate criteria (ii)-(iv), the direct-sum forms and the accumulation identities."""
    tol = chain.rank_tol if tol is None else tol
    d = chain.d
    n = chain.dim
    a = chain.series
    rep = IdConditionReport(d_claimed=d)
    if d == 0:
        rep.vacuous = True
        rep.cond_invertibility = bool(is_invertible(a.coeffs[0], tol))
        return rep
    plist = _proj_list(chain.projectors)

    rep.cond_invertibility = bool(is_invertible(chain.leading(d), tol)
                                  and not is_invertible(chain.leading(d - 1), tol))
    cf_d = quotient_closed_form(a, chain.projectors, d)
    cf_dm1 = quotient_closed_form(a, chain.projectors, d - 1)
    rep.cond_invertibility_closed_form = bool(is_invertible(cf_d, tol) and not is_invertible(cf_dm1, tol))

    pd_not_identity = chain.projectors[d - 1].rank < n
    rep.cond_pd_not_identity = bool(pd_not_identity)

    summands = _summands(a, plist, d, n)
    ranges = [range_basis(m, tol) for m in summands]
    rep.summand_ranks = [r.shape[1] for r in ranges]
    span = subspace_sum(*ranges, tol=tol)
    rep.cond_range_sum = bool(span.shape[1] == n and pd_not_identity)
    rep.cond_range_sum_direct = bool(rep.cond_range_sum and sum(rep.summand_ranks) == n)

    common_kernel = kernel_intersection(*summands, tol=tol)
    rep.cond_kernel_intersection = bool(common_kernel.shape[1] == 0 and pd_not_identity)

    total = sum(summands)
    rep.summed_matrix_rank = int(range_basis(total, tol).shape[1])
    rep.summed_matrix_kernel_dim = int(null_basis(total, tol).shape[1])
    rep.rank_kernel_duality = bool((rep.summed_matrix_rank == n) == (rep.summed_matrix_kernel_dim == 0))

    # [ker M_j]^perp is the row space of M_j
    complements = [range_basis(m.conj().T, tol) for m in summands]
    perp_span = subspace_sum(*complements, tol=tol)
    rep.hilbert_direct_sum = {
        "complement_dims": [c.shape[1] for c in complements],
        "span_dim": int(perp_span.shape[1]),
        "holds": bool(perp_span.shape[1] == n),
    }

    for k in range(1, d + 2):
        r = range_accumulation(a, chain.projectors, k, tol)
        r.pop("rhs_basis")
        rep.accumulation_check.append(r)

    verdicts = {
        "ii_sequential": rep.cond_invertibility,
        "ii_closed_form": rep.cond_invertibility_closed_form,
        "iii": rep.cond_range_sum,
        "iv": rep.cond_kernel_intersection,
    }
    if oracle_order is not None:
        verdicts["i_oracle"] = bool(oracle_order == d)
    rep.agreement = {
        "verdicts": verdicts,
        "all_agree": len(set(verdicts.values())) == 1,
        "iii_iv_agree": rep.cond_range_sum == rep.cond_kernel_intersection,
    }
    return rep
