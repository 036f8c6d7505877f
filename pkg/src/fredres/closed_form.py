"""Closed-form quotient, G/H and Psi formulas, with checks of their premises.

The formulas are evaluated literally in terms of the Taylor coefficients
``A_j`` and the projectors ``P_0 = 0, P_1, .., P_d, P_{d+1} = I``.  They rest
on the annihilation relations ``(P_{j+1}-P_j)(P_{l+1}-P_l) = 0`` (``j != l``)
and ``(P_{j+1}-P_j)(I-P_k) = 0`` (``j < k``), which do not hold for every
input; :func:`verify_annihilation` measures them and results are tagged
``unverified`` when they fail.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, SingularLeadingCoefficientError
from .series import LaurentExpansion, TaylorSeries, is_invertible
from .subspace import is_contained

ANNIHILATION_TOL = 1e-8


def _coeff_stack(coeffs):
    if isinstance(coeffs, TaylorSeries):
        return coeffs
    return TaylorSeries(np.asarray(coeffs, dtype=np.complex128))


def _coeff(a, j):
    if j > a.trunc_order and not a.exact:
        raise BudgetError(f"needs Taylor coefficient A_{j}, series valid through {a.trunc_order}")
    return a.coeff(j)


def _proj_list(projectors):
    return [np.asarray(getattr(p, "matrix", p), dtype=np.complex128) for p in projectors]


def _P(plist, j, n, d=None):
    """``P_j`` with ``P_0 = 0`` and ``P_j = I`` past ``d``."""
    d = len(plist) if d is None else d
    if j <= 0:
        return np.zeros((n, n), dtype=np.complex128)
    if j > d:
        return np.eye(n, dtype=np.complex128)
    return plist[j - 1]


def quotient_closed_form(coeffs, projectors, k):
    """``A^(k)(z0) = sum_{j<k} (P_{j+1}-P_j) A_j + (I - P_k) A_k``."""
    a = _coeff_stack(coeffs)
    plist = _proj_list(projectors)
    n = a.dim
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > len(plist):
        raise ValueError(f"projectors P_1..P_{k} are required, only {len(plist)} given")
    out = (np.eye(n) - _P(plist, k, n)) @ _coeff(a, k)
    for j in range(k):
        out = out + (_P(plist, j + 1, n) - _P(plist, j, n)) @ _coeff(a, j)
    return out


def compute_G(coeffs, projectors, d, k):
    """``G_k = sum_{j=0}^{d} (P_{j+1} - P_j) A_{k+j}`` with ``P_{d+1} = I``."""
    a = _coeff_stack(coeffs)
    plist = _proj_list(projectors)[:d]
    n = a.dim
    out = np.zeros((n, n), dtype=np.complex128)
    for j in range(d + 1):
        out = out + (_P(plist, j + 1, n, d) - _P(plist, j, n, d)) @ _coeff(a, k + j)
    return out


def compute_H(G, order, tol=None):
    """``H_0 = G_0^{-1}``, ``H_j = -G_0^{-1} sum_{k=1}^{j} G_k H_{j-k}``.

    Deliberately a plain loop, independent of the series kernels, so that it
    can be checked against :func:`fredres.series.series_inverse_taylor`.
    """
    G = [np.asarray(g, dtype=np.complex128) for g in G]
    if not is_invertible(G[0], tol):
        raise SingularLeadingCoefficientError("G_0 is singular (pole order misdetected?)")
    if len(G) < order + 1:
        raise BudgetError(f"H_{order} needs G_0..G_{order}, got {len(G)} terms")
    g0_inv = np.linalg.inv(G[0])
    H = [g0_inv]
    for j in range(1, order + 1):
        acc = np.zeros_like(g0_inv)
        for k in range(1, j + 1):
            acc = acc + G[k] @ H[j - k]
        H.append(-g0_inv @ acc)
    return H


def psi_closed_form(H, projectors, d, j):
    """Laurent coefficient ``Psi_j`` from the closed-form sums.

    ``j < 0``: ``sum_{l=0}^{j+d} H_{j+d-l} (P_{d+1-l} - P_{d-l})``;
    ``j >= 0``: ``sum_{l=0}^{d} H_{j+l} (P_{l+1} - P_l)``.
    """
    if j < -d:
        raise IndexError(f"degree {j} is below the pole order {d}")
    plist = _proj_list(projectors)[:d]
    n = np.asarray(H[0]).shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    if j < 0:
        terms = [(j + d - l, d + 1 - l, d - l) for l in range(j + d + 1)]
    else:
        terms = [(j + l, l + 1, l) for l in range(d + 1)]
    for h_idx, hi, lo in terms:
        if h_idx >= len(H):
            raise IndexError(f"Psi_{j} needs H_{h_idx}, only {len(H)} available")
        out = out + H[h_idx] @ (_P(plist, hi, n, d) - _P(plist, lo, n, d))
    return out


def verify_annihilation(projectors, d, tol=ANNIHILATION_TOL):
    """Norms of the products that the closed forms assume to vanish.

    Covers ``(P_{j+1}-P_j)(P_{l+1}-P_l)`` for ``0 <= j != l <= d`` and
    ``(P_{j+1}-P_j)(I-P_k)`` for ``1 <= k <= d``, ``0 <= j < k``.
    Returns ``{"residuals": {label: norm}, "max": float, "pass": bool}``.
    """
    plist = _proj_list(projectors)[:d]
    n = plist[0].shape[0] if plist else None
    resid = {}
    if n is not None:
        diff = [_P(plist, j + 1, n, d) - _P(plist, j, n, d) for j in range(d + 1)]
        for j in range(d + 1):
            for l in range(d + 1):
                if j != l:
                    resid[f"(P{j + 1}-P{j})(P{l + 1}-P{l})"] = float(np.linalg.norm(diff[j] @ diff[l], 2))
        for k in range(1, d + 1):
            qk = np.eye(n) - _P(plist, k, n, d)
            for j in range(k):
                resid[f"(P{j + 1}-P{j})(I-P{k})"] = float(np.linalg.norm(diff[j] @ qk, 2))
    worst = max(resid.values(), default=0.0)
    return {"residuals": resid, "max": worst, "pass": bool(worst < tol)}


def verify_nesting(projectors, n=None):
    """``[ran P_k subset ran P_{k+1}]`` for ``k = 1..d`` (``P_{d+1} = I``)."""
    bases = [p.range_basis for p in projectors]
    if n is None:
        if not projectors:
            return []
        n = projectors[0].dim
    bases.append(np.eye(n))
    return [bool(is_contained(bases[i], bases[i + 1])) for i in range(len(projectors))]


@dataclass(frozen=True, eq=False)
class ClosedFormResult:
    G: list
    H: list
    psi: LaurentExpansion
    checks: dict = field(default_factory=dict)

    @property
    def verified(self):
        return bool(self.checks.get("annihilation", {}).get("pass", False))

    @property
    def status(self):
        return "verified" if self.verified else "unverified"


def closed_form_inverse(chain, order, tol=None):
    """Run the closed forms on the projectors of a sequential ``chain``.

    ``checks`` records the annihilation table, per-pair nesting, the residual
    ``||A^(d)(z0)_closed - A^(d)(z0)_sequential||`` and the largest gap between
    ``G_k`` and the sequential quotient's Taylor coefficients.
    """
    a = chain.series
    d = chain.d
    projectors = chain.projectors
    n = chain.dim
    top = order + d
    if not a.exact and a.trunc_order < top + d:
        raise BudgetError(f"closed form through degree {order} needs A_0..A_{top + d}, "
                          f"series valid through {a.trunc_order}")
    G = [compute_G(a, projectors, d, k) for k in range(top + 1)]
    H = compute_H(G, top, tol if tol is not None else chain.rank_tol)
    psi = np.stack([psi_closed_form(H, projectors, d, j) for j in range(-d, order + 1)])
    expansion = LaurentExpansion(psi, center=chain.center, pole_order=d, method="closed-form")

    quot_closed = quotient_closed_form(a, projectors, d) if d else a.coeffs[0]
    quot_seq = chain.leading(d)
    seq = chain.quotient
    shared = top if seq.exact else min(top, seq.trunc_order)
    g_gap = max(float(np.linalg.norm(G[k] - seq.coeff(k))) for k in range(shared + 1))
    checks = {
        "annihilation": verify_annihilation(projectors, d),
        "nesting": verify_nesting(list(projectors), n),
        "quotient_residual": float(np.linalg.norm(quot_closed - quot_seq)),
        "g_residual": g_gap,
    }
    return ClosedFormResult(G, H, expansion, checks)
