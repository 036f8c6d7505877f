"""Autoregressive laws of motion ``sum_j A_j X_{t-j} = e_t`` with a unit root at one.

The analysis re-centers the characteristic polynomial ``A(z) = sum_j A_j z^j``
at ``z = 1``, factorizes it there and extracts

* the principal Laurent coefficients ``Psi_{-d} .. Psi_{-1}`` at one,
* the taps of the filter ``(1 - z)^d A(z)^{-1}`` expanded at zero, which
  carries all sign conventions (``Delta^d X_t = filter(L) e_t``),
* the MA coefficients ``Phi_j`` of the stationary part.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import kernels
from .closed_form import quotient_closed_form
from .errors import NumericError, UnitRootConfigError
from .quotient import DEFAULT_MAX_POLE_ORDER, factorize, laurent_inverse_sequential
from .series import TaylorSeries, is_invertible, series_inverse_taylor

ROOT_TOL = 1e-6
DEFAULT_ETA = 0.1


@dataclass(frozen=True, eq=False)
class ARModel:
    """Coefficients ``A_0 .. A_p`` (stacked), innovation covariance and margin ``eta``."""

    coeffs: np.ndarray
    covariance: np.ndarray = None
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.ndim == 1:
            c = c.reshape(-1, 1, 1)
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[0] < 1:
            raise ValueError(f"AR coefficients must be a (p+1, n, n) stack, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("AR coefficients must be finite")
        if c.shape[0] > 1 and not np.any(c[-1]):
            raise ValueError("the last lag coefficient A_p must be nonzero")
        n = c.shape[1]
        cov = np.eye(n) if self.covariance is None else np.array(self.covariance, dtype=np.complex128)
        if cov.shape != (n, n):
            raise ValueError("covariance has the wrong shape")
        if not np.allclose(cov, cov.conj().T, atol=1e-12):
            raise ValueError("covariance must be Hermitian")
        if np.min(np.linalg.eigvalsh(cov)) < -1e-12 * max(1.0, np.abs(cov).max()):
            raise ValueError("covariance must be positive semidefinite")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self):
        return self.coeffs.shape[1]

    @property
    def lags(self):
        return self.coeffs.shape[0] - 1

    def characteristic(self):
        """``A(z)`` as an exact series centered at zero."""
        return TaylorSeries(self.coeffs, center=0.0, exact=True)


def determinant_roots(model):
    """Finite zeros of ``det A(z)`` from the block-companion pencil."""
    c = model.coeffs
    n, p = model.dim, model.lags
    if not np.any(c):
        raise ValueError("zero polynomial")
    if p == 0:
        if not is_invertible(c[0]):
            raise NumericError("A(z) = A_0 is constant and singular")
        return np.zeros(0, dtype=complex)
    # y = [x, z x, ..., z^{p-1} x]:  L0 y = z L1 y
    L0 = np.zeros((n * p, n * p), dtype=complex)
    L1 = np.eye(n * p, dtype=complex)
    for i in range(p - 1):
        L0[i * n:(i + 1) * n, (i + 1) * n:(i + 2) * n] = np.eye(n)
    for j in range(p):
        L0[(p - 1) * n:, j * n:(j + 1) * n] = -c[j]
    L1[(p - 1) * n:, (p - 1) * n:] = c[p]
    probe = 0.1 + 0.7 * np.exp(2j * np.pi * np.arange(5) / 5)
    scale = max(1.0, float(np.abs(c).sum(axis=0).max())) ** n
    if all(abs(np.linalg.det(model.characteristic().evaluate(z))) <= 1e-13 * scale for z in probe):
        raise NumericError("singular pencil: det A(z) vanishes identically")
    vals = linalg.eigvals(L0, L1)
    finite = vals[np.isfinite(vals)]
    return finite[np.argsort(np.abs(finite))]


@dataclass
class Diagnosis:
    kind: str  # "stationary" | "unit-root-at-one" | "violating"
    roots: np.ndarray
    eta: float
    unit_roots: np.ndarray = None
    offending: np.ndarray = None

    @property
    def moduli(self):
        return np.abs(self.roots)

    def to_dict(self):
        pair = lambda arr: [[float(z.real), float(z.imag)] for z in arr]
        return {"kind": self.kind, "eta": self.eta, "roots": pair(self.roots),
                "moduli": [float(m) for m in self.moduli],
                "unit_roots": pair(self.unit_roots), "offending": pair(self.offending)}


def check_unit_root_config(model, eta=None, root_tol=ROOT_TOL):
    """Classify the zeros of ``det A(z)`` relative to the disk ``|z| <= 1 + eta``.

    ``violating`` means a zero other than ``z = 1`` lies in that disk.
    """
    eta = model.eta if eta is None else eta
    roots = determinant_roots(model)
    at_one = np.abs(roots - 1) <= root_tol
    inside = np.abs(roots) <= 1 + eta
    offending = roots[inside & ~at_one]
    if offending.size:
        kind = "violating"
    elif at_one.any():
        kind = "unit-root-at-one"
    else:
        kind = "stationary"
    return Diagnosis(kind, roots, eta, roots[at_one], offending)


def reexpand_at_one(model, order=None):
    """Exact Taylor coefficients at one: ``A_{j,1} = sum_{m>=j} C(m, j) A_{0,m}``."""
    p = model.lags
    c = model.coeffs
    top = p if order is None else max(order, p)
    out = np.zeros((top + 1, model.dim, model.dim), dtype=np.complex128)
    for j in range(p + 1):
        for m in range(j, p + 1):
            out[j] += math.comb(m, j) * c[m]
    return TaylorSeries(out, center=1.0, exact=True)


def pi_binomial(j, k):
    """``pi_j(k) = k (k-1) ... (k-j+1) / j!`` (the binomial coefficient for integers)."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    if isinstance(k, (int, np.integer)) and k >= 0:
        if j > k:
            warnings.warn(f"pi_{j}({k}) with j > k is 0 by convention", stacklevel=2)
            return 0
        return math.comb(int(k), int(j))
    num = 1.0
    for i in range(j):
        num *= k - i
    return num / math.factorial(j)


def inverse_at_zero(model, order):
    """Taylor coefficients of ``A(z)^{-1}`` at ``z = 0`` through ``order``."""
    return series_inverse_taylor(model.characteristic(), order).coeffs


def principal_at_zero(principal, order):
    """Expand ``sum_m Psi_{-m} (z - 1)^{-m}`` around zero through ``order``.

    Uses ``(z - 1)^{-m} = (-1)^m sum_j C(j + m - 1, m - 1) z^j``.
    """
    d = len(principal)
    n = principal.shape[1] if d else 0
    out = np.zeros((order + 1, n, n), dtype=np.complex128)
    for m in range(1, d + 1):
        psi = principal[d - m]  # principal[0] is Psi_{-d}
        for j in range(order + 1):
            out[j] += (-1) ** m * math.comb(j + m - 1, m - 1) * psi
    return out


@dataclass
class PhiResult:
    phi: np.ndarray
    method: str
    secondary: np.ndarray = None
    secondary_status: str = "not computed"
    secondary_max_diff: float = None


def phi_coefficients(laurent, model, order, secondary_terms=None):
    """MA coefficients ``Phi_0 .. Phi_order`` of the stationary component.

    Primary route: Taylor coefficients at zero of ``A(z)^{-1}`` minus the
    expansion at zero of its principal part at one.  Secondary route, run
    only when the analytic part at one converges at ``z = 0`` (no other zero of
    ``det A`` within distance 1 of ``z = 1``):
    ``Phi_j = sum_{k>=j} (-1)^{k-j} pi_j(k) Psi_k`` over the retained ``Psi_k``.
    """
    taylor0 = inverse_at_zero(model, order)
    phi = taylor0 - principal_at_zero(laurent.principal, order)
    res = PhiResult(phi, "recentered")

    roots = determinant_roots(model)
    others = roots[np.abs(roots - 1) > ROOT_TOL]
    dist = float(np.min(np.abs(others - 1))) if others.size else np.inf
    if dist <= 1.0:
        res.secondary_status = f"inapplicable: analytic part at 1 has radius {dist:.3g} <= 1"
        return res
    K = laurent.order if secondary_terms is None else min(secondary_terms, laurent.order)
    n = model.dim
    sec = np.zeros((order + 1, n, n), dtype=np.complex128)
    diffs = []
    for j in range(min(order, K) + 1):
        last = 0.0
        for k in range(j, K + 1):
            term = (-1) ** (k - j) * math.comb(k, j) * laurent.psi(k)
            sec[j] += term
            last = float(np.linalg.norm(term))
        if last < 1e-12 * max(1.0, float(np.linalg.norm(sec[j]))):
            diffs.append(float(np.linalg.norm(sec[j] - phi[j])))
    res.secondary = sec
    res.secondary_max_diff = max(diffs) if diffs else None
    res.secondary_status = f"converged for {len(diffs)} lags" if diffs else "not converged at retained order"
    return res


def long_run_filter(laurent_principal, phi, d, order):
    """Taps of ``(1-z)^d A(z)^{-1}`` at zero from the Laurent data at one.

    ``(1-z)^d sum_m Psi_{-m} (z-1)^{-m} = sum_m (-1)^m Psi_{-m} (1-z)^{d-m}``
    plus ``(1-z)^d sum_j Phi_j z^j``.
    """
    n = phi.shape[1]
    out = np.zeros((order + 1, n, n), dtype=np.complex128)
    for m in range(1, d + 1):
        psi = laurent_principal[d - m]
        for i in range(min(d - m, order) + 1):
            out[i] += (-1) ** m * math.comb(d - m, i) * (-1) ** i * psi
    diff_poly = np.array([(-1) ** i * math.comb(d, i) for i in range(d + 1)], dtype=float)
    for j in range(order + 1):
        for i in range(min(d, j) + 1):
            out[j] += diff_poly[i] * phi[j - i]
    return out


def difference_filter_direct(model, d, order):
    """Taps of ``(1-z)^d A(z)^{-1}`` from direct inversion at zero."""
    t = inverse_at_zero(model, order)
    out = np.zeros_like(t)
    for i in range(d + 1):
        out[i:] += (-1) ** i * math.comb(d, i) * t[:order + 1 - i]
    return out


def fit_decay(phi, floor=1e-13):
    """Least-squares geometric ratio of ``||Phi_j||``; exact zeros are skipped."""
    norms = np.array([np.linalg.norm(p) for p in phi])
    mask = norms > floor * max(1.0, norms.max())
    if mask.sum() < 2:
        return 0.0
    j = np.arange(len(phi))[mask]
    slope = np.polyfit(j, np.log(norms[mask]), 1)[0]
    return float(np.exp(slope))


@dataclass
class GrangerReport:
    d: int
    diagnosis: Diagnosis
    laurent: object
    principal: np.ndarray
    long_run: np.ndarray
    filter_taps: np.ndarray
    filter_taps_direct: np.ndarray
    filter_residual: float
    phi: np.ndarray
    phi_secondary_status: str
    phi_secondary_max_diff: float
    tail_norm: float
    tail_ok: bool
    decay_ratio: float
    quotient_checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


def _quotient_checks(chain, tol):
    """Side-by-side invertibility of ``A^(1)(1)`` and ``A^(2)(1)`` variants."""
    a = chain.series
    out = {}
    if chain.d >= 1:
        q1 = chain.projector_obj(1).complement
        minus = a.coeff(0) - q1 @ a.coeff(1)
        plus = a.coeff(0) + q1 @ a.coeff(1)
        out["A1_minus_invertible"] = bool(is_invertible(minus, tol))
        out["A1_plus_invertible"] = bool(is_invertible(plus, tol))
        out["A1_sequential_invertible"] = bool(is_invertible(chain.leading(1), tol))
    if chain.d >= 2:
        cf2 = quotient_closed_form(a, chain.projectors, 2)
        out["A2_closed_form_invertible"] = bool(is_invertible(cf2, tol))
        out["A2_sequential_invertible"] = bool(is_invertible(chain.leading(2), tol))
    return out


def granger_decomposition(model, order, eta=None, max_pole_order=DEFAULT_MAX_POLE_ORDER,
                          tol=None, tail_tol=1e-8, laurent_order=None):
    """Granger-Johansen decomposition at ``z = 1``.

    ``laurent_order`` (default ``order``) sets how many analytic ``Psi_k``
    are kept at one; ``order`` sets the retained lags of the filter and of
    ``Phi``.
    """
    diag = check_unit_root_config(model, eta)
    if diag.kind != "unit-root-at-one":
        raise UnitRootConfigError(f"diagnosis is {diag.kind!r}; roots {diag.roots}", diag)
    if not is_invertible(model.coeffs[0], tol):
        raise NumericError("A(0) is singular")
    lo = order if laurent_order is None else laurent_order
    at_one = reexpand_at_one(model)
    chain = factorize(at_one, max_pole_order=max_pole_order, tol=tol)
    d = chain.d
    laurent = laurent_inverse_sequential(chain, lo)
    phi_res = phi_coefficients(laurent, model, order)
    taps = long_run_filter(laurent.principal, phi_res.phi, d, order)
    taps_direct = difference_filter_direct(model, d, order)
    resid = float(max(np.linalg.norm(x - y) for x, y in zip(taps, taps_direct)))
    q = max(1, (order + 1) // 4)
    tail = float(max(np.linalg.norm(p) for p in phi_res.phi[-q:]))
    long_run = (-1) ** d * laurent.psi(-d)
    notes = [
        "filter convention: Delta^d X_t = sum_k taps[k] e_{t-k}; "
        "X_t = trends + sum_m (-1)^m Psi_{-m} (m-fold cumulated e) + nu_t",
        "deterministic terms (tau_0, tau_1, ...) depend on initial conditions and are not computed",
    ]
    return GrangerReport(
        d=d, diagnosis=diag, laurent=laurent, principal=laurent.principal.copy(),
        long_run=long_run, filter_taps=taps, filter_taps_direct=taps_direct,
        filter_residual=resid, phi=phi_res.phi,
        phi_secondary_status=phi_res.secondary_status,
        phi_secondary_max_diff=phi_res.secondary_max_diff,
        tail_norm=tail, tail_ok=bool(tail < tail_tol), decay_ratio=fit_decay(phi_res.phi),
        quotient_checks=_quotient_checks(chain, chain.rank_tol), notes=notes,
    )


def draw_shocks(covariance, steps, seed):
    """i.i.d. Gaussian shocks with the given covariance; deterministic in ``seed``."""
    cov = np.asarray(covariance, dtype=np.complex128)
    w, v = np.linalg.eigh(cov)
    root = v @ np.diag(np.sqrt(np.clip(w, 0, None)))
    z = np.random.default_rng(seed).standard_normal((steps, cov.shape[0]))
    return z @ root.T


def simulate_direct(model, steps, seed=None, shocks=None, init=None):
    """Solve the AR recursion forward.  Returns ``(X, shocks)``.

    ``init`` is a ``(p, n)`` array of pre-sample values ``X_{-p+1} .. X_0``;
    the default is a zero history.
    """
    if not is_invertible(model.coeffs[0]):
        raise NumericError("A_0 must be invertible to simulate")
    if shocks is None:
        shocks = draw_shocks(model.covariance, steps, seed)
    shocks = np.asarray(shocks, dtype=np.complex128)[:steps]
    p, n = model.lags, model.dim
    if init is None:
        return kernels.ar_recursion(model.coeffs, shocks), shocks
    init = np.asarray(init, dtype=np.complex128).reshape(p, n)
    # fold the history into effective shocks for the first p steps
    eff = shocks.copy()
    for t in range(min(p, steps)):
        for j in range(t + 1, p + 1):
            eff[t] -= model.coeffs[j] @ init[p - 1 - (j - t - 1)]
    return kernels.ar_recursion(model.coeffs, eff), shocks


def simulate_representation(report, shocks, steps=None):
    """Build ``Delta^d X_t`` from the filter taps, then cumulate ``d`` times.

    Returns ``(X, delta_d_X)`` with zero initial conditions.
    """
    shocks = np.asarray(shocks, dtype=np.complex128)
    if steps is not None:
        shocks = shocks[:steps]
    dd = kernels.fir_filter(report.filter_taps, shocks)
    x = dd
    for _ in range(report.d):
        x = np.cumsum(x, axis=0)
    return x, dd


def difference(x, d):
    """``Delta^d x_t`` with zero pre-sample values (same length as ``x``)."""
    out = np.asarray(x)
    for _ in range(d):
        out = np.diff(out, axis=0, prepend=np.zeros((1,) + out.shape[1:], dtype=out.dtype))
    return out


def agreement(report, model, steps, seed, burn_in=None):
    """Max ``||Delta^d X_t(direct) - Delta^d X_t(representation)||`` for ``t > burn_in``."""
    x_dir, shocks = simulate_direct(model, steps, seed)
    x_rep, dd_rep = simulate_representation(report, shocks)
    dd_dir = difference(x_dir, report.d)
    burn = len(report.filter_taps) - 1 if burn_in is None else burn_in
    gap = np.linalg.norm(dd_dir[burn + 1:] - dd_rep[burn + 1:], axis=1)
    return {
        "max_delta_gap": float(gap.max()) if gap.size else 0.0,
        "burn_in": burn,
        "steps": steps,
        "seed": seed,
        "x_direct": x_dir,
        "x_representation": x_rep,
        "shocks": shocks,
    }
