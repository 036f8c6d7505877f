"""Sequential Fredholm-quotient factorization.

Each step divides ``A^(k-1)(z)`` by the perturbed identity ``P_k + w Q_k``
(``w = z - z0``, ``P_k`` a projector onto ``ran A^(k-1)(z0)``) and leaves a
quotient ``A^(k)`` whose inverse has a pole one order lower.  The reference
inverse multiplies ``A^(d)(z)^{-1}`` with the literal Laurent-polynomial
product ``(P_d + w^{-1}Q_d) ... (P_1 + w^{-1}Q_1)``.
"""
from dataclasses import dataclass, field

import numpy as np

from .config import rank_tol as _resolve_tol
from .errors import BudgetError, PoleOrderExceededError
from .series import (
    LaurentExpansion,
    LaurentSeries,
    TaylorSeries,
    evaluate_many,
    is_invertible,
    perturbed_identity,
    perturbed_identity_inverse,
    series_inverse_taylor,
    series_multiply,
)
from .subspace import (
    is_contained,
    orthogonal_projector,
    projector_onto_range,
    rank_margin_warnings,
)

DEFAULT_MAX_POLE_ORDER = 8


@dataclass(frozen=True, eq=False)
class QuotientChain:
    """Result of :func:`factorize`.

    ``quotients[k]`` is ``A^(k)`` for ``k = 0..d`` (so ``quotients[0]`` is the
    input).  ``nesting[k-1]`` records whether ``ran P_k`` lies in
    ``ran P_{k+1}`` for ``k = 1..d`` (with ``P_{d+1} = I``).
    """

    projectors: tuple
    quotients: tuple
    rank_tol: float
    nesting: tuple = ()
    warnings: tuple = field(default=())

    @property
    def d(self):
        return len(self.projectors)

    @property
    def dim(self):
        return self.quotients[0].dim

    @property
    def center(self):
        return self.quotients[0].center

    @property
    def series(self):
        return self.quotients[0]

    @property
    def quotient(self):
        """``A^(d)``, whose value at the center is invertible."""
        return self.quotients[-1]

    def leading(self, k):
        """``A^(k)(z0)``."""
        return self.quotients[k].coeffs[0]

    def projector(self, k):
        """``P_k`` with the conventions ``P_0 = 0`` and ``P_k = I`` for ``k > d``."""
        if k <= 0:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        if k > self.d:
            return np.eye(self.dim, dtype=np.complex128)
        return self.projectors[k - 1].matrix

    def projector_obj(self, k):
        if 1 <= k <= self.d:
            return self.projectors[k - 1]
        n = self.dim
        return orthogonal_projector(np.eye(n) if k > self.d else np.zeros((n, 0)), n=n)


def quotient_step(s, tol=None, rng=None):
    """One division by a perturbed identity.

    Returns ``(P, S')`` with ``S'_j = P S_j + Q S_{j+1}``; one order of
    truncation is consumed unless ``s`` is exact.

    Raises
    ------
    ValueError
        The leading coefficient is already invertible.
    BudgetError
        ``s`` has no coefficient beyond its constant term.
    """
    tol = _resolve_tol(tol)
    if is_invertible(s.coeffs[0], tol):
        raise ValueError("leading coefficient is invertible; no quotient step needed")
    if s.exact:
        s = s.padded(s.trunc_order + 1)
    elif s.trunc_order < 1:
        raise BudgetError("truncation budget exhausted: no coefficient left to shift")
    proj = projector_onto_range(s.coeffs[0], tol, rng=rng)
    p = proj.matrix
    q = proj.complement
    c = s.coeffs
    new = np.matmul(p, c[:-1]) + np.matmul(q, c[1:])
    if s.exact:
        # the trailing padded zero row shifts out cleanly
        return proj, TaylorSeries(new, center=s.center, exact=True, radius=s.radius)
    return proj, TaylorSeries(new, center=s.center, radius=s.radius)


def probe_determinant(s, radii=(0.01, 0.1), samples=16):
    """Smallest ``sigma_min / sigma_max`` of ``A(z)`` over two small circles.

    A value near machine precision suggests ``A(z)`` is singular throughout a
    punctured neighbourhood (``det A == 0``), i.e. no isolated singularity.
    """
    worst = np.inf
    theta = 2 * np.pi * (np.arange(samples) + 0.5) / samples
    for r in radii:
        zs = s.center + r * np.exp(1j * theta)
        for m in evaluate_many(s, zs):
            sv = np.linalg.svd(m, compute_uv=False)
            ratio = sv[-1] / sv[0] if sv[0] > 0 else 0.0
            worst = min(worst, ratio)
    return float(worst)


def factorize(s, max_pole_order=DEFAULT_MAX_POLE_ORDER, tol=None, output_order=None, rng=None):
    """Iterate :func:`quotient_step` until the leading coefficient is invertible.

    Parameters
    ----------
    s : TaylorSeries
    max_pole_order : int
        Give up after this many steps.
    output_order : int, optional
        If given, validate up front that a truncated ``s`` carries at least
        ``max_pole_order + output_order + 1`` coefficients beyond the constant.
    rng : numpy.random.Generator, optional
        Expert option: draw a random (oblique) kernel for every ``P_k``
        instead of the orthogonal choice.
    """
    tol = _resolve_tol(tol)
    if output_order is not None and not s.exact:
        need = max_pole_order + output_order + 1
        if s.trunc_order < need:
            raise BudgetError(
                f"truncation order {s.trunc_order} < max_pole_order + output order + 1 = {need}"
            )
    projectors = []
    quotients = [s]
    warns = list(rank_margin_warnings(s.coeffs[0], tol, "A^(0)(z0)"))
    cur = s
    while not is_invertible(cur.coeffs[0], tol):
        k = len(projectors) + 1
        if k > max_pole_order:
            ratio = probe_determinant(s)
            if ratio < 1e-12:
                why = ("A(z) looks singular on a punctured neighbourhood of the center "
                       f"(min sigma ratio {ratio:.1e}); the singularity is not isolated")
            else:
                why = (f"A(z) is invertible near the center (min sigma ratio {ratio:.1e}); "
                       "raise max_pole_order or supply more Taylor coefficients")
            raise PoleOrderExceededError(f"pole order exceeds {max_pole_order}: {why}")
        if not cur.exact and cur.trunc_order < 1:
            raise BudgetError(f"truncation budget exhausted after {k - 1} quotient steps")
        proj, cur = quotient_step(cur, tol, rng=rng)
        projectors.append(proj)
        quotients.append(cur)
        warns.extend(rank_margin_warnings(cur.coeffs[0], tol, f"A^({k})(z0)"))
    n = s.dim
    bases = [p.range_basis for p in projectors] + [np.eye(n)]
    nesting = tuple(is_contained(bases[i], bases[i + 1]) for i in range(len(projectors)))
    return QuotientChain(tuple(projectors), tuple(quotients), tol, nesting, tuple(warns))


def inverse_factor_product(chain):
    """Exact ``(P_d + w^{-1} Q_d) ... (P_1 + w^{-1} Q_1)`` as a Laurent polynomial."""
    n = chain.dim
    prod = LaurentSeries(np.eye(n)[None], center=chain.center, exact=True)
    for k in range(chain.d, 0, -1):
        prod = series_multiply(prod, perturbed_identity_inverse(chain.projector(k), chain.center))
    return prod


def laurent_inverse_sequential(chain, order):
    """``Psi_{-d} .. Psi_order`` of ``A(z)^{-1}`` from the quotient chain."""
    d = chain.d
    quot = chain.quotient
    if not quot.exact and quot.trunc_order < order + d:
        raise BudgetError(
            f"quotient A^({d}) is valid through degree {quot.trunc_order}; "
            f"degree {order} of the inverse needs {order + d}"
        )
    h = series_inverse_taylor(quot, order + d, chain.rank_tol)
    if d == 0:
        return LaurentExpansion(h.coeffs[:order + 1], center=chain.center, pole_order=0,
                                method="sequential")
    full = series_multiply(h, inverse_factor_product(chain))
    return LaurentExpansion.from_series(full, d, order, method="sequential")


def invert(s, order, max_pole_order=DEFAULT_MAX_POLE_ORDER, tol=None, rng=None):
    """Convenience: factorize then expand.  Returns ``(chain, expansion)``."""
    chain = factorize(s, max_pole_order=max_pole_order, tol=tol, rng=rng)
    return chain, laurent_inverse_sequential(chain, order)


def factor_product(chain):
    """Exact ``(P_1 + w Q_1) ... (P_d + w Q_d)`` (for the factorization identity)."""
    n = chain.dim
    prod = TaylorSeries(np.eye(n)[None], center=chain.center, exact=True)
    for k in range(1, chain.d + 1):
        prod = series_multiply(prod, perturbed_identity(chain.projector(k), chain.center))
    return prod
