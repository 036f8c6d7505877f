"""Truncated matrix power and Laurent series.

A series stores its coefficients as a ``(K, n, n)`` complex array starting
at ``min_degree``.  Every series knows the highest degree it is valid up to
(``trunc_order``); coefficients beyond it are *unknown*, not zero, unless the
series is flagged ``exact`` (a matrix polynomial or Laurent polynomial).
Operations return the conservative truncation order and never pad silently.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import rank_tol as _resolve_tol
from .errors import BudgetError, SeriesMismatchError, SingularLeadingCoefficientError

_TRIM_RTOL = 1e-14


def as_cmatrix(m, n=None):
    """Coerce to a finite square complex128 matrix."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValueError(f"expected dimension {n}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _as_stack(coeffs):
    c = np.array(coeffs, dtype=np.complex128)
    if c.ndim == 1:  # scalar series
        c = c.reshape(-1, 1, 1)
    if c.ndim != 3 or c.shape[1] != c.shape[2]:
        raise ValueError(f"coefficients must be a (K, n, n) stack, got shape {c.shape}")
    if c.shape[0] == 0:
        raise ValueError("a series needs at least one coefficient")
    if not np.all(np.isfinite(c)):
        raise ValueError("series has non-finite coefficients")
    return c


def is_invertible(m, tol=None):
    """Smallest singular value above ``tol * sigma_max * n``."""
    m = np.asarray(m)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return False
    return bool(s[-1] > _resolve_tol(tol) * s[0] * m.shape[0])


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    """Matrix Laurent series ``sum_k coeffs[k - min_degree] (z - center)**k``.

    Leading coefficients that vanish at negative degrees are trimmed so that
    ``min_degree`` is the true lowest degree whenever it is negative.
    """

    coeffs: np.ndarray
    center: complex = 0.0
    min_degree: int = 0
    exact: bool = False
    radius: float = None  # validity radius of the underlying function, if known

    def __post_init__(self):
        c = _as_stack(self.coeffs)
        center = complex(self.center)
        if not np.isfinite(center):
            raise ValueError("center must be finite")
        lo = int(self.min_degree)
        # scale from degrees <= 0 only: a fast-growing analytic tail must not
        # make a genuine principal-part coefficient look negligible
        head = c[:max(1, 1 - lo)]
        scale = max(1.0, float(np.max(np.abs(head))))
        while lo < 0 and c.shape[0] > 1 and np.max(np.abs(c[0])) <= _TRIM_RTOL * scale:
            c = c[1:]
            lo += 1
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "min_degree", lo)

    @property
    def dim(self):
        return self.coeffs.shape[1]

    @property
    def trunc_order(self):
        return self.min_degree + self.coeffs.shape[0] - 1

    def coeff(self, k):
        """Coefficient of degree ``k``; zero below ``min_degree``."""
        if k < self.min_degree:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        if k > self.trunc_order:
            if self.exact:
                return np.zeros((self.dim, self.dim), dtype=np.complex128)
            raise BudgetError(f"degree {k} is beyond the truncation order {self.trunc_order}")
        return self.coeffs[k - self.min_degree]

    def evaluate(self, z):
        return evaluate(self, z)

    def __add__(self, other):
        return series_add(self, other)

    def __matmul__(self, other):
        return series_multiply(self, other)

    def __repr__(self):
        kind = "exact" if self.exact else f"trunc={self.trunc_order}"
        return (f"{type(self).__name__}(n={self.dim}, center={self.center}, "
                f"degrees {self.min_degree}..{self.trunc_order}, {kind})")


@dataclass(frozen=True, eq=False)
class TaylorSeries(LaurentSeries):
    """Matrix power series ``A(z) = sum_j A_j (z - z0)**j``."""

    def __post_init__(self):
        super().__post_init__()
        if self.min_degree != 0:
            raise ValueError("a Taylor series starts at degree 0")

    @classmethod
    def constant(cls, m, center=0.0, exact=True):
        return cls(as_cmatrix(m)[None], center=center, exact=exact)

    def padded(self, order):
        """Extend an exact series with explicit zero coefficients up to ``order``."""
        if order <= self.trunc_order:
            return self
        if not self.exact:
            raise BudgetError(
                f"cannot extend a truncated series from order {self.trunc_order} to {order}"
            )
        extra = np.zeros((order - self.trunc_order, self.dim, self.dim), dtype=np.complex128)
        return TaylorSeries(np.concatenate([self.coeffs, extra]), center=self.center,
                            exact=True, radius=self.radius)

    def truncated(self, order):
        """Drop coefficients above ``order``; the result is no longer exact."""
        if order > self.trunc_order:
            return self.padded(order)
        return TaylorSeries(self.coeffs[:order + 1], center=self.center, radius=self.radius)

    def shifted_by_monomial(self, k):
        """The series of ``(z - z0)**k A(z)`` (degree shift, ``k >= 0``)."""
        return LaurentSeries(self.coeffs, center=self.center, min_degree=k,
                             exact=self.exact, radius=self.radius)


@dataclass(frozen=True, eq=False)
class LaurentExpansion:
    """Coefficients ``Psi_{-d} .. Psi_J`` of ``A(z)^{-1}`` around ``center``."""

    coeffs: np.ndarray
    center: complex
    pole_order: int
    method: str = ""

    def __post_init__(self):
        c = _as_stack(self.coeffs)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", complex(self.center))

    @property
    def dim(self):
        return self.coeffs.shape[1]

    @property
    def order(self):
        """Highest retained degree ``J``."""
        return self.coeffs.shape[0] - 1 - self.pole_order

    @property
    def degrees(self):
        return range(-self.pole_order, self.order + 1)

    def psi(self, j):
        if j < -self.pole_order:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        if j > self.order:
            raise IndexError(f"degree {j} not retained (max {self.order})")
        return self.coeffs[j + self.pole_order]

    @property
    def principal(self):
        """``Psi_{-d} .. Psi_{-1}``."""
        return self.coeffs[:self.pole_order]

    @property
    def analytic(self):
        return self.coeffs[self.pole_order:]

    def as_series(self):
        return LaurentSeries(self.coeffs, center=self.center, min_degree=-self.pole_order)

    def evaluate(self, z):
        return evaluate(self.as_series(), z)

    @classmethod
    def from_series(cls, s, pole_order, order, method=""):
        c = np.stack([s.coeff(j) for j in range(-pole_order, order + 1)])
        return cls(c, center=s.center, pole_order=pole_order, method=method)


def _check_compatible(s, t):
    if s.dim != t.dim:
        raise SeriesMismatchError(f"dimension mismatch: {s.dim} vs {t.dim}")
    if s.center != t.center:
        raise SeriesMismatchError(f"center mismatch: {s.center} vs {t.center}")


def series_multiply(s, t):
    """Cauchy product of two same-center series.

    The product is exact up to ``min(S.trunc + T.min, T.trunc + S.min)``;
    exact factors place no limit on that order.
    """
    _check_compatible(s, t)
    lo = s.min_degree + t.min_degree
    limits = []
    if not s.exact:
        limits.append(s.trunc_order + t.min_degree)
    if not t.exact:
        limits.append(t.trunc_order + s.min_degree)
    exact = not limits
    hi = s.trunc_order + t.trunc_order if exact else min(limits)
    if hi < lo:
        raise BudgetError("truncation leaves no valid coefficient in the product")
    c = kernels.cauchy_product(s.coeffs, t.coeffs, hi - lo + 1)
    radius = _min_radius(s.radius, t.radius)
    if lo == 0:
        return TaylorSeries(c, center=s.center, exact=exact, radius=radius)
    return LaurentSeries(c, center=s.center, min_degree=lo, exact=exact, radius=radius)


def series_add(s, t):
    _check_compatible(s, t)
    lo = min(s.min_degree, t.min_degree)
    his = [x.trunc_order for x in (s, t) if not x.exact]
    exact = not his
    hi = max(s.trunc_order, t.trunc_order) if exact else min(his)
    c = np.stack([s.coeff(k) + t.coeff(k) for k in range(lo, hi + 1)])
    radius = _min_radius(s.radius, t.radius)
    if lo == 0:
        return TaylorSeries(c, center=s.center, exact=exact, radius=radius)
    return LaurentSeries(c, center=s.center, min_degree=lo, exact=exact, radius=radius)


def _min_radius(a, b):
    vals = [r for r in (a, b) if r is not None]
    return min(vals) if vals else None


def series_inverse_taylor(s, order, tol=None):
    """Power series of ``S(z)^{-1}`` through degree ``order``.

    Uses ``H_0 = S_0^{-1}``, ``H_j = -H_0 sum_{k=1}^j S_k H_{j-k}``.

    Raises
    ------
    SingularLeadingCoefficientError
        ``S_0`` is singular: the inverse has a pole at the center.
    BudgetError
        ``s`` is truncated below ``order``.
    """
    if s.min_degree != 0:
        raise ValueError("series_inverse_taylor expects a Taylor series")
    if not is_invertible(s.coeffs[0], tol):
        raise SingularLeadingCoefficientError(
            "leading coefficient is singular; the inverse has a pole at the center "
            "(use the quotient engine)"
        )
    if s.trunc_order < order:
        if not s.exact:
            raise BudgetError(f"need Taylor coefficients through degree {order}, have {s.trunc_order}")
    g = s.coeffs[:order + 1]
    h = kernels.taylor_inverse(g, order)
    return TaylorSeries(h, center=s.center, radius=s.radius)


def evaluate(s, z):
    """Evaluate ``sum_k c_k (z - center)**k`` over the retained degrees."""
    w = complex(z) - s.center
    if w == 0 and s.min_degree < 0:
        raise ValueError("cannot evaluate a series with a pole at its center")
    val = kernels.horner_many(s.coeffs, np.array([w]))[0]
    if s.min_degree:
        val = val * w ** s.min_degree
    return val


def evaluate_many(s, zs):
    """Vectorised :func:`evaluate` over an array of points."""
    w = np.asarray(zs, dtype=np.complex128) - s.center
    if s.min_degree < 0 and np.any(w == 0):
        raise ValueError("cannot evaluate a series with a pole at its center")
    vals = kernels.horner_many(s.coeffs, w.ravel())
    if s.min_degree:
        vals = vals * (w.ravel() ** s.min_degree)[:, None, None]
    return vals


def perturbed_identity_inverse(p, center=0.0):
    """Exact Laurent polynomial ``P + w^{-1} (I - P)`` for a projector matrix ``P``."""
    p = np.asarray(p, dtype=np.complex128)
    q = np.eye(p.shape[0]) - p
    return LaurentSeries(np.stack([q, p]), center=center, min_degree=-1, exact=True)


def perturbed_identity(p, center=0.0):
    """Exact polynomial ``P + w (I - P)``."""
    p = np.asarray(p, dtype=np.complex128)
    q = np.eye(p.shape[0]) - p
    return TaylorSeries(np.stack([p, q]), center=center, exact=True)
