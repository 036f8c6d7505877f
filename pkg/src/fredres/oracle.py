"""Independent ground truth from discretized Cauchy integrals.

``Psi_j = (2 pi i)^{-1} oint A(z)^{-1} (z - z0)^{-j-1} dz`` is approximated
by the trapezoid rule on ``M`` equispaced points of the circle of radius
``r``: ``Psi_j ~= M^{-1} sum_m A(z_m)^{-1} r^{-j} e^{-i j theta_m}``.  For a
function whose next singularity sits at distance ``rho`` the aliasing error
is ``O((r/rho)^M)``; for a finite Laurent polynomial it is exact once
``M`` exceeds the degree span.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import AGREE_ATOL, AGREE_RTOL
from .errors import FredresError, SingularSampleError
from .series import LaurentExpansion, TaylorSeries, evaluate_many

logger = logging.getLogger(__name__)

COND_CAP = 1e13
DEFAULT_SAMPLES = 256
FALLBACK_RADIUS = 0.1


@dataclass(frozen=True)
class OracleConfig:
    r: float = FALLBACK_RADIUS
    M: int = DEFAULT_SAMPLES

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("oracle radius must be positive")
        if self.M < 4 or self.M & (self.M - 1):
            raise ValueError("sample count M must be a power of two >= 4")

    def check_degrees(self, degrees):
        top = max(abs(j) for j in degrees)
        if self.M < 4 * (top + 1):
            raise ValueError(f"M={self.M} too small for degree {top}; need >= {4 * (top + 1)}")


def _evaluator(a, center=None):
    if isinstance(a, TaylorSeries):
        return a.center, lambda zs: evaluate_many(a, zs)
    if center is None:
        raise ValueError("a callable evaluator needs an explicit center")
    return complex(center), lambda zs: np.stack([np.asarray(a(z), dtype=np.complex128) for z in zs])


def sample_inverses(a, r, M, center=None):
    """``A(z_m)^{-1}`` on the circle ``|z - z0| = r``; checks conditioning."""
    z0, ev = _evaluator(a, center)
    theta = 2 * np.pi * np.arange(M) / M
    zs = z0 + r * np.exp(1j * theta)
    vals = ev(zs)
    conds = np.linalg.cond(vals)
    worst = float(np.max(conds))
    if not np.isfinite(worst) or worst > COND_CAP:
        raise SingularSampleError(
            f"A(z) is numerically singular on the contour r={r} (cond {worst:.2e}); choose another r"
        )
    logger.debug("contour r=%g M=%d max cond %.3e", r, M, worst)
    return kernels.inverse_many(vals), worst


def contour_coefficients(a, cfg, degrees, center=None):
    """Oracle estimates of ``Psi_j`` for every ``j`` in ``degrees``.

    Returns a ``(len(degrees), n, n)`` array.  One FFT covers all degrees.
    """
    degrees = list(degrees)
    cfg.check_degrees(degrees)
    inv, _ = sample_inverses(a, cfg.r, cfg.M, center)
    spec = np.fft.fft(inv, axis=0) / cfg.M
    return np.stack([spec[j % cfg.M] * cfg.r ** (-j) for j in degrees])


def contour_coefficient(a, cfg, j, center=None):
    """Single-degree :func:`contour_coefficients`."""
    return contour_coefficients(a, cfg, [j], center)[0]


def oracle_expansion(a, cfg, pole_order, order, center=None):
    c = contour_coefficients(a, cfg, range(-pole_order, order + 1), center)
    z0 = a.center if isinstance(a, TaylorSeries) else complex(center)
    return LaurentExpansion(c, center=z0, pole_order=pole_order, method="oracle")


def winding_number(a, r, samples=512, center=None):
    """Zeros of ``det A(z)`` inside ``|z - z0| < r`` by the argument principle."""
    z0, ev = _evaluator(a, center)
    theta = 2 * np.pi * np.arange(samples + 1) / samples
    dets = np.linalg.det(ev(z0 + r * np.exp(1j * theta)))
    if np.any(dets == 0):
        return None
    phase = np.unwrap(np.angle(dets))
    return int(round((phase[-1] - phase[0]) / (2 * np.pi)))


def default_radius(a, max_radius=None, center=None):
    """A quarter of the distance to the nearest other zero of ``det A(z)``.

    Scans expanding circles ``0.001 * 2**k`` and watches the winding number
    of ``det A``; the first increase brackets the next zero.  The scan stops
    at ``max_radius``, else the validity radius, else 10 for an exact
    polynomial.  If the scan proves there is no other zero inside the limit,
    the distance exceeds the last scanned circle and a quarter of that is
    used.  Without any usable limit the distance is unknown and the fallback
    ``r = 0.1`` comes with a warning.  Returns ``(r, warning_or_None)``.
    """
    limit = max_radius
    if limit is None and isinstance(a, TaylorSeries):
        if a.radius is not None:
            limit = a.radius
        elif a.exact:
            limit = 10.0
    if limit is None:
        return FALLBACK_RADIUS, f"distance to the next zero of det A is unknown; using r={FALLBACK_RADIUS}"
    radii = 1e-3 * 2.0 ** np.arange(0, 40)
    radii = radii[radii <= limit]
    base = None
    prev = None
    for r in radii:
        try:
            w = winding_number(a, r, center=center)
        except np.linalg.LinAlgError:
            w = None
        if w is None:
            # a zero on the circle itself
            return r / 4, None
        if base is None:
            base = w
        elif w > base:
            return prev / 4 if prev else r / 8, None
        prev = r
    if prev is None:
        return FALLBACK_RADIUS, f"scan limit {limit:g} is below the first circle; using r={FALLBACK_RADIUS}"
    return prev / 4, None


@dataclass
class PoleOrderEstimate:
    order: int
    slope: float
    contour_order: int
    agree: bool
    radii: list = field(default_factory=list)

    def __int__(self):
        return self.order


def estimate_pole_order(a, radii=None, center=None, max_order=8, tol=1e-8, details=False):
    """Pole order from the growth rate of ``max_theta ||A(z0 + r e^{i theta})^{-1}||``.

    The least-squares slope of ``log ||A^{-1}||`` against ``log r`` is rounded
    to a nonnegative integer and cross-checked against the largest ``j`` with
    a contour coefficient ``||Psi_{-j}|| > tol``.
    """
    if radii is None:
        r_contour, _ = default_radius(a, center=center)
        radii = r_contour * np.array([1e-3, 10 ** -2.5, 1e-2, 10 ** -1.5])
    else:
        r_contour = float(np.max(radii))
    radii = np.asarray(radii, dtype=float)
    if radii.size < 3:
        raise ValueError("need at least three radii")
    norms = []
    for r in radii:
        inv, _ = sample_inverses(a, r, 64, center)
        norms.append(max(np.linalg.norm(m, 2) for m in inv))
    slope = float(np.polyfit(np.log(radii), np.log(norms), 1)[0])
    order = max(0, int(round(-slope)))

    try:
        cfg = OracleConfig(r=r_contour, M=max(64, 1 << int(np.ceil(np.log2(4 * (max_order + 1))))))
        coeffs = contour_coefficients(a, cfg, range(-max_order, 0), center)
        scale = max(1.0, max(float(np.linalg.norm(c)) for c in coeffs))
        big = [max_order - i for i, c in enumerate(coeffs) if np.linalg.norm(c) > tol * scale]
        contour_order = max(big) if big else 0
    except FredresError:
        contour_order = -1
    agree = contour_order == order
    if not agree:
        logger.warning("pole order: slope estimate %d vs contour estimate %d", order, contour_order)
    est = PoleOrderEstimate(order, slope, contour_order, agree, list(radii))
    return est if details else order


def frobenius_distance(x, y):
    return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))


def within(dist, ref_norm, atol=AGREE_ATOL, rtol=AGREE_RTOL):
    return bool(dist <= atol + rtol * ref_norm)


@dataclass
class CrossValidationReport:
    """Per-degree Frobenius distances between the engines and the oracle."""

    degrees: list
    pole_orders: dict
    distances: dict
    passes: dict
    divergent_degrees: dict
    expansions: dict = field(default_factory=dict)
    closed_form_status: str = None
    closed_form_checks: dict = field(default_factory=dict)
    oracle_excess: list = field(default_factory=list)
    oracle_config: OracleConfig = None
    errors: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def pair_passes(self, a, b):
        return self.passes.get(_pair(a, b), False)


def _pair(a, b):
    return "|".join(sorted((a, b)))


def _lowest_nonzero(exp, tol):
    for j in exp.degrees:
        if np.linalg.norm(exp.psi(j)) > tol:
            return -j if j < 0 else 0
    return 0


def cross_validate(series, order, cfg=None, tol=None, max_pole_order=8,
                   engines=("sequential", "closed-form"), rng=None):
    """Run the requested engines and the contour oracle on one problem.

    Engine failures are captured in ``errors`` (labelled by engine) instead
    of propagating, except for the sequential factorization, which every
    other route depends on.
    """
    from .closed_form import closed_form_inverse
    from .quotient import factorize, laurent_inverse_sequential

    warns = []
    chain = factorize(series, max_pole_order=max_pole_order, tol=tol, rng=rng)
    warns.extend(chain.warnings)
    d = chain.d
    if cfg is None:
        r, w = default_radius(series)
        if w:
            warns.append(w)
        cfg = OracleConfig(r=r, M=DEFAULT_SAMPLES)
    degrees = list(range(-d, order + 1))
    expansions = {}
    errors = {}
    cf_status, cf_checks = None, {}
    if "sequential" in engines:
        expansions["sequential"] = laurent_inverse_sequential(chain, order)
    if "closed-form" in engines:
        try:
            cf = closed_form_inverse(chain, order, tol)
            expansions["closed-form"] = cf.psi
            cf_status, cf_checks = cf.status, cf.checks
        except FredresError as exc:
            errors["closed-form"] = f"{type(exc).__name__}: {exc}"
            cf_status = "failed"
    excess = list(range(-d - 2, -d))
    oracle_c = contour_coefficients(series, cfg, excess + degrees)
    expansions["oracle"] = LaurentExpansion(oracle_c[len(excess):], center=series.center,
                                            pole_order=d, method="oracle")
    est = estimate_pole_order(series, max_order=max_pole_order, details=True)
    if not est.agree:
        warns.append(f"pole-order sub-estimates disagree: slope {est.order}, contour {est.contour_order}")
    pole_orders = {"sequential": d, "oracle": est.order}
    if "closed-form" in expansions:
        pole_orders["closed-form"] = _lowest_nonzero(expansions["closed-form"], AGREE_ATOL)

    distances, passes, divergent = {}, {}, {}
    names = list(expansions)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            key = _pair(a, b)
            ea, eb = expansions[a], expansions[b]
            dist = [frobenius_distance(ea.psi(j), eb.psi(j)) for j in degrees]
            ok = [within(x, np.linalg.norm(eb.psi(j))) for x, j in zip(dist, degrees)]
            distances[key] = dist
            passes[key] = all(ok)
            divergent[key] = [j for j, flag in zip(degrees, ok) if not flag]
    return CrossValidationReport(
        degrees=degrees,
        pole_orders=pole_orders,
        distances=distances,
        passes=passes,
        divergent_degrees=divergent,
        expansions=expansions,
        closed_form_status=cf_status,
        closed_form_checks=cf_checks,
        oracle_excess=[float(np.linalg.norm(c)) for c in oracle_c[:len(excess)]],
        oracle_config=cfg,
        errors=errors,
        warnings=warns,
    )
