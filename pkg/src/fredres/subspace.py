"""Rank-revealing ranges, kernels and projectors.

All rank decisions compare singular values against ``rank_tol * sigma_max``.
Singular values within a factor 10 of that threshold are reported as
boundary cases through :func:`rank_margin_warnings`.
"""
from dataclasses import dataclass

import numpy as np

from .config import rank_tol as _resolve_tol

ORTHO_TOL = 1e-10


def _threshold(s, tol):
    return _resolve_tol(tol) * (s[0] if s.size else 0.0)


def range_basis(m, tol=None):
    """Orthonormal basis (columns) of the numerical column space of ``m``."""
    m = np.asarray(m, dtype=np.complex128)
    u, s, _ = np.linalg.svd(m)
    r = int(np.sum(s > _threshold(s, tol))) if s.size and s[0] > 0 else 0
    return u[:, :r]


def null_basis(m, tol=None):
    """Orthonormal basis of the numerical kernel of a (possibly tall) matrix."""
    m = np.asarray(m, dtype=np.complex128)
    ncols = m.shape[1]
    _, s, vh = np.linalg.svd(m)
    r = int(np.sum(s > _threshold(s, tol))) if s.size and s[0] > 0 else 0
    return vh[r:].conj().T.reshape(ncols, ncols - r)


def rank_margin_warnings(m, tol=None, label="matrix"):
    """Messages for singular values within a factor 10 of the rank threshold."""
    s = np.linalg.svd(np.asarray(m, dtype=np.complex128), compute_uv=False)
    if not s.size or s[0] == 0:
        return []
    thr = _threshold(s, tol)
    close = [x for x in s if thr / 10 <= x <= thr * 10]
    if not close:
        return []
    return [f"{label}: singular value(s) {', '.join(f'{x:.3e}' for x in close)} "
            f"within a factor 10 of the rank threshold {thr:.3e}"]


@dataclass(frozen=True, eq=False)
class Projector:
    """Idempotent matrix with an orthonormal basis of its range."""

    matrix: np.ndarray
    range_basis: np.ndarray

    @property
    def rank(self):
        return self.range_basis.shape[1]

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def complement(self):
        """``Q = I - P``."""
        return np.eye(self.dim) - self.matrix

    @property
    def is_orthogonal(self):
        return bool(np.linalg.norm(self.matrix - self.matrix.conj().T) < ORTHO_TOL)


def _check_orthonormal(basis, tol=ORTHO_TOL):
    gram = basis.conj().T @ basis
    if not np.allclose(gram, np.eye(basis.shape[1]), atol=tol, rtol=0):
        raise ValueError("basis columns are not orthonormal")


def orthogonal_projector(basis, n=None):
    """``B B*`` for an orthonormal column set ``B`` (empty set gives the zero matrix)."""
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.ndim != 2:
        if n is None:
            raise ValueError("ambient dimension needed for an empty basis")
        basis = np.zeros((n, 0), dtype=np.complex128)
    _check_orthonormal(basis)
    p = basis @ basis.conj().T
    p.setflags(write=False)
    return Projector(p, basis)


def oblique_projector(basis, kernel_basis):
    """Projector with range ``span(basis)`` and kernel ``span(kernel_basis)``.

    The two column sets together must form a basis of the ambient space.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    kernel_basis = np.asarray(kernel_basis, dtype=np.complex128)
    n = basis.shape[0]
    frame = np.hstack([basis, kernel_basis])
    if frame.shape != (n, n) or np.linalg.matrix_rank(frame) < n:
        raise ValueError("range and kernel bases do not split the space")
    sel = np.zeros((n, n), dtype=np.complex128)
    sel[:, :basis.shape[1]] = basis
    p = sel @ np.linalg.inv(frame)
    p.setflags(write=False)
    return Projector(p, range_basis(basis) if basis.shape[1] else basis)


def projector_onto_range(m, tol=None, rng=None):
    """Projector onto ``ran m``: orthogonal, or with a random kernel if ``rng`` is given."""
    m = np.asarray(m, dtype=np.complex128)
    basis = range_basis(m, tol)
    if rng is None or basis.shape[1] in (0, m.shape[0]):
        return orthogonal_projector(basis, n=m.shape[0])
    n, r = basis.shape
    while True:
        k = rng.standard_normal((n, n - r)) + 1j * rng.standard_normal((n, n - r))
        if np.linalg.matrix_rank(np.hstack([basis, k])) == n:
            return oblique_projector(basis, k)


def _as_basis(b):
    b = np.asarray(b, dtype=np.complex128)
    if b.ndim == 1:
        b = b[:, None]
    return b


def subspace_sum(*bases, tol=None):
    """Orthonormal basis of the span of the union of the given column sets."""
    bases = [_as_basis(b) for b in bases]
    dims = {b.shape[0] for b in bases}
    if len(dims) != 1:
        raise ValueError(f"ambient dimension mismatch: {sorted(dims)}")
    stacked = np.hstack(bases)
    if stacked.shape[1] == 0:
        return stacked
    return _range_of(stacked, tol)


def _range_of(m, tol):
    # range of a possibly non-square matrix
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > _threshold(s, tol))) if s.size and s[0] > 0 else 0
    return u[:, :r]


def containment_residual(a, b):
    """``||(I - B B*) A||`` for orthonormal ``B``; zero iff ``span A`` lies in ``span B``."""
    a, b = _as_basis(a), _as_basis(b)
    if a.shape[0] != b.shape[0]:
        raise ValueError("ambient dimension mismatch")
    if a.shape[1] == 0:
        return 0.0
    resid = a - b @ (b.conj().T @ a)
    return float(np.linalg.norm(resid, 2))


def is_contained(a, b, tol=1e-8):
    """Is ``span(a)`` a subspace of ``span(b)``?  Both orthonormal."""
    return containment_residual(a, b) < tol


def kernel_intersection(*matrices, tol=None):
    """Orthonormal basis of the common kernel (null space of the stacked matrix)."""
    mats = [np.asarray(m, dtype=np.complex128) for m in matrices]
    cols = {m.shape[1] for m in mats}
    if len(cols) != 1:
        raise ValueError("dimension mismatch")
    return null_basis(np.vstack(mats), tol)
