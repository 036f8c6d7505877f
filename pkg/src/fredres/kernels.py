"""Hot inner loops, each in a numba and a pure-numpy flavour.

All arrays are complex128.  Matrix sequences are stacked along axis 0, so a
series with ``K`` coefficients of size ``n`` is a ``(K, n, n)`` array.

The flavour used by the rest of the package is picked by
:data:`fredres._accel.USE_NUMBA`; both are exposed in :data:`IMPLEMENTATIONS`
so tests and the benchmark can run them side by side.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


# --------------------------------------------------------------------------
# numba flavour (explicit loops)
# --------------------------------------------------------------------------

@njit
def _cauchy_product_nb(a, b, length):
    n = a.shape[1]
    out = np.zeros((length, n, n), dtype=np.complex128)
    ka = a.shape[0]
    kb = b.shape[0]
    for k in range(length):
        lo = max(0, k - kb + 1)
        hi = min(k, ka - 1)
        for i in range(lo, hi + 1):
            for r in range(n):
                for c in range(n):
                    acc = 0j
                    for m in range(n):
                        acc += a[i, r, m] * b[k - i, m, c]
                    out[k, r, c] += acc
    return out


@njit
def _taylor_inverse_nb(g, order):
    n = g.shape[1]
    out = np.zeros((order + 1, n, n), dtype=np.complex128)
    h0 = np.linalg.inv(g[0])
    out[0] = h0
    kg = g.shape[0]
    for j in range(1, order + 1):
        acc = np.zeros((n, n), dtype=np.complex128)
        for k in range(1, min(j, kg - 1) + 1):
            acc += np.dot(g[k], out[j - k])
        out[j] = -np.dot(h0, acc)
    return out


@njit
def _horner_many_nb(coeffs, w):
    m = w.shape[0]
    k = coeffs.shape[0]
    n = coeffs.shape[1]
    out = np.empty((m, n, n), dtype=np.complex128)
    for s in range(m):
        acc = coeffs[k - 1].copy()
        for i in range(k - 2, -1, -1):
            acc = acc * w[s] + coeffs[i]
        out[s] = acc
    return out


@njit
def _inverse_many_nb(mats):
    out = np.empty_like(mats)
    for s in range(mats.shape[0]):
        out[s] = np.linalg.inv(mats[s])
    return out


@njit
def _ar_recursion_nb(coeffs, shocks):
    t_len = shocks.shape[0]
    n = shocks.shape[1]
    p = coeffs.shape[0] - 1
    a0_inv = np.linalg.inv(coeffs[0])
    x = np.zeros((t_len, n), dtype=np.complex128)
    rhs = np.empty(n, dtype=np.complex128)
    for t in range(t_len):
        for a in range(n):
            rhs[a] = shocks[t, a]
        for j in range(1, min(p, t) + 1):
            for a in range(n):
                acc = 0j
                for b in range(n):
                    acc += coeffs[j, a, b] * x[t - j, b]
                rhs[a] -= acc
        for a in range(n):
            acc = 0j
            for b in range(n):
                acc += a0_inv[a, b] * rhs[b]
            x[t, a] = acc
    return x


@njit
def _fir_filter_nb(taps, shocks):
    t_len = shocks.shape[0]
    n_out = taps.shape[1]
    n_in = taps.shape[2]
    n_taps = taps.shape[0]
    y = np.zeros((t_len, n_out), dtype=np.complex128)
    for t in range(t_len):
        for k in range(min(n_taps - 1, t) + 1):
            for a in range(n_out):
                acc = 0j
                for b in range(n_in):
                    acc += taps[k, a, b] * shocks[t - k, b]
                y[t, a] += acc
    return y


# --------------------------------------------------------------------------
# numpy flavour (vectorised where the recursion allows)
# --------------------------------------------------------------------------

def _cauchy_product_np(a, b, length):
    n = a.shape[1]
    out = np.zeros((length, n, n), dtype=np.complex128)
    kb = b.shape[0]
    for i in range(min(a.shape[0], length)):
        stop = min(kb, length - i)
        out[i:i + stop] += np.matmul(a[i], b[:stop])
    return out


def _taylor_inverse_np(g, order):
    n = g.shape[1]
    out = np.zeros((order + 1, n, n), dtype=np.complex128)
    h0 = np.linalg.inv(g[0])
    out[0] = h0
    kg = g.shape[0]
    for j in range(1, order + 1):
        top = min(j, kg - 1)
        if top < 1:
            continue
        # sum_k G_k H_{j-k}, k = 1..top
        acc = np.einsum("kab,kbc->ac", g[1:top + 1], out[j - top:j][::-1])
        out[j] = -h0 @ acc
    return out


def _horner_many_np(coeffs, w):
    acc = np.broadcast_to(coeffs[-1], (w.shape[0],) + coeffs.shape[1:]).copy()
    for c in coeffs[-2::-1]:
        acc = acc * w[:, None, None] + c
    return acc


def _inverse_many_np(mats):
    return np.linalg.inv(mats)


def _ar_recursion_np(coeffs, shocks):
    t_len, n = shocks.shape
    p = coeffs.shape[0] - 1
    a0_inv = np.linalg.inv(coeffs[0])
    lags = coeffs[1:]
    x = np.zeros((t_len, n), dtype=np.complex128)
    for t in range(t_len):
        m = min(p, t)
        rhs = shocks[t]
        if m:
            # x[t-1], ..., x[t-m] against A_1..A_m
            rhs = rhs - np.einsum("jab,jb->a", lags[:m], x[t - 1::-1][:m])
        x[t] = a0_inv @ rhs
    return x


def _fir_filter_np(taps, shocks):
    t_len = shocks.shape[0]
    y = np.zeros((t_len, taps.shape[1]), dtype=np.complex128)
    for k in range(min(taps.shape[0], t_len)):
        y[k:] += shocks[:t_len - k] @ taps[k].T
    return y


IMPLEMENTATIONS = {
    "numba": {
        "cauchy_product": _cauchy_product_nb,
        "taylor_inverse": _taylor_inverse_nb,
        "horner_many": _horner_many_nb,
        "inverse_many": _inverse_many_nb,
        "ar_recursion": _ar_recursion_nb,
        "fir_filter": _fir_filter_nb,
    },
    "numpy": {
        "cauchy_product": _cauchy_product_np,
        "taylor_inverse": _taylor_inverse_np,
        "horner_many": _horner_many_np,
        "inverse_many": _inverse_many_np,
        "ar_recursion": _ar_recursion_np,
        "fir_filter": _fir_filter_np,
    },
}

BACKEND = "numba" if USE_NUMBA else "numpy"
_active = IMPLEMENTATIONS[BACKEND]


def _c(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


def cauchy_product(a, b, length):
    """First ``length`` coefficients of the product of two matrix sequences."""
    if length <= 0:
        return np.zeros((0,) + a.shape[1:], dtype=np.complex128)
    return _active["cauchy_product"](_c(a), _c(b), int(length))


def taylor_inverse(g, order):
    """Coefficients ``H_0..H_order`` of the inverse of a matrix power series."""
    return _active["taylor_inverse"](_c(g), int(order))


def horner_many(coeffs, w):
    """Evaluate ``sum_k coeffs[k] w**k`` at every point of ``w``."""
    return _active["horner_many"](_c(coeffs), np.ascontiguousarray(w, dtype=np.complex128))


def inverse_many(mats):
    return _active["inverse_many"](_c(mats))


def ar_recursion(coeffs, shocks):
    """Solve ``sum_j A_j x_{t-j} = e_t`` forward in time from a zero history."""
    return _active["ar_recursion"](_c(coeffs), _c(shocks))


def fir_filter(taps, shocks):
    """``y_t = sum_k taps[k] e_{t-k}`` with zero pre-sample shocks."""
    return _active["fir_filter"](_c(taps), _c(shocks))
