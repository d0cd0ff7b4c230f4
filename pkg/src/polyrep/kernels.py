"""Hot numeric kernels.

Every kernel exists twice: a numba-compiled loop (``*_nb``) and a
vectorised numpy version (``*_np``).  The public names resolve to one of
them at import time according to :data:`polyrep._jit.USE_NUMBA`.

All kernels take the matrix ``Q`` of facet-form values, one row per point
and one column per facet, so the same code serves raw and normalised forms.

Vertex data is passed as a padded incidence table ``inc`` of shape
``(n, deg_max)`` together with the per-vertex degree ``deg``.

The interpolating polynomial is evaluated through the per-vertex term

    T_v(x) = (mean_{F ~ v} (1 - q_F(x))^{2k})^{2k}

which is computed as ``exp(2k * (2k*log M + log(mean r^{2k})))`` with
``M = max |1 - q_F|`` and ``r = |1 - q_F| / M``.  This keeps every power
in [0, 1] so only the final exponential can overflow.
"""
import math

import numpy as np

from ._jit import USE_NUMBA, njit

__all__ = [
    "USE_NUMBA",
    "esf_rows",
    "vertex_terms",
    "fk_rows",
    "fk_grad_rows",
]


# elementary symmetric values ------------------------------------------------

def esf_rows_np(Q, top):
    Q = np.asarray(Q)
    N, m = Q.shape
    out = np.zeros((N, top + 1), dtype=Q.dtype)
    out[:, 0] = 1
    for j in range(m):
        y = Q[:, j]
        for l in range(min(j + 1, top), 0, -1):
            out[:, l] += y * out[:, l - 1]
    return out


@njit
def esf_rows_nb(Q, top):
    N, m = Q.shape
    out = np.zeros((N, top + 1), dtype=Q.dtype)
    for i in range(N):
        out[i, 0] = 1
        for j in range(m):
            y = Q[i, j]
            for l in range(min(j + 1, top), 0, -1):
                out[i, l] += y * out[i, l - 1]
    return out


# per-vertex terms ------------------------------------------------------------

def _log_terms_np(Q, inc, deg, two_k):
    """Return (log T, r, M) stacks; ``r`` is signed, shape (N, n, deg_max)."""
    N = Q.shape[0]
    n, dmax = inc.shape
    mask = np.arange(dmax)[None, :] < deg[:, None]
    idx = np.where(mask, inc, 0)
    base = 1.0 - Q[:, idx]                      # (N, n, dmax)
    base = np.where(mask[None], base, 0.0)
    a = np.abs(base)
    M = a.max(axis=2)                           # (N, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(M[..., None] > 0, base / M[..., None], 0.0)
        s = (np.abs(r) ** two_k).sum(axis=2)
        logT = two_k * (two_k * np.log(M) + np.log(s / deg[None, :]))
    logT = np.where(M > 0, logT, -np.inf)
    return logT, r, M


def vertex_terms_np(Q, inc, deg, two_k):
    logT, _, _ = _log_terms_np(np.asarray(Q, dtype=np.float64), inc, deg, two_k)
    with np.errstate(over="ignore"):
        return np.exp(logT)


def fk_rows_np(Q, inc, deg, y, two_k):
    T = vertex_terms_np(Q, inc, deg, two_k)
    with np.errstate(over="ignore", invalid="ignore"):
        return (T * y[None, :]).sum(axis=1)


def fk_grad_rows_np(Q, inc, deg, y, two_k, G):
    """Gradient of f_k divided by 4k^2."""
    Q = np.asarray(Q, dtype=np.float64)
    logT, r, M = _log_terms_np(Q, inc, deg, two_k)
    n, dmax = inc.shape
    mask = np.arange(dmax)[None, :] < deg[:, None]
    idx = np.where(mask, inc, 0)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        T = np.exp(logT)
        rodd = np.sign(r) * np.abs(r) ** (two_k - 1.0)
        reven = np.abs(r) ** two_k
        num = np.einsum("pvj,vjd->pvd", rodd, np.where(mask[..., None], G[idx], 0.0))
        den = reven.sum(axis=2)
        coef = np.where(M > 0, y[None, :] * T / (M * den), 0.0)
    return np.einsum("pv,pvd->pd", coef, num)


@njit
def _ipow(x, e):
    """``x ** e`` for ``x >= 0`` and an integral float ``e``, by repeated squaring."""
    if e >= 9.0e18:
        return x ** e
    n = np.int64(e)
    acc = 1.0
    while n > 0:
        if n & 1:
            acc *= x
        x *= x
        n >>= 1
    return acc


@njit
def _term_nb(Q, i, inc, deg, v, two_k):
    """``(T_v, M, s)`` at row ``i`` with ``s = sum r^{2k}``."""
    M = 0.0
    for j in range(deg[v]):
        a = abs(1.0 - Q[i, inc[v, j]])
        if a > M:
            M = a
    if M == 0.0:
        return 0.0, 0.0, 0.0
    s = 0.0
    for j in range(deg[v]):
        # a / M (not a * (1/M)) keeps the largest ratio exactly 1, so s >= 1
        s += _ipow(abs(1.0 - Q[i, inc[v, j]]) / M, two_k)
    lt = two_k * (two_k * math.log(M) + math.log(s / deg[v]))
    return (math.exp(lt) if lt < 709.0 else np.inf), M, s


@njit
def vertex_terms_nb(Q, inc, deg, two_k):
    N = Q.shape[0]
    n = inc.shape[0]
    out = np.empty((N, n))
    for i in range(N):
        for v in range(n):
            out[i, v] = _term_nb(Q, i, inc, deg, v, two_k)[0]
    return out


@njit
def fk_rows_nb(Q, inc, deg, y, two_k):
    N = Q.shape[0]
    n = inc.shape[0]
    out = np.zeros(N)
    for i in range(N):
        acc = 0.0
        for v in range(n):
            acc += y[v] * _term_nb(Q, i, inc, deg, v, two_k)[0]
        out[i] = acc
    return out


@njit
def fk_grad_rows_nb(Q, inc, deg, y, two_k, G):
    N = Q.shape[0]
    n = inc.shape[0]
    d = G.shape[1]
    out = np.zeros((N, d))
    for i in range(N):
        for v in range(n):
            T, M, s = _term_nb(Q, i, inc, deg, v, two_k)
            if M == 0.0:
                continue
            c = y[v] * T / (M * s)
            for j in range(deg[v]):
                F = inc[v, j]
                b = (1.0 - Q[i, F]) / M
                w = _ipow(abs(b), two_k - 1.0)
                if b < 0:
                    w = -w
                for t in range(d):
                    out[i, t] += c * w * G[F, t]
    return out


if USE_NUMBA:
    esf_rows = esf_rows_nb
    vertex_terms = vertex_terms_nb
    fk_rows = fk_rows_nb
    fk_grad_rows = fk_grad_rows_nb
else:
    esf_rows = esf_rows_np
    vertex_terms = vertex_terms_np
    fk_rows = fk_rows_np
    fk_grad_rows = fk_grad_rows_np
