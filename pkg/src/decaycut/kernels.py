"""Hot loops of the discretized oracle, with numba and pure-numpy versions.

``secular_solve`` finds all eigenvalues of the arrowhead matrix
``[[eps, v], [v, diag(d)]]`` together with the weight of the first basis
vector in each eigenvector. ``spectral_sum`` evaluates
``sum_m w_m exp(-i lam_m t)`` on a time grid. The public names dispatch to the
compiled versions unless ``DECAYCUT_DISABLE_NUMBA`` is set.
"""
import numpy as np

from ._jit import NUMBA_ENABLED, njit

_EPS = np.finfo(float).eps
MAX_ITER = 200


def _brackets(eps, d, v2):
    """Pole origins and ``mu`` brackets for the ``n + 1`` roots.

    Root ``j`` is written ``lam = origin[j] + mu`` with ``mu`` confined to
    ``(lo[j], hi[j])``. Interior roots start from the lower node; the choice of
    nearer node happens inside the solvers.
    """
    n = d.size
    norm = np.sqrt(v2.sum())
    below = min(eps, d[0]) - norm - 1.0
    above = max(eps, d[-1]) + norm + 1.0
    origin = np.empty(n + 1)
    lo = np.empty(n + 1)
    hi = np.empty(n + 1)
    origin[0] = d[0]
    lo[0], hi[0] = below - d[0], 0.0
    origin[1:n] = d[:-1]
    lo[1:n] = 0.0
    hi[1:n] = np.diff(d)
    origin[n] = d[-1]
    lo[n], hi[n] = 0.0, above - d[-1]
    return origin, lo, hi


@njit
def _secular_value(eps, d, v2, origin, mu):
    f = origin + mu - eps
    df = 1.0
    for k in range(d.size):
        gap = (origin - d[k]) + mu
        q = v2[k] / gap
        f -= q
        df += q / gap
    return f, df


@njit
def _secular_solve_jit(eps, d, v2, origin, lo, hi):
    m = origin.size
    n = d.size
    lam = np.empty(m)
    weight = np.empty(m)
    for j in range(m):
        org = origin[j]
        a = lo[j]
        b = hi[j]
        # interior roots: move the origin to the nearer pole
        if 0 < j < n:
            mid = 0.5 * (a + b)
            fm, _ = _secular_value(eps, d, v2, org, mid)
            if fm < 0:
                org = d[j]
                a = mid - hi[j]
                b = 0.0
            else:
                b = mid
        mu = 0.5 * (a + b)
        for _ in range(MAX_ITER):
            f, df = _secular_value(eps, d, v2, org, mu)
            if f > 0:
                b = mu
            elif f < 0:
                a = mu
            else:
                break
            step = mu - f / df
            if not (a < step < b):
                step = 0.5 * (a + b)
            if abs(step - mu) <= 2 * _EPS * max(abs(mu), abs(org) * _EPS):
                mu = step
                break
            mu = step
            if b - a <= 4 * _EPS * max(abs(a), abs(b)):
                break
        s = 1.0
        for k in range(n):
            gap = (org - d[k]) + mu
            s += v2[k] / (gap * gap)
        lam[j] = org + mu
        weight[j] = 1.0 / s
    return lam, weight


def _secular_solve_numpy(eps, d, v2, origin, lo, hi, chunk=256):
    m = origin.size
    n = d.size
    lam = np.empty(m)
    weight = np.empty(m)
    for start in range(0, m, chunk):
        sl = slice(start, min(m, start + chunk))
        idx = np.arange(sl.start, sl.stop)
        org = origin[sl].copy()
        a = lo[sl].copy()
        b = hi[sl].copy()
        base = org[:, None] - d[None, :]

        def value(mu):
            gap = base + mu[:, None]
            q = v2[None, :] / gap
            return org + mu - eps - q.sum(axis=1), 1.0 + (q / gap).sum(axis=1)

        interior = (idx > 0) & (idx < n)
        mid = 0.5 * (a + b)
        fm, _ = value(mid)
        flip = interior & (fm < 0)
        gaps = hi[sl]
        org[flip] = d[idx[flip]]
        a[flip] = mid[flip] - gaps[flip]
        b[flip] = 0.0
        keep = interior & ~flip
        b[keep] = mid[keep]
        base = org[:, None] - d[None, :]

        mu = 0.5 * (a + b)
        active = np.ones(mu.size, dtype=bool)
        for _ in range(MAX_ITER):
            if not active.any():
                break
            f, df = value(mu)
            pos = active & (f > 0)
            neg = active & (f < 0)
            b[pos] = mu[pos]
            a[neg] = mu[neg]
            active &= f != 0
            step = mu - f / df
            bad = ~((a < step) & (step < b))
            step[bad] = 0.5 * (a[bad] + b[bad])
            small = np.abs(step - mu) <= 2 * _EPS * np.maximum(np.abs(mu), np.abs(org) * _EPS)
            mu = np.where(active, step, mu)
            active &= ~small
            active &= (b - a) > 4 * _EPS * np.maximum(np.abs(a), np.abs(b))
        gap = base + mu[:, None]
        lam[sl] = org + mu
        weight[sl] = 1.0 / (1.0 + (v2[None, :] / gap ** 2).sum(axis=1))
    return lam, weight


@njit
def _spectral_sum_jit(lam, weight, times):
    out = np.empty(times.size, dtype=np.complex128)
    for i in range(times.size):
        t = times[i]
        re = 0.0
        im = 0.0
        for m in range(lam.size):
            ph = lam[m] * t
            re += weight[m] * np.cos(ph)
            im -= weight[m] * np.sin(ph)
        out[i] = re + 1j * im
    return out


def _spectral_sum_numpy(lam, weight, times, chunk=64):
    out = np.empty(times.size, dtype=complex)
    for start in range(0, times.size, chunk):
        t = times[start:start + chunk]
        out[start:start + chunk] = np.exp(-1j * np.outer(t, lam)) @ weight
    return out


def secular_solve(eps, d, v2, use_jit=None):
    """All ``n + 1`` arrowhead eigenvalues and first-component weights.

    ``d`` must be strictly increasing and every ``v2`` positive.
    """
    d = np.ascontiguousarray(d, dtype=float)
    v2 = np.ascontiguousarray(v2, dtype=float)
    origin, lo, hi = _brackets(float(eps), d, v2)
    jit = NUMBA_ENABLED if use_jit is None else use_jit
    if jit:
        return _secular_solve_jit(float(eps), d, v2, origin, lo, hi)
    return _secular_solve_numpy(float(eps), d, v2, origin, lo, hi)


def spectral_sum(lam, weight, times, use_jit=None):
    """``sum_m weight_m exp(-i lam_m t)`` for each ``t`` in ``times``."""
    lam = np.ascontiguousarray(lam, dtype=float)
    weight = np.ascontiguousarray(weight, dtype=float)
    times = np.ascontiguousarray(np.atleast_1d(times), dtype=float)
    jit = NUMBA_ENABLED if use_jit is None else use_jit
    if jit:
        return _spectral_sum_jit(lam, weight, times)
    return _spectral_sum_numpy(lam, weight, times)
