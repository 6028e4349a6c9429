"""Quadrature, root finding and power-law fitting kernels.

All integrands are vectorized callables: they receive a 1-D array of
abscissae and return an array whose leading axis matches it. A trailing axis
is allowed, in which case the integral is vector valued and the adaptive mesh
is refined until every component meets the tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .errors import DegenerateInput, NoConvergence, NoSignChange

ENDPOINT_MAPS = ("none", "sqrt", "tanh")

# Kronrod 15-point nodes (non-negative half) with the embedded 7-point Gauss rule.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

KRONROD_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss weights placed on the Kronrod grid (zero on the Kronrod-only nodes).
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG, _WG[-2::-1]])


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for :func:`integrate`.

    ``oscillation_scale`` is the largest angular frequency ``t`` of an
    ``exp(-i x t)`` factor in the integrand; the initial mesh then has panels
    no wider than ``pi / (2 t)`` in the original variable. ``endpoint``
    selects a change of variables that tames endpoint singularities:
    ``"sqrt"`` maps ``x = c - h cos(theta)`` (square-root edges) and
    ``"tanh"`` maps ``x = c + h tanh(s)`` (logarithmic or algebraic edges).
    """

    abs_tol: float = 1e-10
    max_panels: int = 20000
    oscillation_scale: Optional[float] = None
    endpoint: str = "none"

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_panels < 4:
            raise ValueError("max_panels must be at least 4")
        if self.oscillation_scale is not None and self.oscillation_scale < 0:
            raise ValueError("oscillation_scale must be non-negative")
        if self.endpoint not in ENDPOINT_MAPS:
            raise ValueError(f"endpoint must be one of {ENDPOINT_MAPS}")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float


def gk15_panels(f, lo, hi):
    """Apply the 7/15 Gauss-Kronrod pair on every panel ``[lo[i], hi[i]]``.

    Returns the Kronrod estimates (shape ``(P,)`` or ``(P, m)``) and the
    per-panel error bound ``max |K - G|`` over output components.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * KRONROD_NODES[None, :]
    vals = np.asarray(f(x.ravel()))
    vals = vals.reshape(x.shape + vals.shape[1:])
    if vals.ndim == 2:
        kron = vals @ KRONROD_WEIGHTS
        gauss = vals @ GAUSS_WEIGHTS
        kron = kron * half
        err = np.abs(kron - gauss * half)
    else:
        kron = np.einsum("pn...,n->p...", vals, KRONROD_WEIGHTS)
        gauss = np.einsum("pn...,n->p...", vals, GAUSS_WEIGHTS)
        scale = half.reshape((-1,) + (1,) * (vals.ndim - 2))
        kron = kron * scale
        err = np.abs(kron - gauss * scale).reshape(len(lo), -1).max(axis=1)
    return kron, err


def _mapped(f, a, b, endpoint):
    """Integrand and limits after the endpoint change of variables."""
    if endpoint == "none":
        return f, a, b, lambda x: np.asarray(x, dtype=float)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    if endpoint == "sqrt":
        def g(theta):
            x = c - h * np.cos(theta)
            jac = h * np.sin(theta)
            return _times(f(x), jac)

        def to_u(x):
            return np.arccos(np.clip((c - np.asarray(x, dtype=float)) / h, -1.0, 1.0))

        return g, 0.0, math.pi, to_u
    # tanh: keep the outermost abscissa a few ulps inside [a, b]
    scale = max(abs(a), abs(b), h)
    gap = 8.0 * np.finfo(float).eps * scale / h
    s_max = min(20.0, math.atanh(1.0 - gap)) if gap < 1 else 1.0

    def g(s):
        x = c + h * np.tanh(s)
        jac = h / np.cosh(s) ** 2
        return _times(f(x), jac)

    def to_u(x):
        y = np.clip((np.asarray(x, dtype=float) - c) / h, -1.0, 1.0)
        with np.errstate(divide="ignore"):
            return np.clip(np.arctanh(y), -s_max, s_max)

    return g, -s_max, s_max, to_u


def _times(vals, jac):
    vals = np.asarray(vals)
    return vals * jac.reshape(jac.shape + (1,) * (vals.ndim - 1))


def initial_mesh(a: float, b: float, oscillation_scale: Optional[float], minimum: int = 4):
    """Uniform breakpoints on ``[a, b]``, dense enough for the oscillation cap."""
    n = minimum
    if oscillation_scale:
        n = max(n, int(math.ceil((b - a) * oscillation_scale / (0.5 * math.pi))))
    return np.linspace(a, b, n + 1)


def adaptive_sum(g, breakpoints, abs_tol: float, max_panels: int):
    """Globally adaptive GK15 over the panels defined by ``breakpoints``."""
    lo = np.asarray(breakpoints[:-1], dtype=float)
    hi = np.asarray(breakpoints[1:], dtype=float)
    vals, errs = gk15_panels(g, lo, hi)
    tiny = 64 * np.finfo(float).eps
    while True:
        total = errs.sum()
        if total <= abs_tol:
            return vals.sum(axis=0), total
        width = hi - lo
        splittable = width > tiny * np.maximum(np.abs(lo), np.abs(hi)).clip(min=1e-300)
        order = np.argsort(-np.where(splittable, errs, -1.0))
        order = order[splittable[order]]
        if order.size == 0:
            raise NoConvergence(f"error estimate {total:.3e} cannot be reduced below {abs_tol:.3e}")
        remaining = total - np.cumsum(errs[order])
        k = int(np.searchsorted(-remaining, -0.5 * abs_tol)) + 1
        room = max_panels - lo.size
        if room <= 0:
            raise NoConvergence(
                f"error estimate {total:.3e} exceeds {abs_tol:.3e} at {lo.size} panels"
            )
        pick = order[: min(k, room, order.size)]
        mids = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mids])
        new_hi = np.concatenate([mids, hi[pick]])
        new_vals, new_errs = gk15_panels(g, new_lo, new_hi)
        keep = np.ones(lo.size, dtype=bool)
        keep[pick] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])


def integrate(f: Callable, a: float, b: float, spec: Optional[QuadratureSpec] = None,
              breakpoints: Optional[Sequence[float]] = None):
    """Integrate a vectorized ``f`` over ``[a, b]`` to ``spec.abs_tol``.

    The result is a scalar (or 1-D array for vector-valued ``f``); complex
    integrands give complex results. ``breakpoints`` are extra interior points
    in the original variable, e.g. known peaks.
    """
    spec = spec or QuadratureSpec()
    if not a < b:
        raise ValueError("integration requires a < b")
    g, ua, ub, to_u = _mapped(f, a, b, spec.endpoint)
    xs = initial_mesh(a, b, spec.oscillation_scale)
    if breakpoints is not None:
        extra = np.asarray([p for p in breakpoints if a < p < b], dtype=float)
        xs = np.concatenate([xs, extra])
    us = np.unique(np.clip(to_u(xs), ua, ub))
    us[0], us[-1] = ua, ub
    value, _ = adaptive_sum(g, us, spec.abs_tol, spec.max_panels)
    if np.ndim(value) == 0:
        return value.item()
    return value


def principal_value(f: Callable, singularity: float, a: float, b: float,
                    spec: Optional[QuadratureSpec] = None) -> float:
    """Cauchy principal value of ``int_a^b f(E) / (w - E) dE`` at ``w = singularity``.

    Uses the subtraction ``int (f(E) - f(w)) / (w - E) dE + f(w) ln((w - a)/(b - w))``;
    both halves are integrated with tanh clustering so that algebraic edge
    behaviour of ``f`` and the removable point at ``w`` are resolved.
    """
    spec = spec or QuadratureSpec()
    w = float(singularity)
    if not a < w < b:
        raise ValueError("singularity must lie strictly inside (a, b)")
    fw = float(np.asarray(f(np.array([w])))[0])

    def subtracted(e):
        e = np.asarray(e, dtype=float)
        d = w - e
        out = np.zeros_like(e)
        ok = d != 0
        out[ok] = (np.asarray(f(e[ok]), dtype=float) - fw) / d[ok]
        return out

    half = replace(spec, abs_tol=0.5 * spec.abs_tol, endpoint="tanh")
    left = integrate(subtracted, a, w, half)
    right = integrate(subtracted, w, b, half)
    return left + right + fw * math.log((w - a) / (b - w))


def find_root_bracketed(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-13) -> float:
    """Root of a scalar ``f`` with a sign change on ``[lo, hi]``.

    Brent's method shrinks the bracket below ``tol``; a finite-difference
    Newton step then polishes the residual when it helps.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise NoSignChange(f"f({lo!r})={flo!r} and f({hi!r})={fhi!r} do not bracket a root")
    x = optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    fx = f(x)
    step = 1e-7 * max(1.0, abs(x))
    for _ in range(3):
        if fx == 0:
            break
        deriv = (f(x + step) - f(x - step)) / (2 * step)
        if deriv == 0 or not np.isfinite(deriv):
            break
        xn = x - fx / deriv
        if not min(lo, hi) <= xn <= max(lo, hi):
            break
        fn = f(xn)
        if abs(fn) >= abs(fx):
            break
        x, fx = xn, fn
    return x


def find_root_complex(f: Callable[[complex], complex], seed: complex, tol: float = 1e-12,
                      max_iter: int = 100) -> complex:
    """Newton iteration for an analytic ``f`` with a central-difference derivative.

    Steps that increase ``|f|`` are halved (up to 30 times) before being taken.
    """
    z = complex(seed)
    fz = f(z)
    for _ in range(max_iter):
        if abs(fz) < tol:
            return z
        h = 1e-6 * max(1.0, abs(z))
        deriv = (f(z + h) - f(z - h)) / (2 * h)
        if deriv == 0 or not np.isfinite(deriv):
            raise NoConvergence(f"vanishing derivative at {z}")
        step = fz / deriv
        for _ in range(30):
            zn = z - step
            fn = f(zn)
            if np.isfinite(fn) and abs(fn) < abs(fz):
                break
            step *= 0.5
        else:
            raise NoConvergence(f"Newton stalled at {z} with |f|={abs(fz):.3e}")
        z, fz = zn, fn
    if abs(fz) < tol:
        return z
    raise NoConvergence(f"Newton did not converge from {seed}: |f|={abs(fz):.3e} after {max_iter} steps")


def fit_power_law(ts, ys) -> FitResult:
    """Least-squares line through ``(ln t, ln y)``."""
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if ts.size < 3 or ts.shape != ys.shape:
        raise DegenerateInput("need at least three (t, y) pairs")
    if np.any(ts <= 0) or np.any(ys <= 0) or not np.all(np.isfinite(ys)):
        raise DegenerateInput("power-law fit requires positive, finite t and y")
    lt, ly = np.log(ts), np.log(ys)
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = ly - (slope * lt + intercept)
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2))))
