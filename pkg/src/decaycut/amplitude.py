"""Survival amplitude of the level: cut integral plus pole residues.

Two routes are provided. ``survival_amplitude`` integrates the spectral
density along the band on the real axis. ``second_sheet_amplitude`` deforms
the contour into the lower half-plane of the continued sheet, leaving the
resonance poles plus two vertical cuts hanging from the band edges whose
integrands decay like ``exp(-y t)``; that route is cheap at large ``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .band_models import (
    TANH_SPAN,
    BandModel,
    ModelKind,
    SystemParams,
    delta,
    delta_integral,
    delta_parts,
    second_sheet_sigma_unit,
    sigma_prime,
    sigma_prime_tanh,
    tanh_parts,
)
from .errors import DecoupledLevel, DegenerateInput, UnsupportedModel
from .numerics import FitResult, QuadratureSpec, adaptive_sum, fit_power_law, integrate
from .poles import find_real_poles, find_resonance_poles

CHUNK = 32
# lower end of the vertical-cut integrals (energy units); the omitted piece is
# bounded by Y_MIN * max|G| which is far below any tolerance in use
Y_MIN = 1e-30


@dataclass(frozen=True)
class SurvivalSeries:
    """Amplitude ``g``, probability ``p = |g|**2`` and the golden-rule curve on a grid."""

    times: np.ndarray
    g: np.ndarray
    p: np.ndarray
    p_fgr: np.ndarray
    tau: float = math.nan

    def times_in_tau(self):
        return self.times / self.tau


@dataclass(frozen=True)
class SpectralDensity:
    """Continuous part ``A(w)`` on the band plus delta weights ``(E_j, w_j)``."""

    continuum: Callable
    discrete: tuple
    continuum_weight: float

    @property
    def total_weight(self):
        return self.continuum_weight + sum(w for _, w in self.discrete)


@dataclass(frozen=True)
class ShortTimeFit:
    coefficient: float
    relative_residual: float
    expected: float


@dataclass(frozen=True)
class ContourParts:
    """Pieces of the deformed contour; they sum to ``g(t)``."""

    times: np.ndarray
    resonance: np.ndarray
    bound: np.ndarray
    bottom_cut: np.ndarray
    top_cut: np.ndarray

    @property
    def total(self):
        return self.resonance + self.bound + self.bottom_cut + self.top_cut


def _as_times(t):
    arr = np.asarray(t, dtype=float)
    return arr, np.atleast_1d(arr).ravel()


def _shaped(values, like):
    return values[0] if like.ndim == 0 else values.reshape(like.shape)


# --------------------------------------------------------------------------
# real-axis route

def _sigma_prime_in_s(model, tol):
    """``Sigma'`` as a function of the tanh variable ``s`` (``x = tanh s``)."""
    d0 = model.delta0
    if model.kind is ModelKind.CONSTANT:
        return lambda s, x: 2.0 * d0 * s
    if model.kind is ModelKind.CHAIN:
        return lambda s, x: d0 * x
    cache = {}

    def power(s, x):
        out = np.empty(s.shape)
        for i, si in enumerate(s.ravel()):
            v = cache.get(si)
            if v is None:
                v = cache[si] = sigma_prime_tanh(model, si, tol)
            out.flat[i] = v
        return out

    return power


def _continuum_in_s(model, params):
    """``A(E) dE/ds`` on the tanh variable, plus the energy of each node."""
    h = model.half_width
    c = model.center
    sig = _sigma_prime_in_s(model, 1e-2 * params.quad_tol)
    eps = params.epsilon

    def weight(s):
        x, opx, omx, jac = tanh_parts(s)
        dlt = delta_parts(model, opx, omx)
        e = c + h * x
        a = dlt / ((e - eps - sig(s, x)) ** 2 + (math.pi * dlt) ** 2)
        return a * h * jac, e

    return weight


def _s_breakpoints(model, params, t_max):
    span = TANH_SPAN
    h = model.half_width
    n = 8
    if t_max > 0:
        n = max(n, int(math.ceil(2.0 * h * t_max / (0.5 * math.pi))))
    x = np.linspace(-1.0, 1.0, n + 1)[1:-1]
    pts = [np.arctanh(x), [-span, span]]
    if model.e_bottom < params.epsilon < model.e_top:
        peak = model.to_unit(params.epsilon + sigma_prime(model, params.epsilon, params.quad_tol))
        if -1 < peak < 1:
            pts.append([math.atanh(peak)])
    s = np.unique(np.concatenate(pts))
    return s[(s >= -span) & (s <= span)]


def _cut_chunk(model, params, ts):
    weight = _continuum_in_s(model, params)

    def f(s):
        w, e = weight(s)
        return w[:, None] * np.exp(-1j * np.outer(e, ts))

    bps = _s_breakpoints(model, params, float(ts.max()))
    value, _ = adaptive_sum(f, bps, 0.5 * params.quad_tol, 200000)
    return value


def cut_integral(model: BandModel, params: SystemParams, t):
    """``int_band A(E) exp(-i E t) dE`` with ``A = Delta / ((E-eps-Sigma')**2 + pi**2 Delta**2)``.

    The band is mapped by ``x = tanh s`` which clusters nodes at both edges;
    panels are no wider than a quarter period of the fastest phase.
    """
    shape, ts = _as_times(t)
    if np.any(ts < 0):
        raise ValueError("times must be nonnegative")
    if model.decoupled:
        inside = model.e_bottom < params.epsilon < model.e_top
        out = np.exp(-1j * params.epsilon * ts) if inside else np.zeros(ts.size, dtype=complex)
        return _shaped(out, shape)
    order = np.argsort(ts, kind="stable")
    out = np.empty(ts.size, dtype=complex)
    for start in range(0, ts.size, CHUNK):
        idx = order[start:start + CHUNK]
        out[idx] = _cut_chunk(model, params, ts[idx])
    return _shaped(out, shape)


def _pole_sum(poles, ts):
    out = np.zeros(ts.size, dtype=complex)
    for p in poles:
        out += p.weight * np.exp(-1j * p.energy * ts)
    return out


def survival_amplitude(model: BandModel, params: SystemParams, t, poles=None):
    """``g(t)``: cut integral plus ``w_j exp(-i E_j t)`` for every real pole."""
    shape, ts = _as_times(t)
    if model.decoupled:
        return _shaped(np.exp(-1j * params.epsilon * ts), shape)
    if poles is None:
        poles = find_real_poles(model, params)
    out = np.atleast_1d(cut_integral(model, params, ts)) + _pole_sum(poles, ts)
    return _shaped(out, shape)


def fgr_rate(model: BandModel, params: SystemParams) -> float:
    """Golden-rule decay rate ``1/tau = 2 pi Delta(eps)``."""
    rate = 2.0 * math.pi * delta(model, params.epsilon)
    if rate == 0:
        raise DecoupledLevel("Delta(eps) = 0: the golden rule predicts no decay")
    return rate


def fgr_time(model: BandModel, params: SystemParams) -> float:
    return 1.0 / fgr_rate(model, params)


def fgr_probability(model: BandModel, params: SystemParams, t):
    return np.exp(-fgr_rate(model, params) * np.asarray(t, dtype=float))


def spectral_density(model: BandModel, params: SystemParams) -> SpectralDensity:
    """Continuum ``A(w)`` on the band and the bound-state delta weights."""
    poles = find_real_poles(model, params)
    eps = params.epsilon
    tol = 1e-2 * params.quad_tol

    def continuum(w):
        w = np.asarray(w, dtype=float)
        flat = np.atleast_1d(w).ravel()
        dlt = np.atleast_1d(delta(model, flat))
        out = np.zeros(flat.size)
        live = dlt > 0
        if live.any():
            sp = np.atleast_1d(sigma_prime(model, flat[live], tol))
            out[live] = dlt[live] / ((flat[live] - eps - sp) ** 2 + (math.pi * dlt[live]) ** 2)
        return out[0] if w.ndim == 0 else out.reshape(w.shape)

    if model.decoupled:
        weight = 1.0 if model.e_bottom < eps < model.e_top else 0.0
    else:
        weight = float(cut_integral(model, params, 0.0).real)
    return SpectralDensity(continuum, tuple((p.energy, p.weight) for p in poles), weight)


def survival_series(model: BandModel, params: SystemParams, times) -> SurvivalSeries:
    """Amplitude, probability and golden-rule curve on a sorted grid."""
    ts = np.asarray(times, dtype=float).ravel()
    if ts.size == 0:
        raise DegenerateInput("empty time grid")
    if np.any(ts < 0) or np.any(np.diff(ts) < 0):
        raise DegenerateInput("times must be sorted and nonnegative")
    g = np.atleast_1d(survival_amplitude(model, params, ts))
    try:
        tau = fgr_time(model, params)
        p_fgr = np.exp(-ts / tau)
    except DecoupledLevel:
        tau = math.nan
        p_fgr = np.full(ts.size, math.nan)
    return SurvivalSeries(ts, g, np.abs(g) ** 2, p_fgr, tau)


# --------------------------------------------------------------------------
# semi-infinite chain in closed form

def chain_closed_form(delta0: float, t, quad_tol: float = 1e-12, alpha2: Optional[float] = None):
    """Chain-model amplitude for ``eps = 0`` as an integral over the lattice momentum.

    ``g(t) = (1/2pi) int_{-pi}^{pi} exp(i t cos Q) (1 - exp(-2iQ)) / (1 + a2 exp(-2iQ)) dQ``.
    The default ``a2 = 1 - 2 delta0`` is the value that reproduces the band
    integral (``a2 = 0`` is the uniform chain, ``g = 2 J_1(t) / t``); pass
    ``alpha2`` to evaluate the integral with any other constant.
    """
    if not 0 < delta0 < 1:
        raise DegenerateInput("closed form needs 0 < delta0 < 1")
    shape, ts = _as_times(t)
    a2 = 1.0 - 2.0 * delta0 if alpha2 is None else float(alpha2)
    if abs(a2) >= 1:
        raise DegenerateInput("closed form needs |alpha2| < 1")

    def f(q):
        ph = np.exp(-2j * q)
        base = (1.0 - ph) / (1.0 + a2 * ph) / (2.0 * math.pi)
        return base[:, None] * np.exp(1j * np.outer(np.cos(q), ts))

    spec = QuadratureSpec(abs_tol=quad_tol, max_panels=200000, oscillation_scale=float(ts.max()) or None)
    out = np.atleast_1d(integrate(f, -math.pi, math.pi, spec))
    return _shaped(out, shape)


# --------------------------------------------------------------------------
# continued-sheet route

def _ray_integrand(model, params, edge, ts):
    """``(G(right) - G(left)) exp(-y t) y`` at ``y = exp(v)`` below one band edge.

    Left of the bottom ray and right of the top ray lie on the standard sheet;
    the strip between the rays is the continued one.
    """
    h = model.half_width
    eps = params.epsilon
    xe = -1.0 if edge < 0 else 1.0
    key = "bottom_side" if edge < 0 else "top_side"

    def f(v):
        y = np.exp(v)
        z = xe - 1j * y / h
        w = model.from_unit(xe) - 1j * y
        right = second_sheet_sigma_unit(model, z, **{key: "right"})
        left = second_sheet_sigma_unit(model, z, **{key: "left"})
        diff = 1.0 / (w - eps - right) - 1.0 / (w - eps - left)
        return (diff * y)[:, None] * np.exp(-np.outer(y, ts))

    return f


def _ray_chunk(model, params, edge, ts):
    y_max = max(30.0 / float(ts.min()), 30.0)
    lo, hi = math.log(Y_MIN), math.log(y_max)
    bps = np.unique(np.concatenate([np.arange(lo, hi, 1.0), [hi], -np.log(ts)]))
    bps = bps[(bps >= lo) & (bps <= hi)]
    f = _ray_integrand(model, params, edge, ts)
    value, _ = adaptive_sum(f, bps, 0.25 * params.quad_tol, 200000)
    e_edge = model.e_bottom if edge < 0 else model.e_top
    return value * np.exp(-1j * e_edge * ts) / (2.0 * math.pi)


def second_sheet_parts(model: BandModel, params: SystemParams, t, real_poles=None,
                       resonances=None) -> ContourParts:
    """Decompose ``g(t)`` into resonance, bound-state and edge-cut pieces."""
    if not model.has_second_sheet:
        raise UnsupportedModel(f"no explicit second-sheet continuation for {model.kind.value}")
    _, ts = _as_times(t)
    if np.any(ts <= 0):
        raise ValueError("the deformed contour needs t > 0")
    if model.decoupled:
        zero = np.zeros(ts.size, dtype=complex)
        return ContourParts(ts, np.exp(-1j * params.epsilon * ts), zero, zero, zero)
    if real_poles is None:
        real_poles = find_real_poles(model, params)
    if resonances is None:
        resonances = find_resonance_poles(model, params)
    res = np.zeros(ts.size, dtype=complex)
    for r in resonances:
        res += r.residue * np.exp(-1j * r.omega * ts)
    bottom = np.empty(ts.size, dtype=complex)
    top = np.empty(ts.size, dtype=complex)
    order = np.argsort(ts, kind="stable")
    for start in range(0, ts.size, CHUNK):
        idx = order[start:start + CHUNK]
        bottom[idx] = _ray_chunk(model, params, -1, ts[idx])
        top[idx] = _ray_chunk(model, params, 1, ts[idx])
    return ContourParts(ts, res, _pole_sum(real_poles, ts), bottom, top)


def second_sheet_amplitude(model: BandModel, params: SystemParams, t):
    """``g(t)`` from the contour pushed onto the continued sheet (``t > 0``)."""
    shape, ts = _as_times(t)
    return _shaped(second_sheet_parts(model, params, ts).total, shape)


# --------------------------------------------------------------------------
# asymptotics

def short_time_fit(model: BandModel, params: SystemParams, t_max: float = 0.1, n: int = 20) -> ShortTimeFit:
    """Least-squares ``1 - p(t) = c t**2`` on ``(0, t_max]``.

    ``c`` should reproduce ``int Delta dE``: expanding ``g = 1 - i a t - b t**2/2``
    with the first two moments of the spectral density gives
    ``1 - p = (b - a**2) t**2``, and that variance is the total coupling.
    """
    if model.decoupled:
        return ShortTimeFit(0.0, 0.0, 0.0)
    ts = np.linspace(t_max / n, t_max, n)
    tight = SystemParams(params.epsilon, min(params.quad_tol, 1e-13), params.root_tol)
    g = np.atleast_1d(survival_amplitude(model, tight, ts))
    y = 1.0 - np.abs(g) ** 2
    t2 = ts ** 2
    c = float(y @ t2 / (t2 @ t2))
    norm = np.linalg.norm(y)
    rel = float(np.linalg.norm(y - c * t2) / norm) if norm > 0 else 0.0
    return ShortTimeFit(c, rel, delta_integral(model))


def short_time_check(model: BandModel, params: SystemParams) -> float:
    """Quadratic coefficient of ``1 - p(t)`` for small ``t``."""
    return short_time_fit(model, params).coefficient


def tail_exponent(model: BandModel, params: SystemParams, t_window, n: int = 41,
                  method: str = "envelope") -> FitResult:
    """Log-log slope of the non-exponential remainder of ``g(t)``.

    ``method="envelope"`` fits ``sqrt(|I_b|**2 + |I_t|**2)`` built from the two
    edge contributions; it is smooth even when the edges interfere and the
    plain modulus has zeros. ``method="modulus"`` fits ``|g - poles|``, where the
    real-pole terms (and, when a continued sheet exists, the resonance terms)
    are removed.
    """
    t0, t1 = map(float, t_window)
    if not 0 < t0 < t1:
        raise DegenerateInput("tail window must satisfy 0 < t0 < t1")
    ts = np.geomspace(t0, t1, n)
    if model.has_second_sheet:
        parts = second_sheet_parts(model, params, ts)
        if method == "envelope":
            y = np.sqrt(np.abs(parts.bottom_cut) ** 2 + np.abs(parts.top_cut) ** 2)
        elif method == "modulus":
            y = np.abs(parts.bottom_cut + parts.top_cut)
        else:
            raise ValueError(f"unknown tail method {method!r}")
    else:
        if method != "modulus":
            raise UnsupportedModel("the edge envelope needs a continued sheet; use method='modulus'")
        y = np.abs(np.atleast_1d(cut_integral(model, params, ts)))
    return fit_power_law(ts, y)
