"""Bound-state poles on the real axis and resonance poles on the continued sheet."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .band_models import (
    BandModel,
    ModelKind,
    SystemParams,
    delta,
    delta_parts,
    second_sheet_sigma_derivative_unit,
    second_sheet_sigma_unit,
    sigma_outside_unit,
    sigma_prime,
    sigma_prime_derivative_outside,
)
from .errors import NoConvergence, UnsupportedModel
from .numerics import QuadratureSpec, find_root_bracketed, find_root_complex, integrate

BELOW = "below-band"
ABOVE = "above-band"

# log-offset scan: steps below log(root_tol) grow as 2**k
_MAX_SCAN = 40


@dataclass(frozen=True)
class BoundPole:
    """Real pole ``E_j`` of the propagator outside the band.

    ``edge_offset`` is the distance from the nearer band edge, kept separately
    because poles of weakly coupled logarithmic models can sit closer to the
    edge than floating point resolves; such poles carry ``near_edge=True``.
    """

    energy: float
    weight: float
    side: str
    edge_offset: float
    residual: float
    near_edge: bool = False


@dataclass(frozen=True)
class ResonancePole:
    omega: complex
    residue: complex
    sheet: str = "second"


def _locator_outside(model, params, side):
    """``E - eps - Sigma'(E)`` as a function of ``log`` of the edge offset."""
    h = model.half_width
    edge = model.e_top if side > 0 else model.e_bottom

    def f(log_off):
        off = math.exp(log_off) if log_off > -745 else 0.0
        e_rel = (edge - params.epsilon) + side * off
        return e_rel - sigma_outside_unit(model, side, log_off - math.log(h), params.quad_tol * 1e-2)

    return f


def _bracket_log_offset(f, side, params, cap):
    """Bracket the unique sign change of the locator on one side, in log offset.

    Returns ``None`` when there is no root.
    """
    far_sign = math.copysign(1.0, side)  # E - eps dominates far away
    u_cap = math.log(cap)
    if math.copysign(1.0, f(u_cap)) != far_sign:
        raise NoConvergence("locator has not reached its asymptotic sign at the scan cap")
    u0 = math.log(params.root_tol)
    # outward scan from the edge, offsets growing by factor 2
    grid = [u0 + k * math.log(2.0) for k in range(int((u_cap - u0) / math.log(2.0)) + 1)] + [u_cap]
    vals = [f(x) for x in grid]
    for i in range(len(grid) - 1, -1, -1):
        if math.copysign(1.0, vals[i]) != far_sign or vals[i] == 0:
            hi = grid[i + 1] if i + 1 < len(grid) else u_cap
            return grid[i], hi
    # root may hide closer to the edge than root_tol
    prev = u0
    for k in range(_MAX_SCAN):
        u = u0 - 2.0 ** k
        val = f(u)
        if math.copysign(1.0, val) != far_sign or val == 0:
            return u, prev
        prev = u
    return None


def find_real_poles(model: BandModel, params: SystemParams) -> list:
    """Solve ``E = eps + Sigma'(E)`` below and above the band.

    Weights are ``1 / (1 - dSigma'/dE)`` with the derivative in closed form
    for the constant and chain models.
    """
    eps = params.epsilon
    if model.decoupled:
        if model.e_bottom <= eps <= model.e_top:
            return []
        side = BELOW if eps < model.e_bottom else ABOVE
        off = model.e_bottom - eps if eps < model.e_bottom else eps - model.e_top
        return [BoundPole(eps, 1.0, side, off, 0.0, off < params.root_tol)]
    cap = abs(eps) + 10.0 + 100.0 * model.delta0 + abs(model.e_bottom) + abs(model.e_top)
    h = model.half_width
    poles = []
    for side in (-1, 1):
        f = _locator_outside(model, params, side)
        bracket = _bracket_log_offset(f, side, params, cap)
        if bracket is None:
            continue
        lo, hi = bracket
        tol = 1e-13 * max(1.0, abs(lo))
        u = find_root_bracketed(f, lo, hi, tol=tol)
        off = math.exp(u)
        edge = model.e_top if side > 0 else model.e_bottom
        energy = edge + side * off
        deriv = sigma_prime_derivative_outside(model, side, u - math.log(h), params.quad_tol * 1e-2)
        weight = 1.0 / (1.0 - deriv) if math.isfinite(deriv) else 0.0
        poles.append(BoundPole(
            energy=energy,
            weight=weight,
            side=ABOVE if side > 0 else BELOW,
            edge_offset=off,
            residual=abs(f(u)),
            near_edge=off < params.root_tol,
        ))
    return poles


def bound_state_overlap(model: BandModel, params: SystemParams, pole: BoundPole) -> float:
    """``|<d|E_j>|**2 = 1 / (1 + int Delta(E) / (E_j - E)**2 dE)`` by quadrature.

    The integral runs over ``ln`` of the distance from the pole so that a pole
    next to an edge does not produce a near-singular integrand.
    """
    if model.decoupled:
        return 1.0
    h = model.half_width
    off = pole.edge_offset / h
    side = 1 if pole.side == ABOVE else -1
    # distance y = off + (1 -/+ x) from the pole in unit-band coordinates
    lo, hi = math.log(off), math.log(off + 2.0)

    def integrand(v):
        y = np.exp(v)
        gap = y - off
        opx, omx = (2.0 - gap, gap) if side > 0 else (gap, 2.0 - gap)
        return delta_parts(model, opx, omx) / y

    # error in the overlap is d(total) / (1 + total)**2, so scale the tolerance
    grid = np.linspace(lo, hi, 400)
    rough = trapezoid(integrand(grid), grid) / h
    tol = 1e-2 * params.quad_tol * h * (1.0 + rough) ** 2
    total = integrate(integrand, lo, hi, QuadratureSpec(abs_tol=tol))
    return 1.0 / (1.0 + total / h)


# --------------------------------------------------------------------------
# resonance poles on the continued sheet

def _unit_locator(model, params):
    """Unit-band locator ``x - eps_unit - Sigma_unit(x) / h`` and its derivative."""
    h = model.half_width
    eps_u = model.to_unit(params.epsilon)

    def f(z, bottom_side=None, top_side=None):
        return z - eps_u - second_sheet_sigma_unit(model, z, bottom_side, top_side) / h

    def df(z):
        return 1.0 - second_sheet_sigma_derivative_unit(model, z) / h

    return f, df, eps_u


def _strip_depth(model, params):
    h = model.half_width
    eps_u = abs(model.to_unit(params.epsilon))
    return 4.0 + 2.0 * eps_u + 8.0 * math.pi * model.delta0 / h


def _phase_walk(f, points):
    """Accumulated phase change of ``f`` along a polyline, refined adaptively."""
    total = 0.0
    vals = [f(p) for p in points]
    stack = list(zip(points[:-1], points[1:], vals[:-1], vals[1:]))
    stack.reverse()
    depth_guard = 0
    while stack:
        a, b, fa, fb = stack.pop()
        dphi = math.remainder(math.atan2(fb.imag, fb.real) - math.atan2(fa.imag, fa.real), 2 * math.pi)
        if abs(dphi) > 0.3 and abs(b - a) > 1e-13:
            m = 0.5 * (a + b)
            fm = f(m)
            stack.append((m, b, fm, fb))
            stack.append((a, m, fa, fm))
            depth_guard += 1
            if depth_guard > 200000:
                raise NoConvergence("argument-principle walk did not resolve the phase")
            continue
        total += dphi
    return total


def count_strip_zeros(model: BandModel, params: SystemParams, depth=None, corner=1e-9) -> int:
    """Number of resonance poles in the lower half of the strip under the band.

    Winding number of the locator along the boundary of
    ``(-1, 1) x (-depth, 0)`` in unit-band coordinates, walked counterclockwise,
    with quarter circles of radius ``corner`` cut out at the branch points.
    """
    f, _, _ = _unit_locator(model, params)
    depth = depth or _strip_depth(model, params)
    r = corner
    quarter = np.linspace(0.0, 0.5 * math.pi, 50)
    lin = np.linspace(-1.0, 1.0, 401)[1:-1]
    edge_in = np.geomspace(r, 1.0, 300)
    top_x = np.unique(np.concatenate([1.0 - edge_in, -1.0 + edge_in, lin]))[::-1]

    wind = 0.0
    # down the left ray on its strip (right) side
    left = [complex(-1.0, -y) for y in np.geomspace(r, depth, 400)]
    wind += _phase_walk(lambda z: f(z, bottom_side="right"), left)
    wind += _phase_walk(f, [complex(x, -depth) for x in np.linspace(-1.0, 1.0, 401)])
    # up the right ray on its strip (left) side
    right = [complex(1.0, -y) for y in np.geomspace(depth, r, 400)]
    wind += _phase_walk(lambda z: f(z, top_side="left"), right)
    wind += _phase_walk(f, [1.0 + r * complex(-math.sin(p), -math.cos(p)) for p in quarter])
    wind += _phase_walk(f, [complex(x, 0.0) for x in top_x])
    wind += _phase_walk(f, [-1.0 + r * complex(math.cos(p), -math.sin(p)) for p in quarter])
    return int(round(wind / (2 * math.pi)))


def _chain_candidates(model, params):
    """Roots of the squared chain locator equation (all sheets)."""
    h = model.half_width
    g = model.delta0 / h
    e = model.to_unit(params.epsilon)
    # (x - e - g x)**2 = g**2 (x**2 - 1) after isolating the square root
    a = (1 - g) ** 2 - g * g
    b = -2 * e * (1 - g)
    c = e * e + g * g
    if abs(a) < 1e-14:
        return [] if b == 0 else [complex(-c / b)]
    return list(np.roots([a, b, c]).astype(complex))


def find_resonance_poles(model: BandModel, params: SystemParams) -> list:
    """All poles of the continued propagator in the strip below the band."""
    if not model.has_second_sheet:
        raise UnsupportedModel(f"no explicit second-sheet continuation for {model.kind.value}")
    if model.decoupled:
        return []
    f, df, eps_u = _unit_locator(model, params)
    tol = 1e-13
    seeds = []
    if -1 < eps_u < 1:
        sig = complex(sigma_prime(model, params.epsilon, params.quad_tol),
                      -math.pi * delta(model, params.epsilon))
        seeds.append(model.to_unit(params.epsilon + sig))
    if model.kind is ModelKind.CHAIN:
        seeds += _chain_candidates(model, params)
        expected = None
    else:
        expected = count_strip_zeros(model, params)
        depth = _strip_depth(model, params)
        seeds += [complex(x, -y) for y in np.geomspace(1e-3, depth, 12) for x in np.linspace(-0.95, 0.95, 9)]

    found = []
    for seed in seeds:
        if expected is not None and len(found) >= expected:
            break
        if not (-1 < seed.real < 1 and seed.imag < 0):
            continue
        try:
            z = find_root_complex(f, seed, tol=tol)
        except NoConvergence:
            continue
        if not (-1 < z.real < 1 and z.imag < 0) or abs(f(z)) > 1e-10:
            continue
        if any(abs(z - w) < 1e-8 for w in found):
            continue
        found.append(z)
    if expected is not None and len(found) != expected:
        raise NoConvergence(f"found {len(found)} resonance poles, argument principle counts {expected}")
    out = []
    for z in found:
        omega = model.from_unit(z)
        # residue of 1/(w - eps - Sigma(w)) in energy units
        out.append(ResonancePole(omega=complex(omega), residue=complex(1.0 / df(z))))
    out.sort(key=lambda p: (-p.omega.imag, p.omega.real))
    return out


def find_resonance_pole(model: BandModel, params: SystemParams) -> ResonancePole:
    """The resonance pole continued from the golden-rule locator.

    Newton iteration on ``w - eps - Sigma_II(w) = 0`` seeded at
    ``eps + Sigma'(eps) - i pi Delta(eps)``.
    """
    if not model.has_second_sheet:
        raise UnsupportedModel(f"no explicit second-sheet continuation for {model.kind.value}")
    eps = params.epsilon
    if model.decoupled:
        raise NoConvergence("a decoupled level has no resonance")
    rate = math.pi * delta(model, eps)
    if rate == 0:
        raise NoConvergence("level lies outside the band; no resonance pole to continue")
    f, df, _ = _unit_locator(model, params)
    seed = eps + sigma_prime(model, eps, params.quad_tol) - 1j * rate
    z = find_root_complex(f, model.to_unit(seed), tol=1e-13)
    if not (z.imag < 0 and -1 < z.real < 1):
        raise NoConvergence(f"Newton left the strip below the band: {model.from_unit(z)}")
    return ResonancePole(omega=complex(model.from_unit(z)), residue=complex(1.0 / df(z)))
