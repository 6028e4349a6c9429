"""Band and coupling models: coupling density, self-energy on both sheets.

Every model is defined on the unit band ``x in [-1, 1]``; a band with edges
``[e_bottom, e_top]`` is reached through ``E = center + half_width * x``.
Because the self-energy is a Hilbert transform of the coupling density it is
invariant under this map, ``Sigma(E) = Sigma_unit(x)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .errors import NonFinite, OnCut, UnsupportedModel
from .numerics import QuadratureSpec, integrate, principal_value

# Half-range of the tanh variable used for in-band quadrature of algebraic edges.
TANH_SPAN = 22.0


class ModelKind(str, Enum):
    CONSTANT = "constant"
    CHAIN = "chain"
    POWER_LAW = "power_law"


@dataclass(frozen=True)
class BandModel:
    """A finite band with coupling density ``Delta(E)``.

    For the semi-infinite chain ``delta0 = 2 V**2`` with ``V`` the hopping onto
    the first lattice site. The power-law model has
    ``Delta = C (E - E_b)**beta_bottom (E_t - E)**beta_top`` with ``C`` fixed so
    that the peak value equals ``delta0``.
    """

    kind: ModelKind
    delta0: float
    e_bottom: float = -1.0
    e_top: float = 1.0
    beta_bottom: float = 0.0
    beta_top: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if not self.e_bottom < self.e_top:
            raise ValueError("e_bottom must be below e_top")
        if not self.delta0 >= 0 or not math.isfinite(self.delta0):
            raise ValueError("delta0 must be finite and non-negative")
        if self.beta_bottom < 0 or self.beta_top < 0:
            raise ValueError("edge exponents must be non-negative")
        if self.kind is not ModelKind.POWER_LAW and (self.beta_bottom or self.beta_top):
            raise ValueError("edge exponents only apply to the power-law model")

    @classmethod
    def constant(cls, delta0, e_bottom=-1.0, e_top=1.0):
        return cls(ModelKind.CONSTANT, delta0, e_bottom, e_top)

    @classmethod
    def chain(cls, delta0=None, *, v=None, e_bottom=-1.0, e_top=1.0):
        if (delta0 is None) == (v is None):
            raise ValueError("give exactly one of delta0 or v")
        if v is not None:
            delta0 = 2.0 * v * v
        return cls(ModelKind.CHAIN, delta0, e_bottom, e_top)

    @classmethod
    def power_law(cls, delta0, beta_bottom, beta_top, e_bottom=-1.0, e_top=1.0):
        return cls(ModelKind.POWER_LAW, delta0, e_bottom, e_top, beta_bottom, beta_top)

    @property
    def center(self):
        return 0.5 * (self.e_bottom + self.e_top)

    @property
    def half_width(self):
        return 0.5 * (self.e_top - self.e_bottom)

    @property
    def decoupled(self):
        return self.delta0 == 0

    @property
    def has_second_sheet(self):
        return self.kind in (ModelKind.CONSTANT, ModelKind.CHAIN)

    def edge_exponent(self, side):
        """Exponent of ``Delta`` at the bottom (``side=-1``) or top (``side=+1``) edge."""
        if self.kind is ModelKind.CONSTANT:
            return 0.0
        if self.kind is ModelKind.CHAIN:
            return 0.5
        return self.beta_top if side > 0 else self.beta_bottom

    def to_unit(self, e):
        return (e - self.center) / self.half_width

    def from_unit(self, x):
        return self.center + self.half_width * x


@dataclass(frozen=True)
class SystemParams:
    """Level energy plus numerical tolerances (absolute quadrature, energy root)."""

    epsilon: float
    quad_tol: float = 1e-10
    root_tol: float = 1e-12

    def __post_init__(self):
        if not (self.quad_tol > 0 and self.root_tol > 0):
            raise ValueError("tolerances must be positive")

    def quad_spec(self, **kws):
        return QuadratureSpec(abs_tol=self.quad_tol, **kws)


def _power_norm(bb, bt):
    if bb == 0 and bt == 0:
        return 1.0
    xp = (bb - bt) / (bb + bt)
    return 1.0 / ((1 + xp) ** bb * (1 - xp) ** bt)


def delta_parts(model, opx, omx):
    """Coupling density from ``1 + x`` and ``1 - x`` (kept separate for edge accuracy)."""
    opx = np.asarray(opx, dtype=float)
    omx = np.asarray(omx, dtype=float)
    inside = (opx >= 0) & (omx >= 0)
    if model.kind is ModelKind.CONSTANT:
        out = np.full(opx.shape, float(model.delta0))
    elif model.kind is ModelKind.CHAIN:
        out = model.delta0 / math.pi * np.sqrt(np.clip(opx * omx, 0.0, None))
    else:
        c = model.delta0 * _power_norm(model.beta_bottom, model.beta_top)
        out = c * np.clip(opx, 0, None) ** model.beta_bottom * np.clip(omx, 0, None) ** model.beta_top
    return np.where(inside, out, 0.0)


def delta_unit(model, x):
    x = np.asarray(x, dtype=float)
    return delta_parts(model, 1.0 + x, 1.0 - x)


def delta(model: BandModel, e):
    """Coupling density ``Delta(E)``; zero outside the closed band."""
    out = delta_unit(model, model.to_unit(np.asarray(e, dtype=float)))
    return out.item() if out.ndim == 0 else out


def delta_integral(model: BandModel) -> float:
    """Total coupling ``int Delta(E) dE`` (equals ``sum_k |V_k|**2``)."""
    h = model.half_width
    if model.kind is ModelKind.CONSTANT:
        return 2.0 * h * model.delta0
    if model.kind is ModelKind.CHAIN:
        return 0.5 * h * model.delta0
    a, b = model.beta_bottom, model.beta_top
    return h * model.delta0 * _power_norm(a, b) * 2.0 ** (a + b + 1) * special.beta(a + 1, b + 1)


def tanh_parts(s):
    """``x = tanh(s)`` together with accurate ``1 + x``, ``1 - x`` and ``dx/ds``."""
    s = np.asarray(s, dtype=float)
    with np.errstate(over="ignore"):
        opx = 2.0 / (1.0 + np.exp(-2.0 * s))
        omx = 2.0 / (1.0 + np.exp(2.0 * s))
    return np.tanh(s), opx, omx, opx * omx


# --------------------------------------------------------------------------
# real part of the self-energy on the real axis

def _pv_power_tanh(model, s, tol):
    """Principal value at ``x = tanh s``, integrated in the tanh variable.

    With ``x - y = sinh(s - s') / (cosh s cosh s')`` the kernel stays accurate
    even when ``x`` sits within rounding distance of an edge.
    """
    s = float(s)
    span = TANH_SPAN + abs(s)
    ch = math.cosh(s)

    def g(sp):
        sp = np.asarray(sp, dtype=float)
        _, opx, omx, _ = tanh_parts(sp)
        u = s - sp
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(u == 0, 1.0, u / np.sinh(u))
        return delta_parts(model, opx, omx) * (ch / np.cosh(sp)) * ratio

    return principal_value(g, s, -span, span, QuadratureSpec(abs_tol=tol))


def sigma_prime_tanh(model, s, tol=1e-12):
    """In-band ``Sigma'`` at ``x = tanh s`` (scalar ``s``)."""
    if model.delta0 == 0:
        return 0.0
    if model.kind is ModelKind.CONSTANT:
        return 2.0 * model.delta0 * float(s)
    if model.kind is ModelKind.CHAIN:
        return model.delta0 * math.tanh(s)
    value = _pv_power_tanh(model, s, tol)
    if not math.isfinite(value):
        raise NonFinite(f"principal value did not produce a finite result at s={s}")
    return value


def sigma_outside_unit(model, side, log_d, tol=1e-12):
    """Real self-energy at unit-band energy ``x = side * (1 + d)``, ``d = exp(log_d)``.

    Working with ``log d`` keeps bound states hugging an edge (``d`` far below
    machine epsilon) resolvable.
    """
    d = math.exp(log_d) if log_d > -745 else 0.0
    d0 = model.delta0
    if model.kind is ModelKind.CONSTANT:
        if log_d == -math.inf:
            return side * math.inf
        return side * d0 * (math.log(2.0 + d) - log_d)
    if model.kind is ModelKind.CHAIN:
        return side * d0 * (1.0 + d - math.sqrt(d * (2.0 + d)))
    if d0 == 0:
        return 0.0
    near_beta = model.beta_top if side > 0 else model.beta_bottom
    if d == 0 and near_beta == 0:
        return side * math.inf
    if d == 0:
        # integrand decays like exp(-2 beta s) at the touched edge
        span_near = TANH_SPAN * max(1.0, 1.0 / near_beta)
    else:
        span_near = TANH_SPAN + 0.5 * max(0.0, math.log(2.0) - log_d)

    def integrand(s):
        _, opx, omx, jac = tanh_parts(s)
        gap = omx if side > 0 else opx
        return delta_parts(model, opx, omx) * jac / (d + gap)

    lo, hi = (-TANH_SPAN, span_near) if side > 0 else (-span_near, TANH_SPAN)
    knee = [side * 0.5 * math.log(2.0 / d)] if d > 0 else None
    return side * integrate(integrand, lo, hi, QuadratureSpec(abs_tol=tol), breakpoints=knee)


def sigma_prime_unit(model, x, tol=1e-12):
    """Real part of the self-energy at unit-band energy ``x`` (scalar)."""
    x = float(x)
    d0 = model.delta0
    if d0 == 0:
        return 0.0
    ax = abs(x)
    if ax > 1.0:
        side = 1 if x > 0 else -1
        return sigma_outside_unit(model, side, math.log(ax - 1.0), tol)
    if model.kind is ModelKind.CONSTANT:
        if ax == 1.0:
            raise NonFinite("the constant-coupling self-energy diverges at the band edge")
        return d0 * math.log((1.0 + x) / (1.0 - x))
    if model.kind is ModelKind.CHAIN:
        return d0 * x
    if ax == 1.0:
        value = sigma_outside_unit(model, int(x), -math.inf, tol)
        if not math.isfinite(value):
            raise NonFinite("power-law self-energy diverges at an edge with zero exponent")
        return value
    return sigma_prime_tanh(model, math.atanh(x), tol)


def sigma_prime(model: BandModel, e, quad_tol=1e-10):
    """Real part of the self-energy on the real energy axis."""
    x = model.to_unit(np.asarray(e, dtype=float))
    if x.ndim == 0:
        return sigma_prime_unit(model, x, quad_tol)
    return np.array([sigma_prime_unit(model, xi, quad_tol) for xi in x.ravel()]).reshape(x.shape)


def sigma_prime_derivative_outside(model, side, log_d, tol=1e-12):
    """``dSigma'/dE`` at ``x = side * (1 + d)`` outside the band (always negative)."""
    h = model.half_width
    d0 = model.delta0
    if d0 == 0:
        return 0.0
    d = math.exp(log_d) if log_d > -745 else 0.0
    if model.kind is ModelKind.CONSTANT:
        return -2.0 * d0 / (d * (2.0 + d)) / h if d > 0 else -math.inf
    if model.kind is ModelKind.CHAIN:
        if d == 0:
            return -math.inf
        return d0 * (1.0 - (1.0 + d) / math.sqrt(d * (2.0 + d))) / h
    # central difference in log d: dSigma/dx = side * dSigma/dlogd / d
    step = 1e-4
    up = sigma_outside_unit(model, side, log_d + step, tol)
    dn = sigma_outside_unit(model, side, log_d - step, tol)
    if d == 0:
        return -math.inf
    return side * (up - dn) / (2 * step) / d / h


# --------------------------------------------------------------------------
# complex self-energy

def _log_down(z, left_of_ray=False):
    """Logarithm with its cut along the negative imaginary axis (array friendly).

    ``left_of_ray`` picks the limit from ``Re z < 0`` for points on the cut.
    """
    z = np.asarray(z, dtype=complex)
    val = np.log(z)
    bump = val.imag < -0.5 * math.pi
    if left_of_ray:
        bump |= (z.real == 0) & (z.imag < 0)
    return val + 2j * math.pi * bump


def _sqrt_down(z, left_of_ray=False):
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(0.5 * _log_down(z, left_of_ray))
    return np.where(z == 0, 0j, out)


def standard_sigma_unit(model, z, tol=1e-12):
    """Self-energy on the standard sheet at unit-band complex energy ``z``.

    Real ``z`` inside the band returns the limit from the upper half-plane.
    """
    z = complex(z)
    d0 = model.delta0
    if d0 == 0:
        return 0j
    if model.kind is ModelKind.CONSTANT:
        if z == 1 or z == -1:
            raise NonFinite("branch point of the constant-coupling self-energy")
        return d0 * (cmath.log(z + 1) - cmath.log(z - 1))
    if model.kind is ModelKind.CHAIN:
        return d0 * (z - cmath.sqrt(z - 1) * cmath.sqrt(z + 1))
    if z.imag == 0:
        x = z.real
        if abs(x) >= 1:
            return complex(sigma_prime_unit(model, x, tol))
        return complex(sigma_prime_unit(model, x, tol), -math.pi * float(delta_unit(model, x)))
    # subtract the value at Re z so the near-singular part is integrated exactly
    x0 = min(max(z.real, -1.0), 1.0)
    f0 = float(delta_unit(model, x0))

    def integrand(y):
        return (delta_unit(model, y) - f0) / (z - y)

    spec = QuadratureSpec(abs_tol=0.5 * tol, endpoint="tanh")
    val = 0j
    if x0 > -1:
        val += integrate(integrand, -1.0, x0, spec)
    if x0 < 1:
        val += integrate(integrand, x0, 1.0, spec)
    return val + f0 * (cmath.log(z + 1) - cmath.log(z - 1))


def standard_sigma(model: BandModel, omega, quad_tol=1e-10):
    """Self-energy on the standard (physical) sheet, cut along the band."""
    return standard_sigma_unit(model, model.to_unit(complex(omega)), quad_tol)


def _check_model_second_sheet(model):
    if not model.has_second_sheet:
        raise UnsupportedModel(f"no explicit second-sheet continuation for {model.kind.value}")


def second_sheet_sigma_unit(model, z, bottom_side=None, top_side=None):
    """Unit-band self-energy continued downward through the band interval.

    Cuts run from ``x = -1`` and ``x = +1`` straight down. ``bottom_side`` /
    ``top_side`` (``"left"`` or ``"right"``) select the side for points lying
    exactly on the respective ray. Accepts scalars or arrays.
    """
    _check_model_second_sheet(model)
    zz = np.asarray(z, dtype=complex)
    lb = bottom_side == "left"
    lt = top_side == "left"
    if model.delta0 == 0:
        out = np.zeros_like(zz)
    elif model.kind is ModelKind.CONSTANT:
        out = model.delta0 * (_log_down(zz + 1, lb) - _log_down(zz - 1, lt))
    else:
        out = model.delta0 * (zz - _sqrt_down(zz - 1, lt) * _sqrt_down(zz + 1, lb))
    return complex(out) if out.ndim == 0 else out


def second_sheet_sigma_derivative_unit(model, z, bottom_side=None, top_side=None):
    """``dSigma/dx`` on the continued sheet."""
    _check_model_second_sheet(model)
    zz = np.asarray(z, dtype=complex)
    d0 = model.delta0
    if model.kind is ModelKind.CONSTANT:
        out = -2.0 * d0 / ((zz - 1) * (zz + 1))
    else:
        root = _sqrt_down(zz - 1, top_side == "left") * _sqrt_down(zz + 1, bottom_side == "left")
        out = d0 * (1.0 - zz / root)
    return complex(out) if out.ndim == 0 else out


def _ray_distance(model, omega):
    dist = []
    for edge in (model.e_bottom, model.e_top):
        if omega.imag <= 0:
            dist.append(abs(omega.real - edge))
        else:
            dist.append(abs(omega - edge))
    return min(dist)


def second_sheet_sigma(model: BandModel, omega, root_tol=1e-12):
    """Self-energy on the sheet reached through the band interval.

    Agrees with :func:`standard_sigma` in the upper half-plane and outside the
    vertical strip below the band; between the edges in the lower half-plane
    it continues the upper-half-plane boundary values.
    """
    _check_model_second_sheet(model)
    omega = complex(omega)
    if _ray_distance(model, omega) < root_tol:
        raise OnCut(f"{omega} lies on a branch cut below a band edge")
    return second_sheet_sigma_unit(model, model.to_unit(omega))


def second_sheet_sigma_derivative(model: BandModel, omega, root_tol=1e-12):
    """``dSigma/dE`` on the continued sheet."""
    _check_model_second_sheet(model)
    omega = complex(omega)
    if _ray_distance(model, omega) < root_tol:
        raise OnCut(f"{omega} lies on a branch cut below a band edge")
    return second_sheet_sigma_derivative_unit(model, model.to_unit(omega)) / model.half_width
