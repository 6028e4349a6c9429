"""Brute-force reference: the level coupled to ``n`` discrete band states.

The continuum is replaced by quadrature nodes ``w_k`` with couplings
``V_k = sqrt(Delta(w_k) * weight_k)``, so that ``sum_k V_k**2 delta(E - w_k)``
reproduces ``Delta(E)`` under the quadrature rule. The resulting arrowhead
Hamiltonian is diagonalized exactly and ``|d>`` is evolved by its
eigen-expansion.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import special

from .amplitude import SurvivalSeries, fgr_time
from .band_models import BandModel, SystemParams, delta
from .errors import DecoupledLevel, DegenerateInput, DegenerateNodes
from .kernels import secular_solve, spectral_sum


@dataclass(frozen=True)
class OracleSystem:
    node_energies: np.ndarray
    couplings: np.ndarray
    epsilon: float
    eigenvalues: Optional[np.ndarray] = None
    d_overlaps: Optional[np.ndarray] = None

    @property
    def n(self):
        return self.node_energies.size

    @property
    def solved(self):
        return self.eigenvalues is not None

    def hamiltonian(self):
        """Dense ``(n + 1) x (n + 1)`` matrix, level first."""
        h = np.diag(np.concatenate([[self.epsilon], self.node_energies]))
        h[0, 1:] = self.couplings
        h[1:, 0] = self.couplings
        return h

    def revival_time(self):
        """Time beyond which the discretization's quasi-periodicity shows up."""
        band = self.node_energies[-1] - self.node_energies[0]
        return 0.5 * self.n / band


def discretize(model: BandModel, params: SystemParams, n: int, rule: str = "gauss") -> OracleSystem:
    """Discretize the band with ``n`` Gauss-Legendre (or uniform midpoint) nodes."""
    if n < 2:
        raise DegenerateInput("need at least two band nodes")
    if rule == "gauss":
        x, w = special.roots_legendre(n)
    elif rule == "uniform":
        x = -1.0 + (2.0 * np.arange(n) + 1.0) / n
        w = np.full(n, 2.0 / n)
    else:
        raise ValueError(f"unknown node rule {rule!r}")
    h = model.half_width
    nodes = model.from_unit(x)
    v2 = np.asarray(delta(model, nodes)) * w * h
    return OracleSystem(nodes, np.sqrt(v2), float(params.epsilon))


def eigensolve(system: OracleSystem, root_tol: float = 1e-12, use_jit=None) -> OracleSystem:
    """Eigenvalues and ``|<d|m>|**2`` via the secular equation.

    Nodes with zero coupling decouple and are returned as eigenvalues with zero
    overlap.
    """
    d = np.asarray(system.node_energies, dtype=float)
    if np.any(np.diff(d) < root_tol):
        raise DegenerateNodes("band nodes must be strictly increasing and separated by root_tol")
    v2 = np.asarray(system.couplings, dtype=float) ** 2
    live = v2 > 0
    lam_free = d[~live]
    if live.any():
        lam, w = secular_solve(system.epsilon, d[live], v2[live], use_jit=use_jit)
    else:
        lam, w = np.array([system.epsilon]), np.array([1.0])
    lam = np.concatenate([lam, lam_free])
    w = np.concatenate([w, np.zeros(lam_free.size)])
    order = np.argsort(lam, kind="stable")
    return replace(system, eigenvalues=lam[order], d_overlaps=w[order])


def eigensolve_dense(system: OracleSystem) -> OracleSystem:
    """Dense symmetric diagonalization; a cross-check for small ``n``."""
    lam, vecs = np.linalg.eigh(system.hamiltonian())
    return replace(system, eigenvalues=lam, d_overlaps=vecs[0] ** 2)


def evolve(system: OracleSystem, times, use_jit=None, tau: float = math.nan) -> SurvivalSeries:
    """Exact evolution of ``|d>``: ``g(t) = sum_m |<d|m>|**2 exp(-i E_m t)``.

    ``tau`` (the golden-rule time, if known) fills the reference column.
    """
    if not system.solved:
        system = eigensolve(system)
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    t_rev = system.revival_time()
    if np.any(np.abs(ts) > t_rev):
        warnings.warn(
            f"times beyond {t_rev:.4g} are affected by the finite-n revival", RuntimeWarning, stacklevel=2
        )
    g = spectral_sum(system.eigenvalues, system.d_overlaps, ts, use_jit=use_jit)
    return SurvivalSeries(ts, g, np.abs(g) ** 2, np.exp(-np.abs(ts) / tau), tau)


def oracle_series(model: BandModel, params: SystemParams, times, n: int = 4000, use_jit=None) -> SurvivalSeries:
    """Discretize, solve and evolve in one call."""
    try:
        tau = fgr_time(model, params)
    except DecoupledLevel:
        tau = math.nan
    system = eigensolve(discretize(model, params, n), params.root_tol, use_jit=use_jit)
    return evolve(system, times, use_jit=use_jit, tau=tau)


def oracle_amplitude(model: BandModel, params: SystemParams, times, n: int = 4000, use_jit=None) -> np.ndarray:
    """Oracle ``g(t)`` only."""
    return oracle_series(model, params, times, n, use_jit).g
