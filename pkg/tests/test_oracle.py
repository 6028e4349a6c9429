import os
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest

from decaycut import (
    BandModel,
    SystemParams,
    delta_integral,
    discretize,
    eigensolve,
    eigensolve_dense,
    evolve,
    find_real_poles,
    oracle_amplitude,
    survival_amplitude,
)
from decaycut._jit import NUMBA_ENABLED
from decaycut.errors import DegenerateNodes
from decaycut.kernels import secular_solve, spectral_sum


def test_decoupled_spectrum():
    sys_ = eigensolve(discretize(BandModel.constant(0.0), SystemParams(0.3), 32))
    assert np.all(sys_.couplings == 0)
    expected = np.sort(np.concatenate([sys_.node_energies, [0.3]]))
    assert np.allclose(sys_.eigenvalues, expected, atol=0)
    assert sys_.d_overlaps[np.argmin(np.abs(sys_.eigenvalues - 0.3))] == 1.0


def test_coupling_sum_converges():
    m = BandModel.constant(0.1)
    sys_ = discretize(m, SystemParams(-0.4), 1000)
    assert abs((sys_.couplings ** 2).sum() / delta_integral(m) - 1) < 1e-6


def test_exterior_eigenvalues_match_poles(strong):
    m, p = strong
    sys_ = eigensolve(discretize(m, p, 4000))
    out = (sys_.eigenvalues < -1) | (sys_.eigenvalues > 1)
    assert out.sum() == 2
    lo, hi = find_real_poles(m, p)
    assert sys_.eigenvalues[out] == pytest.approx([lo.energy, hi.energy], abs=1e-6)
    assert sys_.d_overlaps[out][0] == pytest.approx(lo.weight, rel=1e-2)


@pytest.mark.parametrize("model", [BandModel.constant(0.2), BandModel.chain(0.5), BandModel.power_law(0.1, 0.5, 1.0)])
def test_completeness(model):
    sys_ = eigensolve(discretize(model, SystemParams(-0.4), 1500))
    assert abs(sys_.d_overlaps.sum() - 1) < 1e-10


def test_three_by_three_by_hand():
    sys_ = discretize(BandModel.constant(0.3), SystemParams(0.1), 2)
    solved = eigensolve(sys_)
    (w1, w2), (v1, v2), e = sys_.node_energies, sys_.couplings, sys_.epsilon
    # det(H - x) for the bordered 3x3 matrix
    poly = np.polysub(np.polymul([-1, e], np.polymul([-1, w1], [-1, w2])),
                      np.polyadd(np.polymul([v1 * v1], [-1, w2]), np.polymul([v2 * v2], [-1, w1])))
    assert np.sort(np.roots(poly).real) == pytest.approx(solved.eigenvalues, abs=1e-13)
    dense = eigensolve_dense(sys_)
    assert dense.d_overlaps == pytest.approx(solved.d_overlaps, abs=1e-13)


def test_dense_crosscheck():
    sys_ = discretize(BandModel.constant(0.1), SystemParams(-0.4), 150)
    a, b = eigensolve(sys_), eigensolve_dense(sys_)
    assert np.abs(a.eigenvalues - b.eigenvalues).max() < 1e-12
    assert np.abs(a.d_overlaps - b.d_overlaps).max() < 1e-12


def test_degenerate_nodes():
    sys_ = discretize(BandModel.constant(0.1), SystemParams(0.0), 8)
    nodes = sys_.node_energies.copy()
    nodes[3] = nodes[2]
    with pytest.raises(DegenerateNodes):
        eigensolve(replace(sys_, node_energies=nodes))


def test_evolve_basic(weak):
    m, p = weak
    sys_ = eigensolve(discretize(m, p, 800))
    ts = np.linspace(0, 20, 41)
    s = evolve(sys_, ts)
    assert s.g[0] == pytest.approx(1.0, abs=1e-12)
    back = evolve(sys_, -ts)
    assert np.abs(back.g - np.conj(s.g)).max() < 1e-13
    assert np.all(s.p <= 1 + 1e-12)


def test_revival_warning(weak):
    m, p = weak
    sys_ = eigensolve(discretize(m, p, 100))
    with pytest.warns(RuntimeWarning, match="revival"):
        evolve(sys_, [0.0, 2 * sys_.revival_time()])


def test_refinement_converges(weak):
    m, p = weak
    ts = np.linspace(0, 20, 41)
    ref = survival_amplitude(m, p, ts)
    # the midpoint rule converges algebraically, so each doubling must help
    errs = [np.abs(evolve(eigensolve(discretize(m, p, n, rule="uniform")), ts).g - ref).max()
            for n in (100, 200, 400)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / errs[2] > 10


def test_gauss_nodes_converge_fast(weak):
    m, p = weak
    ts = np.linspace(0, 5, 21)
    ref = survival_amplitude(m, p, ts)
    assert np.abs(oracle_amplitude(m, p, ts, 24) - ref).max() < 1e-12


@pytest.mark.skipif(not NUMBA_ENABLED, reason="numba not available")
def test_kernels_agree():
    sys_ = discretize(BandModel.constant(0.2), SystemParams(-0.4), 600)
    v2 = sys_.couplings ** 2
    lam_j, w_j = secular_solve(sys_.epsilon, sys_.node_energies, v2, use_jit=True)
    lam_n, w_n = secular_solve(sys_.epsilon, sys_.node_energies, v2, use_jit=False)
    assert np.abs(lam_j - lam_n).max() < 1e-14
    assert np.abs(w_j - w_n).max() < 1e-14
    ts = np.linspace(0, 30, 17)
    assert np.abs(spectral_sum(lam_j, w_j, ts, True) - spectral_sum(lam_j, w_j, ts, False)).max() < 1e-13


def test_env_flag_disables_numba():
    env = dict(os.environ, DECAYCUT_DISABLE_NUMBA="1")
    code = "from decaycut._jit import NUMBA_ENABLED; print(NUMBA_ENABLED)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
