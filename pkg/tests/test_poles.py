import math

import pytest

from decaycut import (
    BandModel,
    SystemParams,
    bound_state_overlap,
    count_strip_zeros,
    find_real_poles,
    find_resonance_pole,
    find_resonance_poles,
    second_sheet_sigma,
    sigma_prime,
)
from decaycut.errors import NoConvergence, UnsupportedModel
from decaycut.poles import ABOVE, BELOW


def locator_residual(model, params, e):
    return abs(e - params.epsilon - sigma_prime(model, e))


def test_constant_strong_two_poles(strong):
    m, p = strong
    lo, hi = find_real_poles(m, p)
    assert lo.side == BELOW and hi.side == ABOVE
    assert lo.energy == pytest.approx(-1.0719785, abs=1e-6)
    assert lo.weight == pytest.approx(0.27159, abs=1e-4)
    assert hi.energy == pytest.approx(1.0018090, abs=1e-6)
    assert hi.weight == pytest.approx(0.0089718, abs=1e-6)
    for pole in (lo, hi):
        assert locator_residual(m, p, pole.energy) < 1e-9
        assert not pole.near_edge


@pytest.mark.parametrize("d0", [0.02, 0.1, 0.2])
def test_constant_always_two_poles(d0):
    m, p = BandModel.constant(d0), SystemParams(-0.4)
    poles = find_real_poles(m, p)
    assert len(poles) == 2
    assert sum(q.weight for q in poles) <= 1
    for q in poles:
        assert 0 < q.weight <= 1
        assert abs(bound_state_overlap(m, p, q) - q.weight) < 10 * p.quad_tol


def test_weak_upper_pole_hugs_edge(weak):
    m, p = weak
    hi = find_real_poles(m, p)[1]
    assert hi.near_edge
    assert hi.edge_offset < 1e-20
    assert 0 < hi.weight < 1e-20


@pytest.mark.parametrize("d0", [0.1, 0.5, 0.99])
def test_chain_no_poles_at_centre(d0):
    assert find_real_poles(BandModel.chain(d0), SystemParams(0.0)) == []


def test_chain_strong_coupling_poles():
    m, p = BandModel.chain(1.5), SystemParams(0.0)
    poles = find_real_poles(m, p)
    assert [q.energy for q in poles] == pytest.approx([-1.5 / math.sqrt(2), 1.5 / math.sqrt(2)], abs=1e-12)
    assert [q.weight for q in poles] == pytest.approx([0.25, 0.25], abs=1e-12)
    for q in poles:
        assert abs(bound_state_overlap(m, p, q) - q.weight) < 10 * p.quad_tol


def test_chain_single_pole():
    m, p = BandModel.chain(0.5), SystemParams(0.8)
    poles = find_real_poles(m, p)
    assert len(poles) == 1 and poles[0].side == ABOVE
    assert locator_residual(m, p, poles[0].energy) < 1e-9


def test_power_law_overlap_matches_weight():
    m, p = BandModel.power_law(0.3, 0.5, 1.0, -1.0, 2.0), SystemParams(-0.2)
    poles = find_real_poles(m, p)
    assert poles
    for q in poles:
        assert abs(bound_state_overlap(m, p, q) - q.weight) < 10 * p.quad_tol


def test_decoupled_level():
    assert find_real_poles(BandModel.constant(0.0), SystemParams(0.3)) == []
    (q,) = find_real_poles(BandModel.constant(0.0), SystemParams(1.7))
    assert q.energy == 1.7 and q.weight == 1.0


def test_overlap_tends_to_one_when_decoupling():
    m, p = BandModel.constant(1e-6), SystemParams(1.5)
    q = [q for q in find_real_poles(m, p) if q.side == ABOVE][0]
    assert bound_state_overlap(m, p, q) == pytest.approx(1.0, abs=1e-5)


def test_resonance_pole_weak(weak):
    m, p = weak
    r = find_resonance_pole(m, p)
    seed = -0.4 + sigma_prime(m, -0.4) - 1j * math.pi * 0.02
    assert abs(r.omega - seed) < 0.01
    assert r.omega.imag < 0
    assert abs(r.omega - p.epsilon - second_sheet_sigma(m, r.omega)) < 1e-10


def test_resonance_rate_perturbative():
    # rate tends to the golden rule as the coupling goes to zero
    errs = []
    for d0 in (0.02, 0.005, 0.001):
        m, p = BandModel.constant(d0), SystemParams(-0.4)
        errs.append(abs(-2 * find_resonance_pole(m, p).omega.imag / (2 * math.pi * d0) - 1))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.01


def test_resonance_decoupling_limit():
    m, p = BandModel.constant(1e-7), SystemParams(-0.4)
    assert abs(find_resonance_pole(m, p).omega - (-0.4)) < 1e-6


@pytest.mark.parametrize("d0", [0.02, 0.1, 0.2])
def test_strip_contains_one_resonance(d0):
    m, p = BandModel.constant(d0), SystemParams(-0.4)
    assert count_strip_zeros(m, p) == 1
    (r,) = find_resonance_poles(m, p)
    assert r.omega.imag < 0


def test_resonance_unsupported():
    with pytest.raises(UnsupportedModel):
        find_resonance_pole(BandModel.power_law(0.1, 0.5, 0.5), SystemParams(0.0))
    with pytest.raises(NoConvergence):
        find_resonance_pole(BandModel.constant(0.1), SystemParams(2.0))
