import math

import numpy as np
import pytest

from decaycut import BandModel, ModelKind, delta, delta_integral, second_sheet_sigma, sigma_prime, standard_sigma
from decaycut.band_models import sigma_outside_unit, sigma_prime_tanh
from decaycut.errors import NonFinite, OnCut, UnsupportedModel

QTOL = 1e-10
POWER = BandModel.power_law(0.05, 0.5, 1.0)


def test_delta_values():
    assert delta(BandModel.constant(0.2), 0.0) == 0.2
    assert delta(BandModel.chain(0.5), 1.0) == 0.0
    assert delta(BandModel.chain(0.5), -1.0) == 0.0
    assert delta(BandModel.chain(0.5), 0.0) == pytest.approx(0.5 / math.pi, rel=1e-15)


def test_delta_zero_outside():
    for m in (BandModel.constant(0.2), BandModel.chain(0.5), POWER):
        assert np.all(delta(m, np.array([-1.5, -1.0000001, 1.0000001, 3.0])) == 0)


def test_power_law_peak_is_delta0():
    e = np.linspace(-1, 1, 200001)
    assert delta(POWER, e).max() == pytest.approx(0.05, rel=1e-8)


def test_delta_integral_matches_quadrature():
    from scipy.integrate import quad
    for m in (BandModel.constant(0.1, -2, 1), BandModel.chain(0.4), POWER):
        ref = quad(lambda e: delta(m, e), m.e_bottom, m.e_top, epsabs=1e-13)[0]
        assert delta_integral(m) == pytest.approx(ref, abs=1e-10)


def test_model_invariants():
    with pytest.raises(ValueError):
        BandModel.constant(0.1, 1.0, -1.0)
    with pytest.raises(ValueError):
        BandModel.constant(-0.1)
    with pytest.raises(ValueError):
        BandModel(ModelKind.CHAIN, 0.1, beta_bottom=0.5)
    assert BandModel.chain(v=0.5).delta0 == 0.5
    assert BandModel.constant(0).decoupled


def test_sigma_prime_constant_example():
    assert sigma_prime(BandModel.constant(0.02), -0.4) == pytest.approx(0.02 * math.log(0.6 / 1.4), abs=1e-15)


def test_sigma_prime_chain_inside_and_outside():
    m = BandModel.chain(0.3)
    assert sigma_prime(m, 0.5) == pytest.approx(0.15, abs=1e-15)
    assert sigma_prime(m, 2.0) == pytest.approx(0.3 * (2 - math.sqrt(3)), abs=1e-14)
    assert sigma_prime(m, -2.0) == pytest.approx(-0.3 * (2 - math.sqrt(3)), abs=1e-14)


def test_sigma_prime_constant_edge_is_nonfinite():
    with pytest.raises(NonFinite):
        sigma_prime(BandModel.constant(0.1), 1.0)


def test_power_law_flat_limit_matches_constant():
    flat, const = BandModel.power_law(0.1, 0, 0), BandModel.constant(0.1)
    e = np.linspace(-0.98, 0.98, 50)
    diff = np.abs(sigma_prime(flat, e, QTOL) - sigma_prime(const, e))
    assert diff.max() < 10 * QTOL


def test_power_law_half_exponents_match_chain():
    chain = BandModel.chain(0.3)
    pl = BandModel.power_law(0.3 / math.pi, 0.5, 0.5)
    for e in (-0.999, -0.3, 0.0, 0.6, 1.5, -3.0):
        assert sigma_prime(pl, e, 1e-12) == pytest.approx(sigma_prime(chain, e), abs=1e-10)


def test_power_law_edge_limit_is_continuous():
    edge = sigma_outside_unit(POWER, -1, -math.inf)
    near = sigma_prime_tanh(POWER, -25.0)
    assert abs(near - edge) < 1e-12


@pytest.mark.parametrize("model", [BandModel.constant(0.1), BandModel.chain(0.4)])
def test_sigma_prime_odd(model):
    e = np.linspace(0.05, 2.5, 23)
    e = e[np.abs(e - 1) > 1e-3]
    assert np.abs(sigma_prime(model, e) + sigma_prime(model, -e)).max() < 1e-14


@pytest.mark.parametrize("model", [BandModel.constant(0.1, -1, 2), BandModel.chain(0.4), POWER])
def test_boundary_value_imaginary_part(model):
    rng = np.random.default_rng(7)
    for e in rng.uniform(model.e_bottom + 0.01, model.e_top - 0.01, 20):
        s = standard_sigma(model, complex(e, 1e-11), QTOL)
        assert abs(s.imag + math.pi * delta(model, e)) < 10 * QTOL


def test_second_sheet_agrees_in_upper_half_plane():
    rng = np.random.default_rng(3)
    for model in (BandModel.constant(0.05, -1, 3), BandModel.chain(0.5)):
        for _ in range(20):
            w = complex(rng.uniform(-4, 4), rng.uniform(1e-3, 3))
            assert abs(second_sheet_sigma(model, w) - standard_sigma(model, w)) < QTOL


def test_second_sheet_constant_near_axis():
    m = BandModel.constant(0.02)
    s = second_sheet_sigma(m, -0.4 + 0.01j)
    assert abs(s - complex(sigma_prime(m, -0.4), -math.pi * 0.02)) < 0.01


def test_second_sheet_continues_through_band():
    m = BandModel.constant(0.02)
    above = second_sheet_sigma(m, -0.4 + 1e-9j)
    below = second_sheet_sigma(m, -0.4 - 1e-9j)
    assert abs(above - below) < 1e-9
    # the standard sheet jumps instead
    assert abs(standard_sigma(m, -0.4 - 1e-9j) - above) > 0.1


def test_second_sheet_chain_at_origin():
    assert abs(second_sheet_sigma(BandModel.chain(0.5), 0j) - (-0.5j)) < 1e-15


def test_second_sheet_decays_at_infinity():
    m = BandModel.constant(0.02)
    w = 1e6j
    assert abs(second_sheet_sigma(m, w) - 2 * 0.02 / w) < 1e-15


def test_second_sheet_errors():
    with pytest.raises(OnCut):
        second_sheet_sigma(BandModel.constant(0.1), 1.0 - 0.5j)
    with pytest.raises(UnsupportedModel):
        second_sheet_sigma(POWER, 0.1j)
