"""Acceptance criteria A1-A10.

Each criterion is a function returning ``(passed, detail)``. Under pytest every
criterion prints one ``A<n> PASS|FAIL`` line to the terminal; run the file
directly to get the same lines without pytest.
"""
import time

import numpy as np
import pytest

from decaycut import (
    BandModel,
    SystemParams,
    chain_closed_form,
    fgr_time,
    find_real_poles,
    find_resonance_pole,
    oracle_amplitude,
    second_sheet_amplitude,
    short_time_fit,
    sigma_prime,
    spectral_density,
    survival_amplitude,
    survival_series,
    tail_exponent,
)

EPS = SystemParams(-0.4)
CENTRE = SystemParams(0.0)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def a1_sum_rule():
    parts, ok = [], True
    for d0 in (0.02, 0.1, 0.2):
        sd, dt = _timed(lambda: spectral_density(BandModel.constant(d0), EPS))
        err = abs(sd.total_weight - 1)
        ok &= err < 1e-6 and dt < 1.0
        parts.append(f"d0={d0}: |sum-1|={err:.1e} in {dt:.2f}s")
    return ok, "; ".join(parts)


def _fgr_deviation(d0, t_lo, t_hi, n=400):
    m = BandModel.constant(d0)
    tau = fgr_time(m, EPS)
    s = survival_series(m, EPS, np.linspace(t_lo * tau, t_hi * tau, n))
    return s.times / tau, np.abs(s.p - s.p_fgr) / s.p_fgr


def a2_fgr_window():
    (t, dev), dt = _timed(lambda: _fgr_deviation(0.02, 0.5, 9.0))
    d5 = dev[t <= 5.0].max()
    d9 = dev.max()
    ok = d5 < 0.10 and d9 < 0.30 and dt < 10
    return ok, f"max dev on [0.5,5]tau = {d5:.3f} (<0.10), on [0.5,9]tau = {d9:.3f} (<0.30), {dt:.2f}s"


def a3_fgr_breakdown():
    _, dev = _fgr_deviation(0.2, 0.0, 2.0)
    m = BandModel.constant(0.2)
    lo, hi = find_real_poles(m, EPS)
    target = lo.weight ** 2 + hi.weight ** 2
    ts = np.linspace(100, 200, 2001)
    mean = np.mean(np.abs(survival_amplitude(m, EPS, ts)) ** 2)
    rel = abs(mean - target) / target
    ok = dev.max() > 0.30 and rel < 0.02
    return ok, f"max dev on [0,2]tau = {dev.max():.3f} (>0.30); <p> = {mean:.5f} vs w1^2+w2^2 = {target:.5f}, rel {rel:.1e} (<0.02)"


def a4_quadratic_onset():
    m = BandModel.constant(0.02)
    fit = short_time_fit(m, EPS, t_max=0.1)
    rel = abs(fit.coefficient - 0.04) / 0.04
    ok = fit.relative_residual < 0.01 and rel < 0.02
    return ok, f"c = {fit.coefficient:.6f} vs 2*d0 = 0.04 (rel {rel:.1e} < 0.02), fit residual {fit.relative_residual:.1e} (<0.01)"


def a5_power_law_tails():
    t0 = time.perf_counter()
    const = tail_exponent(BandModel.constant(0.005), EPS, (100, 400))
    chain = tail_exponent(BandModel.chain(0.5), CENTRE, (50, 200))
    dt = time.perf_counter() - t0
    ok = abs(const.slope + 1) < 0.05 and abs(chain.slope + 1.5) < 0.08 and dt < 60
    return ok, (f"constant d0=0.005 eps=-0.4 slope {const.slope:.4f} (-1 +- 0.05); "
                f"chain d0=0.5 eps=0 slope {chain.slope:.4f} (-1.5 +- 0.08); {dt:.2f}s")


def a6_contour_identity():
    m = BandModel.constant(0.02)
    ts = np.array([5.0, 20.0, 80.0])
    t0 = time.perf_counter()
    diff = np.abs(survival_amplitude(m, EPS, ts) - second_sheet_amplitude(m, EPS, ts))
    dt = time.perf_counter() - t0
    ok = diff.max() < 1e-6 and dt < 5
    return ok, f"max |g_axis - g_sheet| = {diff.max():.1e} (<1e-6), {dt:.2f}s"


def a7_oracle():
    ts = np.linspace(0, 50, 501)
    cases = [(BandModel.constant(d0), EPS, f"const {d0}") for d0 in (0.02, 0.1, 0.2)]
    cases.append((BandModel.chain(0.5), CENTRE, "chain 0.5"))
    t0 = time.perf_counter()
    errs = []
    for m, p, label in cases:
        errs.append((label, np.abs(survival_amplitude(m, p, ts) - oracle_amplitude(m, p, ts, 4000)).max()))
    dt = time.perf_counter() - t0
    ok = all(e < 1e-4 for _, e in errs) and dt < 120
    return ok, ", ".join(f"{lab}: {e:.1e}" for lab, e in errs) + f" (<1e-4), {dt:.1f}s"


def a8_chain_closed_form():
    ts = np.array([0.0, 1.0, 10.0, 40.0])
    diff = np.abs(chain_closed_form(0.5, ts) - survival_amplitude(BandModel.chain(0.5), CENTRE, ts))
    return diff.max() < 1e-8, f"max difference {diff.max():.1e} (<1e-8)"


def a9_no_pole_case():
    m = BandModel.chain(0.5)
    poles = find_real_poles(m, CENTRE)
    p400 = abs(survival_amplitude(m, CENTRE, 400.0)) ** 2
    return (poles == [] and p400 < 1e-3), f"real poles: {len(poles)}, p(400) = {p400:.2e} (<1e-3)"


def a10_resonance_pole():
    m = BandModel.constant(0.02)
    r = find_resonance_pole(m, EPS)
    rate = 1 / fgr_time(m, EPS)
    rel = abs(-2 * r.omega.imag - rate) / rate
    shift = abs(r.omega.real - (EPS.epsilon + sigma_prime(m, EPS.epsilon)))
    ok = rel < 0.05 and shift < 0.01
    return ok, f"omega* = {r.omega:.6f}; rate rel error {rel:.4f} (<0.05), |Re shift| {shift:.1e} (<0.01)"


CRITERIA = [
    ("A1", "sum rule", a1_sum_rule),
    ("A2", "golden-rule window", a2_fgr_window),
    ("A3", "golden-rule breakdown", a3_fgr_breakdown),
    ("A4", "quadratic onset", a4_quadratic_onset),
    ("A5", "power-law tails", a5_power_law_tails),
    ("A6", "contour identity", a6_contour_identity),
    ("A7", "oracle equivalence", a7_oracle),
    ("A8", "chain closed form", a8_chain_closed_form),
    ("A9", "no-pole case", a9_no_pole_case),
    ("A10", "resonance pole", a10_resonance_pole),
]


def line(tag, name, ok, detail):
    return f"{tag} {'PASS' if ok else 'FAIL'} {name}: {detail}"


@pytest.mark.parametrize("tag,name,fn", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(tag, name, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + line(tag, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for tag, name, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(line(tag, name, ok, detail), flush=True)
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria pass")
    raise SystemExit(1 if failed else 0)
