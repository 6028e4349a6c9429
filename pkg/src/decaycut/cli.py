"""Command-line front end.

A run is described by a flat ``key = value`` file (``--config``) whose
entries are overridden by command-line flags. Keys and defaults::

    mode        series     series | poles | spectral | tail | short-time |
                           compare-oracle | chain-crosscheck
    model       constant   constant | chain | power_law
    delta0      0.02
    epsilon     -0.4
    e_bottom    -1         band edges
    e_top       1
    beta_bottom 0.5        edge exponents (power_law only)
    beta_top    0.5
    tmin        0
    tmax        15
    tcount      301
    time_units  tau        natural | tau (tau = 1 / (2 pi Delta(eps)))
    oracle_n    4000
    tol         1e-10      absolute quadrature tolerance
    root_tol    1e-12
    check_tol   mode default; 1e-4 for compare-oracle, 1e-8 for chain-crosscheck
    ngrid       401        energy points for mode=spectral
    out         (stdout)   CSV destination

CSV goes to ``out`` (standard output when unset); the human-readable report
goes to standard output unless the CSV already occupies it, in which case it
goes to standard error. ``poles`` writes a CSV only when ``out`` is set.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 validation failure.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import amplitude, oracle, poles
from .band_models import BandModel, ModelKind, SystemParams
from .errors import DecayCutError, DecoupledLevel, DegenerateInput, UnsupportedModel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4

MODES = ("series", "poles", "spectral", "tail", "short-time", "compare-oracle", "chain-crosscheck")
FMT = "%.16e"
# modes whose main product is a CSV table
CSV_MODES = ("series", "spectral", "compare-oracle", "chain-crosscheck")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "series"
    model: str = "constant"
    delta0: float = 0.02
    epsilon: float = -0.4
    e_bottom: float = -1.0
    e_top: float = 1.0
    beta_bottom: float = 0.5
    beta_top: float = 0.5
    tmin: float = 0.0
    tmax: float = 15.0
    tcount: int = 301
    time_units: str = "tau"
    oracle_n: int = 4000
    tol: float = 1e-10
    root_tol: float = 1e-12
    check_tol: float = math.nan
    ngrid: int = 401
    out: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.model not in {k.value for k in ModelKind}:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.time_units not in ("natural", "tau"):
            raise ConfigError("time_units must be natural or tau")
        if self.tmin < 0 or self.tcount < 1 or self.tmax < self.tmin:
            raise ConfigError("need 0 <= tmin <= tmax and tcount >= 1")
        if self.mode == "compare-oracle" and self.oracle_n < 16:
            raise ConfigError("oracle_n must be at least 16")
        if not (self.tol > 0 and self.root_tol > 0):
            raise ConfigError("tolerances must be positive")
        if self.ngrid < 2:
            raise ConfigError("ngrid must be at least 2")

    def band_model(self) -> BandModel:
        try:
            if self.model == "constant":
                return BandModel.constant(self.delta0, self.e_bottom, self.e_top)
            if self.model == "chain":
                return BandModel.chain(self.delta0, e_bottom=self.e_bottom, e_top=self.e_top)
            return BandModel.power_law(self.delta0, self.beta_bottom, self.beta_top, self.e_bottom, self.e_top)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def params(self) -> SystemParams:
        return SystemParams(self.epsilon, self.tol, self.root_tol)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, raw):
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return str(raw)


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = _coerce(key, val)
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="decaycut", description="Survival of a level coupled to a finite band.")
    p.add_argument("--config")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--model", choices=[k.value for k in ModelKind])
    p.add_argument("--delta0", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--e-bottom", type=float)
    p.add_argument("--e-top", type=float)
    p.add_argument("--beta-bottom", type=float)
    p.add_argument("--beta-top", type=float)
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--tcount", type=int)
    p.add_argument("--time-units", choices=("natural", "tau"))
    p.add_argument("--oracle-n", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--root-tol", type=float)
    p.add_argument("--check-tol", type=float)
    p.add_argument("--ngrid", type=int)
    p.add_argument("--out")
    return p


def make_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = read_config(args.config) if args.config else {}
    for key, val in vars(args).items():
        if key != "config" and val is not None:
            values[key] = val
    return RunConfig(**values)


# --------------------------------------------------------------------------
# modes

class _Run:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.model = cfg.band_model()
        self.params = cfg.params()
        csv_on_stdout = cfg.mode in CSV_MODES and not cfg.out
        self.report_stream = sys.stderr if csv_on_stdout else sys.stdout

    def report(self, msg):
        print(msg, file=self.report_stream)

    def tau(self):
        try:
            return amplitude.fgr_time(self.model, self.params)
        except DecoupledLevel:
            return math.nan

    def times(self):
        """Natural-unit grid plus the scale used for the time column."""
        c = self.cfg
        scale = 1.0
        if c.time_units == "tau":
            scale = self.tau()
            if not math.isfinite(scale):
                raise ConfigError("time_units = tau needs Delta(eps) > 0")
        grid = np.linspace(c.tmin, c.tmax, c.tcount) if c.tcount > 1 else np.array([c.tmin])
        return grid * scale, scale

    def write_csv(self, header, columns):
        data = np.column_stack([np.asarray(col, dtype=float) for col in columns])
        if self.cfg.out:
            np.savetxt(self.cfg.out, data, fmt=FMT, delimiter=",", header=",".join(header), comments="")
        else:
            np.savetxt(sys.stdout, data, fmt=FMT, delimiter=",", header=",".join(header), comments="")

    # each mode returns an exit status

    def series(self):
        ts, scale = self.times()
        s = amplitude.survival_series(self.model, self.params, ts)
        self.write_csv(["t", "re_g", "im_g", "p", "p_fgr"], [ts / scale, s.g.real, s.g.imag, s.p, s.p_fgr])
        self.report(f"series: {ts.size} points, time unit {self.cfg.time_units}, tau = {s.tau:.10g}")
        return EXIT_OK

    def poles(self):
        real = poles.find_real_poles(self.model, self.params)
        self.report(f"{'energy':>24} {'weight':>24} {'side':>11} {'residual':>10} {'overlap':>24} near_edge")
        rows = []
        for p in real:
            ov = poles.bound_state_overlap(self.model, self.params, p)
            self.report(f"{p.energy:24.16e} {p.weight:24.16e} {p.side:>11} {p.residual:10.2e} {ov:24.16e} {p.near_edge}")
            rows.append((p.energy, p.weight, p.residual, ov))
        if not real:
            self.report("no real poles")
        if self.model.has_second_sheet and not self.model.decoupled:
            for r in poles.find_resonance_poles(self.model, self.params):
                self.report(f"resonance: omega = {r.omega.real:.16e} {r.omega.imag:+.16e}i, "
                            f"residue = {r.residue.real:.10e} {r.residue.imag:+.10e}i")
        if self.cfg.out:
            cols = list(zip(*rows)) if rows else [[], [], [], []]
            self.write_csv(["energy", "weight", "residual", "overlap"], cols)
        return EXIT_OK

    def spectral(self):
        sd = amplitude.spectral_density(self.model, self.params)
        x = np.cos(np.linspace(math.pi, 0.0, self.cfg.ngrid + 2)[1:-1])
        w = self.model.from_unit(x)
        a = sd.continuum(w)
        e_disc = [e for e, _ in sd.discrete]
        w_disc = [v for _, v in sd.discrete]
        kind = np.concatenate([np.zeros(w.size), np.ones(len(e_disc))])
        self.write_csv(["omega", "value", "discrete"], [np.concatenate([w, e_disc]), np.concatenate([a, w_disc]), kind])
        self.report(f"continuum weight {sd.continuum_weight:.16e}")
        for e, v in sd.discrete:
            self.report(f"delta at {e:.16e} weight {v:.16e}")
        self.report(f"total weight {sd.total_weight:.16e}")
        return EXIT_OK

    def tail(self):
        ts, scale = self.times()
        lo, hi = ts[0], ts[-1]
        if not 0 < lo < hi:
            raise ConfigError("tail mode needs 0 < tmin < tmax")
        fit = amplitude.tail_exponent(self.model, self.params, (lo, hi), n=max(self.cfg.tcount, 3),
                                      method="envelope" if self.model.has_second_sheet else "modulus")
        beta = self.model.edge_exponent("bottom")
        self.report(f"tail slope {fit.slope:.10f} (edge exponent {beta:g} predicts {-(beta + 1):g}), "
                    f"intercept {fit.intercept:.10f}, rms {fit.residual_rms:.3e}")
        return EXIT_OK

    def short_time(self):
        f = amplitude.short_time_fit(self.model, self.params)
        rel = abs(f.coefficient - f.expected) / f.expected if f.expected else abs(f.coefficient)
        self.report(f"1 - p = c t^2 with c = {f.coefficient:.12e}; int Delta dE = {f.expected:.12e}; "
                    f"relative difference {rel:.3e}; fit residual {f.relative_residual:.3e}")
        return EXIT_OK

    def compare_oracle(self):
        ts, scale = self.times()
        tol = self.cfg.check_tol if math.isfinite(self.cfg.check_tol) else 1e-4
        g = np.atleast_1d(amplitude.survival_amplitude(self.model, self.params, ts))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            go = oracle.oracle_amplitude(self.model, self.params, ts, n=self.cfg.oracle_n)
        for w in caught:
            self.report(f"warning: {w.message}")
        err = np.abs(g - go)
        self.write_csv(["t", "abs_dg"], [ts / scale, err])
        ok = bool(err.max() < tol)
        self.report(f"compare-oracle: max |g - g_oracle| = {err.max():.3e} (tol {tol:g}) {'PASS' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_VALIDATION

    def chain_crosscheck(self):
        if self.model.kind is not ModelKind.CHAIN or self.cfg.epsilon != 0:
            raise ConfigError("chain-crosscheck needs model = chain and epsilon = 0")
        if self.cfg.e_bottom != -1 or self.cfg.e_top != 1:
            raise ConfigError("chain-crosscheck needs the unit band")
        ts, scale = self.times()
        tol = self.cfg.check_tol if math.isfinite(self.cfg.check_tol) else 1e-8
        closed = np.atleast_1d(amplitude.chain_closed_form(self.model.delta0, ts))
        band = np.atleast_1d(amplitude.survival_amplitude(self.model, self.params, ts))
        err = np.abs(closed - band)
        self.write_csv(["t", "re_closed", "im_closed", "re_band", "im_band", "abs_diff"],
                       [ts / scale, closed.real, closed.imag, band.real, band.imag, err])
        ok = bool(err.max() < tol)
        self.report(f"chain-crosscheck: max difference {err.max():.3e} (tol {tol:g}) {'PASS' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_VALIDATION


def run(cfg: RunConfig) -> int:
    runner = _Run(cfg)
    return getattr(runner, cfg.mode.replace("-", "_"))()


def main(argv=None) -> int:
    try:
        cfg = make_config(argv)
        return run(cfg)
    except (ConfigError, DegenerateInput, UnsupportedModel) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DecayCutError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
