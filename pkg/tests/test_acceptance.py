"""Acceptance suite: one PASS/FAIL line per criterion in the terminal summary.

Measured values are printed alongside each verdict. A criterion that cannot be
met is left failing; the blocking analysis lives in the decisions ledger.
"""

import hashlib
import itertools
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from finrogue.bs_baseline import BsParams, bs_call_price, bs_pde_residual, put_call_parity_gap
from finrogue.cli import main
from finrogue.dynamics import initial_state, mi_growth_rate, mi_scenario, simulate
from finrogue.model import background_amplitude, make_grid, make_params
from finrogue.rogons import eval_field, peak_statistics, plane_wave, rogon1, rogon2
from finrogue.verify import residual_at, time_shift_check
from oracles import lognormal_call, mi_rate_from_linearisation
from test_cli import GOLDEN, golden_hashes

FIG1 = make_params(0.3, 0.03, 2.0, 0.0)
FIG2 = make_params(0.3, 0.03, 0.8, 0.0)
VERIFY_GRID = make_grid(-60, 60, 4096, -3, 3, 7)


def verdict(label: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    assert ok, detail


def test_c1_peak_identities():
    start = time.perf_counter()
    p1 = peak_statistics(eval_field("rogon1", FIG1, make_grid(-6, 6, 128, -3, 3, 97)))
    p2 = peak_statistics(eval_field("rogon2", FIG2, make_grid(-8, 8, 128, -12, 12, 97)))
    elapsed = time.perf_counter() - start
    ok = (
        abs(p1.max_intensity - 180.0) <= 1e-9 * 180.0
        and abs(p2.max_intensity - 80.0) <= 1e-9 * 80.0
        and (p1.s_at, p1.t_at, p2.s_at, p2.t_at) == (0.0, 0.0, 0.0, 0.0)
        and elapsed < 1.0
    )
    verdict(
        "C1 peak identities",
        ok,
        f"max|psi1|^2={p1.max_intensity!r} at ({p1.s_at:g},{p1.t_at:g}), "
        f"max|psi2|^2={p2.max_intensity!r} at ({p2.s_at:g},{p2.t_at:g}), {elapsed:.3f}s",
    )


def test_c2_pde_certification():
    start = time.perf_counter()
    r1 = residual_at(rogon1, FIG1, VERIFY_GRID, 1e-3).linf
    r2 = residual_at(rogon2, FIG2, VERIFY_GRID, 1e-3).linf
    rp = max(residual_at(plane_wave, p, VERIFY_GRID, 1e-3).linf for p in (FIG1, FIG2))
    elapsed = time.perf_counter() - start
    ok = r1 <= 1e-6 and r2 <= 1e-6 and rp <= 1e-9 and elapsed < 30.0
    verdict("C2 PDE certification", ok, f"rogon1 {r1:.2e}, rogon2 {r2:.2e}, plane {rp:.2e}, {elapsed:.2f}s")


def test_c3_time_shift_family():
    worst = max(
        time_shift_check(fn, p, VERIFY_GRID, t0).linf
        for (fn, p), t0 in itertools.product([(rogon1, FIG1), (rogon2, FIG2)], [-2.5, 1.7])
    )
    verdict("C3 time-shift family", worst <= 1e-6, f"max linf over t0 in {{-2.5, 1.7}} = {worst:.2e}")


def test_c4_modulus_identities():
    s, t = np.meshgrid(np.linspace(-5, 5, 101), np.linspace(-3, 3, 101))
    boosted = make_params(0.3, 0.03, 2.0, -1.5)
    worst = 0.0
    for fn in (rogon1, rogon2):
        centre = boosted.sigma * boosted.k * t
        worst = max(
            worst,
            float(np.max(np.abs(np.abs(fn(boosted, s, t)) - np.abs(fn(FIG1, s - centre, t))))),
            float(np.max(np.abs(np.abs(fn(boosted, centre + s, t)) - np.abs(fn(boosted, centre - s, t))))),
            float(np.max(np.abs(np.abs(fn(FIG1, s, t)) - np.abs(fn(FIG1, s, -t))))),
        )
    verdict("C4 boost / comoving / t-evenness", worst <= 1e-12, f"max modulus deviation {worst:.2e}")


@pytest.fixture(scope="module")
def fig1_run():
    start = time.perf_counter()
    rep = simulate(initial_state(rogon1, FIG1, 120.0, 4096, -3.0), 3.0, 1e-3, reference=rogon1)
    return rep, time.perf_counter() - start


def test_c5a_final_error(fig1_run):
    rep, elapsed = fig1_run
    err = rep.error_linf_vs_analytic[-1]
    verdict(
        "C5a propagator final error (L=120)",
        err <= 1e-4 and elapsed < 300.0,
        f"final linf {err:.2e} (bound 1e-4), wrap slope mismatch {rep.boundary_slope_mismatch:.1e}, {elapsed:.1f}s",
    )


def test_c5b_mass_drift(fig1_run):
    rep, _ = fig1_run
    verdict("C5b mass drift", rep.mass_drift() <= 1e-12, f"relative {rep.mass_drift():.2e}")


def test_c5c_hamiltonian_drift(fig1_run):
    rep, _ = fig1_run
    verdict("C5c Hamiltonian drift", rep.hamiltonian_drift() <= 1e-6, f"relative {rep.hamiltonian_drift():.2e}")


def test_c5d_second_order():
    # Halving is measured above the floor set by the periodic wrap (see C5a).
    errs = []
    for dt in (8e-3, 4e-3):
        rep = simulate(initial_state(rogon1, FIG1, 120.0, 4096, -3.0), 3.0, dt, reference=rogon1)
        errs.append(rep.error_linf_vs_analytic[-1])
    ratio = errs[0] / errs[1]
    verdict(
        "C5d halving dt",
        3.2 <= ratio <= 4.8,
        f"dt 8e-3 -> 4e-3: {errs[0]:.2e} -> {errs[1]:.2e}, ratio {ratio:.3f}",
    )


def test_c6_reversibility():
    start = initial_state(rogon1, FIG1, 120.0, 4096, -3.0)
    fwd = simulate(start, 0.0, 1e-3)
    back = simulate(fwd.final_state, -3.0, -1e-3)
    err = float(np.max(np.abs(back.final_state.samples - start.samples)))
    verdict("C6 reversibility", err <= 1e-8, f"linf {err:.2e} after t=-3 -> 0 -> -3")


def test_c7_modulation_instability():
    target = FIG1.sigma * FIG1.alpha**2 / 2
    amp = background_amplitude(FIG1)
    oracle_ok = all(
        abs(mi_growth_rate(FIG1, k) - mi_rate_from_linearisation(FIG1.sigma, FIG1.beta, amp, k)) <= 1e-12
        for k in np.linspace(0.0, 4.0, 81)
    ) and abs(mi_growth_rate(FIG1, FIG1.alpha) - target) <= 1e-15
    peak = mi_scenario(FIG1, math.pi, 64, 1e-6, 1, 20.0, 1e-3)
    stable = mi_scenario(FIG1, math.pi, 64, 1e-6, 2, 40.0, 1e-3)
    ok = (
        oracle_ok
        and abs(peak.growth_rate - target) <= 0.1 * target
        and stable.kappa**2 > 2 * FIG1.alpha**2
        and abs(stable.growth_rate) <= 0.05 * target
    )
    verdict(
        "C7 modulation instability",
        ok,
        f"kappa=alpha fit {peak.growth_rate:.5f} vs {target:.5f}; "
        f"kappa={stable.kappa:g} above cutoff fit {stable.growth_rate:.2e}; oracle re-derivation {oracle_ok}",
    )


def test_c8_black_scholes():
    lattice = itertools.product([60.0, 85.0, 100.0, 115.0, 140.0], [70.0, 90.0, 100.0, 110.0, 130.0], [0.25, 1.0, 3.0])
    worst = max(
        abs(bs_call_price(s, BsParams(0.05, 0.2, k, tau)) - lognormal_call(s, k, 0.05, 0.2, tau))
        for s, k, tau in lattice
    )
    atm = BsParams(0.05, 0.2, 100.0, 1.0)
    spots = np.linspace(50, 150, 101).tolist()
    parity = max(put_call_parity_gap(s, atm) for s in spots)
    residual = bs_pde_residual(bs_call_price, spots, atm, bump=1e-3)
    ok = worst <= 1e-8 and parity <= 1e-12 and residual <= 1e-6
    verdict(
        "C8 Black-Scholes baseline",
        ok,
        f"oracle gap {worst:.2e}, parity gap {parity:.2e}, PDE residual {residual:.2e}",
    )


def test_c9_golden_files(tmp_path):
    expected = golden_hashes()
    mismatches = []
    for name in ("fig1a", "fig1c", "fig2a"):
        digests = set()
        for run, workers in (("a", 1), ("b", 1), ("c", 4)):
            out = tmp_path / f"{name}-{run}"
            assert main(["eval", "--config", str(GOLDEN / f"{name}.cfg"), "--output", str(out),
                         "--set", f"run.workers={workers}"]) == 0
            digests.add(tuple(hashlib.sha256((out / f).read_bytes()).hexdigest() for f in ("field.csv", "field.pgm")))
        if digests != {(expected[f"{name}.csv"], expected[f"{name}.pgm"])}:
            mismatches.append(name)
    verdict("C9 golden files", not mismatches, "byte-identical across runs and workers" if not mismatches else f"mismatch: {mismatches}")
