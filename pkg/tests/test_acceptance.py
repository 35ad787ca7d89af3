"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line (also repeated in the terminal summary)
and then asserts, so a failing criterion shows up as a failing test.
"""
import json
import time

import numpy as np

from conftest import record
from sphall import cli, experiments, specfun


def _worst(report):
    return max(c["value"] for c in report["criteria"])


def test_criterion_01_functional_equation():
    t0 = time.perf_counter()
    rep = experiments.functional_equation_grid(1e-9)
    secs = time.perf_counter() - t0
    fe = next(c for c in rep["criteria"] if c["name"] == "zeta_star_functional_equation")
    ok = fe["value"] < 1e-9 and secs < 5
    assert record(1, "zeta* functional equation", ok,
                  f"max rel dev {fe['value']:.2e} over {len(experiments.FE_GRID)} points (< 1e-9), {secs:.2f} s (< 5 s)")


def test_criterion_02_riemann_formula_stated_residues():
    # residue terms taken literally as +-1/sqrt(pi)
    t0 = time.perf_counter()
    rep = experiments.riemann_formula(1e-6)
    secs = time.perf_counter() - t0
    fwd = next(c for c in rep["criteria"] if c["name"] == "forward_vs_zeta_star")["value"]
    inv = rep["sqrt_pi_residue_deviation"]
    ok = fwd < 1e-6 and inv < 1e-6 and secs < 30
    assert record(2, "Riemann formula, residues +-1/sqrt(pi)", ok,
                  f"forward dev {fwd:.2e}, inverse dev {inv:.2e} (< 1e-6), {secs:.1f} s (< 30 s)")


def test_criterion_02_riemann_formula_exact_residues():
    # companion check: residues +1 at s = 1 and -1 at s = 0
    rep = experiments.riemann_formula(1e-6)
    fwd = next(c for c in rep["criteria"] if c["name"] == "forward_vs_zeta_star")["value"]
    inv = next(c for c in rep["criteria"] if c["name"] == "inverse_all_strips_exact_residues")["value"]
    ok = fwd < 1e-6 and inv < 1e-6
    assert record(2, "Riemann formula, residues +-1", ok,
                  f"forward dev {fwd:.2e}, inverse dev {inv:.2e} (< 1e-6)")


def test_criterion_03_zeta_zeros(tmp_path):
    out = tmp_path / "zeros.json"
    code = cli.main(["zeros", "--range", "0", "30", "--out", str(out)])
    rep = json.loads(out.read_text())
    ords = rep["outputs"]["ordinates"]
    half = rep["outputs"]["half_step_ordinates"]
    agree = max(abs(a - b) for a, b in zip(ords, half))
    on_line = float(np.max(np.abs(specfun.zeta_star_array(0.5 + 1j * np.array(ords)))))
    ok = code == 0 and len(ords) == 3 and len(half) == 3 and agree < 1e-6 and on_line < 1e-6
    assert record(3, "zeta zeros in [0, 30]", ok,
                  f"{len(ords)} zeros, half-step agreement {agree:.1e}, max |zeta*| {on_line:.1e} (< 1e-6)")


def test_criterion_04_eisenstein_constant_term():
    t0 = time.perf_counter()
    rows = [experiments.eisenstein_constant_term(y) for y in (0.7, 1.3, 2.0)]
    secs = time.perf_counter() - t0
    dev = max(r["deviation"] for r in rows)
    ok = dev < 1e-6 and secs < 60
    assert record(4, "Eisenstein constant term", ok, f"max dev {dev:.2e} (< 1e-6), {secs:.1f} s (< 60 s)")


def test_criterion_05_hall_eisenstein_bridge():
    rep = experiments.hall_eisenstein_bridge(1e-8, (complex(0, 1), complex(0.3, 1.1)), (2.5, 3.0))
    dev = _worst(rep)
    assert record(5, "Hall product vs Eisenstein series", dev < 1e-8, f"max rel dev {dev:.2e} (< 1e-8)")


def test_criterion_06_ch_homomorphism():
    t0 = time.perf_counter()
    rep = experiments.ch_homomorphism(1e-4)
    secs = time.perf_counter() - t0
    dev = rep["max_relative_deviation"]
    ok = dev < 1e-4 and secs < 300
    assert record(6, "lattice Mellin of Hall product vs shuffle", ok,
                  f"max rel dev {dev:.2e} (< 1e-4), {secs:.0f} s (< 300 s)")


def test_criterion_07_quadratic_relations():
    rep = experiments.quadratic_relations(1e-8)
    dev = _worst(rep)
    assert len(experiments.QUAD_GRID) == 25
    assert record(7, "quadratic relations", dev < 1e-8, f"max |mult2| {dev:.2e} (< 1e-8)")


def test_criterion_08_shuffle_axioms():
    rep = experiments.shuffle_axioms(seed=0, trials=20, tol=1e-8)
    dev = _worst(rep)
    assert record(8, "shuffle associativity and homomorphism", dev < 1e-8,
                  f"max rel dev {dev:.2e} (< 1e-8) over 20 trials")


def test_criterion_09_wheel_free_cohomology():
    t0 = time.perf_counter()
    rep = experiments.wheel_free_statistics(seed=0, count=200)
    secs = time.perf_counter() - t0
    bad = len(rep["failures"])
    euler = next(c for c in rep["criteria"] if c["name"] == "euler_mismatches")["value"]
    ok = bad == 0 and euler == 0 and secs < 120
    assert record(9, "wheel-free matrices give a point", ok,
                  f"{200 - bad}/200 with dims (1,0,...), {int(euler)} Euler mismatches, {secs:.1f} s (< 120 s)")


def test_criterion_10_cubic_relation_localization():
    rep = experiments.wheel_scan(0, (0, complex(1, 1)), (0.1, -0.1))
    rows = rep["rows"]
    wheel = [r["dims"] for r in rows if r["kind"] == "wheel"]
    pert = [r["dims"] for r in rows if r["kind"] == "perturbed"]
    gap = min(g for r in rows for g in r["gaps"])
    ok = (len(wheel) == 2 and all(d == (3, 3, 1) for d in wheel)
          and len(pert) == 12 and all(d == (1, 0, 0) for d in pert) and gap > 1e4)
    assert record(10, "wheel localization at the first zero", ok,
                  f"wheel dims {sorted(set(wheel))}, perturbed dims {sorted(set(pert))}, min rank gap {gap:.1e} (> 1e4)")
