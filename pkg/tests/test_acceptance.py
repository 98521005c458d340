"""
Acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the
measured worst error; the lines are also collected and repeated in the
pytest terminal summary. Expected values are evaluated here from their
formulas, independently of the package's own closed-form helpers.
"""

import math
import time

import numpy as np
import pytest

from qsensornet import fixtures, oracle
from qsensornet import scenarios as sc
from qsensornet.quantum import outcome_probabilities
from qsensornet.strategies import cluster as cl
from qsensornet.strategies import cluster_unambiguous_povm, unambiguous_product

GRID = sc.theta_grid(181)
INTERIOR = GRID[1:]
LINES: list[str] = []


def record(number: int, ok: bool, text: str) -> None:
    line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {text}"
    LINES.append(line)
    print(line)


def test_criterion_1_two_detector_minimum_error():
    start = time.perf_counter()
    worst = 0.0
    for p0, p1 in ((0.5, 0.5), (0.25, 0.75)):
        for theta in GRID:
            expected = (0.5 * (1 + abs(p1 * np.exp(2j * theta) - p0))) ** 2
            got = sc.two_det_min_err(theta, p0, p1).numeric["ps2"]
            worst = max(worst, abs(got - expected))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 1.0
    record(1, ok, f"max |ps2 - formula| = {worst:.2e} (tol 1e-9), {elapsed:.2f}s (limit 1s)")
    assert ok


def test_criterion_2_unambiguous_n_detectors():
    worst_pf, worst_cross = 0.0, 0.0
    for n in (1, 2, 3):
        for theta in INTERIOR:
            construction = unambiguous_product(n, theta)
            ens = construction.hypotheses()
            expected = 1 - math.sin(theta) ** (2 * n) / (1 + math.cos(theta)) ** n
            worst_pf = max(worst_pf, abs(construction.failure_probability() - expected))
            for h in ens:
                probs = outcome_probabilities(construction.povm, h.rho)
                cross = max((p for lab, p in probs.items() if lab not in (h.label, "fail")), default=0.0)
                worst_cross = max(worst_cross, cross)
    pf_small = sc.n_det_unambiguous(2, 0.2).numeric["pf"]
    pf_right = sc.n_det_unambiguous(2, math.pi / 2).numeric["pf"]
    ok = worst_pf <= 1e-9 and worst_cross <= 1e-12 and pf_small > 0.999 and abs(pf_right) <= 1e-12
    record(
        2,
        ok,
        f"pf err {worst_pf:.2e} (1e-9), cross terms {worst_cross:.2e} (1e-12), "
        f"pf(0.2)={pf_small:.6f} (>0.999), pf(pi/2)={pf_right:.1e}",
    )
    assert ok


def test_criterion_3_single_fire_reduction():
    worst_ps, worst_indep = 0.0, 0.0
    for theta in GRID:
        r = sc.grouped_single_fire(theta)
        worst_ps = max(worst_ps, abs(r.numeric["ps"] - 0.5 * (1 + math.sin(2 * theta))))
        worst_indep = max(worst_indep, r.metadata["pattern_independence_error"])
    ok = worst_ps <= 1e-10 and worst_indep <= 1e-12
    record(3, ok, f"ps err {worst_ps:.2e} (1e-10), pattern independence {worst_indep:.2e} (1e-12)")
    assert ok


def _entangled_formula(theta):
    return 0.5 + math.sin(2 * theta) / 3 + math.sin(4 * theta) / 6


def test_criterion_4_grouped_entangled():
    worst = max(
        abs(sc.grouped_multifire_entangled(t).numeric["ps"] - _entangled_formula(t)) for t in GRID
    )
    at_quarter = sc.grouped_multifire_entangled(math.pi / 4).numeric["ps"]
    at_eighth = sc.grouped_multifire_entangled(math.pi / 8).numeric["ps"]
    eighth_exact = 0.5 + math.sqrt(2) / 6 + 1 / 6
    ok = (
        worst <= 1e-9
        and abs(at_quarter - 5 / 6) <= 1e-9
        and abs(at_eighth - eighth_exact) <= 1e-9
        and abs(at_eighth - 0.90237) <= 5e-6
    )
    record(4, ok, f"ps err {worst:.2e} (1e-9), ps(pi/4)={at_quarter:.12f}, ps(pi/8)={at_eighth:.12f}")
    assert ok


def test_criterion_5_crossover_and_fixture():
    theta_star = sc.crossover(None, 0.5, 0.9, 1e-6)
    mismatches = fixtures.check_fixture(fixtures.DEFAULT_PATH)
    rows = fixtures.load_fixture(fixtures.DEFAULT_PATH)
    ok = 0.65 <= theta_star <= 0.75 and not mismatches and len(rows) == 181
    record(5, ok, f"theta* = {theta_star:.6f} in [0.65, 0.75]; fixture {len(rows)} rows, {len(mismatches)} mismatches")
    assert ok


def _pgm_formula(theta):
    a = 1 / 6 + 2 / 9 * math.cos(2 * theta) + 1 / 9 * math.cos(4 * theta)
    tr0 = 1 / (1.5 + 3 * a)
    lam = 2 / 3 * math.sin(2 * theta) + 1 / 3 * math.sin(4 * theta)
    tr12 = (3 * a + 2.5) / (6 + 12 * a) + lam**2 / (6 * math.sqrt(0.25 - a * a))
    return (tr0 + 2 * tr12) / 3


def test_criterion_6_pgm_three_way():
    worst, gap_ok = 0.0, True
    smallest_gap = math.inf
    for theta in GRID[GRID >= 0.05]:
        ps = sc.grouped_with_no_fire_pgm(theta).numeric["ps"]
        worst = max(worst, abs(ps - _pgm_formula(theta)))
    for theta in INTERIOR:
        gap = sc.grouped_multifire_entangled(theta).numeric["ps"] - sc.grouped_with_no_fire_pgm(theta).numeric["ps"]
        smallest_gap = min(smallest_gap, gap)
        gap_ok &= gap > 0
    ok = worst <= 1e-9 and gap_ok
    record(6, ok, f"ps err {worst:.2e} (1e-9), min(ps_entangled - ps_pgm) = {smallest_gap:.3e} (> 0)")
    assert ok


def test_criterion_7_cluster_unambiguous():
    min_eig = min(float(np.linalg.eigvalsh(cl.failure_operator(t))[0]) for t in GRID)
    quartic = oracle.quartic_report(GRID)
    worst_coll, worst_ind, beats = 0.0, 0.0, True
    for theta in INTERIOR:
        r = sc.cluster_unambiguous(theta)
        s2, c = math.sin(theta) ** 2, math.cos(theta)
        collective = s2**2 / 16 * ((1 + s2 / 2) ** 2 + (1 + c * c) * (1.5 + s2 / 4))
        individual = (s2 / (1 + c)) ** 4
        worst_coll = max(worst_coll, abs(r.numeric["ps_collective"] - collective))
        worst_ind = max(worst_ind, abs(r.numeric["ps_individual"] - individual))
        if theta <= 0.5:
            beats &= r.numeric["ps_collective"] > r.numeric["ps_individual"]
    spot = sc.cluster_unambiguous(math.pi / 4)
    spot_ok = abs(spot.numeric["ps_collective"] - 1 / 16) <= 1e-9
    ind_exact = (0.5 / (1 + math.sqrt(0.5))) ** 4
    spot_ok &= abs(spot.numeric["ps_individual"] - ind_exact) <= 1e-9 and abs(ind_exact - 0.00736) < 5e-6
    ok = (
        min_eig >= -1e-10
        and quartic.max_abs_error <= 1e-8
        and worst_coll <= 1e-9
        and worst_ind <= 1e-12
        and beats
        and spot_ok
    )
    record(
        7,
        ok,
        f"min eig(Pi_f) {min_eig:.2e}, quartic {quartic.max_abs_error:.2e} (1e-8), "
        f"collective {worst_coll:.2e} (1e-9), individual {worst_ind:.2e} (1e-12), "
        f"collective > individual for theta <= 0.5: {beats}",
    )
    assert ok


def test_criterion_8_reported_discrepancies():
    worst_corrected, min_alt_gap = 0.0, math.inf
    for theta in (math.pi / 6, math.pi / 3):
        for p0 in (0.5, 0.25):
            p1 = 1 - p0
            w0 = np.array([1, 1]) / math.sqrt(2)
            w1 = np.array([np.exp(1j * theta), np.exp(-1j * theta)]) / math.sqrt(2)
            lam = p1 * np.outer(w1, w1.conj()) - p0 * np.outer(w0, w0.conj())
            ev = np.linalg.eigvalsh(lam)
            corrected = 0.5 * (p1 - p0 + np.array([-1, 1]) * math.sqrt(p1**2 + p0**2 - 2 * p0 * p1 * math.cos(2 * theta)))
            single_angle = 0.5 * (p1 - p0 + np.array([-1, 1]) * math.sqrt(p1**2 + p0**2 - 2 * p0 * p1 * math.cos(theta)))
            worst_corrected = max(worst_corrected, float(np.max(np.abs(ev - corrected))))
            min_alt_gap = min(min_alt_gap, float(np.max(np.abs(ev - single_angle))))
    m_err = max(sc.non_orthogonal_eigenproblem(t).spectrum_error() for t in GRID)
    ok = worst_corrected <= 1e-10 and min_alt_gap > 1e-10 and m_err <= 1e-8
    record(
        8,
        ok,
        f"cos(2theta) form err {worst_corrected:.2e} (1e-10); cos(theta) form off by >= {min_alt_gap:.3f}; "
        f"eig(M) vs 3 eig(rho12 - rho34) {m_err:.2e} (1e-8)",
    )
    assert ok


def test_criterion_9_property_suite():
    start = time.perf_counter()
    reports = oracle.verify_all()
    elapsed = time.perf_counter() - start
    povm_reports = [r for r in reports if r.name.startswith("povm+probabilities")]
    worst_povm = max(r.max_abs_error for r in povm_reports)
    failed = [r.name for r in reports if not r.passed]
    ok = not failed and worst_povm <= 1e-10 and elapsed < 30.0
    record(
        9,
        ok,
        f"{len(reports)} oracle reports, failed {failed or 'none'}; worst completeness/positivity/range "
        f"{worst_povm:.2e}; verify took {elapsed:.1f}s (limit 30s)",
    )
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
