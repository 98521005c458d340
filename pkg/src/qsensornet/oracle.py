"""
Brute-force verifiers.

States are rebuilt here straight from the basis convention (|u+> first,
detector 1 leftmost) without going through the state or strategy
constructors, and success probabilities are recomputed as plain
sum_j p_j Tr(Pi_j rho_j). Only the ``linalg`` kernel is shared.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import linalg
from .errors import DegenerateTheta
from .quantum import LabeledPovm
from .scenarios import (
    DEGENERATE_AT_ZERO,
    MU_PATTERNS,
    ScenarioId,
    cluster_hypotheses,
    non_orthogonal_eigenproblem,
    run_scenario,
    theta_grid,
)

AGREEMENT_TOL = 1e-9
CONSTRUCTION_TOL = 1e-10
QUARTIC_TOL = 1e-8
PROBABILITY_SLACK = 1e-10
SINGLE_ANGLE_MIN_SEPARATION = 1e-3


@dataclass(frozen=True)
class VerificationReport:
    name: str
    max_abs_error: float
    tolerance: float
    worst_theta: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_error <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        where = "" if self.worst_theta is None else f" at theta={self.worst_theta:.6g}"
        return f"{status}  {self.name:<42s} err={self.max_abs_error:.3e} tol={self.tolerance:.0e}{where}"


def _worst(name: str, errors: Iterable[tuple[float, float]], tol: float, **details) -> VerificationReport:
    worst_err, worst_theta = 0.0, None
    for theta, err in errors:
        if worst_theta is None or err > worst_err or math.isnan(err):
            worst_err, worst_theta = err, theta
    return VerificationReport(name, worst_err, tol, worst_theta, details)


# --------------------------------------------------------------------------
# first-principles states


def basis_amplitudes(pattern: str, theta: float) -> np.ndarray:
    """Amplitudes of U^{x_1} (x) ... (x) U^{x_n} applied to |w0>^n, one basis index at a time."""
    n = len(pattern)
    amps = np.empty(2**n, dtype=complex)
    for idx in range(2**n):
        phase = 0.0
        for j, bit in enumerate(format(idx, f"0{n}b")):
            if pattern[j] == "1":
                # bit 0 is |u+> (phase +theta), bit 1 is |u-> (phase -theta)
                phase += theta if bit == "0" else -theta
        amps[idx] = np.exp(1j * phase)
    return amps / math.sqrt(2**n)


def all_patterns(n: int) -> list[str]:
    return ["".join(bits) for bits in itertools.product("01", repeat=n)]


def group_category(pattern: str) -> str:
    a, b = "1" in pattern[:2], "1" in pattern[2:]
    return {(False, False): "none", (True, False): "group12", (False, True): "group34", (True, True): "both"}[(a, b)]


def _ray_error(a: np.ndarray, b: np.ndarray) -> float:
    return abs(1.0 - abs(np.vdot(a, b)))


def _state_vector(state) -> np.ndarray:
    # Hypothesis.state is a PureState here; read its amplitudes directly
    return np.asarray(state.amplitudes)


def exhaustive_pattern_check(n: int, theta: float, tol: float = CONSTRUCTION_TOL) -> VerificationReport:
    """Rebuild all 2^n fired states and compare with every scenario that uses them.

    Also checks the Gram matrix against cos(theta)^hamming and, for n = 4, the
    sizes of the none/12/34/both partition.
    """
    if not 1 <= n <= 4:
        raise ValueError("n must be between 1 and 4")
    pats = all_patterns(n)
    direct = {p: basis_amplitudes(p, theta) for p in pats}
    errors = {}

    gram = np.array([[np.vdot(direct[a], direct[b]) for b in pats] for a in pats])
    hamming = np.array([[sum(x != y for x, y in zip(a, b)) for b in pats] for a in pats])
    errors["gram"] = float(np.max(np.abs(gram - np.cos(theta) ** hamming)))

    if abs(math.sin(theta)) > 1e-15:
        ens = run_scenario(ScenarioId.N_DET_UNAMBIGUOUS, theta, n=n).ensemble
        errors["n-det-unambiguous"] = max(_ray_error(direct[h.label], _state_vector(h.state)) for h in ens)
    if n == 2:
        ens = run_scenario(ScenarioId.TWO_DET_MIN_ERR, theta).ensemble
        errors["two-det-min-err"] = max(_ray_error(direct[h.label], _state_vector(h.state)) for h in ens)
    details: dict = {}
    if n == 4:
        ens, label_map = cluster_hypotheses(theta)
        errors["cluster-unambiguous"] = max(_ray_error(direct[h.label], _state_vector(h.state)) for h in ens)
        errors["cluster-labels"] = float(
            sum(label_map[p] != group_category(p) for p in pats)
        )
        mus = non_orthogonal_eigenproblem(theta).mu_vectors
        errors["product-mu-vectors"] = max(
            _ray_error(direct[p], m.amplitudes) for p, m in zip(MU_PATTERNS, mus)
        )
        sizes = {c: sum(group_category(p) == c for p in pats) for c in ("none", "group12", "group34", "both")}
        details["partition_sizes"] = sizes
        errors["partition"] = float(sorted(sizes.values()) != [1, 3, 3, 9])
    details["errors"] = errors
    return VerificationReport(
        f"exhaustive patterns n={n}", max(errors.values()), tol, theta, details
    )


# --------------------------------------------------------------------------
# POVMs and probabilities


def verify_povm(povm: LabeledPovm, tol: float = CONSTRUCTION_TOL, name: str = "povm") -> VerificationReport:
    """Completeness error and PSD violation, whichever is larger."""
    dim = next(iter(povm))[1].shape[0]
    total = sum(op for _, op in povm)
    completeness = float(np.max(np.abs(total - np.eye(dim))))
    negativity = {
        label: max(0.0, -float(np.linalg.eigvalsh(0.5 * (op + op.conj().T))[0])) for label, op in povm
    }
    herm = max(linalg.hermiticity_error(op) for _, op in povm)
    err = max(completeness, max(negativity.values()), herm)
    return VerificationReport(
        name, err, tol, None, {"completeness": completeness, "negativity": negativity, "hermiticity": herm}
    )


def oracle_success(povm: LabeledPovm, ensemble, label_map: dict | None = None) -> float:
    total = 0.0
    for h in ensemble:
        outcome = label_map[h.label] if label_map else h.label
        total += h.prior * float(np.real(np.trace(povm[outcome] @ h.rho.matrix)))
    return total


def probability_range_error(povm: LabeledPovm, ensemble) -> float:
    """Distance of Tr(Pi rho) from [0, 1] beyond the slack, and of each row sum from 1."""
    worst = 0.0
    for h in ensemble:
        probs = [float(np.real(np.trace(op @ h.rho.matrix))) for _, op in povm]
        outside = max(max(-p, p - 1.0, 0.0) for p in probs)
        worst = max(worst, outside, abs(sum(probs) - 1.0))
    return worst


# numeric key that must equal the plain Tr-sum over the scenario's own ensemble and POVM
_SUCCESS_KEY = {
    ScenarioId.TWO_DET_MIN_ERR: ("ps2", False),
    ScenarioId.N_DET_UNAMBIGUOUS: ("pf", True),
    ScenarioId.SINGLE_FIRE_TWO_DET: ("ps", False),
    ScenarioId.GROUPED_SINGLE_FIRE: ("ps", False),
    ScenarioId.GROUPED_MULTIFIRE_ENTANGLED: ("ps", False),
    ScenarioId.GROUPED_MULTIFIRE_PRODUCT: ("ps", False),
    ScenarioId.GROUPED_WITH_NO_FIRE_PGM: ("ps", False),
    ScenarioId.CLUSTER_UNAMBIGUOUS: ("ps_collective", False),
}

CHECKED_SCENARIOS = tuple(_SUCCESS_KEY)


def _results(scenario: ScenarioId, grid, **params):
    for theta in grid:
        theta = float(theta)
        if scenario in DEGENERATE_AT_ZERO and abs(math.sin(theta)) < 1e-15:
            continue
        try:
            yield theta, run_scenario(scenario, theta, **params)
        except DegenerateTheta:
            continue


def verify_closed_forms(scenario, grid=None, tol: float = AGREEMENT_TOL, **params) -> VerificationReport:
    """max |closed_form - numeric| over the grid, plus the independent Tr-sum recheck."""
    sid = ScenarioId(scenario)
    grid = theta_grid() if grid is None else grid
    key, is_failure = _SUCCESS_KEY[sid]
    errors = []
    n_points = 0
    for theta, res in _results(sid, grid, **params):
        n_points += 1
        ps = oracle_success(res.povm, res.ensemble, res.label_map)
        value = 1.0 - ps if is_failure else ps
        errors.append((theta, max(res.max_discrepancy(), abs(value - res.numeric[key]))))
    label = sid.value + "".join(f" {k}={v}" for k, v in params.items())
    return _worst(f"closed form {label}", errors, tol, points=n_points)


def verify_scenario_povms(scenario, grid=None, tol: float = CONSTRUCTION_TOL, **params) -> VerificationReport:
    """Completeness/positivity of every POVM and the probability range, over the grid."""
    sid = ScenarioId(scenario)
    grid = theta_grid() if grid is None else grid
    errors = []
    for theta, res in _results(sid, grid, **params):
        povm_err = verify_povm(res.povm).max_abs_error
        errors.append((theta, max(povm_err, probability_range_error(res.povm, res.ensemble))))
    label = sid.value + "".join(f" {k}={v}" for k, v in params.items())
    return _worst(f"povm+probabilities {label}", errors, tol)


# --------------------------------------------------------------------------
# structural cross-checks


def lambda_eigen_report(thetas=(math.pi / 6, math.pi / 3), priors=((0.5, 0.5), (1 / 3, 2 / 3)), tol=CONSTRUCTION_TOL):
    """Spectrum of p1|w1><w1| - p0|w0><w0| vs the cos(2 theta) and cos(theta) radicands.

    ``max_abs_error`` is the cos(2 theta) mismatch; the smallest distance to
    the cos(theta) form is reported in ``details`` and must stay large.
    """
    from .strategies.helstrom import lambda_eigenvalues, lambda_eigenvalues_single_angle

    errors, separations = [], []
    for theta in thetas:
        w0 = basis_amplitudes("0", theta)
        w1 = basis_amplitudes("1", theta)
        for p0, p1 in priors:
            lam = p1 * np.outer(w1, w1.conj()) - p0 * np.outer(w0, w0.conj())
            ev = np.linalg.eigvalsh(lam)
            errors.append((theta, float(np.max(np.abs(ev - lambda_eigenvalues(p0, p1, theta))))))
            separations.append(float(np.max(np.abs(ev - lambda_eigenvalues_single_angle(p0, p1, theta)))))
    report = _worst("lambda eigenvalues (cos 2theta radicand)", errors, tol, single_angle_separation=min(separations))
    if min(separations) <= SINGLE_ANGLE_MIN_SEPARATION:
        # the cos(theta) form must not fit the computed spectrum
        return VerificationReport(report.name, math.inf, tol, report.worst_theta, report.details)
    return report


def m_spectrum_report(grid=None, tol: float = QUARTIC_TOL) -> VerificationReport:
    grid = theta_grid() if grid is None else grid
    errors = [(float(t), non_orthogonal_eigenproblem(float(t)).spectrum_error()) for t in grid]
    return _worst("eig(M) = 3 eig(rho12 - rho34) on span", errors, tol)


def _match_error(a: np.ndarray, b: np.ndarray) -> float:
    # every value of a near some value of b and vice versa
    d = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def quartic_report(grid=None, tol: float = QUARTIC_TOL) -> VerificationReport:
    """Quartic roots 1 - x against the failure operator restricted to S (x) S."""
    from .strategies import cluster as cl

    grid = theta_grid() if grid is None else grid
    errors = []
    for theta in grid:
        theta = float(theta)
        if abs(math.sin(theta)) < 1e-15:
            continue
        params = cl.ClusterPovmParams.from_theta(theta)
        quartic = cl.quartic_characteristic(params)
        block = cl.subspace_eigenvalues(theta, params)["s_s"]
        errors.append((theta, _match_error(quartic.eigenvalues, block)))
    return _worst("quartic roots vs S(x)S block", errors, tol)


def failure_psd_report(grid=None, tol: float = CONSTRUCTION_TOL) -> VerificationReport:
    """-min eigenvalue of the cluster failure element with c0 = c1 = c2 = 1/4, full 16-dim."""
    from .strategies import cluster as cl

    grid = theta_grid() if grid is None else grid
    errors = []
    for theta in grid:
        theta = float(theta)
        fail = cl.failure_operator(theta)
        errors.append((theta, max(0.0, -float(np.linalg.eigvalsh(fail)[0]))))
    return _worst("cluster failure element PSD", errors, tol)


def fixture_report(path=None) -> VerificationReport:
    from .fixtures import check_fixture, load_fixture

    rows = load_fixture(path)
    mismatches = check_fixture(path)
    err = max((abs(float(r.value) - float(got)) for r, got in mismatches), default=0.0)
    worst = float(mismatches[0][0].theta) if mismatches else None
    # exact 15-digit reproduction: any mismatch fails
    return VerificationReport(
        "regression fixture (15 digits)",
        err if not mismatches else max(err, np.finfo(float).tiny),
        0.0,
        worst,
        {"rows": len(rows), "mismatches": len(mismatches)},
    )


def verify_all(tol: float | None = None, grid=None) -> list[VerificationReport]:
    """Every oracle report. ``tol`` replaces the agreement and construction tolerances."""
    agree = AGREEMENT_TOL if tol is None else tol
    build = CONSTRUCTION_TOL if tol is None else tol
    quartic_tol = QUARTIC_TOL if tol is None else tol
    grid = theta_grid() if grid is None else grid
    started = time.perf_counter()
    reports = []
    for sid in CHECKED_SCENARIOS:
        variants = [{"n": n} for n in (1, 2, 3)] if sid is ScenarioId.N_DET_UNAMBIGUOUS else [{}]
        for params in variants:
            reports.append(verify_closed_forms(sid, grid, agree, **params))
            reports.append(verify_scenario_povms(sid, grid, build, **params))
    two_det_skewed = verify_closed_forms(ScenarioId.TWO_DET_MIN_ERR, grid, agree, p0=0.25)
    reports.append(two_det_skewed)
    for n in (1, 2, 3, 4):
        sub = [exhaustive_pattern_check(n, float(t), build) for t in grid[:: max(1, len(grid) // 12)]]
        worst = max(sub, key=lambda r: r.max_abs_error)
        reports.append(VerificationReport(worst.name, worst.max_abs_error, build, worst.worst_theta, worst.details))
    reports.append(lambda_eigen_report(tol=build))
    reports.append(m_spectrum_report(grid, quartic_tol))
    reports.append(quartic_report(grid, quartic_tol))
    reports.append(failure_psd_report(grid, build))
    reports.append(fixture_report())
    elapsed = time.perf_counter() - started
    reports.append(VerificationReport("elapsed seconds", elapsed, 30.0))
    return reports
