"""Minimum-error discrimination of two hypotheses."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import linalg
from ..errors import DimensionMismatch
from ..quantum import (
    LabeledPovm,
    StateLike,
    U_MINUS,
    U_PLUS,
    as_density,
    check_priors,
    w_state,
)

ZERO_EIGENVALUE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HelstromResult:
    lambda_operator: np.ndarray
    eigenvalues: np.ndarray
    povm: LabeledPovm
    ps: float
    alpha: float | None = None
    # p(w_j | w_k) keyed by (j, k); only filled for the pure-qubit case
    conditional: dict = field(default_factory=dict)


def helstrom_binary(
    rho0: StateLike,
    p0: float,
    rho1: StateLike,
    p1: float,
    labels: tuple[str, str] = ("0", "1"),
) -> HelstromResult:
    """Optimal two-outcome measurement for ``rho0`` (prior ``p0``) vs ``rho1``.

    The difference operator ``p1*rho1 - p0*rho0`` is diagonalized; outcome 1
    projects onto its strictly positive eigenspace and outcome 0 onto the
    remainder, so zero eigenvalues (|lambda| <= 1e-12) go to outcome 0.
    """
    check_priors(p0, p1)
    r0, r1 = as_density(rho0), as_density(rho1)
    if r0.dim != r1.dim:
        raise DimensionMismatch(f"dims {r0.dim} and {r1.dim} differ")
    lam = p1 * r1.matrix - p0 * r0.matrix
    evals, evecs = linalg.hermitian_eig(lam)
    positive = evals > ZERO_EIGENVALUE_TOL
    pi1 = evecs[:, positive] @ linalg.dagger(evecs[:, positive])
    pi0 = np.eye(r0.dim) - pi1
    povm = LabeledPovm([(labels[0], pi0), (labels[1], pi1)])
    ps = 0.5 + 0.5 * float(np.sum(np.abs(evals)))
    # the trace-norm identity assumes p0 + p1 = 1; clip the last ulp
    return HelstromResult(lam, evals, povm, min(ps, 1.0))


def lambda_eigenvalues(p0: float, p1: float, theta: float) -> np.ndarray:
    """Eigenvalues of p1|w1><w1| - p0|w0><w0|, ascending.

    The radicand is p1^2 + p0^2 - 2 p0 p1 cos(2 theta); the overlap
    |<w0|w1>|^2 = cos^2(theta) forces the double angle.
    """
    root = np.sqrt(p1**2 + p0**2 - 2 * p0 * p1 * np.cos(2 * theta))
    return 0.5 * np.array([p1 - p0 - root, p1 - p0 + root])


def lambda_eigenvalues_single_angle(p0: float, p1: float, theta: float) -> np.ndarray:
    """Eigenvalue formula with cos(theta) in the radicand.

    Does not match the spectrum of Lambda; used only to show the mismatch.
    """
    root = np.sqrt(p1**2 + p0**2 - 2 * p0 * p1 * np.cos(theta))
    return 0.5 * np.array([p1 - p0 - root, p1 - p0 + root])


def helstrom_alpha(p0: float, p1: float, theta: float) -> float:
    """Phase alpha of e^{i alpha} = (p1 e^{-2i theta} - p0) / |p1 e^{2i theta} - p0|.

    When the numerator vanishes (equal priors at theta = 0) every measurement
    is a guess and alpha = 0 is returned.
    """
    num = p1 * np.exp(-2j * theta) - p0
    if abs(num) <= ZERO_EIGENVALUE_TOL:
        return 0.0
    return float(np.angle(num))


def helstrom_pure_qubit(p0: float, p1: float, theta: float) -> HelstromResult:
    """Closed-form Helstrom measurement for |w0> (prior p0) vs |w1> (prior p1).

    The POVM projects onto (|u+> -+ e^{i alpha}|u->)/sqrt2; success probability
    is (1 + |p1 e^{2i theta} - p0|)/2.
    """
    check_priors(p0, p1)
    alpha = helstrom_alpha(p0, p1, theta)
    ea = np.exp(1j * alpha)
    e0 = (U_PLUS - ea * U_MINUS) / np.sqrt(2)
    e1 = (U_PLUS + ea * U_MINUS) / np.sqrt(2)
    povm = LabeledPovm([("0", linalg.outer(e0)), ("1", linalg.outer(e1))])
    cond = {
        (0, 0): 0.5 * (1 - np.cos(alpha)),
        (1, 0): 0.5 * (1 + np.cos(alpha)),
        (0, 1): 0.5 * (1 - np.cos(alpha + 2 * theta)),
        (1, 1): 0.5 * (1 + np.cos(alpha + 2 * theta)),
    }
    w0, w1 = w_state(0, theta), w_state(1, theta)
    lam = p1 * linalg.outer(w1.amplitudes) - p0 * linalg.outer(w0.amplitudes)
    ps = 0.5 * (1 + abs(p1 * np.exp(2j * theta) - p0))
    return HelstromResult(
        lambda_operator=lam,
        eigenvalues=lambda_eigenvalues(p0, p1, theta),
        povm=povm,
        ps=float(ps),
        alpha=alpha,
        conditional=cond,
    )
