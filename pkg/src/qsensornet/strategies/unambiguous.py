"""Unambiguous discrimination of product w-states on n detectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import linalg
from ..errors import DegenerateTheta
from ..quantum import (
    FAIL,
    FiringPattern,
    HypothesisEnsemble,
    LabeledPovm,
    ensemble_success,
    product_state,
    v_state,
    w_product,
)


@dataclass(frozen=True, eq=False)
class UnambiguousConstruction:
    """Product POVM Pi_x = c |phi_x^perp><phi_x^perp| plus the failure element.

    Outcome labels are the firing-pattern strings (``"01"`` etc.) and ``"fail"``.
    """

    n: int
    theta: float
    gram_operator: np.ndarray
    lambda_max: float
    scale_c: float
    povm: LabeledPovm

    def hypotheses(self) -> HypothesisEnsemble:
        """All 2^n product states, equally likely, labelled by pattern."""
        return HypothesisEnsemble.uniform(
            [(str(p), w_product(p, self.theta)) for p in FiringPattern.all(self.n)]
        )

    def success_probability(self) -> float:
        return ensemble_success(self.povm, self.hypotheses())

    def failure_probability(self) -> float:
        return 1.0 - self.success_probability()


def t_operator(theta: float) -> np.ndarray:
    """Sum of the projectors onto |v0> and |v1>."""
    return sum(linalg.outer(v_state(j, theta).amplitudes) for j in (0, 1))


def failure_probability_closed(n: int, theta: float) -> float:
    """1 - sin^{2n}(theta) / (1 + cos theta)^n, valid on [0, pi/2]."""
    return 1.0 - np.sin(theta) ** (2 * n) / (1.0 + np.cos(theta)) ** n


def unambiguous_product(n: int, theta: float) -> UnambiguousConstruction:
    """Build the zero-error product POVM for ``n`` detectors.

    The element for pattern x projects onto the tensor product of |v_{1-x_k}>,
    which is orthogonal to every other product w-state. The common scale is
    1/lambda_max^n with lambda_max the top eigenvalue of ``t_operator``.
    """
    if n < 1:
        raise ValueError("need at least one detector")
    if abs(np.sin(theta)) < 1e-15:
        raise DegenerateTheta("theta = 0 makes all product states identical")
    gram = t_operator(theta)
    lam_max = float(linalg.hermitian_eig(gram).eigenvalues[-1])
    c = 1.0 / lam_max**n
    elements = []
    for pattern in FiringPattern.all(n):
        perp = product_state([v_state(1 - b, theta) for b in pattern.bits])
        elements.append((str(pattern), c * linalg.outer(perp.amplitudes)))
    fail = np.eye(2**n) - sum(op for _, op in elements)
    elements.append((FAIL, fail))
    return UnambiguousConstruction(n, theta, gram, lam_max, c, LabeledPovm(elements))
