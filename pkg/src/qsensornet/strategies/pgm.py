"""Pretty-good (square-root) measurement."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .. import linalg
from ..quantum import HypothesisEnsemble, LabeledPovm, ensemble_success

NULL = "null"


class PgmResult(NamedTuple):
    povm: LabeledPovm
    ps: float


def pgm(ensemble: HypothesisEnsemble, cutoff: float = linalg.SUPPORT_CUTOFF) -> PgmResult:
    """Pi_j = p_j rho^{-1/2} rho_j rho^{-1/2} with rho the prior-weighted average.

    rho^{-1/2} is taken on the support of rho (eigenvalues above ``cutoff``).
    If rho is rank deficient the projector onto its kernel is added as an
    extra outcome labelled ``"null"`` so the elements sum to the identity.
    """
    rho = ensemble.average_state()
    inv_sqrt = linalg.psd_apply(rho, lambda x: x**-0.5, cutoff)
    elements = [
        (h.label, h.prior * inv_sqrt @ h.rho.matrix @ inv_sqrt) for h in ensemble
    ]
    kernel = np.eye(ensemble.dim) - linalg.support_projector(rho, cutoff)
    if np.max(np.abs(kernel)) > cutoff:
        elements.append((NULL, kernel))
    povm = LabeledPovm(elements)
    return PgmResult(povm, ensemble_success(povm, ensemble))
