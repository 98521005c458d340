"""
Collective unambiguous measurement for two clusters of two detectors.

Each cluster starts in |phi00> = |w0>|w0>. Inside one cluster the state
|phi00_perp> = |v1>|v1> is orthogonal to every fired state, and
R = I - |phi00><phi00| annihilates the unfired one. The four detection
elements combine these per cluster:

    none    c0 P (x) P        group12  c1 R (x) P
    group34 c1 P (x) R        both     c2 R (x) R

with P = |phi00_perp><phi00_perp|, and ``"fail"`` completes the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .. import linalg
from ..errors import DegenerateTheta, NotPositive
from ..quantum import FAIL, LabeledPovm, product_state, v_state, w_state

DEFAULT_C = 0.25

NONE, GROUP12, GROUP34, BOTH = "none", "group12", "group34", "both"
CATEGORIES = (NONE, GROUP12, GROUP34, BOTH)


def phi00(theta: float) -> np.ndarray:
    return product_state([w_state(0, theta), w_state(0, theta)]).amplitudes


def phi00_perp(theta: float) -> np.ndarray:
    return product_state([v_state(1, theta), v_state(1, theta)]).amplitudes


def overlap_z(theta: float) -> complex:
    """<phi00_perp|phi00> = -sin^2(theta).

    Evaluated in closed form: near |z| = 1 the block spectrum moves like
    sqrt(1 - |z|), so an inner product rounded to 1 - 2e-16 shifts the
    quartic roots by ~1e-8.
    """
    return complex(-np.sin(theta) ** 2)


@dataclass(frozen=True)
class ClusterPovmParams:
    c0: float = DEFAULT_C
    c1: float = DEFAULT_C
    c2: float = DEFAULT_C
    z: complex = 0.0

    @classmethod
    def from_theta(
        cls, theta: float, c0: float = DEFAULT_C, c1: float = DEFAULT_C, c2: float = DEFAULT_C
    ) -> "ClusterPovmParams":
        return cls(c0, c1, c2, overlap_z(theta))

    @property
    def b(self) -> float:
        return self.c0 + 2 * self.c1 + self.c2

    def mixed_block_condition(self) -> float:
        """1 - c1 - c2 + c1 c2 |z|^2; must be >= 0 for the S (x) S_perp block."""
        return 1 - self.c1 - self.c2 + self.c1 * self.c2 * abs(self.z) ** 2

    def satisfies_subspace_conditions(self) -> bool:
        return self.c2 <= 1 and self.mixed_block_condition() >= 0


@dataclass(frozen=True, eq=False)
class QuarticCheck:
    """Quartic in x = 1 - lambda for the S (x) S block of the failure operator.

    ``coefficients`` (highest degree first) come from expanding the block's
    characteristic polynomial. ``alt_coefficients`` use an
    alternative linear term is c1 |z|^4 (c1^2 - c0 c2); it disagrees
    with the block spectrum whenever z != 0 and is kept for comparison.
    """

    params: ClusterPovmParams
    coefficients: np.ndarray
    roots: np.ndarray
    alt_coefficients: np.ndarray
    alt_roots: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        """1 - x for each root, sorted by real part."""
        return np.sort_complex(1.0 - self.roots)

    def real_roots(self, tol: float = 1e-9) -> np.ndarray:
        return np.sort(self.roots[np.abs(self.roots.imag) <= tol].real)


QUARTIC_DPS = 60


def _companion_roots(coefficients) -> np.ndarray:
    # extended precision: the block spectrum has repeated roots (a quadruple one
    # at theta = pi/2), which double-precision companion eigenvalues resolve
    # only to ~sqrt(eps)
    with mpmath.workdps(QUARTIC_DPS):
        c = [mpmath.mpmathify(x) for x in coefficients]
        deg = len(c) - 1
        comp = mpmath.zeros(deg, deg)
        for j in range(deg):
            comp[0, j] = -c[j + 1] / c[0]
        for i in range(1, deg):
            comp[i, i - 1] = 1
        roots = mpmath.eig(comp, left=False, right=False)
        return np.array([complex(r) for r in roots])


def _quartic_coefficients(params: ClusterPovmParams, alt: bool = False) -> list:
    with mpmath.workdps(QUARTIC_DPS):
        c0, c1, c2 = (mpmath.mpf(c) for c in (params.c0, params.c1, params.c2))
        z = complex(params.z)
        z2 = mpmath.mpf(z.real) ** 2 + mpmath.mpf(z.imag) ** 2
        b = c0 + 2 * c1 + c2
        x2 = z2 * (2 * (c0 + c1) * (c1 + c2) - z2 * (c2 * c0 + c1**2))
        x0 = z2**4 * c0 * c2 * c1**2
        if alt:
            x1 = z2**2 * c1 * (c1**2 - c0 * c2)
        else:
            x1 = -(z2**2) * c1 * (c0 * c1 + 2 * c0 * c2 + c1 * c2)
        return [mpmath.mpf(1), -b, x2, x1, x0]


def quartic_characteristic(params: ClusterPovmParams) -> QuarticCheck:
    exact = _quartic_coefficients(params)
    alt = _quartic_coefficients(params, alt=True)
    return QuarticCheck(
        params,
        np.array([float(c) for c in exact]),
        _companion_roots(exact),
        np.array([float(c) for c in alt]),
        _companion_roots(alt),
    )


def perturbative_roots(params: ClusterPovmParams) -> tuple[float, float]:
    """First order in |z|^2: the two roots (b +- sqrt(b^2 - 8|z|^2 (c0+c1)(c1+c2)))/2."""
    b = params.b
    disc = b**2 - 8 * abs(params.z) ** 2 * (params.c0 + params.c1) * (params.c1 + params.c2)
    root = np.sqrt(disc)
    return 0.5 * (b - root), 0.5 * (b + root)


def _cluster_elements(theta: float, params: ClusterPovmParams) -> list[tuple[str, np.ndarray]]:
    p = linalg.outer(phi00_perp(theta))
    r = np.eye(4) - linalg.outer(phi00(theta))
    return [
        (NONE, params.c0 * linalg.tensor(p, p)),
        (GROUP12, params.c1 * linalg.tensor(r, p)),
        (GROUP34, params.c1 * linalg.tensor(p, r)),
        (BOTH, params.c2 * linalg.tensor(r, r)),
    ]


def failure_operator(theta: float, params: ClusterPovmParams | None = None) -> np.ndarray:
    params = params or ClusterPovmParams.from_theta(theta)
    return np.eye(16) - sum(op for _, op in _cluster_elements(theta, params))


def cluster_unambiguous_povm(
    theta: float, params: ClusterPovmParams | None = None
) -> LabeledPovm:
    """The five-outcome collective POVM on four detectors.

    Only the constants c0, c1, c2 are read from ``params``; the overlap is
    recomputed from ``theta``. Positivity of the failure element is checked
    on the full 16-dimensional space.

    Raises
    ------
    DegenerateTheta
        For theta = 0.
    NotPositive
        If the failure element has an eigenvalue below -1e-10.
    """
    if abs(np.sin(theta)) < 1e-15:
        raise DegenerateTheta("theta = 0 leaves nothing to discriminate")
    params = params or ClusterPovmParams.from_theta(theta)
    elements = _cluster_elements(theta, params)
    fail = np.eye(16) - sum(op for _, op in elements)
    lowest = linalg.min_eigenvalue(fail)
    if lowest < -linalg.PSD_TOL:
        raise NotPositive(
            f"failure element has eigenvalue {lowest:.3e} for "
            f"c0={params.c0}, c1={params.c1}, c2={params.c2}"
        )
    return LabeledPovm(elements + [(FAIL, fail)])


def subspace_bases(theta: float) -> dict[str, np.ndarray]:
    """Orthonormal bases (as columns) of the four invariant blocks of the failure operator.

    S = span{phi00, phi00_perp} inside one cluster and S_perp its complement.
    """
    s = linalg.orthonormal_basis(np.stack([phi00(theta), phi00_perp(theta)], axis=1))
    full, _ = np.linalg.qr(np.hstack([s, np.eye(4)]))
    # leading columns of `full` span S; S collapses to one dimension at theta = pi/2
    s_perp = full[:, s.shape[1]:]
    return {
        "perp_perp": linalg.tensor(s_perp, s_perp),
        "s_perp": linalg.tensor(s, s_perp),
        "perp_s": linalg.tensor(s_perp, s),
        "s_s": linalg.tensor(s, s),
    }


def subspace_eigenvalues(theta: float, params: ClusterPovmParams | None = None) -> dict[str, np.ndarray]:
    """Eigenvalues of the failure operator restricted to each invariant block."""
    fail = failure_operator(theta, params)
    return {
        name: linalg.eigvalsh(linalg.dagger(q) @ fail @ q)
        for name, q in subspace_bases(theta).items()
    }


def mixed_block_eigenvalues(params: ClusterPovmParams) -> np.ndarray:
    """Roots of lambda^2 - (2 - c1 - c2) lambda + 1 - c1 - c2 + c1 c2 |z|^2."""
    tr = 2 - params.c1 - params.c2
    det = params.mixed_block_condition()
    root = np.sqrt(complex(tr**2 - 4 * det))
    return np.sort(np.real([(tr - root) / 2, (tr + root) / 2]))


def success_closed(theta: float) -> float:
    """Collective success with c0 = c1 = c2 = 1/4 and 16 equally likely states."""
    s2 = np.sin(theta) ** 2
    return s2**2 / 16 * ((1 + s2 / 2) ** 2 + (1 + np.cos(theta) ** 2) * (1.5 + s2 / 4))


def individual_success_closed(theta: float) -> float:
    """All four single-detector unambiguous measurements succeed."""
    return (np.sin(theta) ** 2 / (1 + np.cos(theta))) ** 4
