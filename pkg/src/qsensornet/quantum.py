"""
Detector-network state model.

Each detector is a qubit written in the eigenbasis of the interaction
unitary: ``|u+>`` is basis vector 0 and ``|u->`` is basis vector 1. For
several detectors, detector 1 is the leftmost tensor factor, so a firing
pattern string such as ``"1000"`` means only the leftmost detector fired.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from . import linalg
from .errors import BadPriors, DimensionMismatch, NotHermitian, NotPsd, UnmappedLabel

NORM_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
PRIOR_TOL = 1e-12
FAIL = "fail"

U_PLUS = np.array([1.0, 0.0], dtype=complex)
U_MINUS = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class DetectorUnitary:
    """U(theta) = diag(e^{i theta}, e^{-i theta}) in the (|u+>, |u->) basis."""

    theta: float

    @property
    def matrix(self) -> np.ndarray:
        return np.diag([np.exp(1j * self.theta), np.exp(-1j * self.theta)])


@dataclass(frozen=True)
class FiringPattern:
    """Which of ``n`` detectors received the signal.

    Bit ``j`` of ``mask`` is set when detector ``j`` (0-based, leftmost tensor
    factor first) interacted.
    """

    n: int
    mask: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("detector count must be non-negative")
        if self.mask < 0 or self.mask >= (1 << self.n):
            raise ValueError(f"mask {self.mask} does not fit {self.n} detectors")

    @classmethod
    def from_string(cls, bits: str) -> "FiringPattern":
        if any(ch not in "01" for ch in bits):
            raise ValueError(f"invalid firing pattern {bits!r}")
        mask = sum(1 << j for j, ch in enumerate(bits) if ch == "1")
        return cls(len(bits), mask)

    @classmethod
    def from_detectors(cls, n: int, fired: Iterable[int]) -> "FiringPattern":
        mask = 0
        for j in fired:
            if not 0 <= j < n:
                raise ValueError(f"detector index {j} out of range for n={n}")
            mask |= 1 << j
        return cls(n, mask)

    @classmethod
    def all(cls, n: int) -> list["FiringPattern"]:
        """Every pattern on ``n`` detectors, ordered by string ``"0..0"`` to ``"1..1"``."""
        return [cls.from_string("".join(b)) for b in itertools.product("01", repeat=n)]

    def fired(self, j: int) -> bool:
        return bool(self.mask >> j & 1)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(self.fired(j)) for j in range(self.n))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def _flat(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(-1)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _flat(self.amplitudes)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalize(cls, v) -> "PureState":
        v = _flat(v)
        return cls(v / np.linalg.norm(v))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "PureState") -> complex:
        """<self|other>."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim} differ")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "PureState") -> float:
        return abs(self.overlap(other)) ** 2

    def same_ray(self, other: "PureState", tol: float = 1e-9) -> bool:
        """Equality up to a global phase."""
        return abs(abs(self.overlap(other)) - 1.0) <= tol

    def density(self) -> "DensityMatrix":
        return DensityMatrix(linalg.outer(self.amplitudes))

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(linalg.tensor(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        try:
            linalg.check_hermitian(m)
        except NotHermitian as exc:
            raise NotHermitian(f"density matrix: {exc}") from None
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if not linalg.is_psd(m):
            raise NotPsd("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence["PureState | DensityMatrix"]):
        if len(weights) != len(states):
            raise ValueError("need one weight per state")
        total = sum(w * as_density(s).matrix for w, s in zip(weights, states))
        return cls(total)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


StateLike = Union[PureState, DensityMatrix]


def as_density(state: StateLike) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


class LabeledPovm:
    """A POVM whose elements carry string outcome labels.

    By default the constructor enforces the POVM conditions: unique labels,
    every element PSD within -1e-10, and the elements summing to the identity
    within 1e-9 entrywise. ``check=False`` skips the positivity/completeness
    checks so that broken candidates can be handed to the oracle.
    """

    def __init__(self, elements: Iterable[tuple[str, np.ndarray]], *, check: bool = True):
        items = [(str(label), linalg.as_matrix(op)) for label, op in elements]
        if not items:
            raise ValueError("a POVM needs at least one element")
        labels = [label for label, _ in items]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate POVM labels in {labels}")
        dim = items[0][1].shape[0]
        for label, op in items:
            if op.shape != (dim, dim):
                raise DimensionMismatch(f"element {label!r} has shape {op.shape}, expected {(dim, dim)}")
        self._elements = dict(items)
        self.dim = dim
        if check:
            self.validate()

    def validate(self) -> None:
        for label, op in self._elements.items():
            if not linalg.is_psd(op):
                raise NotPsd(f"POVM element {label!r} is not positive semidefinite")
        err = self.completeness_error()
        if err > COMPLETENESS_TOL:
            raise ValueError(f"POVM elements do not sum to identity (max error {err:.3e})")

    def completeness_error(self) -> float:
        total = sum(self._elements.values())
        return float(np.max(np.abs(total - np.eye(self.dim))))

    @property
    def labels(self) -> list[str]:
        return list(self._elements)

    def __getitem__(self, label: str) -> np.ndarray:
        return self._elements[label]

    def __contains__(self, label: str) -> bool:
        return label in self._elements

    def __iter__(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(self._elements.items())

    def __len__(self) -> int:
        return len(self._elements)

    def __repr__(self) -> str:
        return f"LabeledPovm(dim={self.dim}, labels={self.labels})"


@dataclass(frozen=True)
class Hypothesis:
    label: str
    state: StateLike
    prior: float

    @cached_property
    def rho(self) -> DensityMatrix:
        return as_density(self.state)


class HypothesisEnsemble:
    """Weighted hypotheses whose priors sum to one (within 1e-12)."""

    def __init__(self, hypotheses: Iterable[Hypothesis]):
        hyps = tuple(hypotheses)
        if not hyps:
            raise ValueError("ensemble needs at least one hypothesis")
        labels = [h.label for h in hyps]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate hypothesis labels in {labels}")
        for h in hyps:
            if not 0.0 <= h.prior <= 1.0:
                raise BadPriors(f"prior of {h.label!r} is {h.prior}")
        total = sum(h.prior for h in hyps)
        if abs(total - 1.0) > PRIOR_TOL:
            raise BadPriors(f"priors sum to {total!r}")
        dims = {h.rho.dim for h in hyps}
        if len(dims) != 1:
            raise DimensionMismatch(f"hypotheses live in different dimensions {sorted(dims)}")
        self.hypotheses = hyps
        self._dim = dims.pop()

    @classmethod
    def uniform(cls, items: Sequence[tuple[str, StateLike]]) -> "HypothesisEnsemble":
        p = 1.0 / len(items)
        return cls(Hypothesis(label, state, p) for label, state in items)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def labels(self) -> list[str]:
        return [h.label for h in self.hypotheses]

    @property
    def priors(self) -> list[float]:
        return [h.prior for h in self.hypotheses]

    def average_state(self) -> np.ndarray:
        return sum(h.prior * h.rho.matrix for h in self.hypotheses)

    def __iter__(self) -> Iterator[Hypothesis]:
        return iter(self.hypotheses)

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __repr__(self) -> str:
        return f"HypothesisEnsemble(labels={self.labels}, priors={self.priors})"


def check_priors(*priors: float) -> None:
    for p in priors:
        if not 0.0 <= p <= 1.0:
            raise BadPriors(f"prior {p} outside [0, 1]")
    if abs(sum(priors) - 1.0) > PRIOR_TOL:
        raise BadPriors(f"priors {priors} do not sum to 1")


def w_state(j: int, theta: float) -> PureState:
    """|w0> = (|u+> + |u->)/sqrt2 and |w1> = U(theta)|w0>."""
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    phase = theta if j else 0.0
    return PureState(np.array([np.exp(1j * phase), np.exp(-1j * phase)]) / np.sqrt(2))


def v_state(j: int, theta: float) -> PureState:
    """The vector orthogonal to |w_j>: (|u+> - |u->)/sqrt2, rotated by U for j = 1."""
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    phase = theta if j else 0.0
    return PureState(np.array([np.exp(1j * phase), -np.exp(-1j * phase)]) / np.sqrt(2))


def product_state(factors: Sequence[PureState]) -> PureState:
    return PureState(linalg.tensor_all(*(f.amplitudes for f in factors)))


def w_product(pattern: FiringPattern, theta: float) -> PureState:
    """|w_{x1}> (x) ... (x) |w_{xn}> for the detectors flagged in ``pattern``."""
    return product_state([w_state(b, theta) for b in pattern.bits])


def lift(u: DetectorUnitary, pattern: FiringPattern) -> np.ndarray:
    """U on every fired detector and the identity on the rest."""
    if pattern.n == 0:
        return np.eye(1, dtype=complex)
    eye = np.eye(2, dtype=complex)
    return linalg.tensor_all(*(u.matrix if b else eye for b in pattern.bits))


def fire(state: PureState, pattern: FiringPattern, theta: float) -> PureState:
    if state.dim != 2**pattern.n:
        raise DimensionMismatch(f"state of dim {state.dim} vs {pattern.n} detectors")
    return PureState(lift(DetectorUnitary(theta), pattern) @ state.amplitudes)


def outcome_probabilities(povm: LabeledPovm, rho: StateLike) -> dict[str, float]:
    """Tr(Pi_label rho) for every outcome."""
    rho = as_density(rho)
    if rho.dim != povm.dim:
        raise DimensionMismatch(f"POVM dim {povm.dim} vs state dim {rho.dim}")
    return {label: float(np.real(np.trace(op @ rho.matrix))) for label, op in povm}


def ensemble_success(
    povm: LabeledPovm,
    ensemble: HypothesisEnsemble,
    label_map: Mapping[str, str] | None = None,
) -> float:
    """Sum_j p_j Tr(Pi_{map(j)} rho_j).

    ``label_map`` sends hypothesis labels to POVM outcome labels; without it
    each hypothesis label must itself be an outcome label.
    """
    if ensemble.dim != povm.dim:
        raise DimensionMismatch(f"POVM dim {povm.dim} vs ensemble dim {ensemble.dim}")
    total = 0.0
    for h in ensemble:
        outcome = h.label if label_map is None else label_map.get(h.label)
        if outcome is None or outcome not in povm:
            raise UnmappedLabel(f"hypothesis {h.label!r} has no POVM outcome")
        total += h.prior * float(np.real(np.trace(povm[outcome] @ h.rho.matrix)))
    return total
