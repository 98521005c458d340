import itertools
import math

import numpy as np
import pytest

from qsensornet.errors import BadPriors, DimensionMismatch, NotHermitian, NotPsd, UnmappedLabel
from qsensornet.quantum import (
    DensityMatrix,
    DetectorUnitary,
    FiringPattern,
    Hypothesis,
    HypothesisEnsemble,
    LabeledPovm,
    PureState,
    ensemble_success,
    fire,
    lift,
    outcome_probabilities,
    product_state,
    v_state,
    w_product,
    w_state,
)
from qsensornet.strategies.helstrom import helstrom_pure_qubit


def test_unitary_is_diagonal_phase():
    u = DetectorUnitary(0.4).matrix
    assert np.allclose(u, np.diag([np.exp(0.4j), np.exp(-0.4j)]))
    assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-12


@pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 6, 1.1, np.pi / 2])
def test_v_orthogonal_to_w(theta):
    for j in (0, 1):
        assert abs(v_state(j, theta).overlap(w_state(j, theta))) < 1e-15


def test_cross_overlaps_have_modulus_sin():
    theta = np.pi / 6
    # conjugate-linear in the bra: the two cross overlaps are complex conjugates
    assert v_state(0, theta).overlap(w_state(1, theta)) == pytest.approx(0.5j, abs=1e-15)
    assert v_state(1, theta).overlap(w_state(0, theta)) == pytest.approx(-0.5j, abs=1e-15)
    assert abs(v_state(1, theta).overlap(w_state(0, theta))) == pytest.approx(0.5, abs=1e-15)


def test_w_overlap_is_cos():
    assert w_state(0, 0.7).overlap(w_state(1, 0.7)) == pytest.approx(math.cos(0.7))
    assert w_state(1, 0.0).same_ray(w_state(0, 0.0))


def test_bad_index():
    with pytest.raises(ValueError):
        w_state(2, 0.1)


def test_firing_pattern_roundtrip():
    p = FiringPattern.from_string("1010")
    assert p.mask == 0b0101 and str(p) == "1010"
    assert p.fired(0) and not p.fired(1)
    assert FiringPattern.from_detectors(4, [0, 2]) == p
    assert [str(q) for q in FiringPattern.all(2)] == ["00", "01", "10", "11"]
    with pytest.raises(ValueError):
        FiringPattern(2, 4)
    with pytest.raises(ValueError):
        FiringPattern.from_string("10x")


def test_lift_simple_cases():
    u = DetectorUnitary(np.pi / 2)
    assert np.allclose(lift(u, FiringPattern(3)), np.eye(8))
    assert np.allclose(lift(u, FiringPattern.from_string("1")), np.diag([1j, -1j]))


def test_lift_both_detectors_gives_w1w1():
    theta = 0.8
    out = fire(w_product(FiringPattern(2), theta), FiringPattern.from_string("11"), theta)
    assert out.same_ray(product_state([w_state(1, theta), w_state(1, theta)]))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_lift_flips_exactly_masked_factors(n):
    theta = 0.37
    start = w_product(FiringPattern(n), theta)
    for bits in itertools.product("01", repeat=n):
        pattern = FiringPattern.from_string("".join(bits))
        fired = fire(start, pattern, theta)
        expected = product_state([w_state(int(b), theta) for b in bits])
        assert np.max(np.abs(fired.amplitudes - expected.amplitudes)) < 1e-14


def test_pure_state_requires_norm():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0]))
    assert PureState.normalize([3, 4]).fidelity(PureState(np.array([0.6, 0.8]))) == pytest.approx(1)


def test_density_matrix_validation():
    with pytest.raises(NotHermitian):
        DensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2))
    with pytest.raises(NotPsd):
        DensityMatrix(np.diag([1.5, -0.5]))
    mix = DensityMatrix.mixture([0.5, 0.5], [w_state(0, 0.1), w_state(1, 0.1)])
    assert mix.dim == 2


def test_povm_validation():
    with pytest.raises(ValueError):
        LabeledPovm([("a", 0.6 * np.eye(2)), ("b", 0.6 * np.eye(2))])
    with pytest.raises(NotPsd):
        LabeledPovm([("a", np.diag([1.2, 1.0])), ("b", np.diag([-0.2, 0.0]))])
    with pytest.raises(ValueError):
        LabeledPovm([("a", np.eye(2)), ("a", np.zeros((2, 2)))])
    with pytest.raises(DimensionMismatch):
        LabeledPovm([("a", np.eye(2)), ("b", np.zeros((3, 3)))])
    unchecked = LabeledPovm([("a", 0.6 * np.eye(2)), ("b", 0.6 * np.eye(2))], check=False)
    assert unchecked.completeness_error() == pytest.approx(0.2)


def test_outcome_probabilities_identity():
    povm = LabeledPovm([("only", np.eye(2))])
    assert outcome_probabilities(povm, w_state(0, 0.2)) == {"only": pytest.approx(1.0)}
    with pytest.raises(DimensionMismatch):
        outcome_probabilities(povm, w_product(FiringPattern(2), 0.2))


def test_outcome_probability_helstrom_qubit():
    res = helstrom_pure_qubit(0.5, 0.5, np.pi / 6)
    assert res.alpha == pytest.approx(-2 * np.pi / 3)
    probs = outcome_probabilities(res.povm, w_state(0, np.pi / 6))
    assert probs["1"] == pytest.approx(0.25, abs=1e-12)
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)


def test_ensemble_success_trivial_cases():
    e0, e1 = np.eye(2)
    ens = HypothesisEnsemble([Hypothesis("a", PureState(e0), 1.0)])
    assert ensemble_success(LabeledPovm([("a", np.eye(2))]), ens) == pytest.approx(1.0)
    ens2 = HypothesisEnsemble.uniform([("a", PureState(e0)), ("b", PureState(e1))])
    povm = LabeledPovm([("a", np.outer(e0, e0)), ("b", np.outer(e1, e1))])
    assert ensemble_success(povm, ens2) == pytest.approx(1.0)


def test_ensemble_success_helstrom_qubit():
    theta = np.pi / 6
    res = helstrom_pure_qubit(0.5, 0.5, theta)
    ens = HypothesisEnsemble.uniform([("0", w_state(0, theta)), ("1", w_state(1, theta))])
    assert ensemble_success(res.povm, ens) == pytest.approx(0.75, abs=1e-12)


def test_unmapped_label():
    ens = HypothesisEnsemble.uniform([("x", w_state(0, 0.1))])
    with pytest.raises(UnmappedLabel):
        ensemble_success(LabeledPovm([("a", np.eye(2))]), ens)
    with pytest.raises(UnmappedLabel):
        ensemble_success(LabeledPovm([("a", np.eye(2))]), ens, {"y": "a"})


def test_ensemble_priors_checked():
    with pytest.raises(BadPriors):
        HypothesisEnsemble([Hypothesis("a", w_state(0, 0.1), 0.6), Hypothesis("b", w_state(1, 0.1), 0.6)])
    with pytest.raises(DimensionMismatch):
        HypothesisEnsemble(
            [Hypothesis("a", w_state(0, 0.1), 0.5), Hypothesis("b", w_product(FiringPattern(2), 0.1), 0.5)]
        )
