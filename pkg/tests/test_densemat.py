import numpy as np
import pytest

from mbpurify import densemat as dm
from mbpurify.pauli import PauliString, lwn, werner


def test_bell_pair_and_partial_trace():
    s = dm.prepare_bell_pairs(1)
    assert dm.fidelity_with_pure(dm.PHI_PLUS, s) == pytest.approx(1.0)
    np.testing.assert_allclose(dm.partial_trace(s, [0]).matrix, np.eye(2) / 2, atol=1e-15)


def test_werner_fidelity_with_pure():
    s = dm.DenseState(2, werner(0.7).to_matrix())
    assert dm.fidelity_with_pure(dm.PHI_PLUS, s) == pytest.approx(0.7)


def test_edge_graph_state():
    s = dm.prepare_graph_state(np.array([[0, 1], [1, 0]]))
    for p in ("XZ", "ZX"):
        assert dm.expectation_pauli(s, PauliString.from_str(p)) == pytest.approx(1.0)
    rotated = dm.apply_unitary(s, np.kron(dm.H, np.eye(2)))
    assert dm.fidelity_with_pure(dm.PHI_PLUS, rotated) == pytest.approx(1.0)


def test_line_graph_stabilizer_group():
    a = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    s = dm.prepare_graph_state(a)
    gens = [PauliString.from_str(g) for g in ("XZI", "ZXZ", "IZX")]
    for mask in range(8):
        g = PauliString.identity(3)
        for k in range(3):
            if mask >> k & 1:
                g = g * gens[k]
        assert dm.expectation_pauli(s, g) == pytest.approx(1.0)


def test_budget():
    with pytest.raises(dm.QubitBudgetError):
        dm.prepare_bell_pairs(7)


def test_channel_identity_and_out_of_range(rng):
    s = dm.random_density_matrix(3, rng)
    assert dm.apply_channel(s, lwn(1.0), 1).allclose(s)
    with pytest.raises(IndexError):
        dm.apply_channel(s, lwn(0.5), 3)


@pytest.mark.parametrize("p", [0.0, 0.3, 0.9])
def test_lwn_two_forms(rng, p):
    s = dm.random_density_matrix(3, rng)
    for q in range(3):
        np.testing.assert_allclose(
            dm.apply_channel(s, lwn(p), q).matrix, dm.depolarize_by_partial_trace(s, p, q).matrix, atol=1e-12
        )


def test_bell_measure_own_pair():
    branches = dm.bell_measure(dm.prepare_bell_pairs(1), 0, 1)
    probs = [b[1] for b in branches]
    assert probs == pytest.approx([1, 0, 0, 0])
    assert branches[1][2] is None


def test_entanglement_swapping():
    s = dm.prepare_bell_pairs(2)
    for outcome, prob, post in dm.bell_measure(s, 1, 2):
        assert prob == pytest.approx(0.25)
        target = dm.bell_vector(outcome.label)
        assert dm.fidelity_with_pure(target, post.normalized()) == pytest.approx(1.0)


def test_bell_measure_completeness(rng):
    s = dm.random_density_matrix(4, rng)
    assert sum(b[1] for b in dm.bell_measure(s, 0, 3)) == pytest.approx(1.0)


@pytest.mark.parametrize("label", dm.BELL_LABELS)
def test_byproducts(label):
    out = dm.BellOutcome(label)
    psi = np.kron(np.eye(2), out.byproduct.to_matrix()) @ dm.PHI_PLUS
    assert abs(np.vdot(dm.bell_vector(label), psi)) == pytest.approx(1.0)


def test_jamiolkowski_identity():
    s = dm.jamiolkowski_state([], 1, 1)
    assert dm.fidelity_with_pure(dm.PHI_PLUS, s) == pytest.approx(1.0)


def test_jamiolkowski_cnot_duality(rng):
    choi = dm.jamiolkowski_state([("cnot", 0, 1)], 2, 2)
    assert choi.weight == pytest.approx(1.0)
    assert np.linalg.eigvalsh(choi.matrix)[-1] == pytest.approx(1.0)

    def direct(rho):
        return dm.CNOT @ rho @ dm.CNOT.conj().T

    np.testing.assert_allclose(dm.choi_from_channel(direct, 2), choi.matrix, atol=1e-14)
    rho = dm.random_density_matrix(2, rng).matrix
    np.testing.assert_allclose(dm.channel_from_choi(choi, 2, rho), direct(rho), atol=1e-14)


def test_jamiolkowski_postselected_weight():
    s = dm.jamiolkowski_state([("rx+", 0), ("rx+", 1), ("cnot", 0, 1), ("measure", 1, 0)], 2, 1)
    assert s.n == 3
    assert s.weight == pytest.approx(0.5)
    # every one-qubit marginal is maximally mixed, as for a 3-qubit GHZ-like resource
    for q in range(3):
        np.testing.assert_allclose(dm.partial_trace(s.normalized(), [q]).matrix, np.eye(2) / 2, atol=1e-14)


def test_unsupported_gate():
    with pytest.raises(dm.UnsupportedGateError):
        dm.jamiolkowski_state([("t", 0)], 1, 1)


def test_state_checks(rng):
    s = dm.random_density_matrix(2, rng)
    s.check()
    with pytest.raises(ValueError):
        dm.DenseState(1, np.array([[1.0, 1.0], [0.0, 0.0]])).check()
