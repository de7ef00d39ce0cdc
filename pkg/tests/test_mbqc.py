import numpy as np
import pytest

from mbpurify import densemat as dm
from mbpurify import mbqc
from mbpurify.pauli import PauliString, bell_diagonal_from_matrix, lwn, werner
from mbpurify.protocols import deutsch_step


@pytest.fixture(scope="module")
def deutsch_pair():
    return mbqc.build_resource("deutsch", 0, "A"), mbqc.build_resource("deutsch", 0, "B")


def pairs(*states):
    return [dm.DenseState(2, s.to_matrix()) for s in states]


def test_resource_sizes():
    assert mbqc.build_resource("deutsch", 0, "A").size == 3
    assert mbqc.build_resource("deutsch", 1, "B").size == 5
    assert mbqc.build_resource("code-513", 0, "A").size == 6
    ident = mbqc.build_resource("identity", 0, "A")
    assert dm.fidelity_with_pure(dm.PHI_PLUS, ident.state) == pytest.approx(1.0)


def test_resource_budget_and_names():
    with pytest.raises(dm.QubitBudgetError):
        mbqc.build_resource("deutsch", 2, "A")
    with pytest.raises(KeyError):
        mbqc.build_resource("hashing", 0, "A")
    with pytest.raises(ValueError):
        mbqc.build_resource("deutsch", 0, "C")


def test_deutsch_resource_is_pure_ghz_class(deutsch_pair):
    res = deutsch_pair[0]
    assert np.linalg.eigvalsh(res.state.matrix)[-1] == pytest.approx(1.0)
    for q in range(3):
        np.testing.assert_allclose(dm.partial_trace(res.state, [q]).matrix, np.eye(2) / 2, atol=1e-14)


def test_perfect_read_in(deutsch_pair):
    results = mbqc.read_in(*deutsch_pair, pairs(werner(1.0), werner(1.0)))
    assert len(results) == 4**4
    prob, out = mbqc.aggregate(results)
    assert prob == pytest.approx(1.0)
    assert dm.fidelity_with_pure(dm.PHI_PLUS, out) == pytest.approx(1.0)


def test_werner_read_in(deutsch_pair):
    prob, out = mbqc.aggregate(mbqc.read_in(*deutsch_pair, pairs(werner(0.7), werner(0.7))))
    ref, ref_prob = deutsch_step(werner(0.7), werner(0.7))
    np.testing.assert_allclose(bell_diagonal_from_matrix(out.matrix), ref.lam, atol=1e-12)
    assert prob == pytest.approx(ref_prob)


def test_read_in_pair_count(deutsch_pair):
    with pytest.raises(ValueError):
        mbqc.read_in(*deutsch_pair, pairs(werner(1.0)))


def test_classification():
    verdict, corr = mbqc.classify_outcomes("deutsch", 0, ["Phi+"] * 4)
    assert verdict == "success"
    assert corr == PauliString.from_str("I")
    verdict, _ = mbqc.classify_outcomes("deutsch", 0, ["Psi+", "Phi+", "Phi+", "Phi+"])
    assert verdict in ("success", "failure")
    with pytest.raises(mbqc.ClassificationError):
        mbqc.classify_outcomes("deutsch", 0, ["Phi+"] * 3)
    with pytest.raises(mbqc.ClassificationError):
        mbqc.classify_outcomes("deutsch", 0, ["Phi+"] * 4, construction="cluster")


def test_degrade_identity_and_fidelity(deutsch_pair):
    res = deutsch_pair[0]
    assert mbqc.degrade_resource(res, lwn(1.0)).state.allclose(res.state)
    f = mbqc.resource_fidelity_under_noise(res, lwn(0.9))
    assert 0 < f < 1


def test_lwn_moves_to_pairs(deutsch_pair):
    p = 0.93
    ra = mbqc.degrade_resource(deutsch_pair[0], lwn(p))
    rb = mbqc.degrade_resource(deutsch_pair[1], lwn(p))
    prob, out = mbqc.aggregate(mbqc.read_in(ra, rb, pairs(werner(0.8), werner(0.9))))
    from mbpurify.pauli import apply_lwn_both_sides as l2

    ref, ref_prob = deutsch_step(l2(werner(0.8), p), l2(werner(0.9), p))
    np.testing.assert_allclose(bell_diagonal_from_matrix(out.matrix), l2(ref, p).lam, atol=1e-12)
    assert prob == pytest.approx(ref_prob)


def test_connect_qubit_count_and_ports():
    leaf = mbqc.build_resource("deutsch", 0, "A")
    merged = mbqc.connect(leaf, leaf, 0)
    assert merged.size == 4
    assert merged.m == 3
    assert merged.depth == 1
    with pytest.raises(ValueError):
        mbqc.connect(leaf, mbqc.build_resource("deutsch", 0, "B"))
    with pytest.raises(IndexError):
        mbqc.connect(leaf, leaf, 5)


def test_connect_identity_leaves_resource():
    leaf = mbqc.build_resource("deutsch", 0, "B")
    out = mbqc.connect(mbqc.build_resource("identity", 0, "B"), leaf, 1)
    order = list(out.input_ports) + [out.output_port]
    assert dm.permute(out.state, order).allclose(leaf.state, 1e-12)


def test_induced_map_branch_count(deutsch_pair, rng):
    rho = dm.random_density_matrix(2, rng)
    branches = mbqc.induced_map(deutsch_pair[0], rho)
    assert len(branches) == 16
    total = sum(b.weight for b in branches.values() if b is not None)
    assert total == pytest.approx(1.0)
