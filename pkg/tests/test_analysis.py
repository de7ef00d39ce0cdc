import numpy as np
import pytest

from mbpurify import analysis as an
from mbpurify import densemat as dm
from mbpurify.pauli import werner
from mbpurify.protocols import get_protocol
from mbpurify.verify import graph_dense_fidelity, random_adjacency


def test_spec_validation():
    with pytest.raises(ValueError):
        an.NoisyProtocolSpec("deutsch", 0, 1.1)
    with pytest.raises(ValueError):
        an.NoisyProtocolSpec("deutsch", 0, 0.9, convention="sideways")
    assert an.NoisyProtocolSpec("code-513", 1).arity == 25


def test_super_round_noiseless():
    s = werner(0.75)
    out, prob = an.super_round(an.NoisyProtocolSpec("deutsch", 0, 1.0), s)
    ref, ref_prob = get_protocol("deutsch").evaluate_identical(s)
    assert np.array_equal(out.lam, ref.lam)
    assert prob == ref_prob


def test_iteration_converges_noiselessly():
    res = an.iterate(an.NoisyProtocolSpec("deutsch", 0, 1.0), werner(0.75))
    assert res.converged
    assert res.fixed_point_fidelity == pytest.approx(1.0, abs=1e-9)


def test_iteration_dies_below_threshold():
    res = an.iterate(an.NoisyProtocolSpec("deutsch", 0, 0.9), werner(0.9))
    assert res.dead
    assert not res.converged


@pytest.mark.parametrize("one_minus_p, expected", [(0.01, 0.962), (0.03, 0.847), (0.05, None)])
def test_two_to_one_fidelities(one_minus_p, expected):
    f = an.reachable_fidelity(an.NoisyProtocolSpec("deutsch", 0, 1 - one_minus_p))
    if expected is None:
        assert f is None
    else:
        assert f == pytest.approx(expected, abs=1.5e-3)


def test_deep_tree_reaches_noise_limit():
    p = 0.99
    f = an.reachable_fidelity(an.NoisyProtocolSpec("deutsch", 7, p))
    assert f == pytest.approx((1 + 3 * p * p) / 4, abs=1e-3)


def test_conventions_differ():
    chained = an.reachable_fidelity(an.NoisyProtocolSpec("deutsch", 0, 0.99, "chained"))
    standard = an.reachable_fidelity(an.NoisyProtocolSpec("deutsch", 0, 0.99, "standard"))
    assert standard > chained


def test_threshold_bracket_error():
    with pytest.raises(an.BracketError):
        an.threshold("deutsch", 0, bracket=(0.99, 1.0))


def test_threshold_depth0():
    assert an.threshold("deutsch", 0) == pytest.approx(0.035, abs=1.5e-3)


def test_asymptotic():
    p = an.asymptotic_threshold_bipartite()
    assert p == 3 ** -0.25
    assert an.purification_conditions(p, p)[0] is False
    assert p * p == pytest.approx(3 ** -0.5)
    assert an.conditions_satisfiable(p + 1e-9)
    assert not an.conditions_satisfiable(p - 1e-9)


@pytest.mark.parametrize("q, expected", [(0.6, 0.2254), (0.8, 0.1056), (0.4938, 0.2973)])
def test_graph_threshold(q, expected):
    assert 1 - an.graph_threshold_from_qmin(q) == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.2])
def test_graph_threshold_range(q):
    with pytest.raises(ValueError):
        an.graph_threshold_from_qmin(q)


def test_graph_fidelity_edge():
    edge = np.array([[0, 1], [1, 0]])
    for p in (0.0, 0.5, 0.9, 1.0):
        assert an.graph_fidelity_lwn(edge, p) == pytest.approx((1 + 3 * p * p) / 4)


def test_graph_fidelity_ghz4():
    star = np.zeros((4, 4), dtype=int)
    star[0, 1:] = star[1:, 0] = 1
    assert an.graph_fidelity_lwn(star, 0.9) == pytest.approx(graph_dense_fidelity(star, 0.9), abs=1e-12)


def test_graph_fidelity_random(rng):
    for _ in range(5):
        a = random_adjacency(rng, int(rng.integers(2, 7)))
        assert an.graph_fidelity_lwn(a, 0.8) == pytest.approx(graph_dense_fidelity(a, 0.8), abs=1e-10)


def test_graph_enumerator_limits():
    with pytest.raises(ValueError):
        an.graph_fidelity_lwn(np.ones((3, 3), dtype=int), 0.5)
    with pytest.raises(ValueError):
        an.graph_fidelity_lwn(np.zeros((21, 21), dtype=int), 0.5)


def test_resource_estimate():
    assert an.resource_fidelity_estimate(3, 1.0) == 1.0
    assert an.resource_fidelity_estimate(1, 0.0) == pytest.approx(1 / 16)
    with pytest.raises(ValueError):
        an.resource_fidelity_estimate(0, 0.5)


def test_estimator_gap_report():
    rows = an.estimator_gap_report((0.9,))
    ident = rows[0]
    assert ident["exact"] == pytest.approx((1 + 3 * 0.81) / 4)
    assert ident["gap"] != pytest.approx(0.0)
