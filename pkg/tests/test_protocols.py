import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbpurify import oracles
from mbpurify.pauli import FIVE_QUBIT_CODE, PERFECT, BellDiagonalState, werner
from mbpurify.protocols import (
    DEUTSCH,
    PurificationFailure,
    bennett_step,
    code_step,
    code_step_bruteforce,
    concat_tree,
    deutsch_step,
    get_protocol,
)

simplex = st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4)


def bds(v):
    v = np.asarray(v)
    return BellDiagonalState(v / v.sum())


@pytest.mark.parametrize("step", [deutsch_step, bennett_step])
def test_perfect_inputs(step):
    out, prob = step(PERFECT, PERFECT)
    assert out.allclose(PERFECT)
    assert prob == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(simplex, simplex)
def test_deutsch_matches_oracle(a, b):
    a, b = bds(a), bds(b)
    s1, p1 = deutsch_step(a, b)
    s2, p2 = oracles.deutsch_oracle(a, b)
    assert s1.allclose(s2, 1e-10)
    assert p1 == pytest.approx(p2, abs=1e-10)


@settings(max_examples=10, deadline=None)
@given(simplex, simplex)
def test_bennett_matches_oracle(a, b):
    a, b = bds(a), bds(b)
    s1, p1 = bennett_step(a, b)
    s2, p2 = oracles.bennett_oracle(a, b)
    assert s1.allclose(s2, 1e-10)
    assert p1 == pytest.approx(p2, abs=1e-10)


def test_deutsch_werner_07():
    s1, p1 = deutsch_step(werner(0.7), werner(0.7))
    s2, p2 = oracles.deutsch_oracle(werner(0.7), werner(0.7))
    assert s1.allclose(s2)
    assert p1 == pytest.approx(p2)
    assert s1.fidelity > 0.7


def test_failure_signal():
    with pytest.raises(PurificationFailure):
        deutsch_step(BellDiagonalState(np.array([1.0, 0, 0, 0])), BellDiagonalState(np.array([0, 1.0, 0, 0])))


@pytest.mark.parametrize("F", np.linspace(0.51, 0.99, 13))
def test_maximal_interval(F):
    s = werner(F)
    for _ in range(200):
        nxt, _ = deutsch_step(s, s)
        assert nxt.fidelity > s.fidelity - 1e-15
        s = nxt
    assert s.fidelity == pytest.approx(1.0, abs=1e-9)


def test_bennett_gain_iff_above_half():
    for F in (0.45, 0.5, 0.55, 0.8):
        out, _ = bennett_step(werner(F), werner(F))
        assert (out.fidelity > F + 1e-12) == (F > 0.5)


@pytest.mark.parametrize("mode", ["detect", "correct"])
def test_code_perfect(mode):
    out, prob = code_step(FIVE_QUBIT_CODE, [PERFECT] * 5, mode)
    assert out.allclose(PERFECT)
    assert prob == pytest.approx(1.0)


@pytest.mark.parametrize("mode", ["detect", "correct"])
def test_code_bruteforce(rng, mode):
    inputs = [bds(rng.dirichlet(np.ones(4)) + 0.5 * np.eye(4)[0]) for _ in range(5)]
    s1, p1 = code_step(FIVE_QUBIT_CODE, inputs, mode)
    s2, p2 = code_step_bruteforce(FIVE_QUBIT_CODE, inputs, mode)
    assert s1.allclose(s2)
    assert p1 == pytest.approx(p2, abs=1e-12)


def test_code_oracle_werner_085():
    inputs = [werner(0.85)] * 5
    s1, p1 = code_step(FIVE_QUBIT_CODE, inputs)
    s2, p2 = oracles.code_step_oracle(FIVE_QUBIT_CODE, inputs)
    assert s1.allclose(s2, 1e-10)
    assert p1 == pytest.approx(p2, abs=1e-10)


def test_code_input_count():
    with pytest.raises(ValueError):
        code_step(FIVE_QUBIT_CODE, [PERFECT] * 4)


def test_tree_arity_and_names():
    assert concat_tree(DEUTSCH, 0).mapping == "2->1"
    assert get_protocol("deutsch", 7).arity == 256
    assert get_protocol("code-513", 1).mapping == "25->1"
    assert get_protocol("deutsch", 1).structure == ("deutsch", "deutsch")
    with pytest.raises(KeyError):
        get_protocol("hashing")


def test_depth1_is_composition(rng):
    a = bds(rng.dirichlet(np.ones(4)) + np.eye(4)[0])
    first, p0 = deutsch_step(a, a)
    expected, p1 = deutsch_step(first, first)
    out, prob = get_protocol("deutsch", 1).evaluate_identical(a)
    assert out.allclose(expected)
    assert prob == pytest.approx(p0 * p0 * p1)
    general, gprob = get_protocol("deutsch", 1).evaluate([a] * 4)
    assert general.allclose(out)
    assert gprob == pytest.approx(prob)


@pytest.mark.parametrize("name, depth", [("deutsch", 3), ("bennett", 2), ("code-513", 1)])
def test_tree_perfect_success(name, depth):
    out, prob = get_protocol(name, depth).evaluate_identical(PERFECT)
    assert out.allclose(PERFECT)
    assert prob == pytest.approx(1.0)


def test_evaluate_wrong_count():
    with pytest.raises(ValueError):
        get_protocol("deutsch", 1).evaluate([PERFECT] * 3)
