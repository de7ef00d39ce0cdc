import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbpurify import oracles
from mbpurify.pauli import (
    FIVE_QUBIT_CODE,
    IDENTITY_CHANNEL,
    PERFECT,
    BellDiagonalState,
    PauliChannel,
    PauliString,
    StabilizerCode,
    apply_lwn_both_sides,
    apply_pauli_channel_one_sided,
    bell_diagonal_from_matrix,
    dephasing,
    fidelity,
    lwn,
    symplectic_product,
    twirl_to_werner,
    werner,
    werner_from_parameter,
)

simplex = st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3)
prob = st.floats(0.0, 1.0)


def bds(v):
    v = np.asarray(v)
    return BellDiagonalState(v / v.sum())


@pytest.mark.parametrize(
    "a, b, expected",
    [("X", "Z", 1), ("XX", "XX", 0), ("XZZXI", "ZXIXZ", 0), ("Y", "Y", 0), ("XI", "ZZ", 1)],
)
def test_symplectic_product(a, b, expected):
    assert symplectic_product(PauliString.from_str(a), PauliString.from_str(b)) == expected


def test_symplectic_length_mismatch():
    with pytest.raises(ValueError):
        symplectic_product(PauliString.from_str("X"), PauliString.from_str("XX"))


@given(st.text("IXYZ", min_size=1, max_size=4), st.text("IXYZ", min_size=1, max_size=4))
def test_product_matches_matrices(a, b):
    n = min(len(a), len(b))
    pa, pb = PauliString.from_str(a[:n]), PauliString.from_str(b[:n])
    np.testing.assert_allclose((pa * pb).to_matrix(), pa.to_matrix() @ pb.to_matrix(), atol=1e-12)


def test_phase_parsing_and_conj():
    p = PauliString.from_str("-iY")
    np.testing.assert_allclose(p.to_matrix(), -1j * np.array([[0, -1j], [1j, 0]]))
    np.testing.assert_allclose(p.conj().to_matrix(), p.to_matrix().conj())


def test_bell_diagonal_validation():
    with pytest.raises(ValueError):
        BellDiagonalState(np.array([0.5, 0.5, 0.5, -0.5]))
    with pytest.raises(ValueError):
        BellDiagonalState(np.array([0.5, 0.2, 0.2, 0.2]))


def test_werner_and_twirl():
    assert werner(1.0).allclose(PERFECT)
    assert fidelity(werner(0.75)) == pytest.approx(0.75)
    t = twirl_to_werner(BellDiagonalState(np.array([0.7, 0.2, 0.05, 0.05])))
    np.testing.assert_allclose(t.lam, [0.7, 0.1, 0.1, 0.1])
    with pytest.raises(ValueError):
        werner(0.2)


def test_werner_parameter_fidelity():
    assert werner_from_parameter(0.6).fidelity == pytest.approx((1 + 3 * 0.6) / 4)
    assert apply_lwn_both_sides(werner_from_parameter(0.6), 0.9).allclose(werner_from_parameter(0.6 * 0.81))


def test_matrix_round_trip():
    s = bds([0.4, 0.3, 0.2, 0.1])
    np.testing.assert_allclose(bell_diagonal_from_matrix(s.to_matrix()), s.lam, atol=1e-14)


def test_identity_channel_and_perfect_lwn():
    s = bds([0.4, 0.3, 0.2, 0.1])
    assert apply_pauli_channel_one_sided(s, IDENTITY_CHANNEL).allclose(s)
    p = 0.8
    out = apply_pauli_channel_one_sided(PERFECT, lwn(p))
    np.testing.assert_allclose(out.lam, [p + (1 - p) / 4, (1 - p) / 4, (1 - p) / 4, (1 - p) / 4])


def test_dephasing_werner_against_dense():
    s = werner(0.8)
    ch = dephasing(0.5)
    out = apply_pauli_channel_one_sided(s, ch)
    np.testing.assert_allclose(out.lam, oracles.one_sided_channel_oracle(s, ch).lam, atol=1e-12)


@pytest.mark.parametrize("i", range(4))
@pytest.mark.parametrize("e", range(4))
def test_conjugation_table_matches_dense(i, e):
    alpha = [0.0] * 4
    alpha[i] = 1.0
    lam = np.zeros(4)
    lam[e] = 1.0
    s = BellDiagonalState(lam)
    ch = PauliChannel(0.0, tuple(alpha))
    np.testing.assert_allclose(
        apply_pauli_channel_one_sided(s, ch).lam, oracles.one_sided_channel_oracle(s, ch).lam, atol=1e-12
    )


@given(simplex, prob, prob)
def test_lwn_composition(v, p1, p2):
    s = bds(v)
    twice = apply_pauli_channel_one_sided(apply_pauli_channel_one_sided(s, lwn(p1)), lwn(p2))
    assert twice.allclose(apply_pauli_channel_one_sided(s, lwn(p1 * p2)))


@given(simplex, prob)
def test_both_sides_is_two_one_sided(v, p):
    s = bds(v)
    once = apply_pauli_channel_one_sided(apply_pauli_channel_one_sided(s, lwn(p)), lwn(p))
    assert apply_lwn_both_sides(s, p).allclose(once)


@given(simplex, prob, st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3))
def test_channels_preserve_simplex(v, p, a):
    a = np.asarray(a) / sum(a)
    out = apply_pauli_channel_one_sided(bds(v), PauliChannel(p, tuple(a)))
    assert out.lam.min() >= 0
    assert out.lam.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("q, p", [(0.6, 0.9), (1.0, 0.95), (0.3, 0.5)])
def test_two_sided_werner_formula(q, p):
    # pairs that already went through two-sided noise q
    out = apply_lwn_both_sides(apply_lwn_both_sides(PERFECT, q), p)
    assert out.fidelity == pytest.approx((1 + 3 * p * p * q * q) / 4, abs=1e-12)


def test_two_sided_perfect_value():
    assert apply_lwn_both_sides(PERFECT, 0.9).fidelity == pytest.approx(0.8575)
    with pytest.raises(ValueError):
        apply_lwn_both_sides(PERFECT, 1.2)


def test_channel_validation():
    with pytest.raises(ValueError):
        PauliChannel(1.5)
    with pytest.raises(ValueError):
        PauliChannel(0.5, (0.5, 0.5, 0.5, 0.0))


def test_five_qubit_code():
    code = FIVE_QUBIT_CODE
    assert code.n == 5
    assert code.check_matrix.shape == (4, 10)
    assert code.syndrome(PauliString.identity(5)) == (0, 0, 0, 0)
    assert code.logical_class(code.logical_x) == 1
    assert code.logical_class(code.logical_z) == 3
    np.testing.assert_allclose(code.logical_y.to_matrix(), PauliString.from_str("YYYYY").to_matrix())


def test_code_validation():
    with pytest.raises(ValueError):
        StabilizerCode.from_strings(["XX", "ZI"], "XX", "ZZ")
    with pytest.raises(ValueError):
        StabilizerCode.from_strings(["ZZ", "ZZ"], "XX", "ZI")
