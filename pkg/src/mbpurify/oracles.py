"""Dense-matrix reference implementations of the purification steps.

These simulate the actual circuits on density matrices and only read the
Bell-diagonal coefficients off at the end, so they share nothing with the
closed-form recurrences in :mod:`mbpurify.protocols` beyond the label
convention.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import densemat as dm
from .pauli import BellDiagonalState, PauliString, StabilizerCode, bell_diagonal_from_matrix

# pair k occupies qubits (2k, 2k+1) = (Alice, Bob)


def _two_copy_circuit(a, b, rotate: bool):
    rho = dm.bell_diagonal_matrix([a, b])
    if rotate:
        for q, u in ((0, dm.RX_PLUS), (2, dm.RX_PLUS), (1, dm.RX_MINUS), (3, dm.RX_MINUS)):
            rho = dm.apply_unitary(rho, u, [q])
    rho = dm.apply_unitary(rho, dm.CNOT, [0, 2])
    rho = dm.apply_unitary(rho, dm.CNOT, [1, 3])
    kept = None
    for o in (0, 1):
        branch = dm.measure_z(dm.measure_z(rho, 2, o), 2, o)
        kept = branch.matrix if kept is None else kept + branch.matrix
    success = float(np.real(np.trace(kept)))
    lam = bell_diagonal_from_matrix(kept) / success
    return BellDiagonalState(lam), success


def deutsch_oracle(a: BellDiagonalState, b: BellDiagonalState):
    return _two_copy_circuit(a.lam, b.lam, rotate=True)


@lru_cache(maxsize=1)
def single_qubit_cliffords() -> tuple[np.ndarray, ...]:
    """The 24 single-qubit Clifford unitaries, modulo global phase."""
    gens = [dm.H, dm.S]
    found: list[np.ndarray] = [np.eye(2, dtype=complex)]
    frontier = list(found)

    def key(u):
        k = np.flatnonzero(np.abs(u.reshape(-1)) > 1e-9)[0]
        v = u.reshape(-1) / (u.reshape(-1)[k] / abs(u.reshape(-1)[k]))
        return tuple(np.round(v, 8))

    seen = {key(found[0])}
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                w = g @ u
                k = key(w)
                if k not in seen:
                    seen.add(k)
                    found.append(w)
                    nxt.append(w)
        frontier = nxt
    return tuple(found)


def twirl_oracle(rho: np.ndarray) -> np.ndarray:
    """Average a two-qubit state over bilateral ``U x U*`` Clifford rotations."""
    out = np.zeros((4, 4), dtype=complex)
    cl = single_qubit_cliffords()
    for u in cl:
        v = np.kron(u, u.conj())
        out += v @ rho @ v.conj().T
    return out / len(cl)


def bennett_oracle(a: BellDiagonalState, b: BellDiagonalState):
    ta = bell_diagonal_from_matrix(twirl_oracle(a.to_matrix()))
    tb = bell_diagonal_from_matrix(twirl_oracle(b.to_matrix()))
    return _two_copy_circuit(ta, tb, rotate=False)


def _bilateral(p: PauliString, on_alice: bool = True, on_bob: bool = True) -> PauliString:
    """Embed ``p`` on Alice's qubits and ``conj(p)`` on Bob's (interleaved layout)."""
    n = p.n
    x = z = 0
    phase = 0
    pc = p.conj()
    for j in range(n):
        if on_alice:
            x |= ((p.x >> j) & 1) << (2 * j)
            z |= ((p.z >> j) & 1) << (2 * j)
        if on_bob:
            x |= ((pc.x >> j) & 1) << (2 * j + 1)
            z |= ((pc.z >> j) & 1) << (2 * j + 1)
    if on_alice:
        phase += p.phase
    if on_bob:
        phase += pc.phase
    return PauliString(2 * n, x, z, phase)


def _half_projector(m: np.ndarray, n: int, ga: PauliString, gb: PauliString, ca: int, cb: int, side: str):
    """``(I + ca gA)(I + cb gB)/4`` multiplied onto ``m`` from one side."""
    t_a = dm._pauli_times(m, n, ga, side)
    t_b = dm._pauli_times(m, n, gb, side)
    t_ab = dm._pauli_times(t_a, n, gb, side)
    return (m + ca * t_a + cb * t_b + ca * cb * t_ab) / 4.0


def _matched_measurement(m: np.ndarray, n: int, g: PauliString, offset: int = 0) -> np.ndarray:
    """Measure ``g`` on Alice and ``g*`` on Bob; keep branches whose outcomes differ by ``offset``."""
    ga = _bilateral(g, on_bob=False)
    gb = _bilateral(g, on_alice=False)
    out = np.zeros_like(m)
    for bit in (0, 1):
        ca = 1 - 2 * bit
        cb = 1 - 2 * (bit ^ offset)
        left = _half_projector(m, n, ga, gb, ca, cb, "left")
        out += _half_projector(left, n, ga, gb, ca, cb, "right")
    return out


def _logical_bell_diagonal(m: np.ndarray, n: int, code: StabilizerCode) -> np.ndarray:
    st = dm.DenseState(n, m)
    corr = {}
    for name, op in (("X", code.logical_x), ("Y", code.logical_y), ("Z", code.logical_z)):
        corr[name] = dm.expectation_pauli(st, _bilateral(op))
    w = st.weight
    cx, cy, cz = corr["X"] / w, corr["Y"] / w, corr["Z"] / w
    return np.array(
        [
            1 + cx + cy + cz,
            1 + cx - cy - cz,
            1 - cx + cy - cz,
            1 - cx - cy + cz,
        ]
    ) / 4.0


def code_step_oracle(code: StabilizerCode, inputs: Sequence[BellDiagonalState], mode: str = "detect"):
    """Bilateral stabilizer measurement on ``n`` dense Bell pairs (``2n`` qubits).

    The decoded pair is read out through the logical correlators
    ``<L x L*>`` for ``L`` in ``X, Y, Z``.
    """
    from .protocols import minimum_weight_decoder

    n = 2 * code.n
    rho = dm.bell_diagonal_matrix([s.lam for s in inputs]).matrix
    if mode == "detect":
        acc = rho
        for g in code.generators:
            acc = _matched_measurement(acc, n, g)
    elif mode == "correct":
        decoder = minimum_weight_decoder(code)
        acc = np.zeros_like(rho)
        for rel in itertools.product((0, 1), repeat=len(code.generators)):
            branch = rho
            for g, r in zip(code.generators, rel):
                branch = _matched_measurement(branch, n, g, r)
            fix = PauliString.from_labels(decoder[rel])
            acc += dm._pauli_times(branch, n, _bilateral(fix, on_alice=False), "both")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    success = float(np.real(np.trace(acc)))
    return BellDiagonalState(_logical_bell_diagonal(acc, n, code)), success


def one_sided_channel_oracle(s: BellDiagonalState, ch) -> BellDiagonalState:
    """Apply a Pauli channel to Bob's qubit of the dense pair."""
    st = dm.DenseState(2, s.to_matrix())
    out = dm.apply_channel(st, ch, 1)
    return BellDiagonalState(bell_diagonal_from_matrix(out.matrix))


def bell_pair_lwn_oracle(s: BellDiagonalState, p: float) -> BellDiagonalState:
    st = dm.DenseState(2, s.to_matrix())
    for q in (0, 1):
        st = dm.depolarize_by_partial_trace(st, p, q)
    return BellDiagonalState(bell_diagonal_from_matrix(st.matrix))

