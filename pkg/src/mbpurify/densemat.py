"""Dense density-matrix engine used as the brute-force oracle.

Qubit 0 is the most significant bit of a basis index.  States may be
subnormalized; their trace is kept in ``weight`` so that probabilities of
successive postselections multiply.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .pauli import LABEL_XZ, PAULI_MATRICES, PauliChannel, PauliString

MAX_QUBITS = 12
PROB_EPS = 1e-14


class QubitBudgetError(ValueError):
    pass


class UnsupportedGateError(ValueError):
    pass


def set_max_qubits(n: int) -> None:
    global MAX_QUBITS
    MAX_QUBITS = int(n)


def _check_budget(n: int) -> None:
    if n > MAX_QUBITS:
        raise QubitBudgetError(f"{n} qubits exceeds the dense budget of {MAX_QUBITS}")


@dataclass(frozen=True)
class DenseState:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        _check_budget(self.n)
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2**self.n, 2**self.n):
            raise ValueError(f"matrix shape {m.shape} does not match {self.n} qubits")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vector(cls, psi: np.ndarray) -> "DenseState":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        n = int(round(np.log2(psi.size)))
        return cls(n, np.outer(psi, psi.conj()))

    @property
    def weight(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def normalized(self) -> "DenseState":
        w = self.weight
        if w < PROB_EPS:
            raise ZeroDivisionError("cannot normalize a vanishing branch")
        return DenseState(self.n, self.matrix / w)

    def check(self, atol: float = 1e-10) -> None:
        """Raise if the state is not a valid (subnormalized) density matrix."""
        m = self.matrix
        if np.abs(m - m.conj().T).max() > atol:
            raise ValueError("matrix is not Hermitian")
        if np.linalg.eigvalsh(m).min() < -atol:
            raise ValueError("matrix has negative eigenvalues")
        if not -atol <= self.weight <= 1 + atol:
            raise ValueError(f"weight {self.weight} outside [0, 1]")

    def allclose(self, other: "DenseState", atol: float = 1e-10) -> bool:
        return self.n == other.n and bool(np.abs(self.matrix - other.matrix).max() <= atol)


# --- tensor helpers -----------------------------------------------------------


def _apply_op(matrix: np.ndarray, n: int, op: np.ndarray, qubits: Sequence[int], side: str = "both"):
    """Return ``op rho op^dagger`` with ``op`` acting on ``qubits`` (in order)."""
    k = len(qubits)
    op = np.asarray(op, dtype=complex).reshape((2,) * (2 * k))
    t = matrix.reshape((2,) * (2 * n))
    rows = list(qubits)
    if side in ("both", "left"):
        t = np.tensordot(op, t, axes=(list(range(k, 2 * k)), rows))
        t = np.moveaxis(t, list(range(k)), rows)
    if side in ("both", "right"):
        cols = [n + q for q in qubits]
        t = np.tensordot(t, op.conj(), axes=(cols, list(range(k, 2 * k))))
        t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), cols)
    return t.reshape(2**n, 2**n)


def _check_qubits(n: int, qubits: Sequence[int]) -> None:
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubit in {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")


def apply_unitary(s: DenseState, u: np.ndarray, qubits: Sequence[int] | None = None) -> DenseState:
    """Conjugate by ``u`` on ``qubits`` (all qubits when omitted)."""
    qubits = list(range(s.n)) if qubits is None else list(qubits)
    _check_qubits(s.n, qubits)
    if np.shape(u) != (2 ** len(qubits), 2 ** len(qubits)):
        raise ValueError(f"operator shape {np.shape(u)} does not fit {len(qubits)} qubits")
    return DenseState(s.n, _apply_op(s.matrix, s.n, u, qubits))


def apply_kraus(s: DenseState, kraus: Sequence[np.ndarray], qubits: Sequence[int]) -> DenseState:
    qubits = list(qubits)
    _check_qubits(s.n, qubits)
    out = sum(_apply_op(s.matrix, s.n, k, qubits) for k in kraus)
    return DenseState(s.n, out)


def apply_channel(s: DenseState, ch: PauliChannel, qubit: int) -> DenseState:
    """Pauli channel in its Kraus form on one qubit."""
    return apply_kraus(s, ch.kraus(), [qubit])


def depolarize_by_partial_trace(s: DenseState, p: float, qubit: int) -> DenseState:
    """Local white noise written as ``p rho + (1-p) I/2 x tr_j rho``."""
    _check_qubits(s.n, [qubit])
    reduced = partial_trace(s, [q for q in range(s.n) if q != qubit])
    mixed = _insert_identity(reduced.matrix, s.n, qubit) / 2.0
    return DenseState(s.n, p * s.matrix + (1 - p) * mixed)


def _insert_identity(matrix: np.ndarray, n: int, qubit: int) -> np.ndarray:
    full = np.kron(matrix, np.eye(2))  # new qubit last
    order = list(range(n))
    order.remove(qubit)
    perm = order + [qubit]  # current position -> target qubit
    t = full.reshape((2,) * (2 * n))
    src = list(range(n))
    dst = perm
    t = np.moveaxis(t, src + [n + a for a in src], dst + [n + a for a in dst])
    return t.reshape(2**n, 2**n)


def apply_pauli(s: DenseState, pauli: PauliString, side: str = "both") -> DenseState:
    """``P rho P^dagger`` (or one-sided product) without building ``P``."""
    return DenseState(s.n, _pauli_times(s.matrix, s.n, pauli, side))


@lru_cache(maxsize=256)
def _pauli_perm_phase(n: int, pauli: PauliString):
    idx = np.arange(2**n, dtype=np.int64)
    # qubit j is bit (n-1-j) of the index
    xmask = sum(((pauli.x >> j) & 1) << (n - 1 - j) for j in range(n))
    zmask = sum(((pauli.z >> j) & 1) << (n - 1 - j) for j in range(n))
    # P|b> = i^phase prod_j sigma_j|b_j>; Z gives (-1)^b, Y = iXZ gives i(-1)^b
    zpar = (np.bitwise_count(idx & zmask) & 1).astype(np.int64)
    ny = bin(xmask & zmask).count("1")
    phase = (1j ** (pauli.phase + ny)) * (1 - 2 * zpar)
    target = idx ^ xmask
    target.flags.writeable = False
    phase.flags.writeable = False
    return target, phase


def _pauli_times(m: np.ndarray, n: int, pauli: PauliString, side: str) -> np.ndarray:
    target, phase = _pauli_perm_phase(n, pauli)
    out = m
    if side in ("both", "left"):
        new = np.empty_like(out)
        new[target, :] = phase[:, None] * out
        out = new
    if side in ("both", "right"):
        new = np.empty_like(out)
        new[:, target] = out * phase.conj()[None, :]
        out = new
    return out


def expectation_pauli(s: DenseState, pauli: PauliString) -> float:
    """``Re tr(P rho)``."""
    target, phase = _pauli_perm_phase(s.n, pauli)
    # tr(P rho) = sum_b <b| P rho |b> = sum_b phase[b'] rho[b', b] with P|b'> = phase |b>
    return float(np.real(np.sum(phase * s.matrix[np.arange(2**s.n), target])))


def partial_trace(s: DenseState, keep: Sequence[int]) -> DenseState:
    keep = list(keep)
    _check_qubits(s.n, keep)
    n = s.n
    drop = [q for q in range(n) if q not in keep]
    t = s.matrix.reshape((2,) * (2 * n))
    t = np.transpose(t, keep + drop + [n + q for q in keep] + [n + q for q in drop])
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return DenseState(len(keep), np.einsum("ajbj->ab", t))


def tensor(*states: DenseState) -> DenseState:
    m = np.array([[1.0 + 0j]])
    for st in states:
        m = np.kron(m, st.matrix)
    return DenseState(sum(st.n for st in states), m)


def permute(s: DenseState, order: Sequence[int]) -> DenseState:
    """New state whose qubit ``k`` is old qubit ``order[k]``."""
    order = list(order)
    if sorted(order) != list(range(s.n)):
        raise ValueError(f"{order} is not a permutation")
    n = s.n
    t = s.matrix.reshape((2,) * (2 * n))
    t = np.transpose(t, order + [n + q for q in order])
    return DenseState(n, t.reshape(2**n, 2**n))


def fidelity_with_pure(psi: np.ndarray, s: DenseState) -> float:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return float(np.real(psi.conj() @ s.matrix @ psi))


# --- preparation --------------------------------------------------------------

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)

CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])
RX_PLUS = (np.eye(2) - 1j * PAULI_MATRICES[1]) / np.sqrt(2)  # quarter turn about +x
RX_MINUS = RX_PLUS.conj().T


def prepare_bell_pairs(k: int) -> DenseState:
    _check_budget(2 * k)
    psi = np.array([1.0 + 0j])
    for _ in range(k):
        psi = np.kron(psi, PHI_PLUS)
    return DenseState.from_vector(psi)


def graph_state_vector(adjacency: np.ndarray) -> np.ndarray:
    a = np.asarray(adjacency, dtype=int)
    n = a.shape[0]
    if a.shape != (n, n) or np.any(a != a.T) or np.any(np.diag(a)):
        raise ValueError("adjacency must be symmetric with zero diagonal")
    _check_budget(n)
    idx = np.arange(2**n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    # CZ phase: (-1)^(number of edges with both ends 1)
    edges = np.einsum("bi,ij,bj->b", bits, np.triu(a, 1), bits)
    return (1 - 2 * (edges & 1)).astype(complex) / np.sqrt(2**n)


def prepare_graph_state(adjacency: np.ndarray) -> DenseState:
    return DenseState.from_vector(graph_state_vector(adjacency))


def bell_diagonal_matrix(lams: Sequence[np.ndarray]) -> DenseState:
    """Product of Bell-diagonal pairs, qubits ordered (A1, B1, A2, B2, ...)."""
    from .pauli import BellDiagonalState

    m = np.array([[1.0 + 0j]])
    for lam in lams:
        m = np.kron(m, BellDiagonalState(np.asarray(lam)).to_matrix())
    return DenseState(2 * len(lams), m)


# --- Bell measurement ---------------------------------------------------------

BELL_LABELS = ("Phi+", "Psi+", "Psi-", "Phi-")


@dataclass(frozen=True)
class BellOutcome:
    """Bell measurement result; ``byproduct`` maps Phi+ to this state on qubit 2."""

    label: str

    def __post_init__(self):
        if self.label not in BELL_LABELS:
            raise ValueError(f"unknown Bell label {self.label!r}")

    @property
    def index(self) -> int:
        return BELL_LABELS.index(self.label)

    @property
    def byproduct(self) -> PauliString:
        return PauliString.from_labels([self.index])

    def __str__(self):
        return self.label


# rows are <Phi+|, <Psi+|, <Psi-|, <Phi-| with |B_k> = (I x sigma_k)|Phi+>
# (sigma_Y taken as iY so that Psi- = (|01> - |10>)/sqrt2)
_BELL_VECTORS = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, -1, 0],
        [1, 0, 0, -1],
    ],
    dtype=complex,
) / np.sqrt(2)


def bell_vector(label: str | int) -> np.ndarray:
    k = BELL_LABELS.index(label) if isinstance(label, str) else label
    return _BELL_VECTORS[k].copy()


def bell_measure(s: DenseState, qa: int, qb: int):
    """Bell-measure qubits ``qa, qb`` and remove them.

    Returns a list of ``(BellOutcome, probability, post_state)`` with the
    post-state left subnormalized (its weight is the branch weight).  Branches
    below ``PROB_EPS`` come back with probability 0 and ``None``.
    """
    if qa == qb:
        raise ValueError("Bell measurement needs two distinct qubits")
    _check_qubits(s.n, [qa, qb])
    n = s.n
    rest = [q for q in range(n) if q not in (qa, qb)]
    t = s.matrix.reshape((2,) * (2 * n))
    t = np.transpose(t, [qa, qb] + rest + [n + qa, n + qb] + [n + q for q in rest])
    r = 2 ** (n - 2)
    t = t.reshape(4, r, 4, r)
    blocks = np.einsum("ka,aibj,kb->kij", _BELL_VECTORS.conj(), t, _BELL_VECTORS)
    out = []
    for k in range(4):
        m = blocks[k]
        prob = float(np.real(np.trace(m)))
        if prob < PROB_EPS:
            out.append((BellOutcome(BELL_LABELS[k]), 0.0, None))
        else:
            out.append((BellOutcome(BELL_LABELS[k]), prob, DenseState(n - 2, m)))
    return out


def project_bell(s: DenseState, qa: int, qb: int, label: str) -> DenseState:
    """Keep qubits but sandwich with the Bell projector ``|B><B|`` on (qa, qb)."""
    v = bell_vector(label)
    proj = np.outer(v, v.conj())
    return DenseState(s.n, _apply_op(s.matrix, s.n, proj, [qa, qb]))


def measure_z(s: DenseState, qubit: int, outcome: int) -> DenseState:
    """Postselect a computational-basis outcome and remove the qubit."""
    _check_qubits(s.n, [qubit])
    n = s.n
    rest = [q for q in range(n) if q != qubit]
    t = s.matrix.reshape((2,) * (2 * n))
    t = np.transpose(t, [qubit] + rest + [n + qubit] + [n + q for q in rest])
    r = 2 ** (n - 1)
    t = t.reshape(2, r, 2, r)
    return DenseState(n - 1, t[outcome, :, outcome, :])


# --- circuits and Jamiolkowski states -----------------------------------------

_ONE_QUBIT = {
    "i": np.eye(2, dtype=complex),
    "x": PAULI_MATRICES[1],
    "y": PAULI_MATRICES[2],
    "z": PAULI_MATRICES[3],
    "h": H,
    "s": S,
    "sdg": S.conj().T,
    "rx+": RX_PLUS,
    "rx-": RX_MINUS,
}
_TWO_QUBIT = {"cnot": CNOT, "cz": CZ}


def run_circuit(s: DenseState, circuit: Sequence[tuple], wires: Sequence[int]) -> tuple[DenseState, list[int]]:
    """Apply a Clifford circuit with postselected Z measurements.

    ``circuit`` entries are ``(gate, *wire_labels)`` or
    ``("measure", wire, outcome)``.  ``wires[k]`` is the qubit index of wire
    label ``k``.  Returns the new state and the surviving wires' qubit indices
    (in label order).
    """
    pos = {label: q for label, q in enumerate(wires)}
    for op in circuit:
        name = op[0].lower()
        if name in _ONE_QUBIT:
            s = apply_unitary(s, _ONE_QUBIT[name], [pos[op[1]]])
        elif name in _TWO_QUBIT:
            s = apply_unitary(s, _TWO_QUBIT[name], [pos[op[1]], pos[op[2]]])
        elif name == "measure":
            q = pos.pop(op[1])
            s = measure_z(s, q, int(op[2]))
            pos = {lab: (p - 1 if p > q else p) for lab, p in pos.items()}
        else:
            raise UnsupportedGateError(f"gate {op[0]!r} is not a supported Clifford operation")
    return s, [pos[lab] for lab in sorted(pos)]


def apply_circuit(s: DenseState, circuit: Sequence[tuple], qubits: Sequence[int] | None = None):
    qubits = list(range(s.n)) if qubits is None else list(qubits)
    return run_circuit(s, circuit, qubits)[0]


def jamiolkowski_state(circuit: Sequence[tuple], n_in: int, n_out: int | None = None) -> DenseState:
    """``(Id x M)(|Phi+><Phi+|^n_in)`` with input ports first, outputs after.

    The result is subnormalized: its weight is the success probability of the
    postselected map on a maximally mixed input.
    """
    _check_budget(2 * n_in)
    s = prepare_bell_pairs(n_in)
    # pair k is (2k, 2k+1): reference 2k, wire 2k+1
    s = permute(s, [2 * k for k in range(n_in)] + [2 * k + 1 for k in range(n_in)])
    s, surviving = run_circuit(s, circuit, [n_in + k for k in range(n_in)])
    if n_out is not None and len(surviving) != n_out:
        raise ValueError(f"circuit leaves {len(surviving)} outputs, expected {n_out}")
    order = list(range(n_in)) + surviving
    return permute(s, order)


def jamiolkowski_from_kraus(kraus: np.ndarray, n_in: int) -> DenseState:
    """Choi state of a single-Kraus map ``rho -> K rho K^dagger``."""
    kraus = np.asarray(kraus, dtype=complex)
    n_out = int(round(np.log2(kraus.shape[0])))
    _check_budget(n_in + n_out)
    phi = np.eye(2**n_in, dtype=complex).reshape(-1) / np.sqrt(2**n_in)
    psi = (np.kron(np.eye(2**n_in), kraus) @ phi)
    return DenseState(n_in + n_out, np.outer(psi, psi.conj()))


def channel_from_choi(choi: DenseState, n_in: int, rho: np.ndarray) -> np.ndarray:
    """Apply the map encoded by a Choi state (input ports first) to ``rho``."""
    d_in = 2**n_in
    d_out = choi.matrix.shape[0] // d_in
    c = choi.matrix.reshape(d_in, d_out, d_in, d_out) * d_in
    return np.einsum("iajb,ij->ab", c, np.asarray(rho))


def choi_from_channel(fn, n_in: int) -> np.ndarray:
    """Tomographic reconstruction of ``(Id x fn)(|Phi+><Phi+|)`` from basis inputs."""
    d = 2**n_in
    blocks = {}
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            blocks[i, j] = np.asarray(fn(e))
    d_out = blocks[0, 0].shape[0]
    out = np.zeros((d * d_out, d * d_out), dtype=complex)
    for (i, j), b in blocks.items():
        out[i * d_out:(i + 1) * d_out, j * d_out:(j + 1) * d_out] = b / d
    return out


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> DenseState:
    d = 2**n
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return DenseState(n, m / np.trace(m))


def pauli_label_xz(label: int) -> tuple[int, int]:
    return LABEL_XZ[label]
