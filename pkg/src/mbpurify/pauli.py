"""Pauli strings, Bell-diagonal states and Pauli noise channels.

Bell-diagonal states are stored as the 4-vector of error probabilities
``lam[E]`` for the mixture ``sum_E lam[E] (I x E)|Phi+><Phi+|(I x E)``, i.e.
the error label always sits on the *second* qubit of the pair.  Labels are
ordered ``I, X, Y, Z`` which corresponds to the Bell states
``Phi+, Psi+, Psi-, Phi-``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-12

I, X, Y, Z = 0, 1, 2, 3
LABELS = "IXYZ"

# label -> (x bit, z bit)
LABEL_XZ = ((0, 0), (1, 0), (1, 1), (0, 1))
XZ_LABEL = {xz: k for k, xz in enumerate(LABEL_XZ)}

# Pauli group multiplication on labels, phases dropped.
LABEL_MUL = np.array(
    [[XZ_LABEL[(a[0] ^ b[0], a[1] ^ b[1])] for b in LABEL_XZ] for a in LABEL_XZ],
    dtype=np.intp,
)

PAULI_MATRICES = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """``i**phase`` times a tensor product of Hermitian Paulis.

    Site ``j`` is ``X^x_j Z^z_j`` with ``(1, 1)`` meaning ``Y`` (not ``XZ``).
    Bits are packed into Python ints so there is no length limit.
    """

    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("PauliString needs at least one qubit")
        if self.x >> self.n or self.z >> self.n or self.x < 0 or self.z < 0:
            raise ValueError("bit-vector longer than n")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_str(cls, s: str) -> "PauliString":
        """Parse e.g. ``"XZZXI"``, ``"-iY"`` or ``"+XX"``."""
        phase = 0
        s = s.strip()
        if s.startswith("-"):
            phase += 2
            s = s[1:]
        elif s.startswith("+"):
            s = s[1:]
        if s.startswith("i"):
            phase += 1
            s = s[1:]
        x = z = 0
        for j, c in enumerate(s):
            try:
                xb, zb = LABEL_XZ[LABELS.index(c)]
            except ValueError:
                raise ValueError(f"bad Pauli symbol {c!r}") from None
            x |= xb << j
            z |= zb << j
        return cls(len(s), x, z, phase)

    @classmethod
    def from_labels(cls, labels: Sequence[int], phase: int = 0) -> "PauliString":
        x = z = 0
        for j, lab in enumerate(labels):
            xb, zb = LABEL_XZ[lab]
            x |= xb << j
            z |= zb << j
        return cls(len(labels), x, z, phase)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(
            XZ_LABEL[((self.x >> j) & 1, (self.z >> j) & 1)] for j in range(self.n)
        )

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def __str__(self):
        prefix = ("", "i", "-", "-i")[self.phase]
        return prefix + "".join(LABELS[k] for k in self.labels)

    def __repr__(self):
        return f"PauliString({str(self)!r})"

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError("length mismatch")
        x1, z1, x2, z2 = self.x, self.z, other.x, other.z
        mask = (1 << self.n) - 1
        ys = x1 & z1
        xs = x1 & ~z1 & mask
        zs = ~x1 & z1 & mask
        b_x = x2 & ~z2 & mask
        b_y = x2 & z2
        b_z = ~x2 & z2 & mask
        g = (
            _popcount(ys & b_z) - _popcount(ys & b_x)
            + _popcount(xs & b_y) - _popcount(xs & b_z)
            + _popcount(zs & b_x) - _popcount(zs & b_y)
        )
        return PauliString(self.n, x1 ^ x2, z1 ^ z2, self.phase + other.phase + g)

    def commutes(self, other: "PauliString") -> bool:
        return symplectic_product(self, other) == 0

    def conj(self) -> "PauliString":
        """Complex conjugate (``Y* = -Y``)."""
        return PauliString(self.n, self.x, self.z, -self.phase + 2 * _popcount(self.x & self.z))

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n`` matrix; qubit 0 is the most significant bit."""
        out = np.array([[1.0 + 0j]])
        for lab in self.labels:
            out = np.kron(out, PAULI_MATRICES[lab])
        return (1j ** self.phase) * out


def symplectic_product(a: PauliString, b: PauliString) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")
    return _popcount((a.x & b.z) ^ (a.z & b.x)) & 1


# --- Bell-diagonal states -----------------------------------------------------


@dataclass(frozen=True)
class BellDiagonalState:
    """Two-qubit Bell-diagonal state as error probabilities over I, X, Y, Z."""

    lam: np.ndarray = field(repr=False)

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float).reshape(-1)
        if lam.shape != (4,):
            raise ValueError("Bell-diagonal state needs four coefficients")
        if np.any(lam < -ATOL):
            raise ValueError(f"negative coefficient in {lam}")
        if abs(lam.sum() - 1.0) > ATOL:
            raise ValueError(f"coefficients sum to {lam.sum()!r}, not 1")
        lam = np.clip(lam, 0.0, None)
        lam.flags.writeable = False
        object.__setattr__(self, "lam", lam)

    @classmethod
    def normalized(cls, weights: Iterable[float]) -> "BellDiagonalState":
        w = np.asarray(list(weights), dtype=float)
        total = w.sum()
        if total < 1e-14:
            raise ZeroDivisionError("cannot normalize a vanishing Bell-diagonal weight")
        return cls(w / total)

    @property
    def fidelity(self) -> float:
        return float(self.lam[I])

    def __repr__(self):
        return "BellDiagonalState(" + ", ".join(f"{v:.6g}" for v in self.lam) + ")"

    def allclose(self, other: "BellDiagonalState", atol: float = ATOL) -> bool:
        return bool(np.allclose(self.lam, other.lam, atol=atol, rtol=0))

    def to_matrix(self) -> np.ndarray:
        """4x4 density matrix on (qubit A, qubit B)."""
        phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        rho = np.zeros((4, 4), dtype=complex)
        for lab, w in enumerate(self.lam):
            v = np.kron(np.eye(2), PAULI_MATRICES[lab]) @ phi
            rho += w * np.outer(v, v.conj())
        return rho


PERFECT = BellDiagonalState(np.array([1.0, 0.0, 0.0, 0.0]))


def werner(F: float) -> BellDiagonalState:
    if not 0.25 - ATOL <= F <= 1.0 + ATOL:
        raise ValueError(f"Werner fidelity {F} outside [1/4, 1]")
    r = (1.0 - F) / 3.0
    return BellDiagonalState(np.array([F, r, r, r]))


def werner_from_parameter(q: float) -> BellDiagonalState:
    """Werner state ``q |Phi+><Phi+| + (1-q) I/4`` (fidelity ``(1+3q)/4``)."""
    return werner((1.0 + 3.0 * q) / 4.0)


def fidelity(s: BellDiagonalState) -> float:
    return s.fidelity


def twirl_to_werner(s: BellDiagonalState) -> BellDiagonalState:
    F = s.lam[I]
    r = (1.0 - F) / 3.0
    return BellDiagonalState(np.array([F, r, r, r]))


def bell_diagonal_from_matrix(rho: np.ndarray) -> np.ndarray:
    """Diagonal of a two-qubit matrix in the I, X, Y, Z error basis (unnormalized)."""
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    out = np.empty(4)
    for lab in range(4):
        v = np.kron(np.eye(2), PAULI_MATRICES[lab]) @ phi
        out[lab] = np.real(v.conj() @ rho @ v)
    return out


# --- Pauli channels -----------------------------------------------------------


@dataclass(frozen=True)
class PauliChannel:
    """``rho -> p rho + (1-p) sum_i alpha_i s_i rho s_i``."""

    p: float
    alpha: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")
        alpha = tuple(float(a) for a in self.alpha)
        if len(alpha) != 4 or min(alpha) < 0 or abs(sum(alpha) - 1) > ATOL:
            raise ValueError(f"invalid Pauli weights {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def probabilities(self) -> np.ndarray:
        """Total weight of each Pauli ``I, X, Y, Z`` in the Kraus decomposition."""
        w = (1.0 - self.p) * np.asarray(self.alpha)
        w[I] += self.p
        return w

    def kraus(self) -> list[np.ndarray]:
        return [np.sqrt(w) * PAULI_MATRICES[k] for k, w in enumerate(self.probabilities) if w > 0]

    def then(self, other: "PauliChannel") -> "PauliChannel":
        """Composite channel (self first); returned in ``p=0`` form."""
        a, b = self.probabilities, other.probabilities
        w = np.zeros(4)
        for i in range(4):
            for j in range(4):
                w[LABEL_MUL[i, j]] += a[i] * b[j]
        return PauliChannel(0.0, tuple(w))


def lwn(p: float) -> PauliChannel:
    """Local white noise; equals ``p rho + (1-p) I/2 x tr rho``."""
    return PauliChannel(p, (0.25, 0.25, 0.25, 0.25))


def bit_flip(p: float) -> PauliChannel:
    return PauliChannel(p, (0.5, 0.5, 0.0, 0.0))


def dephasing(p: float) -> PauliChannel:
    return PauliChannel(p, (0.5, 0.0, 0.0, 0.5))


IDENTITY_CHANNEL = PauliChannel(1.0)


def apply_pauli_channel_one_sided(s: BellDiagonalState, ch: PauliChannel) -> BellDiagonalState:
    w = ch.probabilities
    lam = s.lam
    out = np.zeros(4)
    for i in range(4):
        if w[i]:
            out += w[i] * lam[LABEL_MUL[i]]
    return BellDiagonalState(out / out.sum())


def apply_lwn_both_sides(s: BellDiagonalState, p: float) -> BellDiagonalState:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    return BellDiagonalState(lwn_both_sides_vec(s.lam, p))


def lwn_both_sides_vec(lam: np.ndarray, p: float) -> np.ndarray:
    p2 = p * p
    return p2 * np.asarray(lam) + (1.0 - p2) / 4.0


# --- stabilizer codes ---------------------------------------------------------


def gf2_rank(mat: np.ndarray) -> int:
    m = np.array(mat, dtype=np.uint8) % 2
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, c]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass(frozen=True)
class StabilizerCode:
    """An ``[[n, 1, d]]`` stabilizer code with logical representatives."""

    generators: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    name: str = ""

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        n = self.n
        if len(gens) != n - 1:
            raise ValueError(f"need {n - 1} generators for one logical qubit, got {len(gens)}")
        if any(g.n != n for g in gens) or self.logical_x.n != n or self.logical_z.n != n:
            raise ValueError("inconsistent string lengths")
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                if not gens[a].commutes(gens[b]):
                    raise ValueError(f"generators {gens[a]} and {gens[b]} anticommute")
        if gf2_rank(self.check_matrix) != len(gens):
            raise ValueError("generators are not independent over GF(2)")
        for g in gens:
            if not (g.commutes(self.logical_x) and g.commutes(self.logical_z)):
                raise ValueError(f"logical operator does not commute with {g}")
        if self.logical_x.commutes(self.logical_z):
            raise ValueError("logical X and Z must anticommute")

    @classmethod
    def from_strings(cls, generators: Sequence[str], logical_x: str, logical_z: str, name: str = ""):
        return cls(
            tuple(PauliString.from_str(g) for g in generators),
            PauliString.from_str(logical_x),
            PauliString.from_str(logical_z),
            name,
        )

    @property
    def n(self) -> int:
        return self.logical_x.n

    @property
    def check_matrix(self) -> np.ndarray:
        """``(n-1) x 2n`` symplectic matrix ``[x | z]``."""
        n = self.n
        out = np.zeros((len(self.generators), 2 * n), dtype=np.uint8)
        for r, g in enumerate(self.generators):
            for j in range(n):
                out[r, j] = (g.x >> j) & 1
                out[r, n + j] = (g.z >> j) & 1
        return out

    @property
    def logical_y(self) -> PauliString:
        y = self.logical_x * self.logical_z
        # make it Hermitian: XZ = -iY per site
        return PauliString(y.n, y.x, y.z, y.phase + 1)

    def syndrome(self, e: PauliString) -> tuple[int, ...]:
        return tuple(symplectic_product(e, g) for g in self.generators)

    def logical_class(self, e: PauliString) -> int:
        """Logical label ``I, X, Y, Z`` of an error commuting with the stabilizer."""
        return XZ_LABEL[(symplectic_product(e, self.logical_z), symplectic_product(e, self.logical_x))]


FIVE_QUBIT_CODE = StabilizerCode.from_strings(
    ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"], "XXXXX", "ZZZZZ", name="[[5,1,3]]"
)
