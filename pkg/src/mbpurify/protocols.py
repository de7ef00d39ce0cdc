"""Closed-form m->1 purification maps on Bell-diagonal states.

All maps act on error-probability vectors ordered ``I, X, Y, Z`` (see
:mod:`mbpurify.pauli`).  The recurrences here are cross-checked against the
dense circuit oracle in :mod:`mbpurify.oracles`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .pauli import (
    FIVE_QUBIT_CODE,
    LABEL_MUL,
    LABEL_XZ,
    XZ_LABEL,
    BellDiagonalState,
    StabilizerCode,
    twirl_to_werner,
)

SUCCESS_EPS = 1e-14
MAX_ENUMERATION_QUBITS = 12


class PurificationFailure(ArithmeticError):
    """Raised when a step accepts (numerically) nothing."""


# --- two-copy steps -----------------------------------------------------------


def bilateral_cnot_vec(a, b):
    """Bilateral CNOT from pair ``a`` to ``b``, Z measurement of ``b``, keep on coincidence.

    Errors propagate on Bob's side: X of the control copies to the target,
    Z of the target copies to the control.  Coincidence means the target
    carries no X component afterwards.
    """
    aI, aX, aY, aZ = a
    bI, bX, bY, bZ = b
    out = (
        aI * bI + aZ * bZ,
        aX * bX + aY * bY,
        aX * bY + aY * bX,
        aI * bZ + aZ * bI,
    )
    norm = (aI + aZ) * (bI + bZ) + (aX + aY) * (bX + bY)
    return out, norm


def deutsch_vec(a, b):
    """Deutsch et al. step on raw 4-vectors; returns (normalized out, success)."""
    aI, aX, aY, aZ = a
    bI, bX, bY, bZ = b
    # quarter-turn rotations (Alice +x, Bob -x) swap the Y and Z labels
    norm = (aI + aY) * (bI + bY) + (aX + aZ) * (bX + bZ)
    if norm < SUCCESS_EPS:
        raise PurificationFailure("Deutsch step has vanishing success probability")
    return (
        (
            (aI * bI + aY * bY) / norm,
            (aX * bX + aZ * bZ) / norm,
            (aX * bZ + aZ * bX) / norm,
            (aI * bY + aY * bI) / norm,
        ),
        norm,
    )


def bennett_vec(a, b):
    fa, fb = a[0], b[0]
    ra, rb = (1.0 - fa) / 3.0, (1.0 - fb) / 3.0
    out, norm = bilateral_cnot_vec((fa, ra, ra, ra), (fb, rb, rb, rb))
    if norm < SUCCESS_EPS:
        raise PurificationFailure("Bennett step has vanishing success probability")
    return tuple(v / norm for v in out), norm


def deutsch_step(a: BellDiagonalState, b: BellDiagonalState) -> tuple[BellDiagonalState, float]:
    out, norm = deutsch_vec(tuple(a.lam), tuple(b.lam))
    return BellDiagonalState(np.array(out)), float(norm)


def bennett_step(a: BellDiagonalState, b: BellDiagonalState) -> tuple[BellDiagonalState, float]:
    """Twirl both inputs to Werner form, then bilateral CNOT with coincidence."""
    out, norm = bennett_vec(tuple(twirl_to_werner(a).lam), tuple(twirl_to_werner(b).lam))
    return BellDiagonalState(np.array(out)), float(norm)


# --- code-based steps ---------------------------------------------------------


@dataclass(frozen=True)
class CodeTable:
    """Per-pattern acceptance and output label for a code-based step."""

    code: StabilizerCode
    mode: str
    patterns: np.ndarray = field(repr=False)  # (4**n, n) labels
    accepted: np.ndarray = field(repr=False)  # bool (4**n,)
    output: np.ndarray = field(repr=False)  # logical label (4**n,)
    counts: np.ndarray = field(repr=False)  # distinct label-count vectors (k, 4)
    count_weights: np.ndarray = field(repr=False)  # (k, 4) multiplicity per output label


def _pattern_bits(patterns: np.ndarray):
    xz = np.array(LABEL_XZ, dtype=np.uint8)
    bits = xz[patterns]  # (N, n, 2)
    return bits[..., 0], bits[..., 1]


def _string_bits(p, n):
    return (
        np.array([(p.x >> j) & 1 for j in range(n)], dtype=np.uint8),
        np.array([(p.z >> j) & 1 for j in range(n)], dtype=np.uint8),
    )


def _symplectic(ex, ez, px, pz):
    return ((ex @ pz + ez @ px) % 2).astype(np.uint8)


def minimum_weight_decoder(code: StabilizerCode) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Lowest-weight error for each syndrome (first in enumeration order on ties)."""
    n = code.n
    best: dict[tuple[int, ...], tuple[int, ...]] = {}
    for w in range(n + 1):
        for sites in itertools.combinations(range(n), w):
            for kinds in itertools.product((1, 2, 3), repeat=w):
                pat = [0] * n
                for j, k in zip(sites, kinds):
                    pat[j] = k
                ex, ez = _pattern_bits(np.array([pat]))
                syn = tuple(
                    int(_symplectic(ex, ez, *_string_bits(g, n))[0]) for g in code.generators
                )
                best.setdefault(syn, tuple(pat))
        if len(best) == 2 ** len(code.generators):
            break
    return best


@lru_cache(maxsize=None)
def code_table(code: StabilizerCode, mode: str = "detect") -> CodeTable:
    if mode not in ("detect", "correct"):
        raise ValueError(f"unknown code mode {mode!r}")
    n = code.n
    if n > MAX_ENUMERATION_QUBITS:
        raise ValueError(f"pattern enumeration over {n} pairs is too large")
    patterns = np.array(list(itertools.product(range(4), repeat=n)), dtype=np.intp)
    ex, ez = _pattern_bits(patterns)
    syn = np.stack([_symplectic(ex, ez, *_string_bits(g, n)) for g in code.generators], axis=1)
    if mode == "detect":
        accepted = ~syn.any(axis=1)
        fx, fz = ex, ez
    else:
        accepted = np.ones(len(patterns), dtype=bool)
        decoder = minimum_weight_decoder(code)
        corr = np.array([decoder[tuple(s)] for s in syn], dtype=np.intp)
        cx, cz = _pattern_bits(corr)
        fx, fz = ex ^ cx, ez ^ cz
    anti_z = _symplectic(fx, fz, *_string_bits(code.logical_z, n))
    anti_x = _symplectic(fx, fz, *_string_bits(code.logical_x, n))
    lut = np.array([[XZ_LABEL[(a, b)] for b in (0, 1)] for a in (0, 1)])
    output = lut[anti_z, anti_x]

    counts = np.stack([(patterns == k).sum(axis=1) for k in range(4)], axis=1)
    uniq, inverse = np.unique(counts, axis=0, return_inverse=True)
    weights = np.zeros((len(uniq), 4))
    np.add.at(weights, (inverse.reshape(-1)[accepted], output[accepted]), 1.0)
    for arr in (patterns, accepted, output, uniq, weights):
        arr.flags.writeable = False
    return CodeTable(code, mode, patterns, accepted, output, uniq, weights)


def code_vec_identical(lam, table: CodeTable):
    """Code step on ``n`` identical copies; returns (normalized out, success)."""
    lam = np.asarray(lam, dtype=float)
    mono = np.prod(lam[None, :] ** table.counts, axis=1)
    out = mono @ table.count_weights
    total = out.sum()
    if total < SUCCESS_EPS:
        raise PurificationFailure("code step accepts nothing")
    return out / total, float(total)


def code_vec(lams: Sequence, table: CodeTable):
    lams = np.asarray(lams, dtype=float)
    n = table.code.n
    if lams.shape != (n, 4):
        raise ValueError(f"code step needs {n} inputs")
    probs = np.prod(lams[np.arange(n)[None, :], table.patterns], axis=1)
    out = np.bincount(table.output[table.accepted], weights=probs[table.accepted], minlength=4)
    total = out.sum()
    if total < SUCCESS_EPS:
        raise PurificationFailure("code step accepts nothing")
    return out / total, float(total)


def code_step(
    code: StabilizerCode, inputs: Sequence[BellDiagonalState], mode: str = "detect"
) -> tuple[BellDiagonalState, float]:
    """Bilateral syndrome comparison on ``n`` pairs, decoded to one pair.

    ``detect`` keeps only matching syndromes; ``correct`` accepts everything
    and undoes the minimum-weight error of the relative syndrome.
    """
    if len(inputs) != code.n:
        raise ValueError(f"{code.name or 'code'} needs {code.n} inputs, got {len(inputs)}")
    table = code_table(code, mode)
    out, total = code_vec([s.lam for s in inputs], table)
    return BellDiagonalState(out), total


def code_step_bruteforce(code: StabilizerCode, inputs: Sequence[BellDiagonalState], mode: str = "detect"):
    """Pattern-by-pattern reference using PauliString algebra (slow)."""
    from .pauli import PauliString

    n = code.n
    decoder = minimum_weight_decoder(code) if mode == "correct" else None
    out = np.zeros(4)
    for pat in itertools.product(range(4), repeat=n):
        pr = float(np.prod([inputs[j].lam[pat[j]] for j in range(n)]))
        if pr == 0.0:
            continue
        e = PauliString.from_labels(pat)
        syn = code.syndrome(e)
        if mode == "detect":
            if any(syn):
                continue
        else:
            e = e * PauliString.from_labels(decoder[syn])
        out[code.logical_class(e)] += pr
    total = out.sum()
    return BellDiagonalState(out / total), float(total)


# --- composable maps ----------------------------------------------------------

VecStep = Callable[[Sequence], tuple]


@dataclass(frozen=True)
class PurificationMap:
    """Balanced tree of identical ``node_arity -> 1`` steps.

    ``levels`` is the number of tree levels; a leaf protocol has one level,
    ``concat_tree(leaf, k)`` has ``k + 1``.  Success probability is the product
    over all nodes, since every step must succeed.
    """

    name: str
    node_arity: int
    levels: int
    step: VecStep = field(repr=False, compare=False)
    identical_step: Callable = field(repr=False, compare=False)

    @property
    def arity(self) -> int:
        return self.node_arity**self.levels

    @property
    def depth(self) -> int:
        return self.levels - 1

    @property
    def mapping(self) -> str:
        return f"{self.arity}->1"

    @property
    def structure(self):
        """Nested tuples of the leaf protocol name, one level per tuple."""
        tree = self.name
        for _ in range(self.levels - 1):
            tree = (tree,) * self.node_arity
        return tree

    def evaluate(self, inputs: Sequence[BellDiagonalState]) -> tuple[BellDiagonalState, float]:
        if len(inputs) != self.arity:
            raise ValueError(f"{self.mapping} map needs {self.arity} inputs, got {len(inputs)}")
        layer = [tuple(s.lam) for s in inputs]
        success = 1.0
        m = self.node_arity
        while len(layer) > 1:
            nxt = []
            for k in range(0, len(layer), m):
                out, prob = self.step(layer[k:k + m])
                nxt.append(tuple(out))
                success *= prob
            layer = nxt
        return BellDiagonalState(np.array(layer[0])), success

    def evaluate_identical_vec(self, lam) -> tuple[tuple, float, list[float]]:
        """Fast path for i.i.d. inputs; also returns per-level node success."""
        per_level = []
        success = 1.0
        nodes = self.arity
        for _ in range(self.levels):
            lam, prob = self.identical_step(lam)
            nodes //= self.node_arity
            per_level.append(prob)
            success *= prob**nodes
        return tuple(lam), success, per_level

    def evaluate_identical(self, s: BellDiagonalState) -> tuple[BellDiagonalState, float]:
        lam, success, _ = self.evaluate_identical_vec(tuple(s.lam))
        return BellDiagonalState(np.array(lam)), success


def concat_tree(leaf: PurificationMap, depth: int) -> PurificationMap:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return PurificationMap(
        leaf.name, leaf.node_arity, leaf.levels * (depth + 1), leaf.step, leaf.identical_step
    )


def _pairwise(fn):
    def step(inputs):
        return fn(inputs[0], inputs[1])

    return step


DEUTSCH = PurificationMap("deutsch", 2, 1, _pairwise(deutsch_vec), lambda lam: deutsch_vec(lam, lam))
BENNETT = PurificationMap("bennett", 2, 1, _pairwise(bennett_vec), lambda lam: bennett_vec(lam, lam))


def code_map(code: StabilizerCode = FIVE_QUBIT_CODE, mode: str = "detect", name: str = "code-513"):
    table = code_table(code, mode)
    return PurificationMap(
        name,
        code.n,
        1,
        lambda inputs: code_vec(inputs, table),
        lambda lam: code_vec_identical(lam, table),
    )


PROTOCOLS = ("deutsch", "bennett", "code-513")


def get_protocol(name: str, depth: int = 0, mode: str = "detect") -> PurificationMap:
    """Registry lookup: ``deutsch``, ``bennett`` or ``code-513`` at a given depth."""
    if name == "deutsch":
        leaf = DEUTSCH
    elif name == "bennett":
        leaf = BENNETT
    elif name == "code-513":
        leaf = code_map(FIVE_QUBIT_CODE, mode)
    else:
        raise KeyError(f"unknown protocol {name!r}; choose from {', '.join(PROTOCOLS)}")
    return concat_tree(leaf, depth)


def one_sided_product(e1: int, e2: int) -> int:
    return int(LABEL_MUL[e1, e2])
