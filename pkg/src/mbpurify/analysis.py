"""Noisy iteration of purification maps, reachable fidelities and thresholds.

Resource noise is moved onto the pairs: each super-round applies two-sided
LWN(p) to the incoming copies, runs the perfect tree and applies two-sided
LWN(p) to the output.  Two conventions exist for chaining super-rounds:

``chained`` (default)
    every super-round applies both its input and its output noise, so two
    consecutive rounds see ``p**2`` per qubit between them.  This is the
    convention that reproduces the reference threshold and fidelity values.
``standard``
    output noise of one round doubles as the input noise of the next; only
    the first round applies input noise explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .pauli import BellDiagonalState, lwn_both_sides_vec, werner
from .protocols import PurificationFailure, PurificationMap, get_protocol

CONVENTIONS = ("chained", "standard")
DEFAULT_CONVENTION = "chained"
MAX_ROUNDS = 500
CONVERGENCE_TOL = 1e-12
BISECTION_TOL = 1e-5
BRACKET = (0.5, 1.0)
REACH_STARTS = tuple(np.round(np.arange(0.55, 0.951, 0.05), 10))
# the coarse grid misses thin purification basins just above threshold
THRESHOLD_STARTS = tuple(np.round(np.arange(0.501, 0.9995, 0.002), 10))
GAIN_TOL = 1e-12

# q_min constants for multipartite two-colorable graph-state purification
QMIN_LINEAR_CLUSTER = 0.6
QMIN_GHZ = 0.8
QMIN_BIT_FLIP = 0.4938


class BracketError(ValueError):
    pass


@dataclass(frozen=True)
class NoisyProtocolSpec:
    protocol: str
    depth: int = 0
    p: float = 1.0
    convention: str = DEFAULT_CONVENTION
    mode: str = "detect"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if self.depth < 0:
            raise ValueError("depth must be non-negative")

    @property
    def tree(self) -> PurificationMap:
        return get_protocol(self.protocol, self.depth, self.mode)

    @property
    def arity(self) -> int:
        return self.tree.arity

    def with_p(self, p: float) -> "NoisyProtocolSpec":
        return NoisyProtocolSpec(self.protocol, self.depth, p, self.convention, self.mode)


@dataclass
class IterationResult:
    trajectory: list[BellDiagonalState]
    converged: bool
    success_probs: list[float] = field(default_factory=list)
    dead: bool = False

    @property
    def fixed_point_fidelity(self) -> float:
        return self.trajectory[-1].fidelity

    @property
    def rounds(self) -> int:
        return len(self.trajectory) - 1


def super_round(spec: NoisyProtocolSpec, s: BellDiagonalState, input_noise: bool = True):
    """One noisy round: input LWN on every copy, perfect tree, output LWN."""
    lam, success = _super_round_vec(spec.tree, spec.p, tuple(s.lam), input_noise)
    return BellDiagonalState(np.array(lam)), success


def _super_round_vec(tree: PurificationMap, p: float, lam, input_noise: bool = True):
    if input_noise:
        lam = lwn_both_sides_vec(lam, p)
    out, success, _ = tree.evaluate_identical_vec(tuple(lam))
    return lwn_both_sides_vec(out, p), success


def _iterate_vec(tree, p, lam, convention, max_rounds, tol):
    traj = [np.asarray(lam, dtype=float)]
    probs = []
    for k in range(max_rounds):
        input_noise = convention == "chained" or k == 0
        try:
            nxt, prob = _super_round_vec(tree, p, traj[-1], input_noise)
        except PurificationFailure:
            return traj, probs, False, True
        traj.append(np.asarray(nxt))
        probs.append(prob)
        if nxt[0] <= 0.5:
            return traj, probs, False, True
        if abs(nxt[0] - traj[-2][0]) < tol:
            return traj, probs, True, False
    return traj, probs, False, False


def iterate(
    spec: NoisyProtocolSpec,
    start: BellDiagonalState,
    max_rounds: int = MAX_ROUNDS,
    tol: float = CONVERGENCE_TOL,
) -> IterationResult:
    """Iterate super-rounds until the fidelity changes by less than ``tol``.

    A trajectory is dead once its fidelity drops to 1/2 or below, or a round
    has vanishing success probability.
    """
    traj, probs, converged, dead = _iterate_vec(spec.tree, spec.p, tuple(start.lam), spec.convention, max_rounds, tol)
    return IterationResult([BellDiagonalState(t) for t in traj], converged, probs, dead)


def _gains(tree, p, convention, F0, max_rounds, tol):
    traj, probs, converged, dead = _iterate_vec(tree, p, tuple(werner(F0).lam), convention, max_rounds, tol)
    if converged and traj[-1][0] > F0 + GAIN_TOL:
        return traj, probs
    return None


def reachable_fidelity_record(
    spec: NoisyProtocolSpec,
    starts: Sequence[float] = REACH_STARTS,
    max_rounds: int = MAX_ROUNDS,
    tol: float = CONVERGENCE_TOL,
) -> dict | None:
    """Best attracting fixed point over the Werner starts, with its trajectory data.

    Returns ``None`` when no start converges above where it began.
    """
    tree = spec.tree
    best = None
    for F0 in starts:
        hit = _gains(tree, spec.p, spec.convention, F0, max_rounds, tol)
        if hit is None:
            continue
        traj, probs = hit
        if best is None or traj[-1][0] > best["fixed_point_fidelity"]:
            best = {
                "fixed_point_fidelity": float(traj[-1][0]),
                "success_prob_round1": float(probs[0]),
                "rounds_to_converge": len(traj) - 1,
                "start": float(F0),
            }
    return best


def reachable_fidelity(spec: NoisyProtocolSpec, starts: Sequence[float] = REACH_STARTS, **kw) -> float | None:
    rec = reachable_fidelity_record(spec, starts, **kw)
    return None if rec is None else rec["fixed_point_fidelity"]


def purifies(spec: NoisyProtocolSpec, starts: Sequence[float] = THRESHOLD_STARTS, **kw) -> bool:
    """True iff some Werner start converges to a fixed point above itself."""
    tree = spec.tree
    max_rounds = kw.get("max_rounds", MAX_ROUNDS)
    tol = kw.get("tol", CONVERGENCE_TOL)
    return any(_gains(tree, spec.p, spec.convention, F0, max_rounds, tol) is not None for F0 in starts)


def threshold(
    protocol: str,
    depth: int = 0,
    convention: str = DEFAULT_CONVENTION,
    mode: str = "detect",
    starts: Sequence[float] = THRESHOLD_STARTS,
    tol: float = BISECTION_TOL,
    bracket: tuple[float, float] = BRACKET,
) -> float:
    """Noise threshold ``1 - p_min`` by bisection on ``p``."""
    spec = NoisyProtocolSpec(protocol, depth, 1.0, convention, mode)
    lo, hi = bracket
    if purifies(spec.with_p(lo), starts) or not purifies(spec.with_p(hi), starts):
        raise BracketError(f"threshold of {protocol} depth {depth} not bracketed by p in {bracket}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if purifies(spec.with_p(mid), starts):
            hi = mid
        else:
            lo = mid
    return 1.0 - hi


# --- analytic thresholds --------------------------------------------------------


def asymptotic_threshold_bipartite() -> float:
    """``p_min = 3**(-1/4)`` for perfect purification of two-sided noisy pairs."""
    return 3.0 ** -0.25


def purification_conditions(p: float, q: float) -> tuple[bool, bool]:
    """The two requirements on a perfect protocol fed with Werner(q) pairs.

    Incoming pairs must be purifiable (``pq > 3**(-1/2)``, i.e. fidelity above
    1/2 after noise) and the output noise must leave a gain (``p > q``).
    """
    return p * q > 3.0 ** -0.5, p > q


def conditions_satisfiable(p: float) -> bool:
    # sup over q < p of p*q is p**2
    return p * p > 3.0 ** -0.5


def graph_threshold_from_qmin(q_min: float) -> float:
    """``p_min = sqrt(q_min)`` for multipartite purification with minimal Werner parameter ``q_min``."""
    if not 0.0 < q_min < 1.0:
        raise ValueError(f"q_min={q_min} outside (0, 1)")
    return float(np.sqrt(q_min))


GRAPH_ENUM_MAX = 20


def stabilizer_supports(adjacency: np.ndarray) -> np.ndarray:
    """Support weights of all ``2**N`` stabilizer-group elements of a graph state."""
    a = np.asarray(adjacency, dtype=np.int64) % 2
    n = a.shape[0]
    if a.shape != (n, n) or np.any(a != a.T) or np.any(np.diag(a)):
        raise ValueError("adjacency must be a symmetric 0/1 matrix with zero diagonal")
    if n > GRAPH_ENUM_MAX:
        raise ValueError(f"N={n} exceeds the enumeration budget {GRAPH_ENUM_MAX}")
    weights = 1 << np.arange(n, dtype=np.int64)
    xs = np.zeros(1, dtype=np.int64)
    zs = np.zeros(1, dtype=np.int64)
    for v in range(n):
        gx = 1 << v
        gz = int(a[v] @ weights)
        xs = np.concatenate([xs, xs ^ gx])
        zs = np.concatenate([zs, zs ^ gz])
    return np.bitwise_count(xs | zs).astype(np.int64)


def graph_fidelity_lwn(adjacency: np.ndarray, p: float) -> float:
    """``<G| D(p)^{(x)N} |G><G| |G>`` via the stabilizer weight enumerator.

    LWN damps every non-identity Pauli factor by ``p``, so each stabilizer
    element contributes ``p**support``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    supp = stabilizer_supports(adjacency)
    counts = np.bincount(supp)
    return float(np.sum(counts * p ** np.arange(len(counts))) / len(supp))


def resource_fidelity_estimate(m: int, p: float) -> float:
    """Heuristic ``((3p+1)/4)**(m+1)`` for an ``(m+1)``-qubit resource under LWN(p)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    return ((3.0 * p + 1.0) / 4.0) ** (m + 1)


def estimator_gap_report(p_values: Sequence[float] = (0.99, 0.95, 0.9, 0.75)) -> list[dict]:
    """Heuristic estimate against exact resource fidelities under LWN."""
    from . import mbqc
    from .pauli import lwn

    resources = [("identity", 0), ("deutsch", 0), ("deutsch", 1)]
    rows = []
    for name, depth in resources:
        res = mbqc.build_resource(name, depth, "A")
        for p in p_values:
            exact = mbqc.resource_fidelity_under_noise(res, lwn(p))
            est = resource_fidelity_estimate(res.m, p)
            rows.append(
                {"resource": f"{name}/{depth}", "m": res.m, "p": p, "exact": exact, "estimate": est, "gap": est - exact}
            )
    return rows
