"""Measurement-based purification: resource states, Bell-measurement read-in
and concatenation of resources.

A party's resource is the Jamiolkowski state of its local Clifford circuit
with every internal measurement postselected on ``0``.  Reading noisy pairs
in by Bell measurements then teleports them through the circuit; the Bell
outcomes act as Pauli byproducts that either flip the effective measurement
results (deciding success) or land on the output pair (a correction).

Outcome tables are derived once from a noiseless read-in rather than worked
out by hand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import densemat as dm
from .densemat import BELL_LABELS, BellOutcome, DenseState
from .pauli import FIVE_QUBIT_CODE, PauliChannel, PauliString, StabilizerCode, bell_diagonal_from_matrix

PARTIES = ("A", "B")
UNIT_FIDELITY_TOL = 1e-9


class ClassificationError(KeyError):
    pass


@dataclass(frozen=True)
class ResourceState:
    """Local resource of one party: ``m`` input ports plus one output port."""

    state: DenseState
    party: str
    input_ports: tuple[int, ...]
    output_port: int
    protocol: str = "custom"
    depth: int = 0
    construction: str = "jamiolkowski"
    ideal: DenseState | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.party not in PARTIES:
            raise ValueError(f"party must be 'A' or 'B', got {self.party!r}")
        ports = tuple(self.input_ports) + (self.output_port,)
        if sorted(ports) != list(range(self.state.n)):
            raise ValueError("ports must label every qubit of the resource exactly once")
        object.__setattr__(self, "input_ports", tuple(self.input_ports))
        if self.ideal is None:
            object.__setattr__(self, "ideal", self.state)

    @property
    def m(self) -> int:
        return len(self.input_ports)

    @property
    def size(self) -> int:
        return self.state.n

    @property
    def key(self) -> tuple:
        return (self.protocol, self.depth, self.construction)


@dataclass(frozen=True)
class ReadInRecord:
    outcomes: tuple[BellOutcome, ...]
    verdict: str
    correction: PauliString | None

    @property
    def success(self) -> bool:
        return self.verdict == "success"


# --- resource construction ----------------------------------------------------


def recurrence_circuit(levels: int, party: str, rotate: bool = True) -> list[tuple]:
    """Local circuit of a balanced tree of two-copy recurrence steps.

    Wire ``2k`` is the kept pair of each node and ``2k+1`` the sacrificed one.
    """
    rot = "rx+" if party == "A" else "rx-"
    wires = list(range(2**levels))
    circuit: list[tuple] = []
    for _ in range(levels):
        nxt = []
        for a, b in zip(wires[0::2], wires[1::2]):
            if rotate:
                circuit += [(rot, a), (rot, b)]
            circuit += [("cnot", a, b), ("measure", b, 0)]
            nxt.append(a)
        wires = nxt
    return circuit


def code_decoder_kraus(code: StabilizerCode, party: str) -> np.ndarray:
    """Projection onto the trivial-syndrome code space followed by decoding."""
    n = code.n
    zero = np.zeros(2**n, dtype=complex)
    zero[0] = 1.0
    for g in code.generators:
        zero = 0.5 * (zero + g.to_matrix() @ zero)
    zero /= np.linalg.norm(zero)
    one = code.logical_x.to_matrix() @ zero
    v = np.stack([zero, one], axis=1)
    k = v.conj().T
    return k if party == "A" else k.conj()


def build_resource(protocol: str, depth: int, party: str) -> ResourceState:
    """Jamiolkowski resource for one party.

    ``deutsch`` and ``bennett`` use the recurrence circuit (Bennett's twirl
    acts on the pairs, not the resource); ``code-513`` uses the decoding map of
    the five-qubit code; ``identity`` is the pass-through ``1 -> 1`` map.
    """
    if party not in PARTIES:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    if protocol == "identity":
        state = dm.jamiolkowski_state([], 1, 1)
        m = 1
    elif protocol in ("deutsch", "bennett"):
        levels = depth + 1
        m = 2**levels
        circuit = recurrence_circuit(levels, party, rotate=protocol == "deutsch")
        state = dm.jamiolkowski_state(circuit, m, 1)
    elif protocol == "code-513":
        if depth != 0:
            raise dm.QubitBudgetError("only the single-level code resource fits the dense budget")
        m = FIVE_QUBIT_CODE.n
        state = dm.jamiolkowski_from_kraus(code_decoder_kraus(FIVE_QUBIT_CODE, party), m)
    else:
        raise KeyError(f"unknown protocol {protocol!r}")
    state = state.normalized()
    return ResourceState(state, party, tuple(range(m)), m, protocol, depth)


def degrade_resource(res: ResourceState, ch: PauliChannel) -> ResourceState:
    state = res.state
    for q in range(state.n):
        state = dm.apply_channel(state, ch, q)
    return replace(res, state=state, ideal=res.ideal)


def connect(
    upstream: ResourceState, downstream: ResourceState, port: int = 0, outcome: str = "Phi+"
) -> ResourceState:
    """Bell-measure ``upstream``'s output with input ``port`` of ``downstream``.

    The given internal outcome is kept (other outcomes differ only by a Pauli
    byproduct, which the derived outcome table absorbs).  Upstream inputs take
    the place of the consumed port in the merged port order.
    """
    if upstream.party != downstream.party:
        raise ValueError("can only connect resources of the same party")
    if not 0 <= port < downstream.m:
        raise IndexError(f"downstream has no input port {port}")
    nu = upstream.size
    joint = dm.tensor(upstream.state, downstream.state)
    ideal = dm.tensor(upstream.ideal, downstream.ideal)
    qa = upstream.output_port
    qb = nu + downstream.input_ports[port]
    label = BELL_LABELS.index(outcome)

    def measured(s):
        _, prob, post = dm.bell_measure(s, qa, qb)[label]
        if post is None:
            raise ArithmeticError(f"internal outcome {outcome} has zero probability")
        return post.normalized()

    remaining = [q for q in range(joint.n) if q not in (qa, qb)]
    new_index = {q: k for k, q in enumerate(remaining)}
    ports = (
        [new_index[nu + q] for q in downstream.input_ports[:port]]
        + [new_index[q] for q in upstream.input_ports]
        + [new_index[nu + q] for q in downstream.input_ports[port + 1:]]
    )
    depth = downstream.depth + 1 if upstream.protocol == downstream.protocol else downstream.depth
    return ResourceState(
        measured(joint),
        downstream.party,
        tuple(ports),
        new_index[nu + downstream.output_port],
        downstream.protocol,
        depth,
        "connected",
        measured(ideal),
    )


# --- read-in ------------------------------------------------------------------


def _measure_all(state: DenseState, pairs_of_labels: Sequence[tuple[int, int]], labels: list[int]):
    """Bell-measure the listed (label, label) qubit pairs; yield (outcomes, prob, post)."""
    if not pairs_of_labels:
        yield (), (state.weight if state is not None else 0.0), state
        return
    (la, lb), rest = pairs_of_labels[0], pairs_of_labels[1:]
    remaining = [lab for lab in labels if lab not in (la, lb)]
    if state is None:
        for o in itertools.product(range(4), repeat=len(pairs_of_labels)):
            yield o, 0.0, None
        return
    for outcome, _, post in dm.bell_measure(state, labels.index(la), labels.index(lb)):
        for tail, prob, final in _measure_all(post, rest, remaining):
            yield (outcome.index,) + tail, prob, final


def _raw_read_in(res_a: ResourceState, res_b: ResourceState, pairs: Sequence[DenseState], use_ideal=False):
    m = res_a.m
    if res_b.m != m:
        raise ValueError("resources have different numbers of input ports")
    if len(pairs) != m:
        raise ValueError(f"expected {m} pairs, got {len(pairs)}")
    sa = res_a.ideal if use_ideal else res_a.state
    sb = res_b.ideal if use_ideal else res_b.state
    joint = dm.tensor(sa, sb, *pairs)
    na, nb = sa.n, sb.n
    # qubit labels: resource A 0..na-1, resource B na.., pair k at na+nb+2k (A), +1 (B)
    base = na + nb
    meas = [(base + 2 * k, res_a.input_ports[k]) for k in range(m)]
    meas += [(base + 2 * k + 1, na + res_b.input_ports[k]) for k in range(m)]
    labels = list(range(joint.n))
    out_order = [res_a.output_port, na + res_b.output_port]
    for outcomes, prob, post in _measure_all(joint, meas, labels):
        if post is not None:
            remaining = [lab for lab in labels if lab not in {q for pair in meas for q in pair}]
            post = dm.permute(post, [remaining.index(lab) for lab in out_order])
        yield outcomes, prob, post


_TABLES: dict[tuple, dict[tuple[int, ...], tuple[str, PauliString | None]]] = {}


def derive_table(res_a: ResourceState, res_b: ResourceState) -> dict:
    """Outcome table from a noiseless read-in of perfect pairs.

    A branch succeeds iff it has support and its output is a Bell state; the
    correction is the Pauli on Bob's qubit that maps it back to Phi+.
    """
    key = (res_a.key, res_b.key)
    if key in _TABLES:
        return _TABLES[key]
    perfect = [dm.prepare_bell_pairs(1)] * res_a.m
    table = {}
    for outcomes, prob, post in _raw_read_in(res_a, res_b, perfect, use_ideal=True):
        if prob < dm.PROB_EPS:
            table[outcomes] = ("failure", None)
            continue
        lam = bell_diagonal_from_matrix(post.normalized().matrix)
        best = int(np.argmax(lam))
        if lam[best] < 1 - UNIT_FIDELITY_TOL:
            raise ClassificationError(f"noiseless branch {outcomes} is not a Bell state: {lam}")
        table[outcomes] = ("success", PauliString.from_labels([best]))
    _TABLES[key] = table
    return table


def classify_outcomes(protocol: str, depth: int, outcomes: Sequence, construction: str = "jamiolkowski"):
    """Verdict and correction for a read-in outcome pattern of a registered protocol."""
    if construction != "jamiolkowski":
        raise ClassificationError(f"no outcome table for construction {construction!r}")
    key = (
        (protocol, depth, construction),
        (protocol, depth, construction),
    )
    if key not in _TABLES:
        derive_table(build_resource(protocol, depth, "A"), build_resource(protocol, depth, "B"))
    idx = tuple(o.index if isinstance(o, BellOutcome) else BELL_LABELS.index(o) for o in outcomes)
    try:
        return _TABLES[key][idx]
    except KeyError:
        raise ClassificationError(f"outcome pattern {outcomes} not in the derived table") from None


def read_in(res_a: ResourceState, res_b: ResourceState, pairs: Sequence[DenseState]):
    """Couple ``m`` two-qubit pairs (qubits ordered A, B) into the two resources.

    Returns one ``(ReadInRecord, probability, output)`` per Bell-outcome
    pattern; ``output`` is the corrected, normalized pair for successful
    branches and ``None`` otherwise.
    """
    table = derive_table(res_a, res_b)
    results = []
    for outcomes, prob, post in _raw_read_in(res_a, res_b, pairs):
        verdict, correction = table[outcomes]
        record = ReadInRecord(tuple(BellOutcome(BELL_LABELS[o]) for o in outcomes), verdict, correction)
        output = None
        if verdict == "success" and post is not None and prob >= dm.PROB_EPS:
            output = dm.apply_pauli(post, PauliString(2, correction.x << 1, correction.z << 1)).normalized()
        results.append((record, prob, output))
    return results


def aggregate(results) -> tuple[float, DenseState | None]:
    """Success probability and the success-weighted average output pair."""
    total = 0.0
    acc = None
    for record, prob, output in results:
        if record.success and output is not None:
            total += prob
            acc = prob * output.matrix if acc is None else acc + prob * output.matrix
    if acc is None:
        return 0.0, None
    return total, DenseState(2, acc / total)


def induced_map(res: ResourceState, rho_in: DenseState):
    """One party's branch outputs for an ``m``-qubit input (unnormalized)."""
    if rho_in.n != res.m:
        raise ValueError(f"resource expects {res.m} input qubits")
    joint = dm.tensor(rho_in, res.state)
    meas = [(k, rho_in.n + res.input_ports[k]) for k in range(res.m)]
    labels = list(range(joint.n))
    out = {}
    for outcomes, prob, post in _measure_all(joint, meas, labels):
        out[outcomes] = post
    return out


def resource_fidelity_under_noise(res: ResourceState, ch: PauliChannel) -> float:
    """Overlap of the degraded resource with the ideal (pure) one."""
    ideal = res.ideal.normalized()
    w, v = np.linalg.eigh(ideal.matrix)
    psi = v[:, -1]
    return dm.fidelity_with_pure(psi, degrade_resource(res, ch).state)
