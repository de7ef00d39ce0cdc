"""Seeded invariant suites behind the ``verify`` and ``mbqc-check`` commands.

Every check returns a JSON-ready dict ``{name, passed, max_deviation, cases}``.
Each suite draws from its own child of the root seed, so reports do not
depend on which other suites ran.
"""

from __future__ import annotations

import numpy as np

from . import densemat as dm
from . import mbqc, oracles
from .analysis import NoisyProtocolSpec, graph_fidelity_lwn, super_round
from .densemat import BELL_LABELS
from .pauli import (
    FIVE_QUBIT_CODE,
    BellDiagonalState,
    PauliChannel,
    apply_lwn_both_sides,
    bell_diagonal_from_matrix,
    lwn,
    werner,
)
from .protocols import bennett_step, code_step, deutsch_step, get_protocol

DEFAULT_SEED = 2024
TOL = 1e-9
GRAPH_TOL = 1e-10


def _check(name, deviations, tol=TOL, cases=None, **extra):
    dev = float(max(deviations)) if len(deviations) else 0.0
    out = {"name": name, "passed": bool(dev < tol), "max_deviation": dev, "cases": cases or len(deviations)}
    out.update(extra)
    return out


def random_pauli_channel(rng: np.random.Generator) -> PauliChannel:
    return PauliChannel(float(rng.uniform()), tuple(rng.dirichlet(np.ones(4))))


def random_bell_diagonal(rng: np.random.Generator) -> BellDiagonalState:
    return BellDiagonalState(rng.dirichlet(np.ones(4)))


def _rngs(seed: int, k: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(k)]


# --- noise commutation ----------------------------------------------------------


def commutation_check(rng, n_states: int = 200, general: bool = False) -> dict:
    """Bell projector on qubits (0, 1) absorbs a channel on either of them."""
    devs = []
    for _ in range(n_states):
        rho = dm.random_density_matrix(3, rng)
        ch = random_pauli_channel(rng) if general else lwn(float(rng.uniform()))
        on_first = dm.apply_channel(rho, ch, 0)
        on_second = dm.apply_channel(rho, ch, 1)
        for label in BELL_LABELS:
            a = dm.project_bell(on_first, 0, 1, label).matrix
            b = dm.project_bell(on_second, 0, 1, label).matrix
            devs.append(np.abs(a - b).max())
    name = "pauli_channel_commutation" if general else "lwn_commutation"
    return _check(name, devs, cases=n_states)


def bell_basis_check(rng, n_channels: int = 50) -> dict:
    """Channel on either half of each Bell state gives the same state."""
    devs = []
    for _ in range(n_channels):
        ch = random_pauli_channel(rng)
        for label in BELL_LABELS:
            v = dm.bell_vector(label)
            s = dm.DenseState(2, np.outer(v, v.conj()))
            devs.append(np.abs(dm.apply_channel(s, ch, 0).matrix - dm.apply_channel(s, ch, 1).matrix).max())
    return _check("bell_basis_commutation", devs, cases=n_channels * 4)


def lwn_forms_check(rng, n_states: int = 50) -> dict:
    devs = []
    for _ in range(n_states):
        rho = dm.random_density_matrix(3, rng)
        p = float(rng.uniform())
        q = int(rng.integers(3))
        a = dm.apply_channel(rho, lwn(p), q).matrix
        b = dm.depolarize_by_partial_trace(rho, p, q).matrix
        devs.append(np.abs(a - b).max())
    return _check("lwn_kraus_vs_partial_trace", devs)


# --- closed forms against the dense oracle -------------------------------------


def step_oracle_check(rng, n_inputs: int = 100) -> list[dict]:
    out = []
    for name, fast, slow in (
        ("deutsch_step_vs_oracle", deutsch_step, oracles.deutsch_oracle),
        ("bennett_step_vs_oracle", bennett_step, oracles.bennett_oracle),
    ):
        devs = []
        for _ in range(n_inputs):
            a, b = random_bell_diagonal(rng), random_bell_diagonal(rng)
            s1, p1 = fast(a, b)
            s2, p2 = slow(a, b)
            devs.append(max(np.abs(s1.lam - s2.lam).max(), abs(p1 - p2)))
        out.append(_check(name, devs))
    return out


def code_oracle_check(rng, n_inputs: int = 3, mode: str = "detect") -> dict:
    devs = []
    for _ in range(n_inputs):
        inputs = [werner(float(rng.uniform(0.7, 1.0))) for _ in range(FIVE_QUBIT_CODE.n)]
        s1, p1 = code_step(FIVE_QUBIT_CODE, inputs, mode)
        s2, p2 = oracles.code_step_oracle(FIVE_QUBIT_CODE, inputs, mode)
        devs.append(max(np.abs(s1.lam - s2.lam).max(), abs(p1 - p2)))
    return _check(f"code_513_{mode}_vs_oracle", devs)


def random_adjacency(rng, n: int, density: float | None = None) -> np.ndarray:
    density = rng.uniform(0.2, 0.8) if density is None else density
    upper = np.triu(rng.uniform(size=(n, n)) < density, 1)
    return (upper | upper.T).astype(int)


def graph_dense_fidelity(adjacency: np.ndarray, p: float) -> float:
    psi = dm.graph_state_vector(adjacency)
    s = dm.DenseState(len(adjacency), np.outer(psi, psi.conj()))
    for q in range(s.n):
        s = dm.depolarize_by_partial_trace(s, p, q)
    return dm.fidelity_with_pure(psi, s)


def graph_fidelity_check(rng, n_graphs: int = 20, max_n: int = 8) -> dict:
    devs = []
    for _ in range(n_graphs):
        n = int(rng.integers(2, max_n + 1))
        a = random_adjacency(rng, n)
        p = float(rng.uniform())
        devs.append(abs(graph_fidelity_lwn(a, p) - graph_dense_fidelity(a, p)))
    return _check("graph_fidelity_vs_dense", devs, tol=GRAPH_TOL)


def noiseless_round_check() -> dict:
    """Super-round at p = 1 reproduces the noiseless tree bit for bit."""
    devs = []
    for name, depth in (("deutsch", 0), ("deutsch", 2), ("bennett", 1), ("code-513", 0)):
        s = werner(0.8)
        a, pa = super_round(NoisyProtocolSpec(name, depth, 1.0), s)
        b, pb = get_protocol(name, depth).evaluate_identical(s)
        same = np.array_equal(a.lam, b.lam) and pa == pb
        devs.append(0.0 if same else float(max(np.abs(a.lam - b.lam).max(), abs(pa - pb), 1.0)))
    return _check("noiseless_super_round_identical", devs, tol=1e-300)


def run_verify(seed: int = DEFAULT_SEED, n_states: int = 200, code_inputs: int = 3) -> dict:
    r = _rngs(seed, 7)
    checks = [
        commutation_check(r[0], n_states, general=False),
        commutation_check(r[1], n_states, general=True),
        bell_basis_check(r[2]),
        lwn_forms_check(r[3]),
        *step_oracle_check(r[4]),
        code_oracle_check(r[5], code_inputs),
        graph_fidelity_check(r[6]),
        noiseless_round_check(),
    ]
    return {"suite": "verify", "seed": seed, "passed": all(c["passed"] for c in checks), "checks": checks}


# --- measurement-based layer -----------------------------------------------------


def _pairs(states):
    return [dm.DenseState(2, s.to_matrix()) for s in states]


def _lam(out: dm.DenseState) -> np.ndarray:
    return bell_diagonal_from_matrix(out.matrix)


def read_in_check(rng, n_inputs: int = 50, protocol: str = "deutsch") -> list[dict]:
    ra = mbqc.build_resource(protocol, 0, "A")
    rb = mbqc.build_resource(protocol, 0, "B")
    step = deutsch_step if protocol == "deutsch" else bennett_step
    out_dev, prob_dev, total_dev = [], [], []
    for _ in range(n_inputs):
        a, b = random_bell_diagonal(rng), random_bell_diagonal(rng)
        if protocol == "bennett":
            from .pauli import twirl_to_werner

            a, b = twirl_to_werner(a), twirl_to_werner(b)
        results = mbqc.read_in(ra, rb, _pairs([a, b]))
        prob, output = mbqc.aggregate(results)
        ref, ref_prob = step(a, b)
        out_dev.append(np.abs(_lam(output) - ref.lam).max())
        prob_dev.append(abs(prob - ref_prob))
        total_dev.append(abs(sum(r[1] for r in results) - 1.0))
    return [
        _check(f"{protocol}_read_in_vs_closed_form", out_dev),
        _check(f"{protocol}_read_in_success_probability", prob_dev),
        _check(f"{protocol}_read_in_branch_total", total_dev),
    ]


def _branch_deviation(r1, r2) -> float:
    dev = 0.0
    for (rec1, p1, o1), (rec2, p2, o2) in zip(r1, r2):
        dev = max(dev, abs(p1 - p2))
        if (o1 is None) != (o2 is None):
            return 1.0
        if o1 is not None:
            dev = max(dev, p1 * np.abs(o1.matrix - o2.matrix).max())
    return dev


def noise_mobility_check(rng, n_cases: int = 10) -> dict:
    """Channel on a resource input port equals the channel on the coupled pair qubit."""
    ra = mbqc.build_resource("deutsch", 0, "A")
    rb = mbqc.build_resource("deutsch", 0, "B")
    devs = []
    for _ in range(n_cases):
        ch = random_pauli_channel(rng)
        party = "AB"[int(rng.integers(2))]
        port = int(rng.integers(2))
        a, b = random_bell_diagonal(rng), random_bell_diagonal(rng)
        pairs = _pairs([a, b])
        res = ra if party == "A" else rb
        qubit = res.input_ports[port]
        noisy_state = dm.apply_channel(res.state, ch, qubit)
        noisy_res = mbqc.ResourceState(noisy_state, party, res.input_ports, res.output_port, "deutsch", 0, ideal=res.ideal)
        r1 = mbqc.read_in(noisy_res if party == "A" else ra, noisy_res if party == "B" else rb, pairs)
        moved = list(pairs)
        moved[port] = dm.apply_channel(pairs[port], ch, 0 if party == "A" else 1)
        r2 = mbqc.read_in(ra, rb, moved)
        devs.append(_branch_deviation(r1, r2))
    return _check("noise_mobility_branchwise", devs)


def lwn_end_to_end_check(rng, n_cases: int = 5) -> dict:
    """Fully degraded resources act as input LWN, perfect step, output LWN."""
    devs = []
    for _ in range(n_cases):
        p = float(rng.uniform(0.8, 1.0))
        ra = mbqc.degrade_resource(mbqc.build_resource("deutsch", 0, "A"), lwn(p))
        rb = mbqc.degrade_resource(mbqc.build_resource("deutsch", 0, "B"), lwn(p))
        a = werner(float(rng.uniform(0.6, 1.0)))
        b = werner(float(rng.uniform(0.6, 1.0)))
        prob, output = mbqc.aggregate(mbqc.read_in(ra, rb, _pairs([a, b])))
        ref, ref_prob = deutsch_step(apply_lwn_both_sides(a, p), apply_lwn_both_sides(b, p))
        ref = apply_lwn_both_sides(ref, p)
        devs.append(max(np.abs(_lam(output) - ref.lam).max(), abs(prob - ref_prob)))
    return _check("lwn_resource_noise_end_to_end", devs)


def _ported(res: mbqc.ResourceState) -> np.ndarray:
    return dm.permute(res.state, list(res.input_ports) + [res.output_port]).matrix


def connect_check() -> list[dict]:
    conn, assoc = [], []
    for party in mbqc.PARTIES:
        leaf = mbqc.build_resource("deutsch", 0, party)
        first = mbqc.connect(leaf, mbqc.connect(leaf, leaf, 0), 2)
        second = mbqc.connect(leaf, mbqc.connect(leaf, leaf, 1), 0)
        direct = mbqc.build_resource("deutsch", 1, party)
        conn.append(np.abs(_ported(first) - direct.state.matrix).max())
        assoc.append(np.abs(_ported(first) - _ported(second)).max())
        ident = mbqc.connect(mbqc.build_resource("identity", 0, party), leaf, 0)
        conn.append(np.abs(_ported(ident) - leaf.state.matrix).max())
    return [_check("connect_matches_depth1_resource", conn), _check("connect_order_independent", assoc)]


def classification_check(construction: str = "jamiolkowski") -> dict:
    ra = mbqc.build_resource("deutsch", 0, "A")
    rb = mbqc.build_resource("deutsch", 0, "B")
    try:
        results = mbqc.read_in(ra, rb, _pairs([werner(1.0), werner(1.0)]))
        mismatched = 0
        for rec, _, _ in results:
            verdict, corr = mbqc.classify_outcomes("deutsch", 0, rec.outcomes, construction)
            mismatched += verdict != rec.verdict or corr != rec.correction
        prob, _ = mbqc.aggregate(results)
    except mbqc.ClassificationError as exc:
        return {"name": "classification_table", "passed": False, "max_deviation": None, "cases": 0, "error": str(exc)}
    return _check("classification_table", [float(mismatched), abs(prob - 1.0)], cases=len(results))


def run_mbqc_check(seed: int = DEFAULT_SEED, n_inputs: int = 50, construction: str = "jamiolkowski") -> dict:
    r = _rngs(seed, 4)
    checks = [
        classification_check(construction),
        *read_in_check(r[0], n_inputs, "deutsch"),
        *read_in_check(r[1], max(1, n_inputs // 5), "bennett"),
        noise_mobility_check(r[2]),
        lwn_end_to_end_check(r[3]),
        *connect_check(),
    ]
    return {"suite": "mbqc-check", "seed": seed, "passed": all(c["passed"] for c in checks), "checks": checks}
