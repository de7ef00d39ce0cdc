"""Running the Deutsch et al. step by Bell-measuring pairs into resources.

Each party holds a 3-qubit Jamiolkowski resource (two input ports, one
output).  Bell-measuring the two noisy pairs into the ports teleports them
through the local circuit; 128 of the 256 outcome patterns succeed, each
with a known Pauli correction on the output pair.
"""

import numpy as np

from mbpurify import densemat as dm
from mbpurify import mbqc
from mbpurify.pauli import apply_lwn_both_sides, bell_diagonal_from_matrix, lwn, werner
from mbpurify.protocols import deutsch_step

ra = mbqc.build_resource("deutsch", 0, "A")
rb = mbqc.build_resource("deutsch", 0, "B")
pairs = [dm.DenseState(2, werner(0.8).to_matrix())] * 2

results = mbqc.read_in(ra, rb, pairs)
wins = [r for r in results if r[0].success]
print(f"{len(results)} branches, {len(wins)} successful")
rec, prob, _ = wins[5]
print(f"e.g. outcomes {[o.label for o in rec.outcomes]} -> correction {rec.correction}, p={prob:.4f}")

prob, out = mbqc.aggregate(results)
ref, ref_prob = deutsch_step(werner(0.8), werner(0.8))
print(f"read-in:   F={bell_diagonal_from_matrix(out.matrix)[0]:.6f}  success={prob:.6f}")
print(f"circuit:   F={ref.fidelity:.6f}  success={ref_prob:.6f}")

p = 0.95
noisy = [mbqc.degrade_resource(r, lwn(p)) for r in (ra, rb)]
prob, out = mbqc.aggregate(mbqc.read_in(*noisy, pairs))
moved = apply_lwn_both_sides(deutsch_step(*[apply_lwn_both_sides(werner(0.8), p)] * 2)[0], p)
print(f"\nnoisy resources (p={p}): F={bell_diagonal_from_matrix(out.matrix)[0]:.6f}")
print(f"noise moved onto pairs:  F={moved.fidelity:.6f}")

# two rounds merged into a single 5-qubit resource per party
leaf = ra
merged = mbqc.connect(leaf, mbqc.connect(leaf, leaf, 0), 2)
direct = mbqc.build_resource("deutsch", 1, "A")
ported = dm.permute(merged.state, list(merged.input_ports) + [merged.output_port])
print(f"\nconnected resource: {merged.size} qubits, equals direct 4->1 resource: "
      f"{np.allclose(ported.matrix, direct.state.matrix)}")
