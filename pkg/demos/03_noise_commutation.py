"""A Bell measurement cannot tell which of its two qubits was noisy.

For any Pauli channel M, projecting qubits (0, 1) onto a Bell state after M
acts on qubit 0 gives exactly the same operator as after M acts on qubit 1.
This is what lets resource noise be pushed onto the incoming pairs.
"""

import numpy as np

from mbpurify import densemat as dm
from mbpurify.verify import random_pauli_channel

rng = np.random.default_rng(3)
rho = dm.random_density_matrix(3, rng)
ch = random_pauli_channel(rng)
print(f"channel: p={ch.p:.3f}, alpha={np.round(ch.alpha, 3)}")
for label in dm.BELL_LABELS:
    a = dm.project_bell(dm.apply_channel(rho, ch, 0), 0, 1, label)
    b = dm.project_bell(dm.apply_channel(rho, ch, 1), 0, 1, label)
    print(f"  {label:5} weight {a.weight:.4f}  |difference| = {np.abs(a.matrix - b.matrix).max():.1e}")

# without the projection the two placements are plainly different states
diff = np.abs(dm.apply_channel(rho, ch, 0).matrix - dm.apply_channel(rho, ch, 1).matrix).max()
print(f"before measuring, the placements differ by {diff:.3f}")
