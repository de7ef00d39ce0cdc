"""Graph states under local white noise.

LWN shrinks every non-identity Pauli expectation by p, so the fidelity of a
noisy graph state is an average of p**support over its stabilizer group.
Given the minimal Werner parameter q_min of a multipartite protocol, the
measurement-based threshold is p_min = sqrt(q_min).
"""

import numpy as np

from mbpurify.analysis import estimator_gap_report, graph_fidelity_lwn, graph_threshold_from_qmin
from mbpurify.cli import GRAPH_CONSTANTS, linear_cluster, star_graph
from mbpurify.verify import graph_dense_fidelity

for name, q in GRAPH_CONSTANTS:
    p = graph_threshold_from_qmin(q)
    print(f"{name:24} q_min={q:<7} p_min={p:.4f}  1-p={100 * (1 - p):.1f}%")

print("\nfidelity of N=10 graph states under LWN(p)")
for p in (0.99, 0.95, 0.9):
    print(f"  p={p}: cluster {graph_fidelity_lwn(linear_cluster(10), p):.4f}, GHZ {graph_fidelity_lwn(star_graph(10), p):.4f}")

a = linear_cluster(6)
print(f"\nenumerator vs dense, 6-vertex line at p=0.9: "
      f"{graph_fidelity_lwn(a, 0.9):.12f} / {graph_dense_fidelity(a, 0.9):.12f}")

print("\n((3p+1)/4)^(m+1) against exact resource fidelities")
for row in estimator_gap_report((0.95, 0.9)):
    print(f"  {row['resource']:11} m={row['m']} p={row['p']}: exact {row['exact']:.4f}, estimate {row['estimate']:.4f}")
