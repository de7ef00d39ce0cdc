"""Why 24% resource noise is the asymptotic limit.

Moving all resource noise onto the pairs leaves a perfect protocol between
two LWN layers.  A perfect protocol gains fidelity only if the pairs it is
fed (noise q on the pairs, p on the resource) are still above 1/2, and the
output noise p must beat the incoming q.  Both hold together only above
p_min = 3**(-1/4).
"""

import numpy as np

from mbpurify.analysis import asymptotic_threshold_bipartite, conditions_satisfiable, purification_conditions

p_min = asymptotic_threshold_bipartite()
print(f"p_min = 3^(-1/4) = {p_min:.6f}  ->  tolerable noise 1 - p_min = {100 * (1 - p_min):.2f}%")

for p in (0.70, 0.75, p_min, 0.77, 0.85):
    qs = np.linspace(0.5, 1.0, 501)
    ok = [q for q in qs if all(purification_conditions(p, q))]
    window = f"q in ({ok[0]:.3f}, {ok[-1]:.3f})" if ok else "empty"
    print(f"p = {p:.4f}: satisfiable={conditions_satisfiable(p)!s:5}  working window {window}")
