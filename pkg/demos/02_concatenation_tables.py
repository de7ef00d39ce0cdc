"""Thresholds and reachable fidelities of concatenated recurrence protocols.

Merging k + 1 rounds into one resource means resource noise only enters once
per merged block, so deeper blocks tolerate more noise and approach the
(1 + 3p^2)/4 ceiling set by the output LWN alone.
"""

from mbpurify.analysis import NoisyProtocolSpec, reachable_fidelity, threshold
from mbpurify.protocols import get_protocol

print("Deutsch et al. recurrence: threshold 1-p")
for depth in (0, 1, 2, 4, 7):
    print(f"  {get_protocol('deutsch', depth).mapping:>7}  {100 * threshold('deutsch', depth):6.2f}%")

print("\nreachable fidelity (n/a = no purification)")
grid = (0.01, 0.03, 0.05, 0.10)
print("  mapping  " + "  ".join(f"1-p={100 * g:>3.0f}%" for g in grid))
for depth in (0, 1, 2, 4, 7):
    cells = []
    for g in grid:
        f = reachable_fidelity(NoisyProtocolSpec("deutsch", depth, 1 - g))
        cells.append("   n/a  " if f is None else f"{100 * f:7.2f} ")
    print(f"  {get_protocol('deutsch', depth).mapping:>7}  " + "  ".join(cells))
print("  ceiling  " + "  ".join(f"{100 * (1 + 3 * (1 - g) ** 2) / 4:7.2f} " for g in grid))
