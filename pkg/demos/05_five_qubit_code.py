"""Purification by bilateral syndrome comparison with the [[5,1,3]] code.

Both parties measure the four stabilizer generators on their halves of five
pairs and compare outcomes.  Detect mode keeps only matching syndromes;
correct mode decodes the syndrome difference with a minimum-weight decoder.
"""

from mbpurify import oracles
from mbpurify.analysis import NoisyProtocolSpec, reachable_fidelity, threshold
from mbpurify.pauli import FIVE_QUBIT_CODE, werner
from mbpurify.protocols import code_step

inputs = [werner(0.85)] * 5
for mode in ("detect", "correct"):
    out, prob = code_step(FIVE_QUBIT_CODE, inputs, mode)
    print(f"{mode:7}: F {0.85:.2f} -> {out.fidelity:.6f} (success {prob:.4f})")

# 10-qubit density-matrix simulation of the detect-mode step
ref, ref_prob = oracles.code_step_oracle(FIVE_QUBIT_CODE, inputs, "detect")
print(f"dense oracle (detect): F={ref.fidelity:.6f} (success {ref_prob:.4f})")

print("\nthresholds 1-p (detect mode)")
for depth in range(4):
    print(f"  {5 ** (depth + 1):>4}->1  {100 * threshold('code-513', depth):6.2f}%")
f = reachable_fidelity(NoisyProtocolSpec("code-513", 0, 0.97))
print(f"\n5->1 reachable fidelity at 1-p=3%: {100 * f:.2f}%")
