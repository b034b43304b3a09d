"""Conditional filters and the single-round dephasing correction."""

from dataclasses import replace

from catbypass import metrics
from catbypass.protocols import (
    ambiguity_weight, bypass_2scs, dephasing_qec, plus_minus_qubit,
)

alpha = 2.0
print("channel fidelity at 1-eta = 0.04 with measurement filters:")
for name, kw in (
    ("deterministic", {}),
    ("vacuum check after encode", dict(filter_after_pre="vacuum:0")),
    ("parity check + correction", dict(filter_after_pre="parity_correct:0:0")),
    ("ancilla-ground check after decode", dict(filter_after_post="qubit_g:0")),
):
    spec = replace(bypass_2scs(alpha), **kw)
    f, prob = metrics.channel_fidelity(spec, alpha, 0.96, 0.0)
    print(f"  {name:36s} F={f:.6f}  P={prob:.4f}")

print("\ndephasing correction with two oscillator ancillas (beta=1):")
qin = plus_minus_qubit(0.6, 0.8)
for p in (0.0, 0.05, 0.1):
    out, probs = dephasing_qec(qin, beta=1.0, p=p)
    print(f"  p={p:4.2f}: corrected fidelity {out.expect_with_ket(qin):.6f}, "
          f"syndromes {({k: round(v, 4) for k, v in probs.items() if v > 1e-9})}")
print(f"  dark-dark ambiguity floor: {ambiguity_weight(1.0):.4f}")
