"""Operator identities for building the couplings out of other resources."""

from catbypass.protocols import gate_synthesis_checks, synthetic_squeeze_distance

report = gate_synthesis_checks()
print("identity checks (operator distances):")
for key, val in report.items():
    print(f"  {key:28s} {val:.3e}")

print("\ncommutator-product residual scaling (third order in tau):")
prev = None
for tau in (0.2, 0.1, 0.05, 0.025):
    d = synthetic_squeeze_distance(tau)
    note = f"  ratio vs previous: {prev / d:.2f}" if prev else ""
    print(f"  tau={tau:6.3f}: {d:.3e}{note}")
    prev = d
