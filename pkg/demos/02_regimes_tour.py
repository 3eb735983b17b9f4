"""Tour of the four limit regimes and their normalizers.

classify_regime reads the comb's tail indices and moment structure and
decides which rescaling makes S_{ut} converge; NormalizerSet computes the
actual integer normalizing sequences.
"""

from combwalk import NormalizerSet, classify_regime, constant_comb, power_comb

cases = [
    ("constant (0.3, 0.5)", constant_comb(0.3, 0.5)),
    ("power a=2.5, c=2", power_comb(2.5, c=2.0)),
    ("power a=1.5, c=1", power_comb(1.5, c=1.0)),
    ("power a=1, c=0.01", power_comb(1.0, c=0.01)),
    ("power a=0.5", power_comb(0.5)),
]

for name, comb in cases:
    rep = classify_regime(comb)
    print(f"{name:22s} -> {rep.regime:9s} drift={rep.drift:+.3f}", end="")
    if rep.alpha:
        print(f"  alpha={rep.alpha:g}", end="")
    if rep.notes:
        print(f"  ({'; '.join(rep.notes)})", end="")
    print()

print()
print("normalizers for the generic comb, u = 10^3..10^6:")
ns = NormalizerSet(power_comb(1.5, c=1.0))
for u in (1_000, 10_000, 100_000, 1_000_000):
    print(f"  u={u:>9,d}  time(u)={ns.time(u):>9,d}  "
          f"space(u)={ns.space(u):>7,d}  walk(u)={ns.walk(u):>7,d}")
