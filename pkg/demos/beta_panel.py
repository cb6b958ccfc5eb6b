"""Pool three beta opinions about a proportion.

Beta pairs have closed-form Gram entries; the script checks them against
quadrature and then pools.
"""
import numpy as np

from sqrtpool import Beta, Panel, a_entry, b_entry, pool

experts = (Beta(3, 8), Beta(6, 6), Beta(9, 3))
panel = Panel(experts, ("low", "middle", "high"))

for i, di in enumerate(experts):
    for dj in experts[i:]:
        closed = a_entry(di, dj), b_entry(di, dj)
        quad = a_entry(di, dj, method="quadrature"), b_entry(di, dj, method="quadrature")
        print(f"{di} / {dj}: A {closed[0]:.10f} vs {quad[0]:.10f}, B {closed[1]:.12f} vs {quad[1]:.12f}")

pp = pool(panel)
print("alpha:", dict(zip(panel.labels, np.round(pp.alpha, 4))))
print(f"information {pp.information:.4f}, {pp.reduction_percent:.1f}% below the vaguest expert ({pp.dominant_label})")

x = np.linspace(0, 1, 21)
print(" x      pooled " + " ".join(f"{lab:>7}" for lab in panel.labels))
for xi, row in zip(x, np.column_stack([pp(x)] + [d.pdf(x) for d in experts])):
    print(f"{xi:4.2f} " + " ".join(f"{v:7.3f}" for v in row))
