"""Pool two normal opinions and see how much information the pooled prior gives up.

Run with ``python demos/two_normals.py``.
"""
import numpy as np

from sqrtpool import Normal, Panel, gram, min_rayleigh, pool, rayleigh

# One expert is confident around -1, the other is vaguer around 1.49.
panel = Panel((Normal(-1.0, 1.0), Normal(1.49, 1.49)), ("sharp", "vague"))

pp = pool(panel)
print("weights on sqrt densities:", np.round(pp.alpha, 4))
print(f"pooled Fisher information: {pp.information:.6f}")
print(f"least informative expert:  {pp.dominant_label} (I = {4 * pp.gram.a[pp.dominant_index, pp.dominant_index]:.6f})")
print(f"reduction against it:      {pp.reduction_percent:.2f}%")

# Any other weighting gives more information than the solver's choice.
g = gram(panel)
for w in ([1, 0], [0, 1], [1, 1], [0.3, 0.9]):
    print(f"  alpha={w!s:<12} information={rayleigh(g, w):.6f}")
assert all(rayleigh(g, w) >= min_rayleigh(g).information for w in ([1, 0], [0, 1], [1, 1]))

# The pooled density is a square, so it is nonnegative even where the
# weighted square roots would cancel; print a coarse profile.
for x in np.linspace(-4, 6, 11):
    f = pp(x)
    print(f"{x:6.1f} {f:8.5f} " + "#" * int(200 * f))
