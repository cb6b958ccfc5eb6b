"""Check the eigen-solution against two brute-force computations.

fisher_direct integrates the pooled density's Fisher information without
the Gram matrices, and the random search looks for weights with lower
information than the solver found (there should be none).
"""
from sqrtpool import Gamma, LogNormal, Normal, Panel, SearchConfig, fisher_direct, gram, min_rayleigh
from sqrtpool import search_alpha, search_alpha_nonneg

panels = {
    "mixed": Panel((Normal(3.0, 1.0), Gamma(6.0, 2.0), LogNormal(1.0, 0.3))),
    "nested normals": Panel((Normal(0.0, 1.0), Normal(0.0, 2.0))),
}

for name, panel in panels.items():
    g = gram(panel)
    sol = min_rayleigh(g)
    direct = fisher_direct(panel, sol.alpha)
    _, searched = search_alpha(panel, g, SearchConfig(seed=0))
    _, nonneg = search_alpha_nonneg(panel, g, SearchConfig(seed=0))
    print(f"{name}: alpha={sol.alpha.round(4)}")
    print(f"  eigen-solution   {sol.information:.10f}")
    print(f"  direct integral  {direct:.10f}")
    print(f"  random search    {searched:.10f}")
    print(f"  search, alpha>=0 {nonneg:.10f}")

# For the nested normals the optimum puts a negative weight on the narrow
# expert, so forcing nonnegative weights costs information.
