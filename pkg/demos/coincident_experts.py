"""What happens when two experts say exactly the same thing.

B then has a zero eigenvalue and the weights are not identifiable; the
solver drops the null direction and the pooled density is the same as if
the duplicate had never been there.
"""
import numpy as np

from sqrtpool import Normal, Panel, basis_transform, gram, pool

d, e = Normal(0.0, 1.0), Normal(2.0, 1.5)
with_dup = Panel((d, d, e), ("a", "a-copy", "b"))
without = Panel((d, e), ("a", "b"))

g = gram(with_dup)
w, vecs = np.linalg.eigh(g.b)
print("eigenvalues of B:", np.round(w, 12))
null = vecs[:, 0]
print("null vector", np.round(null, 6), "has A-energy", null @ g.a @ null)

p_dup, p_one = pool(with_dup), pool(without)
print("rank used:", p_dup.solution.effective_rank, "of", len(with_dup))
print("alpha with duplicate:   ", np.round(p_dup.alpha, 6))
print("alpha without duplicate:", np.round(p_one.alpha, 6))
x = np.linspace(-5, 8, 1000)
print("largest difference between the two pooled densities:", np.max(np.abs(p_dup(x) - p_one(x))))

# Rewriting the basis as (psi_a - psi_a', psi_a', psi_b) makes the
# degeneracy explicit: the first row and column of B vanish.
r = np.array([[1.0, -1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
print(np.round(basis_transform(g, r).b, 12))
