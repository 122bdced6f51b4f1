"""Dilations on three carriers, and how they contract toward the base point."""
import numpy as np

from emergent import algebra as A
from emergent.instances import make_sphere, make_unipotent, make_vector_space

rng = np.random.default_rng(0)

# On the line, x o_a y = x + a (y - x)
R1 = make_vector_space(1)
print("0 o_0.5 4 =", A.circ(R1, 0.5, 0.0, 4.0))
print("0 * 0.5 2 =", A.bullet(R1, 0.5, 0.0, 2.0))

# Unipotent matrices: entry (i, j) picks up a^(j - i)
N = make_unipotent(3)
y = np.array([[1.0, 1.0, 1.0], [0, 1.0, 1.0], [0, 0, 1.0]])
print("I o_0.5 y =\n", A.circ(N, 0.5, np.eye(3), y))

# On the sphere the dilation runs along the great circle through x and y
S = make_sphere()
x, y = S.sample(rng, 2, 1.0)
print("sphere, |x o_a y| =", np.linalg.norm(A.circ(S, 0.3, x, y)))

print("\ncontraction d(x o_eps y, x):")
for alg in (R1, N, S):
    x, y = alg.sample(rng, 2)
    row = [A.dist(alg, A.circ(alg, eps, x, y), x) for eps in (1e-1, 1e-3, 1e-6, 1e-9)]
    print(f"  {alg.name:<12}", "  ".join(f"{r:.1e}" for r in row))
