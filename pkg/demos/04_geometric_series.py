"""A geometric series in a non-commutative group.

Solving S o_eps e = x by fixed-point iteration.  Around 0 on the line this is
1 + eps + eps^2 + ... times x.  On unipotent matrices the partial sums become
twisted products, and their limit solves a commutator equation.
"""
import numpy as np

from emergent.geomseries import (
    GeomSeriesProblem, commutator_with_dilator, solve_commutator, solve_dilation_equation, unipotent_partial_sum,
)
from emergent.instances import make_unipotent, make_vector_space

rep = solve_dilation_equation(GeomSeriesProblem(make_vector_space(1), np.zeros(1), np.ones(1), 0.5))
print(f"line: S = {rep.limit[0]:.12f} after {rep.steps_used} iterations")

x = np.array([[1.0, 1.0], [0, 1.0]])
rep = solve_dilation_equation(GeomSeriesProblem(make_unipotent(2), np.eye(2), x, 0.5))
print("2x2 unipotent: S =\n", rep.limit)

x = make_unipotent(4).sample(np.random.default_rng(2), 1)[0]
for m in (1, 5, 20, 60):
    print(f"m={m:<3} partial sum entry (1,4): {unipotent_partial_sum(x, 0.5, m)[0, 3]: .10f}")
y = solve_commutator(x, 0.5)
print("commutator residual:", np.linalg.norm(commutator_with_dilator(y, 0.5) - x))
