"""Curvature from a ladder of dilations.

Build the midpoint ladder at scale a and compare what comes out with the
vector that went in.  On a flat carrier the two agree exactly; on the unit
sphere the gap shrinks like a^2.
"""
import numpy as np

from emergent import verifier as V
from emergent.instances import NORTH, make_instance, make_sphere

a = [0.2, 0.1, 0.05, 0.025]
v, w = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
fit = V.curvature_scaling(make_sphere(), NORTH, v, w, a)
for ai, g in zip(fit.a_values, fit.gaps):
    print(f"a={ai:<6} gap={g:.3e}")
print("successive ratios:", [round(r, 3) for r in fit.ratios])
print(f"log-log slope {fit.slope:.4f} ({fit.verdict})")

flat = V.curvature_scaling(make_instance("flat:3"), np.zeros(3), v, w, a)
print("flat gaps:", flat.gaps, "->", flat.verdict)
