"""Recovering a group from dilations alone.

The approximate sum and difference are finite compositions of dilations; as
eps -> 0 they converge to the product and quotient of the tangent conical
group.  On unipotent matrices based at I that is plain matrix multiplication.
"""
import numpy as np

from emergent import algebra as A
from emergent import verifier as V
from emergent.instances import make_sphere, make_unipotent, unipotent_group
from emergent.limits import AbsoluteSchedule, emergent_sigma, tangent_conical_group

sched = AbsoluteSchedule()
N = make_unipotent(3)
rng = np.random.default_rng(1)
y, z = N.sample(rng, 2)

for eps in (0.5, 0.1, 0.01):
    print(f"eps={eps:<5} |Sigma - yz| = {N.metric(A.approx_sigma(N, eps, np.eye(3), y, z), y @ z):.2e}")
rep = emergent_sigma(N, sched, np.eye(3), y, z, 1e-11)
print(f"limit after {rep.steps_used} steps, error {N.metric(rep.limit, y @ z):.1e}")

g = tangent_conical_group(N, sched, np.eye(3), 1e-11)
print("tangent inverse vs linalg.inv:", N.metric(g.inverse(y), np.linalg.inv(y)))
agree = V.tangent_group_agreement(N, np.eye(3), unipotent_group(3), s=V.SampleSpec(count=50))
print(f"agreement over {agree.count} samples: {agree.max_residual:.1e}")
rt = V.theorem1_roundtrip(N, np.eye(3), s=V.SampleSpec(count=100))
print(f"dilations rebuilt from the tangent group: {rt.max_residual:.1e}")

# the sphere's tangent group at a point is its tangent plane
S = make_sphere()
e, p, q = S.sample(rng, 3, 0.6)
s = emergent_sigma(S, sched, e, p, q, 1e-7).limit
print("sphere sum in normal coordinates:", S.log(e, s), "vs", S.log(e, p) + S.log(e, q))
