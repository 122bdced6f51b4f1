"""Which distributive laws hold where.

Vector spaces satisfy all three laws.  Unipotent matrices stay left
distributive at every size but lose right distributivity and mediality as
soon as the group stops being commutative (n >= 3).  The sphere is not even
left distributive.
"""
from emergent import verifier as V
from emergent.instances import make_instance, make_unipotent, unipotent_group

s = V.SampleSpec(seed=0, count=300)
print(f"{'instance':<14}{'LIN':>12}{'COLIN':>12}{'SHUFFLE':>12}")
for desc in ("vector:3", "unipotent:2", "unipotent:3", "unipotent:5", "sphere"):
    alg = make_instance(desc)
    spec = V.SampleSpec(seed=0, count=300, spread=0.5 if desc == "sphere" else None)
    cells = [V.check_distributivity(alg, law, spec) for law in ("LIN", "COLIN", "SHUFFLE")]
    print(f"{desc:<14}" + "".join(f"{r.verdict} {r.max_residual:.0e}".rjust(12) for r in cells))

# commutativity, COLIN and SHUFFLE switch together on conical groups
for n in (2, 3, 4):
    alg = make_unipotent(n)
    rep = V.theorem2_dichotomy(unipotent_group(n), alg.metric, alg.sampler, s, name=f"unipotent:{n}")
    print(f"unipotent:{n} verdicts {rep.argmax_sample['verdicts']}")

# the failure of COLIN is measured exactly by a group commutator
alg = make_unipotent(3)
rep = V.commutator_identity_campaign(unipotent_group(3), alg.metric, alg.sampler, s)
print(f"commutator identity, max residual over {rep.count} samples: {rep.max_residual:.1e}")
