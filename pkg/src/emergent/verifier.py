"""Seeded property campaigns over emergent-algebra handles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import algebra as A
from .algebra import AlgebraHandle, DomainError
from .instances import ConicalGroupSpec, make_conical
from .limits import DEFAULT_SCHEDULE, AbsoluteSchedule, LimitError, emergent_delta, emergent_sigma, \
    tangent_conical_group

PASS_TOL = 1e-9
FAIL_TOL = 1e-3
DISTRIBUTIVE_LAWS = ("LIN", "COLIN", "SHUFFLE")


@dataclass(frozen=True)
class SampleSpec:
    """Reproducible sample stream: same spec, same points and scalars."""

    seed: int = 0
    count: int = 1000
    scalar_range: tuple = (0.25, 4.0)
    spread: Optional[float] = None  # passed to the handle's sampler

    def __post_init__(self):
        lo, hi = self.scalar_range
        if not 0 < lo <= hi:
            raise ValueError(f"scalar range must be a subinterval of (0, inf), got {self.scalar_range}")
        if self.count < 1:
            raise ValueError("count must be positive")

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def scalars(self, rng, k):
        lo, hi = self.scalar_range
        return [float(s) for s in np.exp(rng.uniform(math.log(lo), math.log(hi), k))]


@dataclass
class PropertyReport:
    property: str
    max_residual: float
    count: int
    tolerance: float
    passed: bool
    fail_threshold: float = FAIL_TOL
    argmax_sample: dict = field(default_factory=dict)
    skipped: int = 0
    notes: str = ""

    @property
    def verdict(self) -> str:
        if self.passed:
            return "pass"
        if self.max_residual > self.fail_threshold:
            return "fail"
        return "inconclusive"

    def to_dict(self):
        return {
            "property": self.property,
            "max_residual": self.max_residual,
            "count": self.count,
            "tolerance": self.tolerance,
            "fail_threshold": self.fail_threshold,
            "passed": self.passed,
            "verdict": self.verdict,
            "argmax_sample": self.argmax_sample,
            "skipped": self.skipped,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d):
        d = {k: v for k, v in d.items() if k != "verdict"}
        return cls(**d)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return np.asarray(v, dtype=float).tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


class _Tracker:
    """Running max with the inputs that produced it."""

    def __init__(self):
        self.worst = 0.0
        self.arg = {}
        self.count = 0
        self.skipped = 0

    def add(self, residual, **inputs):
        self.count += 1
        residual = float(residual)
        if math.isnan(residual):
            residual = math.inf
        if residual > self.worst or not self.arg:
            self.worst = residual
            self.arg = {k: _jsonable(v) for k, v in inputs.items()}

    def attempts(self, count, factor=4):
        """Yield until ``count`` samples were evaluated or ``factor * count`` draws were made."""
        draws = 0
        while self.count < count and draws < factor * count:
            draws += 1
            yield draws

    def report(self, name, tol, fail_tol=FAIL_TOL, notes=""):
        return PropertyReport(name, self.worst, self.count, tol, self.worst < tol, fail_tol,
                              self.arg, self.skipped, notes)


def check_axioms(alg: AlgebraHandle, s: SampleSpec, tol=PASS_TOL) -> PropertyReport:
    """Max residual of idempotence, left division and the scalar action law."""
    rng = s.rng(1)
    t = _Tracker()
    for _ in t.attempts(s.count):
        x, y = alg.sample(rng, 2, s.spread)
        a, b = s.scalars(rng, 2)
        try:
            r = max(
                A.dist(alg, A.circ(alg, a, x, x), x),
                A.dist(alg, A.bullet(alg, a, x, A.circ(alg, a, x, y)), y),
                A.dist(alg, A.circ(alg, a, x, A.bullet(alg, a, x, y)), y),
                A.dist(alg, A.circ(alg, a, x, A.circ(alg, b, x, y)), A.circ(alg, a * b, x, y)),
                A.dist(alg, A.circ(alg, 1.0, x, y), y),
            )
        except DomainError:
            t.skipped += 1
            continue
        t.add(r, a=a, b=b, x=x, y=y)
    return t.report(f"axioms[{alg.name}]", tol)


def check_em(alg: AlgebraHandle, sched: AbsoluteSchedule, s: SampleSpec, tol=1e-6,
             contraction_eps=1e-7) -> PropertyReport:
    """Convergence of dilations to the base point and of the approximate sum/difference.

    Per sample: distance from ``circ(eps, x, y)`` to ``x`` at the first
    schedule value not above ``contraction_eps``, and the final successive
    residual of the sum and difference limits (inf if they did not converge).
    """
    eps_small = next((e for e in sched.values() if e <= contraction_eps), None)
    if eps_small is None:
        raise ValueError("schedule never reaches the contraction scale")
    rng = s.rng(2)
    t = _Tracker()
    for _ in t.attempts(s.count):
        x, y, z = alg.sample(rng, 3, s.spread)
        try:
            contraction = A.dist(alg, A.circ(alg, eps_small, x, y), x)
            sig = emergent_sigma(alg, sched, x, y, z, tol)
            dlt = emergent_delta(alg, sched, x, y, z, tol)
        except DomainError:
            t.skipped += 1
            continue
        limits = [r.residuals[-1] if r.converged else math.inf for r in (sig, dlt)]
        t.add(max(contraction, *limits), x=x, y=y, z=z)
    return t.report(f"em[{alg.name}]", tol)


def contraction_profile(alg, sched, s: SampleSpec):
    """Max over samples of dist(circ(eps_k, x, y), x) for every schedule value."""
    rng = s.rng(3)
    pairs = [alg.sample(rng, 2, s.spread) for _ in range(s.count)]
    return [max(A.dist(alg, A.circ(alg, eps, x, y), x) for x, y in pairs) for eps in sched.values()]


def check_distributivity(alg: AlgebraHandle, kind: str, s: SampleSpec, tol=PASS_TOL,
                         fail_tol=FAIL_TOL) -> PropertyReport:
    kind = kind.upper()
    if kind not in DISTRIBUTIVE_LAWS:
        raise ValueError(f"unknown law {kind!r}")
    rng = s.rng(4)
    t = _Tracker()
    for _ in t.attempts(s.count):
        pts = alg.sample(rng, 4, s.spread)
        a, b = s.scalars(rng, 2)
        x, y, u, v = pts
        try:
            if kind == "LIN":
                r = A.dist(alg, A.lin_term(alg, a, b, x, y, u), u)
            elif kind == "COLIN":
                r = A.dist(alg, A.colin_term(alg, a, b, x, y, u), u)
            else:
                r = A.shuffle_residual(alg, a, b, x, y, u, v)
        except DomainError:
            t.skipped += 1
            continue
        t.add(r, a=a, b=b, x=x, y=y, z=u, v=v)
    return t.report(f"{kind}[{alg.name}]", tol, fail_tol)


def theorem1_roundtrip(alg: AlgebraHandle, e, sched: AbsoluteSchedule = DEFAULT_SCHEDULE,
                       s: SampleSpec = SampleSpec(count=500), tol=1e-6, limit_tol=1e-11) -> PropertyReport:
    """Rebuild the dilations from the tangent conical group at ``e`` and compare.

    Only meaningful as an equality for linear handles.  For the sphere the
    report is informational.
    """
    tangent = tangent_conical_group(alg, sched, e, limit_tol)
    rebuilt = make_conical(tangent, alg.metric, alg.sampler, name=f"tangent[{alg.name}]", checks=0)
    rng = s.rng(5)
    t = _Tracker()
    for _ in t.attempts(s.count):
        x, y = alg.sample(rng, 2, s.spread)
        (a,) = s.scalars(rng, 1)
        try:
            r = A.dist(alg, A.circ(rebuilt, a, x, y), A.circ(alg, a, x, y))
        except (DomainError, LimitError):
            t.skipped += 1
            continue
        t.add(r, a=a, x=x, y=y)
    return t.report(f"theorem1_roundtrip[{alg.name}]", tol)


def tangent_group_agreement(alg: AlgebraHandle, e, spec: ConicalGroupSpec, sched=DEFAULT_SCHEDULE,
                            s: SampleSpec = SampleSpec(count=200), tol=1e-6, limit_tol=1e-11) -> PropertyReport:
    """Compare the emergent product and inverse at ``e`` with a known group."""
    tangent = tangent_conical_group(alg, sched, e, limit_tol)
    rng = s.rng(6)
    t = _Tracker()
    for _ in range(s.count):
        x, y = alg.sample(rng, 2, s.spread)
        r = max(A.dist(alg, tangent.mul(x, y), spec.mul(x, y)),
                A.dist(alg, tangent.inverse(x), spec.inverse(x)))
        t.add(r, x=x, y=y)
    return t.report(f"tangent_group[{alg.name}]", tol)


def commutator_identity_check(spec: ConicalGroupSpec, metric, a, b, y, z) -> float:
    """Distance between COLIN_{a,1/b}(e, e *_a y, z) and [y o_b e, z o_a e] z.

    The left side goes through the induced dilations; the right side uses the
    group operations directly.
    """
    alg = make_conical(spec, metric, sampler=None, checks=0)
    e = spec.neutral
    lhs = A.colin_term(alg, a, 1.0 / b, e, A.bullet(alg, a, e, y), z)
    mul, inv = spec.mul, spec.inverse
    p = A.circ(alg, b, y, e)
    q = A.circ(alg, a, z, e)
    rhs = mul(mul(mul(mul(p, q), inv(p)), inv(q)), z)
    return float(metric(lhs, rhs))


def commutator_identity_campaign(spec, metric, sampler, s: SampleSpec, tol=PASS_TOL, name="conical"):
    rng = s.rng(7)
    t = _Tracker()
    for _ in range(s.count):
        y, z = sampler(rng, 2, s.spread)
        a, b = s.scalars(rng, 2)
        t.add(commutator_identity_check(spec, metric, a, b, y, z), a=a, b=b, y=y, z=z)
    return t.report(f"commutator_identity[{name}]", tol)


def theorem2_dichotomy(spec: ConicalGroupSpec, metric, sampler, s: SampleSpec, tol=PASS_TOL,
                       fail_tol=FAIL_TOL, name="conical") -> PropertyReport:
    """Commutativity, right distributivity and mediality must agree.

    The report passes when the three sampled verdicts coincide and are
    decisive.  Its residual is 0 on agreement and inf otherwise; the three
    underlying residuals are kept in ``argmax_sample``.
    """
    alg = make_conical(spec, metric, sampler, name=name, checks=0)
    rng = s.rng(8)
    comm = _Tracker()
    for _ in range(s.count):
        x, y = sampler(rng, 2, s.spread)
        comm.add(metric(spec.mul(x, y), spec.mul(y, x)), x=x, y=y)
    c = comm.report(f"commutative[{name}]", tol, fail_tol)
    colin = check_distributivity(alg, "COLIN", s, tol, fail_tol)
    shuffle = check_distributivity(alg, "SHUFFLE", s, tol, fail_tol)
    verdicts = {"commutative": c.verdict, "COLIN": colin.verdict, "SHUFFLE": shuffle.verdict}
    agree = len(set(verdicts.values())) == 1 and c.verdict != "inconclusive"
    notes = ", ".join(f"{k}={v}" for k, v in verdicts.items())
    if not agree:
        notes = "mismatch: " + notes
    return PropertyReport(f"theorem2[{name}]", 0.0 if agree else math.inf, c.count, tol, agree, fail_tol,
                          {"verdicts": verdicts, "commutator_residual": c.max_residual,
                           "colin_residual": colin.max_residual, "shuffle_residual": shuffle.max_residual},
                          0, notes)


def part3_identity(alg: AlgebraHandle, s: SampleSpec, tol=PASS_TOL) -> PropertyReport:
    """y o_b e = e o_{1-b} y with b drawn from (0, 1)."""
    rng = s.rng(9)
    t = _Tracker()
    for _ in range(s.count):
        e, y = alg.sample(rng, 2, s.spread)
        b = float(rng.uniform(0.01, 0.99))
        t.add(A.dist(alg, A.circ(alg, b, y, e), A.circ(alg, 1.0 - b, e, y)), b=b, e=e, y=y)
    return t.report(f"part3_identity[{alg.name}]", tol)


def scaling_additivity(alg: AlgebraHandle, s: SampleSpec, tol=PASS_TOL) -> PropertyReport:
    """(e o_a y)(e o_b y) = e o_{a+b} y at the neutral element of a commutative group."""
    g = alg.group
    if g is None:
        raise ValueError("scaling additivity needs a group structure")
    rng = s.rng(10)
    e = g.neutral
    t = _Tracker()
    for _ in range(s.count):
        (y,) = alg.sample(rng, 1, s.spread)
        a, b = s.scalars(rng, 2)
        lhs = g.mul(A.circ(alg, a, e, y), A.circ(alg, b, e, y))
        t.add(A.dist(alg, lhs, A.circ(alg, a + b, e, y)), a=a, b=b, y=y)
    return t.report(f"scaling_additivity[{alg.name}]", tol)


def colin_implies_lin_witness(handles: Sequence[AlgebraHandle], s: SampleSpec, tol=PASS_TOL,
                              fail_tol=FAIL_TOL) -> PropertyReport:
    """No handle may pass right distributivity while failing left distributivity.

    Handles that pass COLIN and carry a commutative group are additionally
    checked against the identity y o_b e = e o_{1-b} y.
    """
    per_handle = {}
    worst = 0.0
    ok = True
    for alg in handles:
        colin = check_distributivity(alg, "COLIN", s, tol, fail_tol)
        lin = check_distributivity(alg, "LIN", s, tol, fail_tol)
        entry = {"COLIN": colin.verdict, "LIN": lin.verdict}
        if colin.passed:
            if not lin.passed:
                ok = False
            if alg.group is not None:
                p3 = part3_identity(alg, s, tol)
                entry["part3"] = p3.verdict
                worst = max(worst, p3.max_residual)
                ok = ok and p3.passed
            worst = max(worst, lin.max_residual)
        per_handle[alg.name] = entry
    return PropertyReport("theorem3_witness", worst, len(per_handle), tol, ok, fail_tol, per_handle)


# -- curvature -----------------------------------------------------------------

def schild_ladder(alg: AlgebraHandle, x, v, w, a) -> np.ndarray:
    """log_x of x *_a LIN_{1/2,1/2}(x, x o_a exp_x v, x o_a exp_x w).

    The ``a``-dilation at ``x`` is applied once, so the result tends to ``w``
    as ``a -> 0``; the defect measures curvature at scale ``a``.
    """
    if alg.exp is None or alg.log is None:
        raise ValueError(f"{alg.name} exposes no exponential map")
    p = A.curvature_term(alg, a, 0.5, 0.5, x, x, alg.exp(x, v), alg.exp(x, w))
    return alg.log(x, p)


@dataclass
class CurvatureFit:
    a_values: list
    gaps: list
    slope: Optional[float]
    excluded: list = field(default_factory=list)

    @property
    def verdict(self):
        return "flat" if self.slope is None else "curved"

    @property
    def ratios(self):
        return [g0 / g1 for g0, g1 in zip(self.gaps, self.gaps[1:]) if g1 > 0]


GAP_FLOOR = 1e-13


def curvature_scaling(alg: AlgebraHandle, x, v, w, a_values) -> CurvatureFit:
    """Least-squares slope of log gap against log a for the ladder defect."""
    a_values = [float(a) for a in a_values]
    if len(a_values) < 4:
        raise ValueError("need at least four scale values")
    if any(a1 >= a0 for a0, a1 in zip(a_values, a_values[1:])):
        raise ValueError("scale values must be strictly decreasing")
    gaps = [float(np.linalg.norm(np.asarray(w) - schild_ladder(alg, x, v, w, a))) for a in a_values]
    kept = [(a, g) for a, g in zip(a_values, gaps) if g >= GAP_FLOOR]
    excluded = [a for a, g in zip(a_values, gaps) if g < GAP_FLOOR]
    slope = None
    if len(kept) >= 2:
        la, lg = np.log([k[0] for k in kept]), np.log([k[1] for k in kept])
        slope = float(np.polyfit(la, lg, 1)[0])
    return CurvatureFit(a_values, gaps, slope, excluded)
