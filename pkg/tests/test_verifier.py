import math

import numpy as np
import pytest

from emergent import algebra as A
from emergent import verifier as V
from emergent.instances import (
    NORTH, make_instance, make_sphere, make_unipotent, make_vector_space, unipotent_group, vector_group,
)
from emergent.limits import AbsoluteSchedule

SMALL = V.SampleSpec(seed=3, count=100)


def test_sample_spec_is_reproducible():
    s = V.SampleSpec(seed=11, count=5)
    a, b = s.rng(1), s.rng(1)
    np.testing.assert_array_equal(a.normal(size=4), b.normal(size=4))
    assert s.scalars(s.rng(2), 3) == s.scalars(s.rng(2), 3)
    assert all(0.25 <= c <= 4.0 for c in s.scalars(s.rng(3), 200))
    with pytest.raises(ValueError):
        V.SampleSpec(scalar_range=(0.0, 1.0))
    with pytest.raises(ValueError):
        V.SampleSpec(count=0)


def test_reports_are_deterministic():
    N = make_unipotent(3)
    r1 = V.check_distributivity(N, "COLIN", SMALL)
    r2 = V.check_distributivity(N, "COLIN", SMALL)
    assert r1.to_dict() == r2.to_dict()
    r3 = V.check_distributivity(N, "COLIN", V.SampleSpec(seed=4, count=100))
    assert r3.max_residual != r1.max_residual


def test_report_round_trip_and_verdicts():
    r = V.PropertyReport("p", 5e-4, 10, 1e-9, False)
    assert r.verdict == "inconclusive"
    assert V.PropertyReport.from_dict(r.to_dict()) == r
    assert V.PropertyReport("p", 0.1, 10, 1e-9, False).verdict == "fail"
    assert V.PropertyReport("p", 0.0, 10, 1e-9, True).verdict == "pass"


@pytest.mark.parametrize("desc", ["vector:1", "vector:3", "unipotent:2", "unipotent:4", "sphere"])
def test_axioms_hold(desc):
    rep = V.check_axioms(make_instance(desc), SMALL)
    assert rep.passed and rep.count == 100, rep.max_residual


def test_axioms_detect_a_broken_operation():
    R = make_vector_space(2)
    broken = A.AlgebraHandle("broken", lambda a, x, y: x + a * (y - x) + 1e-6, R.metric, R.sampler)
    rep = V.check_axioms(broken, SMALL)
    assert not rep.passed
    assert set(rep.argmax_sample) == {"a", "b", "x", "y"}


def test_sphere_domain_errors_are_skipped_not_counted():
    S = make_sphere()
    rep = V.check_axioms(S, V.SampleSpec(count=200))
    assert rep.count == 200 and rep.passed


@pytest.mark.parametrize("desc,law,verdict", [
    ("vector:3", "LIN", "pass"), ("vector:3", "COLIN", "pass"), ("vector:3", "SHUFFLE", "pass"),
    ("unipotent:2", "COLIN", "pass"), ("unipotent:2", "SHUFFLE", "pass"),
    ("unipotent:3", "LIN", "pass"), ("unipotent:5", "LIN", "pass"),
    ("unipotent:3", "COLIN", "fail"), ("unipotent:3", "SHUFFLE", "fail"),
    ("unipotent:4", "COLIN", "fail"),
])
def test_classification(desc, law, verdict):
    assert V.check_distributivity(make_instance(desc), law, SMALL).verdict == verdict


def test_sphere_fails_left_distributivity():
    rep = V.check_distributivity(make_sphere(), "LIN", V.SampleSpec(count=100, spread=0.5))
    assert rep.verdict == "fail"


def test_unknown_law_rejected():
    with pytest.raises(ValueError):
        V.check_distributivity(make_vector_space(2), "MEDIAL", SMALL)


def test_em_suite():
    sched = AbsoluteSchedule()
    s = V.SampleSpec(count=10)
    for desc in ("vector:1", "vector:3", "unipotent:2", "unipotent-exact:3"):
        rep = V.check_em(make_instance(desc), sched, s)
        assert rep.passed, (desc, rep.max_residual)
    assert V.check_em(make_sphere(), sched, V.SampleSpec(count=10, spread=0.5)).passed


def test_em_needs_a_small_enough_schedule():
    with pytest.raises(ValueError):
        V.check_em(make_vector_space(1), AbsoluteSchedule(max_steps=4), SMALL)


def test_commutator_identity():
    for n in (2, 3, 4):
        N = make_unipotent(n)
        rep = V.commutator_identity_campaign(unipotent_group(n), N.metric, N.sampler, V.SampleSpec(count=200))
        assert rep.passed and rep.count == 200, (n, rep.max_residual)


def test_commutator_is_trivial_in_abelian_groups():
    R = make_vector_space(3)
    rng = np.random.default_rng(0)
    y, z = R.sample(rng, 2)
    # both sides reduce to z
    assert V.commutator_identity_check(vector_group(3), R.metric, 0.5, 2.0, y, z) < 1e-12


@pytest.mark.parametrize("spec,n,commutative", [
    ("vector", 3, True), ("unipotent", 2, True), ("unipotent", 3, False), ("unipotent", 4, False)])
def test_theorem2_dichotomy(spec, n, commutative):
    if spec == "vector":
        alg, g = make_vector_space(n), vector_group(n)
    else:
        alg, g = make_unipotent(n), unipotent_group(n)
    rep = V.theorem2_dichotomy(g, alg.metric, alg.sampler, SMALL, name=f"{spec}:{n}")
    assert rep.passed
    assert rep.max_residual == 0.0
    expected = "pass" if commutative else "fail"
    assert set(rep.argmax_sample["verdicts"].values()) == {expected}


def test_part3_and_scaling_additivity():
    for alg in (make_vector_space(1), make_vector_space(3), make_unipotent(2)):
        assert V.part3_identity(alg, SMALL).passed
        assert V.scaling_additivity(alg, SMALL).passed
    assert not V.part3_identity(make_unipotent(3), SMALL).passed
    with pytest.raises(ValueError):
        V.scaling_additivity(make_sphere(), SMALL)


def test_distributivity_witness():
    handles = [make_instance(d) for d in ("vector:1", "vector:3", "unipotent:2", "unipotent:3")]
    rep = V.colin_implies_lin_witness(handles, SMALL)
    assert rep.passed
    assert rep.argmax_sample["unipotent:3"]["COLIN"] == "fail"
    assert rep.argmax_sample["vector:3"]["part3"] == "pass"
    empty = V.colin_implies_lin_witness([], SMALL)
    assert empty.passed and empty.count == 0


def test_witness_catches_a_counterexample(monkeypatch):
    # no honest instance passes COLIN while failing LIN, so fake the campaign
    def fake(alg, kind, s, tol=V.PASS_TOL, fail_tol=V.FAIL_TOL):
        r = 0.0 if kind == "COLIN" else 0.5
        return V.PropertyReport(kind, r, s.count, tol, r < tol, fail_tol)

    monkeypatch.setattr(V, "check_distributivity", fake)
    rep = V.colin_implies_lin_witness([make_vector_space(1)], SMALL)
    assert not rep.passed
    assert rep.argmax_sample["vector:1"] == {"COLIN": "pass", "LIN": "fail", "part3": "pass"}


@pytest.mark.parametrize("desc", ["vector:3", "unipotent:3"])
def test_theorem1_roundtrip(desc):
    alg = make_instance(desc)
    rep = V.theorem1_roundtrip(alg, alg.neutral, s=V.SampleSpec(count=50))
    assert rep.passed and rep.skipped == 0, rep.max_residual


def test_theorem1_roundtrip_off_neutral():
    # away from the neutral element rounding caps the limit accuracy near 1e-8
    R = make_vector_space(3)
    e = R.sample(np.random.default_rng(1), 1)[0]
    rep = V.theorem1_roundtrip(R, e, s=V.SampleSpec(count=50), limit_tol=1e-7)
    assert rep.passed and rep.count == 50, rep.max_residual


def test_tangent_group_matches_matrix_group():
    N = make_unipotent(3)
    rep = V.tangent_group_agreement(N, np.eye(3), unipotent_group(3), s=V.SampleSpec(count=30))
    assert rep.passed, rep.max_residual


def test_schild_ladder_flat_returns_w():
    F = make_instance("flat:3")
    x = np.zeros(3)
    v, w = np.eye(3)[0], np.eye(3)[1]
    for a in (0.5, 0.1, 0.01):
        np.testing.assert_allclose(V.schild_ladder(F, x, v, w, a), w, atol=1e-12)


def test_schild_ladder_sphere_tends_to_w():
    S = make_sphere()
    v, w = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    gaps = [np.linalg.norm(V.schild_ladder(S, NORTH, v, w, a) - w) for a in (0.2, 0.1, 0.05)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-2
    # along a single geodesic there is nothing to transport
    assert np.linalg.norm(V.schild_ladder(S, NORTH, v, 0.5 * v, 0.1) - 0.5 * v) < 1e-12


def test_schild_ladder_needs_exponential():
    with pytest.raises(ValueError):
        V.schild_ladder(make_unipotent(2), np.eye(2), np.eye(2), np.eye(2), 0.1)


def test_curvature_scaling_sphere():
    fit = V.curvature_scaling(make_sphere(), NORTH, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]),
                              [0.2, 0.1, 0.05, 0.025])
    assert fit.verdict == "curved"
    assert 1.85 <= fit.slope <= 2.15
    assert all(abs(r - 4.0) < 0.4 for r in fit.ratios)


def test_curvature_scaling_flat():
    fit = V.curvature_scaling(make_instance("flat:3"), np.zeros(3), np.eye(3)[0], np.eye(3)[1],
                              [0.2, 0.1, 0.05, 0.025])
    assert fit.verdict == "flat" and fit.slope is None
    assert max(fit.gaps) < 1e-12
    assert fit.excluded == fit.a_values


@pytest.mark.parametrize("a_values", [[0.2, 0.1, 0.05], [0.2, 0.1, 0.1, 0.05], [0.1, 0.2, 0.05, 0.025]])
def test_curvature_preconditions(a_values):
    with pytest.raises(ValueError):
        V.curvature_scaling(make_sphere(), NORTH, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), a_values)
