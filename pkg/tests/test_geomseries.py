import numpy as np
import pytest

from emergent import algebra as A
from emergent.geomseries import (
    ConvergenceError, GeomSeriesProblem, NumericRangeError, commutator, commutator_with_dilator,
    solve_commutator, solve_dilation_equation, unipotent_partial_sum, unipotent_partial_sum_iter,
)
from emergent.instances import dilator, make_sphere, make_unipotent, make_vector_space

R1 = make_vector_space(1)
N2 = make_unipotent(2)


def test_scalar_series_converges_to_two():
    rep = solve_dilation_equation(GeomSeriesProblem(R1, np.zeros(1), np.ones(1), 0.5))
    assert rep.converged
    assert abs(rep.limit[0] - 2.0) < 1e-8
    assert rep.steps_used <= 60
    assert rep.equation_residual < 1e-11


def test_scalar_series_matches_closed_form():
    # S = x / (1 - eps) around e = 0
    for eps in (0.1, 0.3, 0.9):
        rep = solve_dilation_equation(GeomSeriesProblem(R1, np.zeros(1), np.array([3.0]), eps, max_iter=1000))
        assert rep.limit[0] == pytest.approx(3.0 / (1 - eps), abs=1e-9)


def test_unipotent_two_by_two():
    x = np.array([[1.0, 1.0], [0.0, 1.0]])
    rep = solve_dilation_equation(GeomSeriesProblem(N2, np.eye(2), x, 0.5))
    assert rep.converged
    assert abs(rep.limit[0, 1] - 2.0) < 1e-8


def test_target_equal_to_base_is_fixed():
    rng = np.random.default_rng(0)
    N3 = make_unipotent(3)
    e = N3.sample(rng, 1)[0]
    rep = solve_dilation_equation(GeomSeriesProblem(N3, e, e, 0.4))
    assert rep.converged and rep.steps_used == 1
    assert N3.metric(rep.limit, e) < 1e-12


@pytest.mark.parametrize("eps", [0.0, 1.0, 1.5, -0.2])
def test_epsilon_outside_unit_interval_rejected(eps):
    with pytest.raises(ValueError):
        GeomSeriesProblem(R1, np.zeros(1), np.ones(1), eps)


def test_iterates_follow_the_contraction_map():
    N3 = make_unipotent(3)
    rng = np.random.default_rng(1)
    e, x = N3.sample(rng, 2)
    eps = 0.5
    rep = solve_dilation_equation(GeomSeriesProblem(N3, e, x, eps))
    e_inv = np.linalg.inv(e)

    def step(s):
        return x @ e_inv @ A.circ(N3, eps, e, s)

    s = x
    for k, it in enumerate(rep.iterates[:20]):
        assert N3.metric(it, s) < 1e-8, k
        s = step(s)


def test_series_without_group_uses_limits():
    S = make_sphere()
    rng = np.random.default_rng(2)
    e, x = S.sample(rng, 2, 0.6)
    rep = solve_dilation_equation(GeomSeriesProblem(S, e, x, 0.5, tol=1e-6, limit_tol=1e-7))
    assert rep.converged
    assert S.metric(A.circ(S, 0.5, rep.limit, e), x) < 1e-5


def test_non_convergence_reported():
    rep = solve_dilation_equation(GeomSeriesProblem(R1, np.zeros(1), np.ones(1), 0.9, max_iter=5))
    assert not rep.converged
    assert len(rep.iterates) == 6


def test_partial_sum_example():
    x = np.array([[1.0, 1.0], [0.0, 1.0]])
    # (1,2) entry is 1 + e + ... + e^m
    assert unipotent_partial_sum(x, 0.5, 2)[0, 1] == pytest.approx(1.75)
    for m in range(8):
        assert unipotent_partial_sum(x, 0.3, m)[0, 1] == pytest.approx(sum(0.3 ** k for k in range(m + 1)))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("e", [0.5, 0.7])
def test_closed_form_matches_iterative(n, e):
    rng = np.random.default_rng(n)
    x = make_unipotent(n).sample(rng, 1)[0]
    for m in (0, 1, 2, 5, 10, 25, 50):
        closed = unipotent_partial_sum(x, e, m)
        it = unipotent_partial_sum_iter(x, e, m)
        assert np.max(np.abs(closed - it)) < 1e-10, m


def test_closed_form_overflow_guard():
    x = make_unipotent(5).sample(np.random.default_rng(3), 1)[0]
    with pytest.raises(NumericRangeError):
        unipotent_partial_sum(x, 0.3, 50)


def test_partial_sum_input_validation():
    with pytest.raises(ValueError):
        unipotent_partial_sum(np.ones((2, 2)), 0.5, 2)
    with pytest.raises(ValueError):
        unipotent_partial_sum(np.eye(2), 1.2, 2)
    with pytest.raises(ValueError):
        unipotent_partial_sum(np.eye(2), 0.5, 201)


def test_commutator_with_dilator_matches_definition():
    rng = np.random.default_rng(4)
    y = make_unipotent(4).sample(rng, 1)[0]
    E = dilator(0.4, 4)
    Ei = np.linalg.inv(E)
    np.testing.assert_allclose(commutator_with_dilator(y, 0.4), y @ Ei @ np.linalg.inv(y) @ E, atol=1e-10)
    z = make_unipotent(4).sample(rng, 1)[0]
    np.testing.assert_allclose(commutator(y, z), y @ z @ np.linalg.inv(y) @ np.linalg.inv(z), atol=1e-10)


def test_solve_commutator_two_by_two():
    x = np.array([[1.0, 1.0], [0.0, 1.0]])
    y = solve_commutator(x, 0.5)
    assert y[0, 1] == pytest.approx(2.0, abs=1e-10)
    np.testing.assert_array_equal(solve_commutator(np.eye(3), 0.5), np.eye(3))


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("e", [0.3, 0.5, 0.7])
def test_solve_commutator_residual(n, e):
    rng = np.random.default_rng(10 * n + int(10 * e))
    for x in make_unipotent(n).sample(rng, 5):
        y = solve_commutator(x, e)
        assert np.linalg.norm(commutator_with_dilator(y, e) - x) < 1e-8


def test_solve_commutator_agrees_with_partial_sums():
    rng = np.random.default_rng(5)
    x = make_unipotent(3).sample(rng, 1)[0]
    y = solve_commutator(x, 0.5)
    np.testing.assert_allclose(unipotent_partial_sum(x, 0.5, 80), y, atol=1e-10)


def test_solve_commutator_reports_failure():
    x = make_unipotent(3).sample(np.random.default_rng(6), 1)[0]
    with pytest.raises(ConvergenceError) as info:
        solve_commutator(x, 0.9, max_iter=3)
    assert info.value.report.equation_residual > 1e-6
