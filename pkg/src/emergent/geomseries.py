"""Non-commutative geometric series.

Solve ``S o_eps e = x`` for ``S`` by iterating ``S_{n+1} = x + (eps S_n)``,
where ``+`` is the sum based at ``e`` and ``eps S_n`` is ``e o_eps S_n``.
On the unipotent group with ``e = I`` the partial sums have the closed form
``(x E^-1)^m x E^m``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra as A
from .algebra import AlgebraHandle, Point
from .instances import conjugate, is_unipotent, unipotent_inverse
from .limits import DEFAULT_SCHEDULE, AbsoluteSchedule, ConvergenceReport, LimitError, emergent_sigma

OVERFLOW_GUARD = 1e100


class NumericRangeError(ArithmeticError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, report: ConvergenceReport):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class GeomSeriesProblem:
    alg: AlgebraHandle
    base: Point
    target: Point
    epsilon: float
    tol: float = 1e-12
    max_iter: int = 200
    schedule: AbsoluteSchedule = DEFAULT_SCHEDULE  # only used without a group structure
    limit_tol: float = 1e-9  # likewise; the sphere bottoms out near 1e-8

    def __post_init__(self):
        if not 0.0 < float(self.epsilon) < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


def based_sum(alg: AlgebraHandle, e, schedule=DEFAULT_SCHEDULE, tol=1e-12):
    """Return ``(v, w) -> sum of v and w based at e``.

    For a conical group the emergent sum at ``e`` is ``v e^-1 w`` in closed
    form; otherwise it is computed as a limit.
    """
    g = alg.group
    if g is not None:
        e_inv = g.inverse(e)
        return lambda v, w: g.mul(g.mul(v, e_inv), w)

    def limit_sum(v, w):
        rep = emergent_sigma(alg, schedule, e, v, w, tol)
        if not rep.converged:
            raise LimitError("emergent sum did not converge inside the series", rep)
        return rep.limit

    return limit_sum


def solve_dilation_equation(p: GeomSeriesProblem) -> ConvergenceReport:
    """Fixed-point iteration for ``S`` with ``S o_eps base = target``.

    Stops when successive iterates are within ``tol`` and the defining
    equation holds to ``10 * tol``.  The report keeps every iterate.
    """
    alg, e, x, eps = p.alg, p.base, p.target, float(p.epsilon)
    add = based_sum(alg, e, p.schedule, p.limit_tol)
    s = x
    iterates = [s]
    residuals = []
    eq = float(alg.metric(A.circ(alg, eps, s, e), x))
    for k in range(p.max_iter):
        s_next = add(x, A.circ(alg, eps, e, s))
        residuals.append(float(alg.metric(s, s_next)))
        s = s_next
        iterates.append(s)
        eq = float(alg.metric(A.circ(alg, eps, s, e), x))
        if residuals[-1] < p.tol and eq < 10 * p.tol:
            return ConvergenceReport(s, residuals, k + 1, True, p.tol, iterates, eq)
    return ConvergenceReport(s, residuals, p.max_iter, False, p.tol, iterates, eq)


def _check_inputs(x, e, m):
    x = np.asarray(x, dtype=float)
    if not is_unipotent(x):
        raise ValueError("x must be upper triangular with unit diagonal")
    if not 0.0 < float(e) < 1.0:
        raise ValueError(f"e must lie in (0, 1), got {e}")
    if m < 0 or m > 200:
        raise ValueError(f"m must be in [0, 200], got {m}")
    return x


def _guard(m):
    if not np.all(np.abs(m) <= OVERFLOW_GUARD):
        raise NumericRangeError("intermediate entries exceed 1e100")
    return m


def unipotent_partial_sum(x, e: float, m: int) -> np.ndarray:
    """Closed form (x E^-1)^m x E^m with E = diag(e, ..., e^n)."""
    x = _check_inputs(x, e, m)
    n = x.shape[0]
    powers = np.array([float(e) ** i for i in range(1, n + 1)])
    xe = x / powers  # x E^-1 scales column j by e^-(j+1)
    acc = np.eye(n)
    for _ in range(m):
        acc = _guard(acc @ xe)
    out = (acc @ x) * powers ** m  # right-multiplying by E^m scales columns
    out = _guard(out)
    # restore the exact pattern; the column scaling leaves the diagonal at 1 only up to rounding
    np.fill_diagonal(out, 1.0)
    return out


def unipotent_partial_sum_iter(x, e: float, m: int) -> np.ndarray:
    """The same product accumulated factor by factor: x (E^-1 x E) ... (E^-m x E^m)."""
    x = _check_inputs(x, e, m)
    out = x.copy()
    for k in range(1, m + 1):
        out = _guard(out @ conjugate(float(e) ** k, x))
    return out


def commutator(x, y):
    """[x, y] = x y x^-1 y^-1."""
    return x @ y @ unipotent_inverse(x) @ unipotent_inverse(y)


def commutator_with_dilator(y, e):
    """[y, E^-1] = y E^-1 y^-1 E, i.e. y conjugate(e, y^-1)."""
    return y @ conjugate(e, unipotent_inverse(y))


def solve_commutator(x, e: float, tol=1e-12, max_iter=2000) -> np.ndarray:
    """Find ``y`` with ``[y, E^-1] = x`` as the limit of the partial sums.

    Raises :class:`ConvergenceError` (carrying the trace) if the factors do
    not settle or the re-substituted residual exceeds ``10 * tol``.
    """
    x = _check_inputs(x, e, 0)
    n = x.shape[0]
    eye = np.eye(n)
    y = x.copy()
    residuals = []
    for k in range(1, max_iter + 1):
        factor = conjugate(float(e) ** k, x)
        y_next = y @ factor
        residuals.append(float(np.linalg.norm(y_next - y)))
        y = y_next
        if np.linalg.norm(factor - eye) < tol * 1e-3 and residuals[-1] < tol:
            break
    res = float(np.linalg.norm(commutator_with_dilator(y, e) - x))
    report = ConvergenceReport(y, residuals, len(residuals), res < 10 * tol, tol, None, res)
    if not report.converged:
        raise ConvergenceError(f"commutator equation residual {res:.3e} above {10 * tol:.1e}", report)
    return y
