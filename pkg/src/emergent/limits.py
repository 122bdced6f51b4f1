"""Limits along the absolute: emergent operations and the tangent conical group."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import algebra as A
from .algebra import AlgebraHandle, Point
from .instances import ConicalGroupSpec


@dataclass(frozen=True)
class AbsoluteSchedule:
    """eps_k = start * ratio**k for k < max_steps, decreasing to 0."""

    start: float = 0.5
    ratio: float = 0.5
    max_steps: int = 48

    def __post_init__(self):
        if not self.start > 0:
            raise ValueError("schedule start must be positive")
        if not 0 < self.ratio < 1:
            raise ValueError("schedule ratio must lie in (0, 1)")
        if self.max_steps < 2:
            raise ValueError("schedule needs at least two steps")

    def values(self):
        eps = self.start
        for _ in range(self.max_steps):
            yield eps
            eps *= self.ratio


DEFAULT_SCHEDULE = AbsoluteSchedule()


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of a limit or fixed-point computation.

    ``residuals[k]`` is the distance between iterates k and k+1.  For solver
    runs ``iterates`` holds the full trace and ``equation_residual`` the final
    re-check of the defining equation.
    """

    limit: Optional[Any]
    residuals: list = field(default_factory=list)
    steps_used: int = 0
    converged: bool = False
    tol: float = 0.0
    iterates: Optional[list] = None
    equation_residual: Optional[float] = None

    def __bool__(self):
        return self.converged


class LimitError(RuntimeError):
    """A limit needed to build something else did not converge."""

    def __init__(self, message, report: ConvergenceReport):
        super().__init__(message)
        self.report = report


def limit_along_schedule(f: Callable[[Any], Point], sched: AbsoluteSchedule, tol: float,
                         metric) -> ConvergenceReport:
    """Evaluate ``f`` along the schedule until two successive residuals drop below ``tol``.

    Exhausting the schedule is not an error: the report comes back with
    ``converged=False`` and the last iterate as a best guess.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    residuals = []
    prev = None
    step = 0
    for k, eps in enumerate(sched.values()):
        cur = f(eps)
        if prev is not None:
            residuals.append(float(metric(prev, cur)))
            step = k - 1
            if len(residuals) >= 2 and residuals[-1] < tol and residuals[-2] < tol:
                return ConvergenceReport(cur, residuals, step, True, tol)
        prev = cur
    return ConvergenceReport(prev, residuals, step, False, tol)


def emergent_sigma(alg: AlgebraHandle, sched: AbsoluteSchedule, e, y, z, tol=1e-9):
    """Sum based at ``e``: the limit of the approximate sum as eps -> 0."""
    return limit_along_schedule(lambda eps: A.approx_sigma(alg, eps, e, y, z), sched, tol, alg.metric)


def emergent_delta(alg: AlgebraHandle, sched: AbsoluteSchedule, e, y, z, tol=1e-9):
    """Difference based at ``e``: the limit of the approximate difference."""
    return limit_along_schedule(lambda eps: A.approx_delta(alg, eps, e, y, z), sched, tol, alg.metric)


def emergent_inv(alg: AlgebraHandle, sched: AbsoluteSchedule, e, y, tol=1e-9):
    return limit_along_schedule(lambda eps: A.approx_inv(alg, eps, e, y), sched, tol, alg.metric)


def infinitesimal_circ(alg: AlgebraHandle, sched: AbsoluteSchedule, e, b, x, y, tol=1e-9):
    """Dilation of coefficient ``b`` in the tangent algebra at ``e``."""
    return limit_along_schedule(lambda c: A.relative_circ(alg, e, c, b, x, y), sched, tol, alg.metric)


def _require(report: ConvergenceReport, what: str):
    if not report.converged:
        raise LimitError(f"{what} did not converge (last residual "
                         f"{report.residuals[-1] if report.residuals else float('nan'):.3e})", report)
    return report.limit


def tangent_conical_group(alg: AlgebraHandle, sched: AbsoluteSchedule, e, tol=1e-9,
                          probe=()) -> ConicalGroupSpec:
    """The conical group at ``e`` whose operations are the emergent limits.

    Multiplication and inverse are evaluated lazily; each call computes one
    limit and raises :class:`LimitError` if it fails to converge.  Points in
    ``probe`` are pushed through both operations up front so that a
    non-convergent structure fails at construction.
    """

    def mul(x, y):
        return _require(emergent_sigma(alg, sched, e, x, y, tol), "emergent sum")

    def inverse(x):
        return _require(emergent_inv(alg, sched, e, x, tol), "emergent inverse")

    def scale(a, x):
        return A.circ(alg, a, e, x)

    for p in probe:
        mul(p, p)
        inverse(p)
    return ConicalGroupSpec(mul=mul, inverse=inverse, neutral=e, scale=scale)
