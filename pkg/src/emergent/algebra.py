"""Emergent-algebra handles and the finite operations built from a dilation.

Every operation here is an exact composition of the handle's ``circ``; no
limits are taken.  Limits live in :mod:`emergent.limits`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np

Point = Any  # ndarray payload; shape and constraints depend on the instance

DEFAULT_TOL = 1e-9


class DomainError(ValueError):
    """Input outside the carrier domain of an instance (e.g. antipodal points)."""


def check_scalar(a) -> float:
    """Validate an element of the multiplicative group (0, inf)."""
    if isinstance(a, Fraction):
        if a <= 0:
            raise ValueError(f"scalar must be positive, got {a}")
        return a
    a = float(a)
    if not math.isfinite(a) or a <= 0.0:
        raise ValueError(f"scalar must be positive and finite, got {a}")
    if not math.isfinite(1.0 / a):
        raise ValueError(f"scalar {a} has no finite reciprocal")
    return a


@dataclass(frozen=True)
class AlgebraHandle:
    """A carrier with its dilation family and a metric realizing the uniformity.

    ``circ(a, x, y)`` is the dilation of coefficient ``a`` based at ``x``
    applied to ``y``.  The second operation is never stored: it is ``circ``
    with the reciprocal coefficient.

    ``sampler(rng, k, spread)`` returns ``k`` in-domain points whose mutual
    distances are controlled by ``spread`` (``None`` means instance default).
    """

    name: str
    circ: Callable[[Any, Point, Point], Point]
    metric: Callable[[Point, Point], float]
    sampler: Callable[..., list]
    neutral: Optional[Point] = None
    group: Optional[Any] = None  # ConicalGroupSpec when the carrier is a conical group
    exp: Optional[Callable[[Point, Point], Point]] = None
    log: Optional[Callable[[Point, Point], Point]] = None
    exact: bool = False

    def sample(self, rng: np.random.Generator, k: int, spread=None) -> list:
        return self.sampler(rng, k, spread)

    def __repr__(self):
        return f"AlgebraHandle({self.name!r})"


def circ(alg: AlgebraHandle, a, x: Point, y: Point) -> Point:
    a = check_scalar(a)
    if alg.exact and not isinstance(a, Fraction):
        a = Fraction(a)
    return alg.circ(a, x, y)


def bullet(alg: AlgebraHandle, a, x: Point, y: Point) -> Point:
    a = check_scalar(a)
    if alg.exact and not isinstance(a, Fraction):
        a = Fraction(a)
    return alg.circ(1 / a, x, y)


def dist(alg: AlgebraHandle, x: Point, y: Point) -> float:
    if np.shape(x) != np.shape(y):
        raise ValueError(f"points from different carriers: shapes {np.shape(x)} and {np.shape(y)}")
    return float(alg.metric(x, y))


def approx_delta(alg, a, x, y, z):
    """Approximate difference: (x o_a y) *_a (x o_a z)."""
    return bullet(alg, a, circ(alg, a, x, y), circ(alg, a, x, z))


def approx_sigma(alg, a, x, y, z):
    """Approximate sum: x *_a ((x o_a y) o_a z)."""
    return bullet(alg, a, x, circ(alg, a, circ(alg, a, x, y), z))


def approx_inv(alg, a, x, y):
    """Approximate inverse: (x o_a y) *_a x."""
    return bullet(alg, a, circ(alg, a, x, y), x)


def lin_term(alg, a, b, x, y, z):
    """Left-distributivity defect; returns ``z`` exactly when the law holds.

    y *_b (x *_a ((x o_a y) o_b (x o_a z)))
    """
    inner = circ(alg, b, circ(alg, a, x, y), circ(alg, a, x, z))
    return bullet(alg, b, y, bullet(alg, a, x, inner))


def colin_term(alg, a, b, x, y, z):
    """Right-distributivity defect; returns ``z`` exactly when the law holds.

    (x o_a y) *_b ((x o_b z) o_a (y o_b z))
    """
    inner = circ(alg, a, circ(alg, b, x, z), circ(alg, b, y, z))
    return bullet(alg, b, circ(alg, a, x, y), inner)


def shuffle_residual(alg, a, b, x, y, u, v) -> float:
    """Distance between the two sides of the medial law."""
    lhs = circ(alg, b, circ(alg, a, x, y), circ(alg, a, u, v))
    rhs = circ(alg, a, circ(alg, b, x, u), circ(alg, b, y, v))
    return dist(alg, lhs, rhs)


def curvature_term(alg, a, b, c, x, u, v, w):
    """x *_a LIN_{b,c}(x o_a u, x o_a v, x o_a w); tends to ``w`` as a -> 0."""
    scaled = [circ(alg, a, x, p) for p in (u, v, w)]
    return bullet(alg, a, x, lin_term(alg, b, c, *scaled))


def relative_circ(alg, e, c, a, x, y):
    """The dilation of coefficient ``a`` seen through the zoom ``e o_c``.

    e *_c ((e o_c x) o_a (e o_c y)).  Its limit as c -> 0 is the
    infinitesimal dilation at ``e``.
    """
    return bullet(alg, c, e, circ(alg, a, circ(alg, c, e, x), circ(alg, c, e, y)))
