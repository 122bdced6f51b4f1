"""Concrete carriers: real vector spaces, the unipotent group N, conical groups, S^2."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .algebra import AlgebraHandle, DomainError, Point

SPHERE_CUTOFF = math.pi - 0.1
_ANTIPODAL_GUARD = 1e-8


class ConicalSpecError(ValueError):
    """A candidate conical group failed one of its sampled axiom checks."""

    def __init__(self, axiom: str, residual: float):
        super().__init__(f"conical group axiom violated: {axiom} (residual {residual:.3e})")
        self.axiom = axiom
        self.residual = residual


@dataclass(frozen=True)
class ConicalGroupSpec:
    """A group (mul, inverse, neutral) with a contracting scalar action."""

    mul: Callable[[Point, Point], Point]
    inverse: Callable[[Point], Point]
    neutral: Point
    scale: Callable[[Any, Point], Point]
    commutative: bool | None = None  # informational; verdicts are always sampled


# -- real vector spaces -----------------------------------------------------

def _vec(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        if x.size != n or x.ndim > 1:
            raise DomainError(f"expected a vector of length {n}, got shape {x.shape}")
        x = x.reshape(n)
    return x


def vector_group(n: int) -> ConicalGroupSpec:
    return ConicalGroupSpec(
        mul=lambda x, y: np.asarray(x, float) + np.asarray(y, float),
        inverse=lambda x: -np.asarray(x, float),
        neutral=np.zeros(n),
        scale=lambda a, x: float(a) * np.asarray(x, float),
        commutative=True,
    )


def make_vector_space(n: int) -> AlgebraHandle:
    """R^n with dilations x + a(y - x).

    The handle also carries the flat exponential ``x + v`` and logarithm
    ``y - x``, so it doubles as the flat adapter for the ladder construction.
    """
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= 16):
        raise ValueError(f"vector space dimension must be in [1, 16], got {n!r}")
    n = int(n)

    def circ(a, x, y):
        x = _vec(x, n)
        return x + float(a) * (_vec(y, n) - x)

    def sampler(rng, k, spread=None):
        s = 1.0 if spread is None else float(spread)
        return [rng.uniform(-s, s, n) for _ in range(k)]

    return AlgebraHandle(
        name=f"vector:{n}",
        circ=circ,
        metric=lambda x, y: float(np.linalg.norm(_vec(x, n) - _vec(y, n))),
        sampler=sampler,
        neutral=np.zeros(n),
        group=vector_group(n),
        exp=lambda x, v: _vec(x, n) + _vec(v, n),
        log=lambda x, y: _vec(y, n) - _vec(x, n),
    )


# -- unipotent upper-triangular matrices -----------------------------------

def dilator(e, n: int) -> np.ndarray:
    """The diagonal matrix diag(e, e^2, ..., e^n)."""
    if e <= 0:
        raise ValueError("dilator scale must be positive")
    return np.diag([float(e) ** i for i in range(1, n + 1)])


def _offset_powers(a, n):
    # entry (i, j) of E^-1 M E is M_ij * a^(j-i); lower entries are zero anyway
    if isinstance(a, Fraction):
        return np.array([[a ** (j - i) if j >= i else Fraction(0) for j in range(n)]
                         for i in range(n)], dtype=object)
    i, j = np.indices((n, n))
    d = np.maximum(j - i, 0)
    return np.where(j >= i, float(a) ** d, 0.0)


def conjugate(e, m: np.ndarray) -> np.ndarray:
    """E^-1 m E for E = dilator(e, n), computed entrywise."""
    m = np.asarray(m)
    return m * _offset_powers(e, m.shape[0])


def is_unipotent(m, tol=0.0) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    d = np.diagonal(m).astype(float)
    low = np.tril(m, -1).astype(float)
    return bool(np.all(np.abs(d - 1.0) <= tol) and np.all(np.abs(low) <= tol))


def unipotent_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of I + N as the finite series I - N + N^2 - ...; keeps the pattern exact."""
    m = np.asarray(m)
    n = m.shape[0]
    eye = _eye(n, m.dtype == object)
    neg = eye - m
    term = eye
    out = eye
    for _ in range(n - 1):
        term = term @ neg
        out = out + term
    return out


def _eye(n, exact=False):
    if exact:
        out = np.full((n, n), Fraction(0), dtype=object)
        for i in range(n):
            out[i, i] = Fraction(1)
        return out
    return np.eye(n)


def to_exact(m) -> np.ndarray:
    m = np.asarray(m)
    if m.dtype == object:
        return m
    return np.vectorize(Fraction, otypes=[object])(m)


def random_unipotent(rng: np.random.Generator, n: int, bound: float = 1.0) -> np.ndarray:
    m = np.eye(n)
    iu = np.triu_indices(n, 1)
    m[iu] = rng.uniform(-bound, bound, len(iu[0]))
    return m


def unipotent_group(n: int, exact: bool = False) -> ConicalGroupSpec:
    return ConicalGroupSpec(
        mul=lambda x, y: np.asarray(x) @ np.asarray(y),
        inverse=unipotent_inverse,
        neutral=_eye(n, exact),
        scale=conjugate,
        commutative=(n <= 2),
    )


def _mat(x, n, exact):
    x = np.asarray(x) if exact else np.asarray(x, dtype=float)
    if x.shape != (n, n):
        raise DomainError(f"expected an {n}x{n} matrix, got shape {x.shape}")
    if not is_unipotent(x):
        raise DomainError("matrix is not upper triangular with unit diagonal")
    return to_exact(x) if exact else x


def make_unipotent(n: int, exact: bool = False) -> AlgebraHandle:
    """The group N of unipotent n x n matrices with x E^-1 x^-1 y E dilations.

    With ``exact=True`` points and scalars are promoted to ``Fraction`` and
    every composition is carried out in exact rational arithmetic.  Floats are
    dyadic rationals, so nothing is lost on the way in.  This is slow but
    immune to the a^-(n-1) amplification of rounding near the base point.
    """
    if not (isinstance(n, (int, np.integer)) and 2 <= n <= 8):
        raise ValueError(f"unipotent dimension must be in [2, 8], got {n!r}")
    n = int(n)

    def circ(a, x, y):
        x = _mat(x, n, exact)
        y = _mat(y, n, exact)
        if exact and not isinstance(a, Fraction):
            a = Fraction(a)
        return x @ conjugate(a, unipotent_inverse(x) @ y)

    def metric(x, y):
        d = np.asarray(x) - np.asarray(y)
        return float(np.linalg.norm(np.asarray(d, dtype=float)))

    def sampler(rng, k, spread=None):
        b = 1.0 if spread is None else float(spread)
        return [random_unipotent(rng, n, b) for _ in range(k)]

    return AlgebraHandle(
        name=f"unipotent{'-exact' if exact else ''}:{n}",
        circ=circ,
        metric=metric,
        sampler=sampler,
        neutral=_eye(n, exact),
        group=unipotent_group(n, exact),
        exact=exact,
    )


# -- conical groups (converse construction) --------------------------------

def check_conical_spec(spec: ConicalGroupSpec, metric, points, scalars, tol=1e-9) -> float:
    """Sampled group and scalar-action axioms.  Raises on the first violation.

    ``points`` is a sequence of triples; ``scalars`` a sequence of pairs.
    Returns the largest residual seen.
    """
    mul, inv, e, sc = spec.mul, spec.inverse, spec.neutral, spec.scale
    worst = 0.0

    def check(name, lhs, rhs):
        nonlocal worst
        r = float(metric(lhs, rhs))
        if not r < tol:
            raise ConicalSpecError(name, r)
        worst = max(worst, r)

    for (x, y, z), (a, b) in zip(points, scalars):
        check("associativity", mul(mul(x, y), z), mul(x, mul(y, z)))
        check("left neutral", mul(e, x), x)
        check("right neutral", mul(x, e), x)
        check("left inverse", mul(inv(x), x), e)
        check("right inverse", mul(x, inv(x)), e)
        check("scale composition a(bx) = (ab)x", sc(a, sc(b, x)), sc(a * b, x))
        check("scale distributes a(xy) = ax ay", sc(a, mul(x, y)), mul(sc(a, x), sc(a, y)))
        check("scale commutes with inverse", sc(a, inv(x)), inv(sc(a, x)))
        check("scale fixes neutral", sc(a, e), e)
    return worst


def make_conical(spec: ConicalGroupSpec, metric, sampler, name="conical",
                 seed=0, checks=32, tol=1e-9, scalar_range=(0.25, 4.0)) -> AlgebraHandle:
    """Emergent algebra of a conical group: x o_a y = x . a(x^-1 . y).

    The group data are checked on ``checks`` seeded samples before the handle is built.
    """
    if checks:
        rng = np.random.default_rng(seed)
        points = [tuple(sampler(rng, 3, None)) for _ in range(checks)]
        lo, hi = np.log(scalar_range)
        scalars = [tuple(np.exp(rng.uniform(lo, hi, 2))) for _ in range(checks)]
        check_conical_spec(spec, metric, points, scalars, tol)

    def circ(a, x, y):
        return spec.mul(x, spec.scale(a, spec.mul(spec.inverse(x), y)))

    return AlgebraHandle(
        name=name,
        circ=circ,
        metric=metric,
        sampler=sampler,
        neutral=spec.neutral,
        group=spec,
    )


# -- the round sphere ------------------------------------------------------

NORTH = np.array([0.0, 0.0, 1.0])


def _unit(x):
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise DomainError(f"sphere points are 3-vectors, got shape {x.shape}")
    nrm = np.linalg.norm(x)
    if abs(nrm - 1.0) > 1e-9:
        raise DomainError(f"point is not on the unit sphere (norm {nrm})")
    return x / nrm


def sphere_exp(x, v) -> np.ndarray:
    """Geodesic exponential on S^2; |v| must stay below pi."""
    x = _unit(x)
    v = np.asarray(v, dtype=float)
    normal = float(np.dot(x, v))
    if abs(normal) > 1e-8 * max(1.0, float(np.linalg.norm(v))):
        raise DomainError("vector is not tangent at the base point")
    v = v - normal * x
    t = float(np.linalg.norm(v))
    if t >= math.pi:
        raise DomainError(f"tangent vector too long for exp: |v| = {t}")
    if t == 0.0:
        return x.copy()
    p = math.cos(t) * x + (math.sin(t) / t) * v
    return p / np.linalg.norm(p)


def sphere_log(x, y) -> np.ndarray:
    """Inverse of :func:`sphere_exp`; rejects (near-)antipodal pairs."""
    x = _unit(x)
    y = _unit(y)
    c = float(np.dot(x, y))
    u = y - c * x
    # second projection: for y close to x the cancellation above leaves a
    # normal component comparable to |u| itself
    u = u - float(np.dot(u, x)) * x
    s = float(np.linalg.norm(u))
    theta = math.atan2(s, c)
    if theta > math.pi - _ANTIPODAL_GUARD:
        raise DomainError("antipodal points have no unique geodesic")
    if s == 0.0:
        return np.zeros(3)
    return (theta / s) * u


def great_circle(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return math.atan2(float(np.linalg.norm(np.cross(x, y))), float(np.dot(x, y)))


def _tangent_basis(x):
    helper = np.array([1.0, 0.0, 0.0]) if abs(x[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - np.dot(helper, x) * x
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(x, e1)


def make_sphere() -> AlgebraHandle:
    """Unit sphere S^2 with geodesic dilations exp_x(a log_x y)."""

    def circ(a, x, y):
        return sphere_exp(x, float(a) * sphere_log(x, y))

    def sampler(rng, k, spread=None):
        # all k points lie within spread/2 of a random centre, so pairwise
        # separation stays below spread
        spread = SPHERE_CUTOFF if spread is None else min(float(spread), SPHERE_CUTOFF)
        centre = rng.normal(size=3)
        centre /= np.linalg.norm(centre)
        e1, e2 = _tangent_basis(centre)
        out = []
        for _ in range(k):
            phi = rng.uniform(0.0, 2 * math.pi)
            r = 0.5 * spread * math.sqrt(rng.uniform())
            out.append(sphere_exp(centre, r * (math.cos(phi) * e1 + math.sin(phi) * e2)))
        return out

    return AlgebraHandle(
        name="sphere",
        circ=circ,
        metric=great_circle,
        sampler=sampler,
        neutral=NORTH.copy(),
        exp=sphere_exp,
        log=sphere_log,
    )


# -- descriptors -------------------------------------------------------------

INSTANCE_KINDS = ("vector", "flat", "unipotent", "unipotent-exact", "sphere")


def make_instance(descriptor: str) -> AlgebraHandle:
    """Build a handle from ``kind[:param]``, e.g. ``vector:3`` or ``sphere``."""
    kind, _, param = descriptor.partition(":")
    kind = kind.strip().lower()
    if kind not in INSTANCE_KINDS:
        raise ValueError(f"unknown instance kind {kind!r}; expected one of {', '.join(INSTANCE_KINDS)}")
    if kind == "sphere":
        if param:
            raise ValueError("sphere takes no parameter")
        return make_sphere()
    try:
        n = int(param)
    except ValueError:
        raise ValueError(f"instance {descriptor!r} needs an integer dimension") from None
    if kind in ("vector", "flat"):
        return make_vector_space(n)
    return make_unipotent(n, exact=(kind == "unipotent-exact"))
