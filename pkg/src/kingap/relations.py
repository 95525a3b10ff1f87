"""Spacetime relations, the closed-under / respects checks, and geometries.

Every evaluator is exact.  Geometries are looked up by name through the
live :data:`RELATIONS` registry, so a replaced evaluator is picked up by
every geometry that uses it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from gmpy2 import mpq

from . import sampling
from .linalg import AffineMap, Point4, apply, inverse, vadd, vscale, vsub
from .scalar import ZERO, Scalar
from .verdict import Verdict

__all__ = [
    "Relation",
    "Geometry",
    "ArityMismatch",
    "RELATIONS",
    "GEOMETRIES",
    "relation",
    "geometry",
    "holds",
    "closed_under",
    "respects",
    "check_respects",
    "collinear_parameter",
    "TupleSampler",
]


class ArityMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    evaluator: Callable[..., bool]

    def __call__(self, *points: Point4) -> bool:
        return holds(self, points)


@dataclass(frozen=True)
class Geometry:
    name: str
    relations: tuple[Relation, ...]

    def names(self) -> list[str]:
        return [r.name for r in self.relations]


def _lightlike(p, q) -> bool:
    dt = p[0] - q[0]
    dx = p[1] - q[1]
    dy = p[2] - q[2]
    dz = p[3] - q[3]
    return dt * dt == dx * dx + dy * dy + dz * dz


def _simultaneous(p, q) -> bool:
    return p[0] == q[0]


def collinear_parameter(p, q, r) -> Scalar | None:
    """The unique ``a`` with ``q == p + a(r - p)``, for ``r != p``.

    Returns None when no such ``a`` exists.  Solved from the first nonzero
    component of ``r - p`` and then checked on all four components.
    """
    d = vsub(r, p)
    for i in range(4):
        if d[i]:
            a = (q[i] - p[i]) / d[i]
            break
    else:
        raise ValueError("r == p: the parameter is not determined")
    for i in range(4):
        if q[i] - p[i] != a * d[i]:
            return None
    return a


def _collinear(p, q, r) -> bool:
    if r == p:
        return True
    return collinear_parameter(p, q, r) is not None


def _between(p, q, r) -> bool:
    if r == p:
        return q == p
    a = collinear_parameter(p, q, r)
    return a is not None and 0 <= a <= 1


def _sq_dist(p, q):
    dt = p[0] - q[0]
    dx = p[1] - q[1]
    dy = p[2] - q[2]
    dz = p[3] - q[3]
    return dt * dt + dx * dx + dy * dy + dz * dz


def _congruent(p, q, r, s) -> bool:
    return _sq_dist(p, q) == _sq_dist(r, s)


def _rest(p, q) -> bool:
    return p[1] == q[1] and p[2] == q[2] and p[3] == q[3]


def _spatially_congruent(p, q, r, s) -> bool:
    return p[0] == q[0] and r[0] == s[0] and _congruent(p, q, r, s)


def _temporally_congruent(p, q, r, s) -> bool:
    return p[0] - q[0] == r[0] - s[0]


RELATIONS: dict[str, Relation] = {
    r.name: r
    for r in (
        Relation("lambda", 2, _lightlike),
        Relation("simul", 2, _simultaneous),
        Relation("col", 3, _collinear),
        Relation("bw", 3, _between),
        Relation("cong", 4, _congruent),
        Relation("rest", 2, _rest),
        Relation("congS", 4, _spatially_congruent),
        Relation("congT", 4, _temporally_congruent),
    )
}

GEOMETRIES: dict[str, tuple[str, ...]] = {
    "relst": ("lambda",),
    "lclassst": ("simul", "lambda"),
    "rel": ("lambda", "bw"),
    "eucl": ("cong", "bw"),
    "galst": ("congS", "congT", "col"),
    "galst-lambda": ("congS", "congT", "col", "lambda"),
}


def relation(name: str) -> Relation:
    try:
        return RELATIONS[name]
    except KeyError:
        raise KeyError(f"unknown relation {name!r}") from None


def geometry(name: str, extra: Sequence[str] = ()) -> Geometry:
    """Built-in geometry by name, optionally expanded by extra relations."""
    try:
        names = GEOMETRIES[name]
    except KeyError:
        raise KeyError(f"unknown geometry {name!r}") from None
    names = tuple(names) + tuple(n for n in extra if n not in names)
    label = name if not extra else name + "+" + "+".join(extra)
    return Geometry(label, tuple(relation(n) for n in names))


def _check_arity(R: Relation, tup) -> None:
    if len(tup) != R.arity:
        raise ArityMismatch(f"{R.name} takes {R.arity} points, got {len(tup)}")


def holds(R: Relation, tup: Sequence[Point4]) -> bool:
    _check_arity(R, tup)
    return bool(R.evaluator(*tup))


def closed_under(f: AffineMap, R: Relation, tup: Sequence[Point4]) -> bool:
    _check_arity(R, tup)
    if not R.evaluator(*tup):
        return True
    return bool(R.evaluator(*(apply(f, p) for p in tup)))


def respects(f: AffineMap, R: Relation, tup: Sequence[Point4]) -> bool:
    _check_arity(R, tup)
    return bool(R.evaluator(*tup)) == bool(R.evaluator(*(apply(f, p) for p in tup)))


class TupleSampler:
    """Seeded source of point tuples for a named relation.

    Half of the draws are uniform random points; the other half are built
    to satisfy the relation, so that the forward direction of a respects
    check is actually exercised.
    """

    def __init__(self, seed: int = 0, *labels, positive_rate: float = 0.5):
        self.rng = sampling.stream(seed, "tuples", *labels)
        self.positive_rate = positive_rate

    def uniform(self, arity: int) -> tuple[Point4, ...]:
        rng = self.rng
        # small integer grids make accidental coincidences likely too
        if rng.random() < 0.25:
            return tuple(sampling.random_point(rng, 2, 1) for _ in range(arity))
        return tuple(sampling.random_point(rng) for _ in range(arity))

    def draw(self, name: str, arity: int) -> tuple[Point4, ...]:
        make = _CONSTRUCTORS.get(name)
        if make is None or self.rng.random() >= self.positive_rate:
            return self.uniform(arity)
        return make(self.rng)

    def related(self, name: str) -> tuple[Point4, ...]:
        """A tuple built to satisfy the named built-in relation.

        Betweenness is the exception: a tenth of its draws are the
        degenerate ``(p, q, p)``, which is false unless ``q == p``.
        """
        return _CONSTRUCTORS[name](self.rng)


def lightlike_offset(rng: random.Random) -> Point4:
    """A nonzero rational lightlike vector ``(c, a, b, 0)`` up to axis order."""
    if rng.random() < 0.25:
        n = sampling.unit_vector3(rng)
        k = sampling.nonzero_rational(rng)
        return Point4(k, k * n[0], k * n[1], k * n[2])
    a, b, c = sampling.pythagorean_triple(rng)
    k = sampling.nonzero_rational(rng, 3, 3)
    # one draw for the slot layout, one for the three signs
    i, j = _SLOT_PAIRS[int(rng.random() * 6)]
    signs = int(rng.random() * 8)
    spatial = [ZERO, ZERO, ZERO]
    spatial[i] = k * (a if signs & 1 else -a)
    spatial[j] = k * (b if signs & 2 else -b)
    return Point4(k * (c if signs & 4 else -c), *spatial)


_SLOT_PAIRS = ((0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1))


def _make_lambda(rng):
    p = sampling.random_point(rng)
    return p, vadd(p, lightlike_offset(rng))


def _make_simul(rng):
    p = sampling.random_point(rng)
    q = sampling.random_point(rng)
    return p, Point4(p[0], q[1], q[2], q[3])


def _make_col(rng, unit=False):
    p = sampling.random_point(rng)
    if rng.random() < 0.1:
        return p, sampling.random_point(rng), p
    r = sampling.random_point(rng)
    if not unit:
        a = sampling.random_rational(rng, 6, 3)
    else:
        a = rng.choice((ZERO, mpq(1), mpq(sampling.randint(rng, 0, 4), 4)))
    return p, vadd(p, vscale(a, vsub(r, p))), r


def _make_bw(rng):
    p = sampling.random_point(rng)
    if rng.random() < 0.1:
        return p, p, p
    return _make_col(rng, unit=True)


def _make_cong(rng):
    p = sampling.random_point(rng)
    q = sampling.random_point(rng)
    m = sampling.euclidean_orthogonal(rng)
    shift = sampling.random_point(rng)
    return p, q, vadd(m @ p, shift), vadd(m @ q, shift)


def _make_rest(rng):
    p = sampling.random_point(rng)
    return p, Point4(sampling.random_rational(rng), p[1], p[2], p[3])


def _make_cong_s(rng):
    p, q = _make_simul(rng)
    m = sampling.spatial_rotation(rng) @ sampling.signed_permutation(rng, (1, 2, 3))
    shift = sampling.random_point(rng)
    return p, q, vadd(m @ p, shift), vadd(m @ q, shift)


def _make_cong_t(rng):
    p = sampling.random_point(rng)
    q = sampling.random_point(rng)
    r = sampling.random_point(rng)
    s = sampling.random_point(rng)
    return p, q, r, Point4(r[0] - p[0] + q[0], s[1], s[2], s[3])


_CONSTRUCTORS = {
    "lambda": _make_lambda,
    "simul": _make_simul,
    "col": _make_col,
    "bw": _make_bw,
    "cong": _make_cong,
    "rest": _make_rest,
    "congS": _make_cong_s,
    "congT": _make_cong_t,
}


def check_respects(
    f: AffineMap, G: Geometry, sampler: TupleSampler, n: int
) -> Verdict:
    """Sampled necessary-condition check that ``f`` respects every relation of ``G``.

    A pass is evidence, not a proof of membership in the automorphism
    group; the first counterexample per relation is recorded.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    verdict = Verdict()
    for R in G.relations:
        for _ in range(n):
            tup = sampler.draw(R.name, R.arity)
            before = bool(R.evaluator(*tup))
            after = bool(R.evaluator(*(apply(f, p) for p in tup)))
            verdict.checks_run += 1
            if before != after:
                verdict.fail(
                    "respects",
                    {
                        "geometry": G.name,
                        "relation": R.name,
                        "tuple": [str(p) for p in tup],
                        "map": f.to_json(),
                    },
                    before,
                    after,
                )
                break
    return verdict


def respects_both_ways(f: AffineMap, R: Relation, tup: Sequence[Point4]) -> bool:
    """``closed_under(f)`` on ``tup`` and ``closed_under(f^-1)`` on the image."""
    image = tuple(apply(f, p) for p in tup)
    return closed_under(f, R, tup) and closed_under(inverse(f), R, image)
