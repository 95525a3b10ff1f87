"""Seeded sources of random rationals, points and rational orthogonal maps.

Everything here takes an explicit ``random.Random`` so that callers can
derive independent, reproducible streams.
"""

from __future__ import annotations

import random

from gmpy2 import mpq

from .linalg import Mat4, Point4
from .scalar import ONE, ZERO


def stream(seed: int, *labels) -> random.Random:
    """An RNG keyed on ``seed`` and labels; string seeding is hash-stable."""
    return random.Random(":".join([str(seed), *map(str, labels)]))


def randint(rng: random.Random, lo: int, hi: int) -> int:
    """Like ``rng.randint`` but several times faster; fine for small ranges."""
    return lo + int(rng.random() * (hi - lo + 1))


def random_sign(rng: random.Random) -> int:
    return 1 if rng.random() < 0.5 else -1


def random_rational(rng: random.Random, num: int = 9, den: int = 4) -> mpq:
    # one draw picks both numerator and denominator
    k, d = divmod(int(rng.random() * (2 * num + 1) * den), den)
    return mpq(k - num, d + 1)


def nonzero_rational(rng: random.Random, num: int = 9, den: int = 4) -> mpq:
    while True:
        v = random_rational(rng, num, den)
        if v:
            return v


def random_point(rng: random.Random, num: int = 9, den: int = 4) -> Point4:
    r = random_rational
    return Point4(r(rng, num, den), r(rng, num, den), r(rng, num, den), r(rng, num, den))


def pythagorean_triple(rng: random.Random, bound: int = 6) -> tuple[int, int, int]:
    """``(a, b, c)`` with ``a^2 + b^2 == c^2`` and ``c > 0``."""
    m, n = divmod(int(rng.random() * bound * bound), bound)
    m, n = m + 1, n + 1
    return m * m - n * n, 2 * m * n, m * m + n * n


def cos_sin(rng: random.Random, bound: int = 6) -> tuple[mpq, mpq]:
    """A rational point on the unit circle, uniformly signed."""
    a, b, c = pythagorean_triple(rng, bound)
    cs, sn = mpq(a, c), mpq(b, c)
    if rng.random() < 0.5:
        cs, sn = sn, cs
    return cs * random_sign(rng), sn * random_sign(rng)


def unit_vector3(rng: random.Random, bound: int = 3) -> tuple[mpq, mpq, mpq]:
    """A rational unit vector of R^3 from a Pythagorean quadruple."""
    while True:
        m, n, p, q = (randint(rng, -bound, bound) for _ in range(4))
        d = m * m + n * n + p * p + q * q
        if d:
            break
    return (
        mpq(m * m + n * n - p * p - q * q, d),
        mpq(2 * (m * q + n * p), d),
        mpq(2 * (n * q - m * p), d),
    )


def plane_rotation(i: int, j: int, c, s) -> Mat4:
    e = list(Mat4.identity().entries)
    e[5 * i] = c
    e[5 * j] = c
    e[4 * i + j] = -s
    e[4 * j + i] = s
    return Mat4(tuple(e))


def signed_permutation(rng: random.Random, axes: tuple[int, ...]) -> Mat4:
    """Permute and sign-flip the given coordinate axes, fixing the others."""
    e = list(Mat4.identity().entries)
    targets = list(axes)
    rng.shuffle(targets)
    for src in axes:
        e[5 * src] = ZERO
    for src, dst in zip(axes, targets):
        e[4 * dst + src] = ONE * random_sign(rng)
    return Mat4(tuple(e))


_SPATIAL_PLANES = ((1, 2), (1, 3), (2, 3))
_ALL_PLANES = ((0, 1), (0, 2), (0, 3)) + _SPATIAL_PLANES


def spatial_rotation(rng: random.Random, factors: int = 2) -> Mat4:
    """Product of Pythagorean rotations in random spatial planes."""
    m = Mat4.identity()
    for _ in range(factors):
        i, j = rng.choice(_SPATIAL_PLANES)
        c, s = cos_sin(rng)
        m = plane_rotation(i, j, c, s) @ m
    return m


def euclidean_orthogonal(rng: random.Random) -> Mat4:
    """A rational orthogonal map of R^4 that may mix time and space."""
    m = signed_permutation(rng, (0, 1, 2, 3))
    for _ in range(2):
        i, j = rng.choice(_ALL_PLANES)
        c, s = cos_sin(rng)
        m = plane_rotation(i, j, c, s) @ m
    return m
