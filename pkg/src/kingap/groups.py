"""Membership of affine maps in the Poincare/trivial/scaling families.

Membership is decided by matrix identities on the linear part ``M``,
with ``eta = diag(1, -1, -1, -1)``:

* Lorentz / Poincare: ``M^T eta M == eta`` (Lorentz also needs zero
  translation).  Preserving ``t^2 - x^2 - y^2 - z^2`` for every vector is
  equivalent to preserving the associated bilinear form, by polarization.
* Euclidean isometry: ``M^T M == I``, by the same argument.
* Trivial: a Euclidean isometry with ``M e == +-e``.  Translations move
  vertical lines to vertical lines, so only the direction of the image of
  the time axis matters, and a unit vector parallel to ``e`` is ``+-e``.
* Orthochronous: ``A(e)_t > A(o)_t``, i.e. ``M[0, 0] > 0``.
* Scal o Poi: ``M^T eta M == c eta`` for some ``c > 0``; then
  ``M = sqrt(c) Lambda`` with ``Lambda`` Lorentz.
* Scal o Triv: ``M^T M == c I`` and ``M e == s e`` with ``s^2 == c``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from gmpy2 import mpq

from . import sampling
from .linalg import (
    ORIGIN,
    AffineMap,
    Mat4,
    Point4,
    SingularMap,
    apply,
    compose,
    identity,
    inverse,
    scaling,
    translation,
    vscale,
)
from .scalar import ONE, ZERO, Scalar, is_rational, sign, sqrt, to_scalar
from .verdict import Verdict

__all__ = [
    "FLAGS",
    "CLASSES",
    "ClassificationReport",
    "NotInScalTriv",
    "NotInScalPoi",
    "AlreadyInScalTriv",
    "classify",
    "boost",
    "decompose_scal_triv",
    "orthochronous_split",
    "sandwich_extract",
    "generate",
    "verify_group_identity",
    "saturate",
    "IDENTITIES",
]

FLAGS = (
    "linear",
    "translation",
    "lorentz",
    "poincare",
    "euclidean_isometry",
    "trivial",
    "scaling",
    "orthochronous",
    "in_poi_up",
    "in_triv_up",
    "in_scal_poi",
    "in_scal_triv",
    "respects_S_exact",
)

CLASSES = (
    "rotation",
    "boost",
    "trivial",
    "triv_up",
    "scaling",
    "translation",
    "poincare",
    "poi_up",
    "scal_poi",
    "scal_triv",
)


class NotInScalTriv(ValueError):
    pass


class NotInScalPoi(ValueError):
    pass


class AlreadyInScalTriv(ValueError):
    pass


@dataclass(frozen=True)
class ClassificationReport:
    flags: frozenset
    scal_poi_factor: Optional[Scalar] = None
    scal_triv_factor: Optional[Scalar] = None

    def __getattr__(self, name):
        if name in FLAGS:
            return name in self.flags
        raise AttributeError(name)

    def __contains__(self, flag: str) -> bool:
        return flag in self.flags

    def ordered_flags(self) -> list[str]:
        return [f for f in FLAGS if f in self.flags]


_ETA = (ONE, -ONE, -ONE, -ONE)


def _gram(m: Mat4, weights) -> list[list[Scalar]]:
    """``M^T W M`` for diagonal ``W`` given by its four weights."""
    cols = [m.col(j) for j in range(4)]
    g = [[None] * 4 for _ in range(4)]
    for i in range(4):
        ci = cols[i]
        for j in range(i, 4):
            cj = cols[j]
            v = ZERO
            for k in range(4):
                term = ci[k] * cj[k]
                v = v + term if weights[k] == ONE else v - term
            g[i][j] = g[j][i] = v
    return g


def _is_scaled_diag(g, diag, c) -> bool:
    for i in range(4):
        for j in range(4):
            want = c * diag[i] if i == j else ZERO
            if g[i][j] != want:
                return False
    return True


def classify(A: AffineMap) -> ClassificationReport:
    m = A.linear
    if not m.det():
        raise SingularMap("classification needs a bijective map")
    flags = set()
    zero_shift = not any(A.translation)
    if zero_shift:
        flags.add("linear")
    if m == Mat4.identity():
        flags.add("translation")

    eta_gram = _gram(m, _ETA)
    euc_gram = _gram(m, (ONE, ONE, ONE, ONE))
    first_col = m.col(0)
    vertical = not (first_col[1] or first_col[2] or first_col[3])
    s = first_col[0]

    if _is_scaled_diag(eta_gram, _ETA, ONE):
        flags.add("poincare")
        if zero_shift:
            flags.add("lorentz")
    if _is_scaled_diag(euc_gram, (ONE,) * 4, ONE):
        flags.add("euclidean_isometry")
        if vertical and (s == ONE or s == -ONE):
            flags.add("trivial")
    if sign(m[0, 0]) > 0:
        flags.add("orthochronous")
    a = m[0, 0]
    if zero_shift and a and m == Mat4.diag(a, a, a, a):
        flags.add("scaling")

    scal_poi_factor = None
    c = eta_gram[0][0]
    if sign(c) > 0 and _is_scaled_diag(eta_gram, _ETA, c):
        flags.add("in_scal_poi")
        scal_poi_factor = sqrt(c) if is_rational(c) else None

    scal_triv_factor = None
    c = euc_gram[0][0]
    if sign(c) > 0 and vertical and s * s == c and _is_scaled_diag(euc_gram, (ONE,) * 4, c):
        flags.add("in_scal_triv")
        scal_triv_factor = abs(s)

    row = m.row(0)
    if row[0] and not (row[1] or row[2] or row[3]):
        flags.add("respects_S_exact")

    if "poincare" in flags and "orthochronous" in flags:
        flags.add("in_poi_up")
    if "trivial" in flags and "orthochronous" in flags:
        flags.add("in_triv_up")
    return ClassificationReport(frozenset(flags), scal_poi_factor, scal_triv_factor)


def boost(v, axis=(1, 0, 0)) -> AffineMap:
    """Lorentz boost with speed ``v`` (light speed 1) along a unit spatial axis.

    ``t' = gamma (t - v n.x)``; the spatial part along ``n`` is mixed the same
    way and the orthogonal complement is left alone.
    """
    v = to_scalar(v)
    n = [to_scalar(c) for c in axis]
    if n[0] * n[0] + n[1] * n[1] + n[2] * n[2] != ONE:
        raise ValueError("boost axis must be a unit vector")
    if not (-ONE < v < ONE):
        raise ValueError("boost speed must lie strictly between -1 and 1")
    gamma = ONE / sqrt(ONE - v * v)
    return _boost_matrix(gamma, gamma * v, n)


def _boost_matrix(gamma, gamma_v, n) -> AffineMap:
    rows = [[gamma, -gamma_v * n[0], -gamma_v * n[1], -gamma_v * n[2]]]
    for i in range(3):
        row = [-gamma_v * n[i]]
        for j in range(3):
            row.append((ONE if i == j else ZERO) + (gamma - ONE) * n[i] * n[j])
        rows.append(row)
    return AffineMap(Mat4(tuple(v for r in rows for v in r)), ORIGIN)


def decompose_scal_triv(A: AffineMap) -> tuple[AffineMap, AffineMap, AffineMap]:
    """Return ``(D, tau_prime, T)`` with ``A == D o tau_prime o T``.

    ``D`` scales by ``|L(e)|`` for the linear part ``L`` of ``A``,
    ``T = L / |L(e)|`` is trivial and ``tau_prime`` translates by
    ``D^-1(A(o))``.
    """
    report = classify(A)
    if not report.in_scal_triv:
        raise NotInScalTriv("map is not a scaled trivial transformation")
    norm = report.scal_triv_factor
    inv = ONE / norm
    D = scaling(norm)
    T = AffineMap(A.linear.scaled(inv), ORIGIN)
    tau_prime = translation(vscale(inv, A.translation))
    return D, tau_prime, T


def orthochronous_split(A: AffineMap) -> tuple[AffineMap, AffineMap]:
    """Write a scaled Poincare map as ``s o p_up`` with ``p_up`` orthochronous.

    The positive root of the conformal factor is tried first; if the
    normalized map reverses time, the sign moves into the scaling.
    """
    report = classify(A)
    if not report.in_scal_poi:
        raise NotInScalPoi("map is not a scaled Poincare transformation")
    a = report.scal_poi_factor
    if a is None:
        raise NotInScalPoi("conformal factor has no root in a single quadratic field")
    if sign(A.linear[0, 0]) < 0:
        a = -a
    inv = ONE / a
    p_up = AffineMap(A.linear.scaled(inv), vscale(inv, A.translation))
    return scaling(a), p_up


def sandwich_extract(g: AffineMap) -> AffineMap:
    """An orthochronous Poincare map outside ``Triv^up`` obtained from ``g``.

    For ``g`` in ``Scal o Poi`` but not in ``Scal o Triv``, the factor
    ``p_up`` of ``g = s o p_up`` lies in any group containing ``g`` and all
    scalings.
    """
    report = classify(g)
    if not report.in_scal_poi:
        raise NotInScalPoi("map is not a scaled Poincare transformation")
    if report.in_scal_triv:
        raise AlreadyInScalTriv("map already lies in Scal o Triv")
    _, p_up = orthochronous_split(g)
    check = classify(p_up)
    assert check.in_poi_up and not check.in_scal_triv
    return p_up


# -- generators --------------------------------------------------------------


def _boost_of(rng: random.Random) -> AffineMap:
    while True:
        m = rng.randint(1, 6)
        n = rng.randint(1, 6)
        if m != n:
            break
    # v = (m^2 - n^2)/(m^2 + n^2), gamma = (m^2 + n^2)/(2mn)
    gamma = mpq(m * m + n * n, 2 * m * n)
    gamma_v = mpq(m * m - n * n, 2 * m * n)
    if rng.random() < 0.5:
        axis = [ZERO, ZERO, ZERO]
        axis[rng.randrange(3)] = ONE * rng.choice((-1, 1))
    else:
        axis = list(sampling.unit_vector3(rng))
    return _boost_matrix(gamma, gamma_v, axis)


def _spatial_orthogonal(rng: random.Random) -> Mat4:
    return sampling.spatial_rotation(rng, rng.randint(1, 2)) @ sampling.signed_permutation(
        rng, (1, 2, 3)
    )


_TIME_REFLECTION = Mat4.diag(-1, 1, 1, 1)


def _trivial_linear(rng: random.Random, allow_time_flip: bool) -> Mat4:
    m = _spatial_orthogonal(rng)
    if allow_time_flip and rng.random() < 0.5:
        m = _TIME_REFLECTION @ m
    return m


def _lorentz_linear(rng: random.Random, allow_time_flip: bool) -> Mat4:
    m = _boost_of(rng).linear @ _spatial_orthogonal(rng)
    if rng.random() < 0.5:
        m = sampling.spatial_rotation(rng, 1) @ m
    if allow_time_flip and rng.random() < 0.5:
        m = _TIME_REFLECTION @ m
    return m


def _shift(rng: random.Random) -> Point4:
    return sampling.random_point(rng, 5, 3)


def _scaling_factor(rng: random.Random) -> mpq:
    return mpq(rng.randint(1, 7), rng.randint(1, 4)) * rng.choice((-1, 1))


_REQUIRED_FLAG = {
    "rotation": "in_triv_up",
    "boost": "lorentz",
    "trivial": "trivial",
    "triv_up": "in_triv_up",
    "scaling": "scaling",
    "translation": "translation",
    "poincare": "poincare",
    "poi_up": "in_poi_up",
    "scal_poi": "in_scal_poi",
    "scal_triv": "in_scal_triv",
}


def _build(kind: str, rng: random.Random) -> AffineMap:
    if kind == "rotation":
        return AffineMap(sampling.spatial_rotation(rng, rng.randint(1, 3)), ORIGIN)
    if kind == "boost":
        return _boost_of(rng)
    if kind in ("trivial", "triv_up"):
        return AffineMap(_trivial_linear(rng, kind == "trivial"), _shift(rng))
    if kind == "scaling":
        return scaling(_scaling_factor(rng))
    if kind == "translation":
        return translation(_shift(rng))
    if kind in ("poincare", "poi_up"):
        return AffineMap(_lorentz_linear(rng, kind == "poincare"), _shift(rng))
    if kind == "scal_poi":
        return compose(scaling(_scaling_factor(rng)), _build("poincare", rng))
    if kind == "scal_triv":
        return compose(scaling(_scaling_factor(rng)), _build("trivial", rng))
    raise ValueError(f"unknown transformation class {kind!r}")


def generate(kind: str, seed: int) -> AffineMap:
    """A rational member of the named class, deterministic in ``seed``."""
    if kind not in _REQUIRED_FLAG:
        raise ValueError(f"unknown transformation class {kind!r}")
    A = _build(kind, sampling.stream(seed, "generate", kind))
    report = classify(A)
    if _REQUIRED_FLAG[kind] not in report:
        raise AssertionError(f"generator for {kind} produced a non-member")
    return A


# -- identities ---------------------------------------------------------------

IDENTITIES = ("new1", "new2", "closure_scal_triv", "closure_scal_poi", "triv_subset_poi")


def _j(A: AffineMap) -> dict:
    return A.to_json()


def verify_group_identity(
    identity_id: str,
    samples: int,
    seed: int,
    elements: Optional[Iterable[AffineMap]] = None,
) -> Verdict:
    """Check a membership identity on generated elements.

    ``elements`` replaces the generated pool where that makes sense (the
    closure checks compose every element with every other one then).
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    checker = _IDENTITY_CHECKS.get(identity_id)
    if checker is None:
        raise ValueError(f"unknown identity {identity_id!r}")
    return checker(samples, seed, None if elements is None else list(elements))


def _check_new1(samples, seed, elements):
    v = Verdict()
    rng = sampling.stream(seed, "new1")
    pool = elements
    if pool is None:
        pool = []
        for i in range(samples):
            pick = i % 4
            if pick == 0:
                # +-1 scalings of trivial maps land inside the intersection
                s = scaling(rng.choice((-1, 1)))
                pool.append(compose(s, generate("trivial", rng.getrandbits(64))))
            elif pick == 1:
                pool.append(generate("scal_triv", rng.getrandbits(64)))
            elif pick == 2:
                pool.append(generate("poi_up", rng.getrandbits(64)))
            else:
                pool.append(generate("triv_up", rng.getrandbits(64)))
    hits = 0
    for f in pool:
        r = classify(f)
        if r.in_scal_triv and r.in_poi_up:
            hits += 1
            v.check(r.in_triv_up, "classify", lambda: {"map": _j(f), "claim": "ScalTriv & PoiUp => TrivUp"}, True, r.in_triv_up)
        if r.in_triv_up:
            both = r.in_scal_triv and r.in_poi_up
            v.check(both, "classify", lambda: {"map": _j(f), "claim": "TrivUp => ScalTriv & PoiUp"}, True, both)
    if elements is None:
        for i in range(samples):
            f = generate("triv_up", rng.getrandbits(64))
            r = classify(f)
            both = r.in_scal_triv and r.in_poi_up
            v.check(both, "classify", lambda: {"map": _j(f), "claim": "TrivUp => ScalTriv & PoiUp"}, True, both)
    v.witnesses.append({"intersection_members_seen": hits})
    return v


def _check_new2(samples, seed, elements):
    v = Verdict()
    rng = sampling.stream(seed, "new2")
    pool = elements or [generate("scal_poi", rng.getrandbits(64)) for _ in range(samples)]
    flipped = 0
    for f in pool:
        try:
            s, p_up = orthochronous_split(f)
        except (NotInScalPoi, SingularMap) as exc:
            v.check(False, "orthochronous_split", lambda: {"map": _j(f)}, "split", repr(exc))
            continue
        if sign(s.linear[0, 0]) < 0:
            flipped += 1
        rs, rp = classify(s), classify(p_up)
        v.check(rs.scaling, "classify", lambda: {"map": _j(s), "claim": "split factor is a scaling"}, True, rs.scaling)
        v.check(rp.in_poi_up, "classify", lambda: {"map": _j(p_up), "claim": "split factor is in PoiUp"}, True, rp.in_poi_up)
        back = compose(s, p_up)
        same = back == f
        v.check(same, "compose", lambda: {"map": _j(f), "split": [_j(s), _j(p_up)], "claim": "s o p_up == f"}, True, same)
    if elements is None:
        # the other inclusion: Scal o PoiUp lies in Scal o Poi
        for _ in range(samples):
            f = compose(generate("scaling", rng.getrandbits(64)), generate("poi_up", rng.getrandbits(64)))
            r = classify(f)
            v.check(r.in_scal_poi, "classify", lambda: {"map": _j(f), "claim": "Scal o PoiUp in Scal o Poi"}, True, r.in_scal_poi)
    v.witnesses.append({"time_reversing_cases": flipped})
    return v


def _check_closure(kind, flag):
    def run(samples, seed, elements):
        v = Verdict()
        rng = sampling.stream(seed, "closure", kind)
        if elements is not None:
            pairs = [(a, b) for a in elements for b in elements]
        else:
            pairs = [
                (generate(kind, rng.getrandbits(64)), generate(kind, rng.getrandbits(64)))
                for _ in range(samples)
            ]
        for a, b in pairs:
            ab = compose(a, b)
            ok = flag in classify(ab)
            v.check(ok, "compose", lambda: {"left": _j(a), "right": _j(b), "class": flag}, True, ok)
            ia = inverse(a)
            ok = flag in classify(ia)
            v.check(ok, "inverse", lambda: {"map": _j(a), "class": flag}, True, ok)
            same = compose(a, ia) == identity()
            v.check(same, "inverse", lambda: {"map": _j(a), "claim": "a o a^-1 == id"}, True, same)
        return v

    return run


def _check_triv_subset_poi(samples, seed, elements):
    v = Verdict()
    rng = sampling.stream(seed, "triv_subset_poi")
    for _ in range(samples):
        t = generate("trivial", rng.getrandbits(64))
        r = classify(t)
        v.check(r.poincare, "classify", lambda: {"map": _j(t), "claim": "Triv in Poi"}, True, r.poincare)
        u = generate("triv_up", rng.getrandbits(64))
        r = classify(u)
        v.check(r.in_poi_up, "classify", lambda: {"map": _j(u), "claim": "TrivUp in PoiUp"}, True, r.in_poi_up)
    b = generate("boost", rng.getrandbits(64))
    r = classify(b)
    strict = r.poincare and not r.trivial and r.in_poi_up and not r.in_triv_up
    v.check(strict, "classify", lambda: {"map": _j(b), "claim": "boost in Poi \\ Triv"}, True, strict)
    v.witnesses.append({"boost_outside_triv": _j(b)})
    return v


_IDENTITY_CHECKS = {
    "new1": _check_new1,
    "new2": _check_new2,
    "closure_scal_triv": _check_closure("scal_triv", "in_scal_triv"),
    "closure_scal_poi": _check_closure("scal_poi", "in_scal_poi"),
    "triv_subset_poi": _check_triv_subset_poi,
}


@dataclass
class SaturationResult:
    elements: list[AffineMap]
    outside_scal_poi: list[AffineMap] = field(default_factory=list)
    poi_up_outside_triv_up: int = 0


def saturate(generators: Iterable[AffineMap], max_length: int = 4) -> SaturationResult:
    """All distinct words of length <= ``max_length`` in the generators and
    their inverses, each classified."""
    letters = []
    for g in generators:
        letters.append(g)
        letters.append(inverse(g))
    seen = {}
    frontier = []
    for g in letters:
        if g not in seen:
            seen[g] = None
            frontier.append(g)
    for _ in range(max_length - 1):
        nxt = []
        for w in frontier:
            for g in letters:
                h = compose(w, g)
                if h not in seen:
                    seen[h] = None
                    nxt.append(h)
        frontier = nxt
    result = SaturationResult(list(seen))
    for h in result.elements:
        r = classify(h)
        if not r.in_scal_poi:
            result.outside_scal_poi.append(h)
        if r.in_poi_up and not r.in_triv_up:
            result.poi_up_outside_triv_up += 1
    return result
