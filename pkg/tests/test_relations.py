import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from kingap.groups import boost
from kingap.linalg import identity, inverse, point, scaling
from kingap.relations import (
    GEOMETRIES,
    RELATIONS,
    ArityMismatch,
    TupleSampler,
    check_respects,
    closed_under,
    geometry,
    holds,
    relation,
    respects,
    respects_both_ways,
)

B = boost(mpq(3, 5))
O = point(0, 0, 0, 0)
lam, S, col, bw, cong = (relation(n) for n in ("lambda", "simul", "col", "bw", "cong"))

small = st.fractions(min_value=-4, max_value=4, max_denominator=3)
points = st.tuples(small, small, small, small).map(lambda c: point(*c))


def test_holds_examples():
    assert holds(lam, [O, point(1, 1, 0, 0)])
    assert holds(S, [O, point(0, 1, 0, 0)])
    assert not holds(S, [O, point(mpq(-3, 4), mpq(5, 4), 0, 0)])
    assert not holds(col, [O, point(1, 0, 0, 0), point(0, 1, 0, 0)])
    assert holds(bw, [O, point(1, 1, 1, 1), point(2, 2, 2, 2)])


def test_arity_checked():
    with pytest.raises(ArityMismatch):
        holds(lam, [O])


def test_closed_under_examples():
    assert closed_under(identity(), col, [O, point(1, 2, 3, 4), point(0, 1, 0, 0)])
    assert closed_under(B, lam, [O, point(1, 1, 0, 0)])
    assert not closed_under(B, S, [O, point(0, 1, 0, 0)])


def test_respects_examples():
    assert respects(identity(), col, [O, point(1, 0, 0, 0), point(5, 5, 5, 5)])
    assert respects(scaling(2), cong, [O, point(1, 0, 0, 0), O, point(0, 1, 0, 0)])
    assert not respects(B, S, [O, point(0, 1, 0, 0)])


def test_check_respects_examples():
    sampler = TupleSampler(1, "relations")
    assert check_respects(identity(), geometry("lclassst"), sampler, 100).passed
    assert check_respects(B, geometry("relst"), sampler, 1000).passed
    v = check_respects(B, geometry("lclassst"), sampler, 1000)
    assert not v.passed
    assert v.counterexample.inputs["relation"] == "simul"


def test_geometry_expansion():
    g = geometry("eucl", ("rest",))
    assert g.names() == ["cong", "bw", "rest"]
    assert set(GEOMETRIES) >= {"relst", "lclassst", "rel", "eucl", "galst", "galst-lambda"}


@pytest.mark.parametrize("name", sorted(RELATIONS))
def test_constructed_tuples_satisfy_their_relation(name):
    sampler = TupleSampler(3, name)
    R = relation(name)
    for _ in range(200):
        t = sampler.related(name)
        if name == "bw" and t[0] == t[2] and t[1] != t[0]:
            # deliberate degenerate draw, used to exercise r == p
            assert not holds(R, t)
        else:
            assert holds(R, t)


@given(points, points)
def test_col_with_repeated_endpoint(p, q):
    assert holds(col, [p, q, p])


@settings(max_examples=200)
@given(points, points, points)
def test_bw_implies_col(p, q, r):
    if holds(bw, [p, q, r]):
        assert holds(col, [p, q, r])


def test_bw_implies_col_on_constructed():
    sampler = TupleSampler(0, "bw-col")
    for _ in range(500):
        t = sampler.draw("bw", 3)
        if holds(bw, t):
            assert holds(col, t)


def _col_rank(p, q, r):
    sympy = pytest.importorskip("sympy")
    rows = [[sympy.Rational(str(q[i] - p[i])) for i in range(4)], [sympy.Rational(str(r[i] - p[i])) for i in range(4)]]
    return sympy.Matrix(rows).rank()


def test_col_against_rank_oracle():
    # Col holds iff r == p or q - p is a multiple of r - p
    sampler = TupleSampler(0, "col-oracle")
    for _ in range(300):
        p, q, r = sampler.draw("col", 3)
        if r == p:
            expected = True
        else:
            expected = _col_rank(p, q, r) <= 1
        assert holds(col, [p, q, r]) == expected


def test_bw_against_dot_product_oracle():
    # for r != p: Bw iff collinear and 0 <= (q-p).(r-p) <= |r-p|^2
    sampler = TupleSampler(0, "bw-oracle")
    for _ in range(500):
        p, q, r = sampler.draw("bw", 3)
        if r == p:
            expected = q == p
        else:
            d = [r[i] - p[i] for i in range(4)]
            e = [q[i] - p[i] for i in range(4)]
            dot = sum(x * y for x, y in zip(d, e))
            expected = _col_rank(p, q, r) <= 1 and 0 <= dot <= sum(x * x for x in d)
        assert holds(bw, [p, q, r]) == expected


def test_spatial_congruence_definition():
    congS = relation("congS")
    sampler = TupleSampler(0, "congS")
    for _ in range(300):
        t = sampler.draw("congS", 4)
        p, q, r, s = t
        assert holds(congS, t) == (holds(S, [p, q]) and holds(S, [r, s]) and holds(cong, t))


@settings(max_examples=100)
@given(points, points)
def test_respects_is_closure_both_ways(p, q):
    for f in (B, scaling(mpq(-3, 2))):
        for R in (lam, S):
            assert respects(f, R, [p, q]) == respects_both_ways(f, R, [p, q])
    assert inverse(B) is not None
