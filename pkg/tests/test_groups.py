import pytest
from gmpy2 import mpq

from kingap import sampling
from kingap.groups import (
    CLASSES,
    AlreadyInScalTriv,
    NotInScalTriv,
    boost,
    classify,
    decompose_scal_triv,
    generate,
    orthochronous_split,
    sandwich_extract,
    saturate,
    verify_group_identity,
)
from kingap.linalg import (
    AffineMap,
    Mat4,
    SingularMap,
    compose,
    identity,
    linear_map,
    point,
    scaling,
    translation,
)
from kingap.scalar import ONE, is_rational, quad, sqrt

B = boost(mpq(3, 5))
SURD = linear_map([[mpq(3, 2), mpq(1, 2), 0, 0], [mpq(1, 2), mpq(3, 2), 0, 0], [0, 0, 1, 1], [0, 0, -1, 1]])
ETA = Mat4.diag(1, -1, -1, -1)


def test_boost_flags():
    r = classify(B)
    assert {"linear", "lorentz", "poincare", "orthochronous", "in_poi_up", "in_scal_poi"} <= r.flags
    assert r.scal_poi_factor == 1
    assert not r.trivial and not r.in_scal_triv


def test_scaling_flags():
    r = classify(scaling(2))
    assert {"linear", "scaling", "orthochronous", "in_scal_poi", "in_scal_triv", "respects_S_exact"} <= r.flags
    assert r.scal_poi_factor == 2 and r.scal_triv_factor == 2
    assert not r.poincare


def test_surd_factor_flags():
    r = classify(SURD)
    assert r.in_scal_poi and r.orthochronous
    assert not r.poincare and not r.in_scal_triv
    assert r.scal_poi_factor == sqrt(2)


def test_singular_rejected():
    with pytest.raises(SingularMap):
        classify(AffineMap(Mat4.zero(), point(0, 0, 0, 0)))


def test_decompose_examples():
    D, tau, T = decompose_scal_triv(identity())
    assert (D, tau, T) == (scaling(1), identity(), identity())
    R = linear_map([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    A = compose(translation(point(0, 0, 0, 1)), compose(scaling(3), R))
    D, tau, T = decompose_scal_triv(A)
    assert D == scaling(3)
    assert tau == translation(point(0, 0, 0, mpq(1, 3)))
    assert T == R
    assert compose(D, compose(tau, T)) == A
    with pytest.raises(NotInScalTriv):
        decompose_scal_triv(B)


def test_orthochronous_split_examples():
    assert orthochronous_split(B) == (scaling(1), B)
    s, p = orthochronous_split(scaling(-2))
    assert s == scaling(-2) and p == identity()
    s, p = orthochronous_split(SURD)
    assert s == scaling(sqrt(2))
    assert not is_rational(p.linear[0, 0])
    assert classify(p).in_poi_up
    m = p.linear
    assert m.transpose() @ ETA @ m == ETA
    assert compose(s, p) == SURD


def test_sandwich_examples():
    assert sandwich_extract(compose(scaling(2), B)) == B
    assert sandwich_extract(B) == B
    with pytest.raises(AlreadyInScalTriv):
        sandwich_extract(scaling(2))


@pytest.mark.parametrize("kind", CLASSES)
def test_generators_are_deterministic_members(kind):
    for seed in range(20):
        A = generate(kind, seed)
        assert A == generate(kind, seed)
        assert A.linear.is_rational()


def test_boost_generator_is_not_trivial():
    for seed in range(30):
        r = classify(generate("boost", seed))
        assert r.lorentz and not r.trivial


@pytest.mark.parametrize("identity_id", ["new1", "new2", "closure_scal_triv", "closure_scal_poi", "triv_subset_poi"])
def test_identities_hold(identity_id):
    v = verify_group_identity(identity_id, 60, 11)
    assert v.passed, v.counterexample


def test_triv_subset_records_boost_witness():
    v = verify_group_identity("triv_subset_poi", 10, 3)
    assert any("boost_outside_triv" in w for w in v.witnesses)


def test_closure_on_identity_alone():
    assert verify_group_identity("closure_scal_triv", 1, 0, elements=[identity()]).passed


def _lattice_ok(r):
    implied = [
        ("lorentz", "poincare"),
        ("in_poi_up", "poincare"),
        ("in_triv_up", "in_poi_up"),
        ("trivial", "poincare"),
        ("trivial", "euclidean_isometry"),
        ("trivial", "in_scal_triv"),
        ("poincare", "in_scal_poi"),
        ("in_scal_triv", "in_scal_poi"),
        ("scaling", "in_scal_triv"),
        ("translation", "trivial"),
    ]
    return all(b in r.flags for a, b in implied if a in r.flags)


def test_flag_lattice_on_generated_and_perturbed():
    rng = sampling.stream(0, "lattice")
    for kind in CLASSES:
        for seed in range(15):
            A = generate(kind, seed)
            assert _lattice_ok(classify(A))
            e = list(A.linear.entries)
            e[rng.randrange(16)] += sampling.nonzero_rational(rng)
            P = AffineMap(Mat4(tuple(e)), A.translation)
            if P.is_bijective():
                assert _lattice_ok(classify(P))


def test_scal_poi_factor_is_sound():
    for seed in range(40):
        A = generate("scal_poi", seed)
        a = classify(A).scal_poi_factor
        m = A.linear.scaled(ONE / a)
        assert m.transpose() @ ETA @ m == ETA


def test_respects_s_and_scal_poi_imply_scal_triv():
    seen = 0
    for seed in range(300):
        A = generate("scal_poi" if seed % 2 else "scal_triv", seed)
        r = classify(A)
        if r.respects_S_exact and r.in_scal_poi:
            seen += 1
            assert r.in_scal_triv
    assert seen > 100


def test_saturation_stays_inside():
    g = sandwich_extract(generate("scal_poi", 5)) if not classify(generate("scal_poi", 5)).in_scal_triv else B
    result = saturate([generate("scal_triv", 1), g], max_length=3)
    assert not result.outside_scal_poi
    assert result.poi_up_outside_triv_up > 0


def test_quad_field_boost():
    # speed 1/2 needs gamma = 2/sqrt(3)
    b = boost(mpq(1, 2))
    assert b.linear[0, 0] == quad(0, mpq(2, 3), 3)
    assert classify(b).lorentz
