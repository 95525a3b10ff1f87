"""Named verification suites and their reports.

Each suite exercises one lemma about the spacetime relations and
transformation groups with exact arithmetic.  A run is deterministic in
``(suite, samples, seed, grid)``; only ``duration_ms`` varies.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

from . import fol, sampling
from .groups import (
    classify,
    decompose_scal_triv,
    generate,
    orthochronous_split,
    sandwich_extract,
    saturate,
    verify_group_identity,
)
from .linalg import AffineMap, Mat4, Point4, apply, compose, linear_map, vadd
from .relations import TupleSampler, check_respects, geometry, relation
from .scalar import ONE, ZERO, format_scalar, is_rational
from .verdict import Verdict

__all__ = [
    "SUITES",
    "SuiteConfig",
    "SuiteReport",
    "UnknownSuite",
    "run_suite",
    "run_all",
    "RESPECT_DRAWS",
    "FORMULA_DRAWS_PER_SAMPLE",
    "LAMBDA_PAIRS_PER_BOOST",
]

LAMBDA_PAIRS_PER_BOOST = 1000
RESPECT_DRAWS = 50
FORMULA_DRAWS_PER_SAMPLE = 50
SATURATION_LENGTH = 4


class UnknownSuite(KeyError):
    pass


@dataclass
class SuiteConfig:
    suite: str
    samples: int = 200
    seed: int = 0
    format: str = "json"
    grid: bool = False

    def __post_init__(self):
        if self.suite != "all" and self.suite not in SUITES:
            raise UnknownSuite(self.suite)
        if self.samples < 1:
            raise ValueError("samples must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.format not in ("json", "text"):
            raise ValueError("format must be json or text")


@dataclass
class SuiteReport:
    suite: str
    samples: int
    seed: int
    passed: bool
    checks_run: int
    failures: list
    duration_ms: int
    claim: str = ""
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "checks_run": self.checks_run,
            "failures": self.failures,
            "duration_ms": self.duration_ms,
            "claim": self.claim,
            "witnesses": self.witnesses,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), default=str)

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [
            f"{self.suite}: {status} ({self.checks_run} checks, "
            f"{len(self.failures)} failures, {self.duration_ms} ms)",
            f"  claim: {self.claim}",
        ]
        for f in self.failures[:5]:
            lines.append(f"  failure: {json.dumps(f, default=str)}")
        return "\n".join(lines)


def _pt(p) -> list[str]:
    return [format_scalar(c) for c in p]


# -- suites ------------------------------------------------------------------


def _prop_2_1(samples: int, seed: int, grid: bool) -> Verdict:
    v = Verdict()
    rng = sampling.stream(seed, "prop-2.1")
    lam = relation("lambda").evaluator
    simul = relation("simul").evaluator
    sampler = TupleSampler(seed, "prop-2.1", "pairs")
    for _ in range(samples):
        f = generate("boost", rng.getrandbits(64))
        failed = False
        for _ in range(LAMBDA_PAIRS_PER_BOOST):
            p, q = sampler.related("lambda")
            before = lam(p, q)
            after = lam(apply(f, p), apply(f, q))
            v.checks_run += 1
            if before != after and not failed:
                failed = True
                v.fail("respects", {"relation": "lambda", "tuple": [_pt(p), _pt(q)], "map": f.to_json()}, before, after)
        # a pair of simultaneous events separated along the boost axis
        m = f.linear
        p = sampling.random_point(rng)
        q = vadd(p, Point4(ZERO, -m[0, 1], -m[0, 2], -m[0, 3]))
        before = simul(p, q)
        after = simul(apply(f, p), apply(f, q))
        broken = before and not after
        v.check(broken, "respects", lambda: {"relation": "simul", "tuple": [_pt(p), _pt(q)], "map": f.to_json()}, "S violated", "S kept")
        v.witnesses.append({"boost": f.to_json(), "s_pair": [_pt(p), _pt(q)]})
    return v


def _respect_sweep(kind: str, geometries, samples: int, seed: int, label: str) -> Verdict:
    v = Verdict()
    rng = sampling.stream(seed, label, kind)
    sampler = TupleSampler(seed, label, "tuples")
    geos = [geometry(name, extra) for name, extra in geometries]
    for _ in range(samples):
        f = generate(kind, rng.getrandbits(64))
        for G in geos:
            v.merge(check_respects(f, G, sampler, RESPECT_DRAWS))
    return v


def _az_inclusion(samples, seed, grid) -> Verdict:
    return _respect_sweep("scal_poi", [("relst", ()), ("rel", ())], samples, seed, "az-inclusion")


def _thm_6_2(samples, seed, grid) -> Verdict:
    v = _respect_sweep(
        "scal_triv",
        [("lclassst", ()), ("eucl", ("rest",)), ("galst-lambda", ())],
        samples,
        seed,
        "thm-6.2",
    )
    rng = sampling.stream(seed, "thm-6.2", "decompose")
    for _ in range(samples):
        A = generate("scal_triv", rng.getrandbits(64))
        D, tau, T = decompose_scal_triv(A)
        ok = compose(D, compose(tau, T)) == A
        v.check(ok, "decompose_scal_triv", lambda: {"map": A.to_json(), "claim": "D o tau' o T == A"}, True, ok)
        ok = classify(D).scaling
        v.check(ok, "decompose_scal_triv", lambda: {"map": A.to_json(), "claim": "D is a scaling"}, True, ok)
        ok = tau.is_translation()
        v.check(ok, "decompose_scal_triv", lambda: {"map": A.to_json(), "claim": "tau' is a translation"}, True, ok)
        ok = classify(T).trivial
        v.check(ok, "decompose_scal_triv", lambda: {"map": A.to_json(), "claim": "T is trivial"}, True, ok)
    return v


def _cor_6_5(samples, seed, grid) -> Verdict:
    v = verify_group_identity("closure_scal_triv", samples, seed)
    v.merge(verify_group_identity("closure_scal_poi", samples, seed))
    b = generate("boost", seed)
    r = classify(b)
    strict = r.in_scal_poi and not r.in_scal_triv
    v.check(strict, "classify", lambda: {"map": b.to_json(), "claim": "boost in ScalPoi \\ ScalTriv"}, True, strict)
    v.witnesses.append({"scal_poi_outside_scal_triv": b.to_json()})
    return v


def _prop_6_6(samples, seed, grid) -> Verdict:
    return verify_group_identity("triv_subset_poi", samples, seed)


def _eq_new1(samples, seed, grid) -> Verdict:
    return verify_group_identity("new1", samples, seed)


# conformal factor 2, so the orthochronous split needs sqrt(2)
SURD_CASE = Mat4.from_rows(
    [
        [ONE * 3 / 2, ONE / 2, 0, 0],
        [ONE / 2, ONE * 3 / 2, 0, 0],
        [0, 0, 1, 1],
        [0, 0, -1, 1],
    ]
)


def _eq_new2(samples, seed, grid) -> Verdict:
    v = verify_group_identity("new2", samples, seed)
    f = linear_map(SURD_CASE)
    v.merge(verify_group_identity("new2", 1, seed, elements=[f]))
    s, p_up = orthochronous_split(f)
    irrational = not is_rational(s.linear[0, 0])
    v.check(irrational, "orthochronous_split", lambda: {"map": f.to_json()}, "irrational factor", format_scalar(s.linear[0, 0]))
    v.witnesses.append({"surd_split": {"map": f.to_json(), "s": s.to_json(), "p_up": p_up.to_json()}})
    return v


def _outside_scal_triv(rng) -> AffineMap:
    while True:
        g = generate("scal_poi", rng.getrandbits(64))
        if not classify(g).in_scal_triv:
            return g


def _borisov2_steps(samples, seed, grid) -> Verdict:
    v = Verdict()
    rng = sampling.stream(seed, "borisov2-steps")
    witness = None
    for _ in range(samples):
        g = _outside_scal_triv(rng)
        p_up = sandwich_extract(g)
        r = classify(p_up)
        ok = r.in_poi_up and not r.in_triv_up
        v.check(ok, "sandwich_extract", lambda: {"map": g.to_json()}, "PoiUp \\ TrivUp", sorted(r.flags))
        if witness is None:
            witness = p_up
    gens = [generate("scal_triv", rng.getrandbits(64)) for _ in range(2)] + [witness]
    result = saturate(gens, SATURATION_LENGTH)
    v.checks_run += len(result.elements)
    for h in result.outside_scal_poi:
        v.fail("saturate", {"word_image": h.to_json()}, "in ScalPoi", "outside ScalPoi")
    ok = result.poi_up_outside_triv_up > 0
    v.check(ok, "saturate", lambda: {"generators": [g.to_json() for g in gens]}, "PoiUp \\ TrivUp reached", result.poi_up_outside_triv_up)
    v.witnesses.append(
        {
            "sandwich_witness": witness.to_json(),
            "saturation_size": len(result.elements),
            "poi_up_outside_triv_up": result.poi_up_outside_triv_up,
        }
    )
    return v


def _formula_suite(formula: str, rel: str, label: str) -> Callable:
    def run(samples, seed, grid):
        phi = fol.builtin(formula)
        R = relation(rel)
        if grid:
            return fol.oracle_agree(phi, R, fol.grid_tuples((-1, 0, 1), R.arity))
        sampler = TupleSampler(seed, label)
        return fol.oracle_agree(phi, R, sampler, samples * FORMULA_DRAWS_PER_SAMPLE)

    return run


def _shear() -> AffineMap:
    # (t, x, y, z) -> (t, x + t, y, z)
    return linear_map(Mat4.from_rows([[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))


def _galst_7_1(samples, seed, grid) -> Verdict:
    v = Verdict()
    sampler = TupleSampler(seed, "galst-7.1", "pairs")
    simul = relation("simul").evaluator
    cong_s = relation("congS").evaluator
    for _ in range(samples):
        p, q = sampler.draw("simul", 2)
        a, b = simul(p, q), cong_s(p, q, p, q)
        v.check(a == b, "holds", lambda: {"claim": "S(p,q) <=> congS(p,q,p,q)", "tuple": [_pt(p), _pt(q)]}, a, b)
    v.merge(
        _respect_sweep("scal_triv", [("galst-lambda", ()), ("lclassst", ())], samples, seed, "galst-7.1")
    )
    # maps outside Scal o Triv break both geometries on a fixed pair
    origin = Point4(ZERO, ZERO, ZERO, ZERO)
    b = generate("boost", seed)
    m = b.linear
    q = Point4(ZERO, -m[0, 1], -m[0, 2], -m[0, 3])
    light = Point4(ONE, ONE, ZERO, ZERO)
    shear = _shear()
    cases = [
        ("boost", b, "lclassst", "simul", (origin, q)),
        ("boost", b, "galst-lambda", "congS", (origin, q, origin, q)),
        ("shear", shear, "lclassst", "lambda", (origin, light)),
        ("shear", shear, "galst-lambda", "lambda", (origin, light)),
    ]
    for name, f, geo, rel, tup in cases:
        R = relation(rel)
        before = R.evaluator(*tup)
        after = R.evaluator(*(apply(f, p) for p in tup))
        broken = before != after
        v.check(broken, "respects", lambda: {"map": f.to_json(), "geometry": geo, "relation": rel}, "not respected", "respected")
        v.witnesses.append({"map": name, "geometry": geo, "relation": rel, "tuple": [_pt(p) for p in tup]})
    return v


def _conjecture_chain(samples, seed, grid) -> Verdict:
    v = Verdict()
    rng = sampling.stream(seed, "conjecture-chain")
    respecting = 0
    for i in range(samples):
        # alternate so that both sides of the implication occur
        kind = "scal_triv" if i % 2 else "scal_poi"
        f = generate(kind, rng.getrandbits(64))
        r = classify(f)
        v.check(r.in_scal_poi, "classify", lambda: {"map": f.to_json(), "claim": "member of ScalPoi"}, True, r.in_scal_poi)
        if r.respects_S_exact:
            respecting += 1
            v.check(r.in_scal_triv, "classify", lambda: {"map": f.to_json(), "claim": "respects S => ScalTriv"}, True, r.in_scal_triv)
    b = generate("boost", seed)
    r = classify(b)
    strict = r.in_scal_poi and not r.respects_S_exact
    v.check(strict, "classify", lambda: {"map": b.to_json(), "claim": "boost in Aut(RelST) \\ Aut(RelST,S)"}, True, strict)
    lam_s = [("lclassst", ())]
    v.merge(_respect_sweep("scal_triv", lam_s, max(1, samples // 10), seed, "conjecture-chain"))
    v.witnesses.append({"respecting_s": respecting, "boost": b.to_json()})
    return v


@dataclass(frozen=True)
class _Suite:
    run: Callable[[int, int, bool], Verdict]
    claim: str


SUITES: dict[str, _Suite] = {
    "prop-2.1": _Suite(_prop_2_1, "a Lorentz boost with nonzero speed respects lightlike relatedness but not simultaneity"),
    "az-inclusion": _Suite(_az_inclusion, "scaled Poincare maps are automorphisms of RelST"),
    "thm-6.2": _Suite(_thm_6_2, "scaled trivial maps are automorphisms of LClassST and decompose as D o tau o T"),
    "cor-6.5": _Suite(_cor_6_5, "Scal o Triv and Scal o Poi are groups under composition, the first strictly inside the second"),
    "prop-6.6": _Suite(_prop_6_6, "trivial maps are Poincare maps and the inclusion is strict"),
    "eq-new1": _Suite(_eq_new1, "(Scal o Triv) intersected with PoiUp equals TrivUp"),
    "eq-new2": _Suite(_eq_new2, "Scal o Poi equals Scal o PoiUp"),
    "borisov2-steps": _Suite(_borisov2_steps, "a scaled Poincare map outside Scal o Triv yields a PoiUp map outside TrivUp"),
    "fol-phicol": _Suite(_formula_suite("phi_col", "col", "fol-phicol"), "the field formula phi_col defines collinearity"),
    "bw-def": _Suite(_formula_suite("phi_bw", "bw", "bw-def"), "betweenness is defined by collinearity with a = b^2 and 1 - a = c^2"),
    "galst-7.1": _Suite(_galst_7_1, "GalST expanded by lightlike relatedness has the automorphisms of LClassST"),
    "conjecture-chain": _Suite(_conjecture_chain, "scaled Poincare maps respecting simultaneity are scaled trivial maps"),
}


def run_suite(config: SuiteConfig) -> SuiteReport:
    try:
        suite = SUITES[config.suite]
    except KeyError:
        raise UnknownSuite(config.suite) from None
    start = time.perf_counter()
    verdict = suite.run(config.samples, config.seed, config.grid)
    elapsed = int((time.perf_counter() - start) * 1000)
    return SuiteReport(
        suite=config.suite,
        samples=config.samples,
        seed=config.seed,
        passed=verdict.passed,
        checks_run=verdict.checks_run,
        failures=[f.to_json() for f in verdict.failures],
        duration_ms=elapsed,
        claim=suite.claim,
        witnesses=verdict.witnesses,
    )


def run_all(config: SuiteConfig):
    """Reports for ``config.suite`` or, for "all", every suite in order."""
    names = list(SUITES) if config.suite == "all" else [config.suite]
    for name in names:
        yield run_suite(SuiteConfig(name, config.samples, config.seed, config.format, config.grid))
