"""One test per acceptance criterion; a summary line per criterion is
printed at the end of the pytest run."""

import json
import time

import pytest

from conftest import RESULTS
from kingap import relations
from kingap.groups import classify, decompose_scal_triv, generate
from kingap.harness import SuiteConfig, run_suite
from kingap.linalg import compose
from kingap.relations import TupleSampler
from kingap import sampling


def record(n, checks, elapsed, limit):
    failed = [name for name, ok in checks if not ok]
    if elapsed > limit:
        failed.append(f"took {elapsed:.1f}s > {limit}s")
    RESULTS[n] = (not failed, f"{elapsed:.1f}s" + (f"  failed: {', '.join(failed)}" if failed else ""))
    assert not failed, failed


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def test_criterion_01_boosts_respect_lambda_not_simul():
    r, t = timed(lambda: run_suite(SuiteConfig("prop-2.1", 200, 0)))
    pairs = r.checks_run - 200
    checks = [
        ("suite passed", r.passed),
        ("1000 pairs per boost", pairs == 200 * 1000),
        ("an S-pair per boost", len(r.witnesses) == 200 and all(len(w["s_pair"]) == 2 for w in r.witnesses)),
    ]
    record(1, checks, t, 10)


def test_criterion_02_inclusions():
    az, t1 = timed(lambda: run_suite(SuiteConfig("az-inclusion", 200, 0)))
    thm, t2 = timed(lambda: run_suite(SuiteConfig("thm-6.2", 200, 0)))
    checks = [("Scal o Poi respects RelST", az.passed), ("Scal o Triv respects the classical geometries", thm.passed)]
    record(2, checks, t1 + t2, 20)


def test_criterion_03_decomposition():
    def run():
        rng = sampling.stream(0, "criterion-3")
        ok = 0
        for _ in range(200):
            A = generate("scal_triv", rng.getrandbits(64))
            D, tau, T = decompose_scal_triv(A)
            if (
                compose(D, compose(tau, T)) == A
                and classify(D).scaling
                and tau.is_translation()
                and classify(T).trivial
            ):
                ok += 1
        return ok

    ok, t = timed(run)
    record(3, [("200 exact recompositions", ok == 200)], t, 5)


def test_criterion_04_closure():
    r, t = timed(lambda: run_suite(SuiteConfig("cor-6.5", 200, 0)))
    checks = [("closure", r.passed), ("strictness witness", bool(r.witnesses))]
    record(4, checks, t, 5)


def test_criterion_05_trivial_inside_poincare():
    r, t = timed(lambda: run_suite(SuiteConfig("prop-6.6", 200, 0)))
    checks = [("Triv in Poi", r.passed), ("boost witness", any("boost_outside_triv" in w for w in r.witnesses))]
    record(5, checks, t, 5)


def test_criterion_06_membership_identities():
    def run():
        return [run_suite(SuiteConfig(s, 200, 0)) for s in ("eq-new1", "eq-new2", "borisov2-steps")]

    (n1, n2, bor), t = timed(run)
    surd = [w for w in n2.witnesses if "surd_split" in w]
    sat = [w for w in bor.witnesses if "saturation_size" in w]
    checks = [
        ("eq-new1", n1.passed),
        ("eq-new2", n2.passed),
        ("surd split", bool(surd) and "sqrt(2)" in json.dumps(surd)),
        ("borisov2-steps", bor.passed),
        ("saturation ran", bool(sat) and sat[0]["poi_up_outside_triv_up"] > 0),
    ]
    record(6, checks, t, 30)


def test_criterion_07_conjecture_chain():
    r, t = timed(lambda: run_suite(SuiteConfig("conjecture-chain", 500, 0)))
    w = r.witnesses[-1]
    checks = [("implication", r.passed), ("antecedent exercised", w["respecting_s"] > 0), ("boost witness", "boost" in w)]
    record(7, checks, t, 10)


def test_criterion_08_phi_col():
    grid, t = timed(lambda: run_suite(SuiteConfig("fol-phicol", 200, 0, grid=True)))
    rand = run_suite(SuiteConfig("fol-phicol", 200, 0))
    checks = [
        ("grid agreement", grid.passed and grid.checks_run == 531441),
        ("random agreement", rand.passed and rand.checks_run == 10**4),
    ]
    record(8, checks, t, 120)


def test_criterion_09_phi_bw():
    r, t = timed(lambda: run_suite(SuiteConfig("bw-def", 200, 0)))
    # replay the suite's draws to confirm the special cases were present
    sampler = TupleSampler(0, "bw-def")
    low = high = degenerate = 0
    for _ in range(r.checks_run):
        p, q, rr = sampler.draw("bw", 3)
        degenerate += rr == p
        low += rr != p and q == p
        high += rr != p and q == rr
    checks = [
        ("agreement", r.passed and r.checks_run == 10**4),
        ("a = 0 cases", low > 0),
        ("a = 1 cases", high > 0),
        ("r = p cases", degenerate > 0),
    ]
    record(9, checks, t, 10)


def _flipped(p, q):
    dt, dx, dy, dz = (p[i] - q[i] for i in range(4))
    return dt * dt + dx * dx == dy * dy + dz * dz


def test_criterion_10_determinism_and_mutation(monkeypatch):
    def strip(report):
        d = report.to_json()
        d.pop("duration_ms")
        return json.dumps(d, default=str)

    start = time.perf_counter()
    same = all(
        strip(run_suite(SuiteConfig(s, 20, 7))) == strip(run_suite(SuiteConfig(s, 20, 7)))
        for s in ("prop-2.1", "az-inclusion", "eq-new2", "galst-7.1")
    )
    monkeypatch.setitem(relations.RELATIONS, "lambda", relations.Relation("lambda", 2, _flipped))
    mutated = [run_suite(SuiteConfig(s, 20, 7)) for s in ("prop-2.1", "az-inclusion")]
    t = time.perf_counter() - start
    checks = [
        ("identical reports", same),
        ("prop-2.1 fails", not mutated[0].passed and bool(mutated[0].failures)),
        ("az-inclusion fails", not mutated[1].passed and bool(mutated[1].failures)),
        ("counterexample names lambda", all(m.failures and m.failures[0]["inputs"]["relation"] == "lambda" for m in mutated)),
    ]
    record(10, checks, t, 60)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
