"""Acceptance gate: one test per criterion, pinned tolerances and runtimes.

Run with `pytest tests/test_acceptance.py -v` for one pass/fail line per
criterion.  Statistical tests use fixed seeds and per-atom tolerance
4*sqrt(p(1-p)/trials); the flake budget is zero (a failure is a bug, not a
retry).
"""

import math
import time
from fractions import Fraction as Q
from itertools import product

import pytest

from walkembed import (
    ChipStep,
    ChwStatus,
    ExitCompositionRule,
    IntervalUnion,
    MatrixRow,
    MaxThresholdRule,
    MinimalRule,
    PathCountMatrixRule,
    StoppingMatrix,
    WalkPath,
    achievable_weights,
    azema_yor_check,
    chw_search,
    classify_triple,
    classify_weight,
    decide,
    exact_law,
    hall_rule,
    ifs_approximate,
    measure,
    measure_from_potential,
    minimal_certificate,
    potential,
    search_matrix,
    simulate,
    verify_matrix,
    weight_set_system,
)

TRIALS = 100_000


def atom_tolerance(p: float) -> float:
    return 4.0 * math.sqrt(p * (1.0 - p) / TRIALS)


def assert_within_tolerance(report, mu):
    assert report.truncated <= TRIALS // 500  # truncation is reported, tiny
    for s in mu.support:
        p = float(mu.weight(s))
        err = abs(float(report.frequency(s)) - p)
        assert err <= atom_tolerance(p), (s, err, atom_tolerance(p))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed criteria measure the work."""
    mu = measure({-1: Q(1, 2), 1: Q(1, 2)})
    simulate(hall_rule(mu), 8, seed=0, max_steps=16, backend="numba")
    simulate(MinimalRule(minimal_certificate(mu)), 8, seed=0, max_steps=16,
             backend="numba")
    simulate(ExitCompositionRule((ChipStep(-1, 1),)), 8, seed=0, max_steps=16,
             backend="numba")
    simulate(MaxThresholdRule(((-1, 0), (0, 1), (1, 1))), 8, seed=0,
             max_steps=16, backend="numba")


def test_criterion_1_classifier_vs_brute_force():
    # exact classifier agrees with the horizon-5 enumeration oracle on all
    # 1025 grid points j/4^5
    start = time.monotonic()
    oracle = achievable_weights(5)
    for j in range(4**5 + 1):
        p = Q(j, 4**5)
        assert classify_weight(p).member == (p in oracle), p
    assert time.monotonic() - start < 10.0


def test_criterion_2_exact_verdicts():
    assert classify_weight(Q(1, 2)).member
    for p in (Q(11, 20), Q(3, 5), Q(3, 4), Q(9, 10)):
        assert not classify_weight(p).member, p
    sixth = classify_weight(Q(1, 6))
    assert sixth.member and sixth.half_weight == 1
    for j in range(129):  # [0, 1/8] in steps of 1/1024
        assert classify_weight(Q(j, 1024)).member, j
    assert classify_weight(Q(1)).member


def test_criterion_3_strict_inclusion_chain():
    start = time.monotonic()

    # uniform on {-1, 0, 1}: outside the UI class, yet the minimal rule
    # embeds it (simulated law within TV 0.01 at 10^5 trials)
    assert not classify_triple(Q(1, 3), Q(1, 3), Q(1, 3)).member
    mu3 = measure({-1: Q(1, 3), 0: Q(1, 3), 1: Q(1, 3)})
    rep = simulate(MinimalRule(minimal_certificate(mu3)), TRIALS, seed=42,
                   max_steps=1_000_000, backend="numba")
    assert rep.tv_distance(mu3) <= Q(1, 100)

    # 5/16 measure: UI member by matrix search, but no chip sequence of
    # length <= 8 reaches it
    mu516 = measure({0: Q(5, 16), -2: Q(11, 32), 2: Q(11, 32)})
    assert search_matrix(mu516, max_stage=8).status == "member"
    chw = chw_search(mu516, max_depth=8)
    assert chw.status is ChwStatus.NON_MEMBER_UP_TO_DEPTH
    assert chw.depth_searched == 8

    # 2/9 measure: a two-chip witness exists, but the barycenter function
    # takes the non-integer value 6/7, so no max-threshold rule works
    mu29 = measure({-3: Q(2, 9), 0: Q(4, 9), 2: Q(1, 3)})
    res = chw_search(mu29, max_depth=8)
    assert res.status is ChwStatus.MEMBER
    assert len(res.steps) == 2
    ay = azema_yor_check(mu29)
    assert not ay.member
    assert ay.witness_value == Q(6, 7)

    assert time.monotonic() - start < 60.0


def test_criterion_4_matrix_verification_localizes():
    start = time.monotonic()
    mu = measure({0: Q(3, 4), -4: Q(1, 8), 4: Q(1, 8)})
    row = MatrixRow((0, 2, 2), "doubling")
    good = StoppingMatrix(3, {0: row})
    assert row.quarter_sum() == Q(3, 4)
    assert verify_matrix(good, mu).valid

    # bumping any head entry of the stopping row fails a count check at a
    # named site and stage
    expected = {0: (0, 1), 1: (0, 1), 2: (0, 2)}
    for n, loc in expected.items():
        head = [0, 2, 2]
        head[n] += 1
        res = verify_matrix(
            StoppingMatrix(3, {0: MatrixRow(tuple(head), "doubling")}), mu)
        assert res.status == "violation"
        assert (res.site, res.stage) == loc, n

    # introducing a single stop anywhere else is also caught, either as a
    # wrong site weight or as a starved count downstream
    for site, n in product((-3, -2, -1, 1, 2, 3), range(4)):
        bad = StoppingMatrix(3, {0: row,
                                 site: MatrixRow((0,) * n + (1,))})
        res = verify_matrix(bad, mu)
        assert res.status == "violation", (site, n)
        assert res.site is not None

    assert time.monotonic() - start < 1.0


def test_criterion_5_ifs_measure_bracket():
    start = time.monotonic()
    system = weight_set_system()
    segment = IntervalUnion([(Q(0), Q(1, 6))])
    previous = Q(1)
    for d in range(1, 13):
        cover = ifs_approximate(system, d)
        m = cover.measure()
        assert m <= previous
        assert m >= Q(1, 4)
        assert cover.contains(segment)
        previous = m
    assert previous == Q(2049, 8192)
    assert previous <= Q(26, 100)
    assert time.monotonic() - start < 30.0


def test_criterion_6_exact_law_oracle():
    start = time.monotonic()

    # three terminating matrix certificates, found by search and read back
    # through the exact law with residual exactly zero
    for p, b in ((Q(1, 4), Q(3, 8)), (Q(1, 2), Q(1, 4)), (Q(5, 16), Q(11, 32))):
        mu = measure({0: p, -2: b, 2: b})
        found = search_matrix(mu, max_stage=8)
        assert found.status == "member"
        el = exact_law(PathCountMatrixRule(found.matrix))
        assert el.residual == 0
        assert el.law == {s: mu.weight(s) for s in mu.support}

    # the max-threshold rule for the fair two-point law
    bern = measure({-1: Q(1, 2), 1: Q(1, 2)})
    ay = azema_yor_check(bern)
    el = exact_law(MaxThresholdRule(tuple(sorted(ay.thresholds.items()))))
    assert el.residual == 0
    assert el.law == {-1: Q(1, 2), 1: Q(1, 2)}

    # the two-chip witness converges geometrically: residual below 2^-20
    # and every atom within the residual of its target
    mu29 = measure({-3: Q(2, 9), 0: Q(4, 9), 2: Q(1, 3)})
    res = chw_search(mu29, max_depth=8)
    el = exact_law(ExitCompositionRule(res.steps))
    assert el.residual < Q(1, 2**20)
    for s in mu29.support:
        assert abs(el.law[s] - mu29.weight(s)) <= el.residual

    assert time.monotonic() - start < 30.0


def test_criterion_7_statistical_suite():
    start = time.monotonic()

    hall_targets = [
        measure({-1: Q(1, 2), 1: Q(1, 2)}),
        measure({-2: Q(1, 3), 0: Q(1, 3), 2: Q(1, 3)}),
        measure({0: Q(5, 16), -2: Q(11, 32), 2: Q(11, 32)}),
    ]
    for i, mu in enumerate(hall_targets):
        rep = simulate(hall_rule(mu), TRIALS, seed=200 + i,
                       max_steps=1_000_000, backend="numba")
        assert_within_tolerance(rep, mu)

    minimal_targets = [
        measure({-1: Q(1, 2), 1: Q(1, 2)}),
        measure({-1: Q(1, 3), 0: Q(1, 3), 1: Q(1, 3)}),
        measure({-1: Q(1, 2), 3: Q(1, 2)}),  # non-centered
    ]
    for i, mu in enumerate(minimal_targets):
        rep = simulate(MinimalRule(minimal_certificate(mu)), TRIALS,
                       seed=100 + i, max_steps=1_000_000, backend="numba")
        assert_within_tolerance(rep, mu)

    assert time.monotonic() - start < 60.0


def test_criterion_8_property_suites():
    # adaptedness replay: a stopped decision is unchanged by any rewrite
    # of the increments after the stop time
    mu516 = measure({0: Q(5, 16), -2: Q(11, 32), 2: Q(11, 32)})
    rules = [
        MaxThresholdRule(((-1, 0), (0, 1), (1, 1))),
        ExitCompositionRule((ChipStep(-1, 2), ChipStep(-3, 0))),
        PathCountMatrixRule(StoppingMatrix(1, {0: MatrixRow((0, 1, 1))})),
        MinimalRule(minimal_certificate(mu516)),
    ]
    for rule in rules:
        for incs in product((-1, 1), repeat=6):
            d = decide(rule, WalkPath(incs))
            if d.stopped:
                prefix = incs[: d.stop_time]
                for suffix in product((-1, 1), repeat=len(incs) - d.stop_time):
                    assert decide(rule, WalkPath(prefix + suffix)) == d

    # potential round trip on a few exact measures
    for mu in (mu516,
               measure({-3: Q(2, 9), 0: Q(4, 9), 2: Q(1, 3)}),
               measure({-1: Q(1, 3), 0: Q(1, 3), 1: Q(1, 3)})):
        assert measure_from_potential(potential(mu)) == mu

    # closure of the weight set under both contractions x/4 + 1/4, x/4 + 1/8
    grid = [Q(j, 4**4) for j in range(4**4 + 1)]
    members = [p for p in grid if classify_weight(p).member]
    for p in members:
        assert classify_weight(p / 4 + Q(1, 4)).member
        assert classify_weight(p / 4 + Q(1, 8)).member

    # the centered-triple slice with no side mass collapses to the weight set
    for p in grid:
        assert classify_triple(Q(0), p, Q(0)).member == classify_weight(p).member
