"""Simulation harness and exact stopped-law evaluation.

`simulate` runs a stopping rule for many independent walks through the
compiled kernels and reports the empirical law, with truncation (trials
that never stopped within the step budget) reported separately and never
folded into the law.  `exact_law` computes the stopped law of a rule by
exact dynamic programming over merged rule states, with a certified
residual: the rational mass not yet stopped at the stage cap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .classic import RandomizedRule
from .matrices import CountEngine, _ruin_masses
from .measures import IntegerMeasure
from .rational import Q, format_rational
from .rules import (
    ExitCompositionRule,
    MaxThresholdRule,
    MinimalRule,
    PathCountMatrixRule,
    RandomizedPairRule,
)


@dataclass(frozen=True)
class SimReport:
    trials: int
    seed: int
    backend: str
    counts: dict[int, int]
    truncated: int
    max_steps: int
    mean_steps: float

    def frequency(self, site: int) -> Fraction:
        return Q(self.counts.get(site, 0), self.trials)

    def tv_distance(self, mu: IntegerMeasure) -> Fraction:
        """Total variation against a target, truncated mass counted as
        lying entirely outside the support (worst case)."""
        sites = set(mu.support) | set(self.counts)
        gap = sum(abs(self.frequency(s) - mu.weight(s)) for s in sites)
        return (gap + Q(self.truncated, self.trials)) / 2

    def to_json(self) -> str:
        return json.dumps(
            {
                "trials": self.trials,
                "seed": self.seed,
                "backend": self.backend,
                "counts": {str(k): v for k, v in sorted(self.counts.items())},
                "truncated": self.truncated,
                "maxSteps": self.max_steps,
                "meanSteps": self.mean_steps,
            },
            sort_keys=True,
        )


def _report(pos, steps, stopped, trials, seed, backend, max_steps) -> SimReport:
    counts: dict[int, int] = {}
    stopped_pos = pos[stopped]
    for site, cnt in zip(*np.unique(stopped_pos, return_counts=True)):
        counts[int(site)] = int(cnt)
    return SimReport(
        trials=trials,
        seed=seed,
        backend=backend,
        counts=counts,
        truncated=int(trials - stopped.sum()),
        max_steps=max_steps,
        mean_steps=float(steps[stopped].mean()) if stopped.any() else 0.0,
    )


def sample_pairs(rule: RandomizedRule, trials: int, seed: int
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Draw (u, v) pairs from the joint law of a randomized rule.

    Sampling is done once with the same splitmix64 streams both backends
    use (one draw from each trial's stream, before any walk steps), so the
    resolved pairs are backend-independent.
    """
    entries = list(rule.joint_law)
    cum = np.cumsum([float(w) for _, _, w in entries])
    states = kernels.stream_states(seed ^ 0x5DEECE66D, trials)
    _, z = kernels._np_next(states)
    x = z.astype(np.float64) / 2.0**64
    j = np.minimum(np.searchsorted(cum, x, side="right"), len(entries) - 1)
    us = np.asarray([e[0] for e in entries], dtype=np.int64)[j]
    vs = np.asarray([e[1] for e in entries], dtype=np.int64)[j]
    return us, vs


def simulate(rule, trials: int, seed: int, max_steps: int = 1_000_000,
             backend: str | None = None) -> SimReport:
    """Monte Carlo run of a stopping rule; see the rule kinds in `rules`."""
    if isinstance(rule, RandomizedRule):
        us, vs = sample_pairs(rule, trials, seed)
        out = kernels.run_two_point(seed, us, vs, max_steps, backend)
    elif isinstance(rule, RandomizedPairRule):
        us = np.full(trials, rule.u, dtype=np.int64)
        vs = np.full(trials, rule.v, dtype=np.int64)
        out = kernels.run_two_point(seed, us, vs, max_steps, backend)
    elif isinstance(rule, ExitCompositionRule):
        out = kernels.run_exit_composition(seed, trials, rule.steps,
                                           max_steps, backend)
    elif isinstance(rule, MaxThresholdRule):
        out = kernels.run_max_threshold(seed, trials, dict(rule.thresholds),
                                        max_steps, backend)
    elif isinstance(rule, MinimalRule):
        cert = rule.certificate
        out = kernels.run_minimal(seed, trials, cert.sites, cert.cut_points,
                                  max_steps, backend)
    elif isinstance(rule, PathCountMatrixRule):
        # matrix rules live on a bounded strip, so stopping is fast; the
        # rank profile is replayed in Python on the same per-trial streams
        return _simulate_matrix(rule, trials, seed, max_steps)
    else:
        raise TypeError(f"cannot simulate {type(rule).__name__}")
    pos, steps, stopped = out
    return _report(pos, steps, stopped, trials, seed,
                   kernels.resolve_backend(backend), max_steps)


def _simulate_matrix(rule: PathCountMatrixRule, trials: int, seed: int,
                     max_steps: int) -> SimReport:
    pos = np.zeros(trials, dtype=np.int64)
    steps = np.zeros(trials, dtype=np.int64)
    stopped = np.zeros(trials, dtype=bool)
    for i in range(trials):
        s = kernels.mix64((seed + i * kernels.STREAM) & kernels.MASK)
        state = rule.new_state()
        t = 0
        while not state.stopped and t < max_steps:
            s = (s + kernels.GAMMA) & kernels.MASK
            eps = 1 if (kernels.mix64(s) >> 63) else -1
            state.step(eps)
            t += 1
        pos[i] = state.position
        steps[i] = t
        stopped[i] = state.stopped
    return _report(pos, steps, stopped, trials, seed, "python", max_steps)


# ---------------------------------------------------------------------------
# exact laws


@dataclass(frozen=True)
class ExactLaw:
    law: dict[int, Fraction]
    residual: Fraction
    stages: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "law": {str(k): format_rational(v)
                        for k, v in sorted(self.law.items())},
                "residual": format_rational(self.residual),
                "stages": self.stages,
            },
            sort_keys=True,
        )


def exact_law(rule, max_stage: int = 64) -> ExactLaw:
    """Exact stopped law of a rule up to `max_stage` stages (2 steps each).

    The returned residual is the exact probability mass not yet stopped;
    rules that terminate within the horizon report residual zero.
    """
    max_steps = 2 * max_stage
    if isinstance(rule, RandomizedRule):
        from .classic import hall_stopped_law

        return ExactLaw(dict(hall_stopped_law(rule).atoms), Q(0), 0)
    if isinstance(rule, RandomizedPairRule):
        u, v = rule.u, rule.v
        if v == 0:
            return ExactLaw({0: Q(1)}, Q(0), 0)
        return ExactLaw({v: Q(-u, v - u), u: Q(v, v - u)}, Q(0), 0)
    if isinstance(rule, PathCountMatrixRule):
        return _exact_law_matrix(rule.matrix, max_stage)
    if isinstance(rule, ExitCompositionRule):
        return _exact_law_generic(rule, max_steps, _chip_state_key)
    if isinstance(rule, MaxThresholdRule):
        return _exact_law_generic(rule, max_steps, _max_state_key)
    if isinstance(rule, MinimalRule):
        return _exact_law_generic(rule, max_steps, _minimal_state_key)
    raise TypeError(f"cannot evaluate {type(rule).__name__}")


def _chip_state_key(state):
    return (state.idx, state.position)


def _max_state_key(state):
    return (state.position, state.running_max)


def _minimal_state_key(state):
    # before resolution the dyadic interval is the state; afterwards only
    # the target matters, which is what makes the DP collapse
    if state.target is None:
        return (state.low, state.width, state.position)
    return (state.target, state.position)


def _exact_law_generic(rule, max_steps: int, key) -> ExactLaw:
    """State-merged DP: distinct rule states with their exact probabilities."""
    law: dict[int, Fraction] = {}
    init = rule.new_state()
    if init.stopped:
        return ExactLaw({init.position: Q(1)}, Q(0), 0)
    states = {key(init): (init, Q(1))}
    steps_done = 0
    for _ in range(max_steps):
        if not states:
            break
        nxt: dict = {}
        for st, w in states.values():
            for eps in (-1, 1):
                child = _clone_step(rule, st, eps)
                if child.stopped:
                    law[child.position] = law.get(child.position, Q(0)) + w / 2
                else:
                    k = key(child)
                    if k in nxt:
                        old, ow = nxt[k]
                        nxt[k] = (old, ow + w / 2)
                    else:
                        nxt[k] = (child, w / 2)
        states = nxt
        steps_done += 1
    residual = sum((w for _, w in states.values()), Q(0))
    return ExactLaw(law, residual, (steps_done + 1) // 2)


def _clone_step(rule, state, eps):
    import copy

    child = copy.copy(state)
    # state objects use __slots__ and hold only immutable or replaced data,
    # except dict/tuple fields shared read-only, so a shallow copy is safe
    child.step(eps)
    return child


def _exact_law_matrix(matrix, max_stage: int) -> ExactLaw:
    """Matrix rules: the encoded law read off the count recursion."""
    N = matrix.half_width
    bound = N + 1
    engine = CountEngine(N, matrix.entry)
    law: dict[int, Fraction] = {}

    def add(site, mass):
        if mass:
            law[site] = law.get(site, Q(0)) + mass

    add(0, Q(matrix.entry(0, 0)))
    terminating = all(matrix.row(i).tail == "zero" for i in range(-N, N + 1))
    head_len = max([1] + [len(matrix.row(i).head) for i in range(-N, N + 1)])
    stages = min(max_stage, head_len) if terminating else max_stage
    for _ in range(stages):
        engine.advance()
        n = engine.n
        for j, k in engine.k_odd.items():
            if abs(j) > N:
                add(j, Q(2 * k, 4**n))
            else:
                add(j, Q(2 * matrix.entry(j, n), 4**n))
        for i, k in engine.k_even.items():
            if abs(i) > N:
                add(i, Q(k, 4**n))
            else:
                add(i, Q(matrix.entry(i, n), 4**n))
    if terminating and engine.n >= head_len:
        # no further stops can happen: survivors are pure absorption, which
        # the exact ruin probabilities settle with zero residual
        survivors = {i: k - matrix.entry(i, engine.n)
                     for i, k in engine.k_even.items() if abs(i) <= N}
        extra_lo, extra_hi = _ruin_masses(survivors, engine.n, N)
        add(-bound, extra_lo)
        add(bound, extra_hi)
        return ExactLaw(law, Q(0), engine.n)
    # alive mass: interior even counts at the final stage, minus the stops
    # of that stage (already credited to the law above)
    residual = sum(
        (Q(k - matrix.entry(i, engine.n), 4**engine.n)
         for i, k in engine.k_even.items() if abs(i) <= N),
        Q(0),
    )
    return ExactLaw(law, residual, engine.n)
