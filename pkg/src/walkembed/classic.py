"""Classic embedding constructions for the simple symmetric walk.

Four constructions, all exact:

* Azema-Yor style rule driven by the barycenter function (stop when the
  running maximum reaches the barycenter of the current position);
* Chacon-Walsh chipping: compositions of first exit times realized as
  successive chord operations on the potential, with a bounded-depth
  membership search;
* Hall-style randomized pair rule (independent pair (U, V), stop on first
  hit of {U, V});
* the minimal embedder that works for every target law, extracting a
  uniform variable from the walk's increments.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .measures import (
    BarycenterFunction,
    IntegerMeasure,
    MeasureError,
    PotentialFunction,
    barycenter,
    potential,
)
from .rational import Q


# ---------------------------------------------------------------------------
# Azema-Yor


@dataclass(frozen=True)
class AzemaYorResult:
    member: bool
    #: site -> barycenter value, defined on the support hull (members only)
    thresholds: dict[int, int] | None = None
    witness_site: int | None = None
    witness_value: Fraction | None = None


def azema_yor_check(mu: IntegerMeasure) -> AzemaYorResult:
    """Decide whether the max-threshold rule embeds `mu`.

    The rule stop-when-max-reaches-barycenter embeds a centered measure
    exactly when the barycenter value at every support site is a
    nonnegative integer; the first site where that fails is returned as a
    witness.
    """
    psi = barycenter(mu)  # raises on non-centered input
    for k in mu.support:
        v = psi.value_at(k)
        if v.denominator != 1 or v < 0:
            return AzemaYorResult(False, witness_site=k, witness_value=v)
    lo, hi = mu.support[0], mu.support[-1]
    table = {k: int(psi.value_at(k)) for k in range(lo, hi + 1)}
    return AzemaYorResult(True, thresholds=table)


# ---------------------------------------------------------------------------
# Chacon-Walsh


@dataclass(frozen=True)
class ChipStep:
    """Exit interval (a, b) of one composed stopping stage; a < b, integers."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a >= self.b:
            raise ValueError(f"need a < b, got ({self.a}, {self.b})")


def chip_apply(u: PotentialFunction, step: ChipStep) -> PotentialFunction:
    """Replace u by min(u, chord) where the chord joins (a, u(a)), (b, u(b)).

    Exact; unchanged outside (a, b), linear on [a, b].  A chord lying above
    the graph is the identity.
    """
    lo = min(u.lo, step.a)
    hi = max(u.hi, step.b)
    vals = [u.value_at(k) for k in range(lo, hi + 1)]
    ua, ub = u.value_at(step.a), u.value_at(step.b)
    for k in range(step.a + 1, step.b):
        chord = ua + Q(k - step.a, step.b - step.a) * (ub - ua)
        idx = k - lo
        if chord < vals[idx]:
            vals[idx] = chord
    # drop hull extension that stayed on the asymptote
    while lo < u.lo and vals[0] == -abs(Q(lo) - u.mean):
        vals.pop(0)
        lo += 1
    while hi > u.hi and vals[-1] == -abs(Q(hi) - u.mean):
        vals.pop()
        hi -= 1
    return PotentialFunction(lo, hi, u.mean, tuple(vals))


class ChwStatus(Enum):
    MEMBER = "member"
    NON_MEMBER_UP_TO_DEPTH = "nonMemberUpToDepth"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ChwResult:
    status: ChwStatus
    steps: tuple[ChipStep, ...] = ()
    depth_searched: int = 0


def _tangent_tail(state: tuple[Fraction, ...], target: tuple[Fraction, ...],
                  lo: int) -> list[ChipStep] | None:
    """Try to finish an embedding by chords tangent to the target, left to
    right.  Each successful chord makes the state agree with the target on
    one more segment; returns the chip list on success, None if stuck."""
    state = list(state)
    chips: list[ChipStep] = []
    n = len(state)
    for _ in range(n * n):
        m = next((i for i in range(n) if state[i] != target[i]), None)
        if m is None:
            return chips
        if m == 0:
            return None  # leftmost hull value should already match
        a = m - 1
        for b in range(m + 1, n):
            ua, ub = state[a], state[b]
            new = list(state)
            ok = True
            for k in range(a + 1, b):
                chord = ua + Q(k - a, b - a) * (ub - ua)
                v = min(new[k], chord)
                if v < target[k]:
                    ok = False
                    break
                new[k] = v
            if ok and new[m] == target[m]:
                state = new
                chips.append(ChipStep(a + lo, b + lo))
                break
        else:
            return None
    return None


def chw_search(mu: IntegerMeasure, max_depth: int,
               max_states: int = 200_000) -> ChwResult:
    """Breadth-first search for a chip sequence embedding `mu`.

    States are exact potential vectors on the support hull, reachable from
    u0(x) = -|x| by integer-endpoint chords.  States falling strictly below
    the target anywhere are dead (chords only decrease potentials) and are
    pruned.  A state equal to the target is a finite witness; otherwise a
    deterministic left-to-right tangent completion is attempted, which
    captures sequences finishing in the Azema-Yor manner.

    The refutation verdict is explicitly depth-bounded: no termination
    bound exists for chip sequences in general, so exhausting `max_depth`
    yields NON_MEMBER_UP_TO_DEPTH, never an unconditional non-membership.
    UNKNOWN is returned only when the state budget is exceeded.
    """
    if not mu.is_centered():
        raise MeasureError(f"measure is not centered (mean {mu.mean()})")
    u_mu = potential(mu)
    lo, hi = u_mu.lo, u_mu.hi
    target = tuple(u_mu.values)
    start = tuple(-Q(abs(k)) for k in range(lo, hi + 1))
    if any(s < t for s, t in zip(start, target)):
        raise MeasureError("target potential exceeds the walk's initial potential")

    pairs = [(a, b) for a in range(lo, hi + 1) for b in range(a + 2, hi + 1)]
    n = hi - lo + 1

    def expand(state: tuple[Fraction, ...], a: int, b: int):
        ia, ib = a - lo, b - lo
        ua, ub = state[ia], state[ib]
        new = list(state)
        changed = False
        for k in range(ia + 1, ib):
            chord = ua + Q(k - ia, ib - ia) * (ub - ua)
            if chord < new[k]:
                if chord < target[k]:
                    return None  # dead: dominated below the target
                new[k] = chord
                changed = True
        return tuple(new) if changed else None

    if start == target:
        return ChwResult(ChwStatus.MEMBER, (), 0)

    # tangent completions give valid but possibly non-minimal witnesses;
    # keep the best one and only return it once plain BFS has ruled out
    # anything shorter
    best: tuple[ChipStep, ...] | None = None

    def note(candidate: tuple[ChipStep, ...]) -> None:
        nonlocal best
        if best is None or len(candidate) < len(best):
            best = candidate

    tail = _tangent_tail(start, target, lo)
    if tail is not None:
        note(tuple(tail))

    seen = {start}
    frontier: dict[tuple, tuple[ChipStep, ...]] = {start: ()}
    for depth in range(1, max_depth + 1):
        if best is not None and len(best) < depth:
            return ChwResult(ChwStatus.MEMBER, best, len(best))
        nxt: dict[tuple, tuple[ChipStep, ...]] = {}
        for state, path in frontier.items():
            for a, b in pairs:
                new = expand(state, a, b)
                if new is None or new in seen:
                    continue
                seen.add(new)
                new_path = path + (ChipStep(a, b),)
                if new == target:
                    return ChwResult(ChwStatus.MEMBER, new_path, depth)
                tail = _tangent_tail(new, target, lo)
                if tail is not None:
                    note(new_path + tuple(tail))
                nxt[new] = new_path
                if len(seen) > max_states:
                    if best is not None:
                        return ChwResult(ChwStatus.MEMBER, best, depth)
                    return ChwResult(ChwStatus.UNKNOWN, (), depth)
        frontier = nxt
        if not frontier:
            break
    if best is not None:
        return ChwResult(ChwStatus.MEMBER, best, min(len(best), max_depth))
    return ChwResult(ChwStatus.NON_MEMBER_UP_TO_DEPTH, (), max_depth)


def replay_chips(steps: list[ChipStep] | tuple[ChipStep, ...]) -> PotentialFunction:
    """Apply a chip sequence to the initial potential -|x|."""
    u = PotentialFunction(0, 0, Q(0), (Q(0),))
    for step in steps:
        u = chip_apply(u, step)
    return u


# ---------------------------------------------------------------------------
# Hall-style randomized pair rule


@dataclass(frozen=True)
class RandomizedRule:
    """Joint law of an independent pair (u, v), u < 0 <= v; the stopping
    rule halts the walk on its first visit to {u, v}."""

    joint_law: tuple[tuple[int, int, Fraction], ...]  # (u, v, weight)

    def __post_init__(self) -> None:
        total = Q(0)
        for u, v, w in self.joint_law:
            if not (u < 0 <= v):
                raise ValueError(f"pair must satisfy u < 0 <= v, got ({u}, {v})")
            if w <= 0:
                raise ValueError(f"weight must be positive, got {w}")
            total += w
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")


def hall_rule(mu: IntegerMeasure) -> RandomizedRule:
    """Joint pair law with weight (v - u) mu({u}) mu({v}) / m on u < 0 <= v,
    where m is the mean of the positive part.

    The printed source formula carries the opposite sign, which is negative
    on the admissible pairs; the nonnegative version used here is validated
    exactly by `hall_stopped_law` via gambler's-ruin probabilities.
    """
    if not mu.is_centered():
        raise MeasureError(f"measure is not centered (mean {mu.mean()})")
    m = sum((k * w for k, w in mu.atoms.items() if k > 0), Q(0))
    if m == 0:
        raise MeasureError("degenerate measure: all mass at 0")
    pairs = []
    for u, wu in mu.atoms.items():
        if u >= 0:
            continue
        for v, wv in mu.atoms.items():
            if v < 0:
                continue
            pairs.append((u, v, Q(v - u) * wu * wv / m))
    return RandomizedRule(tuple(pairs))


def hall_stopped_law(rule: RandomizedRule) -> IntegerMeasure:
    """Exact stopped law of the pair rule.

    From 0 the walk exits {u, v} at v with probability |u| / (v - u); a pair
    with v = 0 stops immediately at 0.
    """
    mass: dict[int, Fraction] = {}
    for u, v, w in rule.joint_law:
        if v == 0:
            mass[0] = mass.get(0, Q(0)) + w
        else:
            mass[v] = mass.get(v, Q(0)) + w * Q(-u, v - u)
            mass[u] = mass.get(u, Q(0)) + w * Q(v, v - u)
    return IntegerMeasure(mass)


# ---------------------------------------------------------------------------
# Minimal embedder (works for every target law on Z)


@dataclass(frozen=True)
class MinimalCertificate:
    """Data driving the minimal embedding rule.

    Atoms are sorted by decreasing weight (ties broken by ascending site);
    `cut_points` are the cumulative weights.  The rule reads the walk's
    up-step indicator bits as the binary digits of a uniform variable U,
    waits until the dyadic interval pinning U separates from all cut
    points, which selects one atom, then stops at the first visit to it.
    """

    sites: tuple[int, ...]
    weights: tuple[Fraction, ...]
    cut_points: tuple[Fraction, ...]  # increasing, last == 1


def minimal_certificate(mu: IntegerMeasure) -> MinimalCertificate:
    order = sorted(mu.atoms.items(), key=lambda kv: (-kv[1], kv[0]))
    sites = tuple(k for k, _ in order)
    weights = tuple(w for _, w in order)
    cuts = []
    acc = Q(0)
    for w in weights:
        acc += w
        cuts.append(acc)
    return MinimalCertificate(sites, weights, tuple(cuts))
