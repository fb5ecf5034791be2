"""Executable stopping rules for the simple symmetric random walk.

Every rule exposes a small state machine: `new_state()` returns a fresh
state with `stopped`, `position`, and `step(eps)` for eps in {-1, +1}.  A
state never looks ahead: whether it has stopped depends only on the
increments seen so far, which is what makes the rules adapted.  `decide`
replays a recorded path against a rule and reports where it stops.

Rule kinds
----------
exitComposition   exit times of a chip sequence run in order (potential picture)
maxThreshold      stop when the running maximum reaches a site-dependent level
pathCountMatrix   stop-count matrices; the path's rank among alive histories
                  in lexicographic order (down < up) picks who stops
randomizedPair    an externally drawn pair (u, v), stop at first visit
minimalTheorem1   dyadic reading of the up-step indicator stream selects a
                  target atom, then stop at its first visit
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .classic import ChipStep, MinimalCertificate, RandomizedRule
from .matrices import StoppingMatrix
from .rational import Q, format_rational, parse_rational


class PrefixError(ValueError):
    """A recorded path disagrees with a rule (stops early or runs past it)."""


@dataclass
class WalkPath:
    increments: tuple[int, ...]

    def __post_init__(self):
        if any(e not in (-1, 1) for e in self.increments):
            raise ValueError("increments must be -1 or +1")

    def positions(self) -> list[int]:
        out = [0]
        for e in self.increments:
            out.append(out[-1] + e)
        return out


# ---------------------------------------------------------------------------
# exitComposition


class ExitCompositionState:
    __slots__ = ("steps", "idx", "position", "stopped")

    def __init__(self, steps: tuple[ChipStep, ...]):
        self.steps = steps
        self.idx = 0
        self.position = 0
        self.stopped = False
        self._settle()

    def _settle(self) -> None:
        while self.idx < len(self.steps):
            c = self.steps[self.idx]
            if c.a < self.position < c.b:
                return
            self.idx += 1
        self.stopped = True

    def step(self, eps: int) -> None:
        if self.stopped:
            raise PrefixError("step after the rule has stopped")
        self.position += eps
        self._settle()


@dataclass(frozen=True)
class ExitCompositionRule:
    kind = "exitComposition"
    steps: tuple[ChipStep, ...]

    def new_state(self) -> ExitCompositionState:
        return ExitCompositionState(self.steps)

    def payload(self) -> object:
        return [[c.a, c.b] for c in self.steps]


# ---------------------------------------------------------------------------
# maxThreshold


class MaxThresholdState:
    __slots__ = ("thresholds", "lo", "hi", "position", "running_max", "stopped")

    def __init__(self, thresholds: dict[int, int], lo: int, hi: int):
        self.thresholds = thresholds
        self.lo = lo
        self.hi = hi
        self.position = 0
        self.running_max = 0
        self.stopped = self._check()

    def _threshold(self) -> int:
        if self.position in self.thresholds:
            return self.thresholds[self.position]
        # above the table the level is the site itself (stop instantly);
        # below, the level is frozen at the lowest tabulated site's level
        if self.position > self.hi:
            return self.position
        return self.thresholds[self.lo]

    def _check(self) -> bool:
        return self.running_max >= self._threshold()

    def step(self, eps: int) -> None:
        if self.stopped:
            raise PrefixError("step after the rule has stopped")
        self.position += eps
        self.running_max = max(self.running_max, self.position)
        self.stopped = self._check()


@dataclass(frozen=True)
class MaxThresholdRule:
    kind = "maxThreshold"
    thresholds: tuple[tuple[int, int], ...]  # (site, level), sorted

    def new_state(self) -> MaxThresholdState:
        table = dict(self.thresholds)
        return MaxThresholdState(table, min(table), max(table))

    def payload(self) -> object:
        return [[s, t] for s, t in self.thresholds]


# ---------------------------------------------------------------------------
# pathCountMatrix: rank-based tie-breaking among alive histories
#
# Among the k[i][n] histories arriving at site i at stage n, the rule stops
# the a[i][n] lexicographically smallest (reading increments with -1 < +1).
# The observed path's rank equals the number of alive histories at its site
# whose increment word is lexicographically smaller.  That whole profile
# evolves by one linear pass per step: a smaller-and-alive history at site j
# came from j-1 or j+1, and when the observed path steps up, every history
# that instead stepped down from the same site becomes smaller.


class MatrixRuleState:
    __slots__ = ("matrix", "position", "t", "stopped", "smaller", "exited")

    def __init__(self, matrix: StoppingMatrix):
        self.matrix = matrix
        self.position = 0
        self.t = 0
        self.exited = False
        self.smaller = {0: 0}
        self.stopped = self._stop_check(0, 0)
        self.smaller = self._survive(self.smaller, 0)

    def _stop_check(self, pos: int, stage: int) -> bool:
        bound = self.matrix.half_width + 1
        if abs(pos) >= bound:
            self.exited = True
            return True
        return self.smaller[pos] < self.matrix.entry(pos, stage)

    def _survive(self, smaller: dict[int, int], stage: int) -> dict[int, int]:
        N = self.matrix.half_width
        out = {}
        for j, s in smaller.items():
            if abs(j) > N:
                continue  # absorbed
            out[j] = max(0, s - self.matrix.entry(j, stage))
        return out

    def step(self, eps: int) -> None:
        if self.stopped:
            raise PrefixError("step after the rule has stopped")
        prev_pos = self.position
        self.t += 1
        self.position += eps
        stage = (self.t + 1) // 2
        bound = self.matrix.half_width + 1
        parity = self.t % 2  # site parity at this step
        new_smaller = {}
        for j in range(-bound, bound + 1):
            if abs(j) % 2 != parity:
                continue
            s = self.smaller.get(j - 1, 0) + self.smaller.get(j + 1, 0)
            if eps == 1 and j == prev_pos - 1:
                s += 1  # the down-step sibling of the observed history
            new_smaller[j] = s
        self.smaller = new_smaller
        self.stopped = self._stop_check(self.position, stage)
        self.smaller = self._survive(self.smaller, stage)


@dataclass(frozen=True)
class PathCountMatrixRule:
    kind = "pathCountMatrix"
    matrix: StoppingMatrix

    def new_state(self) -> MatrixRuleState:
        return MatrixRuleState(self.matrix)

    def payload(self) -> object:
        return self.matrix.to_json_dict()


def alive_class_rank(matrix: StoppingMatrix, path: WalkPath) -> int:
    """Rank of `path` among alive same-endpoint histories under `matrix`.

    Raises PrefixError if the rule stops the path before its end.
    """
    state = MatrixRuleState(matrix)
    if state.stopped:
        raise PrefixError("rule stops at time 0")
    for i, eps in enumerate(path.increments):
        state.step(eps)
        if state.stopped:
            raise PrefixError(f"rule stops after {i + 1} steps")
    return state.smaller.get(state.position, 0)


# ---------------------------------------------------------------------------
# randomizedPair


class TwoPointState:
    __slots__ = ("u", "v", "position", "stopped")

    def __init__(self, u: int, v: int):
        self.u = u
        self.v = v
        self.position = 0
        self.stopped = self.position in (u, v)

    def step(self, eps: int) -> None:
        if self.stopped:
            raise PrefixError("step after the rule has stopped")
        self.position += eps
        self.stopped = self.position in (self.u, self.v)


@dataclass(frozen=True)
class RandomizedPairRule:
    """One resolved draw (u, v) from a randomized two-point rule."""

    kind = "randomizedPair"
    u: int
    v: int

    def __post_init__(self):
        if not self.u < 0 <= self.v:
            raise ValueError("need u < 0 <= v")

    def new_state(self) -> TwoPointState:
        return TwoPointState(self.u, self.v)

    def payload(self) -> object:
        return {"u": self.u, "v": self.v}


# ---------------------------------------------------------------------------
# minimalTheorem1
#
# Reading 1{step n is up} as binary digits of a uniform variable, the rule
# tracks the dyadic interval of possible values.  Once that interval lies
# inside one cell of the cut-point partition, the target atom is fixed and
# the rule stops at its first visit (including the moment of resolution).


class MinimalState:
    __slots__ = ("cert", "low", "width", "target", "position", "stopped")

    def __init__(self, cert: MinimalCertificate):
        self.cert = cert
        self.low = Q(0)
        self.width = Q(1)
        self.target: int | None = None
        self.position = 0
        self.stopped = False
        self._resolve()

    def _resolve(self) -> None:
        if self.target is not None:
            return
        cuts = self.cert.cut_points
        prev = Q(0)
        for site, cut in zip(self.cert.sites, cuts):
            if prev <= self.low and self.low + self.width <= cut:
                self.target = site
                self._check()
                return
            prev = cut

    def _check(self) -> None:
        if self.target is not None and self.position == self.target:
            self.stopped = True

    def step(self, eps: int) -> None:
        if self.stopped:
            raise PrefixError("step after the rule has stopped")
        self.position += eps
        self.width /= 2
        if eps == 1:
            self.low += self.width
        self._resolve()
        self._check()


@dataclass(frozen=True)
class MinimalRule:
    kind = "minimalTheorem1"
    certificate: MinimalCertificate

    def new_state(self) -> MinimalState:
        return MinimalState(self.certificate)

    def payload(self) -> object:
        return {
            "sites": list(self.certificate.sites),
            "weights": [format_rational(w) for w in self.certificate.weights],
        }


# ---------------------------------------------------------------------------
# decide / (de)serialization


@dataclass(frozen=True)
class Decision:
    stopped: bool
    stop_time: int | None
    stop_site: int | None


def decide(rule, path: WalkPath) -> Decision:
    """Replay `path` against `rule`.

    Returns the stop time and site if the rule stops at or before the end of
    the path, else a non-stopped decision.  The replay itself raises nothing
    on a long path: increments after the stop are simply not consumed.
    """
    state = rule.new_state()
    if state.stopped:
        return Decision(True, 0, state.position)
    for t, eps in enumerate(path.increments, start=1):
        state.step(eps)
        if state.stopped:
            return Decision(True, t, state.position)
    return Decision(False, None, None)


_KINDS = {}


def rule_to_json(rule) -> str:
    return json.dumps({"kind": rule.kind, "payload": rule.payload()},
                      sort_keys=True)


def rule_from_json(text: str):
    data = json.loads(text)
    kind = data.get("kind")
    payload = data.get("payload")
    if kind == "exitComposition":
        return ExitCompositionRule(tuple(ChipStep(int(a), int(b))
                                         for a, b in payload))
    if kind == "maxThreshold":
        return MaxThresholdRule(tuple(sorted((int(s), int(t))
                                             for s, t in payload)))
    if kind == "pathCountMatrix":
        return PathCountMatrixRule(StoppingMatrix.from_json_dict(payload))
    if kind == "randomizedPair":
        return RandomizedPairRule(int(payload["u"]), int(payload["v"]))
    if kind == "minimalTheorem1":
        sites = tuple(int(s) for s in payload["sites"])
        weights = tuple(parse_rational(w) for w in payload["weights"])
        total = Q(0)
        cuts = []
        for w in weights:
            total += w
            cuts.append(total)
        return MinimalRule(MinimalCertificate(sites, weights, tuple(cuts)))
    raise ValueError(f"unknown rule kind {kind!r}")
