"""Which measures admit a uniformly integrable embedding in the walk.

For targets supported on {-2, 0, 2} the admissible weights at 0 form a
self-similar set characterized by a base-4 digit criterion; for support
{-2,...,2} a triple criterion with an extra per-stage capacity condition
applies.  This module implements both classifiers exactly, a dynamic
programming brute-force oracle for the two-point case, and iterated
function system engines rendering the fractal set of admissible weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .measures import MeasureError
from .rational import Base4Expansion, Q, digit_half_weight, to_base4


# ---------------------------------------------------------------------------
# Weight-at-zero classifier (support {-2, 0, 2})


@dataclass(frozen=True)
class WeightVerdict:
    member: bool
    expansion: Base4Expansion
    half_weight: Fraction

    @property
    def excess(self) -> Fraction:
        return self.half_weight - 1


def classify_weight(p: Fraction) -> WeightVerdict:
    """Is p an admissible probability of stopping at 0 (support {-2,0,2})?

    Member iff the canonical base-4 digits a_0.a_1a_2... of p satisfy
    sum 2^{-i} a_i <= 1.  The canonical expansion minimizes that sum over
    the possible expansions of p, so no search over representations is
    needed.
    """
    e = to_base4(Q(p))
    w = digit_half_weight(e)
    return WeightVerdict(w <= 1, e, w)


# ---------------------------------------------------------------------------
# Triple classifier (support {-2, -1, 0, 1, 2})


@dataclass(frozen=True)
class TripleVerdict:
    member: bool
    expansions: tuple[Base4Expansion, Base4Expansion, Base4Expansion]
    #: for non-members: "mass", "budget" or "capacity at stage n"
    reason: str = ""


def _boundary_weights(p_minus: Fraction, p_zero: Fraction,
                      p_plus: Fraction) -> tuple[Fraction, Fraction]:
    """Weights at -2 and 2 forced by total mass one and mean zero."""
    rest = 1 - (p_minus + p_zero + p_plus)
    if rest < 0:
        raise MeasureError("interior weights exceed total mass 1")
    w_hi = (rest + (p_minus - p_plus) / 2) / 2
    w_lo = rest - w_hi
    if w_hi < 0 or w_lo < 0:
        raise MeasureError("no centered completion on {-2, 2} exists")
    return w_lo, w_hi


def classify_triple(p_minus: Fraction, p_zero: Fraction,
                    p_plus: Fraction) -> TripleVerdict:
    """Admissibility of interior weights (p_minus, p_zero, p_plus), where
    the remaining mass sits on {-2, 2} balancing the mean to zero.

    Writes (a_n), (b_n), (c_n) for the canonical base-4 digits of p_zero,
    p_minus/2 and p_plus/2.  Member iff

        sum 2^{-i}(a_i + b_i + c_i) <= 1, and
        L_n >= max(b_n, c_n) for all n,   L_0 = 1/2, L_{n+1} = 2 L_n - (a_n+b_n+c_n).

    The stage condition over the infinite periodic digit stream terminates
    because the pair (stream phase, L_n) either repeats, fails, or L_n
    grows past the largest possible digit sum and then passes forever.
    """
    p_minus, p_zero, p_plus = Q(p_minus), Q(p_zero), Q(p_plus)
    for name, v in (("p_minus", p_minus), ("p_zero", p_zero), ("p_plus", p_plus)):
        if v < 0 or v > 1:
            raise MeasureError(f"{name} out of [0, 1]: {v}")
    _boundary_weights(p_minus, p_zero, p_plus)  # mass/mean feasibility

    ea = to_base4(p_zero)
    eb = to_base4(p_minus / 2)
    ec = to_base4(p_plus / 2)
    exps = (eb, ea, ec)

    total = digit_half_weight(ea) + digit_half_weight(eb) + digit_half_weight(ec)
    if total > 1:
        return TripleVerdict(False, exps, reason="budget")

    # Stage condition; digits at index 0 are the integer parts.
    pre = 1 + max(len(e.preperiod) for e in (ea, eb, ec))
    period = 1
    for e in (ea, eb, ec):
        if e.period:
            period = math.lcm(period, len(e.period))

    n = 0
    L: Fraction | int = Q(1, 2)
    seen: set[tuple[int, Fraction]] = set()
    while True:
        a, b, c = ea.digit(n), eb.digit(n), ec.digit(n)
        if L < max(b, c):
            return TripleVerdict(False, exps, reason=f"capacity at stage {n}")
        L = 2 * L - (a + b + c)
        n += 1
        if n >= pre:
            if L >= 9:
                break  # L can never fall below any digit again
            phase = (n - pre) % period
            key = (phase, L)
            if key in seen:
                break
            seen.add(key)
    return TripleVerdict(True, exps)


# ---------------------------------------------------------------------------
# Brute-force oracle for the two-point case


def achievable_weights(horizon: int) -> frozenset[Fraction]:
    """Exact set of stop-at-zero probabilities realizable by adapted rules
    that stop no paths after `horizon` stages (support {-2, 0, 2}).

    Dynamic program over (stage, alive-path count): at stage n with k alive
    paths any number a in [0, k] may stop, contributing a * 4^{-n}, and
    2(k - a) paths return at the next stage.  Independent of the digit
    classifier; used to cross-check it on terminating grids.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if horizon > 12:
        raise ValueError("horizon too large (state space is exact; cap is 12)")

    @lru_cache(maxsize=None)
    def values(n: int, k: int) -> frozenset[Fraction]:
        if n > horizon or k == 0:
            return frozenset({Q(0)})
        out: set[Fraction] = set()
        unit = Q(1, 4**n)
        for a in range(k + 1):
            for rest in values(n + 1, 2 * (k - a)):
                out.add(a * unit + rest)
        return frozenset(out)

    return values(0, 1)


# ---------------------------------------------------------------------------
# Interval unions and iterated function systems


class IntervalUnion:
    """Canonical finite union of closed rational-endpoint intervals
    (degenerate intervals are points)."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: list[tuple[Fraction, Fraction]]):
        ivs = sorted((Q(a), Q(b)) for a, b in intervals)
        merged: list[list[Fraction]] = []
        for a, b in ivs:
            if b < a:
                raise ValueError(f"empty interval ({a}, {b})")
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        self.intervals: tuple[tuple[Fraction, Fraction], ...] = tuple(
            (a, b) for a, b in merged
        )

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Q(0))

    def contains_point(self, x: Fraction) -> bool:
        x = Q(x)
        return any(a <= x <= b for a, b in self.intervals)

    def contains(self, other: "IntervalUnion") -> bool:
        for a, b in other.intervals:
            if not any(c <= a and b <= d for c, d in self.intervals):
                return False
        return True

    def affine(self, scale: Fraction, offset: Fraction) -> "IntervalUnion":
        return IntervalUnion(
            [(scale * a + offset, scale * b + offset) for a, b in self.intervals]
        )

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(list(self.intervals) + list(other.intervals))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntervalUnion) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        parts = ", ".join(f"[{a}, {b}]" for a, b in self.intervals)
        return f"IntervalUnion({parts})"


@dataclass(frozen=True)
class IfsSystem:
    """Affine contractions x -> x/4 + offset plus an optional condensation
    set included verbatim at every iteration."""

    offsets: tuple[Fraction, ...]
    condensation: IntervalUnion | None = None

    def apply(self, a: IntervalUnion) -> IntervalUnion:
        out = a.affine(Q(1, 4), self.offsets[0])
        for off in self.offsets[1:]:
            out = out.union(a.affine(Q(1, 4), off))
        if self.condensation is not None:
            out = out.union(self.condensation)
        return out


def weight_set_system() -> IfsSystem:
    """x/4 + 1/4 and x/4 + 1/8, with condensation [0, 1/8] and the point 1."""
    return IfsSystem(
        offsets=(Q(1, 4), Q(1, 8)),
        condensation=IntervalUnion([(Q(0), Q(1, 8)), (Q(1), Q(1))]),
    )


def weight_set_system_alt() -> IfsSystem:
    """Condensation-free variant: x/4 + k/64 for k in {0,2,4,6,8,16},
    plus the fixed point 1."""
    return IfsSystem(
        offsets=tuple(Q(k, 64) for k in (0, 2, 4, 6, 8, 16)),
        condensation=IntervalUnion([(Q(1), Q(1))]),
    )


def ifs_approximate(system: IfsSystem, depth: int) -> IntervalUnion:
    """Depth-d image of [0, 1] under the system, exact endpoints.

    The images are a decreasing chain of covers of the attractor, so their
    Lebesgue measures bracket the attractor's from above.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    a = IntervalUnion([(Q(0), Q(1))])
    for _ in range(depth):
        a = system.apply(a)
    return a


def ifs_membership(p: Fraction, depth: int,
                   system: IfsSystem | None = None) -> str:
    """Attractor membership by inverse iteration: 'member', 'nonMember' or
    'undecidedAtDepth'.

    A point inside the condensation set is in the attractor; a point whose
    inverse orbit revisits a value is the fixed point of a finite map
    composition, hence also in the attractor.  A point with no admissible
    preimage escapes the depth-1 image and is out.  Agrees with
    `classify_weight` whenever it decides.
    """
    if system is None:
        system = weight_set_system()
    p = Q(p)

    def visit(x: Fraction, d: int, seen: frozenset[Fraction]) -> str:
        if system.condensation is not None and system.condensation.contains_point(x):
            return "member"
        if x in seen:
            return "member"
        branches = []
        for off in system.offsets:
            pre = 4 * (x - off)
            if 0 <= pre <= 1:
                branches.append(pre)
        if not branches:
            return "nonMember"
        if d == 0:
            return "undecidedAtDepth"
        results = [visit(b, d - 1, seen | {x}) for b in branches]
        if any(r == "member" for r in results):
            return "member"
        if all(r == "nonMember" for r in results):
            return "nonMember"
        return "undecidedAtDepth"

    if p < 0 or p > 1:
        return "nonMember"
    return visit(p, depth, frozenset())
