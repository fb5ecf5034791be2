"""Exact rationals and eventually periodic base-4 digit expansions.

Every probability, atom weight and potential value in the library is a
`fractions.Fraction`; nothing in this module rounds.  A `Base4Expansion`
stores the digits of a rational in [0, 1] written in base 4, split into a
finite preperiod and a (possibly empty) repeating period, and supports
closed-form evaluation of digit-weighted series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Q = Fraction  # rational type alias used throughout the package

#: Marker returned by digit-weighted sums that diverge.  For digits bounded
#: by 3 the half-weight series is always <= 6, so the marker is never
#: produced by `digit_half_weight`; it exists so callers summing unbounded
#: digit streams can reuse the same contract.
INFINITE_WEIGHT = float("inf")


@dataclass(frozen=True)
class Base4Expansion:
    """Digits a0.a1a2a3... of a rational in [0, 1], base 4.

    `preperiod` holds the digits before the repeating block, `period` the
    repeating block itself (empty for terminating expansions).  The stored
    form is canonical: terminating expansions carry no trailing zeros and
    the period is never a string of threes (long division produces the
    variant that ends in zeros instead).
    """

    integer_part: int
    preperiod: tuple[int, ...] = ()
    period: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.integer_part < 0:
            raise ValueError("integer part must be nonnegative")
        for d in self.preperiod + self.period:
            if d not in (0, 1, 2, 3):
                raise ValueError(f"base-4 digit out of range: {d}")
        if self.period and set(self.period) == {3}:
            raise ValueError("period of all threes is not canonical")

    def digit(self, i: int) -> int:
        """The digit a_i; a_0 is the integer part."""
        if i < 0:
            raise IndexError(i)
        if i == 0:
            return self.integer_part
        i -= 1
        if i < len(self.preperiod):
            return self.preperiod[i]
        if not self.period:
            return 0
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def digits(self, count: int) -> list[int]:
        """The fractional digits a_1 .. a_count."""
        return [self.digit(i) for i in range(1, count + 1)]

    @property
    def is_terminating(self) -> bool:
        return not self.period

    def to_rational(self) -> Q:
        """Exact value of the expansion (round trip with `to_base4`)."""
        m = len(self.preperiod)
        value = Q(self.integer_part)
        acc = 0
        for d in self.preperiod:
            acc = 4 * acc + d
        value += Q(acc, 4**m)
        if self.period:
            per = 0
            for d in self.period:
                per = 4 * per + d
            span = 4 ** len(self.period) - 1
            value += Q(per, span) / 4**m
        return value


def to_base4(x: Q) -> Base4Expansion:
    """Canonical base-4 expansion of a rational x in [0, 1].

    Long division in base 4; the periodic tail is detected by the first
    repeated remainder, which guarantees termination for every rational.
    """
    x = Q(x)
    if x < 0 or x > 1:
        raise ValueError(f"expansion defined on [0, 1] only, got {x}")
    integer_part = int(x)  # 0, or 1 when x == 1
    frac = x - integer_part
    num, den = frac.numerator, frac.denominator
    digits: list[int] = []
    seen: dict[int, int] = {}
    rem = num
    while rem != 0 and rem not in seen:
        seen[rem] = len(digits)
        rem *= 4
        digits.append(rem // den)
        rem %= den
    if rem == 0:
        while digits and digits[-1] == 0:
            digits.pop()
        return Base4Expansion(integer_part, tuple(digits), ())
    start = seen[rem]
    return Base4Expansion(integer_part, tuple(digits[:start]), tuple(digits[start:]))


def digit_half_weight(e: Base4Expansion) -> Q:
    """Exact value of sum_{i>=0} 2^{-i} a_i for the expansion's digits.

    The periodic tail is summed in closed form: one period contributes a
    geometric block with ratio 2^{-len(period)}.  Always finite here
    (digits <= 3 give a value <= 6); see `INFINITE_WEIGHT` for the
    divergence marker of the general contract.
    """
    total = Q(e.integer_part)
    for i, d in enumerate(e.preperiod, start=1):
        total += Q(d, 2**i)
    if e.period:
        base = len(e.preperiod) + 1
        block = sum(Q(d, 2 ** (base + j)) for j, d in enumerate(e.period))
        total += block / (1 - Q(1, 2 ** len(e.period)))
    return total


def format_rational(x: Q) -> str:
    """Serialize as "p/q", with "/q" omitted when the denominator is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Q:
    try:
        return Q(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {s!r}") from exc


def format_expansion(e: Base4Expansion) -> str:
    """Serialize as "a0.pre(period)", digits 0-3."""
    out = f"{e.integer_part}." + "".join(str(d) for d in e.preperiod)
    if e.period:
        out += "(" + "".join(str(d) for d in e.period) + ")"
    return out


def parse_expansion(s: str) -> Base4Expansion:
    s = s.strip()
    if "." not in s:
        raise ValueError(f"missing '.': {s!r}")
    head, frac = s.split(".", 1)
    period: tuple[int, ...] = ()
    if "(" in frac:
        if not frac.endswith(")"):
            raise ValueError(f"unterminated period: {s!r}")
        frac, per = frac[:-1].split("(", 1)
        period = tuple(int(c) for c in per)
    return Base4Expansion(int(head), tuple(int(c) for c in frac), period)
