"""Probability measures on the integers with exact rational weights.

Provides the measure type used by every classifier, plus the two objects of
one-dimensional potential theory attached to such a measure: the piecewise
linear potential u(x) = -sum |x - n| mu({n}) and the left-continuous
barycenter (Hardy-Littlewood) step function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .rational import Q, format_rational, parse_rational


class MeasureError(ValueError):
    """Raised when input data violates a measure invariant."""


class IntegerMeasure:
    """Finitely supported probability measure on the integers.

    Weights are positive rationals summing exactly to 1.
    """

    __slots__ = ("_atoms",)

    def __init__(self, atoms: dict[int, Fraction]):
        clean: dict[int, Fraction] = {}
        for site, w in atoms.items():
            if not isinstance(site, int):
                raise MeasureError(f"support site must be an integer, got {site!r}")
            w = Q(w)
            if w < 0:
                raise MeasureError(f"weight at {site} is negative: {w}")
            if w == 0:
                continue
            if site in clean:
                raise MeasureError(f"duplicate site {site}")
            clean[site] = w
        total = sum(clean.values(), Q(0))
        if total != 1:
            raise MeasureError(f"weights sum to {total}, not 1")
        self._atoms = dict(sorted(clean.items()))

    @property
    def atoms(self) -> dict[int, Fraction]:
        return dict(self._atoms)

    @property
    def support(self) -> list[int]:
        return list(self._atoms)

    def weight(self, site: int) -> Fraction:
        return self._atoms.get(site, Q(0))

    def mean(self) -> Fraction:
        return sum((k * w for k, w in self._atoms.items()), Q(0))

    def is_centered(self) -> bool:
        return self.mean() == 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntegerMeasure) and self._atoms == other._atoms

    def __hash__(self) -> int:
        return hash(tuple(self._atoms.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {format_rational(w)}" for k, w in self._atoms.items())
        return f"IntegerMeasure({{{inner}}})"

    # -- JSON wire format: {"atoms": {"-2": "11/32", "0": "5/16", ...}} --

    def to_json_dict(self) -> dict:
        return {"atoms": {str(k): format_rational(w) for k, w in self._atoms.items()}}

    @classmethod
    def from_json_dict(cls, data: dict) -> "IntegerMeasure":
        if not isinstance(data, dict) or "atoms" not in data:
            raise MeasureError('measure JSON must be an object with an "atoms" key')
        raw = data["atoms"]
        if not isinstance(raw, dict):
            raise MeasureError('"atoms" must map integer strings to rational strings')
        atoms: dict[int, Fraction] = {}
        for key, val in raw.items():
            try:
                site = int(key)
            except ValueError as exc:
                raise MeasureError(f"site key is not an integer: {key!r}") from exc
            atoms[site] = parse_rational(val)
        return cls(atoms)

    @classmethod
    def from_json(cls, text: str) -> "IntegerMeasure":
        return cls.from_json_dict(json.loads(text))


def measure(atoms: dict[int, object]) -> IntegerMeasure:
    """Shorthand constructor taking ints / strings / Fractions as weights."""
    return IntegerMeasure({k: Q(v) for k, v in atoms.items()})


@dataclass(frozen=True)
class PotentialFunction:
    """Piecewise linear potential of an integrable measure, breaking on Z.

    Values are stored at every integer of the support hull [lo, hi];
    outside the hull the function equals -|x - mean| exactly, so the
    representation is lossless for integer-supported measures.
    """

    lo: int
    hi: int
    mean: Fraction
    values: tuple[Fraction, ...]  # u(lo), u(lo+1), ..., u(hi)

    def value(self, x: Fraction) -> Fraction:
        x = Q(x)
        if x <= self.lo or x >= self.hi:
            return -abs(x - self.mean)
        k = math.floor(x)
        left = self.values[k - self.lo]
        if x == k:
            return left
        right = self.values[k + 1 - self.lo]
        return left + (x - k) * (right - left)

    def value_at(self, k: int) -> Fraction:
        """Value at an integer site (valid for any integer)."""
        if k < self.lo or k > self.hi:
            return -abs(Q(k) - self.mean)
        return self.values[k - self.lo]

    @property
    def breakpoints(self) -> list[tuple[int, Fraction]]:
        return [(self.lo + i, v) for i, v in enumerate(self.values)]


def potential(mu: IntegerMeasure) -> PotentialFunction:
    """Exact breakpoint representation of u(x) = -sum_n |x - n| mu({n})."""
    sites = mu.support
    lo, hi = sites[0], sites[-1]
    vals = tuple(
        -sum((abs(k - n) * w for n, w in mu.atoms.items()), Q(0))
        for k in range(lo, hi + 1)
    )
    return PotentialFunction(lo, hi, mu.mean(), vals)


def measure_from_potential(u: PotentialFunction) -> IntegerMeasure:
    """The unique measure whose potential is `u`.

    The atom weight at k is half the slope decrease of u at k; slopes just
    outside the hull are +1 (left) and -1 (right).
    """
    vals = list(u.values)
    ext = [u.value_at(u.lo - 1)] + vals + [u.value_at(u.hi + 1)]
    atoms: dict[int, Fraction] = {}
    for i in range(1, len(ext) - 1):
        drop = (2 * ext[i] - ext[i - 1] - ext[i + 1]) / 2
        if drop < 0:
            raise MeasureError(f"potential is not concave at site {u.lo + i - 1}")
        if drop > 0:
            atoms[u.lo + i - 1] = drop
    mu = IntegerMeasure(atoms)
    if mu.mean() != u.mean:
        raise MeasureError("potential asymptotics inconsistent with its mean")
    return mu


@dataclass(frozen=True)
class BarycenterFunction:
    """Left-continuous nondecreasing step function Psi, constant on (k, k+1].

    Psi(k) is the conditional mean of the measure on [k, infinity); above
    the top of the support the convention Psi(x) = x applies.
    """

    lo: int
    hi: int
    values: tuple[Fraction, ...]  # Psi(lo), ..., Psi(hi)

    def value_at(self, k: int) -> Fraction:
        if k > self.hi:
            return Q(k)
        if k < self.lo:
            return self.values[0]
        return self.values[k - self.lo]


def barycenter(mu: IntegerMeasure) -> BarycenterFunction:
    """Barycenter function of a centered measure, exact at every site."""
    if not mu.is_centered():
        raise MeasureError(f"measure is not centered (mean {mu.mean()})")
    sites = mu.support
    lo, hi = sites[0], sites[-1]
    vals: list[Fraction] = []
    tail_mass = Q(0)
    tail_sum = Q(0)
    out: dict[int, Fraction] = {}
    for k in range(hi, lo - 1, -1):
        w = mu.weight(k)
        tail_mass += w
        tail_sum += k * w
        out[k] = tail_sum / tail_mass if tail_mass > 0 else Q(k)
    vals = [out[k] for k in range(lo, hi + 1)]
    return BarycenterFunction(lo, hi, tuple(vals))
