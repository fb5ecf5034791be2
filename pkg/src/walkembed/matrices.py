"""Path-count matrices encoding adapted stopping rules on a bounded strip.

A rule stopping the walk inside [-(N+1), N+1] is encoded by integers
a[i][n]: the number of distinct increment histories stopped at site i after
2n steps (even i) or 2n-1 steps (odd i).  The companion counts k[i][n] of
histories still arriving at each site evolve by a two-phase recursion, with
everything reaching +-(N+1) absorbed.  The encoded measure puts weight
2^(i mod 2) * sum_j 4^{-j} a[i][j] at interior sites, plus the absorbed
boundary mass.

Rows may terminate, eventually double (a_{n+1} = 2 a_n, the
stop-everything-arriving pattern), or repeat periodically; all three tails
are verified exactly, with no truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .measures import IntegerMeasure, MeasureError
from .rational import Q


@dataclass(frozen=True)
class MatrixRow:
    """One site's stop counts: explicit head, then a tail pattern.

    tail "zero": the row ends after the head.
    tail "doubling": a_n = head[-1] * 2^(n - len(head) + 1) for n >= len(head).
    tail "periodic": the digits in `period` repeat from index len(head).
    """

    head: tuple[int, ...] = ()
    tail: str = "zero"
    period: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.tail not in ("zero", "doubling", "periodic"):
            raise ValueError(f"unknown tail kind {self.tail!r}")
        if any(a < 0 for a in self.head + self.period):
            raise ValueError("stop counts must be nonnegative")
        if self.tail == "doubling" and not self.head:
            raise ValueError("doubling tail needs a nonempty head")
        if self.tail == "periodic" and not self.period:
            raise ValueError("periodic tail needs digits")

    def entry(self, n: int) -> int:
        if n < len(self.head):
            return self.head[n]
        if self.tail == "zero":
            return 0
        if self.tail == "doubling":
            return self.head[-1] * 2 ** (n - len(self.head) + 1)
        return self.period[(n - len(self.head)) % len(self.period)]

    def quarter_sum(self) -> Fraction:
        """Exact sum_n 4^{-n} a_n, tails in closed form."""
        total = sum((Q(a, 4**n) for n, a in enumerate(self.head)), Q(0))
        m = len(self.head)
        if self.tail == "doubling":
            total += self.head[-1] * Q(4, 4**m)  # a* * 4^{1-(m-1)} ... = a* 4^{1-m}
        elif self.tail == "periodic":
            block = sum(Q(d, 4**j) for j, d in enumerate(self.period))
            total += Q(1, 4**m) * block / (1 - Q(1, 4 ** len(self.period)))
        return total

    @property
    def is_zero(self) -> bool:
        return self.tail == "zero" and not any(self.head)


ZERO_ROW = MatrixRow()


@dataclass(frozen=True)
class StoppingMatrix:
    """Stop counts for every interior site i with |i| <= N."""

    half_width: int  # N; the strip is [-(N+1), N+1]
    rows: dict[int, MatrixRow] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.half_width < 0:
            raise ValueError("half width must be nonnegative")
        for i in self.rows:
            if abs(i) > self.half_width:
                raise ValueError(f"row site {i} outside [-{self.half_width}, {self.half_width}]")

    def row(self, i: int) -> MatrixRow:
        return self.rows.get(i, ZERO_ROW)

    def entry(self, i: int, n: int) -> int:
        return self.row(i).entry(n)

    def site_weight(self, i: int) -> Fraction:
        return 2 ** (abs(i) % 2) * self.row(i).quarter_sum()

    # -- JSON: {"N": ..., "rows": [{"site": i, "head": [...], "tail": ...}]}

    def to_json_dict(self) -> dict:
        rows = []
        for i in sorted(self.rows):
            r = self.rows[i]
            if r.is_zero:
                continue
            entry: dict = {"site": i, "head": list(r.head), "tail": r.tail}
            if r.tail == "periodic":
                entry["period"] = list(r.period)
            rows.append(entry)
        return {"N": self.half_width, "rows": rows}

    @classmethod
    def from_json_dict(cls, data: dict) -> "StoppingMatrix":
        rows = {}
        for r in data.get("rows", []):
            rows[int(r["site"])] = MatrixRow(
                tuple(int(x) for x in r.get("head", [])),
                r.get("tail", "zero"),
                tuple(int(x) for x in r.get("period", [])),
            )
        return cls(int(data["N"]), rows)


# ---------------------------------------------------------------------------
# The two-phase arrival-count recursion


class CountEngine:
    """Evolves the arrival counts k[i][n] for a given stop-count source.

    `stops(i, n)` must return the number of paths stopped at interior site i
    at stage n.  Boundary sites +-(N+1) absorb everything that reaches them.
    """

    def __init__(self, half_width: int, stops):
        self.N = half_width
        self.stops = stops
        self.n = 0
        bound = self.N + 1
        self.even_sites = [i for i in range(-bound, bound + 1) if i % 2 == 0]
        self.odd_sites = [i for i in range(-bound, bound + 1) if i % 2 != 0]
        self.k_even = {i: (1 if i == 0 else 0) for i in self.even_sites}
        self.k_odd = {i: 0 for i in self.odd_sites}

    def _survivors(self, counts: dict[int, int], stage: int) -> dict[int, int]:
        surv = {}
        for i, k in counts.items():
            if abs(i) > self.N:
                surv[i] = 0  # absorbed
            else:
                a = self.stops(i, stage)
                if a > k:
                    raise CountViolation(i, stage, a, k)
                surv[i] = k - a
        return surv

    def advance(self) -> None:
        """Run one full stage: odd arrivals, then even arrivals."""
        surv_even = self._survivors(self.k_even, self.n)
        self.n += 1
        self.k_odd = {
            j: surv_even.get(j - 1, 0) + surv_even.get(j + 1, 0)
            for j in self.odd_sites
        }
        surv_odd = self._survivors(self.k_odd, self.n)
        self.k_even = {
            i: surv_odd.get(i - 1, 0) + surv_odd.get(i + 1, 0)
            for i in self.even_sites
        }


class CountViolation(Exception):
    def __init__(self, site: int, stage: int, a: int, k: int):
        super().__init__(f"a[{site}][{stage}] = {a} exceeds arrival count {k}")
        self.site = site
        self.stage = stage
        self.a = a
        self.k = k


def _ruin_masses(k_even: dict[int, int], stage: int, half_width: int
                 ) -> tuple[Fraction, Fraction]:
    """Mass eventually absorbed at each boundary if no further stopping
    happens: exact two-sided gambler's-ruin probabilities."""
    bound = half_width + 1
    lo = hi = Q(0)
    w = Q(1, 4**stage)
    for i, k in k_even.items():
        if k == 0 or abs(i) > half_width:
            continue
        p_hi = Q(i + bound, 2 * bound)
        hi += k * w * p_hi
        lo += k * w * (1 - p_hi)
    return lo, hi


# ---------------------------------------------------------------------------
# Verification


@dataclass(frozen=True)
class VerifyResult:
    status: str  # "valid" | "violation" | "inconclusive"
    site: int | None = None
    stage: int | None = None
    detail: str = ""

    @property
    def valid(self) -> bool:
        return self.status == "valid"


def verify_matrix(matrix: StoppingMatrix, mu: IntegerMeasure,
                  max_scan: int = 512) -> VerifyResult:
    """Check that `matrix` encodes an adapted rule embedding `mu`.

    Recomputes the arrival counts, checks a[i][n] <= k[i][n] at every stage
    (tails handled by exact stabilization arguments, see below), and checks
    the atom identities, including the absorbed boundary atoms.

    Stabilization: terminated rows leave a pure absorption problem solved by
    the exact ruin formula; doubling tails are confirmed by the whole count
    vector doubling across one stage (the recursion is linear, so doubling
    then persists); periodic tails are confirmed by phase-aligned pointwise
    domination of count vectors (the recursion is monotone in the counts,
    so domination persists), with boundary tail sums resolved by the affine
    one-period map and an exact geometric matrix series.
    """
    N = matrix.half_width
    bound = N + 1
    for site in mu.support:
        if abs(site) > bound:
            raise MeasureError(f"support site {site} outside [-{bound}, {bound}]")

    tails = {matrix.row(i).tail for i in range(-N, N + 1) if not matrix.row(i).is_zero}
    tails.discard("zero")
    if len(tails) > 1:
        return VerifyResult("inconclusive", detail="mixed doubling and periodic tails")
    mode = tails.pop() if tails else "zero"

    head_len = max([1] + [len(matrix.row(i).head) for i in range(-N, N + 1)])
    engine = CountEngine(N, matrix.entry)
    bmass = {-bound: Q(0), bound: Q(0)}

    def collect_boundary() -> None:
        counts = engine.k_odd if bound % 2 else engine.k_even
        w = Q(2 ** (bound % 2), 4**engine.n)
        for b in (-bound, bound):
            bmass[b] += counts.get(b, 0) * w

    def boundary_verdict(extra_lo: Fraction, extra_hi: Fraction) -> VerifyResult:
        # the counts scan passed, so a <= k throughout; now the atom identities
        for i in range(-N, N + 1):
            got = matrix.site_weight(i)
            if got != mu.weight(i):
                return VerifyResult("violation", site=i,
                                    detail=f"encoded weight {got} != target {mu.weight(i)}")
        if bmass[-bound] + extra_lo != mu.weight(-bound):
            return VerifyResult("violation", site=-bound,
                                detail=f"boundary mass {bmass[-bound] + extra_lo} "
                                       f"!= target {mu.weight(-bound)}")
        if bmass[bound] + extra_hi != mu.weight(bound):
            return VerifyResult("violation", site=bound,
                                detail=f"boundary mass {bmass[bound] + extra_hi} "
                                       f"!= target {mu.weight(bound)}")
        return VerifyResult("valid")

    try:
        if mode == "zero":
            for _ in range(head_len):
                engine.advance()
                collect_boundary()
            extra_lo, extra_hi = _ruin_masses(engine.k_even, engine.n, N)
            return boundary_verdict(extra_lo, extra_hi)

        if mode == "doubling":
            prev = None
            for _ in range(max_scan):
                engine.advance()
                collect_boundary()
                if engine.n > head_len:
                    cur = (dict(engine.k_odd), dict(engine.k_even))
                    if prev is not None and _is_double(prev, cur):
                        # counts (and rows) now double every stage: the
                        # remaining boundary tail equals the last stage mass
                        counts = engine.k_odd if bound % 2 else engine.k_even
                        w = Q(2 ** (bound % 2), 4**engine.n)
                        return boundary_verdict(counts.get(-bound, 0) * w,
                                                counts.get(bound, 0) * w)
                    prev = cur
                else:
                    prev = None
            return VerifyResult("inconclusive", detail="no doubling regime found")

        return _verify_periodic(matrix, mu, engine, bmass, head_len, max_scan,
                                boundary_verdict)
    except CountViolation as v:
        return VerifyResult("violation", site=v.site, stage=v.stage,
                            detail=str(v))


def _is_double(prev, cur) -> bool:
    return all(cur[p][i] == 2 * prev[p][i] for p in (0, 1) for i in cur[p])


def _verify_periodic(matrix, mu, engine, bmass, head_len, max_scan,
                     boundary_verdict):
    import math

    N = matrix.half_width
    bound = N + 1
    period = 1
    for i in range(-N, N + 1):
        r = matrix.row(i)
        if r.tail == "periodic":
            period = math.lcm(period, len(r.period))

    # advance into the aligned periodic regime, hunting for domination
    snapshots: dict[int, dict[int, int]] = {}
    start = None
    for _ in range(max_scan):
        engine.advance()
        counts = engine.k_odd if bound % 2 else engine.k_even
        w = Q(2 ** (bound % 2), 4**engine.n)
        for b in (-bound, bound):
            bmass[b] += counts.get(b, 0) * w
        if engine.n >= head_len and (engine.n - head_len) % period == 0:
            snap = dict(engine.k_even)
            prior = snapshots.get((engine.n - head_len) // period - 1)
            if prior is not None and all(snap[i] >= prior[i] for i in snap):
                start = engine.n
                break
            snapshots[(engine.n - head_len) // period] = snap
    if start is None:
        return VerifyResult("inconclusive", detail="no periodic domination found")

    # Affine one-period map on the interior even counts, and the weighted
    # boundary mass of one period as an affine functional of those counts.
    interior_even = [i for i in engine.even_sites if abs(i) <= N]
    dim = len(interior_even)
    idx = {i: j for j, i in enumerate(interior_even)}

    # symbolic counts: vector of (coeffs, const)
    sym = {i: ([Q(1) if j == idx[i] else Q(0) for j in range(dim)], Q(0))
           for i in interior_even}
    for b in (-bound, bound):
        if bound % 2 == 0:
            sym[b] = ([Q(0)] * dim, Q(0))
    t_lo = [Q(0)] * dim
    s_lo = Q(0)
    t_hi = [Q(0)] * dim
    s_hi = Q(0)

    cur_even = dict(sym)
    for l in range(period):
        stage = start + l + 1
        surv_even = {}
        for i in engine.even_sites:
            if abs(i) > N:
                surv_even[i] = ([Q(0)] * dim, Q(0))
            else:
                coeffs, const = cur_even.get(i, ([Q(0)] * dim, Q(0)))
                surv_even[i] = (coeffs, const - matrix.entry(i, stage - 1))
        k_odd = {}
        for j in engine.odd_sites:
            lcoef, lconst = surv_even.get(j - 1, ([Q(0)] * dim, Q(0)))
            rcoef, rconst = surv_even.get(j + 1, ([Q(0)] * dim, Q(0)))
            k_odd[j] = ([x + y for x, y in zip(lcoef, rcoef)], lconst + rconst)
        surv_odd = {}
        for j in engine.odd_sites:
            coeffs, const = k_odd[j]
            if abs(j) > N:
                surv_odd[j] = ([Q(0)] * dim, Q(0))
            else:
                surv_odd[j] = (coeffs, const - matrix.entry(j, stage))
        new_even = {}
        for i in engine.even_sites:
            lco, lc = surv_odd.get(i - 1, ([Q(0)] * dim, Q(0)))
            rco, rc = surv_odd.get(i + 1, ([Q(0)] * dim, Q(0)))
            new_even[i] = ([x + y for x, y in zip(lco, rco)], lc + rc)
        # weighted boundary contribution of this stage, relative weight 4^{-(l+1)}
        wrel = Q(2 ** (bound % 2), 4 ** (l + 1))
        if bound % 2:
            blo, bhi = k_odd[-bound], k_odd[bound]
        else:
            blo, bhi = new_even[-bound], new_even[bound]
        t_lo = [x + wrel * c for x, c in zip(t_lo, blo[0])]
        s_lo += wrel * blo[1]
        t_hi = [x + wrel * c for x, c in zip(t_hi, bhi[0])]
        s_hi += wrel * bhi[1]
        cur_even = new_even

    A = [[cur_even[i][0][j] for j in range(dim)] for i in interior_even]
    v = [cur_even[i][1] for i in interior_even]
    k0 = [Q(engine.k_even[i]) for i in interior_even]
    r = Q(1, 4**period)

    # x = (I - rA)^{-1} (k0 + r/(1-r) v)
    rhs = [k0[j] + r / (1 - r) * v[j] for j in range(dim)]
    mat = [[(Q(1) if i == j else Q(0)) - r * A[i][j] for j in range(dim)]
           for i in range(dim)]
    x = _solve(mat, rhs)

    w0 = Q(1, 4**start)
    extra_lo = w0 * (sum(t * xi for t, xi in zip(t_lo, x)) + s_lo / (1 - r))
    extra_hi = w0 * (sum(t * xi for t, xi in zip(t_hi, x)) + s_hi / (1 - r))
    return boundary_verdict(extra_lo, extra_hi)


def _solve(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination with partial pivoting on Fractions."""
    n = len(mat)
    m = [row[:] + [b] for row, b in zip(mat, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ArithmeticError("singular period map (spectral radius 4^L?)")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [inv * x for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


# ---------------------------------------------------------------------------
# Search


@dataclass(frozen=True)
class SearchResult:
    status: str  # "member" | "unknown"
    matrix: StoppingMatrix | None = None


def search_matrix(mu: IntegerMeasure, max_stage: int,
                  node_budget: int = 50_000) -> SearchResult:
    """Greedy stage-by-stage construction with backtracking.

    At each stage every interior site stops as many paths as both the
    arrival count and the remaining base-4 budget of its atom allow; on a
    dead end the latest choice is decremented.  Sound but deliberately
    incomplete: success is certified (the result verifies), failure within
    the stage and node budgets only yields "unknown".
    """
    if not mu.is_centered():
        raise MeasureError(f"measure is not centered (mean {mu.mean()})")
    if mu.support == [0]:
        return SearchResult("member", StoppingMatrix(0, {0: MatrixRow((1,))}))
    top = max(abs(s) for s in mu.support)
    N = top - 1
    bound = top
    budgets = {i: mu.weight(i) / 2 ** (abs(i) % 2) for i in range(-N, N + 1)}
    target_lo, target_hi = mu.weight(-bound), mu.weight(bound)

    nodes = 0
    even_interior = [i for i in range(-N, N + 1) if i % 2 == 0]
    odd_interior = [i for i in range(-N, N + 1) if i % 2 != 0]

    def recurse(stage, k_even, budgets, bmass, rows):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget or stage > max_stage:
            return None

        def site_choices(order, counts, budgets, stage):
            """Yield stop-count assignments for one phase, greedy first."""
            sites = [i for i in order if counts.get(i, 0) > 0]
            caps = []
            for i in sites:
                cap = min(counts[i], int(budgets[i] * 4**stage))
                caps.append(cap)
            # iterate assignments in decreasing lexicographic order
            cur = caps[:]
            while True:
                yield dict(zip(sites, cur))
                j = len(cur) - 1
                while j >= 0 and cur[j] == 0:
                    j -= 1
                if j < 0:
                    return
                cur[j] -= 1
                for jj in range(j + 1, len(cur)):
                    cur[jj] = caps[jj]

        # phase 1: odd arrivals (stage >= 1); stage 0 has no odd phase
        if stage == 0:
            k_odd_surv = None
            odd_iter = iter([{}])
        else:
            k_odd = {}
            for j in odd_interior + [b for b in (-bound, bound) if b % 2]:
                k_odd[j] = (k_even.get(j - 1, 0) + k_even.get(j + 1, 0)
                            if abs(j) <= bound else 0)
            # boundary odd arrivals are absorbed now
            odd_iter = site_choices(odd_interior, k_odd, budgets, stage)

        for odd_choice in odd_iter:
            b2 = dict(budgets)
            bm_lo, bm_hi = bmass
            if stage > 0:
                for j, a in odd_choice.items():
                    b2[j] -= Q(a, 4**stage)
                if bound % 2:
                    w = Q(2, 4**stage)
                    bm_lo += k_odd.get(-bound, 0) * w
                    bm_hi += k_odd.get(bound, 0) * w
                if bm_lo > target_lo or bm_hi > target_hi:
                    continue
                surv_odd = {j: k_odd[j] - odd_choice.get(j, 0) for j in odd_interior}
            else:
                surv_odd = {}

            # even arrivals
            if stage == 0:
                k_even_new = {0: 1}
            else:
                k_even_new = {}
                for i in even_interior + [b for b in (-bound, bound) if b % 2 == 0]:
                    k_even_new[i] = (surv_odd.get(i - 1, 0) + surv_odd.get(i + 1, 0))
            bm_lo2, bm_hi2 = bm_lo, bm_hi
            if bound % 2 == 0 and stage > 0:
                w = Q(1, 4**stage)
                bm_lo2 += k_even_new.get(-bound, 0) * w
                bm_hi2 += k_even_new.get(bound, 0) * w
                if bm_lo2 > target_lo or bm_hi2 > target_hi:
                    continue

            for even_choice in site_choices(even_interior, k_even_new, b2, stage):
                nodes += 1
                if nodes > node_budget:
                    return None
                b3 = dict(b2)
                for i, a in even_choice.items():
                    b3[i] -= Q(a, 4**stage)
                rows2 = {i: rows.get(i, ()) for i in range(-N, N + 1)}
                for i in range(-N, N + 1):
                    choice = (odd_choice if i % 2 else even_choice).get(i, 0)
                    rows2[i] = rows.get(i, ()) + ((stage, choice),)
                surv_even = {i: k_even_new.get(i, 0)
                             - even_choice.get(i, 0) for i in even_interior}

                if all(b == 0 for b in b3.values()):
                    extra_lo, extra_hi = _ruin_masses(
                        {i: surv_even.get(i, 0) for i in even_interior},
                        stage, N)
                    if bm_lo2 + extra_lo == target_lo and bm_hi2 + extra_hi == target_hi:
                        return _build_matrix(N, rows2, stage)
                    continue  # budgets spent but boundary wrong: dead end

                result = recurse(stage + 1, surv_even, b3, (bm_lo2, bm_hi2), rows2)
                if result is not None:
                    return result
        return None

    found = recurse(0, {}, budgets, (Q(0), Q(0)), {})
    if found is None:
        return SearchResult("unknown")
    return SearchResult("member", found)


def _build_matrix(N: int, rows: dict[int, tuple], last_stage: int) -> StoppingMatrix:
    out = {}
    for i, pairs in rows.items():
        head = [0] * (last_stage + 1)
        for stage, a in pairs:
            head[stage] = a
        while head and head[-1] == 0:
            head.pop()
        if head:
            out[i] = MatrixRow(tuple(head))
    return StoppingMatrix(N, out)
