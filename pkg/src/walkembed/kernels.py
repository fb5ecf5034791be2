"""Monte Carlo kernels for walking stopping rules at scale.

Two interchangeable backends produce bit-identical results:

* "numba": per-trial scalar loops compiled with numba (the fast path);
* "numpy": synchronized vectorized stepping over all active trials.

Both draw increments from per-trial splitmix64 streams seeded from
(seed, trial index), so a given (seed, trial) always sees the same walk no
matter the backend or the order trials are processed in.  Backend choice:
the WALKEMBED_BACKEND environment variable ("auto", "numba", "numpy"),
overridable per call; "auto" uses numba when it imports.

Each kernel returns (positions, steps, stopped): final site, number of
steps consumed, and whether the rule actually stopped within `max_steps`
(unstopped trials are truncation, reported, never folded into the law).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
STREAM = 0x632BE59BD9B4E019
MASK = (1 << 64) - 1

# the dyadic selector is forced after this many bits; beyond it float64
# cannot represent the interval ends exactly anyway, and the residual
# ambiguity (one part in 2^52) is far below any Monte Carlo resolution
MAX_DYADIC_BITS = 52


def mix64(z: int) -> int:
    """splitmix64 finalizer on plain Python ints."""
    z &= MASK
    z = ((z ^ (z >> 30)) * MIX1) & MASK
    z = ((z ^ (z >> 27)) * MIX2) & MASK
    return z ^ (z >> 31)


def stream_states(seed: int, trials: int) -> np.ndarray:
    """Initial splitmix64 state for each trial, as uint64."""
    out = np.empty(trials, dtype=np.uint64)
    for i in range(trials):
        out[i] = mix64((seed + i * STREAM) & MASK)
    return out


def resolve_backend(requested: str | None = None) -> str:
    name = requested or os.environ.get("WALKEMBED_BACKEND", "auto")
    if name not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return name


# ---------------------------------------------------------------------------
# numba backend: scalar per-trial loops


@njit(cache=True)
def _nb_next(state):
    state = state + np.uint64(GAMMA)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def _nb_two_point(states, us, vs, max_steps):
    n = states.shape[0]
    pos = np.zeros(n, dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    stopped = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        s = states[i]
        p = 0
        u, v = us[i], vs[i]
        if p == u or p == v:
            stopped[i] = True
            continue
        for t in range(1, max_steps + 1):
            s, z = _nb_next(s)
            p += 1 if (z >> np.uint64(63)) else -1
            if p == u or p == v:
                steps[i] = t
                stopped[i] = True
                break
        pos[i] = p
        if not stopped[i]:
            steps[i] = max_steps
    return pos, steps, stopped


@njit(cache=True)
def _nb_exit_composition(states, chips_a, chips_b, max_steps):
    n = states.shape[0]
    m = chips_a.shape[0]
    pos = np.zeros(n, dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    stopped = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        s = states[i]
        p = 0
        idx = 0
        while idx < m and not (chips_a[idx] < p < chips_b[idx]):
            idx += 1
        if idx >= m:
            stopped[i] = True
            continue
        for t in range(1, max_steps + 1):
            s, z = _nb_next(s)
            p += 1 if (z >> np.uint64(63)) else -1
            while idx < m and not (chips_a[idx] < p < chips_b[idx]):
                idx += 1
            if idx >= m:
                steps[i] = t
                stopped[i] = True
                break
        pos[i] = p
        if not stopped[i]:
            steps[i] = max_steps
    return pos, steps, stopped


@njit(cache=True)
def _nb_max_threshold(states, levels, lo, hi, max_steps):
    n = states.shape[0]
    pos = np.zeros(n, dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    stopped = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        s = states[i]
        p = 0
        mx = 0
        th = levels[-lo]
        if mx >= th:
            stopped[i] = True
            continue
        for t in range(1, max_steps + 1):
            s, z = _nb_next(s)
            p += 1 if (z >> np.uint64(63)) else -1
            if p > mx:
                mx = p
            if p > hi:
                th = p
            elif p < lo:
                th = levels[0]
            else:
                th = levels[p - lo]
            if mx >= th:
                pos[i] = p
                steps[i] = t
                stopped[i] = True
                break
        if not stopped[i]:
            pos[i] = p
            steps[i] = max_steps
    return pos, steps, stopped


@njit(cache=True)
def _nb_minimal(states, sites, cuts, max_steps):
    n = states.shape[0]
    m = sites.shape[0]
    pos = np.zeros(n, dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    stopped = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        s = states[i]
        p = 0
        low = 0.0
        width = 1.0
        target = 0
        resolved = False
        # resolution check at time zero (single-cell partitions)
        j = 0
        while j < m - 1 and cuts[j] <= low:
            j += 1
        if low + width <= cuts[j]:
            resolved = True
            target = sites[j]
        if resolved and p == target:
            stopped[i] = True
            continue
        for t in range(1, max_steps + 1):
            s, z = _nb_next(s)
            up = (z >> np.uint64(63)) != 0
            p += 1 if up else -1
            if not resolved:
                width *= 0.5
                if up:
                    low += width
                probe = low if t < MAX_DYADIC_BITS else low + width * 0.5
                j = 0
                while j < m - 1 and cuts[j] <= probe:
                    j += 1
                if t >= MAX_DYADIC_BITS or low + width <= cuts[j]:
                    resolved = True
                    target = sites[j]
            if resolved and p == target:
                pos[i] = p
                steps[i] = t
                stopped[i] = True
                break
        if not stopped[i]:
            pos[i] = p
            steps[i] = max_steps
    return pos, steps, stopped


# ---------------------------------------------------------------------------
# numpy backend: synchronized vectorized stepping


def _np_next(states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    states = states + np.uint64(GAMMA)
    z = states
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    z = z ^ (z >> np.uint64(31))
    return states, z


def _np_run(states, max_steps, is_stopped, consume):
    """Drive all trials in lockstep.

    `is_stopped(pos_view, aux)` marks freshly stopped trials at time zero;
    `consume(idx, up)` advances per-trial rule state for active indices and
    returns a boolean stop mask for them.
    """
    n = states.shape[0]
    pos = np.zeros(n, dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    stopped = is_stopped()
    active = ~stopped
    t = 0
    with np.errstate(over="ignore"):
        while active.any() and t < max_steps:
            t += 1
            idx = np.nonzero(active)[0]
            states[idx], z = _np_next(states[idx])
            up = (z >> np.uint64(63)).astype(bool)
            pos[idx] += np.where(up, 1, -1)
            hit = consume(idx, up, pos, t)
            just = idx[hit]
            steps[just] = t
            stopped[just] = True
            active[just] = False
    steps[active] = max_steps
    return pos, steps, stopped


def _np_two_point(states, us, vs, max_steps):
    def at_zero():
        return (us == 0) | (vs == 0)

    def consume(idx, up, pos, t):
        return (pos[idx] == us[idx]) | (pos[idx] == vs[idx])

    return _np_run(states.copy(), max_steps, at_zero, consume)


def _np_exit_composition(states, chips_a, chips_b, max_steps):
    n = states.shape[0]
    m = chips_a.shape[0]
    idx_state = np.zeros(n, dtype=np.int64)

    def settle(which, pos_vals):
        cur = idx_state[which]
        while True:
            running = cur < m
            a = chips_a[np.minimum(cur, m - 1)]
            b = chips_b[np.minimum(cur, m - 1)]
            inside = (a < pos_vals) & (pos_vals < b)
            bump = running & ~inside
            if not bump.any():
                break
            cur = cur + bump
        idx_state[which] = cur
        return cur >= m

    def at_zero():
        return settle(np.arange(n), np.zeros(n, dtype=np.int64))

    def consume(idx, up, pos, t):
        return settle(idx, pos[idx])

    return _np_run(states.copy(), max_steps, at_zero, consume)


def _np_max_threshold(states, levels, lo, hi, max_steps):
    n = states.shape[0]
    mx = np.zeros(n, dtype=np.int64)

    def thresh(p):
        clipped = np.clip(p, lo, hi)
        th = levels[clipped - lo]
        return np.where(p > hi, p, th)

    def at_zero():
        return mx >= thresh(np.zeros(n, dtype=np.int64))

    def consume(idx, up, pos, t):
        mx[idx] = np.maximum(mx[idx], pos[idx])
        return mx[idx] >= thresh(pos[idx])

    return _np_run(states.copy(), max_steps, at_zero, consume)


def _np_minimal(states, sites, cuts, max_steps):
    n = states.shape[0]
    low = np.zeros(n, dtype=np.float64)
    width = np.ones(n, dtype=np.float64)
    target = np.zeros(n, dtype=np.int64)
    resolved = np.zeros(n, dtype=bool)

    def try_resolve(which, t):
        open_ = which[~resolved[which]]
        if open_.size == 0:
            return
        force = t >= MAX_DYADIC_BITS
        probe = low[open_] + (width[open_] * 0.5 if force else 0.0)
        j = np.searchsorted(cuts, probe, side="right")
        j = np.minimum(j, len(cuts) - 1)
        ok = force | (low[open_] + width[open_] <= cuts[j])
        hit = open_[ok]
        resolved[hit] = True
        target[hit] = sites[j[ok]]

    def at_zero():
        try_resolve(np.arange(n), 0)
        return resolved & (target == 0)

    def consume(idx, up, pos, t):
        live = idx[~resolved[idx]]
        width[live] *= 0.5
        lifted = live[up[~resolved[idx]]]
        low[lifted] += width[lifted]
        try_resolve(idx, t)
        return resolved[idx] & (pos[idx] == target[idx])

    return _np_run(states.copy(), max_steps, at_zero, consume)


# ---------------------------------------------------------------------------
# dispatch


def run_two_point(seed, us, vs, max_steps, backend=None):
    states = stream_states(seed, len(us))
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    fn = _nb_two_point if resolve_backend(backend) == "numba" else _np_two_point
    return fn(states, us, vs, max_steps)


def run_exit_composition(seed, trials, chips, max_steps, backend=None):
    states = stream_states(seed, trials)
    a = np.asarray([c.a for c in chips], dtype=np.int64)
    b = np.asarray([c.b for c in chips], dtype=np.int64)
    fn = (_nb_exit_composition if resolve_backend(backend) == "numba"
          else _np_exit_composition)
    return fn(states, a, b, max_steps)


def run_max_threshold(seed, trials, thresholds, max_steps, backend=None):
    states = stream_states(seed, trials)
    table = dict(thresholds)
    lo, hi = min(table), max(table)
    if not lo <= 0 <= hi:
        raise ValueError("threshold table must cover the origin")
    levels = np.asarray([table[s] for s in range(lo, hi + 1)], dtype=np.int64)
    fn = (_nb_max_threshold if resolve_backend(backend) == "numba"
          else _np_max_threshold)
    return fn(states, levels, lo, hi, max_steps)


def run_minimal(seed, trials, sites, cut_points, max_steps, backend=None):
    states = stream_states(seed, trials)
    sites = np.asarray(sites, dtype=np.int64)
    cuts = np.asarray([float(c) for c in cut_points], dtype=np.float64)
    fn = _nb_minimal if resolve_backend(backend) == "numba" else _np_minimal
    return fn(states, sites, cuts, max_steps)
