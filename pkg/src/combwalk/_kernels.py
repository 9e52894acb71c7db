"""Compiled hot loops (numba).

Everything here mirrors the pure-Python reference implementations in
`rng`, `lattice` and `coupling` bit for bit: the RNG is the same
xoshiro256++ / SplitMix64 construction, and the walkers consume variates
in the same documented order.  Tests assert the equivalence.

Parallel kernels iterate paths with `prange`; each path owns a derived
stream and a private output slot, so results are independent of the
number of threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 2.0**-53


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (U64(64) - k))


@njit(cache=True)
def _derive_state(master, stream, role):
    k = _mix64(master + _GOLDEN)
    k = _mix64((k ^ stream) + _GOLDEN)
    k = _mix64((k ^ role) + _GOLDEN)
    s = np.empty(4, dtype=np.uint64)
    for i in range(4):
        k = k + _GOLDEN
        s[i] = _mix64(k)
    return s


@njit(cache=True, inline="always")
def _next_u64(s):
    result = _rotl(s[0] + s[3], U64(23)) + s[0]
    t = s[1] << U64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], U64(45))
    return result


@njit(cache=True, inline="always")
def _next_unif(s):
    return (_next_u64(s) >> U64(11)) * _INV53


@njit(cache=True)
def uniforms_fill(master, stream, role, count, open_unit):
    s = _derive_state(master, stream, role)
    out = np.empty(count, dtype=np.float64)
    if open_unit:
        for i in range(count):
            out[i] = 1.0 - _next_unif(s)
    else:
        for i in range(count):
            out[i] = _next_unif(s)
    return out


@njit(cache=True, inline="always")
def _level_index(y, levels):
    for j in range(levels.shape[0]):
        if y == levels[j]:
            return j
    return -1


@njit(cache=True, inline="always")
def _direct_move(x, y, u, levels, ps):
    j = _level_index(y, levels)
    if j < 0:
        if u < 0.5:
            y += 1
        else:
            y -= 1
    else:
        p = ps[j]
        if u < p:
            y += 1
        elif u < 2.0 * p:
            y -= 1
        elif u < 0.5 + p:
            x += 1
        else:
            x -= 1
    return x, y


@njit(cache=True)
def direct_full(levels, ps, n_steps, master, stream):
    """One path of the direct stepper, all positions recorded."""
    s = _derive_state(master, stream, U64(0))
    pos = np.zeros((n_steps + 1, 2), dtype=np.int64)
    x = np.int64(0)
    y = np.int64(0)
    for i in range(n_steps):
        u = _next_unif(s)
        x, y = _direct_move(x, y, u, levels, ps)
        pos[i + 1, 0] = x
        pos[i + 1, 1] = y
    return pos


@njit(cache=True, parallel=True)
def direct_checkpoints_batch(levels, ps, checkpoints, master, stream_lo, n_paths):
    """Direct-stepper ensemble recorded at the given sorted step counts.

    Returns (xy[path, checkpoint, 2], max_abs_y[path, checkpoint]) where
    max_abs_y is the running maximum of |y| over all steps so far.
    """
    n_chk = checkpoints.shape[0]
    n_steps = checkpoints[n_chk - 1]
    xy = np.zeros((n_paths, n_chk, 2), dtype=np.int64)
    max_abs_y = np.zeros((n_paths, n_chk), dtype=np.int64)
    for p_idx in prange(n_paths):
        s = _derive_state(master, stream_lo + U64(p_idx), U64(0))
        x = np.int64(0)
        y = np.int64(0)
        m = np.int64(0)
        ci = 0
        while ci < n_chk and checkpoints[ci] == 0:
            ci += 1
        for i in range(n_steps):
            u = _next_unif(s)
            x, y = _direct_move(x, y, u, levels, ps)
            a = y if y >= 0 else -y
            if a > m:
                m = a
            while ci < n_chk and checkpoints[ci] == i + 1:
                xy[p_idx, ci, 0] = x
                xy[p_idx, ci, 1] = y
                max_abs_y[p_idx, ci] = m
                ci += 1
    return xy, max_abs_y


@njit(cache=True, inline="always")
def _geom_draw(s, log_one_minus_alpha):
    u = 1.0 - _next_unif(s)
    return np.int64(np.floor(np.log(u) / log_one_minus_alpha))


@njit(cache=True)
def coupled_path(levels, alphas, n_steps, master, stream):
    """One path of the two-walk + geometric-run construction.

    Returns
      xy          int64[2]  endpoint
      hv          int64[2]  horizontal and vertical step counts
      visits      int64[K]  local time of the vertical walk at each line
                            (time 0 excluded)
      d2          float64   occupation-weighted expected horizontal steps
      max_err     float64   max over steps of |H_i - D2(V_i)|
      trunc_extra int64     undelivered remainder of a run cut at n_steps
    """
    K = levels.shape[0]
    s_h = _derive_state(master, stream, U64(1))
    s_v = _derive_state(master, stream, U64(2))
    s_g = np.empty((K, 4), dtype=np.uint64)
    for j in range(K):
        s_g[j] = _derive_state(master, stream, U64(3 + j))

    weights = np.empty(K, dtype=np.float64)
    log1m = np.empty(K, dtype=np.float64)
    for j in range(K):
        weights[j] = (1.0 - alphas[j]) / alphas[j]
        log1m[j] = np.log1p(-alphas[j])

    visits = np.zeros(K, dtype=np.int64)
    x = np.int64(0)
    y = np.int64(0)
    h = np.int64(0)
    v = np.int64(0)
    total = np.int64(0)
    d2 = 0.0
    max_err = 0.0
    trunc_extra = np.int64(0)

    j = _level_index(y, levels)
    while True:
        if j >= 0 and total < n_steps:
            # a visit to a line triggers one geometric run (possibly empty)
            g = _geom_draw(s_g[j], log1m[j])
            r = g
            if r > n_steps - total:
                r = n_steps - total
                trunc_extra = g - r
            for _ in range(r):
                if _next_unif(s_h) < 0.5:
                    x += 1
                else:
                    x -= 1
                h += 1
                total += 1
                err = h - d2
                if err < 0.0:
                    err = -err
                if err > max_err:
                    max_err = err
        if total >= n_steps:
            break
        # vertical stepping until the next line (or the step budget runs out)
        j = -1
        while total < n_steps:
            if _next_unif(s_v) < 0.5:
                y += 1
            else:
                y -= 1
            v += 1
            total += 1
            j = _level_index(y, levels)
            if j >= 0:
                visits[j] += 1
                d2 += weights[j]
            err = h - d2
            if err < 0.0:
                err = -err
            if err > max_err:
                max_err = err
            if j >= 0:
                break

    xy = np.empty(2, dtype=np.int64)
    xy[0] = x
    xy[1] = y
    hv = np.empty(2, dtype=np.int64)
    hv[0] = h
    hv[1] = v
    return xy, hv, visits, d2, max_err, trunc_extra


@njit(cache=True, parallel=True)
def coupled_endpoint_batch(levels, alphas, n_steps, master, stream_lo, n_paths):
    K = levels.shape[0]
    xy = np.zeros((n_paths, 2), dtype=np.int64)
    hv = np.zeros((n_paths, 2), dtype=np.int64)
    visits = np.zeros((n_paths, K), dtype=np.int64)
    d2 = np.zeros(n_paths, dtype=np.float64)
    max_err = np.zeros(n_paths, dtype=np.float64)
    trunc_extra = np.zeros(n_paths, dtype=np.int64)
    for p_idx in prange(n_paths):
        pxy, phv, pvis, pd2, perr, pex = coupled_path(
            levels, alphas, n_steps, master, stream_lo + U64(p_idx)
        )
        xy[p_idx] = pxy
        hv[p_idx] = phv
        visits[p_idx] = pvis
        d2[p_idx] = pd2
        max_err[p_idx] = perr
        trunc_extra[p_idx] = pex
    return xy, hv, visits, d2, max_err, trunc_extra


@njit(cache=True, parallel=True)
def geom_maxdev_batch(alpha, n, reps, master, stream_lo):
    """Maximal deviation of centered geometric partial sums, per replication.

    Returns (max_j |sum_{i<=j} (G_i - mean)|, final sum) for each of `reps`
    independent length-n sequences.
    """
    mean = (1.0 - alpha) / alpha
    log1m = np.log1p(-alpha)
    max_dev = np.empty(reps, dtype=np.float64)
    final = np.empty(reps, dtype=np.float64)
    for r in prange(reps):
        s = _derive_state(master, stream_lo + U64(r), U64(0))
        acc = 0.0
        m = 0.0
        for _ in range(n):
            acc += _geom_draw(s, log1m) - mean
            a = acc if acc >= 0.0 else -acc
            if a > m:
                m = a
        max_dev[r] = m
        final[r] = acc
    return max_dev, final
