"""Compiled hot loops: the pair-multiplicity table and the swap kernel.

The multiplicity table is an open-addressing hash map from a packed
unordered vertex pair ``min(u, v) * n + max(u, v)`` to its multiplicity.
Linear probing with backward-shift deletion keeps only live pairs in the
table, so its size is fixed at construction (load factor <= 1/4).

Both chains consume exactly four uniforms per proposal step:

    u0, u1  -> ordered pair of distinct edge indices (i, j)
    u2      -> u2 < 0.5 flips the endpoints of edge i
    u3      -> acceptance draw (vertex-labeled chain only)

and rewire edge i = (a, b), edge j = (c, d) into (a, c), (b, d).
"""

import numba as nb
import numpy as np

EMPTY = -1
_GOLD = np.uint64(0x9E3779B97F4A7C15)

# step outcome codes, mirrored by mcmc.REASONS
OK = 0
WOULD_CREATE_LOOP = 1
WOULD_CREATE_MULTI = 2
VERTEX_REJECTION = 3
DEGENERATE = 4
N_REASONS = 5


def table_geometry(m):
    """Power-of-two table size for ``m`` live pairs, with its hash shift."""
    bits = max(4, int(np.ceil(np.log2(max(4 * m, 16)))))
    return 1 << bits, 64 - bits


@nb.njit(cache=True, inline="always")
def pair_key(u, v, n):
    if u > v:
        u, v = v, u
    return u * n + v


@nb.njit(cache=True, inline="always")
def _home(key, shift):
    return np.int64((np.uint64(key) * _GOLD) >> np.uint64(shift))


@nb.njit(cache=True, inline="always")
def _slot(keys, shift, mask, key):
    h = _home(key, shift)
    while True:
        k = keys[h]
        if k == key or k == EMPTY:
            return h
        h = (h + 1) & mask


@nb.njit(cache=True, inline="always")
def _delete_slot(keys, vals, shift, mask, i):
    j = i
    while True:
        j = (j + 1) & mask
        kj = keys[j]
        if kj == EMPTY:
            break
        h = _home(kj, shift)
        if i <= j:
            stays = i < h <= j
        else:
            stays = h > i or h <= j
        if stays:
            continue
        keys[i] = kj
        vals[i] = vals[j]
        i = j
    keys[i] = EMPTY
    vals[i] = 0


@nb.njit(cache=True, inline="always")
def table_get(keys, vals, shift, mask, key):
    # empty slots always hold 0
    return vals[_slot(keys, shift, mask, key)]


@nb.njit(cache=True, inline="always")
def table_add(keys, vals, shift, mask, key, delta):
    s = _slot(keys, shift, mask, key)
    if keys[s] == EMPTY:
        keys[s] = key
        vals[s] = delta
        return
    w = vals[s] + delta
    if w == 0:
        _delete_slot(keys, vals, shift, mask, s)
    else:
        vals[s] = w


@nb.njit(cache=True)
def table_build(edges, n, size, shift):
    keys = np.full(size, EMPTY, dtype=np.int64)
    vals = np.zeros(size, dtype=np.int64)
    mask = size - 1
    for e in range(edges.shape[0]):
        table_add(keys, vals, shift, mask, pair_key(edges[e, 0], edges[e, 1], n), 1)
    return keys, vals


@nb.njit(cache=True)
def table_items(keys, vals):
    cnt = 0
    for s in range(keys.shape[0]):
        if keys[s] != EMPTY:
            cnt += 1
    out_k = np.empty(cnt, dtype=np.int64)
    out_v = np.empty(cnt, dtype=np.int64)
    cnt = 0
    for s in range(keys.shape[0]):
        if keys[s] != EMPTY:
            out_k[cnt] = keys[s]
            out_v[cnt] = vals[s]
            cnt += 1
    return out_k, out_v


@nb.njit(cache=True)
def edge_indices(u0, u1, m):
    i = np.int64(u0 * m)
    if i >= m:
        i = m - 1
    j = np.int64(u1 * (m - 1))
    if j >= m - 1:
        j = m - 2
    if j >= i:
        j += 1
    return i, j


@nb.njit(cache=True)
def _decide(a, b, c, d, u3, keys, vals, shift, mask, n,
            allow_loops, allow_multi, vertex):
    if not allow_loops and (a == c or b == d):
        return WOULD_CREATE_LOOP
    ab = pair_key(a, b, n)
    cd = pair_key(c, d, n)
    ac = pair_key(a, c, n)
    bd = pair_key(b, d, n)
    if not allow_multi:
        if ac == bd:
            return WOULD_CREATE_MULTI
        w = table_get(keys, vals, shift, mask, ac) - int(ac == ab) - int(ac == cd)
        if w >= 1:
            return WOULD_CREATE_MULTI
        w = table_get(keys, vals, shift, mask, bd) - int(bd == ab) - int(bd == cd)
        if w >= 1:
            return WOULD_CREATE_MULTI
    if not vertex:
        return OK

    distinct = 1
    if b != a:
        distinct += 1
    if c != a and c != b:
        distinct += 1
    if d != a and d != b and d != c:
        distinct += 1

    w_ab = float(table_get(keys, vals, shift, mask, ab))
    if distinct == 4:
        A = w_ab * table_get(keys, vals, shift, mask, cd)
        B = (table_get(keys, vals, shift, mask, ac) + 1.0) * (
            table_get(keys, vals, shift, mask, bd) + 1.0)
    elif distinct == 3:
        A = w_ab * table_get(keys, vals, shift, mask, cd)
        B = (table_get(keys, vals, shift, mask, ac) + 1.0) * (
            table_get(keys, vals, shift, mask, bd) + 1.0)
        if a == b or c == d:
            A *= 2.0
        else:
            B *= 2.0
    elif distinct == 2:
        loop_first = a == b
        loop_second = c == d
        if loop_first != loop_second:
            return DEGENERATE
        if loop_first:
            w_ac = float(table_get(keys, vals, shift, mask, ac))
            A = 2.0 * w_ab * table_get(keys, vals, shift, mask, cd)
            B = 0.5 * (w_ac + 2.0) * (w_ac + 1.0)
        else:
            A = 0.5 * w_ab * (w_ab - 1.0)
            B = 2.0 * (table_get(keys, vals, shift, mask, pair_key(a, a, n)) + 1.0) * (
                table_get(keys, vals, shift, mask, pair_key(b, b, n)) + 1.0)
    else:
        return DEGENERATE
    if u3 < B / A:
        return OK
    return VERTEX_REJECTION


@nb.njit(cache=True)
def run_chain(edges, degrees, n, keys, vals, shift, use_table,
              allow_loops, allow_multi, vertex, uniforms, sl,
              record_every, phase, out, counts, reasons_out):
    """Advance the chain by ``uniforms.shape[0]`` proposal steps.

    ``sl`` is the running integer S_l = 2 * sum_edges k_x k_y.  After every
    ``record_every``-th step (counting from ``phase`` steps already taken
    since the last record) the current ``sl`` is written to ``out``.
    Returns ``(sl, phase, n_recorded)``.
    """
    m = edges.shape[0]
    mask = keys.shape[0] - 1
    log = reasons_out.shape[0] > 0
    nrec = 0
    for t in range(uniforms.shape[0]):
        i, j = edge_indices(uniforms[t, 0], uniforms[t, 1], m)
        a = edges[i, 0]
        b = edges[i, 1]
        c = edges[j, 0]
        d = edges[j, 1]
        if uniforms[t, 2] < 0.5:
            a, b = b, a
        reason = _decide(a, b, c, d, uniforms[t, 3], keys, vals, shift, mask,
                         n, allow_loops, allow_multi, vertex)
        if reason == OK:
            ka = degrees[a]
            kb = degrees[b]
            kc = degrees[c]
            kd = degrees[d]
            sl += 2 * (ka * kc + kb * kd - ka * kb - kc * kd)
            edges[i, 0] = a
            edges[i, 1] = c
            edges[j, 0] = b
            edges[j, 1] = d
            if use_table:
                table_add(keys, vals, shift, mask, pair_key(a, b, n), -1)
                table_add(keys, vals, shift, mask, pair_key(c, d, n), -1)
                table_add(keys, vals, shift, mask, pair_key(a, c, n), 1)
                table_add(keys, vals, shift, mask, pair_key(b, d, n), 1)
        counts[reason] += 1
        if log:
            reasons_out[t] = reason
        phase += 1
        if phase == record_every:
            out[nrec] = sl
            nrec += 1
            phase = 0
    return sl, phase, nrec
