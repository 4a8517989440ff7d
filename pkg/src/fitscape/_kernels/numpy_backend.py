"""Vectorized NumPy implementation of the hot scan/walk kernels.

This is the fallback backend used when the compiled extension is not
available. Both backends must produce bit-identical outputs: they share the
canonical neighbor slot order (see fitscape.space), the splitmix64 rotation
hash, and the uint64-draw-modulo-degree neighbor choice rule.

All kernels maximize: callers pass fitness negated for minimize objectives.
Classification codes: 0 = an improving neighbor exists, 1 = plateau-stuck
(no improving neighbor but at least one equal one), 2 = strict local optimum.
"""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 16

CLS_IMPROVABLE = 0
CLS_PLATEAU = 1
CLS_OPTIMUM = 2


def splitmix64(x: np.ndarray) -> np.ndarray:
    """The splitmix64 finalizer, elementwise over a uint64 array."""
    z = x + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _slots(radices, kinds):
    """Canonical slot list: (option, delta_or_target, is_grid)."""
    out = []
    for o, (r, k) in enumerate(zip(radices, kinds)):
        if k == 0:
            for delta in range(1, int(r)):
                out.append((o, delta, False))
        else:
            out.append((o, -1, True))
            out.append((o, +1, True))
    return out


def scan_best(g, radices, place, kinds):
    """Best-improvement successor scan.

    Returns (succ, cls): succ[i] is the strictly fittest neighbor of i (ties
    broken by lowest neighbor id) when one improves on i, else i itself.
    """
    n = g.shape[0]
    succ = np.empty(n, dtype=np.int64)
    cls = np.empty(n, dtype=np.uint8)
    slots = _slots(radices, kinds)
    for lo in range(0, n, CHUNK):
        hi = min(lo + CHUNK, n)
        ids = np.arange(lo, hi, dtype=np.int64)
        g0 = g[lo:hi]
        any_better = np.zeros(hi - lo, dtype=bool)
        any_equal = np.zeros(hi - lo, dtype=bool)
        best_g = np.full(hi - lo, -np.inf)
        best_id = np.full(hi - lo, n, dtype=np.int64)
        for o, delta, is_grid in slots:
            p = place[o]
            r = radices[o]
            d = (ids // p) % r
            if is_grid:
                nd = d + delta
                valid = (nd >= 0) & (nd < r)
                nbr = ids + delta * p
                nbr = np.where(valid, nbr, ids)
            else:
                target = (d + delta) % r
                valid = None
                nbr = ids + (target - d) * p
            gn = g[nbr]
            better = gn > g0
            equal = gn == g0
            if valid is not None:
                better &= valid
                equal &= valid
            any_better |= better
            any_equal |= equal
            take = better & ((gn > best_g) | ((gn == best_g) & (nbr < best_id)))
            best_g[take] = gn[take]
            best_id[take] = nbr[take]
        succ[lo:hi] = np.where(any_better, best_id, ids)
        cls[lo:hi] = np.where(
            any_better, CLS_IMPROVABLE, np.where(any_equal, CLS_PLATEAU, CLS_OPTIMUM)
        ).astype(np.uint8)
    return succ, cls


def scan_first(g, radices, place, kinds, seed):
    """First-improvement successor scan.

    Neighbors are taken in ascending-id order rotated by
    splitmix64(seed ^ id) mod degree; the first strictly improving one wins.
    """
    n = g.shape[0]
    n_slots = len(_slots(radices, kinds))
    succ = np.empty(n, dtype=np.int64)
    cls = np.empty(n, dtype=np.uint8)
    slots = _slots(radices, kinds)
    seed64 = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    for lo in range(0, n, CHUNK):
        hi = min(lo + CHUNK, n)
        c = hi - lo
        ids = np.arange(lo, hi, dtype=np.int64)
        g0 = g[lo:hi]
        mat = np.full((c, n_slots), n, dtype=np.int64)
        for j, (o, delta, is_grid) in enumerate(slots):
            p = place[o]
            r = radices[o]
            d = (ids // p) % r
            if is_grid:
                nd = d + delta
                valid = (nd >= 0) & (nd < r)
                mat[valid, j] = ids[valid] + delta * p
            else:
                target = (d + delta) % r
                mat[:, j] = ids + (target - d) * p
        mat.sort(axis=1)
        gm = np.where(mat < n, g[np.minimum(mat, n - 1)], -np.inf)
        any_better = (gm > g0[:, None]).any(axis=1)
        any_equal = (gm == g0[:, None]).any(axis=1)
        deg = (mat < n).sum(axis=1).astype(np.int64)
        rot = (splitmix64(ids.astype(np.uint64) ^ seed64) % deg.astype(np.uint64)).astype(np.int64)
        out = ids.copy()
        pending = any_better.copy()
        rows = np.arange(c)
        for p_off in range(n_slots):
            if not pending.any():
                break
            col = (rot + p_off) % deg
            cand_g = gm[rows, col]
            take = pending & (p_off < deg) & (cand_g > g0)
            out[take] = mat[rows[take], col[take]]
            pending &= ~take
        succ[lo:hi] = out
        cls[lo:hi] = np.where(
            any_better, CLS_IMPROVABLE, np.where(any_equal, CLS_PLATEAU, CLS_OPTIMUM)
        ).astype(np.uint8)
    return succ, cls


def walk_paths(radices, place, kinds, starts, draws):
    """Uniform random neighbor walks.

    draws is a uint64 matrix [n_walks, length]; step t of walk w moves to
    neighbor number draws[w, t] % degree in canonical slot order. Returns the
    id paths as an int64 matrix [n_walks, length + 1].
    """
    starts = np.asarray(starts, dtype=np.int64)
    n_walks = starts.shape[0]
    length = draws.shape[1]
    slots = _slots(radices, kinds)
    n_cat = sum(1 for _, _, is_grid in slots if not is_grid)
    has_grid = any(is_grid for _, _, is_grid in slots)
    paths = np.empty((n_walks, length + 1), dtype=np.int64)
    cur = starts.copy()
    paths[:, 0] = cur
    for t in range(length):
        if has_grid:
            deg = np.full(n_walks, n_cat, dtype=np.int64)
            for o, delta, is_grid in slots:
                if is_grid:
                    d = (cur // place[o]) % radices[o]
                    nd = d + delta
                    deg += ((nd >= 0) & (nd < radices[o])).astype(np.int64)
        else:
            deg = np.full(n_walks, n_cat, dtype=np.int64)
        j = (draws[:, t] % deg.astype(np.uint64)).astype(np.int64)
        nxt = cur.copy()
        pending = np.ones(n_walks, dtype=bool)
        for o, delta, is_grid in slots:
            if not pending.any():
                break
            p = place[o]
            r = radices[o]
            d = (cur // p) % r
            if is_grid:
                nd = d + delta
                valid = (nd >= 0) & (nd < r)
                nbr = np.where(valid, cur + delta * p, cur)
            else:
                target = (d + delta) % r
                valid = None
                nbr = cur + (target - d) * p
            if valid is None:
                take = pending & (j == 0)
                nxt[take] = nbr[take]
                pending &= ~take
                j -= 1
            else:
                take = pending & valid & (j == 0)
                nxt[take] = nbr[take]
                pending &= ~take
                j -= valid.astype(np.int64)
        cur = nxt
        paths[:, t + 1] = cur
    return paths
