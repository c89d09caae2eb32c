"""Pure-Python reference kernels.

These mirror ``_kernels.pyx`` operation for operation (including the order of
random draws), so either backend produces identical results.  They are used
when the compiled extension is unavailable or ``CROWDLANES_PURE=1`` is set.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import PortableRNG

# cardinal directions in draw order: east, north, west, south
DIRECTIONS = ((1, 0), (0, 1), (-1, 0), (0, -1))

_TIE = 1e-9


class _StateRNG(PortableRNG):
    def __init__(self, state):
        self._s = [int(v) for v in state]


def closest_point(pts, cum, bx, by):
    """Closest point on a polyline to ``(bx, by)``.

    ``pts`` is an (m, 2) array of vertices and ``cum`` the arc length at each
    vertex.  Returns ``(ax, ay, tx, ty, arc)``; ties go to the larger arc.
    """
    best_d2 = math.inf
    best = (0.0, 0.0, 0.0, 0.0, 0.0)
    for k in range(len(pts) - 1):
        x0, y0 = pts[k]
        vx = pts[k + 1][0] - x0
        vy = pts[k + 1][1] - y0
        seg2 = vx * vx + vy * vy
        s = ((bx - x0) * vx + (by - y0) * vy) / seg2
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
        ax = x0 + s * vx
        ay = y0 + s * vy
        d2 = (bx - ax) ** 2 + (by - ay) ** 2
        seg = math.sqrt(seg2)
        arc = cum[k] + s * seg
        if d2 < best_d2 - _TIE or (abs(d2 - best_d2) <= _TIE and arc >= best[4]):
            best_d2 = d2
            best = (ax, ay, vx / seg, vy / seg, arc)
    return best


def quantize(dx, dy, rng):
    """Pick one cardinal step: horizontal with probability |dx|/(|dx|+|dy|)."""
    adx = abs(dx)
    total = adx + abs(dy)
    u = rng.random()
    if u * total < adx:
        return (1 if dx > 0 else -1), 0
    return 0, (1 if dy > 0 else -1)


def wander(p, rng):
    """Stay with probability 1-p, otherwise a uniform cardinal step."""
    if rng.random() < p:
        return DIRECTIONS[rng.below(4)]
    return 0, 0


def random_intent(x, y, bounds, p, rng):
    """Step for a random walker; ``bounds`` are inclusive cell bounds of its region."""
    x_lo, x_hi, y_lo, y_hi = bounds
    vx = x_lo - x if x < x_lo else (x - x_hi if x > x_hi else 0)
    vy = y_lo - y if y < y_lo else (y - y_hi if y > y_hi else 0)
    if vx > 0 or vy > 0:
        if vx > vy:
            fix_x = True
        elif vy > vx:
            fix_x = False
        else:
            fix_x = rng.random() < 0.5
        if fix_x:
            return (1 if x < x_lo else -1), 0
        return 0, (1 if y < y_lo else -1)
    return wander(p, rng)


def lane_intent(x, y, pts, cum, w_max, p, q, rng):
    """Step for a lane walker following the polyline ``pts``."""
    if rng.random() < q:
        ax, ay, tx, ty, _ = closest_point(pts, cum, float(x), float(y))
        dx = ax - x
        dy = ay - y
        if math.sqrt(dx * dx + dy * dy) > w_max:
            return quantize(dx, dy, rng)
        return quantize(tx, ty, rng)
    return wander(p, rng)


def _free(occ, ox, oy, x, y):
    r = y - oy
    c = x - ox
    if r < 0 or c < 0 or r >= occ.shape[0] or c >= occ.shape[1]:
        return False
    return occ[r, c] < 0


def _resolve(pos, occ, ox, oy, mover, dx, dy, rng, pushed=None):
    # ``pushed`` marks walkers displaced earlier in the timestep: they can
    # neither push nor be pushed again until the next timestep
    x0 = int(pos[mover, 0])
    y0 = int(pos[mover, 1])
    tx = x0 + dx
    ty = y0 + dy
    r = ty - oy
    c = tx - ox
    if r < 0 or c < 0 or r >= occ.shape[0] or c >= occ.shape[1]:
        return False
    other = occ[r, c]
    if other >= 0:
        if pushed is not None and (pushed[mover] or pushed[other]):
            return False
        free = []
        for ex, ey in DIRECTIONS:
            if ex == -dx and ey == -dy:
                continue  # the mover's own cell
            if _free(occ, ox, oy, tx + ex, ty + ey):
                free.append((tx + ex, ty + ey))
        if not free:
            return False
        if len(free) == 1:
            px, py = free[0]
        else:
            px, py = free[rng.below(len(free))]
        occ[py - oy, px - ox] = other
        pos[other, 0] = px
        pos[other, 1] = py
        if pushed is not None:
            pushed[other] = True
    occ[y0 - oy, x0 - ox] = -1
    occ[r, c] = mover
    pos[mover, 0] = tx
    pos[mover, 1] = ty
    return True


def resolve_move(state, pos, occ, ox, oy, mover, dx, dy):
    """Move walker ``mover`` by one cardinal step, pushing a blocker if needed.

    Returns True when the mover ends up on the target cell.
    """
    rng = _StateRNG(state)
    moved = _resolve(pos, occ, ox, oy, mover, dx, dy, rng)
    state[:] = rng.state_array()
    return moved


def sim_step(state, pos, active, lane, occ, ox, oy, bounds, p, q,
             path_pts, path_off, path_cum, w_max):
    """Advance the whole population by one timestep, in place.

    Walkers act sequentially in a fresh random order.  Lane walkers that reach
    the end of their path are deactivated and leave the occupancy grid.
    Returns the number of lane walkers still active.
    """
    rng = _StateRNG(state)
    n = pos.shape[0]
    order = [i for i in range(n) if active[i]]
    for i in range(len(order) - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]

    paths = []
    for k in range(len(path_off) - 1):
        a, b = int(path_off[k]), int(path_off[k + 1])
        paths.append((path_pts[a:b].tolist(), path_cum[a:b].tolist()))

    pushed = [False] * n
    for w in order:
        x = int(pos[w, 0])
        y = int(pos[w, 1])
        k = lane[w]
        if k < 0:
            dx, dy = random_intent(x, y, bounds, p, rng)
        else:
            pts, cum = paths[k]
            dx, dy = lane_intent(x, y, pts, cum, w_max[k], p, q, rng)
        if dx or dy:
            _resolve(pos, occ, ox, oy, w, dx, dy, rng, pushed)

    remaining = 0
    for w in range(n):
        k = lane[w]
        if k < 0 or not active[w]:
            continue
        pts, cum = paths[k]
        arc = closest_point(pts, cum, float(pos[w, 0]), float(pos[w, 1]))[4]
        if arc >= cum[-1] - _TIE:
            active[w] = 0
            occ[pos[w, 1] - oy, pos[w, 0] - ox] = -1
        else:
            remaining += 1
    state[:] = rng.state_array()
    return remaining


def permutation(state, n):
    rng = _StateRNG(state)
    perm = rng.permutation(n)
    state[:] = rng.state_array()
    return np.asarray(perm, dtype=np.int64)


_HALF_NEIGHBOURS = ((0, 0), (1, -1), (1, 0), (1, 1), (0, 1))


def grid_pairs(pos, radius):
    """All pairs ``i < j`` with Euclidean distance strictly below ``radius``.

    Points are binned on a uniform grid with cell size ``radius``; returns two
    int64 arrays sorted by ``(i, j)``.
    """
    pos = np.asarray(pos, dtype=np.float64)
    n = len(pos)
    if n < 2:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    cells = np.floor(pos / radius).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for idx, (cx, cy) in enumerate(cells.tolist()):
        buckets.setdefault((cx, cy), []).append(idx)
    r2 = radius * radius
    out_i, out_j = [], []
    for (cx, cy), members in buckets.items():
        a = np.asarray(members)
        for ox, oy in _HALF_NEIGHBOURS:
            other = buckets.get((cx + ox, cy + oy))
            if other is None:
                continue
            b = np.asarray(other)
            diff = pos[a][:, None, :] - pos[b][None, :, :]
            d2 = (diff ** 2).sum(axis=2)
            hit = d2 < r2
            if ox == 0 and oy == 0:
                hit &= a[:, None] < b[None, :]
            ii, jj = np.nonzero(hit)
            if len(ii):
                gi, gj = a[ii], b[jj]
                out_i.append(np.minimum(gi, gj))
                out_j.append(np.maximum(gi, gj))
    if not out_i:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    key = np.sort(np.concatenate(out_i).astype(np.int64) * n + np.concatenate(out_j))
    return key // n, key % n


def csr_from_pairs(m, pi, pj):
    """Symmetric CSR adjacency from pairs ``i < j``; neighbours in pair order."""
    pi = np.asarray(pi, dtype=np.int64)
    pj = np.asarray(pj, dtype=np.int64)
    src = np.empty(2 * len(pi), dtype=np.int64)
    dst = np.empty(2 * len(pi), dtype=np.int64)
    src[0::2], src[1::2] = pi, pj
    dst[0::2], dst[1::2] = pj, pi
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=m), out=indptr[1:])
    return indptr, dst[order]


SCORE_KINDS = {"A": 0, "B": 1, "C": 2}


def pair_scores(window, pi, pj, kind, horizon):
    """Similarity scores for node pairs over a position window.

    ``window`` has shape (W+1, m, 2) ordered oldest to newest.
    """
    window = np.asarray(window, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.int64)
    pj = np.asarray(pj, dtype=np.int64)
    w = window.shape[0] - 1
    now = window[-1]
    if kind == 0:
        out = np.empty(len(pi))
        step = 4096
        for s in range(0, len(pi), step):
            a = window[:, pi[s:s + step]]
            b = window[:, pj[s:s + step]]
            out[s:s + step] = np.sqrt(((a - b) ** 2).sum(axis=2)).max(axis=0)
        return out
    vel = (now - window[0]) / w
    dist = np.sqrt(((now[pi] - now[pj]) ** 2).sum(axis=1))
    if kind == 1:
        fut = now + horizon * vel
        proj = np.sqrt(((fut[pi] - fut[pj]) ** 2).sum(axis=1))
    else:
        proj = horizon * np.sqrt(((vel[pi] - vel[pj]) ** 2).sum(axis=1))
    return np.maximum(dist, proj)


def dbscan(indptr, indices, min_pts, include_self, order):
    """DBSCAN over a CSR neighbour structure (self excluded from ``indices``).

    Returns ``(labels, core)`` where noise is -1 and clusters count from 0 in
    order of discovery.
    """
    n = len(indptr) - 1
    offset = 1 if include_self else 0
    core = [(indptr[v + 1] - indptr[v]) + offset >= min_pts for v in range(n)]
    labels = [-2] * n  # -2 unvisited, -1 noise
    cluster = 0
    for v in order:
        v = int(v)
        if labels[v] != -2:
            continue
        if not core[v]:
            labels[v] = -1
            continue
        labels[v] = cluster
        queue = [v]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for w in indices[indptr[u]:indptr[u + 1]]:
                w = int(w)
                if labels[w] < 0:
                    labels[w] = cluster
                    if core[w]:
                        queue.append(w)
        cluster += 1
    return np.asarray(labels, dtype=np.int64), np.asarray(core, dtype=bool)


def fr_layout(pos, ei, ej, k, temps, tol, cutoff):
    """Fruchterman-Reingold iterations on ``pos`` in place.

    ``temps`` gives the displacement cap per iteration.  Iteration stops,
    without moving, once the largest net force (the uncapped displacement)
    drops below ``tol``.  A positive ``cutoff`` ignores repulsion between
    nodes farther apart than it.  Returns ``(iterations_applied, last_max_force)``.
    """
    n = pos.shape[0]
    k2 = k * k
    last = 0.0
    done = 0
    idx = np.arange(n)
    for temp in temps:
        disp = np.zeros((n, 2))
        step = max(1, 4_000_000 // max(n, 1))
        for s in range(0, n, step):
            delta = pos[s:s + step, None, :] - pos[None, :, :]
            d2 = (delta ** 2).sum(axis=2)
            rows = idx[s:s + step]
            same = d2 < 1e-18
            same[np.arange(len(rows)), rows] = False
            if same.any():
                r, c = np.nonzero(same)
                sign = np.where(rows[r] > c, 1.0, -1.0)
                delta[r, c, 0] = sign * 1e-6
                delta[r, c, 1] = 0.0
                d2[r, c] = 1e-12
            d2[np.arange(len(rows)), rows] = np.inf
            if cutoff > 0:
                d2[d2 >= cutoff * cutoff] = np.inf
            disp[s:s + step] += (delta * (k2 / d2)[:, :, None]).sum(axis=1)
        if len(ei):
            delta = pos[ei] - pos[ej]
            d = np.sqrt((delta ** 2).sum(axis=1))
            f = delta * (d / k)[:, None]
            np.subtract.at(disp, ei, f)
            np.add.at(disp, ej, f)
        length = np.sqrt((disp ** 2).sum(axis=1))
        last = float(length.max()) if n else 0.0
        if last < tol:
            break
        capped = np.minimum(length, temp)
        scale = np.where(length > 0, capped / np.where(length > 0, length, 1.0), 0.0)
        pos += disp * scale[:, None]
        done += 1
    return done, last
