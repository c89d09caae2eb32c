# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.  Semantics and random draw order match ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, fabs, INFINITY
from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t

cnp.import_array()

cdef double _TIE = 1e-9
cdef int DX[4]
cdef int DY[4]
DX[:] = [1, 0, -1, 0]
DY[:] = [0, 1, 0, -1]


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _next(uint64_t* s) nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


cdef inline double _random(uint64_t* s) nogil:
    return (_next(s) >> 11) * (1.0 / 9007199254740992.0)


cdef inline int64_t _below(uint64_t* s, int64_t n) nogil:
    return <int64_t>(_random(s) * n)


cdef void _closest(const double[:, ::1] pts, const double[::1] cum, Py_ssize_t a, Py_ssize_t b,
                   double bx, double by, double* out) nogil:
    cdef double best_d2 = INFINITY
    cdef double x0, y0, vx, vy, seg2, s, ax, ay, d2, seg, arc
    cdef Py_ssize_t k
    out[0] = 0.0
    out[1] = 0.0
    out[2] = 0.0
    out[3] = 0.0
    out[4] = 0.0
    for k in range(a, b - 1):
        x0 = pts[k, 0]
        y0 = pts[k, 1]
        vx = pts[k + 1, 0] - x0
        vy = pts[k + 1, 1] - y0
        seg2 = vx * vx + vy * vy
        s = ((bx - x0) * vx + (by - y0) * vy) / seg2
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
        ax = x0 + s * vx
        ay = y0 + s * vy
        d2 = (bx - ax) * (bx - ax) + (by - ay) * (by - ay)
        seg = sqrt(seg2)
        arc = cum[k] + s * seg
        if d2 < best_d2 - _TIE or (fabs(d2 - best_d2) <= _TIE and arc >= out[4]):
            best_d2 = d2
            out[0] = ax
            out[1] = ay
            out[2] = vx / seg
            out[3] = vy / seg
            out[4] = arc


def closest_point(double[:, ::1] pts, double[::1] cum, double bx, double by):
    cdef double out[5]
    _closest(pts, cum, 0, pts.shape[0], bx, by, out)
    return out[0], out[1], out[2], out[3], out[4]


cdef inline void _quantize(uint64_t* s, double dx, double dy, int* sx, int* sy) nogil:
    cdef double adx = fabs(dx)
    cdef double total = adx + fabs(dy)
    cdef double u = _random(s)
    if u * total < adx:
        sx[0] = 1 if dx > 0 else -1
        sy[0] = 0
    else:
        sx[0] = 0
        sy[0] = 1 if dy > 0 else -1


cdef inline void _wander(uint64_t* s, double p, int* sx, int* sy) nogil:
    cdef int64_t d
    if _random(s) < p:
        d = _below(s, 4)
        sx[0] = DX[d]
        sy[0] = DY[d]
    else:
        sx[0] = 0
        sy[0] = 0


cdef inline bint _is_free(int32_t[:, ::1] occ, int64_t ox, int64_t oy, int64_t x, int64_t y) nogil:
    cdef int64_t r = y - oy
    cdef int64_t c = x - ox
    if r < 0 or c < 0 or r >= occ.shape[0] or c >= occ.shape[1]:
        return False
    return occ[r, c] < 0


cdef bint _resolve(uint64_t* s, int32_t[:, ::1] pos, int32_t[:, ::1] occ, int64_t ox, int64_t oy,
                   Py_ssize_t mover, int dx, int dy, uint8_t* pushed) nogil:
    cdef int64_t x0 = pos[mover, 0]
    cdef int64_t y0 = pos[mover, 1]
    cdef int64_t tx = x0 + dx
    cdef int64_t ty = y0 + dy
    cdef int64_t r = ty - oy
    cdef int64_t c = tx - ox
    cdef int32_t other
    cdef int64_t fx[3]
    cdef int64_t fy[3]
    cdef int nfree = 0
    cdef int e
    cdef int64_t pick
    if r < 0 or c < 0 or r >= occ.shape[0] or c >= occ.shape[1]:
        return False
    other = occ[r, c]
    if other >= 0:
        if pushed != NULL and (pushed[mover] or pushed[other]):
            return False
        for e in range(4):
            if DX[e] == -dx and DY[e] == -dy:
                continue
            if _is_free(occ, ox, oy, tx + DX[e], ty + DY[e]):
                fx[nfree] = tx + DX[e]
                fy[nfree] = ty + DY[e]
                nfree += 1
        if nfree == 0:
            return False
        if nfree == 1:
            pick = 0
        else:
            pick = _below(s, nfree)
        occ[fy[pick] - oy, fx[pick] - ox] = other
        pos[other, 0] = <int32_t>fx[pick]
        pos[other, 1] = <int32_t>fy[pick]
        if pushed != NULL:
            pushed[other] = 1
    occ[y0 - oy, x0 - ox] = -1
    occ[r, c] = <int32_t>mover
    pos[mover, 0] = <int32_t>tx
    pos[mover, 1] = <int32_t>ty
    return True


def resolve_move(uint64_t[::1] state, int32_t[:, ::1] pos, int32_t[:, ::1] occ, int64_t ox, int64_t oy,
                 Py_ssize_t mover, int dx, int dy):
    return bool(_resolve(&state[0], pos, occ, ox, oy, mover, dx, dy, NULL))


def sim_step(uint64_t[::1] state, int32_t[:, ::1] pos, uint8_t[::1] active, int32_t[::1] lane,
             int32_t[:, ::1] occ, int64_t ox, int64_t oy, bounds, double p, double q,
             const double[:, ::1] path_pts, const int64_t[::1] path_off, const double[::1] path_cum,
             const double[::1] w_max):
    cdef Py_ssize_t n = pos.shape[0]
    cdef int64_t x_lo = bounds[0], x_hi = bounds[1], y_lo = bounds[2], y_hi = bounds[3]
    cdef uint64_t s[4]
    cdef Py_ssize_t i, j, m, w, tmp
    cdef int64_t x, y, vx, vy
    cdef int sx, sy, k
    cdef bint fix_x
    cdef double out[5]
    cdef double ddx, ddy
    cdef int remaining = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] order = order_arr
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] pushed_arr = np.zeros(n, dtype=np.uint8)
    cdef uint8_t* pushed = <uint8_t*>pushed_arr.data if n > 0 else NULL

    for i in range(4):
        s[i] = state[i]
    with nogil:
        m = 0
        for i in range(n):
            if active[i]:
                order[m] = i
                m += 1
        for i in range(m - 1, 0, -1):
            j = _below(s, i + 1)
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp

        for i in range(m):
            w = order[i]
            x = pos[w, 0]
            y = pos[w, 1]
            k = lane[w]
            if k < 0:
                vx = x_lo - x if x < x_lo else (x - x_hi if x > x_hi else 0)
                vy = y_lo - y if y < y_lo else (y - y_hi if y > y_hi else 0)
                if vx > 0 or vy > 0:
                    if vx > vy:
                        fix_x = True
                    elif vy > vx:
                        fix_x = False
                    else:
                        fix_x = _random(s) < 0.5
                    if fix_x:
                        sx = 1 if x < x_lo else -1
                        sy = 0
                    else:
                        sx = 0
                        sy = 1 if y < y_lo else -1
                else:
                    _wander(s, p, &sx, &sy)
            else:
                if _random(s) < q:
                    _closest(path_pts, path_cum, path_off[k], path_off[k + 1], <double>x, <double>y, out)
                    ddx = out[0] - x
                    ddy = out[1] - y
                    if sqrt(ddx * ddx + ddy * ddy) > w_max[k]:
                        _quantize(s, ddx, ddy, &sx, &sy)
                    else:
                        _quantize(s, out[2], out[3], &sx, &sy)
                else:
                    _wander(s, p, &sx, &sy)
            if sx != 0 or sy != 0:
                _resolve(s, pos, occ, ox, oy, w, sx, sy, pushed)

        for w in range(n):
            k = lane[w]
            if k < 0 or not active[w]:
                continue
            _closest(path_pts, path_cum, path_off[k], path_off[k + 1], <double>pos[w, 0], <double>pos[w, 1], out)
            if out[4] >= path_cum[path_off[k + 1] - 1] - _TIE:
                active[w] = 0
                occ[pos[w, 1] - oy, pos[w, 0] - ox] = -1
            else:
                remaining += 1
    for i in range(4):
        state[i] = s[i]
    return remaining


def permutation(uint64_t[::1] state, Py_ssize_t n):
    cdef uint64_t s[4]
    cdef Py_ssize_t i, j
    cdef int64_t tmp
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arr = np.arange(n, dtype=np.int64)
    cdef int64_t[::1] perm = arr
    for i in range(4):
        s[i] = state[i]
    for i in range(n - 1, 0, -1):
        j = _below(s, i + 1)
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    for i in range(4):
        state[i] = s[i]
    return arr


def grid_pairs(pos_in, double radius):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pos_arr = np.ascontiguousarray(pos_in, dtype=np.float64)
    cdef double[:, ::1] pos = pos_arr
    cdef Py_ssize_t n = pos.shape[0]
    if n < 2:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    # cells may be coarser than the radius when points are spread very thinly
    cdef double cell_size = radius
    span = max(np.ptp(pos_arr[:, 0]), np.ptp(pos_arr[:, 1]))
    while (span / cell_size + 2) ** 2 > 16 * n + 4096:
        cell_size *= 2.0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cx_arr = np.floor(pos_arr[:, 0] / cell_size).astype(np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cy_arr = np.floor(pos_arr[:, 1] / cell_size).astype(np.int64)
    cdef int64_t[::1] cx = cx_arr
    cdef int64_t[::1] cy = cy_arr
    cdef int64_t x0 = cx_arr.min(), y0 = cy_arr.min()
    cdef int64_t nx = cx_arr.max() - x0 + 1, ny = cy_arr.max() - y0 + 1
    cdef Py_ssize_t i, j, a, b, c, cell, ncell = nx * ny
    # counting sort of points into cells
    cdef cnp.ndarray[cnp.int64_t, ndim=1] start_arr = np.zeros(ncell + 1, dtype=np.int64)
    cdef int64_t[::1] start = start_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] members_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] members = members_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fill_arr
    cdef int64_t[::1] fill
    for i in range(n):
        start[(cy[i] - y0) * nx + (cx[i] - x0) + 1] += 1
    for c in range(ncell):
        start[c + 1] += start[c]
    fill_arr = start_arr[:ncell].copy()
    fill = fill_arr
    for i in range(n):
        cell = (cy[i] - y0) * nx + (cx[i] - x0)
        members[fill[cell]] = i
        fill[cell] += 1

    cdef Py_ssize_t cap = 4 * n + 16, count = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] oi_arr = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] oj_arr = np.empty(cap, dtype=np.int64)
    cdef int64_t[::1] oi = oi_arr
    cdef int64_t[::1] oj = oj_arr
    cdef double r2 = radius * radius, ddx, ddy
    cdef int64_t gx, gy, hx, hy
    cdef int dxc, dyc
    for i in range(n):
        gx = cx[i] - x0
        gy = cy[i] - y0
        for dyc in range(-1, 2):
            hy = gy + dyc
            if hy < 0 or hy >= ny:
                continue
            for dxc in range(-1, 2):
                hx = gx + dxc
                if hx < 0 or hx >= nx:
                    continue
                c = hy * nx + hx
                for a in range(start[c], start[c + 1]):
                    j = members[a]
                    if j <= i:
                        continue
                    ddx = pos[i, 0] - pos[j, 0]
                    ddy = pos[i, 1] - pos[j, 1]
                    if ddx * ddx + ddy * ddy < r2:
                        if count == cap:
                            cap *= 2
                            oi_arr = np.resize(oi_arr, cap)
                            oj_arr = np.resize(oj_arr, cap)
                            oi = oi_arr
                            oj = oj_arr
                        oi[count] = i
                        oj[count] = j
                        count += 1
    key = np.sort(oi_arr[:count] * n + oj_arr[:count])
    return key // n, key % n


def csr_from_pairs(Py_ssize_t m, pi_in, pj_in):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pi_arr = np.ascontiguousarray(pi_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pj_arr = np.ascontiguousarray(pj_in, dtype=np.int64)
    cdef int64_t[::1] pi = pi_arr
    cdef int64_t[::1] pj = pj_arr
    cdef Py_ssize_t npairs = pi.shape[0], e, v
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indptr_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indices_arr = np.empty(2 * npairs, dtype=np.int64)
    cdef int64_t[::1] indptr = indptr_arr
    cdef int64_t[::1] indices = indices_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fill_arr
    cdef int64_t[::1] fill
    with nogil:
        for e in range(npairs):
            indptr[pi[e] + 1] += 1
            indptr[pj[e] + 1] += 1
        for v in range(m):
            indptr[v + 1] += indptr[v]
    fill_arr = indptr_arr[:m].copy()
    fill = fill_arr
    with nogil:
        for e in range(npairs):
            indices[fill[pi[e]]] = pj[e]
            fill[pi[e]] += 1
            indices[fill[pj[e]]] = pi[e]
            fill[pj[e]] += 1
    return indptr_arr, indices_arr


def pair_scores(window_in, pi_in, pj_in, int kind, double horizon):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] win_arr = np.ascontiguousarray(window_in, dtype=np.float64)
    cdef double[:, :, ::1] win = win_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pi_arr = np.ascontiguousarray(pi_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pj_arr = np.ascontiguousarray(pj_in, dtype=np.int64)
    cdef int64_t[::1] pi = pi_arr
    cdef int64_t[::1] pj = pj_arr
    cdef Py_ssize_t npairs = pi.shape[0], W = win.shape[0] - 1, e, t, i, j
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(npairs, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double best, d2, ax, ay, vix, viy, vjx, vjy, dist, proj
    with nogil:
        for e in range(npairs):
            i = pi[e]
            j = pj[e]
            ax = win[W, i, 0] - win[W, j, 0]
            ay = win[W, i, 1] - win[W, j, 1]
            dist = sqrt(ax * ax + ay * ay)
            if kind == 0:
                best = ax * ax + ay * ay
                for t in range(W):
                    ax = win[t, i, 0] - win[t, j, 0]
                    ay = win[t, i, 1] - win[t, j, 1]
                    d2 = ax * ax + ay * ay
                    if d2 > best:
                        best = d2
                out[e] = sqrt(best)
            else:
                vix = (win[W, i, 0] - win[0, i, 0]) / W
                viy = (win[W, i, 1] - win[0, i, 1]) / W
                vjx = (win[W, j, 0] - win[0, j, 0]) / W
                vjy = (win[W, j, 1] - win[0, j, 1]) / W
                if kind == 1:
                    ax = (win[W, i, 0] + horizon * vix) - (win[W, j, 0] + horizon * vjx)
                    ay = (win[W, i, 1] + horizon * viy) - (win[W, j, 1] + horizon * vjy)
                    proj = sqrt(ax * ax + ay * ay)
                else:
                    ax = vix - vjx
                    ay = viy - vjy
                    proj = horizon * sqrt(ax * ax + ay * ay)
                out[e] = dist if dist > proj else proj
    return out_arr


def dbscan(indptr_in, indices_in, Py_ssize_t min_pts, bint include_self, order_in):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indptr_arr = np.ascontiguousarray(indptr_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indices_arr = np.ascontiguousarray(indices_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order_arr = np.ascontiguousarray(order_in, dtype=np.int64)
    cdef int64_t[::1] indptr = indptr_arr
    cdef int64_t[::1] indices = indices_arr
    cdef int64_t[::1] order = order_arr
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels_arr = np.full(n, -2, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] core_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] queue_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef int64_t[::1] labels = labels_arr
    cdef uint8_t[::1] core = core_arr
    cdef int64_t[::1] queue = queue_arr
    cdef Py_ssize_t v, u, w, a, head, tail, idx
    cdef int64_t cluster = 0
    cdef Py_ssize_t offset = 1 if include_self else 0
    with nogil:
        for v in range(n):
            core[v] = (indptr[v + 1] - indptr[v]) + offset >= min_pts
        for idx in range(order.shape[0]):
            v = order[idx]
            if labels[v] != -2:
                continue
            if not core[v]:
                labels[v] = -1
                continue
            labels[v] = cluster
            head = 0
            tail = 0
            queue[tail] = v
            tail += 1
            while head < tail:
                u = queue[head]
                head += 1
                for a in range(indptr[u], indptr[u + 1]):
                    w = indices[a]
                    if labels[w] < 0:
                        labels[w] = cluster
                        if core[w]:
                            queue[tail] = w
                            tail += 1
            cluster += 1
    return labels_arr, core_arr.astype(bool)


def fr_layout(double[:, ::1] pos, ei_in, ej_in, double k, temps_in, double tol, double cutoff):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ei_arr = np.ascontiguousarray(ei_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ej_arr = np.ascontiguousarray(ej_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] temps_arr = np.ascontiguousarray(temps_in, dtype=np.float64)
    cdef int64_t[::1] ei = ei_arr
    cdef int64_t[::1] ej = ej_arr
    cdef double[::1] temps = temps_arr
    cdef Py_ssize_t n = pos.shape[0], ne = ei.shape[0], it, i, j, e
    cdef cnp.ndarray[cnp.float64_t, ndim=2] disp_arr = np.zeros((n, 2), dtype=np.float64)
    cdef double[:, ::1] disp = disp_arr
    cdef double k2 = k * k, dx, dy, d2, f, d, temp, length, capped, last = 0.0
    cdef double cut2 = cutoff * cutoff if cutoff > 0 else INFINITY
    cdef Py_ssize_t done = 0
    with nogil:
        for it in range(temps.shape[0]):
            temp = temps[it]
            for i in range(n):
                disp[i, 0] = 0.0
                disp[i, 1] = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    dx = pos[i, 0] - pos[j, 0]
                    dy = pos[i, 1] - pos[j, 1]
                    d2 = dx * dx + dy * dy
                    if d2 < 1e-18:
                        # coincident nodes: push apart along x, lower index to the left
                        dx = -1e-6
                        dy = 0.0
                        d2 = 1e-12
                    if d2 >= cut2:
                        continue
                    f = k2 / d2
                    disp[i, 0] += dx * f
                    disp[i, 1] += dy * f
                    disp[j, 0] -= dx * f
                    disp[j, 1] -= dy * f
            for e in range(ne):
                i = ei[e]
                j = ej[e]
                dx = pos[i, 0] - pos[j, 0]
                dy = pos[i, 1] - pos[j, 1]
                d = sqrt(dx * dx + dy * dy) / k
                disp[i, 0] -= dx * d
                disp[i, 1] -= dy * d
                disp[j, 0] += dx * d
                disp[j, 1] += dy * d
            last = 0.0
            for i in range(n):
                length = sqrt(disp[i, 0] * disp[i, 0] + disp[i, 1] * disp[i, 1])
                if length > last:
                    last = length
            if last < tol:
                break
            for i in range(n):
                length = sqrt(disp[i, 0] * disp[i, 0] + disp[i, 1] * disp[i, 1])
                if length > 0:
                    capped = length if length < temp else temp
                    pos[i, 0] += disp[i, 0] * (capped / length)
                    pos[i, 1] += disp[i, 1] * (capped / length)
            done += 1
    return done, last
