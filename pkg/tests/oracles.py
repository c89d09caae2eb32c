"""Independent reference implementations used as test oracles.

These are deliberately naive (loops, dicts, no shared code with the package)
so that agreement means something.
"""

import math
from collections import Counter, deque


def brute_neighbours(dist, eps, include_self=False):
    m = len(dist)
    return [[j for j in range(m) if (j != i or include_self) and dist[i][j] < eps] for i in range(m)]


def brute_dbscan(dist, eps, min_pts, include_self=False):
    """Order-free DBSCAN description.

    Returns ``(core, core_components, border_options, noise)`` where
    ``core_components`` is a list of frozensets of core nodes and
    ``border_options[v]`` the set of component indices a border node may join.
    """
    nb = brute_neighbours(dist, eps)
    m = len(dist)
    core = {i for i in range(m) if len(nb[i]) + (1 if include_self else 0) >= min_pts}
    comp_of = {}
    comps = []
    for c in sorted(core):
        if c in comp_of:
            continue
        seen = {c}
        queue = deque([c])
        while queue:
            u = queue.popleft()
            for v in nb[u]:
                if v in core and v not in seen:
                    seen.add(v)
                    queue.append(v)
        for v in seen:
            comp_of[v] = len(comps)
        comps.append(frozenset(seen))
    border, noise = {}, set()
    for v in range(m):
        if v in core:
            continue
        opts = {comp_of[u] for u in nb[v] if u in core}
        if opts:
            border[v] = opts
        else:
            noise.add(v)
    return core, comps, border, noise


def entropy_nmi(a, b):
    """NMI_sqrt from explicit counts with math.log."""
    n = len(a)
    ca, cb, cab = Counter(a), Counter(b), Counter(zip(a, b))
    ha = -sum(c / n * math.log(c / n) for c in ca.values())
    hb = -sum(c / n * math.log(c / n) for c in cb.values())
    if ha == 0 or hb == 0:
        return 1.0 if ha == hb else 0.0
    mi = 0.0
    for (x, y), c in cab.items():
        mi += c / n * math.log((c / n) / ((ca[x] / n) * (cb[y] / n)))
    return max(0.0, min(1.0, mi / math.sqrt(ha * hb)))


def dense_closest(points, b, step=1e-3):
    """Closest point on a polyline by sampling every ``step`` along each segment."""
    best = None
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        seg = math.hypot(x1 - x0, y1 - y0)
        k = max(1, int(seg / step))
        for s in range(k + 1):
            u = s / k
            x, y = x0 + u * (x1 - x0), y0 + u * (y1 - y0)
            d = math.hypot(x - b[0], y - b[1])
            if best is None or d < best[0]:
                best = (d, x, y)
    return best


def bfs_distances(adj, src):
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def brute_edges(frame, radius):
    """Strict-radius pairs (i < j) from a list of (x, y) tuples."""
    out = []
    for i in range(len(frame)):
        for j in range(i + 1, len(frame)):
            if math.hypot(frame[i][0] - frame[j][0], frame[i][1] - frame[j][1]) < radius:
                out.append((i, j))
    return out
