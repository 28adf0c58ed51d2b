"""Pure-Python/numpy implementations of the hot kernels.

Same algorithms and same outputs as the compiled ``_kernels`` extension;
selected automatically when the extension is not built.
"""
import numpy as np

from ._predicates import incircle, orient2d


def bowyer_watson(x, y, order):
    """Incremental Delaunay triangulation by cavity re-triangulation.

    ``x, y`` hold ``n`` input points followed by three enclosing super
    vertices; ``order`` is the insertion order of the input points.
    Returns the counter-clockwise triangles that avoid the super vertices.
    Points coinciding exactly with an earlier point are skipped.
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n = len(x) - 3
    tv = [[n, n + 1, n + 2]]
    tn = [[-1, -1, -1]]
    alive = [True]
    free = []
    mark = [-1]
    start_of = [-1] * (n + 3)
    end_of = [-1] * (n + 3)
    last = 0

    for step, p in enumerate(order):
        p = int(p)
        px, py = x[p], y[p]
        # visibility walk
        t = last
        while True:
            v = tv[t]
            for i in range(3):
                a, b = v[(i + 1) % 3], v[(i + 2) % 3]
                if orient2d(x[a], y[a], x[b], y[b], px, py) < 0:
                    t = tn[t][i]
                    break
            else:
                break
        v = tv[t]
        if any(x[q] == px and y[q] == py for q in v):
            continue

        # cavity: triangles whose circumcircle strictly contains p
        mark[t] = step
        cavity = [t]
        stack = [t]
        boundary = []
        while stack:
            c = stack.pop()
            vc = tv[c]
            for i in range(3):
                nb = tn[c][i]
                a, b = vc[(i + 1) % 3], vc[(i + 2) % 3]
                if nb >= 0 and mark[nb] == step:
                    continue
                if nb >= 0:
                    w = tv[nb]
                    if incircle(x[w[0]], y[w[0]], x[w[1]], y[w[1]], x[w[2]], y[w[2]], px, py) > 0:
                        mark[nb] = step
                        cavity.append(nb)
                        stack.append(nb)
                        continue
                boundary.append((a, b, nb))

        for c in cavity:
            alive[c] = False
            free.append(c)

        created = []
        for a, b, nb in boundary:
            if free:
                t = free.pop()
                tv[t] = [a, b, p]
                tn[t] = [-1, -1, nb]
                alive[t] = True
            else:
                t = len(tv)
                tv.append([a, b, p])
                tn.append([-1, -1, nb])
                alive.append(True)
                mark.append(-1)
            if nb >= 0:
                w = tv[nb]
                for j in range(3):
                    if w[(j + 1) % 3] == b and w[(j + 2) % 3] == a:
                        tn[nb][j] = t
                        break
            start_of[a] = t
            end_of[b] = t
            created.append(t)
        for t in created:
            a, b, _ = tv[t]
            tn[t][0] = start_of[b]
            tn[t][1] = end_of[a]
        last = created[-1]

    out = [tv[t] for t in range(len(tv)) if alive[t] and max(tv[t]) < n]
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def path_gain_sums(pos, pts, fades, alpha):
    """``sum_i fades[v, i] * |pos[v] - pts[i]| ** -alpha`` for every row ``v``."""
    pos = np.asarray(pos, dtype=float)
    pts = np.asarray(pts, dtype=float)
    d2 = (pos[:, 0, None] - pts[None, :, 0]) ** 2 + (pos[:, 1, None] - pts[None, :, 1]) ** 2
    if alpha == 4.0:
        gain = 1.0 / (d2 * d2)
    else:
        gain = d2 ** (-0.5 * alpha)
    return np.einsum("ij,ij->i", fades, gain)
