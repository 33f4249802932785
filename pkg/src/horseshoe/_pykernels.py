"""Pure numpy versions of the compiled kernels (same signatures)."""

import numpy as np


def _chunk_boxes(pts, chunk):
    nseg = len(pts) - 1
    nc = (nseg + chunk - 1) // chunk
    # each chunk covers points [c*chunk, c*chunk + chunk] inclusive
    idx = np.minimum(np.arange(nc)[:, None] * chunk + np.arange(chunk + 1)[None, :], nseg)
    xs, ys = pts[idx, 0], pts[idx, 1]
    return np.stack([xs.min(1), xs.max(1), ys.min(1), ys.max(1)], axis=1)


def segment_crossings(A, B, chunk=64):
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    na, nb = len(A) - 1, len(B) - 1
    if na < 1 or nb < 1:
        e = np.empty(0, dtype=np.intp)
        return e, e.copy(), np.empty(0), np.empty(0)
    ba, bb = _chunk_boxes(A, chunk), _chunk_boxes(B, chunk)
    hit = ((ba[:, None, 1] >= bb[None, :, 0]) & (bb[None, :, 1] >= ba[:, None, 0]) &
           (ba[:, None, 3] >= bb[None, :, 2]) & (bb[None, :, 3] >= ba[:, None, 2]))
    out = []
    for p, q in zip(*np.nonzero(hit)):
        i = np.arange(p * chunk, min((p + 1) * chunk, na))
        j = np.arange(q * chunk, min((q + 1) * chunk, nb))
        P, R = A[i], A[i + 1] - A[i]
        Q, S = B[j], B[j + 1] - B[j]
        den = R[:, None, 0] * S[None, :, 1] - R[:, None, 1] * S[None, :, 0]
        wx = Q[None, :, 0] - P[:, None, 0]
        wy = Q[None, :, 1] - P[:, None, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (wx * S[None, :, 1] - wy * S[None, :, 0]) / den
            u = (wx * R[:, None, 1] - wy * R[:, None, 0]) / den
        ok = (den != 0) & (t >= 0) & (t < 1) & (u >= 0) & (u < 1)
        ii, jj = np.nonzero(ok)
        if len(ii):
            out.append((i[ii], j[jj], t[ii, jj], u[ii, jj]))
    if not out:
        e = np.empty(0, dtype=np.intp)
        return e, e.copy(), np.empty(0), np.empty(0)
    # by segment of A, then of B; the compiled loop may order B differently within one A segment
    i, j, t, u = (np.concatenate(c) for c in zip(*out))
    o = np.lexsort((j, i))
    return i[o].astype(np.intp), j[o].astype(np.intp), t[o], u[o]


def iterate_orbits(x, y, a, b, n, inverse=False):
    xi, yi = x.copy(), y.copy()
    # escaping orbits overflow to inf/nan, as in the compiled loop
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if inverse:
            for _ in range(n):
                xi, yi = yi, (yi * yi - a - xi) / b
        else:
            for _ in range(n):
                xi, yi = xi * xi - a - b * yi, xi
    x[:] = xi
    y[:] = yi
