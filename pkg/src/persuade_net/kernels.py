"""Hot inner loops.

Every kernel exists twice: a ``*_loop`` form written as explicit loops and
compiled with numba, and a ``*_numpy`` form that vectorises the same
computation.  The unsuffixed names dispatch on :data:`persuade_net._accel.BACKEND`.
Both forms must agree; ``tests/test_kernels.py`` cross-checks them and
``benchmarks/bench_kernels.py`` times them.
"""
import numpy as np

from ._accel import USE_NUMBA, njit, prange

# ---------------------------------------------------------------------------
# maximal independent sets over bitmasks
# ---------------------------------------------------------------------------


@njit
def maximal_independent_masks_loop(nbr, n):
    """Bitmasks of all maximal independent sets.

    ``nbr[i]`` is the open-neighbourhood bitmask of node ``i``.  A mask ``s`` is
    kept when no member has a neighbour inside ``s`` and every non-member has one.
    """
    total = np.int64(1) << n
    out = np.empty(64, np.int64)
    count = 0
    for s in range(total):
        ok = True
        for i in range(n):
            hit = nbr[i] & s
            if (s >> i) & 1:
                if hit != 0:
                    ok = False
                    break
            elif hit == 0:
                ok = False
                break
        if ok:
            if count == out.shape[0]:
                grown = np.empty(2 * count, np.int64)
                grown[:count] = out
                out = grown
            out[count] = s
            count += 1
    return out[:count].copy()


def maximal_independent_masks_numpy(nbr, n):
    s = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(s.shape, dtype=bool)
    for i in range(n):
        inside = ((s >> i) & 1).astype(bool)
        hit = (s & nbr[i]) != 0
        ok &= np.where(inside, ~hit, hit)
    return s[ok]


# ---------------------------------------------------------------------------
# LCP support enumeration
# ---------------------------------------------------------------------------


@njit
def _solve_support(m, idx, k, e, pivot_tol, a, x):
    # Gaussian elimination with partial pivoting on (A+I)[T,T] x = e*1.
    for r in range(k):
        for c in range(k):
            a[r, c] = m[idx[r], idx[c]]
        a[r, k] = e
    for col in range(k):
        piv = col
        best = abs(a[col, col])
        for r in range(col + 1, k):
            v = abs(a[r, col])
            if v > best:
                best = v
                piv = r
        if best < pivot_tol:
            return False
        if piv != col:
            for c in range(col, k + 1):
                tmp = a[col, c]
                a[col, c] = a[piv, c]
                a[piv, c] = tmp
        for r in range(col + 1, k):
            f = a[r, col] / a[col, col]
            if f != 0.0:
                for c in range(col, k + 1):
                    a[r, c] -= f * a[col, c]
    for r in range(k - 1, -1, -1):
        acc = a[r, k]
        for c in range(r + 1, k):
            acc -= a[r, c] * x[c]
        x[r] = acc / a[r, r]
    return True


@njit
def support_equilibria_loop(m, e, pivot_tol, pos_tol, cover_tol):
    """Enumerate LCP solutions support by support.

    Returns ``(profiles, masks, singular_masks)``: accepted profiles in
    increasing support-mask order, their masks, and the masks whose principal
    submatrix was singular (skipped).
    """
    n = m.shape[0]
    total = np.int64(1) << n
    out = np.empty((16, n))
    out_mask = np.empty(16, np.int64)
    count = 0
    sing = np.empty(16, np.int64)
    nsing = 0
    idx = np.empty(n, np.int64)
    a = np.empty((n, n + 1))
    xs = np.empty(n)
    full = np.empty(n)
    for s in range(1, total):
        k = 0
        for i in range(n):
            if (s >> i) & 1:
                idx[k] = i
                k += 1
        if not _solve_support(m, idx, k, e, pivot_tol, a, xs):
            if nsing == sing.shape[0]:
                grown = np.empty(2 * nsing, np.int64)
                grown[:nsing] = sing
                sing = grown
            sing[nsing] = s
            nsing += 1
            continue
        ok = True
        for r in range(k):
            if xs[r] <= pos_tol:
                ok = False
                break
        if not ok:
            continue
        for i in range(n):
            full[i] = 0.0
        for r in range(k):
            full[idx[r]] = xs[r]
        for i in range(n):
            if (s >> i) & 1:
                continue
            acc = 0.0
            for j in range(n):
                acc += m[i, j] * full[j]
            if acc < e - cover_tol:
                ok = False
                break
        if not ok:
            continue
        if count == out.shape[0]:
            grown2 = np.empty((2 * count, n))
            grown2[:count] = out
            out = grown2
            grown3 = np.empty(2 * count, np.int64)
            grown3[:count] = out_mask
            out_mask = grown3
        out[count] = full
        out_mask[count] = s
        count += 1
    return out[:count].copy(), out_mask[:count].copy(), sing[:nsing].copy()


def support_equilibria_numpy(m, e, pivot_tol, pos_tol, cover_tol):
    n = m.shape[0]
    masks = np.arange(1, 1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    sizes = bits.sum(axis=1)
    found_x, found_mask, singular = [], [], []
    for k in range(1, n + 1):
        sel = sizes == k
        kmasks = masks[sel]
        idx = np.nonzero(bits[sel])[1].reshape(-1, k)
        sub = m[idx[:, :, None], idx[:, None, :]]
        sv = np.linalg.svd(sub, compute_uv=False)
        is_sing = sv[:, -1] < pivot_tol * np.maximum(sv[:, 0], 1.0)
        singular.append(kmasks[is_sing])
        good = ~is_sing
        if not good.any():
            continue
        rhs = np.full((int(good.sum()), k, 1), e)
        xs = np.linalg.solve(sub[good], rhs)[..., 0]
        pos = (xs > pos_tol).all(axis=1)
        xs, gidx, gmask = xs[pos], idx[good][pos], kmasks[good][pos]
        full = np.zeros((len(xs), n))
        np.put_along_axis(full, gidx, xs, axis=1)
        cover = full @ m.T
        inside = bits[gmask - 1]
        ok = np.where(inside, True, cover >= e - cover_tol).all(axis=1)
        found_x.append(full[ok])
        found_mask.append(gmask[ok])
    if found_x:
        xs = np.concatenate(found_x)
        ms = np.concatenate(found_mask)
    else:
        xs, ms = np.empty((0, n)), np.empty(0, np.int64)
    order = np.argsort(ms, kind="stable")
    sing = np.sort(np.concatenate(singular)) if singular else np.empty(0, np.int64)
    return xs[order], ms[order], sing


# ---------------------------------------------------------------------------
# upper concave hull of a sampled function
# ---------------------------------------------------------------------------


@njit
def upper_hull_loop(x, y):
    """Indices of the upper hull vertices of points sorted by strictly increasing ``x``.

    Andrew's monotone chain; collinear interior points are dropped.
    """
    n = x.shape[0]
    hull = np.empty(n, np.int64)
    h = 0
    for i in range(n):
        while h >= 2:
            o = hull[h - 2]
            b = hull[h - 1]
            cross = (x[b] - x[o]) * (y[i] - y[o]) - (y[b] - y[o]) * (x[i] - x[o])
            if cross >= 0.0:
                h -= 1
            else:
                break
        hull[h] = i
        h += 1
    return hull[:h].copy()


def upper_hull_numpy(x, y):
    # Repeatedly drop every point on or below the chord of its current neighbours.
    keep = np.arange(len(x))
    while len(keep) > 2:
        xo, xb, xi = x[keep[:-2]], x[keep[1:-1]], x[keep[2:]]
        yo, yb, yi = y[keep[:-2]], y[keep[1:-1]], y[keep[2:]]
        cross = (xb - xo) * (yi - yo) - (yb - yo) * (xi - xo)
        drop = cross >= 0.0
        if not drop.any():
            break
        mask = np.ones(len(keep), dtype=bool)
        mask[1:-1] = ~drop
        keep = keep[mask]
    return keep


# ---------------------------------------------------------------------------
# expected objective over a (p_l, p_h) policy grid
# ---------------------------------------------------------------------------


@njit
def _interp1(t, grid, values):
    # np.interp for one point; the guess is exact on a uniform grid and
    # off by a few cells after the prior is inserted
    n = grid.shape[0]
    if t <= grid[0]:
        return values[0]
    if t >= grid[n - 1]:
        return values[n - 1]
    lo = int((t - grid[0]) / (grid[n - 1] - grid[0]) * (n - 1))
    if lo > n - 2:
        lo = n - 2
    while lo > 0 and grid[lo] > t:
        lo -= 1
    while grid[lo + 1] <= t and lo < n - 2:
        lo += 1
    hi = lo + 1
    w = (t - grid[lo]) / (grid[hi] - grid[lo])
    return values[lo] + w * (values[hi] - values[lo])


@njit(parallel=True)
def policy_sweep_loop(p_l, p_h, mu0, grid, values):
    """``out[i, j]`` = expected objective of policy ``(p_l[i], p_h[j])``.

    The objective is read off ``(grid, values)`` by linear interpolation.
    """
    nl = p_l.shape[0]
    nh = p_h.shape[0]
    out = np.zeros((nl, nh))
    for i in prange(nl):
        for j in range(nh):
            sig_h = mu0 * p_h[j] + (1.0 - mu0) * (1.0 - p_l[i])
            sig_l = mu0 * (1.0 - p_h[j]) + (1.0 - mu0) * p_l[i]
            acc = 0.0
            if sig_h > 0.0:
                acc += sig_h * _interp1(mu0 * p_h[j] / sig_h, grid, values)
            if sig_l > 0.0:
                acc += sig_l * _interp1(mu0 * (1.0 - p_h[j]) / sig_l, grid, values)
            out[i, j] = acc
    return out


def policy_sweep_numpy(p_l, p_h, mu0, grid, values):
    pl = p_l[:, None]
    ph = p_h[None, :]
    joint_h = mu0 * ph + np.zeros_like(pl)
    joint_l = mu0 * (1.0 - ph) + np.zeros_like(pl)
    sig_h = joint_h + (1.0 - mu0) * (1.0 - pl)
    sig_l = joint_l + (1.0 - mu0) * pl
    out = np.zeros(np.broadcast_shapes(pl.shape, ph.shape))
    with np.errstate(invalid="ignore", divide="ignore"):
        for joint, sig in ((joint_h, sig_h), (joint_l, sig_l)):
            live = sig > 0.0
            post = np.where(live, joint / np.where(live, sig, 1.0), 0.0)
            out += np.where(live, sig * np.interp(post, grid, values), 0.0)
    return out


if USE_NUMBA:
    maximal_independent_masks = maximal_independent_masks_loop
    support_equilibria = support_equilibria_loop
    upper_hull = upper_hull_loop
    policy_sweep = policy_sweep_loop
else:
    maximal_independent_masks = maximal_independent_masks_numpy
    support_equilibria = support_equilibria_numpy
    upper_hull = upper_hull_numpy
    policy_sweep = policy_sweep_numpy
