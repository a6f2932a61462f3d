"""Hot inner loops.

Every function here is compiled with numba unless ``WIGNERWALKS_NUMBA=0``.
They take and return plain numpy arrays; the typed wrappers live in the
owning modules.
"""

from __future__ import annotations

import numpy as np

from ._accel import njit


@njit
def dyck_scan(s, out, hist):
    """Depth-first scan of all Dyck paths of ``2s`` steps.

    Up-steps are tried before down-steps, so rows come out in the canonical
    order.  When ``out`` has rows they receive the paths; ``hist[h]`` counts
    paths whose maximum height is ``h``.  Returns the number of paths.
    """
    n = 2 * s
    opt = np.zeros(n + 1, np.int64)
    height = np.zeros(n + 1, np.int64)
    top = np.zeros(n + 1, np.int64)
    path = np.zeros(max(n, 1), np.uint8)
    fill = out.shape[0] > 0
    count = 0
    pos = 0
    while pos >= 0:
        if pos == n:
            if fill:
                for j in range(n):
                    out[count, j] = path[j]
            hist[top[n]] += 1
            count += 1
            pos -= 1
            continue
        o = opt[pos]
        if o == 0:
            opt[pos] = 1
            ups = (pos + height[pos]) // 2
            if ups < s:
                path[pos] = 1
                height[pos + 1] = height[pos] + 1
                top[pos + 1] = max(top[pos], height[pos + 1])
                opt[pos + 1] = 0
                pos += 1
        elif o == 1:
            opt[pos] = 2
            if height[pos] > 0:
                path[pos] = 0
                height[pos + 1] = height[pos] - 1
                top[pos + 1] = top[pos]
                opt[pos + 1] = 0
                pos += 1
        else:
            pos -= 1
    return count


@njit
def even_walk_scan(s, prefix, out):
    """Depth-first scan of minimal even closed walks of ``2s`` steps.

    ``prefix`` pins ``w(1..len(prefix))``; pass an empty array for the full
    set.  Labels are tried in increasing order so rows are lexicographic.
    The number of odd edges equals the Dyck height of the marked sequence,
    which lets one counter enforce both the Dyck-prefix and the parity
    feasibility prunes.  Returns the number of walks; rows are written to
    ``out`` when it has any.
    """
    n = 2 * s
    maxv = s + 1
    fill = out.shape[0] > 0
    plen = prefix.shape[0]
    if n == 0:
        if fill:
            out[0, 0] = 1
        return 1
    par = np.zeros((maxv + 2, maxv + 2), np.uint8)
    w = np.zeros(n + 1, np.int64)
    k = np.zeros(n + 1, np.int64)
    h = np.zeros(n + 1, np.int64)
    nxt = np.ones(n + 1, np.int64)
    w[0] = 1
    k[0] = 1
    count = 0
    t = 0
    while t >= 0:
        if t == n:
            if h[n] == 0:
                if fill:
                    for j in range(n + 1):
                        out[count, j] = w[j]
                count += 1
            t -= 1
            a = w[t]
            b = w[t + 1]
            par[a, b] ^= 1
            par[b, a] = par[a, b]
            continue
        lim = k[t] + 1 if k[t] < maxv else k[t]
        lo = 1
        hi = lim
        if t < plen:
            lo = prefix[t]
            hi = min(prefix[t], lim)
        v = nxt[t]
        if v < lo:
            v = lo
        if v > hi:
            nxt[t] = 1
            t -= 1
            if t >= 0:
                a = w[t]
                b = w[t + 1]
                par[a, b] ^= 1
                par[b, a] = par[a, b]
            continue
        nxt[t] = v + 1
        a = w[t]
        if par[a, v] == 0:
            newh = h[t] + 1
        else:
            newh = h[t] - 1
        if newh > n - (t + 1):
            continue
        par[a, v] ^= 1
        par[v, a] = par[a, v]
        w[t + 1] = v
        k[t + 1] = k[t] + 1 if v == k[t] + 1 else k[t]
        h[t + 1] = newh
        nxt[t + 1] = 1
        t += 1
    return count


@njit
def index_sum_histogram(s, n, hist):
    """Brute-force scan of all closed index paths ``(i_0..i_{2s-1}, i_0)``.

    Each path is reduced to the multiset of its unordered-pair
    multiplicities.  Paths with every multiplicity even are tallied into
    ``hist[loop_flag, code]`` where ``code = sum_j c_j (s+1)^(j-1)`` and
    ``c_j`` counts pairs traversed ``2j`` times.  Odd paths are dropped:
    their weight vanishes for a symmetric law.  Returns the number of
    paths scanned.
    """
    m = 2 * s
    idx = np.zeros(m, np.int64)
    cnt = np.zeros((n, n), np.int64)
    touched_a = np.zeros(m, np.int64)
    touched_b = np.zeros(m, np.int64)
    base = s + 1
    total = 0
    while True:
        nt = 0
        for t in range(m):
            a = idx[t]
            b = idx[(t + 1) % m]
            if a > b:
                a, b = b, a
            if cnt[a, b] == 0:
                touched_a[nt] = a
                touched_b[nt] = b
                nt += 1
            cnt[a, b] += 1
        even = True
        loop = 0
        code = 0
        for j in range(nt):
            c = cnt[touched_a[j], touched_b[j]]
            if c % 2 == 1:
                even = False
            else:
                code += base ** (c // 2 - 1)
            if touched_a[j] == touched_b[j]:
                loop = 1
            cnt[touched_a[j], touched_b[j]] = 0
        if even:
            hist[loop, code] += 1
        total += 1
        # odometer
        pos = m - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < n:
                break
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            break
    return total
