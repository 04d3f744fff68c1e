"""Pure-Python/numpy implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function by function; both must give identical
results (including the random streams of the ant walk).
"""

import math

import numpy as np

MASK64 = (1 << 64) - 1
MASK_MODS = (1.0, 0.75, 0.5, 0.25)


def nondominated_ranks(F):
    """Pareto rank (1-based) of every row of ``F`` under minimization."""
    n = F.shape[0]
    le = (F[:, None, :] <= F[None, :, :]).all(axis=2)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    count = dom.sum(axis=0)
    ranks = np.zeros(n, dtype=np.int64)
    current = np.nonzero(count == 0)[0]
    r = 1
    while len(current):
        ranks[current] = r
        count = count - dom[current].sum(axis=0)
        count[ranks > 0] = -1
        current = np.nonzero(count == 0)[0]
        r += 1
    return ranks


def storage_scores(incoming, existing, area, n_areas, dist, ideal_dist,
                   grid, sa_nbays, sa_of, bay_of, win_lo, win_hi, sa_window, tq,
                   rule_ex, rule_tq, rule_conf):
    """Spread, distance, quantity and correlation scores for a batch of count vectors.

    ``incoming`` is (P, R): incoming items per floor rack for each chromosome.
    Returns a (P, 4) float array.
    """
    P, R = incoming.shape
    q = (incoming + existing[None, :]).astype(np.float64)
    out = np.zeros((P, 4))

    area_tot = np.zeros((P, n_areas))
    for a in range(n_areas):
        area_tot[:, a] = q[:, area == a].sum(axis=1)
    ideal = q.sum(axis=1) / n_areas
    out[:, 0] = -np.abs(ideal[:, None] - area_tot).sum(axis=1)

    out[:, 1] = -(incoming * np.abs(ideal_dist - dist)[None, :]).sum(axis=1)

    S, B, _ = grid.shape
    qpad = np.concatenate([q, np.zeros((P, 1))], axis=1)
    Q = qpad[:, grid]  # (P, S, B, 2); -1 indexes the zero column
    pair = Q.sum(axis=3)
    m1 = Q.max(axis=(2, 3))
    m2 = pair.max(axis=2)
    cs = np.concatenate([np.zeros((P, S, 1)), np.cumsum(pair, axis=2)], axis=2)
    m3 = np.zeros((P, S))
    for s in range(S):
        nb = int(sa_nbays[s])
        w = min(int(sa_window[s]), nb)
        if nb == 0:
            continue
        m3[:, s] = (cs[:, s, w:nb + 1] - cs[:, s, :nb - w + 1]).max(axis=1)
    m4 = pair.sum(axis=2)
    tqf = float(tq)
    best = np.zeros((P, S))
    for mod, m in zip(MASK_MODS, (m1, m2, m3, m4)):
        best = np.maximum(best, mod * np.minimum(1.0, m / tqf))
    out[:, 2] = best.sum(axis=1)

    K = rule_ex.shape[0]
    if K:
        total = q.sum(axis=1)
        clusters = np.floor(total / tqf + 1e-9)
        rq1 = q
        rq2 = pair[:, sa_of, bay_of]
        rq3 = cs[:, sa_of, win_hi] - cs[:, sa_of, win_lo]
        rq4 = m4[:, sa_of]
        near = np.zeros((P, R))
        for mod, m in zip(MASK_MODS, (rq1, rq2, rq3, rq4)):
            near = np.maximum(near, mod * np.minimum(1.0, m / tqf))
        corr = near @ rule_ex.T.astype(np.float64)  # (P, K)
        ideal_corr = np.ceil(clusters[:, None] * rule_tq[None, :] * rule_conf[None, :] - 1e-9)
        out[:, 3] = -np.maximum(0.0, ideal_corr - corr).sum(axis=1)
    return out


def _splitmix(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return state, (z >> 11) * (1.0 / 9007199254740992.0)


def _collect(m, visit, zr_start, zr_sub, zh_start, zh_line, left, missing, supply,
             sub_stamp, picks):
    for z in range(zr_start[m], zr_start[m + 1]):
        s = zr_sub[z]
        if sub_stamp[s] == visit:
            continue
        wanted = False
        for h in range(zh_start[z], zh_start[z + 1]):
            if left[h] > 0 and missing[zh_line[h]] > 0:
                wanted = True
                break
        if not wanted:
            continue
        sub_stamp[s] = visit
        for h in range(zh_start[z], zh_start[z + 1]):
            ln = zh_line[h]
            take = min(left[h], missing[ln])
            if take > 0:
                left[h] -= take
                missing[ln] -= take
                supply[m][ln] -= take
                picks.append((visit, z, ln, take))


def _prepare(need, supply0, zh_qty, n_sub):
    missing = [int(x) for x in need]
    supply = [[int(x) for x in row] for row in supply0]
    left = [int(x) for x in zh_qty]
    sub_stamp = [-1] * n_sub
    return missing, supply, left, sub_stamp


def _pack(seq, picks):
    return (np.asarray(seq, dtype=np.int64),
            np.asarray(picks, dtype=np.int64).reshape(-1, 4))


def ant_walk(start, seed, need, supply0, dist, tau1, tau2, two_matrices, alpha, beta,
             zr_start, zr_sub, zh_start, zh_line, zh_qty, n_sub):
    """Construct one market sequence; returns (sequence, picks[visit, zone_rack, line, qty])."""
    M = dist.shape[0]
    L = len(need)
    zr_start, zr_sub = zr_start.tolist(), zr_sub.tolist()
    zh_start, zh_line = zh_start.tolist(), zh_line.tolist()
    D = dist.tolist()
    T1 = tau1.tolist()
    T2 = tau2.tolist() if two_matrices else T1
    missing, supply, left, sub_stamp = _prepare(need, supply0, zh_qty, n_sub)
    picks = []
    seq = [start]
    visited = [False] * M
    visited[start] = True
    _collect(start, 0, zr_start, zr_sub, zh_start, zh_line, left, missing, supply, sub_stamp, picks)
    state = seed & MASK64
    remaining = sum(missing)
    while remaining > 0:
        cur = seq[-1]
        avail = [0.0] * M
        any_pos = False
        for n in range(M):
            if n == cur:
                continue
            a = 0
            row = supply[n]
            for ln in range(L):
                if missing[ln] > 0 and row[ln] > 0:
                    a += min(row[ln], missing[ln])
            avail[n] = a / remaining
            if a > 0 and not visited[n]:
                any_pos = True
        if not any_pos:
            for n in range(M):
                visited[n] = n == cur
        tau = T1
        if two_matrices:
            state, u = _splitmix(state)
            if u < 0.5:
                tau = T2
        weights = [0.0] * M
        total = 0.0
        for n in range(M):
            if visited[n] or n == cur:
                continue
            eta = avail[n] / D[cur][n]
            w = math.pow(tau[cur][n], alpha) * math.pow(eta, beta)
            weights[n] = w
            total += w
        state, u = _splitmix(state)
        nxt = -1
        if total > 0.0:
            r = u * total
            acc = 0.0
            for n in range(M):
                if weights[n] > 0.0:
                    acc += weights[n]
                    nxt = n
                    if acc > r:
                        break
        else:
            cands = [n for n in range(M) if not visited[n] and n != cur]
            # a single-market graph can only be re-entered
            nxt = cands[min(int(u * len(cands)), len(cands) - 1)] if cands else cur
        visited[nxt] = True
        seq.append(nxt)
        _collect(nxt, len(seq) - 1, zr_start, zr_sub, zh_start, zh_line, left, missing, supply, sub_stamp, picks)
        remaining = sum(missing)
    return _pack(seq, picks)


def replay(sequence, need, supply0, zr_start, zr_sub, zh_start, zh_line, zh_qty, n_sub):
    """Collect greedily along a fixed market sequence."""
    missing, supply, left, sub_stamp = _prepare(need, supply0, zh_qty, n_sub)
    zr_start, zr_sub = zr_start.tolist(), zr_sub.tolist()
    zh_start, zh_line = zh_start.tolist(), zh_line.tolist()
    picks = []
    for visit, m in enumerate(sequence):
        _collect(int(m), visit, zr_start, zr_sub, zh_start, zh_line, left, missing, supply, sub_stamp, picks)
    seq, picks = _pack(list(sequence), picks)
    return seq, picks, sum(missing)
