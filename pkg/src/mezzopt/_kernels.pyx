# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Same contracts as ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, floor, ceil, fabs
from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64
ctypedef long long i64

cdef double[4] MODS = [1.0, 0.75, 0.5, 0.25]


def nondominated_ranks(double[:, ::1] F):
    cdef Py_ssize_t n = F.shape[0], m = F.shape[1]
    cdef Py_ssize_t i, j, k
    cdef bint le, lt, ge, gt
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] dom = np.zeros((n, n), dtype=np.uint8)
    cdef i64[::1] count = np.zeros(n, dtype=np.int64)
    cdef i64[::1] ranks = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            le = True; lt = False; ge = True; gt = False
            for k in range(m):
                if F[i, k] > F[j, k]:
                    le = False
                    gt = True
                elif F[i, k] < F[j, k]:
                    ge = False
                    lt = True
            if le and lt:
                dom[i, j] = 1
                count[j] += 1
            elif ge and gt:
                dom[j, i] = 1
                count[i] += 1
    cdef i64[::1] current = np.zeros(n, dtype=np.int64)
    cdef i64[::1] nxt = np.zeros(n, dtype=np.int64)
    cdef Py_ssize_t nc = 0, nn
    cdef i64 r = 1
    for i in range(n):
        if count[i] == 0:
            current[nc] = i
            nc += 1
    while nc > 0:
        nn = 0
        for i in range(nc):
            ranks[current[i]] = r
        for i in range(nc):
            for j in range(n):
                if dom[current[i], j]:
                    count[j] -= 1
                    if count[j] == 0:
                        nxt[nn] = j
                        nn += 1
        for i in range(nn):
            current[i] = nxt[i]
        nc = nn
        r += 1
    return np.asarray(ranks)


def storage_scores(i64[:, ::1] incoming, i64[::1] existing, i64[::1] area, int n_areas,
                   double[::1] dist, double ideal_dist,
                   i64[:, :, ::1] grid, i64[::1] sa_nbays, i64[::1] sa_of, i64[::1] bay_of,
                   i64[::1] win_lo, i64[::1] win_hi, i64[::1] sa_window, long tq,
                   i64[:, ::1] rule_ex, double[::1] rule_tq, double[::1] rule_conf):
    cdef Py_ssize_t P = incoming.shape[0], R = incoming.shape[1]
    cdef Py_ssize_t S = grid.shape[0], B = grid.shape[1], K = rule_ex.shape[0]
    cdef Py_ssize_t p, r, a, s, b, k, w, nb
    cdef double tqf = <double>tq
    cdef double[:, ::1] out = np.zeros((P, 4))
    cdef double[::1] q = np.zeros(R)
    cdef double[::1] area_tot = np.zeros(max(n_areas, 1))
    cdef double[:, ::1] pair = np.zeros((S, B))
    cdef double[:, ::1] cs = np.zeros((S, B + 1))
    cdef double[::1] m1 = np.zeros(S)
    cdef double[::1] m2 = np.zeros(S)
    cdef double[::1] m3 = np.zeros(S)
    cdef double[::1] m4 = np.zeros(S)
    cdef double[::1] corr = np.zeros(max(K, 1))
    cdef double total, ideal, acc, v, best, cand, near, clusters, ic
    cdef i64 idx
    for p in range(P):
        total = 0.0
        for r in range(R):
            q[r] = <double>(incoming[p, r] + existing[r])
            total += q[r]
        for a in range(n_areas):
            area_tot[a] = 0.0
        for r in range(R):
            area_tot[area[r]] += q[r]
        ideal = total / n_areas
        acc = 0.0
        for a in range(n_areas):
            acc += fabs(ideal - area_tot[a])
        out[p, 0] = -acc
        acc = 0.0
        for r in range(R):
            acc += incoming[p, r] * fabs(ideal_dist - dist[r])
        out[p, 1] = -acc

        acc = 0.0
        for s in range(S):
            m1[s] = 0.0
            m2[s] = 0.0
            m4[s] = 0.0
            cs[s, 0] = 0.0
            for b in range(B):
                v = 0.0
                idx = grid[s, b, 0]
                if idx >= 0:
                    v += q[idx]
                    if q[idx] > m1[s]:
                        m1[s] = q[idx]
                idx = grid[s, b, 1]
                if idx >= 0:
                    v += q[idx]
                    if q[idx] > m1[s]:
                        m1[s] = q[idx]
                pair[s, b] = v
                if v > m2[s]:
                    m2[s] = v
                cs[s, b + 1] = cs[s, b] + v
            m4[s] = cs[s, B]
            nb = sa_nbays[s]
            w = sa_window[s]
            if w > nb:
                w = nb
            m3[s] = 0.0
            if nb > 0:
                for b in range(0, nb - w + 1):
                    v = cs[s, b + w] - cs[s, b]
                    if v > m3[s]:
                        m3[s] = v
            best = 0.0
            cand = MODS[0] * (m1[s] / tqf if m1[s] < tqf else 1.0)
            if cand > best:
                best = cand
            cand = MODS[1] * (m2[s] / tqf if m2[s] < tqf else 1.0)
            if cand > best:
                best = cand
            cand = MODS[2] * (m3[s] / tqf if m3[s] < tqf else 1.0)
            if cand > best:
                best = cand
            cand = MODS[3] * (m4[s] / tqf if m4[s] < tqf else 1.0)
            if cand > best:
                best = cand
            acc += best
        out[p, 2] = acc

        if K > 0:
            clusters = floor(total / tqf + 1e-9)
            for k in range(K):
                corr[k] = 0.0
            for r in range(R):
                s = sa_of[r]
                best = 0.0
                v = q[r]
                cand = MODS[0] * (v / tqf if v < tqf else 1.0)
                if cand > best:
                    best = cand
                v = pair[s, bay_of[r]]
                cand = MODS[1] * (v / tqf if v < tqf else 1.0)
                if cand > best:
                    best = cand
                v = cs[s, win_hi[r]] - cs[s, win_lo[r]]
                cand = MODS[2] * (v / tqf if v < tqf else 1.0)
                if cand > best:
                    best = cand
                v = m4[s]
                cand = MODS[3] * (v / tqf if v < tqf else 1.0)
                if cand > best:
                    best = cand
                for k in range(K):
                    if rule_ex[k, r] != 0:
                        corr[k] += best * rule_ex[k, r]
            acc = 0.0
            for k in range(K):
                ic = ceil(clusters * rule_tq[k] * rule_conf[k] - 1e-9)
                if ic - corr[k] > 0.0:
                    acc += ic - corr[k]
            out[p, 3] = -acc
    return np.asarray(out)


cdef inline double splitmix(u64* state):
    cdef u64 z
    state[0] += <u64>0x9E3779B97F4A7C15ULL
    z = state[0]
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EBULL
    z = z ^ (z >> 31)
    return <double>(z >> 11) * (1.0 / 9007199254740992.0)


cdef i64 collect(Py_ssize_t m, i64 visit, i64[::1] zr_start, i64[::1] zr_sub, i64[::1] zh_start,
                 i64[::1] zh_line, i64[::1] left, i64[::1] missing, i64[:, ::1] supply,
                 i64[::1] sub_stamp, list picks):
    cdef Py_ssize_t z, h
    cdef i64 s, ln, take, got = 0
    cdef bint wanted
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
            take = left[h] if left[h] < missing[ln] else missing[ln]
            if take > 0:
                left[h] -= take
                missing[ln] -= take
                supply[m, ln] -= take
                got += take
                picks.append((visit, z, ln, take))
    return got


def _pack(list seq, list picks):
    return (np.asarray(seq, dtype=np.int64),
            np.asarray(picks, dtype=np.int64).reshape(-1, 4))


def ant_walk(Py_ssize_t start, seed, i64[::1] need, i64[:, ::1] supply0, double[:, ::1] dist,
             double[:, ::1] tau1, double[:, ::1] tau2, bint two_matrices, double alpha, double beta,
             i64[::1] zr_start, i64[::1] zr_sub, i64[::1] zh_start, i64[::1] zh_line,
             i64[::1] zh_qty, Py_ssize_t n_sub):
    cdef Py_ssize_t M = dist.shape[0], L = need.shape[0]
    cdef Py_ssize_t n, ln, cur, nxt, nc
    cdef i64[::1] missing = np.array(need, dtype=np.int64)
    cdef i64[:, ::1] supply = np.array(supply0, dtype=np.int64)
    cdef i64[::1] left = np.array(zh_qty, dtype=np.int64)
    cdef i64[::1] sub_stamp = np.full(max(n_sub, 1), -1, dtype=np.int64)
    cdef cnp.uint8_t[::1] visited = np.zeros(M, dtype=np.uint8)
    cdef double[::1] avail = np.zeros(M)
    cdef double[::1] weights = np.zeros(M)
    cdef double[:, ::1] tau
    cdef u64 state = <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef double u, total, eta, w, r, acc
    cdef i64 a, remaining = 0
    cdef bint any_pos
    cdef list seq = [start]
    cdef list picks = []
    visited[start] = 1
    collect(start, 0, zr_start, zr_sub, zh_start, zh_line, left, missing, supply, sub_stamp, picks)
    for ln in range(L):
        remaining += missing[ln]
    while remaining > 0:
        cur = seq[len(seq) - 1]
        any_pos = False
        for n in range(M):
            avail[n] = 0.0
            if n == cur:
                continue
            a = 0
            for ln in range(L):
                if missing[ln] > 0 and supply[n, ln] > 0:
                    a += supply[n, ln] if supply[n, ln] < missing[ln] else missing[ln]
            avail[n] = <double>a / <double>remaining
            if a > 0 and not visited[n]:
                any_pos = True
        if not any_pos:
            for n in range(M):
                visited[n] = 1 if n == cur else 0
        tau = tau1
        if two_matrices:
            u = splitmix(&state)
            if u < 0.5:
                tau = tau2
        total = 0.0
        for n in range(M):
            weights[n] = 0.0
            if visited[n] or n == cur:
                continue
            eta = avail[n] / dist[cur, n]
            w = pow(tau[cur, n], alpha) * pow(eta, beta)
            weights[n] = w
            total += w
        u = splitmix(&state)
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
            nc = 0
            for n in range(M):
                if not visited[n] and n != cur:
                    nc += 1
            if nc == 0:
                nxt = cur
            else:
                a = <i64>(u * nc)
                if a > nc - 1:
                    a = nc - 1
                for n in range(M):
                    if not visited[n] and n != cur:
                        if a == 0:
                            nxt = n
                            break
                        a -= 1
        visited[nxt] = 1
        seq.append(nxt)
        collect(nxt, len(seq) - 1, zr_start, zr_sub, zh_start, zh_line, left, missing, supply, sub_stamp, picks)
        remaining = 0
        for ln in range(L):
            remaining += missing[ln]
    return _pack(seq, picks)


def replay(sequence, i64[::1] need, i64[:, ::1] supply0, i64[::1] zr_start, i64[::1] zr_sub,
           i64[::1] zh_start, i64[::1] zh_line, i64[::1] zh_qty, Py_ssize_t n_sub):
    cdef i64[::1] missing = np.array(need, dtype=np.int64)
    cdef i64[:, ::1] supply = np.array(supply0, dtype=np.int64)
    cdef i64[::1] left = np.array(zh_qty, dtype=np.int64)
    cdef i64[::1] sub_stamp = np.full(max(n_sub, 1), -1, dtype=np.int64)
    cdef list picks = []
    cdef list seq = [int(m) for m in sequence]
    cdef Py_ssize_t visit
    cdef i64 remaining = 0
    for visit in range(len(seq)):
        collect(seq[visit], visit, zr_start, zr_sub, zh_start, zh_line, left, missing, supply, sub_stamp, picks)
    for visit in range(missing.shape[0]):
        remaining += missing[visit]
    s, p = _pack(seq, picks)
    return s, p, remaining
