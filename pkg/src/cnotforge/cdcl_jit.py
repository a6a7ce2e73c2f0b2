"""Numba-compiled CDCL kernel with the same search as ``cdcl.Cdcl``.

Flat-array layout: clause literals live in one int32 buffer; the two watched
literals of a clause are always at positions 0 and 1; watch lists are
intrusive linked lists over nodes ``2*clause + slot``.
"""

from __future__ import annotations

import time

import numpy as np
from numba import njit, objmode

UNKNOWN, UNSAT, SAT = -1, 0, 1


@njit(cache=True)
def _luby(x):
    size = 1
    seq = 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return 1 << seq


@njit(cache=True)
def _heap_up(heap, pos, act, i):
    v = heap[i]
    a = act[v]
    while i > 0:
        parent = (i - 1) >> 1
        u = heap[parent]
        if act[u] >= a:
            break
        heap[i] = u
        pos[u] = i
        i = parent
    heap[i] = v
    pos[v] = i


@njit(cache=True)
def _heap_down(heap, pos, act, size, i):
    v = heap[i]
    a = act[v]
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        if child + 1 < size and act[heap[child + 1]] > act[heap[child]]:
            child += 1
        u = heap[child]
        if act[u] <= a:
            break
        heap[i] = u
        pos[u] = i
        i = child
    heap[i] = v
    pos[v] = i


@njit(cache=True)
def _kernel(nv, in_lits, in_start, in_len, deadline):
    nlit = 2 * (nv + 1)
    val = np.zeros(nlit, np.int8)
    level = np.zeros(nv + 1, np.int32)
    reason = -np.ones(nv + 1, np.int32)
    trail = np.zeros(nv + 1, np.int32)
    trail_lim = np.zeros(nv + 2, np.int32)
    tlen = 0
    nlev = 0
    qhead = 0

    ncl0 = in_start.shape[0]
    ccap = max(16, 2 * ncl0 + 1024)
    lcap = max(64, 2 * in_lits.shape[0] + 8192)
    cl_lits = np.zeros(lcap, np.int32)
    cl_start = np.zeros(ccap, np.int32)
    cl_len = np.zeros(ccap, np.int32)
    cl_lbd = np.zeros(ccap, np.int32)
    cl_learnt = np.zeros(ccap, np.uint8)
    head = -np.ones(nlit, np.int32)
    nxt = -np.ones(2 * ccap, np.int32)
    ncl = 0
    used = 0

    activity = np.zeros(nv + 1, np.float64)
    var_inc = 1.0
    phase = np.zeros(nv + 1, np.int8)
    heap = np.zeros(nv + 1, np.int32)
    pos = -np.ones(nv + 1, np.int32)
    hsize = 0
    for v in range(1, nv + 1):
        heap[hsize] = v
        pos[v] = hsize
        hsize += 1

    seen = np.zeros(nv + 1, np.uint8)
    learnt = np.zeros(nv + 1, np.int32)
    toclear = np.zeros(nv + 1, np.int32)
    stack = np.zeros(nv + 1, np.int32)
    lvl_mark = np.zeros(nv + 2, np.int32)
    lvl_stamp = 0

    # Load input clauses; units are enqueued at level 0.
    ok = True
    for c in range(ncl0):
        s = in_start[c]
        L = in_len[c]
        if L == 0:
            ok = False
            continue
        if L == 1:
            lit = in_lits[s]
            if val[lit] == -1:
                ok = False
            elif val[lit] == 0:
                val[lit] = 1
                val[lit ^ 1] = -1
                level[lit >> 1] = 0
                reason[lit >> 1] = -1
                trail[tlen] = lit
                tlen += 1
            continue
        cl_start[ncl] = used
        cl_len[ncl] = L
        for j in range(L):
            cl_lits[used + j] = in_lits[s + j]
        used += L
        for w in range(2):
            node = 2 * ncl + w
            lit = cl_lits[cl_start[ncl] + w]
            nxt[node] = head[lit]
            head[lit] = node
        ncl += 1
    if not ok:
        return UNSAT, val

    conflicts = 0
    restart = 0
    budget = 100 * _luby(0)
    since = 0
    max_learnts = max(2000, ncl // 2)
    nlearnt = 0

    while True:
        # ---- propagate
        confl = -1
        while qhead < tlen:
            false_lit = trail[qhead] ^ 1
            qhead += 1
            prev = -1
            node = head[false_lit]
            while node != -1:
                nextn = nxt[node]
                ci = node >> 1
                s = cl_start[ci]
                if cl_lits[s] == false_lit:
                    cl_lits[s] = cl_lits[s + 1]
                    cl_lits[s + 1] = false_lit
                first = cl_lits[s]
                if val[first] == 1:
                    prev = node
                    node = nextn
                    continue
                moved = False
                L = cl_len[ci]
                for k in range(2, L):
                    lk = cl_lits[s + k]
                    if val[lk] != -1:
                        cl_lits[s + 1] = lk
                        cl_lits[s + k] = false_lit
                        if prev == -1:
                            head[false_lit] = nextn
                        else:
                            nxt[prev] = nextn
                        nxt[node] = head[lk]
                        head[lk] = node
                        moved = True
                        break
                if moved:
                    node = nextn
                    continue
                if val[first] == -1:
                    confl = ci
                    break
                val[first] = 1
                val[first ^ 1] = -1
                level[first >> 1] = nlev
                reason[first >> 1] = ci
                trail[tlen] = first
                tlen += 1
                prev = node
                node = nextn
            if confl != -1:
                qhead = tlen
                break

        if confl != -1:
            conflicts += 1
            since += 1
            if nlev == 0:
                return UNSAT, val
            # ---- analyze (first UIP)
            path = 0
            p = -1
            idx = tlen - 1
            out = 1
            nclear = 0
            ci = confl
            while True:
                s = cl_start[ci]
                L = cl_len[ci]
                j0 = 0 if p == -1 else 1
                for j in range(j0, L):
                    q = cl_lits[s + j]
                    v = q >> 1
                    if seen[v] == 0 and level[v] > 0:
                        seen[v] = 1
                        toclear[nclear] = v
                        nclear += 1
                        activity[v] += var_inc
                        if activity[v] > 1e100:
                            for u in range(1, nv + 1):
                                activity[u] *= 1e-100
                            var_inc *= 1e-100
                        if pos[v] != -1:
                            _heap_up(heap, pos, activity, pos[v])
                        if level[v] >= nlev:
                            path += 1
                        else:
                            learnt[out] = q
                            out += 1
                while seen[trail[idx] >> 1] == 0:
                    idx -= 1
                p = trail[idx]
                idx -= 1
                ci = reason[p >> 1]
                seen[p >> 1] = 0
                path -= 1
                if path == 0:
                    break
            learnt[0] = p ^ 1
            # ---- recursive minimization
            abstract = 0
            for i in range(1, out):
                abstract |= 1 << (level[learnt[i] >> 1] & 31)
            j = 1
            for i in range(1, out):
                q = learnt[i]
                v = q >> 1
                keep = True
                if reason[v] != -1:
                    top = nclear
                    sp = 0
                    stack[sp] = q
                    sp += 1
                    redundant = True
                    while sp > 0 and redundant:
                        sp -= 1
                        r = reason[stack[sp] >> 1]
                        rs = cl_start[r]
                        for jj in range(1, cl_len[r]):
                            x = cl_lits[rs + jj]
                            xv = x >> 1
                            if seen[xv] == 0 and level[xv] > 0:
                                if reason[xv] != -1 and (abstract & (1 << (level[xv] & 31))) != 0:
                                    seen[xv] = 1
                                    stack[sp] = x
                                    sp += 1
                                    toclear[nclear] = xv
                                    nclear += 1
                                else:
                                    redundant = False
                                    break
                    if redundant:
                        keep = False
                    else:
                        for t in range(top, nclear):
                            seen[toclear[t]] = 0
                        nclear = top
                if keep:
                    learnt[j] = q
                    j += 1
            out = j
            for t in range(nclear):
                seen[toclear[t]] = 0
            # ---- backjump level and LBD
            back = 0
            if out > 1:
                best = 1
                for i in range(2, out):
                    if level[learnt[i] >> 1] > level[learnt[best] >> 1]:
                        best = i
                tmp = learnt[1]
                learnt[1] = learnt[best]
                learnt[best] = tmp
                back = level[learnt[1] >> 1]
            lvl_stamp += 1
            lbd = 0
            for i in range(out):
                lv = level[learnt[i] >> 1]
                if lvl_mark[lv] != lvl_stamp:
                    lvl_mark[lv] = lvl_stamp
                    lbd += 1
            # ---- cancel until back
            if nlev > back:
                for i in range(tlen - 1, trail_lim[back] - 1, -1):
                    lit = trail[i]
                    v = lit >> 1
                    val[lit] = 0
                    val[lit ^ 1] = 0
                    reason[v] = -1
                    phase[v] = 1 if (lit & 1) == 0 else 0
                    if pos[v] == -1:
                        heap[hsize] = v
                        pos[v] = hsize
                        hsize += 1
                        _heap_up(heap, pos, activity, hsize - 1)
                tlen = trail_lim[back]
                nlev = back
                qhead = tlen
            # ---- learn
            a = learnt[0]
            if out == 1:
                val[a] = 1
                val[a ^ 1] = -1
                level[a >> 1] = 0
                reason[a >> 1] = -1
                trail[tlen] = a
                tlen += 1
            else:
                if ncl >= ccap:
                    ccap2 = 2 * ccap
                    t1 = np.zeros(ccap2, np.int32)
                    t1[:ccap] = cl_start
                    cl_start = t1
                    t2 = np.zeros(ccap2, np.int32)
                    t2[:ccap] = cl_len
                    cl_len = t2
                    t3 = np.zeros(ccap2, np.int32)
                    t3[:ccap] = cl_lbd
                    cl_lbd = t3
                    t4 = np.zeros(ccap2, np.uint8)
                    t4[:ccap] = cl_learnt
                    cl_learnt = t4
                    t5 = -np.ones(2 * ccap2, np.int32)
                    t5[: 2 * ccap] = nxt
                    nxt = t5
                    ccap = ccap2
                if used + out > lcap:
                    lcap2 = 2 * lcap + out
                    t6 = np.zeros(lcap2, np.int32)
                    t6[:lcap] = cl_lits
                    cl_lits = t6
                    lcap = lcap2
                cl_start[ncl] = used
                cl_len[ncl] = out
                cl_lbd[ncl] = lbd
                cl_learnt[ncl] = 1
                for i in range(out):
                    cl_lits[used + i] = learnt[i]
                used += out
                for w in range(2):
                    node = 2 * ncl + w
                    lit = learnt[w]
                    nxt[node] = head[lit]
                    head[lit] = node
                val[a] = 1
                val[a ^ 1] = -1
                level[a >> 1] = nlev
                reason[a >> 1] = ncl
                trail[tlen] = a
                tlen += 1
                ncl += 1
                nlearnt += 1
            var_inc /= 0.95
            if (conflicts & 255) == 0:
                with objmode(now="float64"):
                    now = time.monotonic()
                if now > deadline:
                    return UNKNOWN, val
            continue

        if since >= budget:
            restart += 1
            budget = 100 * _luby(restart)
            since = 0
            if nlev > 0:
                for i in range(tlen - 1, trail_lim[0] - 1, -1):
                    lit = trail[i]
                    v = lit >> 1
                    val[lit] = 0
                    val[lit ^ 1] = 0
                    reason[v] = -1
                    phase[v] = 1 if (lit & 1) == 0 else 0
                    if pos[v] == -1:
                        heap[hsize] = v
                        pos[v] = hsize
                        hsize += 1
                        _heap_up(heap, pos, activity, hsize - 1)
                tlen = trail_lim[0]
                nlev = 0
                qhead = tlen
            if nlearnt > max_learnts:
                # ---- reduce: drop the worse half of learnt clauses (by LBD, then length)
                for v in range(1, nv + 1):
                    reason[v] = -1
                first_learnt = -1
                for c in range(ncl):
                    if cl_learnt[c] == 1:
                        first_learnt = c
                        break
                cand = np.zeros(nlearnt, np.int64)
                keys = np.zeros(nlearnt, np.int64)
                m = 0
                for c in range(first_learnt, ncl):
                    cand[m] = c
                    keys[m] = cl_lbd[c] * 100000 + cl_len[c]
                    m += 1
                order = np.argsort(keys[:m], kind="mergesort")
                drop = np.zeros(ncl, np.uint8)
                for i in range(m // 2, m):
                    c = cand[order[i]]
                    if cl_lbd[c] > 2:
                        drop[c] = 1
                # compact
                newused = 0
                newc = 0
                for c in range(ncl):
                    if drop[c] == 1:
                        continue
                    s = cl_start[c]
                    L = cl_len[c]
                    for j2 in range(L):
                        cl_lits[newused + j2] = cl_lits[s + j2]
                    cl_start[newc] = newused
                    cl_len[newc] = L
                    cl_lbd[newc] = cl_lbd[c]
                    cl_learnt[newc] = cl_learnt[c]
                    newused += L
                    newc += 1
                ncl = newc
                used = newused
                nlearnt = 0
                for c in range(ncl):
                    nlearnt += cl_learnt[c]
                for lit in range(nlit):
                    head[lit] = -1
                for c in range(ncl):
                    for w in range(2):
                        node = 2 * c + w
                        lit = cl_lits[cl_start[c] + w]
                        nxt[node] = head[lit]
                        head[lit] = node
                max_learnts = int(max_learnts * 1.1)
            continue

        # ---- decide
        dec = -1
        while hsize > 0:
            v = heap[0]
            hsize -= 1
            pos[v] = -1
            if hsize > 0:
                heap[0] = heap[hsize]
                pos[heap[0]] = 0
                _heap_down(heap, pos, activity, hsize, 0)
            if val[2 * v] == 0:
                dec = 2 * v + (0 if phase[v] == 1 else 1)
                break
        if dec == -1:
            return SAT, val
        trail_lim[nlev] = tlen
        nlev += 1
        val[dec] = 1
        val[dec ^ 1] = -1
        level[dec >> 1] = nlev
        reason[dec >> 1] = -1
        trail[tlen] = dec
        tlen += 1


def solve(num_vars, clauses, deadline: float | None = None):
    """Same contract as ``cdcl.solve``: ``(status, model)`` with status True/False/None."""
    lits: list[int] = []
    starts: list[int] = []
    lens: list[int] = []
    for cl in clauses:
        codes = set()
        taut = False
        for l in cl:
            v = abs(l)
            if v == 0 or v > num_vars:
                raise ValueError(f"literal {l} out of range")
            code = 2 * v + (l < 0)
            if code ^ 1 in codes:
                taut = True
                break
            codes.add(code)
        if taut:
            continue
        starts.append(len(lits))
        lens.append(len(codes))
        lits.extend(sorted(codes))
    dl = float("inf") if deadline is None else deadline
    status, val = _kernel(
        num_vars,
        np.asarray(lits, np.int32),
        np.asarray(starts, np.int32),
        np.asarray(lens, np.int32),
        dl,
    )
    if status == UNKNOWN:
        return None, None
    if status == UNSAT:
        return False, None
    return True, {v: bool(val[2 * v] == 1) for v in range(1, num_vars + 1)}


def warm_up() -> None:
    solve(2, [[1, 2], [-1, 2], [1, -2]], time.monotonic() + 60)
