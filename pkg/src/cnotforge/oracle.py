"""Breadth-first search over GL_n(F2): exact optima for small n, independent of any encoding."""

from __future__ import annotations

import itertools
from collections import deque
from functools import lru_cache

from .coupling import CouplingGraph, complete
from .gf2 import Pair, ParityMatrix, Permutation, identity, permutation_matrix
from .plan import Plan

MAX_N = 4


class OracleError(ValueError):
    pass


def _canon(variant: str) -> str:
    from .sat_encode import normalize_variant

    return normalize_variant(variant)


def _matchings(pairs: frozenset[Pair]) -> list[tuple[Pair, ...]]:
    """All non-empty sets of permitted pairs acting on pairwise disjoint qubits."""
    ordered = sorted(pairs)
    out: list[tuple[Pair, ...]] = []

    def grow(start: int, used: frozenset[int], chosen: tuple[Pair, ...]) -> None:
        for idx in range(start, len(ordered)):
            c, t = ordered[idx]
            if c in used or t in used:
                continue
            nxt = chosen + ((c, t),)
            out.append(nxt)
            grow(idx + 1, used | {c, t}, nxt)

    grow(0, frozenset(), ())
    return out


def _moves(pairs: frozenset[Pair], metric: str) -> list[tuple[Pair, ...]]:
    if metric == "count":
        return [(p,) for p in sorted(pairs)]
    return _matchings(pairs)


def _apply(cols: tuple[int, ...], move: tuple[Pair, ...]) -> tuple[int, ...]:
    out = list(cols)
    for c, t in move:
        out[t] ^= cols[c]
    return tuple(out)


def _column_pairs(pairs: frozenset[Pair], perm: Permutation) -> frozenset[Pair]:
    """Column pairs allowed when logical qubit i sits in column perm(i)."""
    return frozenset((perm(i), perm(j)) for i, j in pairs)


@lru_cache(maxsize=None)
def _bfs(n: int, weak: bool, pairs: frozenset[Pair], metric: str):
    """Distances (and parents) from the start set to every reachable state.

    States are column tuples; for restricted weak search the state also
    carries the start permutation, since the allowed column pairs depend on it.
    """
    perm_aware = weak and pairs != complete(n).pairs
    if weak:
        starts = [Permutation(p) for p in itertools.permutations(range(n))]
    else:
        starts = [Permutation.identity(n)]
    dist: dict = {}
    parent: dict = {}
    queue: deque = deque()
    move_cache: dict[Permutation, list] = {}
    for p in starts:
        key = (permutation_matrix(p).cols, p if perm_aware else None)
        if key not in dist:
            dist[key] = 0
            parent[key] = (None, None, p)
            queue.append(key)
    base_moves = _moves(pairs, metric)
    while queue:
        key = queue.popleft()
        cols, p = key
        if perm_aware:
            moves = move_cache.get(p)
            if moves is None:
                moves = move_cache[p] = _moves(_column_pairs(pairs, p), metric)
        else:
            moves = base_moves
        d = dist[key] + 1
        for mv in moves:
            nk = (_apply(cols, mv), p)
            if nk not in dist:
                dist[nk] = d
                parent[nk] = (key, mv, None)
                queue.append(nk)
    best: dict[tuple[int, ...], tuple[int, tuple]] = {}
    for key, d in dist.items():
        cols = key[0]
        if cols not in best or d < best[cols][0]:
            best[cols] = (d, key)
    return best, parent


def _check(m: ParityMatrix) -> None:
    if m.n > MAX_N:
        raise OracleError(f"oracle limited to n <= {MAX_N}, got {m.n}")


def _pairs_for(variant: str, n: int, cp: CouplingGraph | None) -> frozenset[Pair]:
    if variant.endswith("+R"):
        if cp is None:
            raise OracleError(f"variant {variant} needs a coupling graph")
        return cp.pairs
    return complete(n).pairs


def _distance(m: ParityMatrix, variant: str, metric: str, cp: CouplingGraph | None) -> int:
    _check(m)
    variant = _canon(variant)
    best, _ = _bfs(m.n, variant.startswith("W"), _pairs_for(variant, m.n, cp), metric)
    if m.cols not in best:
        raise OracleError("target unreachable under the given coupling graph")
    return best[m.cols][0]


def oracle_count(m: ParityMatrix, variant: str = "S", cp: CouplingGraph | None = None) -> int:
    return _distance(m, variant, "count", cp)


def oracle_depth(m: ParityMatrix, variant: str = "S", cp: CouplingGraph | None = None) -> int:
    return _distance(m, variant, "depth", cp)


def oracle_plan(m: ParityMatrix, variant: str, metric: str, cp: CouplingGraph | None) -> Plan:
    """Reconstruct one optimal plan from the BFS parent pointers."""
    _check(m)
    variant = _canon(variant)
    best, parent = _bfs(m.n, variant.startswith("W"), _pairs_for(variant, m.n, cp), metric)
    if m.cols not in best:
        raise OracleError("target unreachable under the given coupling graph")
    key = best[m.cols][1]
    steps = []
    while True:
        prev, mv, start = parent[key]
        if prev is None:
            break
        steps.append(frozenset(mv))
        key = prev
    steps.reverse()
    perm = start if variant.startswith("W") else None
    return Plan(tuple(steps), perm)


__all__ = ["MAX_N", "OracleError", "oracle_count", "oracle_depth", "oracle_plan"]
