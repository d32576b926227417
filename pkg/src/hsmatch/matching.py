"""Weighted bigraphs and a minimum-weight left-saturating matching solver.

The solver is the shortest-augmenting-path form of the Hungarian algorithm
with row/column potentials, O(n^2 m) for n left and m right vertices. It works
on rectangular instances directly and only ever looks at real edges: a
missing edge is a False entry in the ``allowed`` mask, never a big weight.
Weights are exact integers (int64 when they fit, Python ints otherwise).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import InfeasibleMatching

_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class WeightedBigraph:
    """Left vertices ``v1``, right vertices ``v2`` and banded weighted edges.

    ``edges`` maps (i, j) index pairs to nonnegative exact weights.
    """

    v1: tuple
    v2: tuple
    T: int
    edges: dict

    def matrix(self):
        """Dense integer weights, the edge mask and the scale applied to the weights."""
        n, m = len(self.v1), len(self.v2)
        denom = 1
        for w in self.edges.values():
            denom = math.lcm(denom, Fraction(w).denominator)
        big = max((abs(Fraction(w)) * denom for w in self.edges.values()), default=0)
        dtype = np.int64 if big * max(n, 1) < _INT64_SAFE else object
        cost = np.zeros((n, m), dtype=dtype)
        allowed = np.zeros((n, m), dtype=bool)
        for (i, j), w in self.edges.items():
            cost[i, j] = int(Fraction(w) * denom)
            allowed[i, j] = True
        return cost, allowed, denom


@dataclass(frozen=True)
class Matching:
    pairs: tuple
    total_weight: Fraction | int

    def as_dict(self) -> dict:
        return dict(self.pairs)


def build_bigraph(v1, v2, T: int, weight_fn: Callable[[int, int], object]) -> WeightedBigraph:
    v1, v2 = tuple(v1), tuple(v2)
    edges = {}
    for i, a in enumerate(v1):
        for j, b in enumerate(v2):
            if abs(a - b) <= T:
                w = weight_fn(a, b)
                if w < 0:
                    raise ValueError(f"negative weight on edge ({a}, {b})")
                edges[i, j] = w
    return WeightedBigraph(v1, v2, T, edges)


def min_weight_assignment(cost: np.ndarray, allowed: np.ndarray, canonical: bool = False):
    """Column chosen for each row and the total cost of an optimal saturating matching.

    With ``canonical`` the result is the lexicographically smallest column
    sequence among all optimal matchings; this reruns the solver on a
    perturbed Python-int problem, so it is slower.
    """
    n, m = cost.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0
    if n > m:
        raise InfeasibleMatching(f"{n} left vertices but only {m} right vertices")
    if not canonical:
        cols = _hungarian(cost, allowed)
    else:
        # w * R^n + sum_i j_i R^(n-1-i): ties on w resolve to the smallest j sequence
        radix = m
        scale = radix ** n
        pert = np.empty((n, m), dtype=object)
        for i in range(n):
            place = radix ** (n - 1 - i)
            for j in range(m):
                pert[i, j] = int(cost[i, j]) * scale + j * place
        cols = _hungarian(pert, allowed)
    total = sum(int(cost[i, c]) for i, c in enumerate(cols))
    return cols, total


def _hungarian(cost: np.ndarray, allowed: np.ndarray) -> np.ndarray:
    n, m = cost.shape
    dtype = cost.dtype
    # index 0 is a virtual column/row used to root each search
    a = np.zeros((n + 1, m + 1), dtype=dtype)
    a[1:, 1:] = cost
    ok = np.zeros((n + 1, m + 1), dtype=bool)
    ok[1:, 1:] = allowed
    u = np.zeros(n + 1, dtype=dtype)
    v = np.zeros(m + 1, dtype=dtype)
    owner = np.zeros(m + 1, dtype=np.int64)
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv = np.zeros(m + 1, dtype=dtype)
        reached = np.zeros(m + 1, dtype=bool)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = owner[j0]
            fresh = ok[i0] & ~used
            cur = a[i0] - u[i0] - v
            better = fresh & ~reached
            better |= fresh & reached & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            reached |= better
            open_cols = np.flatnonzero(reached & ~used)
            if open_cols.size == 0:
                raise InfeasibleMatching(f"left vertex {i - 1} cannot be matched")
            j1 = open_cols[np.argmin(minv[open_cols])]
            delta = minv[j1]
            used_cols = np.flatnonzero(used)
            u[owner[used_cols]] += delta
            v[used_cols] -= delta
            minv[open_cols] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    cols = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if owner[j]:
            cols[owner[j] - 1] = j - 1
    return cols


def solve_mwmm(g: WeightedBigraph, canonical: bool = True) -> Matching:
    """Minimum-weight matching that saturates ``g.v1``.

    Raises InfeasibleMatching when no such matching exists.
    """
    cost, allowed, denom = g.matrix()
    cols, total = min_weight_assignment(cost, allowed, canonical=canonical)
    pairs = tuple((i, int(j)) for i, j in enumerate(cols))
    weight = Fraction(total, denom)
    return Matching(pairs, int(weight) if weight.denominator == 1 else weight)


def max_cardinality(adj: list[list[int]], m: int) -> int:
    """Size of a maximum matching by simple augmenting paths."""
    match_right = [-1] * m

    def augment(i, seen):
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                if match_right[j] < 0 or augment(match_right[j], seen):
                    match_right[j] = i
                    return True
        return False

    return sum(augment(i, [False] * m) for i in range(len(adj)))


def saturates_left(g: WeightedBigraph) -> bool:
    adj = [[] for _ in g.v1]
    for i, j in sorted(g.edges):
        adj[i].append(j)
    return max_cardinality(adj, len(g.v2)) == len(g.v1)
