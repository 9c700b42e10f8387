"""Shared brute-force oracles, independent of the library's own algorithms."""

import random
from itertools import combinations

import pytest

from switchmix import DegreeSequence, Graph


def count_nonadjacent_edge_pairs(g: Graph) -> int:
    """Direct enumeration of unordered pairs of disjoint edges."""
    total = 0
    edges = list(g.edges)
    for (u, v), (x, y) in combinations(edges, 2):
        if len({u, v, x, y}) == 4:
            total += 1
    return total


def graphical_by_search(degrees) -> bool:
    """Existence of a simple realization by plain backtracking.

    Processes the first vertex with residual degree and tries every subset
    of higher-residual partners; prunes only on parity and capacity, so the
    search does not share logic with the library's graphicality test.
    """
    degrees = list(degrees)
    n = len(degrees)
    if sum(degrees) % 2:
        return False
    if any(d < 0 or d > n - 1 for d in degrees):
        return False

    def rec(res):
        live = [v for v in range(len(res)) if res[v] > 0]
        if not live:
            return True
        u = live[0]
        partners = [v for v in live[1:]]
        if res[u] > len(partners):
            return False
        for pick in combinations(partners, res[u]):
            nxt = list(res)
            nxt[u] = 0
            for v in pick:
                nxt[v] -= 1
            if rec(nxt):
                return True
        return False

    return rec(degrees)


def digraphical_by_search(pairs) -> bool:
    """Existence of a simple digraph realization by backtracking on rows."""
    pairs = list(pairs)
    n = len(pairs)
    if sum(a for a, _ in pairs) != sum(b for _, b in pairs):
        return False
    if any(a < 0 or b < 0 or a > n - 1 or b > n - 1 for a, b in pairs):
        return False
    in_res = [a for a, _ in pairs]

    def rec(u):
        if u == n:
            return all(r == 0 for r in in_res)
        need = pairs[u][1]
        cand = [v for v in range(n) if v != u and in_res[v] > 0]
        if len(cand) < need:
            return False
        for pick in combinations(cand, need):
            for v in pick:
                in_res[v] -= 1
            if rec(u + 1):
                for v in pick:
                    in_res[v] += 1
                return True
            for v in pick:
                in_res[v] += 1
        return False

    return rec(0)


def random_graphical_sequence(rng: random.Random, n: int, p: float = 0.5) -> DegreeSequence:
    """Degree sequence of a random graph: graphical by construction."""
    degrees = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                degrees[u] += 1
                degrees[v] += 1
    return DegreeSequence(degrees)


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    g = Graph(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v)
    return g


@pytest.fixture
def rng():
    return random.Random(0x5EED)
