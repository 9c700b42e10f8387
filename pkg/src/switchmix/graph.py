"""Simple graph and digraph stores tuned for switch-chain stepping.

Edges live in an indexed array so a uniform random edge is one randrange
call, with a hash index beside it for O(1) membership tests and O(1)
deletion by swap-with-last.  Vertices are 0-indexed everywhere, including
file I/O.
"""

from __future__ import annotations

from .degseq import DegreeSequence, DirectedDegreeSequence


class Graph:
    """Simple undirected graph; no loops, no parallel edges."""

    __slots__ = ("n", "edges", "_pos", "degree")

    def __init__(self, n, edges=()):
        if n < 0:
            raise ValueError("negative vertex count")
        self.n = n
        self.edges = []
        self._pos = {}
        self.degree = [0] * n
        for u, v in edges:
            self.add_edge(u, v)

    @staticmethod
    def _key(u, v):
        return (u, v) if u < v else (v, u)

    def has_edge(self, u, v) -> bool:
        return self._key(u, v) in self._pos

    def add_edge(self, u, v):
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u},{v}) out of range")
        key = self._key(u, v)
        if key in self._pos:
            raise ValueError(f"duplicate edge {key}")
        self._pos[key] = len(self.edges)
        self.edges.append(key)
        self.degree[u] += 1
        self.degree[v] += 1

    def remove_edge(self, u, v):
        key = self._key(u, v)
        pos = self._pos.pop(key, None)
        if pos is None:
            raise ValueError(f"edge {key} not present")
        last = self.edges.pop()
        if last != key:
            self.edges[pos] = last
            self._pos[last] = pos
        self.degree[key[0]] -= 1
        self.degree[key[1]] -= 1

    def replace_edges(self, remove, add):
        """Swap two edges for two others, atomically.

        Validates everything before touching the graph: removed edges must be
        present and distinct, added edges distinct and absent (unless they
        coincide with removed ones), and the endpoint multiset must be
        preserved so degrees cannot drift.
        """
        (r1, r2) = (self._key(*remove[0]), self._key(*remove[1]))
        (a1, a2) = (self._key(*add[0]), self._key(*add[1]))
        if r1 == r2 or a1 == a2:
            raise ValueError("edge pairs must be distinct")
        if r1 not in self._pos or r2 not in self._pos:
            raise ValueError("removed edge not present")
        removed = {r1, r2}
        for e in (a1, a2):
            if e not in removed and e in self._pos:
                raise ValueError(f"added edge {e} already present")
        ends = sorted(r1 + r2)
        if sorted(a1 + a2) != ends:
            raise ValueError("exchange does not preserve degrees")
        if removed == {a1, a2}:
            return self
        self.remove_edge(*r1)
        self.remove_edge(*r2)
        self.add_edge(*a1)
        self.add_edge(*a2)
        return self

    def random_edge_index_pair(self, rng):
        """Uniform unordered pair of distinct edge indices."""
        count = len(self.edges)
        if count < 2:
            raise ValueError("need at least 2 edges")
        i = rng.randrange(count)
        j = rng.randrange(count - 1)
        if j >= i:
            j += 1
        return i, j

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.n = self.n
        g.edges = list(self.edges)
        g._pos = dict(self._pos)
        g.degree = list(self.degree)
        return g

    def degree_sequence(self) -> DegreeSequence:
        return DegreeSequence(self.degree)

    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def canonical(self) -> tuple:
        return tuple(sorted(self.edges))

    def audit(self):
        """Debug consistency check between the edge array and the counters."""
        deg = [0] * self.n
        for idx, (u, v) in enumerate(self.edges):
            assert u < v and 0 <= u and v < self.n
            assert self._pos[(u, v)] == idx
            deg[u] += 1
            deg[v] += 1
        assert deg == self.degree
        assert len(self._pos) == len(self.edges)

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and set(self.edges) == set(other.edges)
        )

    def __hash__(self):
        return hash((self.n, frozenset(self.edges)))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={sorted(self.edges)!r})"


class Digraph:
    """Simple digraph; no loops, no parallel arcs, antiparallel pairs allowed."""

    __slots__ = ("n", "arcs", "_pos", "in_degree", "out_degree")

    def __init__(self, n, arcs=()):
        if n < 0:
            raise ValueError("negative vertex count")
        self.n = n
        self.arcs = []
        self._pos = {}
        self.in_degree = [0] * n
        self.out_degree = [0] * n
        for u, v in arcs:
            self.add_arc(u, v)

    def has_arc(self, u, v) -> bool:
        return (u, v) in self._pos

    def add_arc(self, u, v):
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"arc ({u},{v}) out of range")
        if (u, v) in self._pos:
            raise ValueError(f"duplicate arc ({u},{v})")
        self._pos[(u, v)] = len(self.arcs)
        self.arcs.append((u, v))
        self.out_degree[u] += 1
        self.in_degree[v] += 1

    def remove_arc(self, u, v):
        pos = self._pos.pop((u, v), None)
        if pos is None:
            raise ValueError(f"arc ({u},{v}) not present")
        last = self.arcs.pop()
        if last != (u, v):
            self.arcs[pos] = last
            self._pos[last] = pos
        self.out_degree[u] -= 1
        self.in_degree[v] -= 1

    def replace_arcs(self, remove, add):
        """Directed analogue of :meth:`Graph.replace_edges`."""
        r1, r2 = tuple(remove[0]), tuple(remove[1])
        a1, a2 = tuple(add[0]), tuple(add[1])
        if r1 == r2 or a1 == a2:
            raise ValueError("arc pairs must be distinct")
        if r1 not in self._pos or r2 not in self._pos:
            raise ValueError("removed arc not present")
        removed = {r1, r2}
        for e in (a1, a2):
            if e not in removed and e in self._pos:
                raise ValueError(f"added arc {e} already present")
        if sorted((r1[0], r2[0])) != sorted((a1[0], a2[0])) or sorted(
            (r1[1], r2[1])
        ) != sorted((a1[1], a2[1])):
            raise ValueError("exchange does not preserve in/out degrees")
        if removed == {a1, a2}:
            return self
        self.remove_arc(*r1)
        self.remove_arc(*r2)
        self.add_arc(*a1)
        self.add_arc(*a2)
        return self

    def random_arc_index_pair(self, rng):
        count = len(self.arcs)
        if count < 2:
            raise ValueError("need at least 2 arcs")
        i = rng.randrange(count)
        j = rng.randrange(count - 1)
        if j >= i:
            j += 1
        return i, j

    def copy(self) -> "Digraph":
        g = Digraph.__new__(Digraph)
        g.n = self.n
        g.arcs = list(self.arcs)
        g._pos = dict(self._pos)
        g.in_degree = list(self.in_degree)
        g.out_degree = list(self.out_degree)
        return g

    def degree_sequence(self) -> DirectedDegreeSequence:
        return DirectedDegreeSequence(zip(self.in_degree, self.out_degree))

    def arc_set(self) -> frozenset:
        return frozenset(self.arcs)

    def canonical(self) -> tuple:
        return tuple(sorted(self.arcs))

    def audit(self):
        din = [0] * self.n
        dout = [0] * self.n
        for idx, (u, v) in enumerate(self.arcs):
            assert u != v and 0 <= u < self.n and 0 <= v < self.n
            assert self._pos[(u, v)] == idx
            dout[u] += 1
            din[v] += 1
        assert din == self.in_degree and dout == self.out_degree
        assert len(self._pos) == len(self.arcs)

    def __eq__(self, other):
        return (
            isinstance(other, Digraph)
            and self.n == other.n
            and set(self.arcs) == set(other.arcs)
        )

    def __hash__(self):
        return hash((self.n, frozenset(self.arcs)))

    def __repr__(self):
        return f"Digraph(n={self.n}, arcs={sorted(self.arcs)!r})"


def random_distinct_edge_pair(g, rng):
    """Uniform unordered pair of distinct edge (or arc) indices of g."""
    if isinstance(g, Digraph):
        return g.random_arc_index_pair(rng)
    return g.random_edge_index_pair(rng)


def write_edge_list(g, path):
    """Edge-list format: header "n <vertex count>", then one "u v" per line.

    Lines are written in the stored edge order, so read + write round-trips
    a file byte for byte.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {g.n}\n")
        pairs = g.arcs if isinstance(g, Digraph) else g.edges
        for u, v in pairs:
            fh.write(f"{u} {v}\n")


def _read_pairs(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or not lines[0].startswith("n "):
        raise ValueError(f"{path}: missing 'n <count>' header")
    n = int(lines[0].split()[1])
    pairs = []
    for line in lines[1:]:
        u, v = line.split()
        pairs.append((int(u), int(v)))
    return n, pairs


def read_graph(path) -> Graph:
    n, pairs = _read_pairs(path)
    return Graph(n, pairs)


def read_digraph(path) -> Digraph:
    n, pairs = _read_pairs(path)
    return Digraph(n, pairs)
