"""Degree-sequence types, validation and cached statistics."""

from __future__ import annotations

import os


class NotRealizableError(ValueError):
    """No simple graph (or digraph) realizes the requested degrees."""


class DegreeSequence:
    """Prescribed degrees for a simple undirected graph on vertices 0..n-1.

    Immutable; derived statistics are computed once at construction.
    ``a`` is the number of unordered pairs of distinct non-adjacent edges in
    any realization, binom(M/2, 2) - M2/2.  The count depends only on the
    degrees: the adjacent pairs at a vertex of degree d number d*(d-1)/2
    regardless of which graph realizes the sequence.  ``a`` is None when M
    is odd (no realization exists, so the quantity is undefined).
    """

    __slots__ = ("degrees", "n", "M", "M2", "d_min", "d_max", "a")

    def __init__(self, degrees):
        degrees = tuple(int(d) for d in degrees)
        if not degrees:
            raise ValueError("empty degree sequence")
        if any(d < 0 for d in degrees):
            raise ValueError("degrees must be non-negative")
        self.degrees = degrees
        self.n = len(degrees)
        self.M = sum(degrees)
        self.M2 = sum(d * (d - 1) for d in degrees)
        self.d_min = min(degrees)
        self.d_max = max(degrees)
        if self.M % 2:
            self.a = None
        else:
            half = self.M // 2
            self.a = half * (half - 1) // 2 - self.M2 // 2

    def __eq__(self, other):
        return isinstance(other, DegreeSequence) and self.degrees == other.degrees

    def __hash__(self):
        return hash(("DegreeSequence", self.degrees))

    def __repr__(self):
        return f"DegreeSequence({list(self.degrees)!r})"

    def is_graphical(self) -> bool:
        """Erdos-Gallai test (with the even-sum requirement)."""
        if self.M % 2:
            return False
        d = sorted(self.degrees, reverse=True)
        n = self.n
        prefix = 0
        for k in range(1, n + 1):
            prefix += d[k - 1]
            tail = sum(min(k, d[i]) for i in range(k, n))
            if prefix > k * (k - 1) + tail:
                return False
        return True

    def classify(self) -> dict:
        graphical = self.is_graphical()
        stable = (self.d_max - self.d_min + 1) ** 2 <= 4 * self.d_min * (self.n - self.d_max + 1)
        theorem1 = (
            graphical
            and self.d_min >= 1
            and self.d_max >= 3
            and 9 * self.d_max**2 <= self.M
        )
        return {"graphical": graphical, "stable": stable, "theorem1_applicable": theorem1}


class DirectedDegreeSequence:
    """Prescribed (in-degree, out-degree) pairs for a simple digraph.

    Loops are forbidden; antiparallel arc pairs are allowed.  ``r_min`` and
    ``r_max`` are taken over all 2n semi-degrees.
    """

    __slots__ = ("pairs", "n", "sum_in", "sum_out", "r_min", "r_max")

    def __init__(self, pairs):
        pairs = tuple((int(a), int(b)) for a, b in pairs)
        if not pairs:
            raise ValueError("empty directed degree sequence")
        if any(a < 0 or b < 0 for a, b in pairs):
            raise ValueError("degrees must be non-negative")
        self.pairs = pairs
        self.n = len(pairs)
        self.sum_in = sum(a for a, _ in pairs)
        self.sum_out = sum(b for _, b in pairs)
        semis = [x for p in pairs for x in p]
        self.r_min = min(semis)
        self.r_max = max(semis)

    def __eq__(self, other):
        return isinstance(other, DirectedDegreeSequence) and self.pairs == other.pairs

    def __hash__(self):
        return hash(("DirectedDegreeSequence", self.pairs))

    def __repr__(self):
        return f"DirectedDegreeSequence({list(self.pairs)!r})"

    @property
    def m(self) -> int:
        """Arc count of any realization; requires balanced in/out sums."""
        if self.sum_in != self.sum_out:
            raise ValueError(
                f"in-degree sum {self.sum_in} differs from out-degree sum {self.sum_out}"
            )
        return self.sum_in

    def is_digraphical(self) -> bool:
        """Fulkerson/Gale-Ryser style condition for zero-diagonal 0-1 matrices.

        Vertices are taken in non-increasing (out, in) order; the first k
        out-degree stubs must fit under the heads' capacity, where a head
        inside the prefix can absorb at most k-1 arcs (no loops) and one
        outside at most k.
        """
        if self.sum_in != self.sum_out:
            return False
        ps = sorted(self.pairs, key=lambda p: (p[1], p[0]), reverse=True)
        n = self.n
        prefix_out = 0
        for k in range(1, n + 1):
            prefix_out += ps[k - 1][1]
            cap = sum(min(ps[i][0], k - 1) for i in range(k))
            cap += sum(min(ps[i][0], k) for i in range(k, n))
            if prefix_out > cap:
                return False
        return True

    def classify(self) -> dict:
        m = self.m  # raises on unbalanced sums
        return {
            "digraphical": self.is_digraphical(),
            "theorem2_degree_ok": self.r_min >= 1 and self.r_max >= 2 and 16 * self.r_max**2 <= m,
        }


def stats(d: DegreeSequence) -> dict:
    """Cached sequence statistics; ``a`` is None when M is odd."""
    return {"M": d.M, "M2": d.M2, "a": d.a, "d_min": d.d_min, "d_max": d.d_max}


def classify(d: DegreeSequence) -> dict:
    return d.classify()


def classify_directed(dd: DirectedDegreeSequence) -> dict:
    return dd.classify()


def parse_degrees(text: str, directed: bool = False):
    """Parse an inline degree spec: "1,2,2,1" or "1:1,1:1,1:1" (in:out)."""
    items = [tok for tok in text.replace(";", ",").split(",") if tok.strip()]
    if not items:
        raise ValueError("empty degree specification")
    if directed:
        pairs = []
        for tok in items:
            tok = tok.strip()
            sep = ":" if ":" in tok else "/"
            if sep not in tok:
                raise ValueError(f"directed degrees need in:out pairs, got {tok!r}")
            a, b = tok.split(sep)
            pairs.append((int(a), int(b)))
        return DirectedDegreeSequence(pairs)
    return DegreeSequence(int(tok) for tok in items)


def read_degree_file(path, directed: bool = False):
    """One integer per line (undirected) or "in out" per line (directed)."""
    with open(path, "r", encoding="utf-8") as fh:
        rows = [line.split() for line in fh if line.strip()]
    if not rows:
        raise ValueError(f"no degrees in {path}")
    if directed:
        pairs = []
        for row in rows:
            if len(row) != 2:
                raise ValueError(f"expected 'in out' per line, got {' '.join(row)!r}")
            pairs.append((int(row[0]), int(row[1])))
        return DirectedDegreeSequence(pairs)
    for row in rows:
        if len(row) != 1:
            raise ValueError(f"expected one integer per line, got {' '.join(row)!r}")
    return DegreeSequence(int(row[0]) for row in rows)


def load_degrees(spec: str, directed: bool = False):
    """Accept either a degree file path or an inline spec."""
    if os.path.exists(spec):
        return read_degree_file(spec, directed=directed)
    return parse_degrees(spec, directed=directed)
