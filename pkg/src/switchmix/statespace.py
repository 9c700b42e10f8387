"""Exhaustive state-space enumeration and exact transition-matrix analysis.

Transition matrices and total-variation curves are kept in exact rational
arithmetic (integer numerators over a power of the one-step denominator);
floating point appears only in the spectral gap, which is computed by power
iteration to tolerance 1e-12.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .chain import VARIANT_EXACT, switch_neighbour_states
from .construct import realize, realize_directed
from .degseq import DirectedDegreeSequence
from .graph import Digraph, Graph

DEFAULT_CAP = 10**6


class CapExceededError(RuntimeError):
    """Enumeration would exceed the configured state cap."""


# ---------------------------------------------------------------------------
# State enumeration


def _enum_graph_states(degrees, cap):
    """Every labeled simple graph with the exact degree vector, once each.

    Vertices are processed in index order; vertex u picks its neighbours
    among higher-indexed vertices with residual degree (its edges to lower
    vertices are already fixed).  Residual Erdos-Gallai feasibility prunes
    dead branches.
    """
    n = len(degrees)
    if sum(degrees) % 2:
        return []
    states = []
    res = list(degrees)
    chosen = []

    def residual_feasible(lo):
        sub = sorted((res[v] for v in range(lo, n)), reverse=True)
        total = sum(sub)
        if total % 2:
            return False
        k_len = len(sub)
        prefix = 0
        for k in range(1, k_len + 1):
            prefix += sub[k - 1]
            tail = sum(min(k, sub[i]) for i in range(k, k_len))
            if prefix > k * (k - 1) + tail:
                return False
        return True

    def rec(u):
        while u < n and res[u] == 0:
            u += 1
        if u == n:
            states.append(tuple(sorted(chosen)))
            if len(states) > cap:
                raise CapExceededError(f"more than {cap} states")
            return
        need = res[u]
        cand = [v for v in range(u + 1, n) if res[v] > 0]
        if len(cand) < need:
            return
        res[u] = 0
        for pick in combinations(cand, need):
            for v in pick:
                res[v] -= 1
                chosen.append((u, v))
            if residual_feasible(u + 1):
                rec(u + 1)
            for v in pick:
                res[v] += 1
            del chosen[-need:]
        res[u] = need

    rec(0)
    return sorted(states)


def _enum_digraph_states(pairs, cap):
    """Every labeled simple digraph with the exact (in, out) vector."""
    n = len(pairs)
    in_target = [a for a, _ in pairs]
    if sum(in_target) != sum(b for _, b in pairs):
        return []
    states = []
    in_res = list(in_target)
    chosen = []

    def feasible(next_row):
        # each pending column still needs in_res[v] arcs from rows > next_row-1
        remaining_rows = n - next_row
        for v in range(n):
            writers = remaining_rows - (1 if v >= next_row else 0)
            if in_res[v] > writers:
                return False
        return True

    def rec(u):
        if u == n:
            if all(r == 0 for r in in_res):
                states.append(tuple(sorted(chosen)))
                if len(states) > cap:
                    raise CapExceededError(f"more than {cap} states")
            return
        need = pairs[u][1]
        if need == 0:
            if feasible(u + 1):
                rec(u + 1)
            return
        cand = [v for v in range(n) if v != u and in_res[v] > 0]
        if len(cand) < need:
            return
        for pick in combinations(cand, need):
            for v in pick:
                in_res[v] -= 1
                chosen.append((u, v))
            if feasible(u + 1):
                rec(u + 1)
            for v in pick:
                in_res[v] += 1
            del chosen[-need:]

    rec(0)
    return sorted(states)


def enum_states(seq, cap: int = DEFAULT_CAP) -> list:
    """Canonical list of all realizations of a degree sequence.

    States are tuples of sorted edge (or arc) pairs; the list itself is in
    lexicographic order.  Raises CapExceededError past ``cap`` states.
    """
    if isinstance(seq, DirectedDegreeSequence):
        if seq.sum_in != seq.sum_out:
            return []
        return _enum_digraph_states(seq.pairs, cap)
    return _enum_graph_states(seq.degrees, cap)


# ---------------------------------------------------------------------------
# Exact analysis


class StateSpaceAnalysis:
    """Exact chain diagnostics over a fully enumerated state space.

    The transition matrix is held as integer numerators over a common
    denominator (3a, 3*binom(E,2) or binom(m,2)), so propagation is pure
    integer arithmetic and every reported TV value is an exact Fraction.
    """

    def __init__(self, seq, states, start_state, variant=VARIANT_EXACT, eps=Fraction(1, 100)):
        self.seq = seq
        self.directed = isinstance(seq, DirectedDegreeSequence)
        self.variant = variant
        self.states = states
        self.index = {s: i for i, s in enumerate(states)}
        if start_state not in self.index:
            raise ValueError("start state does not realize the degree sequence")
        self.start_index = self.index[start_state]
        self.eps = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
        self._gap = None
        self._fraction_matrix = None
        self._build()

    def _build(self):
        count = len(self.states)
        if self.directed:
            m = self.seq.m
            denom = m * (m - 1) // 2 if m >= 2 else 1
        elif self.variant == VARIANT_EXACT:
            a = self.seq.a
            denom = 3 * a if a else 1
        else:
            half = self.seq.M // 2
            denom = 3 * (half * (half - 1) // 2) if half >= 2 else 1
        num = [[0] * count for _ in range(count)]
        for i, st in enumerate(self.states):
            off = 0
            for nb in switch_neighbour_states(st, self.directed):
                j = self.index[nb]
                num[i][j] += 1
                off += 1
            num[i][i] = denom - off
            if num[i][i] < 0:
                raise AssertionError("negative holding mass; denominator too small")
        self._num = num
        self._denom = denom

    @property
    def transition_matrix(self):
        """The exact matrix as Fractions (built on first use)."""
        if self._fraction_matrix is None:
            d = self._denom
            self._fraction_matrix = [
                [Fraction(x, d) for x in row] for row in self._num
            ]
        return self._fraction_matrix

    def is_symmetric(self) -> bool:
        num = self._num
        count = len(num)
        return all(
            num[i][j] == num[j][i] for i in range(count) for j in range(i + 1, count)
        )

    def rows_sum_to_one(self) -> bool:
        return all(sum(row) == self._denom for row in self._num)

    def min_diagonal(self) -> Fraction:
        return Fraction(min(self._num[i][i] for i in range(len(self._num))), self._denom)

    def laziness_floor(self) -> Fraction:
        """Guaranteed lower bound on every diagonal entry.

        Undirected: the identity matching is drawn with probability 1/3.
        Directed with positive minimum semi-degree: every arc (i,j) extends
        to an incident pair {(i,j),(j,l)}, but the pairs of two antiparallel
        arcs coincide, so only ceil(m/2) distinct held pairs are guaranteed
        (tight on the 1-in 1-out sequence of length 4, whose double-2-cycle
        state holds with probability exactly 1/3 < m/binom(m,2)).  Without
        the semi-degree condition the directed chain can even be periodic.
        """
        if self.directed:
            m = self.seq.m
            if m < 2:
                return Fraction(1)
            if self.seq.r_min < 1:
                return Fraction(0)
            return Fraction((m + 1) // 2, m * (m - 1) // 2)
        return Fraction(1, 3)

    def uniform_is_stationary(self) -> bool:
        """Column sums equal the common denominator (exact check)."""
        count = len(self._num)
        return all(
            sum(self._num[i][j] for i in range(count)) == self._denom
            for j in range(count)
        )

    def _step(self, vec):
        num = self._num
        count = len(num)
        return [
            sum(vec[i] * num[i][j] for i in range(count) if vec[i])
            for j in range(count)
        ]

    def _tv(self, vec, den) -> Fraction:
        count = len(vec)
        return Fraction(sum(abs(count * v - den) for v in vec), 2 * count * den)

    def tv_curve(self, horizon: int, start_index: int | None = None) -> list:
        """TV(0..horizon) to uniform from the designated start, exact."""
        count = len(self.states)
        vec = [0] * count
        vec[self.start_index if start_index is None else start_index] = 1
        den = 1
        curve = [self._tv(vec, den)]
        for _ in range(horizon):
            vec = self._step(vec)
            den *= self._denom
            curve.append(self._tv(vec, den))
        return curve

    def exact_mixing_time(self, eps=None, max_steps: int = 100000) -> int:
        """Least T with TV(t) <= eps for all t >= T, from the worst start.

        TV to stationarity is non-increasing in t, so per start this is the
        first crossing time.  Cost grows with the state count; intended for
        small spaces.  Defaults to the tolerance the analysis was built with.
        """
        if eps is None:
            eps = self.eps
        elif isinstance(eps, float):
            eps = Fraction(str(eps))
        else:
            eps = Fraction(eps)
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0,1)")
        count = len(self.states)
        worst = 0
        for s0 in range(count):
            vec = [0] * count
            vec[s0] = 1
            den = 1
            t = 0
            while self._tv(vec, den) > eps:
                vec = self._step(vec)
                den *= self._denom
                t += 1
                if t > max_steps:
                    raise RuntimeError(f"no mixing within {max_steps} steps")
            worst = max(worst, t)
        return worst

    @property
    def spectral_gap(self) -> float:
        """1 minus the second-largest eigenvalue modulus, by power iteration."""
        if self._gap is None:
            self._gap = self._power_iteration_gap()
        return self._gap

    def _power_iteration_gap(self, tol=1e-12, max_iter=1_000_000) -> float:
        import numpy as np

        count = len(self.states)
        if count == 1:
            return 1.0
        P = np.array(self._num, dtype=float) / float(self._denom)
        B = P - 1.0 / count
        rng = np.random.default_rng(0xC0FFEE)
        v = rng.standard_normal(count)
        v -= v.mean()
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            v = np.ones(count)
            v[0] = -(count - 1)
            norm = float(np.linalg.norm(v))
        v /= norm
        lam = 0.0
        for _ in range(max_iter):
            w = B @ v
            w -= w.mean()
            nw = float(np.linalg.norm(w))
            if nw < 1e-250:
                return 1.0
            if abs(nw - lam) < tol:
                lam = nw
                break
            lam = nw
            v = w / nw
        return 1.0 - lam


def analyze(
    seq,
    start=None,
    eps=Fraction(1, 100),
    variant: str = VARIANT_EXACT,
    cap: int = DEFAULT_CAP,
) -> StateSpaceAnalysis:
    """Enumerate the state space and wrap it in a StateSpaceAnalysis.

    ``start`` may be a Graph/Digraph, a canonical state tuple, or None for
    the deterministic greedy realization.  ``eps`` is the default tolerance
    for exact_mixing_time.
    """
    states = enum_states(seq, cap)
    if not states:
        raise ValueError("degree sequence has no realizations")
    if start is None:
        if isinstance(seq, DirectedDegreeSequence):
            start_state = realize_directed(seq).canonical()
        else:
            start_state = realize(seq).canonical()
    elif isinstance(start, (Graph, Digraph)):
        start_state = start.canonical()
    else:
        start_state = tuple(sorted(tuple(e) for e in start))
    return StateSpaceAnalysis(seq, states, start_state, variant, eps)


# ---------------------------------------------------------------------------
# Exhaustive encoding enumeration (desk scale)


def enum_good_encodings(
    Z,
    require_good: bool | None = None,
    max_n: int = 6,
    max_edges: int = 7,
    cap: int = DEFAULT_CAP,
) -> list:
    """All encodings consistent with Z whose defect layout passes the catalog.

    Entries are searched position by position over {-1,0,1,2} (restricted by
    consistency with Z), with row/column-sum feasibility and defect-count
    pruning.  ``require_good`` additionally applies the degree conditions on
    defect incidences; it defaults to True for graphs and False for digraphs,
    matching the encoding families the repair analysis counts.

    Exponential in the instance size: guarded to n <= max_n and
    |E| <= max_edges (arcs for digraphs).
    """
    from .encoding import Encoding, MODE_DIRECTED, MODE_UNDIRECTED

    directed = isinstance(Z, Digraph)
    if require_good is None:
        require_good = not directed
    n = Z.n
    edge_count = len(Z.arcs) if directed else len(Z.edges)
    if n > max_n or edge_count > max_edges:
        raise CapExceededError(
            f"instance too large for exhaustive encoding search (n={n}, edges={edge_count})"
        )
    target = Z.degree_sequence()
    results = []

    if directed:
        in_target = [a for a, _ in target.pairs]
        out_target = [b for _, b in target.pairs]
        positions = [(i, j) for i in range(n) for j in range(n) if i != j]
        p_cap, q_cap, total_cap = 3, 3, 5
    else:
        out_target = list(target.degrees)
        in_target = out_target
        positions = [(i, j) for i in range(n) for j in range(i + 1, n)]
        p_cap, q_cap, total_cap = 2, 3, 4

    has = Z.has_arc if directed else Z.has_edge
    allowed = [(-1, 0, 1) if has(i, j) else (0, 1, 2) for (i, j) in positions]

    # suffix bounds on how much each row can still gain/lose
    row_lo = [[0] * (len(positions) + 1) for _ in range(n)]
    row_hi = [[0] * (len(positions) + 1) for _ in range(n)]
    for k in range(len(positions) - 1, -1, -1):
        i, j = positions[k]
        for v in range(n):
            row_lo[v][k] = row_lo[v][k + 1]
            row_hi[v][k] = row_hi[v][k + 1]
        lo, hi = allowed[k][0], allowed[k][-1]
        row_lo[i][k] += lo
        row_hi[i][k] += hi
        if not directed:
            row_lo[j][k] += lo
            row_hi[j][k] += hi

    col_lo = [[0] * (len(positions) + 1) for _ in range(n)]
    col_hi = [[0] * (len(positions) + 1) for _ in range(n)]
    if directed:
        for k in range(len(positions) - 1, -1, -1):
            for v in range(n):
                col_lo[v][k] = col_lo[v][k + 1]
                col_hi[v][k] = col_hi[v][k + 1]
            i, j = positions[k]
            col_lo[j][k] += allowed[k][0]
            col_hi[j][k] += allowed[k][-1]

    rowsum = [0] * n
    colsum = [0] * n
    values = [0] * len(positions)
    mode = MODE_DIRECTED if directed else MODE_UNDIRECTED

    def rec(k, p, q):
        if k == len(positions):
            if all(rowsum[v] == out_target[v] for v in range(n)) and (
                not directed or all(colsum[v] == in_target[v] for v in range(n))
            ):
                mat = [[0] * n for _ in range(n)]
                for (i, j), val in zip(positions, values):
                    mat[i][j] = val
                    if not directed:
                        mat[j][i] = val
                enc = Encoding(mode, target, mat)
                if enc.is_valid() and (not require_good or enc.is_good()):
                    results.append(enc)
                    if len(results) > cap:
                        raise CapExceededError(f"more than {cap} encodings")
            return
        i, j = positions[k]
        for val in allowed[k]:
            dp = 1 if val == 2 else 0
            dq = 1 if val == -1 else 0
            if p + dp > p_cap or q + dq > q_cap or p + dp + q + dq > total_cap:
                continue
            rowsum[i] += val
            colsum[j] += val
            if not directed:
                rowsum[j] += val
            values[k] = val
            ok = (
                rowsum[i] + row_lo[i][k + 1] <= out_target[i]
                and rowsum[i] + row_hi[i][k + 1] >= out_target[i]
            )
            if ok and not directed:
                ok = (
                    rowsum[j] + row_lo[j][k + 1] <= out_target[j]
                    and rowsum[j] + row_hi[j][k + 1] >= out_target[j]
                )
            if ok and directed:
                ok = (
                    colsum[j] + col_lo[j][k + 1] <= in_target[j]
                    and colsum[j] + col_hi[j][k + 1] >= in_target[j]
                )
            if ok:
                rec(k + 1, p + dp, q + dq)
            rowsum[i] -= val
            colsum[j] -= val
            if not directed:
                rowsum[j] -= val
            values[k] = 0
        return

    rec(0, 0, 0)
    return results
