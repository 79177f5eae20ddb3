"""Uniform spanning tree statistics on the complete graph K_n.

Vertices are labelled 1..n. Closed-form probabilities are exact rationals
(Fraction) for n <= 64 and floats beyond; the enumeration oracle decodes
every Prufer sequence, and the sampler is Wilson's loop-erased walk rooted
at vertex 1 with walks launched from 2..n in order.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import ArgumentError, DimensionError, SizeError

EXACT_LIMIT = 64
ENUMERATE_LIMIT = 9
KIRCHHOFF_LIMIT = 20


def _check_vertex(n, v):
    if not (isinstance(v, (int, np.integer)) and 1 <= v <= n):
        raise ArgumentError(f"vertex {v!r} is not in 1..{n}")
    return int(v)


def _check_edge(n, e):
    if len(e) != 2:
        raise ArgumentError(f"edge {e!r} must be a pair of vertices")
    a, b = (_check_vertex(n, v) for v in e)
    if a == b:
        raise ArgumentError(f"edge {e!r} is a loop")
    return a, b


def transfer_current(n, e, f):
    """Transfer current Y(e, f) on K_n for oriented edges e=(a,b), f=(c,d).

    Equals (delta_ac - delta_ad - delta_bc + delta_bd)/n: 2/n on equal
    edges, sign-flipped on reversal, +-1/n on one shared endpoint, else 0.
    """
    if n < 2:
        raise ArgumentError("n must be at least 2")
    a, b = _check_edge(n, e)
    c, d = _check_edge(n, f)
    num = (a == c) - (a == d) - (b == c) + (b == d)
    return Fraction(num, n)


def _fraction_det(rows):
    """Exact determinant of a square matrix of Fractions, by elimination."""
    m = [list(r) for r in rows]
    size = len(m)
    sign = 1
    for col in range(size):
        pivot = None
        for r in range(col, size):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        pv = m[col][col]
        for r in range(col + 1, size):
            factor = m[r][col] / pv
            if factor:
                for c in range(col, size):
                    m[r][c] -= factor * m[col][c]
    out = Fraction(sign)
    for i in range(size):
        out *= m[i][i]
    return out


def subset_probability(n, in_edges, out_edges=()):
    """P(all in_edges belong to the UST and all out_edges do not).

    Determinantal block formula on the transfer current: rows for required
    edges come from Y, rows for excluded edges from I - Y. Orientation of
    the input edges does not matter. Exact for n <= 64.
    """
    if n < 2:
        raise ArgumentError("n must be at least 2")
    inside = [tuple(sorted(_check_edge(n, e))) for e in in_edges]
    outside = [tuple(sorted(_check_edge(n, e))) for e in out_edges]
    combined = inside + outside
    if len(set(combined)) != len(combined):
        raise ArgumentError("in_edges and out_edges must be disjoint edge sets")
    k = len(inside)
    size = len(combined)
    if size == 0:
        return Fraction(1) if n <= EXACT_LIMIT else 1.0
    if n <= EXACT_LIMIT:
        rows = []
        for i, e in enumerate(combined):
            row = []
            for j, f in enumerate(combined):
                y = transfer_current(n, e, f)
                if i < k:
                    row.append(y)
                else:
                    row.append((1 if i == j else 0) - y)
            rows.append(row)
        return _fraction_det(rows)
    mat = np.empty((size, size))
    for i, e in enumerate(combined):
        for j, f in enumerate(combined):
            y = float(transfer_current(n, e, f))
            mat[i, j] = y if i < k else (1.0 if i == j else 0.0) - y
    return float(np.linalg.det(mat))


def distance_pmf(n):
    """Exact pmf of the tree distance between vertices 1 and 2.

    Entry k-1 is P(d = k) = (k+1)/n * prod_{i=1}^{k-1} (1 - (i+1)/n),
    for k = 1..n-1.
    """
    if n < 2:
        raise ArgumentError("n must be at least 2")
    out = []
    for k in range(1, n):
        p = Fraction(k + 1, n)
        for i in range(1, k):
            p *= 1 - Fraction(i + 1, n)
        out.append(p)
    return out


def shape_probability(n, k, legs):
    """Probability that k marked vertices span a given binary shape.

    legs are the 2k-3 path lengths of the shape's edges; with m their sum,
    the probability is (n-k)!/(n-m-1)! * (m+1)/n^m. The k=2 case reduces to
    the distance pmf.
    """
    if n < 2:
        raise ArgumentError("n must be at least 2")
    if k < 2 or k > n:
        raise ArgumentError("k must lie in 2..n")
    legs = list(legs)
    if len(legs) != 2 * k - 3:
        raise ArgumentError(f"a {k}-leaf binary shape has {2 * k - 3} legs")
    if any((not isinstance(x, (int, np.integer))) or x < 1 for x in legs):
        raise ArgumentError("leg lengths must be positive integers")
    m = int(sum(legs))
    if m > n - 1:
        raise ArgumentError(f"total leg length {m} cannot exceed n-1 = {n - 1}")
    num = Fraction(1)
    for j in range(n - m, n - k + 1):
        num *= j
    return num * Fraction(m + 1, n**m)


def degree_factorial_moment(n, k):
    """E[deg(v) (deg(v)-1) ... (deg(v)-k+1)] for a fixed vertex of the UST.

    Closed form (k+1) * prod_{i=1}^{k} (1 - i/n); tends to the factorial
    moment k+1 of 1 + Poisson(1).
    """
    if n < 2:
        raise ArgumentError("n must be at least 2")
    if not 1 <= k <= n - 1:
        raise ArgumentError(f"k must lie in 1..{n - 1}")
    out = Fraction(k + 1)
    for i in range(1, k + 1):
        out *= 1 - Fraction(i, n)
    return out


@dataclass(frozen=True)
class LeafStatistics:
    p_leaf: Fraction
    expected_fraction: Fraction
    cov_pair: Fraction
    var_fraction: Fraction


def leaf_statistics(n):
    """Exact leaf probability, pair covariance, and leaf-fraction variance.

    p_leaf = (1-1/n)^(n-2); cov_pair = (1-2/n)^(n-2) - (1-1/n)^(2(n-2));
    the fraction variance combines them over the n vertices.
    """
    if n < 3:
        raise ArgumentError("n must be at least 3")
    p = (1 - Fraction(1, n)) ** (n - 2)
    both = (1 - Fraction(2, n)) ** (n - 2)
    cov = both - p * p
    var = p * (1 - p) / n + Fraction(n - 1, n) * cov
    return LeafStatistics(p, p, cov, var)


class SpanningTree:
    """A labelled spanning tree of K_n, stored as its sorted edge list."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n, edges):
        edges = tuple(sorted(tuple(sorted(_check_edge(n, e))) for e in edges))
        if len(edges) != n - 1 or len(set(edges)) != n - 1:
            raise ArgumentError(f"a spanning tree of K_{n} has {n - 1} distinct edges")
        parent = list(range(n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                raise ArgumentError("edge set contains a cycle")
            parent[ra] = rb
        self.n = n
        self.edges = edges
        self._adj = None

    def _adjacency(self):
        if self._adj is None:
            adj = {v: [] for v in range(1, self.n + 1)}
            for a, b in self.edges:
                adj[a].append(b)
                adj[b].append(a)
            self._adj = adj
        return self._adj

    def degree(self, v):
        return len(self._adjacency()[_check_vertex(self.n, v)])

    def leaves(self):
        adj = self._adjacency()
        return tuple(v for v in range(1, self.n + 1) if len(adj[v]) == 1)

    def contains_edge(self, e):
        return tuple(sorted(_check_edge(self.n, e))) in set(self.edges)

    def distance(self, u, v):
        u = _check_vertex(self.n, u)
        v = _check_vertex(self.n, v)
        if u == v:
            return 0
        adj = self._adjacency()
        seen = {u: 0}
        frontier = [u]
        while frontier:
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if y not in seen:
                        seen[y] = seen[x] + 1
                        if y == v:
                            return seen[y]
                        nxt.append(y)
            frontier = nxt
        raise ArgumentError("vertices are not connected")  # unreachable for a tree

    def key(self):
        return self.edges

    def __eq__(self, other):
        return isinstance(other, SpanningTree) and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"SpanningTree(n={self.n}, edges={self.edges})"


def _prufer_decode(n, seq):
    """Edge list of the labelled tree with Prufer sequence seq (1-based)."""
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(v for v in range(1, n + 1) if degree[v] == 1)
        edges.append((leaf, x) if leaf < x else (x, leaf))
        degree[leaf] -= 1
        degree[x] -= 1
    rest = [v for v in range(1, n + 1) if degree[v] == 1]
    edges.append((rest[0], rest[1]))
    return edges


def enumerate_trees(n):
    """Every labelled spanning tree of K_n exactly once, via Prufer decoding."""
    if n < 2:
        raise ArgumentError("n must be at least 2")
    if n > ENUMERATE_LIMIT:
        raise SizeError(f"enumeration is capped at n = {ENUMERATE_LIMIT}")
    if n == 2:
        yield SpanningTree(2, [(1, 2)])
        return
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        yield SpanningTree(n, _prufer_decode(n, seq))


def sample_parents(n, rng, backend=None):
    """Wilson parent array: entry v is the parent of vertex v+1, 0-based,
    rooted at vertex 1 (index 0, parent -1)."""
    if n < 2:
        raise ArgumentError("n must be at least 2")
    return _kernels.wilson_parents(n, rng, force=backend)


def sample_wilson(n, rng, backend=None):
    """One uniform spanning tree of K_n via Wilson's algorithm."""
    parents = sample_parents(n, rng, backend=backend)
    edges = [(i + 1, int(parents[i]) + 1) for i in range(1, n)]
    return SpanningTree(n, edges)


def _distance_from_parents(parents):
    d = 0
    u = 1
    while u != 0:
        u = int(parents[u])
        d += 1
    return d


def sample_statistics(n, num, statistic, rng, backend=None):
    """Vector of `num` independent UST statistics on K_n.

    statistic: 'distance' (tree distance between vertices 1 and 2),
    'degree' (degree of vertex 1), or 'leaves' (total leaf count).
    """
    if statistic not in ("distance", "degree", "leaves"):
        raise ArgumentError(f"unknown statistic {statistic!r}")
    out = np.empty(num, dtype=np.int64)
    for t in range(num):
        parents = sample_parents(n, rng, backend=backend)
        if statistic == "distance":
            out[t] = _distance_from_parents(parents)
        elif statistic == "degree":
            out[t] = np.count_nonzero(parents[1:] == 0)
        else:
            deg = np.bincount(parents[1:], minlength=n)
            deg[1:] += 1
            out[t] = np.count_nonzero(deg == 1)
    return out


def _bareiss_det(mat):
    """Exact determinant of an integer matrix, fraction-free elimination."""
    m = [[int(x) for x in row] for row in mat]
    size = len(m)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for col in range(size - 1):
        if m[col][col] == 0:
            for r in range(col + 1, size):
                if m[r][col] != 0:
                    m[col], m[r] = m[r], m[col]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(col + 1, size):
            for j in range(col + 1, size):
                m[i][j] = (m[i][j] * m[col][col] - m[i][col] * m[col][j]) // prev
            m[i][col] = 0
        prev = m[col][col]
    return sign * m[size - 1][size - 1]


def kirchhoff_count(adjacency):
    """Exact spanning-tree count of a simple graph from its adjacency matrix.

    Integer determinant of the reduced Laplacian; a disconnected graph
    yields 0. Capped at 20 vertices.
    """
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("adjacency matrix must be square")
    size = a.shape[0]
    if size > KIRCHHOFF_LIMIT:
        raise SizeError(f"spanning-tree counting is capped at {KIRCHHOFF_LIMIT} vertices")
    if size == 0:
        raise ArgumentError("graph must have at least one vertex")
    ai = a.astype(np.int64)
    if not np.array_equal(ai, a):
        raise ArgumentError("adjacency entries must be integers")
    if not np.array_equal(ai, ai.T):
        raise ArgumentError("adjacency matrix must be symmetric")
    if np.any((ai != 0) & (ai != 1)) or np.any(np.diag(ai) != 0):
        raise ArgumentError("graph must be simple: 0/1 entries, empty diagonal")
    if size == 1:
        return 1
    lap = np.diag(ai.sum(axis=1)) - ai
    reduced = lap[1:, 1:]
    return int(_bareiss_det(reduced.tolist()))
