"""Stochastic-dominance verification, exact and empirical.

Finite posets carry the order; exact checks run either by enumerating every
up-closed set or by a Strassen coupling computed as an integer max-flow,
and the two agree: the flow value minus one equals the worst upset margin.
On top of that sit verifiers for the two domination theorems (projection
frames under containment, Vandermonde-weighted laws under componentwise
order), the determinant identities and positivity lemma behind them, and a
DKW-banded comparison for samples with no finitely computable law.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dpp import ProjectionFrame, projection_exact_law
from .errors import (
    ArgumentError,
    DimensionError,
    PreconditionError,
    SizeError,
)
from .numerics import det, hermitian_eigenvalues
from .stats import dkw_epsilon

FLOW_SCALE = 1 << 40
FLOW_TOL = 1e-9
UPSET_LIMIT = 25
PAIR_LIMIT = 10**7


class FinitePoset:
    """Partial order on an explicit element list.

    Built either from strict-order pairs (transitively closed here) or from
    a comparator; reflexivity, antisymmetry, and transitivity are verified.
    """

    def __init__(self, elements, leq):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise ArgumentError("poset elements must be distinct")
        self._index = {e: i for i, e in enumerate(self.elements)}
        leq = np.asarray(leq, dtype=bool)
        n = len(self.elements)
        if leq.shape != (n, n):
            raise DimensionError("order matrix shape must match the elements")
        if not np.all(np.diag(leq)):
            raise ArgumentError("order must be reflexive")
        if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
            raise ArgumentError("order is not antisymmetric (contains a cycle)")
        closure = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
        if np.any(closure & ~leq):
            raise ArgumentError("order is not transitive")
        self.leq_matrix = leq
        self.leq_matrix.setflags(write=False)

    @classmethod
    def from_pairs(cls, elements, pairs):
        """Order generated by strict pairs (a, b) meaning a < b."""
        elements = tuple(elements)
        index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        leq = np.eye(n, dtype=bool)
        for a, b in pairs:
            if a not in index or b not in index:
                raise ArgumentError(f"pair ({a!r}, {b!r}) is not over the elements")
            leq[index[a], index[b]] = True
        while True:
            closure = leq | ((leq.astype(np.int64) @ leq.astype(np.int64)) > 0)
            if np.array_equal(closure, leq):
                break
            leq = closure
        return cls(elements, leq)

    @classmethod
    def from_comparator(cls, elements, comparator):
        """Order defined by a two-argument predicate x <= y."""
        elements = tuple(elements)
        n = len(elements)
        leq = np.eye(n, dtype=bool)
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                if i != j and comparator(a, b):
                    leq[i, j] = True
        return cls(elements, leq)

    @classmethod
    def chain(cls, elements):
        elements = tuple(elements)
        n = len(elements)
        return cls(elements, np.triu(np.ones((n, n), dtype=bool)))

    @classmethod
    def antichain(cls, elements):
        elements = tuple(elements)
        return cls(elements, np.eye(len(elements), dtype=bool))

    @property
    def size(self):
        return len(self.elements)

    def index(self, element):
        try:
            return self._index[element]
        except KeyError:
            raise ArgumentError(f"{element!r} is not a poset element") from None

    def leq(self, a, b):
        return bool(self.leq_matrix[self.index(a), self.index(b)])

    def up_closure(self, subset):
        """Smallest up-closed set containing the given elements."""
        mask = np.zeros(self.size, dtype=bool)
        for e in subset:
            mask |= self.leq_matrix[self.index(e)]
        return frozenset(self.elements[i] for i in np.flatnonzero(mask))

    def is_upset(self, subset):
        return self.up_closure(subset) == frozenset(subset)

    def comparable_pairs(self):
        """Number of ordered pairs (a, b) with a <= b, diagonal included."""
        return int(self.leq_matrix.sum())


def upset_enumerate(poset):
    """Every up-closed subset exactly once, as frozensets of labels."""
    n = poset.size
    if n > UPSET_LIMIT:
        raise SizeError(
            f"{n} elements exceed the enumeration cap {UPSET_LIMIT}; "
            "use strassen_flow"
        )
    strict = poset.leq_matrix & ~np.eye(n, dtype=bool)
    above = strict.sum(axis=1)
    order = sorted(range(n), key=lambda i: int(above[i]))
    succ_mask = [0] * n
    for i in range(n):
        for j in np.flatnonzero(strict[i]):
            succ_mask[i] |= 1 << int(j)

    def rec(pos, mask):
        if pos == n:
            yield mask
            return
        i = order[pos]
        yield from rec(pos + 1, mask)
        if succ_mask[i] & mask == succ_mask[i]:
            yield from rec(pos + 1, mask | (1 << i))

    for mask in rec(0, 0):
        yield frozenset(
            poset.elements[i] for i in range(n) if mask >> i & 1
        )


class MeasurePair:
    """Two probability assignments over (subsets of) one poset's elements."""

    def __init__(self, poset, p1, p2, tol=1e-10):
        self.poset = poset
        self.p1 = self._clean(poset, dict(p1), tol)
        self.p2 = self._clean(poset, dict(p2), tol)

    @staticmethod
    def _clean(poset, p, tol):
        out = {}
        total = 0.0
        for key, val in p.items():
            poset.index(key)
            val = float(val)
            if val < -1e-12:
                raise ArgumentError(f"negative mass {val!r} at {key!r}")
            val = max(val, 0.0)
            if val > 0.0:
                out[key] = val
            total += val
        if abs(total - 1.0) > tol:
            raise ArgumentError(f"measure mass {total!r} is not 1 within {tol}")
        return out


@dataclass(frozen=True)
class DominanceReport:
    dominated: bool
    margin: float
    witness: object
    method: str

    def payload(self):
        out = {
            "check": "dominance_exact",
            "verdict": bool(self.dominated),
            "margin": self.margin,
            "method": self.method,
        }
        if self.witness is not None:
            out["witness"] = sorted(map(str, self.witness))
        return out


def dominance_exact(poset, pair, method="enumerate"):
    """Does pair.p2 stochastically dominate pair.p1 on the poset?

    margin = min over upsets U of p2(U) - p1(U); dominance holds iff the
    margin is >= -1e-10, and the witness is the minimizing upset when it
    is negative. Methods: 'enumerate' walks every upset, 'flow' reads the
    same margin off the Strassen max-flow.
    """
    if method == "flow":
        res = strassen_flow(poset, pair)
        margin = res.flow_value - 1.0
        witness = res.witness if not res.feasible else None
        return DominanceReport(res.feasible, margin, witness, "flow")
    if method != "enumerate":
        raise ArgumentError(f"unknown method {method!r}")
    best = math.inf
    argmin = None
    for upset in upset_enumerate(poset):
        m1 = sum(pair.p1.get(e, 0.0) for e in upset)
        m2 = sum(pair.p2.get(e, 0.0) for e in upset)
        margin = m2 - m1
        if margin < best:
            best = margin
            argmin = upset
    dominated = best >= -1e-10
    witness = argmin if not dominated else None
    return DominanceReport(dominated, float(best), witness, "enumerate")


class _Dinic:
    def __init__(self, nodes):
        self.adj = [[] for _ in range(nodes)]

    def add_edge(self, u, v, cap):
        self.adj[u].append([v, cap, len(self.adj[v])])
        self.adj[v].append([u, 0, len(self.adj[u]) - 1])

    def _levels(self, s, t):
        level = [-1] * len(self.adj)
        level[s] = 0
        queue = [s]
        for u in queue:
            for v, cap, _ in self.adj[u]:
                if cap > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _push(self, u, t, limit, level, it):
        if u == t:
            return limit
        while it[u] < len(self.adj[u]):
            edge = self.adj[u][it[u]]
            v, cap, rev = edge
            if cap > 0 and level[v] == level[u] + 1:
                pushed = self._push(v, t, min(limit, cap), level, it)
                if pushed > 0:
                    edge[1] -= pushed
                    self.adj[v][rev][1] += pushed
                    return pushed
            it[u] += 1
        return 0

    def maxflow(self, s, t):
        flow = 0
        while True:
            level = self._levels(s, t)
            if level is None:
                return flow
            it = [0] * len(self.adj)
            while True:
                pushed = self._push(s, t, 1 << 62, level, it)
                if pushed == 0:
                    break
                flow += pushed

    def reachable(self, s):
        seen = [False] * len(self.adj)
        seen[s] = True
        queue = [s]
        for u in queue:
            for v, cap, _ in self.adj[u]:
                if cap > 0 and not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return seen


@dataclass(frozen=True)
class CouplingResult:
    feasible: bool
    flow_value: float
    coupling: object
    witness: object

    def payload(self):
        out = {
            "check": "strassen_flow",
            "verdict": bool(self.feasible),
            "margin": self.flow_value - 1.0,
            "flow_value": self.flow_value,
        }
        if self.witness is not None:
            out["witness"] = sorted(map(str, self.witness))
        return out


def strassen_flow(poset, pair):
    """Monotone coupling of pair.p1 below pair.p2, as an integer max-flow.

    Source feeds p1 atoms, sinks drain p2 atoms, and unbounded edges join
    comparable pairs; capacities are probabilities scaled by 2^40. Feasible
    iff the flow reaches 1 - 1e-9, in which case the coupling (pair -> mass)
    comes off the middle edges; otherwise the residual cut projects to a
    violating upset whose margin equals flow - 1 exactly.
    """
    left = sorted(pair.p1, key=poset.index)
    right = sorted(pair.p2, key=poset.index)
    if len(left) * len(right) > PAIR_LIMIT:
        raise SizeError("comparable-pair count exceeds the flow cap")
    lpos = {e: 1 + i for i, e in enumerate(left)}
    rpos = {e: 1 + len(left) + i for i, e in enumerate(right)}
    sink = 1 + len(left) + len(right)
    net = _Dinic(sink + 1)
    for e in left:
        net.add_edge(0, lpos[e], round(pair.p1[e] * FLOW_SCALE))
    for e in right:
        net.add_edge(rpos[e], sink, round(pair.p2[e] * FLOW_SCALE))
    middle = []
    for a in left:
        ia = poset.index(a)
        for b in right:
            if poset.leq_matrix[ia, poset.index(b)]:
                net.add_edge(lpos[a], rpos[b], FLOW_SCALE + 1)
                middle.append((a, b, len(net.adj[lpos[a]]) - 1))
    flow = net.maxflow(0, sink)
    flow_value = flow / FLOW_SCALE
    feasible = flow_value >= 1.0 - FLOW_TOL
    if feasible:
        coupling = {}
        for a, b, slot in middle:
            edge = net.adj[lpos[a]][slot]
            used = net.adj[edge[0]][edge[2]][1]
            if used > 0:
                coupling[(a, b)] = used / FLOW_SCALE
        return CouplingResult(True, flow_value, coupling, None)
    seen = net.reachable(0)
    reached = [e for e in left if seen[lpos[e]]]
    witness = poset.up_closure(reached)
    return CouplingResult(False, flow_value, None, witness)


@dataclass(frozen=True)
class LyonsReport:
    feasible: bool
    flow_value: float
    flow_margin: float
    exhaustive_margin: object
    worst_family: object

    def payload(self):
        out = {
            "check": "verify_lyons",
            "verdict": bool(self.feasible)
            and (self.exhaustive_margin is None or self.exhaustive_margin >= -1e-10),
            "margin": self.flow_margin,
            "flow_value": self.flow_value,
        }
        if self.exhaustive_margin is not None:
            out["exhaustive_margin"] = self.exhaustive_margin
            out["worst_family"] = sorted(map(str, self.worst_family))
        return out


def verify_lyons(space, phis, exhaustive_cap=4096, tol=1e-8):
    """Check that adding one orthonormal function pushes the law upward.

    phis holds n+1 rows orthonormal under the space's weights; P1 is the
    exact law of the first n rows' projection process, P2 of all n+1. The
    containment order (n-subsets below their (n+1)-supersets) is checked by
    max-flow; when 2^C(|E|, n) <= exhaustive_cap every increasing family is
    also checked directly and the worst margin reported.
    """
    phis = np.asarray(phis)
    if phis.ndim != 2 or phis.shape[0] < 2:
        raise DimensionError("phis must hold at least two rows")
    gram = (phis * space.weights) @ phis.conj().T
    defect = float(np.max(np.abs(gram - np.eye(phis.shape[0]))))
    if defect > tol:
        raise PreconditionError(
            f"rows are not orthonormal within {tol}", detail=defect
        )
    n = phis.shape[0] - 1
    law1 = projection_exact_law(ProjectionFrame(space, phis[:n], tol=max(tol, 1e-10)))
    law2 = projection_exact_law(ProjectionFrame(space, phis, tol=max(tol, 1e-10)))
    small = sorted(law1.probs)
    big = sorted(law2.probs)
    elements = small + big
    pairs = [
        (a, b) for a in small for b in big if set(a).issubset(b)
    ]
    poset = FinitePoset.from_pairs(elements, pairs)
    pair = MeasurePair(poset, law1.probs, law2.probs)
    res = strassen_flow(poset, pair)
    exhaustive_margin = None
    worst_family = None
    if 2 ** len(small) <= exhaustive_cap:
        supmask = []
        for b in big:
            mask = 0
            for i, a in enumerate(small):
                if set(a).issubset(b):
                    mask |= 1 << i
            supmask.append(mask)
        p1vec = [law1.probs[a] for a in small]
        p2vec = [law2.probs[b] for b in big]
        best = math.inf
        for fam in range(1 << len(small)):
            m1 = sum(p1vec[i] for i in range(len(small)) if fam >> i & 1)
            m2 = sum(p2vec[j] for j in range(len(big)) if supmask[j] & fam)
            margin = m2 - m1
            if margin < best:
                best = margin
                worst_family = fam
        exhaustive_margin = float(best)
        worst_family = tuple(
            small[i] for i in range(len(small)) if worst_family >> i & 1
        )
    return LyonsReport(
        res.feasible, res.flow_value, res.flow_value - 1.0,
        exhaustive_margin, worst_family,
    )


@dataclass(frozen=True)
class GeometricWeight:
    """Lattice weight q^x; shifting by y multiplies masses by q^y."""

    q: float

    def __post_init__(self):
        if not (isinstance(self.q, float) and 0.0 < self.q < 1.0):
            raise ArgumentError("q must lie in (0, 1)")

    def mass(self, x):
        return self.q ** int(x)


@dataclass(frozen=True)
class ExponentialGridWeight:
    """Lattice weight e^(-rate*x); shifting multiplies masses by e^(-rate*y)."""

    rate: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.rate, float) and self.rate > 0):
            raise ArgumentError("rate must be positive")

    def mass(self, x):
        return math.exp(-self.rate * int(x))


@dataclass(frozen=True)
class VandermondeReport:
    feasible: bool
    flow_value: float
    margin: float
    checked_pairs: int

    def payload(self):
        return {
            "check": "verify_vandermonde",
            "verdict": bool(self.feasible),
            "margin": self.margin,
            "flow_value": self.flow_value,
            "monotone_pairs_checked": self.checked_pairs,
        }


def _squared_vandermonde(vec):
    out = 1.0
    for i in range(len(vec)):
        for j in range(i + 1, len(vec)):
            out *= float(vec[j] - vec[i]) ** 2
    return out


def verify_vandermonde(weight, H, n, cutoff, spot_checks=1000):
    """Check that an increasing factor H pushes a Vandermonde law upward.

    P1 prop. to V(x)^2 prod mu(x_i) and P2 prop. to V(x)^2 H(x) prod mu(x_i)
    on increasing n-vectors over {0..cutoff}, compared in the componentwise
    order via max-flow. Only the two built-in translation-invariant weights
    are accepted; H is spot-checked for monotonicity on random comparable
    pairs first, and a violating pair raises a precondition error.
    """
    if not isinstance(weight, (GeometricWeight, ExponentialGridWeight)):
        raise ArgumentError(
            "weight must be GeometricWeight or ExponentialGridWeight; these "
            "carry the translation property the theorem needs"
        )
    if n < 1:
        raise ArgumentError("n must be at least 1")
    if cutoff < n - 1:
        raise ArgumentError("cutoff too small to host n distinct points")
    elements = list(itertools.combinations(range(cutoff + 1), n))
    rng = np.random.default_rng(0x5D0C)
    checked = 0
    for _ in range(spot_checks):
        w = elements[int(rng.integers(len(elements)))]
        v = []
        lo = 0
        for i in range(n):
            if lo > w[i]:
                break
            v.append(int(rng.integers(lo, w[i] + 1)))
            lo = v[-1] + 1
        else:
            hv, hw = float(H(tuple(v))), float(H(w))
            if hv > hw + 1e-12:
                raise PreconditionError(
                    "H is not increasing on a sampled comparable pair",
                    detail=(tuple(v), w, hv, hw),
                )
            checked += 1
    base = {}
    lifted = {}
    for x in elements:
        core = _squared_vandermonde(x)
        for xi in x:
            core *= weight.mass(xi)
        base[x] = core
        lifted[x] = core * float(H(x))
    tot1 = sum(base.values())
    tot2 = sum(lifted.values())
    if tot1 <= 0 or tot2 <= 0:
        raise ArgumentError("a law degenerated to zero mass on the cutoff domain")
    p1 = {k: v / tot1 for k, v in base.items()}
    p2 = {k: v / tot2 for k, v in lifted.items()}
    poset = FinitePoset.from_comparator(
        elements, lambda a, b: all(ai <= bi for ai, bi in zip(a, b))
    )
    pair = MeasurePair(poset, p1, p2)
    res = strassen_flow(poset, pair)
    return VandermondeReport(
        res.feasible, res.flow_value, res.flow_value - 1.0, checked
    )


@dataclass(frozen=True)
class RatioReport:
    ratio_monotone: bool
    dominates: bool
    max_violation: float
    reverse_violation: float

    def payload(self):
        return {
            "check": "density_ratio_domination",
            "verdict": bool(self.ratio_monotone and self.dominates),
            "margin": -self.max_violation,
            "ratio_monotone": bool(self.ratio_monotone),
            "reverse_violation": self.reverse_violation,
        }


def density_ratio_domination(weights, f, g, tol=1e-10):
    """Likelihood-ratio test on a chain: does mu_f dominate mu_g?

    f and g are densities against the positive weight vector, each
    normalized to total mass one. If f/g is nondecreasing along the chain
    where g > 0, mu_f should dominate mu_g; the CDF comparison is verified
    pointwise in both directions and reported.
    """
    w = np.asarray(weights, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if w.ndim != 1 or f.shape != w.shape or g.shape != w.shape:
        raise DimensionError("weights, f, g must be 1-D of the same length")
    if np.any(w <= 0):
        raise ArgumentError("weights must be positive")
    if np.any(f < 0) or np.any(g < 0):
        raise ArgumentError("densities must be nonnegative")
    if abs(float(np.sum(f * w)) - 1.0) > tol or abs(float(np.sum(g * w)) - 1.0) > tol:
        raise ArgumentError("densities must be normalized under the weights")
    pos = g > 0
    ratios = f[pos] / g[pos]
    monotone = bool(np.all(np.diff(ratios) >= -1e-12))
    cdf_f = np.cumsum(f * w)
    cdf_g = np.cumsum(g * w)
    max_violation = float(np.max(cdf_f - cdf_g))
    reverse = float(np.max(cdf_g - cdf_f))
    dominates = max_violation <= tol
    return RatioReport(monotone, dominates, max_violation, reverse)


@dataclass(frozen=True)
class EmpiricalReport:
    verdict: str
    margin: float
    band: float
    d_forward: float
    d_reverse: float

    def payload(self):
        return {
            "check": "empirical_dominance",
            "verdict": self.verdict,
            "margin": self.margin,
            "band": self.band,
            "d_forward": self.d_forward,
            "d_reverse": self.d_reverse,
        }


def empirical_dominance(sample1, sample2, delta):
    """DKW-banded CDF comparison: does sample2's law dominate sample1's?

    With band = eps1 + eps2 from the DKW inequality at level delta per
    sample, 'dominates' requires sup(F2 - F1) within the band while
    sup(F1 - F2) clears it; the symmetric condition gives 'dominated-by';
    anything else is 'inconclusive'.
    """
    x1 = np.sort(np.asarray(sample1, dtype=np.float64).ravel())
    x2 = np.sort(np.asarray(sample2, dtype=np.float64).ravel())
    if x1.size < 100 or x2.size < 100:
        raise SizeError("empirical dominance needs at least 100 points per sample")
    if not 0.0 < delta < 1.0:
        raise ArgumentError("delta must lie in (0, 1)")
    band = dkw_epsilon(x1.size, delta) + dkw_epsilon(x2.size, delta)
    pooled = np.concatenate([x1, x2])
    pooled.sort()
    f1 = np.searchsorted(x1, pooled, side="right") / x1.size
    f2 = np.searchsorted(x2, pooled, side="right") / x2.size
    d_forward = float(np.max(f2 - f1))  # violation of "2 dominates 1"
    d_reverse = float(np.max(f1 - f2))
    margin_dom = min(band - d_forward, d_reverse - band)
    margin_rev = min(band - d_reverse, d_forward - band)
    if margin_dom > 0:
        return EmpiricalReport("dominates", margin_dom, band, d_forward, d_reverse)
    if margin_rev > 0:
        return EmpiricalReport("dominated-by", margin_rev, band, d_forward, d_reverse)
    return EmpiricalReport(
        "inconclusive", max(margin_dom, margin_rev), band, d_forward, d_reverse
    )


def detequality_discrete(frame, subset):
    """Residual of the one-column determinant expansion identity.

    For a frame of n+1 rows and an n-subset A of the points,
    sum over x outside A of (-1)^r(A,x) conj(phi_{n+1}(x)) det(M_{A+x})
    equals det(Q_A), with M the full scaled matrix, Q its first n rows,
    and r(A,x) the number of elements of A beyond x.
    """
    rank = frame.rank
    n = rank - 1
    if n < 1:
        raise ArgumentError("frame must have at least two rows")
    idx = sorted(frame.space.index_of(x) for x in subset)
    if len(idx) != n or len(set(idx)) != n:
        raise ArgumentError(f"subset must pick {n} distinct points")
    scaled = frame.scaled_rows()
    npts = frame.space.size
    if npts <= n:
        raise ArgumentError("the ground set must be larger than the subset")
    rhs = complex(det(scaled[:n][:, idx]))
    lhs = 0.0 + 0.0j
    for x in range(npts):
        if x in idx:
            continue
        cols = sorted(idx + [x])
        r = sum(1 for k in idx if k > x)
        term = complex(det(scaled[:, cols]))
        lhs += (-1) ** r * np.conj(scaled[rank - 1, x]) * term
    return float(abs(lhs - rhs))


@dataclass(frozen=True)
class PositivityReport:
    factorization_residual: float
    min_eigenvalue: float

    @property
    def psd(self):
        return self.min_eigenvalue >= -1e-10

    def payload(self):
        return {
            "check": "positivity_check",
            "verdict": bool(self.psd and self.factorization_residual < 1e-12),
            "residuals": {
                "factorization": self.factorization_residual,
                "min_eigenvalue": self.min_eigenvalue,
            },
        }


def positivity_check(points, phi, eps, family):
    """Gram-type matrix over a family of n-subsets is PSD, by factorization.

    M(A, A) sums |phi|^2 over A; M(A, C) for |A ∩ C| = n-1 couples the two
    symmetric-difference points through the sign function eps(point, subset);
    other entries vanish. X indexes (n-1)-subsets T, with X(A, T) nonzero
    only for T inside A. The check verifies M = X X* entrywise and bounds
    the minimum eigenvalue.
    """
    family = [tuple(sorted(a)) for a in family]
    if not family:
        raise ArgumentError("family must be nonempty")
    n = len(family[0])
    if any(len(a) != n or len(set(a)) != n for a in family):
        raise ArgumentError("family members must be distinct-point n-subsets")
    if len(set(family)) != len(family):
        raise ArgumentError("family members must be distinct")
    points = list(points)
    values = {x: complex(phi(x)) for x in points}
    size = len(family)
    mat = np.zeros((size, size), dtype=complex)
    for i, a in enumerate(family):
        mat[i, i] = sum(abs(values[x]) ** 2 for x in a)
        for j in range(i + 1, size):
            c = family[j]
            inter = set(a) & set(c)
            if len(inter) == n - 1:
                x = next(iter(set(a) - inter))
                y = next(iter(set(c) - inter))
                val = eps(x, a) * eps(y, c) * values[x] * np.conj(values[y])
                mat[i, j] = val
                mat[j, i] = np.conj(val)
    subs = list(itertools.combinations(points, n - 1)) if n > 1 else [()]
    sub_index = {t: k for k, t in enumerate(subs)}
    xmat = np.zeros((size, len(subs)), dtype=complex)
    for i, a in enumerate(family):
        for drop in a:
            t = tuple(sorted(set(a) - {drop}))
            xmat[i, sub_index[t]] = eps(drop, a) * values[drop]
    residual = float(np.max(np.abs(mat - xmat @ xmat.conj().T)))
    eig = hermitian_eigenvalues(mat)
    return PositivityReport(residual, float(eig[0]))


def laguerre_values(count, points):
    """Values of the first `count` orthonormal Laguerre polynomials."""
    x = np.asarray(points, dtype=np.float64)
    rows = np.empty((count, x.shape[0]))
    rows[0] = 1.0
    if count > 1:
        rows[1] = 1.0 - x
    for k in range(1, count - 1):
        rows[k + 1] = ((2 * k + 1 - x) * rows[k] - k * rows[k - 1]) / (k + 1)
    return rows


def detequality_continuous(n, x, npoints=64):
    """Quadrature residual of the appended-column integral identity.

    With phi_1..phi_{n+1} the orthonormal Laguerre functions, integrating
    conj(phi_{n+1})(t) times the feature determinant at (x_1..x_n, t)
    against e^{-t} dt recovers the n-point feature determinant at x.
    """
    if n < 1:
        raise ArgumentError("n must be at least 1")
    if npoints < n + 1:
        raise PreconditionError(
            f"{npoints}-point quadrature cannot integrate degree {2 * n + 1}"
        )
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != n or np.any(x < 0):
        raise ArgumentError("x must hold n nonnegative reals")
    nodes, weights = np.polynomial.laguerre.laggauss(npoints)
    lag_x = laguerre_values(n + 1, x)
    lag_t = laguerre_values(n + 1, nodes)
    rhs = float(det(lag_x[:n]))
    lhs = 0.0
    for t_idx in range(npoints):
        feat = np.empty((n + 1, n + 1))
        feat[:, :n] = lag_x
        feat[:, n] = lag_t[:, t_idx]
        lhs += weights[t_idx] * lag_t[n, t_idx] * float(det(feat))
    return float(abs(lhs - rhs))


def detinequality_continuous(n, threshold, mode="min", npoints=64):
    """Both sides of the symmetrized Cauchy-Schwarz determinant inequality.

    The region A collects n-vectors with min >= threshold (mode 'min') or
    max <= threshold (mode 'max'). Returns (lhs, rhs): the A-restricted
    mean square of the n-point feature determinant over n! and the
    corresponding (n+1)-point alternating-sum square over (n+1)!; the
    lemma asserts lhs >= rhs.
    """
    if n not in (1, 2):
        raise ArgumentError("only n in {1, 2} is evaluated")
    if mode not in ("min", "max"):
        raise ArgumentError(f"unknown mode {mode!r}")
    nodes, weights = np.polynomial.laguerre.laggauss(npoints)
    lag = laguerre_values(n + 1, nodes)
    inside = nodes >= threshold if mode == "min" else nodes <= threshold
    if n == 1:
        det1 = lag[0]
        lhs = float(np.sum(weights * inside * det1**2))
        phi2 = lag[1]
        w_i = weights[:, None]
        w_j = weights[None, :]
        in_i = inside[:, None]
        in_j = inside[None, :]
        # y = (y0, y1); dropping y0 leaves y1 and vice versa
        s = (
            in_j * phi2[:, None] * det1[None, :]
            - in_i * phi2[None, :] * det1[:, None]
        )
        rhs = float(np.sum(w_i * w_j * s**2)) / 2.0
        return lhs, rhs
    det2 = lag[0][:, None] * lag[1][None, :] - lag[0][None, :] * lag[1][:, None]
    pair_in = inside[:, None] & inside[None, :]
    w2 = weights[:, None] * weights[None, :]
    lhs = float(np.sum(w2 * pair_in * det2**2)) / 2.0
    phi3 = lag[2]
    w3 = w2[:, :, None] * weights[None, None, :]
    s = (
        pair_in[None, :, :] * phi3[:, None, None] * det2[None, :, :]
        - pair_in[:, None, :] * phi3[None, :, None] * det2[:, None, :]
        + pair_in[:, :, None] * phi3[None, None, :] * det2[:, :, None]
    )
    rhs = float(np.sum(w3 * s**2)) / 6.0
    return lhs, rhs
