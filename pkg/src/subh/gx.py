"""The four-block graph oracle built from a bit string, and its reduction.

A bit string x of length M = s^2 (viewed as an s-by-s 0/1 matrix indexed by
pairs i in [1, s], j in [s+1, 2s]) defines a graph G_x with m = 4M edges on
the 4s vertices U1 = {u_1..u_s}, U2 = {u_{s+1}..u_{2s}}, V1 = {v_1..v_s},
V2 = {v_{s+1}..v_{2s}}, where sqrt(m) = 2s:

* U1 x V1 and U2 x V2 are complete bipartite;
* each bit routes one cross pair: x_ij = 1 adds (u_i, u_j) and (v_i, v_j),
  x_ij = 0 adds (u_i, v_j) and (v_i, u_j).

Every vertex has degree exactly sqrt(m). The intra-U and intra-V edges
created by 1-bits are the *red* edges; every triangle of G_x contains
exactly one red edge, and a red edge at matrix position (i, j) sits in
exactly sqrt(m) - r - c triangles, where r and c are the popcounts of row i
and column j. Total triangles therefore track the popcount of x, which is
what makes G_x a popcount-threshold gadget for triangle counting.

The oracle is lazy: degree, neighbor, pair, and edge-sample queries are
answered from x on demand, each charging one query against an optional
shared budget. Because G_x is regular, edge sampling by "uniform vertex,
then uniform neighbor rank" is exactly uniform over edges.

Neighbor rank layout (a total order is required; the construction only
constrains the sets): ranks 1..s enumerate the complete-bipartite partner
block in index order; ranks s+1..2s enumerate the cross edges in index
order of the other side's matrix coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Tuple

import numpy as np

from .errors import (
    BudgetExhausted,
    InvalidParameter,
    InvalidRank,
    SelfPair,
    TooLarge,
    UnknownVertex,
)
from .ptp import PtpInstance, PtpParams, PtpOutcome
from .rng import RngHandle

Vertex = Tuple[str, int]  # ("u" | "v", 1-based index in [1, 2s])

#: naive_triangle_count refuses graphs with more than this many edges.
NAIVE_EDGE_CAP = 4096

QUERY_KINDS = ("degree", "neighbor", "pair", "edge_sample")


class TriangleOracle:
    """Lazy query access to G_x with per-kind query accounting."""

    def __init__(self, x: np.ndarray, budget: int | None = None):
        bits = np.asarray(x, dtype=np.uint8)
        if bits.ndim != 1 or bits.size < 1 or np.any(bits > 1):
            raise InvalidParameter("x must be a non-empty one-dimensional 0/1 array")
        s = math.isqrt(bits.size)
        if s * s != bits.size:
            raise InvalidParameter(
                f"instance length {bits.size} is not a perfect square"
            )
        if budget is not None and budget < 0:
            raise InvalidParameter("budget must be non-negative")
        bits = bits.copy()
        bits.setflags(write=False)
        self.x = bits
        self.s = s
        self.root_m = 2 * s  # sqrt of the edge count; also every vertex's degree
        self.m = 4 * bits.size  # number of edges
        self.n_vertices = 4 * s
        self.budget = budget
        self.query_counts = {kind: 0 for kind in QUERY_KINDS}

    # -- bookkeeping -------------------------------------------------------

    @property
    def query_total(self) -> int:
        return sum(self.query_counts.values())

    def _charge(self, kind: str) -> None:
        if self.budget is not None and self.query_total + 1 > self.budget:
            raise BudgetExhausted(f"query budget {self.budget} reached")
        self.query_counts[kind] += 1

    def _check_vertex(self, v: Vertex) -> None:
        if (
            not isinstance(v, tuple)
            or len(v) != 2
            or v[0] not in ("u", "v")
            or not isinstance(v[1], int)
            or not 1 <= v[1] <= self.root_m
        ):
            raise UnknownVertex(f"unknown vertex {v!r}")

    def bit(self, i: int, j: int) -> int:
        """x at matrix position (i, j), i in [1, s], j in [s+1, 2s];
        row-major bit index (i-1)*s + (j-s-1)."""
        if not (1 <= i <= self.s and self.s < j <= self.root_m):
            raise InvalidParameter(f"bit index ({i}, {j}) outside the matrix")
        return int(self.x[(i - 1) * self.s + (j - self.s - 1)])

    # -- uncounted answer logic (shared by queries and edge sampling) ------

    def _neighbor(self, v: Vertex, rank: int) -> Vertex | None:
        s = self.s
        if rank > self.root_m:
            return None  # rank exceeds the degree
        side, idx = v
        if idx <= s:  # block 1: partner block first, then cross edges by j
            if rank <= s:
                return ("v" if side == "u" else "u", rank)
            j = rank
            routed_same = self.bit(idx, j) == 1
            return (side if routed_same else ("v" if side == "u" else "u"), j)
        # block 2: partner block first, then cross edges by i
        if rank <= s:
            return ("v" if side == "u" else "u", s + rank)
        i = rank - s
        routed_same = self.bit(i, idx) == 1
        return (side if routed_same else ("v" if side == "u" else "u"), i)

    def _pair(self, a: Vertex, b: Vertex) -> int:
        s = self.s
        (sa, ia), (sb, ib) = a, b
        if sa == sb:
            lo, hi = min(ia, ib), max(ia, ib)
            if hi <= s or lo > s:
                return 0  # inside U1, U2, V1 or V2: never an edge
            return self.bit(lo, hi)  # red cross edge iff the bit is set
        lo, hi = min(ia, ib), max(ia, ib)
        if (ia <= s) == (ib <= s):
            return 1  # U1 x V1 and U2 x V2 are complete
        return 1 - self.bit(lo, hi)

    # -- the four counted queries ------------------------------------------

    def degree(self, v: Vertex) -> int:
        self._check_vertex(v)
        self._charge("degree")
        return self.root_m

    def neighbor(self, v: Vertex, rank: int) -> Vertex | None:
        self._check_vertex(v)
        if not 1 <= rank <= self.n_vertices:
            raise InvalidRank(f"rank {rank} outside [1, {self.n_vertices}]")
        self._charge("neighbor")
        return self._neighbor(v, rank)

    def pair(self, a: Vertex, b: Vertex) -> int:
        self._check_vertex(a)
        self._check_vertex(b)
        if a == b:
            raise SelfPair(f"pair query with identical endpoints {a!r}")
        self._charge("pair")
        return self._pair(a, b)

    def edge_sample(self, rng: RngHandle) -> tuple[Vertex, Vertex]:
        """Uniform edge: uniform vertex, then uniform neighbor rank.

        Exactly uniform because G_x is root_m-regular (each edge is reachable
        from either endpoint with the same probability).
        """
        self._charge("edge_sample")
        gen = rng.generator
        t = int(gen.integers(0, self.n_vertices))
        v: Vertex = ("u", t + 1) if t < self.root_m else ("v", t - self.root_m + 1)
        rank = int(gen.integers(1, self.root_m + 1))
        u = self._neighbor(v, rank)
        assert u is not None
        return (v, u)


# module-level aliases matching the query-op naming used elsewhere
def gx_degree(oracle: TriangleOracle, v: Vertex) -> int:
    return oracle.degree(v)


def gx_neighbor(oracle: TriangleOracle, v: Vertex, rank: int) -> Vertex | None:
    return oracle.neighbor(v, rank)


def gx_pair(oracle: TriangleOracle, a: Vertex, b: Vertex) -> int:
    return oracle.pair(a, b)


def gx_edge_sample(oracle: TriangleOracle, rng: RngHandle) -> tuple[Vertex, Vertex]:
    return oracle.edge_sample(rng)


# ---------------------------------------------------------------------------
# naive materialization (the independent verification route)


def vertex_index(v: Vertex, s: int) -> int:
    """Map u_1..u_2s, v_1..v_2s to 0..4s-1."""
    side, idx = v
    return (idx - 1) if side == "u" else (2 * s + idx - 1)


def index_vertex(t: int, s: int) -> Vertex:
    return ("u", t + 1) if t < 2 * s else ("v", t - 2 * s + 1)


def build_adjacency(x: np.ndarray) -> np.ndarray:
    """Materialize G_x's adjacency matrix directly from the construction
    rules, bit by bit. Kept loop-literal on purpose: it is the independent
    reference the lazy oracle is checked against."""
    bits = np.asarray(x, dtype=np.uint8)
    s = math.isqrt(bits.size)
    if s * s != bits.size:
        raise InvalidParameter(f"instance length {bits.size} is not a perfect square")
    nv = 4 * s
    adj = np.zeros((nv, nv), dtype=np.uint8)

    def connect(a: Vertex, b: Vertex) -> None:
        ai, bi = vertex_index(a, s), vertex_index(b, s)
        adj[ai, bi] = adj[bi, ai] = 1

    for i in range(1, s + 1):
        for j in range(s + 1, 2 * s + 1):
            if bits[(i - 1) * s + (j - s - 1)]:
                connect(("u", i), ("u", j))
                connect(("v", i), ("v", j))
            else:
                connect(("u", i), ("v", j))
                connect(("v", i), ("u", j))
    for a in range(1, s + 1):
        for b in range(1, s + 1):
            connect(("u", a), ("v", b))
    for a in range(s + 1, 2 * s + 1):
        for b in range(s + 1, 2 * s + 1):
            connect(("u", a), ("v", b))
    return adj


def naive_triangle_count(oracle: TriangleOracle) -> int:
    """Exact triangle count by materializing the adjacency matrix.

    Does not touch the oracle's query counters; refuses graphs above
    NAIVE_EDGE_CAP edges.
    """
    if oracle.m > NAIVE_EDGE_CAP:
        raise TooLarge(f"{oracle.m} edges exceeds the naive cap {NAIVE_EDGE_CAP}")
    adj = build_adjacency(oracle.x).astype(np.int64)
    return int(np.trace(adj @ adj @ adj)) // 6


@dataclass(frozen=True)
class RedEdgeStats:
    """Red edges (intra-U / intra-V cross edges from 1-bits), per-vertex red
    degrees, and the per-red-edge triangle total sum(root_m - r - c)."""

    red_edges: list  # list of (side "U"|"V", i, j)
    reddeg: dict  # Vertex -> incident red edges (the edge itself included)
    triangle_total: int


def red_edge_stats(oracle: TriangleOracle) -> RedEdgeStats:
    s = oracle.s
    matrix = oracle.x.reshape(s, s)
    row = matrix.sum(axis=1, dtype=np.int64)  # popcount of row i (1-based i-1)
    col = matrix.sum(axis=0, dtype=np.int64)  # popcount of column j (1-based j-s-1)
    edges = []
    reddeg: dict[Vertex, int] = {}
    total = 0
    for i0, j0 in zip(*np.nonzero(matrix)):
        i, j = int(i0) + 1, int(j0) + s + 1
        edges.append(("U", i, j))
        edges.append(("V", i, j))
        for side in ("u", "v"):
            reddeg[(side, i)] = reddeg.get((side, i), 0) + 1
            reddeg[(side, j)] = reddeg.get((side, j), 0) + 1
        per_edge = oracle.root_m - int(row[i0]) - int(col[j0])
        total += 2 * per_edge  # one red edge on the U side, one on the V side
    return RedEdgeStats(edges, reddeg, total)


# ---------------------------------------------------------------------------
# the reduction and a reference solver

#: Anything the triangle reduction can drive: takes the oracle, (eps, delta),
#: and a stream; returns a triangle-count estimate.
TriangleAlgorithm = Callable[[TriangleOracle, float, float, RngHandle], float]


def triangle_budget(m_edges: int, k: int, eps: float, delta: float) -> int:
    """tau = ceil(m * ln(1/(4*delta)) / (9600 * eps^2 * k))."""
    if not 0 < delta < 0.25:
        raise InvalidParameter(f"need 0 < delta < 1/4 for a positive budget, got {delta}")
    return math.ceil(m_edges * math.log(1 / (4 * delta)) / (9600 * eps**2 * k))


def yes_threshold(m_edges: int, k: int, eps: float) -> Fraction:
    """2k(sqrt(m) - 2)(1 - eps^2), exact."""
    root = math.isqrt(m_edges)
    if root * root != m_edges:
        raise InvalidParameter(f"edge count {m_edges} is not a perfect square")
    e = Fraction(eps)
    return 2 * k * (root - 2) * (1 - e * e)


def ptp_via_triangles(
    instance: PtpInstance,
    params: PtpParams,
    alg_t: TriangleAlgorithm,
    rng: RngHandle,
    *,
    enforce_budget: bool = True,
) -> PtpOutcome:
    """Solve a PTP instance with a triangle-count estimator over G_x.

    The estimator sees only the four queries, with eps = gamma and
    confidence delta/2, under the hard budget tau (exhaustion => "No");
    otherwise the answer is Yes iff t-tilde >= 2k(sqrt(m)-2)(1-eps^2).
    The separation argument needs k well above ln(1/delta)/eps^2, k well
    below eps*m, and eps well above 1/sqrt(m); callers pick the regime.
    """
    if instance.m != params.m:
        raise InvalidParameter(
            f"instance length {instance.m} does not match params.m={params.m}"
        )
    eps = params.gamma
    oracle = TriangleOracle(instance.x)
    tau = triangle_budget(oracle.m, params.k, eps, params.delta)
    oracle.budget = tau if enforce_budget else None
    try:
        t_tilde = alg_t(oracle, eps, params.delta / 2, rng)
    except BudgetExhausted:
        return PtpOutcome("No", None, oracle.query_total, tau, True)
    yes = Fraction(t_tilde) >= yes_threshold(oracle.m, params.k, eps)
    return PtpOutcome(
        "Yes" if yes else "No", t_tilde, oracle.query_total, tau, False
    )


def exact_triangle_solver(
    oracle: TriangleOracle, eps: float, delta: float, rng: RngHandle
) -> int:
    """Reference solver: rebuild the adjacency with pair queries only and
    count triangles exactly. Costs C(4s, 2) pair queries; desk scale only."""
    nv = oracle.n_vertices
    adj = np.zeros((nv, nv), dtype=np.int64)
    for a in range(nv):
        for b in range(a + 1, nv):
            bit = oracle.pair(index_vertex(a, oracle.s), index_vertex(b, oracle.s))
            adj[a, b] = adj[b, a] = bit
    return int(np.trace(adj @ adj @ adj)) // 6


# ---------------------------------------------------------------------------
# invariant battery


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def _enumerate_triangles(adj: np.ndarray) -> list[tuple[int, int, int]]:
    nv = adj.shape[0]
    out = []
    for a in range(nv):
        for b in range(a + 1, nv):
            if not adj[a, b]:
                continue
            for c in range(b + 1, nv):
                if adj[a, c] and adj[b, c]:
                    out.append((a, b, c))
    return out


def _is_red(a: int, b: int, s: int) -> bool:
    """Red = an edge with both endpoints on the U side or both on the V side."""
    return (a < 2 * s) == (b < 2 * s)


def verify_construction(
    x: np.ndarray, rng: RngHandle, edge_samples: int = 0
) -> tuple[list[CheckResult], int]:
    """Run the full invariant battery for G_x against naive materialization.

    Checks: degrees, exhaustive pair/neighbor agreement with the naive
    adjacency, neighbor/pair coherence, exactly-one-red-edge-per-triangle,
    the red-edge triangle formula, and (when edge_samples > 0) chi-square
    uniformity of edge sampling at significance 0.001. Returns the check
    list and the number of oracle queries the battery spent.
    """
    oracle = TriangleOracle(np.asarray(x))
    s = oracle.s
    adj = build_adjacency(oracle.x)
    results = []

    degrees_ok = all(
        oracle.degree(index_vertex(t, s)) == oracle.root_m
        and int(adj[t].sum()) == oracle.root_m
        for t in range(oracle.n_vertices)
    )
    results.append(CheckResult("degrees_all_equal_root_m", degrees_ok))

    pair_ok = True
    for a in range(oracle.n_vertices):
        for b in range(a + 1, oracle.n_vertices):
            va, vb = index_vertex(a, s), index_vertex(b, s)
            if oracle.pair(va, vb) != int(adj[a, b]) or oracle.pair(vb, va) != int(adj[a, b]):
                pair_ok = False
    results.append(CheckResult("pair_matches_naive_adjacency", pair_ok))

    neighbor_ok = True
    coherence_ok = True
    for t in range(oracle.n_vertices):
        v = index_vertex(t, s)
        seen = []
        for rank in range(1, oracle.n_vertices + 1):
            u = oracle.neighbor(v, rank)
            if rank > oracle.root_m:
                if u is not None:
                    neighbor_ok = False
                continue
            if u is None or not adj[t, vertex_index(u, s)]:
                neighbor_ok = False
                continue
            if oracle.pair(v, u) != 1:
                coherence_ok = False
            seen.append(vertex_index(u, s))
        if sorted(seen) != sorted(np.nonzero(adj[t])[0].tolist()):
            neighbor_ok = False
    results.append(CheckResult("neighbor_enumeration_matches_naive", neighbor_ok))
    results.append(CheckResult("neighbor_pair_coherence", coherence_ok))

    triangles = _enumerate_triangles(adj)
    one_red = all(
        sum(_is_red(a, b, s) for a, b in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2]))) == 1
        for t in triangles
    )
    results.append(CheckResult("exactly_one_red_edge_per_triangle", one_red))

    stats = red_edge_stats(oracle)
    naive = naive_triangle_count(oracle)
    results.append(
        CheckResult(
            "red_edge_formula_matches_naive_count",
            stats.triangle_total == naive == len(triangles),
            f"formula={stats.triangle_total} naive={naive} enumerated={len(triangles)}",
        )
    )

    if edge_samples > 0:
        from scipy import stats as scipy_stats

        edge_ids = {}
        for a in range(oracle.n_vertices):
            for b in range(a + 1, oracle.n_vertices):
                if adj[a, b]:
                    edge_ids[(a, b)] = len(edge_ids)
        freq = np.zeros(len(edge_ids), dtype=np.int64)
        sampler = rng.child(0)
        for _ in range(edge_samples):
            va, vb = oracle.edge_sample(sampler)
            a, b = sorted((vertex_index(va, s), vertex_index(vb, s)))
            freq[edge_ids[(a, b)]] += 1
        p_value = float(scipy_stats.chisquare(freq).pvalue)
        results.append(
            CheckResult(
                "edge_sample_uniform_chi_square",
                p_value > 0.001 and len(edge_ids) == oracle.m,
                f"p={p_value:.5f} over {len(edge_ids)} edges",
            )
        )
    return results, oracle.query_total
