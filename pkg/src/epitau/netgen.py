"""Two-layer weighted random contact networks.

The first layer partitions vertices into disjoint weight-1 "household"
cliques.  The second layer connects households and comes in two families:
a growing polynomial (scale-free) graph mixing preferential attachment,
uniform choice and triangle closure, or disjoint fixed-size "workplace"
cliques, optionally relaxed by random rewiring.  All second-layer edges
share one weight 0 < w < 1.
"""

from __future__ import annotations

import io
import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "LayeredGraph",
    "PolyParams",
    "CliqueParams",
    "GraphStats",
    "build_household_layer",
    "build_polynomial_layer",
    "build_clique_layer",
    "relax_caveman",
    "graph_stats",
    "write_graph",
    "read_graph",
]

PROB_TOL = 1e-12  # tolerance on p_pa + p_u + p_tr == 1


def _csr(n: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric adjacency in CSR form (indptr, indices) for an edge list."""
    if len(edges) == 0:
        return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.argsort(src, kind="stable")
    indices = dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


@dataclass(eq=False)
class LayeredGraph:
    """Weighted two-layer undirected graph.

    Household edges all have weight 1; second-layer edges all have weight
    ``second_weight``.  A vertex pair may appear in both layers at once (the
    layers are independent); infection rates over such a pair add.  Treat
    instances as immutable once built: the adjacency views are cached.
    """

    n: int
    household_size: int
    household_of: np.ndarray          # (n,) household id, -1 for leftover vertices
    household_edges: np.ndarray       # (m_hh, 2) vertex pairs, weight 1 each
    second_edges: np.ndarray          # (m_sec, 2) vertex pairs, weight `second_weight` each
    second_weight: float = 0.0

    @cached_property
    def household_adj(self) -> tuple[np.ndarray, np.ndarray]:
        return _csr(self.n, self.household_edges)

    @cached_property
    def second_adj(self) -> tuple[np.ndarray, np.ndarray]:
        return _csr(self.n, self.second_edges)

    @cached_property
    def household_degree(self) -> np.ndarray:
        if len(self.household_edges) == 0:
            return np.zeros(self.n, dtype=np.int64)
        return np.bincount(self.household_edges.ravel(), minlength=self.n)

    @cached_property
    def second_degree(self) -> np.ndarray:
        if len(self.second_edges) == 0:
            return np.zeros(self.n, dtype=np.int64)
        return np.bincount(self.second_edges.ravel(), minlength=self.n)

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        """Total incident edge weight per vertex, both layers."""
        return self.household_degree + self.second_weight * self.second_degree

    def validate(self) -> None:
        """Raise ValueError if a structural invariant is broken."""
        for name, edges in (("household", self.household_edges),
                            ("second", self.second_edges)):
            if len(edges) == 0:
                continue
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValueError(f"{name} edge endpoint out of range")
            if (edges[:, 0] == edges[:, 1]).any():
                raise ValueError(f"{name} layer contains a self-loop")
            canon = np.sort(edges, axis=1)
            if len(np.unique(canon, axis=0)) != len(canon):
                raise ValueError(f"{name} layer contains duplicate edges")
        if len(self.second_edges) and not 0.0 < self.second_weight < 1.0:
            raise ValueError("second-layer weight must satisfy 0 < w < 1")


@dataclass
class PolyParams:
    """Growth parameters of the polynomial second-layer model.

    Each newcomer brings m edges; per edge the attachment rule is drawn
    with probabilities (p_pa, p_u, p_tr): preferential attachment, uniform
    choice, or triangle closure.  The probabilities must sum to 1 within
    1e-12 and are renormalized.
    """

    p_pa: float
    p_u: float
    p_tr: float
    m: int = 4
    n0: int = 50

    def __post_init__(self) -> None:
        probs = (self.p_pa, self.p_u, self.p_tr)
        if any(p < 0 for p in probs):
            raise ValueError(f"attachment probabilities must be >= 0, got {probs}")
        s = sum(probs)
        if abs(s - 1.0) > PROB_TOL:
            raise ValueError(f"attachment probabilities sum to {s!r}, expected 1")
        self.p_pa, self.p_u, self.p_tr = (p / s for p in probs)
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.n0 < self.m:
            raise ValueError("n0 must be >= m")
        # A simple graph with m*n0 edges on n0 vertices needs n0 >= 2m+1,
        # and the initial circulant ring needs the same bound.
        if self.n0 < 2 * self.m + 1:
            raise ValueError(f"n0={self.n0} too small for m={self.m}: need n0 >= 2m+1")


@dataclass
class CliqueParams:
    """Workplace-clique second layer: size, rewiring probability, edge weight."""

    N_wp: int
    p_relaxed: float = 0.0
    w: float = 0.4

    def __post_init__(self) -> None:
        if self.N_wp < 2:
            raise ValueError("N_wp must be >= 2")
        if not 0.0 <= self.p_relaxed <= 1.0:
            raise ValueError("p_relaxed must be in [0, 1]")
        if not 0.0 < self.w < 1.0:
            raise ValueError("second-layer weight must satisfy 0 < w < 1")


@dataclass
class GraphStats:
    """Exact whole-graph statistics.

    d: mean out-of-household (second-layer) degree over all n vertices.
    weighted_density: mean total incident edge weight over all n vertices.
    degree_histogram: second-layer degree -> vertex count.
    """

    d: float
    weighted_density: float
    degree_histogram: dict[int, int] = field(default_factory=dict)


def build_household_layer(n: int, N_hh: int) -> LayeredGraph:
    """Partition [0, n) into floor(n/N_hh) contiguous cliques of size N_hh.

    The n mod N_hh trailing vertices stay household-less (id -1).  No
    second-layer edges yet.
    """
    if N_hh < 2:
        raise ValueError("N_hh must be >= 2")
    if n < N_hh:
        raise ValueError(f"n={n} smaller than household size N_hh={N_hh}")
    k = n // N_hh
    household_of = np.full(n, -1, dtype=np.int64)
    household_of[: k * N_hh] = np.arange(k * N_hh) // N_hh
    template = np.array(list(itertools.combinations(range(N_hh), 2)), dtype=np.int64)
    offsets = (np.arange(k, dtype=np.int64) * N_hh)[:, None, None]
    edges = (template[None, :, :] + offsets).reshape(-1, 2)
    return LayeredGraph(
        n=n,
        household_size=N_hh,
        household_of=household_of,
        household_edges=edges,
        second_edges=np.zeros((0, 2), dtype=np.int64),
    )


def _require_household_only(g: LayeredGraph) -> None:
    if len(g.second_edges):
        raise ValueError("graph already has a second layer")


def build_polynomial_layer(
    g: LayeredGraph, params: PolyParams, w: float, rng: np.random.Generator
) -> LayeredGraph:
    """Overlay the growing polynomial second layer; every new edge gets weight w.

    The layer starts from a ring of n0 vertices (each joined to its m nearest
    clockwise neighbors, giving m*n0 edges) and grows one vertex at a time,
    each newcomer attaching m edges by the (p_pa, p_u, p_tr) rule mix.  The
    arrival order is a random permutation of all vertex ids, so the layer is
    independent of the deterministic household blocks.  Final second-layer
    edge count is exactly m*n.
    """
    _require_household_only(g)
    if not 0.0 < w < 1.0:
        raise ValueError("second-layer weight must satisfy 0 < w < 1")
    if g.n <= params.n0:
        raise ValueError(f"need n > n0, got n={g.n}, n0={params.n0}")
    n, m, n0 = g.n, params.m, params.n0
    p_pa, p_u = params.p_pa, params.p_u

    order = rng.permutation(n)
    # Growth bookkeeping lives in position space: position i is the i-th
    # arrival, and "existing" simply means position < i.
    adj: list[set[int]] = [set() for _ in range(n)]
    repeated: list[int] = []  # one entry per unit of second-layer degree
    edges: list[tuple[int, int]] = []

    def add_edge(a: int, b: int) -> None:
        edges.append((a, b))
        adj[a].add(b)
        adj[b].add(a)
        repeated.append(a)
        repeated.append(b)

    for i in range(n0):
        for k in range(1, m + 1):
            add_edge(i, (i + k) % n0)

    for i in range(n0, n):
        batch: list[int] = []
        for _ in range(m):
            r = rng.random()
            if r < p_pa:
                rule = "pa"
            elif r < p_pa + p_u:
                rule = "u"
            else:
                rule = "tr"
            target = -1
            for _ in range(50):
                if rule == "pa":
                    cand = repeated[rng.integers(len(repeated))]
                elif rule == "u":
                    cand = int(rng.integers(i))
                else:
                    pool = [x for t in batch for x in adj[t]]
                    if not pool:  # first edge of the batch: fall back to uniform
                        cand = int(rng.integers(i))
                    else:
                        cand = pool[rng.integers(len(pool))]
                if cand != i and cand not in adj[i]:
                    target = cand
                    break
            if target < 0:
                # Persistent duplicates: uniform over the remaining non-neighbors.
                pool_arr = np.setdiff1d(np.arange(i), np.fromiter(adj[i], dtype=np.int64))
                target = int(pool_arr[rng.integers(len(pool_arr))])
            add_edge(i, target)
            batch.append(target)

    second = order[np.array(edges, dtype=np.int64)]
    return LayeredGraph(
        n=n,
        household_size=g.household_size,
        household_of=g.household_of,
        household_edges=g.household_edges,
        second_edges=second,
        second_weight=float(w),
    )


def build_clique_layer(
    g: LayeredGraph, c: CliqueParams, rng: np.random.Generator
) -> LayeredGraph:
    """Overlay disjoint weight-w workplace cliques of size N_wp.

    Vertices are partitioned uniformly at random; the n mod N_wp leftover
    vertices get no workplace.  A pair that is also a household edge keeps
    both entries (the layers are independent, rates add downstream).
    """
    _require_household_only(g)
    if c.N_wp > g.n:
        raise ValueError(f"N_wp={c.N_wp} larger than graph size n={g.n}")
    perm = rng.permutation(g.n)
    k = g.n // c.N_wp
    template = np.array(list(itertools.combinations(range(c.N_wp), 2)), dtype=np.int64)
    blocks = perm[: k * c.N_wp].reshape(k, c.N_wp)
    # Pairs keep the permuted within-block order, so edge orientation is random.
    second = blocks[:, template].reshape(-1, 2)
    return LayeredGraph(
        n=g.n,
        household_size=g.household_size,
        household_of=g.household_of,
        household_edges=g.household_edges,
        second_edges=second,
        second_weight=float(c.w),
    )


def relax_caveman(
    g: LayeredGraph, p_relaxed: float, rng: np.random.Generator
) -> LayeredGraph:
    """Rewire each second-layer edge uv to a uniform u~v with prob p_relaxed.

    A selected edge keeps its first endpoint and redraws the second uniformly
    over all vertices != u; if the proposed edge already exists in the second
    layer, no rewiring takes place.  Edge count, weights and the household
    layer are untouched.
    """
    if not 0.0 <= p_relaxed <= 1.0:
        raise ValueError("p_relaxed must be in [0, 1]")
    edges = g.second_edges.copy()
    existing = {(min(u, v), max(u, v)) for u, v in edges.tolist()}
    for i, (u, v) in enumerate(edges.tolist()):
        if rng.random() >= p_relaxed:
            continue
        vt = int(rng.integers(g.n - 1))
        if vt >= u:
            vt += 1
        key = (min(u, vt), max(u, vt))
        if key in existing:
            continue
        existing.remove((min(u, v), max(u, v)))
        existing.add(key)
        edges[i, 1] = vt
    return LayeredGraph(
        n=g.n,
        household_size=g.household_size,
        household_of=g.household_of,
        household_edges=g.household_edges,
        second_edges=edges,
        second_weight=g.second_weight,
    )


def graph_stats(g: LayeredGraph) -> GraphStats:
    """Exact degree and weight statistics over all n vertices."""
    sec_deg = g.second_degree
    hist = Counter(sec_deg.tolist())
    return GraphStats(
        d=float(sec_deg.mean()),
        weighted_density=float(g.weighted_degree.mean()),
        degree_histogram=dict(sorted(hist.items())),
    )


def write_graph(g: LayeredGraph, path) -> None:
    """Debug text format: header `n N_hh`, then one `u v layer weight` per edge."""
    buf = io.StringIO()
    buf.write(f"{g.n} {g.household_size}\n")
    for u, v in g.household_edges.tolist():
        buf.write(f"{u} {v} household 1.0\n")
    w = g.second_weight
    for u, v in g.second_edges.tolist():
        buf.write(f"{u} {v} second {w!r}\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


def read_graph(path) -> LayeredGraph:
    """Inverse of write_graph; household ids are recovered from the clique blocks."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        n, N_hh = int(header[0]), int(header[1])
        hh, sec = [], []
        w = 0.0
        for line in fh:
            u, v, layer, weight = line.split()
            if layer == "household":
                hh.append((int(u), int(v)))
            else:
                sec.append((int(u), int(v)))
                w = float(weight)
    hh_edges = np.array(hh, dtype=np.int64) if hh else np.zeros((0, 2), dtype=np.int64)
    sec_edges = np.array(sec, dtype=np.int64) if sec else np.zeros((0, 2), dtype=np.int64)
    household_of = np.full(n, -1, dtype=np.int64)
    if len(hh_edges):
        # Households are disjoint cliques: label connected components in order
        # of their smallest vertex.
        parent = np.arange(n)

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in hh_edges.tolist():
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        roots = np.array([find(i) for i in range(n)])
        sizes = np.bincount(roots, minlength=n)
        next_id = 0
        root_ids = {}
        for i in range(n):
            r = roots[i]
            if sizes[r] > 1:
                if r not in root_ids:
                    root_ids[r] = next_id
                    next_id += 1
                household_of[i] = root_ids[r]
    return LayeredGraph(
        n=n,
        household_size=N_hh,
        household_of=household_of,
        household_edges=hh_edges,
        second_edges=sec_edges,
        second_weight=w,
    )
