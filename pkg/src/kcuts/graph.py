"""Weighted undirected graphs, expansion arithmetic, edge-list I/O and generators."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree


class GraphError(ValueError):
    """Malformed graph input or invalid generator parameters."""


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable edge-weighted undirected graph on vertices ``0..n-1``.

    Edges are stored once each, canonicalised to ``u < v`` and sorted by
    ``(u, v)``.  Every vertex has positive weighted degree.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    degrees: np.ndarray
    total_weight: float
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]], meta: dict | None = None) -> "WeightedGraph":
        """Build a graph, merging duplicate undirected edges by summing weights."""
        arr = list(edges)
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        if arr:
            u = np.fromiter((e[0] for e in arr), dtype=np.int64, count=len(arr))
            v = np.fromiter((e[1] for e in arr), dtype=np.int64, count=len(arr))
            w = np.fromiter((e[2] for e in arr), dtype=np.float64, count=len(arr))
        else:
            u = v = np.zeros(0, dtype=np.int64)
            w = np.zeros(0)
        return cls.from_arrays(n, u, v, w, meta=meta)

    @classmethod
    def from_arrays(cls, n, u, v, w, meta: dict | None = None) -> "WeightedGraph":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if u.size and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise GraphError("vertex id out of range")
        if np.any(u == v):
            i = int(np.flatnonzero(u == v)[0])
            raise GraphError(f"self-loop at vertex {int(u[i])}")
        if np.any(~(w > 0)) or np.any(~np.isfinite(w)):
            raise GraphError("edge weights must be finite and strictly positive")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        key = lo * n + hi
        uniq, inv = np.unique(key, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inv, w)
        src = uniq // n
        dst = uniq % n
        degrees = np.zeros(n)
        np.add.at(degrees, src, merged)
        np.add.at(degrees, dst, merged)
        if np.any(degrees <= 0):
            bad = int(np.flatnonzero(degrees <= 0)[0])
            raise GraphError(f"vertex {bad} has zero degree; expansion is undefined")
        for a in (src, dst, merged, degrees):
            a.setflags(write=False)
        return cls(int(n), src, dst, merged, degrees, float(degrees.sum()), dict(meta or {}))

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))

    @property
    def m(self) -> int:
        return int(self.src.size)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric CSR adjacency matrix."""
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        vals = np.concatenate([self.weight, self.weight])
        a = sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))
        a.sort_indices()
        return a

    @cached_property
    def kernel_arrays(self):
        a = self.adjacency
        return (
            a.indptr.astype(np.int64),
            a.indices.astype(np.int64),
            a.data.astype(np.float64),
            np.ascontiguousarray(self.src),
            np.ascontiguousarray(self.dst),
            np.ascontiguousarray(self.weight),
            np.ascontiguousarray(self.degrees),
        )

    def dense_adjacency(self) -> np.ndarray:
        return self.adjacency.toarray()

    def induced(self, vertices: Sequence[int]) -> tuple["WeightedGraph | None", np.ndarray]:
        """Subgraph induced on ``vertices`` (relabelled in the given order).

        Returns ``(None, ids)`` when some vertex would be isolated, since such
        a subgraph is not a valid :class:`WeightedGraph`.
        """
        ids = np.asarray(vertices, dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[ids] = np.arange(ids.size)
        keep = (local[self.src] >= 0) & (local[self.dst] >= 0)
        u, v, w = local[self.src[keep]], local[self.dst[keep]], self.weight[keep]
        deg = np.zeros(ids.size)
        np.add.at(deg, u, w)
        np.add.at(deg, v, w)
        if np.any(deg <= 0):
            return None, ids
        return WeightedGraph.from_arrays(ids.size, u, v, w), ids

    def to_edge_list(self, header: str | None = None) -> str:
        out = io.StringIO()
        if header:
            for line in header.splitlines():
                out.write(f"# {line}\n")
        for a, b, w in self.edges:
            out.write(f"{a} {b} {w!r}\n")
        return out.getvalue()

    def same_as(self, other: "WeightedGraph") -> bool:
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )


@dataclass(frozen=True)
class Cut:
    """A vertex set with its cut weight, set weight and expansion."""

    members: tuple[int, ...]
    cut_weight: float
    set_weight: float
    complement_weight: float
    expansion: float

    @property
    def size(self) -> int:
        return len(self.members)

    def to_json(self) -> dict:
        return {
            "members": list(self.members),
            "cut_weight": self.cut_weight,
            "set_weight": self.set_weight,
            "complement_weight": self.complement_weight,
            "expansion": self.expansion,
        }


def _membership(g: WeightedGraph, s) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    idx = np.asarray(sorted(set(int(i) for i in s)), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= g.n):
        raise GraphError("vertex id out of range")
    mask[idx] = True
    return mask


def expansion(g: WeightedGraph, s) -> Cut:
    """φ(S) = w(S, S̄) / min{w(S), w(S̄)} for a proper nonempty subset ``s``."""
    mask = _membership(g, s)
    size = int(mask.sum())
    if size == 0 or size == g.n:
        raise GraphError("expansion needs a nonempty proper subset")
    crossing = mask[g.src] != mask[g.dst]
    cut = float(g.weight[crossing].sum())
    vol = float(g.degrees[mask].sum())
    rest = float(g.degrees[~mask].sum())
    return Cut(tuple(np.flatnonzero(mask).tolist()), cut, vol, rest, cut / min(vol, rest))


# --------------------------------------------------------------------------
# edge-list format


def load_edge_list(text) -> WeightedGraph:
    """Parse ``u v w`` lines (``#`` comments, blank lines ignored).

    :param text: a string or a text stream
    :raises GraphError: on malformed lines, self-loops, nonpositive weights or
        vertices left with zero degree
    """
    if not isinstance(text, str):
        text = text.read()
    us, vs, ws = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"line {lineno}: expected 'u v w', got {raw!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphError(f"line {lineno}: cannot parse {raw!r}") from None
        if u < 0 or v < 0:
            raise GraphError(f"line {lineno}: vertex ids must be nonnegative")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        if not (w > 0) or not math.isfinite(w):
            raise GraphError(f"line {lineno}: weight must be positive, got {parts[2]}")
        us.append(u)
        vs.append(v)
        ws.append(w)
    if not us:
        raise GraphError("edge list is empty")
    n = max(max(us), max(vs)) + 1
    return WeightedGraph.from_arrays(n, us, vs, ws)


# --------------------------------------------------------------------------
# generators


def _clique_edges(start: int, size: int, w: float = 1.0):
    for a in range(start, start + size):
        for b in range(a + 1, start + size):
            yield a, b, w


def gen_fig2(n: int, k: int, p: float) -> WeightedGraph:
    """``k`` unit cliques of size ``(n-1)/k`` plus a hub joined to every vertex with weight ``p*n``.

    The hub is vertex ``n-1``.
    """
    if k < 1 or n < 2 or (n - 1) % k:
        raise GraphError(f"fig2 needs k | n-1 (n={n}, k={k})")
    if not p > 0:
        raise GraphError("p must be positive")
    s = (n - 1) // k
    hub = n - 1
    edges = []
    cliques = []
    for i in range(k):
        edges.extend(_clique_edges(i * s, s))
        cliques.append(list(range(i * s, (i + 1) * s)))
    edges.extend((v, hub, p * n) for v in range(hub))
    meta = {"family": "fig2", "n": n, "k": k, "p": p, "clique_size": s, "cliques": cliques, "hub": hub}
    return WeightedGraph.from_edges(n, edges, meta=meta)


def gen_appendix_a(n: int, k: int, eps: float = 0.5, c: float = 1.0) -> WeightedGraph:
    """Super-sets of loosely joined cliques plus extra vertices touching every super-set.

    ``p = max(2, round(k**eps))`` super-sets each hold ``k/p`` cliques of size
    ``n/k``.  Each clique sends total weight ``c`` to the other cliques of its
    super-set, spread evenly; each of the ``k - p`` extra vertices sends
    ``1/p`` to every super-set, spread evenly over its vertices.  The exponent
    actually realised, ``log p / log k``, is recorded in ``meta["eps_effective"]``.
    """
    if k < 2 or not (0 < eps < 1) or not c > 0:
        raise GraphError("appendix-a needs k >= 2, 0 < eps < 1, c > 0")
    p = max(2, int(round(k**eps)))
    if k % p or n % k:
        raise GraphError(f"appendix-a needs p | k and k | n (n={n}, k={k}, p={p})")
    q = k // p
    s = n // k
    extra = k - p
    if s < 2 or q < 2 or extra < 1:
        raise GraphError(f"appendix-a parameters leave an empty part (clique size {s}, cliques per set {q}, extras {extra})")
    edges = []
    supersets, cliques = [], []
    pair_w = c / ((q - 1) * s * s)
    for i in range(p):
        base = i * q * s
        blocks = [list(range(base + j * s, base + (j + 1) * s)) for j in range(q)]
        for blk in blocks:
            edges.extend(_clique_edges(blk[0], s))
        for a in range(q):
            for b in range(a + 1, q):
                edges.extend((x, y, pair_w) for x in blocks[a] for y in blocks[b])
        cliques.append(blocks)
        supersets.append(list(range(base, base + q * s)))
    extras = list(range(n, n + extra))
    spread = (1.0 / p) / (q * s)
    for v in extras:
        for members in supersets:
            edges.extend((x, v, spread) for x in members)
    meta = {
        "family": "appendix_a",
        "n": n,
        "k": k,
        "eps": eps,
        "eps_effective": math.log(p) / math.log(k),
        "c": c,
        "supersets": supersets,
        "cliques": cliques,
        "extras": extras,
        "num_supersets": p,
        "cliques_per_superset": q,
        "clique_size": s,
    }
    return WeightedGraph.from_edges(n + extra, edges, meta=meta)


def ring_of_cliques(k: int, s: int, bridge: float = 0.1) -> WeightedGraph:
    """``k`` unit cliques of size ``s`` joined in a cycle by single bridge edges."""
    if k < 1 or s < 2 or not bridge > 0:
        raise GraphError("ring_of_cliques needs k >= 1, s >= 2, bridge > 0")
    edges = []
    for i in range(k):
        edges.extend(_clique_edges(i * s, s))
    if k > 1:
        for i in range(k):
            edges.append(((i + 1) * s - 1, ((i + 1) % k) * s, bridge))
    cliques = [list(range(i * s, (i + 1) * s)) for i in range(k)]
    return WeightedGraph.from_edges(k * s, edges, meta={"family": "ring_of_cliques", "cliques": cliques})


def disjoint_cliques(k: int, s: int) -> WeightedGraph:
    if k < 1 or s < 2:
        raise GraphError("disjoint_cliques needs k >= 1, s >= 2")
    edges = []
    for i in range(k):
        edges.extend(_clique_edges(i * s, s))
    cliques = [list(range(i * s, (i + 1) * s)) for i in range(k)]
    return WeightedGraph.from_edges(k * s, edges, meta={"family": "disjoint_cliques", "cliques": cliques})


def path(n: int) -> WeightedGraph:
    if n < 2:
        raise GraphError("path needs n >= 2")
    return WeightedGraph.from_edges(n, ((i, i + 1, 1.0) for i in range(n - 1)), meta={"family": "path"})


def complete(n: int) -> WeightedGraph:
    if n < 2:
        raise GraphError("complete needs n >= 2")
    return WeightedGraph.from_edges(n, _clique_edges(0, n), meta={"family": "complete"})


def planted(k: int, s: int, p_out: float = 0.02, noise: float = 1.0, seed: int = 0) -> WeightedGraph:
    """``k`` unit cliques of size ``s`` plus random cross edges of weight ``noise``.

    Each cross-block pair is present independently with probability ``p_out``.
    """
    if k < 1 or s < 2 or not (0 <= p_out <= 1) or not noise > 0:
        raise GraphError("planted needs k >= 1, s >= 2, 0 <= p_out <= 1, noise > 0")
    rng = np.random.default_rng(seed)
    n = k * s
    edges = []
    for i in range(k):
        edges.extend(_clique_edges(i * s, s))
    block = np.arange(n) // s
    iu, ju = np.triu_indices(n, 1)
    cross = block[iu] != block[ju]
    hit = rng.random(cross.sum()) < p_out
    edges.extend((int(a), int(b), noise) for a, b in zip(iu[cross][hit], ju[cross][hit]))
    cliques = [list(range(i * s, (i + 1) * s)) for i in range(k)]
    return WeightedGraph.from_edges(n, edges, meta={"family": "planted", "cliques": cliques})


def random_geometric(n: int, radius: float = 0.2, seed: int = 0) -> WeightedGraph:
    """Unit-weight disk graph on ``n`` uniform points in the unit square.

    Each point is also joined to its nearest neighbour so no vertex is isolated.
    """
    if n < 2 or not radius > 0:
        raise GraphError("random_geometric needs n >= 2, radius > 0")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    tree = cKDTree(pts)
    close = tree.query_pairs(radius, output_type="ndarray")
    dist = np.linalg.norm(pts[close[:, 0]] - pts[close[:, 1]], axis=1)
    pairs = set(map(tuple, close[dist < radius].tolist()))
    _, nearest = tree.query(pts, k=2)
    pairs.update((min(i, j), max(i, j)) for i, j in enumerate(nearest[:, 1].tolist()))
    return WeightedGraph.from_edges(n, ((a, b, 1.0) for a, b in sorted(pairs)), meta={"family": "random_geometric"})


FAMILIES = {
    "ring_of_cliques": ring_of_cliques,
    "disjoint_cliques": disjoint_cliques,
    "path": path,
    "complete": complete,
    "planted": planted,
    "random_geometric": random_geometric,
    "fig2": gen_fig2,
    "appendix_a": gen_appendix_a,
}


def gen_test_family(name: str, **params) -> WeightedGraph:
    """Build a named graph family; hyphens and underscores are interchangeable."""
    key = name.replace("-", "_").lower()
    try:
        fn = FAMILIES[key]
    except KeyError:
        raise GraphError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    try:
        return fn(**params)
    except TypeError as exc:
        raise GraphError(f"bad parameters for {name}: {exc}") from None
