"""Hot inner loops, each in two flavours.

``*_nb`` functions are numba-compiled loops over the CSR/dense adjacency;
``*_np`` functions are vectorised numpy equivalents working on the canonical
edge arrays.  The public names (without suffix) dispatch on
:data:`kcuts._accel.USE_NUMBA`.  Both flavours must agree to floating-point
round-off; ``tests/test_kernels.py`` holds them to that.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# Relative window inside which two objective values count as a tie.  Exact
# ties are common on symmetric graphs and the two kernel flavours sum in
# different orders.
TIE_RTOL = 1e-10
TIE_ATOL = 1e-12

_CHUNK = 1 << 15


# --------------------------------------------------------------------------
# sweep profile: cut weight and volume of every prefix of a vertex order


@njit(cache=True, nogil=True)
def sweep_profile_nb(order, indptr, indices, data, degrees):
    n = degrees.shape[0]
    m = order.shape[0]
    rank = np.full(n, -1, dtype=np.int64)
    cut = np.empty(m, dtype=np.float64)
    vol = np.empty(m, dtype=np.float64)
    c = 0.0
    s = 0.0
    for p in range(m):
        v = order[p]
        rank[v] = p
        inside = 0.0
        for e in range(indptr[v], indptr[v + 1]):
            if rank[indices[e]] >= 0:
                inside += data[e]
        # edges into the prefix stop crossing, the rest start crossing
        c += degrees[v] - 2.0 * inside
        s += degrees[v]
        cut[p] = c
        vol[p] = s
    return cut, vol


def sweep_profile_np(order, src, dst, weight, degrees):
    n = degrees.shape[0]
    m = order.shape[0]
    rank = np.full(n, m, dtype=np.int64)
    rank[order] = np.arange(m)
    lo = np.minimum(rank[src], rank[dst])
    hi = np.maximum(rank[src], rank[dst])
    live = lo < m
    # edge crosses prefix p (ranks < p) iff lo < p <= hi
    diff = np.zeros(m + 2, dtype=np.float64)
    np.add.at(diff, lo[live] + 1, weight[live])
    np.add.at(diff, hi[live] + 1, -weight[live])
    cut = np.cumsum(diff)[1 : m + 1]
    vol = np.cumsum(degrees[order])
    return cut, vol


def sweep_profile(order, graph_arrays):
    """Cut weight and volume of ``order[:p+1]`` for every ``p``.

    :param order: vertex ids, most preferred first
    :param graph_arrays: ``(indptr, indices, data, src, dst, weight, degrees)``
    :return: ``(cut, vol)`` arrays of length ``len(order)``
    """
    indptr, indices, data, src, dst, weight, degrees = graph_arrays
    order = np.ascontiguousarray(order, dtype=np.int64)
    if USE_NUMBA:
        return sweep_profile_nb(order, indptr, indices, data, degrees)
    return sweep_profile_np(order, src, dst, weight, degrees)


# --------------------------------------------------------------------------
# exhaustive expansion of every subset (vertex n-1 pinned outside)


@njit(cache=True, nogil=True)
def subset_expansions_nb(adj, degrees):
    n = degrees.shape[0]
    total = 0.0
    for i in range(n):
        total += degrees[i]
    count = 1 << (n - 1)
    out = np.empty(count, dtype=np.float64)
    cut = np.zeros(count, dtype=np.float64)
    vol = np.zeros(count, dtype=np.float64)
    out[0] = np.inf
    for mask in range(1, count):
        # extend the mask without its lowest bit by vertex i
        prev = mask & (mask - 1)
        low = mask ^ prev
        i = 0
        while (low >> i) != 1:
            i += 1
        inside = 0.0
        for j in range(n - 1):
            if (prev >> j) & 1:
                inside += adj[i, j]
        c = cut[prev] + degrees[i] - 2.0 * inside
        if c < 0.0:
            c = 0.0
        cut[mask] = c
        vol[mask] = vol[prev] + degrees[i]
        out[mask] = c / min(vol[mask], total - vol[mask])
    return out


def subset_expansions_np(src, dst, weight, degrees):
    n = degrees.shape[0]
    total = degrees.sum()
    count = 1 << (n - 1)
    out = np.empty(count, dtype=np.float64)
    out[0] = np.inf
    shifts = np.arange(n, dtype=np.int64)
    for start in range(1, count, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, count), dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(bool)
        vol = bits.astype(np.float64) @ degrees
        crossing = bits[:, src] != bits[:, dst]
        cut = crossing.astype(np.float64) @ weight
        out[start : start + masks.size] = cut / np.minimum(vol, total - vol)
    return out


def subset_expansions(graph_arrays, adj):
    """Expansion of every subset of ``{0..n-2}`` indexed by bitmask (mask 0 is ``inf``)."""
    _, _, _, src, dst, weight, degrees = graph_arrays
    if USE_NUMBA:
        return subset_expansions_nb(adj, degrees)
    return subset_expansions_np(src, dst, weight, degrees)


# --------------------------------------------------------------------------
# exhaustive k-sparse-cuts objective over labelings in {0 (none), 1..k}^n


@njit(cache=True, nogil=True)
def labeling_objective_nb(k, src, dst, weight, degrees):
    n = degrees.shape[0]
    total = 0.0
    for i in range(n):
        total += degrees[i]
    base = k + 1
    count = 1
    for _ in range(n):
        count *= base
    out = np.empty(count, dtype=np.float64)
    labels = np.zeros(n, dtype=np.int64)
    vol = np.zeros(base, dtype=np.float64)
    cut = np.zeros(base, dtype=np.float64)
    size = np.zeros(base, dtype=np.int64)
    for idx in range(count):
        rest = idx
        for i in range(n):
            labels[i] = rest % base
            rest //= base
        vol[:] = 0.0
        cut[:] = 0.0
        size[:] = 0
        for i in range(n):
            vol[labels[i]] += degrees[i]
            size[labels[i]] += 1
        for e in range(src.shape[0]):
            a = labels[src[e]]
            b = labels[dst[e]]
            if a != b:
                cut[a] += weight[e]
                cut[b] += weight[e]
        worst = 0.0
        for p in range(1, base):
            if size[p] == 0 or size[p] == n:
                worst = np.inf
                break
            phi = cut[p] / min(vol[p], total - vol[p])
            if phi > worst:
                worst = phi
        out[idx] = worst
    return out


def labeling_objective_np(k, src, dst, weight, degrees):
    n = degrees.shape[0]
    total = degrees.sum()
    base = k + 1
    count = base**n
    out = np.empty(count, dtype=np.float64)
    powers = base ** np.arange(n, dtype=np.int64)
    for start in range(0, count, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, count), dtype=np.int64)
        labels = (idx[:, None] // powers) % base
        worst = np.zeros(idx.size)
        for p in range(1, base):
            member = labels == p
            size = member.sum(axis=1)
            vol = member.astype(np.float64) @ degrees
            cut = (member[:, src] != member[:, dst]).astype(np.float64) @ weight
            with np.errstate(divide="ignore", invalid="ignore"):
                phi = cut / np.minimum(vol, total - vol)
            phi[(size == 0) | (size == n)] = np.inf
            worst = np.maximum(worst, phi)
        out[start : start + idx.size] = worst
    return out


def labeling_objective(k, graph_arrays):
    """``max_p φ(part p)`` for every labeling, indexed in base ``k+1`` (vertex 0 least significant)."""
    _, _, _, src, dst, weight, degrees = graph_arrays
    if USE_NUMBA:
        return labeling_objective_nb(k, src, dst, weight, degrees)
    return labeling_objective_np(k, src, dst, weight, degrees)


# --------------------------------------------------------------------------
# selection helpers shared by both flavours


def near_min_indices(values):
    """Indices whose value ties the minimum within :data:`TIE_RTOL`."""
    best = values.min()
    if not np.isfinite(best):
        return np.flatnonzero(values == best)
    return np.flatnonzero(values <= best + max(TIE_RTOL * abs(best), TIE_ATOL))
