"""Lower-bound certificates, small-set extraction, partition completion and brute-force oracles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import kernels
from .graph import Cut, GraphError, WeightedGraph, expansion

log = logging.getLogger(__name__)

CERT_TOL = 1e-8
MAX_BRUTE_N = 20
MAX_LABELINGS = 10**7


@dataclass(frozen=True)
class Certificate:
    """Outcome of checking ``max_i φ(S_i) >= λ_m / 2`` for ``m`` disjoint sets.

    ``lambda_upper_bound`` reads the same inequality the other way: any
    explicit disjoint family bounds ``λ_m`` from above by ``2 max_i φ(S_i)``.
    """

    lambda_k: float
    lower_bound: float
    max_phi: float
    slack: float
    verdict: str
    num_sets: int

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def lambda_upper_bound(self) -> float:
        return 2.0 * self.max_phi

    def to_json(self) -> dict:
        return {
            "lambda_k": self.lambda_k,
            "lower_bound": self.lower_bound,
            "max_phi": self.max_phi,
            "slack": self.slack,
            "verdict": self.verdict,
            "num_sets": self.num_sets,
            "lambda_upper_bound": self.lambda_upper_bound,
        }


def _check_disjoint(g: WeightedGraph, sets) -> list[list[int]]:
    seen = np.zeros(g.n, dtype=bool)
    out = []
    for s in sets:
        members = sorted(set(int(i) for i in s))
        if not members:
            raise GraphError("empty set in family")
        if members[0] < 0 or members[-1] >= g.n:
            raise GraphError("vertex id out of range")
        if seen[members].any():
            raise GraphError("sets in family overlap")
        seen[members] = True
        out.append(members)
    return out


def verify_lower_bound(g: WeightedGraph, cuts, lambda_k: float, tol: float = CERT_TOL) -> Certificate:
    """Check the eigenvalue lower bound on a disjoint family.

    ``lambda_k`` should be ``λ_m`` where ``m = len(cuts)``; the bound holds
    for any ``m`` pairwise disjoint nonempty sets.

    :param cuts: iterables of vertex ids or :class:`Cut` objects
    :raises GraphError: if sets overlap or one is empty
    """
    family = _check_disjoint(g, [c.members if isinstance(c, Cut) else c for c in cuts])
    if not family:
        raise GraphError("certificate needs at least one set")
    # a set equal to V has no defined expansion; treat as worst case
    phis = [expansion(g, s).expansion if len(s) < g.n else math.inf for s in family]
    max_phi = max(phis)
    lower = lambda_k / 2.0
    slack = max_phi - lower
    return Certificate(float(lambda_k), lower, max_phi, slack, "pass" if slack >= -tol else "fail", len(family))


def small_set(report, g: WeightedGraph, k: int | None = None) -> Cut:
    """Minimum-weight cut of a report.

    Disjointness forces ``w(S) <= w(V) / m`` for the lightest of ``m`` reported
    sets (``<= 2 w(V) / m`` when sets may carry the heavier side), which is the
    averaging bound asserted here.
    """
    cuts = list(report.cuts)
    if not cuts:
        raise GraphError("report has no cuts")
    best = min(cuts, key=lambda c: (c.set_weight, c.members))
    m = len(cuts)
    bound = 2.0 * g.total_weight / m
    if best.set_weight > bound * (1 + 1e-12):
        raise AssertionError(f"lightest set weight {best.set_weight} exceeds 2 w(V)/{m} = {bound}")
    return best


def complete_to_partition(g: WeightedGraph, cuts) -> tuple[list[list[int]], float]:
    """Greedy extension of a disjoint family to a partition of ``V``.

    Leftover vertices join the part they send most weight to (ties to the
    lowest part index), processed in rounds so attachments propagate.  A
    leftover region with no edge to any part becomes a new part, one per
    connected component.  No expansion bound is claimed for the result.

    :return: ``(parts, max_phi)``; ``max_phi`` is ``nan`` when there is a single part
    """
    parts = _check_disjoint(g, [c.members if isinstance(c, Cut) else c for c in cuts])
    label = np.full(g.n, -1, dtype=np.int64)
    for idx, members in enumerate(parts):
        label[members] = idx
    adj = g.adjacency
    while np.any(label < 0):
        left = np.flatnonzero(label < 0)
        attach = np.zeros((left.size, max(len(parts), 1)))
        sub = adj[left]
        for row, v in enumerate(left):
            lo, hi = sub.indptr[row], sub.indptr[row + 1]
            nbrs = sub.indices[lo:hi]
            wts = sub.data[lo:hi]
            lab = label[nbrs]
            ok = lab >= 0
            np.add.at(attach[row], lab[ok], wts[ok])
        touched = attach.max(axis=1) > 0
        if np.any(touched):
            choice = attach.argmax(axis=1)
            for row in np.flatnonzero(touched):
                label[left[row]] = choice[row]
            for v in left[touched]:
                parts[label[v]].append(int(v))
            continue
        # nothing left touches a part: seed one new part per connected component
        _, comp = connected_components(adj[left][:, left], directed=False)
        for cidx in np.unique(comp):
            members = sorted(left[comp == cidx].tolist())
            label[members] = len(parts)
            parts.append(members)
    parts = [sorted(p) for p in parts]
    if len(parts) < 2:
        return parts, math.nan
    max_phi = max(expansion(g, p).expansion for p in parts)
    return parts, max_phi


def _lex_smaller(a: int, b: int) -> bool:
    """Is the sorted member tuple of bitmask ``a`` lexicographically below that of ``b``?"""
    diff = a ^ b
    low = diff & -diff
    x = low.bit_length() - 1
    if a & low:
        # a holds x, b does not; b wins only if it has nothing above x
        return (b >> (x + 1)) != 0
    return (a >> (x + 1)) == 0


def brute_force_min_expansion(g: WeightedGraph) -> Cut:
    """Exact minimum-expansion set by enumerating every subset (``n <= 20``).

    Among equal optima the lexicographically smallest member list wins; the
    vertex ``n-1`` is pinned outside, which loses nothing since φ is symmetric
    under complement.
    """
    if g.n > MAX_BRUTE_N:
        raise GraphError(f"brute force limited to n <= {MAX_BRUTE_N}, got {g.n}")
    if g.n < 2:
        raise GraphError("need at least two vertices")
    values = kernels.subset_expansions(g.kernel_arrays, np.ascontiguousarray(g.dense_adjacency()))
    candidates = kernels.near_min_indices(values)
    best = int(candidates[0])
    for c in candidates[1:]:
        if _lex_smaller(int(c), best):
            best = int(c)
    members = [i for i in range(g.n - 1) if (best >> i) & 1]
    return expansion(g, members)


def brute_force_k_cuts(g: WeightedGraph, k: int) -> tuple[float, list[list[int]]]:
    """Exact optimum of ``min max_i φ(S_i)`` over ``k`` disjoint nonempty sets.

    Enumerates all ``(k+1)^n`` labelings (label 0 = unassigned).

    :return: ``(value, sets)`` for the first optimal labeling in enumeration order
    """
    if k < 1:
        raise GraphError("k must be positive")
    if g.n > 10 or k > 3 or (k + 1) ** g.n > MAX_LABELINGS:
        raise GraphError(f"brute-force k-cuts limited to n <= 10, k <= 3 (got n={g.n}, k={k})")
    if k > g.n:
        raise GraphError("k exceeds the vertex count")
    values = kernels.labeling_objective(k, g.kernel_arrays)
    idx = int(kernels.near_min_indices(values)[0])
    labels = [(idx // (k + 1) ** i) % (k + 1) for i in range(g.n)]
    sets = [[i for i, lab in enumerate(labels) if lab == p] for p in range(1, k + 1)]
    return float(values.min()), sets
