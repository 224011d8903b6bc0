"""Recursive spectral bisection baseline and the two separation experiments."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .certify import verify_lower_bound
from .graph import GraphError, WeightedGraph, expansion, gen_appendix_a, gen_fig2
from .rounding import many_sparse_cuts, sweep_order
from .spectral import bottom_k_eigs, normalized_laplacian, spectral_data

log = logging.getLogger(__name__)


def _bisect(g: WeightedGraph, part: np.ndarray, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Split ``part`` by the best prefix of its induced Fiedler ordering.

    A disconnected induced subgraph (including isolated vertices) is split
    along components instead: the component holding the smallest id goes first.
    """
    part = np.sort(part)
    _, comp = connected_components(g.adjacency[part][:, part], directed=False)
    if comp.max() > 0:
        first = comp == comp[0]
        return part[first], part[~first]
    sub, ids = g.induced(part)
    lam, vecs, _, _ = bottom_k_eigs(normalized_laplacian(sub), 2, seed=seed)
    fiedler = vecs[:, 1] / np.sqrt(sub.degrees)
    order = np.lexsort((np.arange(sub.n), -fiedler))
    length, _, _ = sweep_order(sub, order)
    side = np.zeros(sub.n, dtype=bool)
    side[order[:length]] = True
    return ids[side], ids[~side]


def recursive_partition(g: WeightedGraph, k: int, seed: int = 0) -> list[list[int]]:
    """Baseline ``k``-partition: repeatedly bisect the heaviest splittable part.

    Weight is ``w(P) = Σ_{i in P} d_i`` in ``g``; ties go to the part with the
    smaller minimum vertex.  Each bisection uses the induced subgraph only.
    """
    if not 1 <= k <= g.n:
        raise GraphError(f"k must lie in [1, n={g.n}]")
    parts = [np.arange(g.n)]
    while len(parts) < k:
        splittable = [i for i, p in enumerate(parts) if p.size > 1]
        if not splittable:
            log.warning("only %d parts reachable, %d requested", len(parts), k)
            break
        i = min(splittable, key=lambda j: (-g.degrees[parts[j]].sum(), parts[j].min()))
        a, b = _bisect(g, parts[i], seed)
        parts[i:i + 1] = [a, b]
    return sorted((sorted(p.tolist()) for p in parts), key=lambda p: p[0])


@dataclass
class ExperimentReport:
    """Raw sets and spectrum for one experiment, with every reported ratio recomputable."""

    name: str
    params: dict
    eigenvalues: list[float]
    families: dict[str, list[list[int]]]
    expansions: dict[str, list[float]]
    checks: dict[str, dict]
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def lambda_k(self) -> float:
        return self.eigenvalues[-1]

    def recompute(self, g: WeightedGraph) -> dict[str, list[float]]:
        """Expansions of every stored family, recomputed from scratch on ``g``."""
        return {name: [expansion(g, s).expansion for s in sets] for name, sets in self.families.items()}

    def to_json(self) -> dict:
        return {
            "experiment": self.name,
            "params": self.params,
            "seed": self.seed,
            "lambda_k": self.lambda_k,
            "eigenvalues": self.eigenvalues,
            "families": self.families,
            "expansions": self.expansions,
            "checks": self.checks,
            "extra": self.extra,
        }

    def csv_rows(self) -> str:
        """``param,value`` rows of the scalar ratios for plotting."""
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["experiment", *self.params.keys(), "quantity", "value"])
        for name, check in self.checks.items():
            for key, val in check.items():
                if isinstance(val, (int, float)) and not isinstance(val, bool):
                    w.writerow([self.name, *self.params.values(), f"{name}.{key}", repr(float(val))])
        return out.getvalue()


def fig2_closed_form(n: int, k: int, p: float) -> float:
    """The hub-clique expansion expression ``pnk / (((n-1)/k)² + pnk)``."""
    s = (n - 1) / k
    return p * n * k / (s * s + p * n * k)


def fig2_ratio_closed_form(n: int, k: int, p: float) -> float:
    """``max φ(𝒫') / sqrt(λ upper bound)`` evaluated from the closed forms alone."""
    s = (n - 1) // k
    clique_phi = p * n / (s - 1 + p * n)
    return fig2_closed_form(n, k, p) / math.sqrt(2 * clique_phi)


def run_fig2(n: int, k: int, p: float = 1.0, seed: int = 0, trials: int | None = None) -> ExperimentReport:
    """Partition-vs-sparse-cuts gap on the hub-and-cliques graph."""
    if n <= k**3:
        raise GraphError(f"fig2 experiment needs n > k^3 (n={n}, k={k})")
    g = gen_fig2(n, k, p)
    cliques = g.meta["cliques"]
    hub = g.meta["hub"]
    partition = [sorted(cliques[0] + [hub])] + [list(c) for c in cliques[1:]]
    covered = sorted(v for part in partition for v in part)
    if covered != list(range(g.n)):
        raise AssertionError("P' is not a partition")
    sd = spectral_data(g, k, seed=seed)
    part_phi = [expansion(g, s).expansion for s in partition]
    clique_phi = [expansion(g, s).expansion for s in cliques]
    max_part = max(part_phi)
    closed = fig2_closed_form(n, k, p)
    clique_cert = verify_lower_bound(g, cliques, sd.lambda_k)
    report = many_sparse_cuts(g, k, trials=trials, seed=seed, sd=sd)
    checks = {
        "partition": {
            "max_phi": max_part,
            "closed_form": closed,
            "rel_err": abs(max_part - closed) / closed,
            "ratio_to_sqrt_lambda_k": max_part / math.sqrt(sd.lambda_k),
        },
        "cliques_bound": {
            "lambda_k": sd.lambda_k,
            "lambda_upper_bound": clique_cert.lambda_upper_bound,
            "holds": bool(sd.lambda_k <= clique_cert.lambda_upper_bound + 1e-12),
            "max_clique_phi": max(clique_phi),
        },
        "sparse_cuts": {
            "max_phi": report.max_phi,
            "num_cuts": len(report.cuts),
            "ratio_to_sqrt_lambda_k": report.max_phi / math.sqrt(sd.lambda_k),
        },
    }
    return ExperimentReport(
        "fig2",
        {"n": n, "k": k, "p": p},
        sd.eigenvalues.tolist(),
        {"partition": partition, "cliques": [list(c) for c in cliques], "sparse_cuts": [list(c.members) for c in report.cuts]},
        {"partition": part_phi, "cliques": clique_phi, "sparse_cuts": [c.expansion for c in report.cuts]},
        checks,
        seed,
    )


def run_appendix_a(n: int, k: int, eps: float = 0.5, c: float = 1.0, seed: int = 0, trials: int | None = None) -> ExperimentReport:
    """Recursive bisection versus sparse cuts on the super-set construction."""
    g = gen_appendix_a(n, k, eps, c)
    meta = g.meta
    cliques = [blk for group in meta["cliques"] for blk in group]
    supersets = meta["supersets"]
    sd = spectral_data(g, k, seed=seed)
    clique_phi = [expansion(g, s).expansion for s in cliques]
    superset_phi = [expansion(g, s).expansion for s in supersets]
    bound1 = (c + 1) * k**2 / n**2
    # every φ(S_i) against every φ(S_ij)/(c+1)
    worst_ratio = max(superset_phi) / (min(clique_phi) / (c + 1))

    parts = recursive_partition(g, k, seed=seed)
    part_phi = [expansion(g, s).expansion for s in parts]
    unit = sum(1 for phi in part_phi if phi == 1.0)
    extras = set(meta["extras"])
    singleton_extras = sum(1 for s in parts if len(s) == 1 and s[0] in extras)

    report = many_sparse_cuts(g, k, trials=trials, seed=seed, sd=sd)
    threshold = 20 * math.sqrt(sd.lambda_k * math.log(k))
    checks = {
        "clique_bound": {
            "max_clique_phi": max(clique_phi),
            "bound": bound1,
            "ratio": max(clique_phi) / bound1,
        },
        "superset_vs_clique": {
            "max_superset_phi": max(superset_phi),
            "min_clique_phi_over_c1": min(clique_phi) / (c + 1),
            "worst_ratio": worst_ratio,
        },
        "recursive": {
            "parts": len(parts),
            "unit_expansion_parts": unit,
            "singleton_extra_parts": singleton_extras,
            "required": k - meta["num_supersets"],
            "max_phi": max(part_phi),
        },
        "sparse_cuts": {
            "max_phi": report.max_phi,
            "num_cuts": len(report.cuts),
            "threshold": threshold,
        },
    }
    return ExperimentReport(
        "appendix_a",
        {"n": n, "k": k, "eps": eps, "c": c},
        sd.eigenvalues.tolist(),
        {"cliques": cliques, "supersets": supersets, "recursive": parts, "sparse_cuts": [list(x.members) for x in report.cuts]},
        {"cliques": clique_phi, "supersets": superset_phi, "recursive": part_phi, "sparse_cuts": [x.expansion for x in report.cuts]},
        checks,
        seed,
        {"eps_effective": meta["eps_effective"], "num_supersets": meta["num_supersets"]},
    )
