import numpy as np
import pytest

from kcuts import kernels
from kcuts.graph import (
    WeightedGraph,
    complete,
    disjoint_cliques,
    gen_fig2,
    path,
    planted,
    ring_of_cliques,
)

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def random_connected(n, seed, density=0.4):
    """Connected graph with random positive weights: a random spanning tree plus extra edges."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    edges = {}
    for i in range(1, n):
        a, b = perm[i], perm[rng.integers(0, i)]
        edges[(min(a, b), max(a, b))] = rng.uniform(0.1, 2.0)
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) not in edges and rng.random() < density:
                edges[(a, b)] = rng.uniform(0.1, 2.0)
    return WeightedGraph.from_edges(n, ((a, b, w) for (a, b), w in edges.items()))


def tiny_fixtures(max_n):
    """Named small graphs with at most ``max_n`` vertices."""
    out = {
        "K2": path(2),
        "path4": path(4),
        "path8": path(8),
        "K5": complete(5),
        "two_triangles": disjoint_cliques(2, 3),
        "ring3x3": ring_of_cliques(3, 3, 0.5),
        "ring3x4": ring_of_cliques(3, 4, 0.1),
        "fig2_10": gen_fig2(10, 3, 1.0),
        "fig2_13": gen_fig2(13, 3, 1.0),
        "planted2x5": planted(2, 5, 0.2, 1.0, seed=3),
    }
    for n in range(5, max_n + 1, 2):
        out[f"random{n}"] = random_connected(n, seed=100 + n)
    return {k: g for k, g in out.items() if g.n <= max_n}


@pytest.fixture(params=[True, False], ids=["numba", "numpy"])
def kernel_flavour(request, monkeypatch):
    """Run a test once per kernel flavour."""
    monkeypatch.setattr(kernels, "USE_NUMBA", request.param)
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
