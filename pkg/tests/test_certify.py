import math

import numpy as np
import pytest

from kcuts.certify import (
    brute_force_k_cuts,
    brute_force_min_expansion,
    complete_to_partition,
    small_set,
    verify_lower_bound,
)
from kcuts.graph import GraphError, complete, disjoint_cliques, expansion, path, ring_of_cliques
from kcuts.rounding import many_sparse_cuts
from kcuts.spectral import spectral_data

from conftest import random_connected


def test_cliques_certificate_zero_slack():
    g = disjoint_cliques(3, 4)
    cert = verify_lower_bound(g, g.meta["cliques"], 0.0)
    assert cert.passed and cert.max_phi == 0.0 and cert.slack == 0.0


def test_corrupted_lambda_fails():
    g = ring_of_cliques(3, 4)
    cert = verify_lower_bound(g, [[0, 1], [5]], 10.0)
    assert cert.verdict == "fail"
    assert cert.max_phi <= 1.0


def test_overlap_and_empty_rejected():
    g = path(5)
    with pytest.raises(GraphError, match="overlap"):
        verify_lower_bound(g, [[0, 1], [1, 2]], 0.1)
    with pytest.raises(GraphError, match="empty"):
        verify_lower_bound(g, [[0], []], 0.1)


def test_lambda_upper_bound():
    g = disjoint_cliques(2, 3)
    cert = verify_lower_bound(g, [[0, 1, 2]], 0.0)
    assert cert.lambda_upper_bound == 0.0


def test_small_set_cliques():
    g = disjoint_cliques(4, 4)
    rep = many_sparse_cuts(g, 4, trials=8, seed=1)
    s = small_set(rep, g)
    assert s.set_weight == pytest.approx(g.total_weight / 4)


def test_small_set_ring():
    g = ring_of_cliques(8, 16, 0.1)
    rep = many_sparse_cuts(g, 8, trials=8, seed=4)
    s = small_set(rep, g)
    assert s.expansion <= rep.max_phi
    assert s.set_weight <= 2 * g.total_weight / len(rep.cuts)


def test_complete_to_partition_covers():
    g = ring_of_cliques(4, 4, 0.1)
    parts, phi = complete_to_partition(g, [[0, 1], [8]])
    assert sorted(v for p in parts for v in p) == list(range(g.n))
    assert phi == max(expansion(g, p).expansion for p in parts)


def test_complete_to_partition_unattached_component():
    g = disjoint_cliques(3, 3)
    parts, phi = complete_to_partition(g, [[0]])
    assert parts == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    assert phi == 0.0


def test_complete_to_partition_single_part():
    parts, phi = complete_to_partition(path(3), [[1]])
    assert parts == [[0, 1, 2]] and math.isnan(phi)


def test_brute_force_path4():
    c = brute_force_min_expansion(path(4))
    assert c.members == (0, 1)
    assert c.expansion == pytest.approx(1 / 3)


def test_brute_force_k2():
    c = brute_force_min_expansion(path(2))
    assert c.members == (0,) and c.expansion == 1.0


def test_brute_force_complete4():
    # every balanced split of K4: cut 4, volume 6
    c = brute_force_min_expansion(complete(4))
    assert c.expansion == pytest.approx(4 / 6)
    assert c.members == (0, 1)


def test_brute_force_limits():
    with pytest.raises(GraphError):
        brute_force_min_expansion(path(21))
    with pytest.raises(GraphError):
        brute_force_k_cuts(path(11), 2)
    with pytest.raises(GraphError):
        brute_force_k_cuts(path(5), 4)


def test_brute_force_k_cuts_two_triangles():
    val, sets = brute_force_k_cuts(disjoint_cliques(2, 3), 2)
    assert val == 0.0
    assert sorted(map(sorted, sets)) == [[0, 1, 2], [3, 4, 5]]


@pytest.mark.parametrize("seed", range(4))
def test_brute_force_k_cuts_above_half_lambda(seed):
    g = random_connected(7, seed)
    lam = spectral_data(g, 3).eigenvalues
    for k in (1, 2, 3):
        val, _ = brute_force_k_cuts(g, k)
        assert val >= lam[k - 1] / 2 - 1e-8
