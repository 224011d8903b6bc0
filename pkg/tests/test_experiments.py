import math

import pytest

from kcuts.experiments import (
    fig2_closed_form,
    recursive_partition,
    run_appendix_a,
    run_fig2,
)
from kcuts.graph import GraphError, disjoint_cliques, expansion, gen_appendix_a, path, ring_of_cliques


def test_recursive_partition_covers():
    g = ring_of_cliques(4, 5, 0.1)
    parts = recursive_partition(g, 4)
    assert sorted(v for p in parts for v in p) == list(range(g.n))
    assert sorted(map(sorted, parts)) == [list(range(i * 5, i * 5 + 5)) for i in range(4)]


def test_recursive_partition_components_first():
    g = disjoint_cliques(3, 3)
    assert recursive_partition(g, 3) == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]


def test_recursive_partition_bounds():
    with pytest.raises(GraphError):
        recursive_partition(path(3), 4)
    assert recursive_partition(path(3), 1) == [[0, 1, 2]]


def test_recursive_partition_deterministic():
    g = gen_appendix_a(64, 16, 0.5, 1.0)
    assert recursive_partition(g, 8, seed=0) == recursive_partition(g, 8, seed=0)


def test_fig2_closed_form_value():
    # (n-1)/k = 144, pnk = 20748
    assert fig2_closed_form(1729, 12, 1.0) == pytest.approx(20748 / (144**2 + 20748), rel=1e-15)


def test_fig2_needs_large_n():
    with pytest.raises(GraphError):
        run_fig2(13, 3, 1.0)


def test_fig2_small_run():
    rep = run_fig2(65, 4, 1.0, seed=0, trials=8)
    g_phi = rep.expansions["partition"]
    assert len(rep.families["partition"]) == 4
    assert rep.checks["cliques_bound"]["holds"]
    # hub part: s(s-1) + s*pn + (n-1)pn vs complement (k-1)(s(s-1) + s*pn); s = 16
    s, pn = 16, 65
    cut = pn * s * 3
    comp = 3 * (s * (s - 1) + s * pn)
    assert g_phi[0] == pytest.approx(cut / comp, rel=1e-12)


def test_fig2_report_recomputes():
    from kcuts.graph import gen_fig2

    rep = run_fig2(65, 4, 1.0, seed=2, trials=8)
    again = rep.recompute(gen_fig2(65, 4, 1.0))
    assert again == rep.expansions


def test_appendix_a_small_run():
    rep = run_appendix_a(64, 16, 0.5, 1.0, seed=0, trials=8)
    chk = rep.checks
    assert chk["clique_bound"]["ratio"] <= 1.5
    assert chk["superset_vs_clique"]["worst_ratio"] <= 1.0
    assert chk["recursive"]["parts"] == 16
    assert rep.recompute(gen_appendix_a(64, 16, 0.5, 1.0)) == rep.expansions
    rows = rep.csv_rows().splitlines()
    assert rows[0] == "experiment,n,k,eps,c,quantity,value"
    assert any(r.startswith("appendix_a,64,16,0.5,1.0,clique_bound.ratio,") for r in rows)


def test_appendix_a_json_shape():
    rep = run_appendix_a(64, 16, 0.5, 1.0, seed=0, trials=4)
    doc = rep.to_json()
    assert set(doc) >= {"experiment", "params", "lambda_k", "families", "expansions", "checks"}
    assert math.isfinite(doc["lambda_k"])
    for s, phi in zip(doc["families"]["supersets"], doc["expansions"]["supersets"]):
        assert phi == expansion(gen_appendix_a(64, 16, 0.5, 1.0), s).expansion
