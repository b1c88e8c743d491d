"""Deterministic property suites: exact identities with no stochastic component.

Every graph here is either a fixed structure or a seeded (hence reproducible)
sample used purely as an arbitrary deterministic input; the assertions are
algebraic identities, not Monte-Carlo statements.
"""

import numpy as np
import pytest

from graphonstat import (K2, K3, C4, K12, conditional_1pt,
                         conditional_kernel_2pt, constant_graphon, count_copies,
                         edge_join, empirical_graphon, graphon_by_name,
                         hom_density, one_point_density, two_point_matrix)
from graphonstat.graphon import kernel_bound

from conftest import random_graph

MOTIFS = (K2, K12, K3, C4)
GRAPHS = [random_graph(12, 0.5, seed=0), random_graph(9, 0.3, seed=1),
          random_graph(15, 0.7, seed=2)]
GRAPHONS = [graphon_by_name(n) for n in
            ("paper-w1", "paper-w2", "paper-w3", "wminus", "wplus", "const:0.5")]


@pytest.mark.parametrize("g", GRAPHS, ids=["g12", "g9", "g15"])
@pytest.mark.parametrize("h", MOTIFS, ids=["k2", "k12", "k3", "c4"])
def test_one_point_partition_identity(g, h):
    # sum_v X_a(v) = |Aut| X for every pinned vertex a
    op = one_point_density(h, g)
    x = count_copies(h, g)
    for a in range(h.k):
        assert int(round(op.x_a[a].sum())) == h.aut * x


@pytest.mark.parametrize("g", GRAPHS, ids=["g12", "g9", "g15"])
@pytest.mark.parametrize("h", MOTIFS, ids=["k2", "k12", "k3", "c4"])
def test_two_point_partition_identity(g, h):
    # sum_{u != v} X_{a,b}(u,v) over all ordered (a,b) equals k(k-1)|Aut| X
    tp = two_point_matrix(h, g)
    total = tp.values.sum() * 2 * h.aut * float(g.n) ** (h.k - 2)
    assert total == pytest.approx(h.k * (h.k - 1) * h.aut * count_copies(h, g),
                                  rel=1e-10)


@pytest.mark.parametrize("g", GRAPHS, ids=["g12", "g9", "g15"])
@pytest.mark.parametrize("h", MOTIFS, ids=["k2", "k12", "k3", "c4"])
def test_two_point_symmetry_zero_diagonal_bounds(g, h):
    tp = two_point_matrix(h, g)
    assert np.array_equal(np.diag(tp.values), np.zeros(g.n))
    assert np.allclose(tp.values, tp.values.T, atol=1e-12)
    assert tp.values.min() >= 0.0
    assert tp.values.max() <= kernel_bound(h) + 1e-12


@pytest.mark.parametrize("w", GRAPHONS, ids=lambda w: w.name)
def test_weak_join_density_dominates_strong(w):
    for h in (K2, K3, C4):
        for pa in h.ordered_edges()[:2]:
            for pb in h.ordered_edges()[:2]:
                weak = hom_density(edge_join(h, pa, h, pb, "weak"), w)
                strong = hom_density(edge_join(h, pa, h, pb, "strong"), w)
                assert weak >= strong - 1e-12


def test_weak_equals_strong_on_zero_one_graphons():
    # W^2 = W pointwise for 0/1-valued kernels
    zero_one = [graphon_by_name("paper-w2"),
                empirical_graphon(random_graph(10, 0.5, seed=3))]
    for w in zero_one:
        for h in (K2, K3):
            for pa in h.ordered_edges()[:2]:
                weak = hom_density(edge_join(h, pa, h, pa, "weak"), w)
                strong = hom_density(edge_join(h, pa, h, pa, "strong"), w)
                assert weak == pytest.approx(strong, abs=1e-12)


@pytest.mark.parametrize("w", GRAPHONS, ids=lambda w: w.name)
@pytest.mark.parametrize("h", (K2, K3, K12), ids=["k2", "k3", "k12"])
def test_degree_identity_on_grid(w, h):
    # row means of the 2-point kernel equal ((k-1)/(2|Aut|)) sum_a t_a(x)
    m = 48
    grid = (np.arange(m) + 0.5) / m
    kern = conditional_kernel_2pt(h, w, grid=m)
    rows = kern.values.mean(axis=1)
    target = (h.k - 1) / (2 * h.aut) * sum(
        conditional_1pt(h, a, grid, w) for a in range(1, h.k + 1))
    assert np.allclose(rows, target, atol=3.0 / m)


def test_constant_graphon_kernel_is_flat():
    w = constant_graphon(0.42)
    for h in (K2, K3, C4):
        kern = conditional_kernel_2pt(h, w, grid=16)
        d = h.k * (h.k - 1) / (2 * h.aut) * hom_density(h, w)
        assert np.allclose(kern.values.mean(axis=1), d, atol=1e-12)


def test_empirical_graphon_reproduces_all_maps_density():
    g = random_graph(11, 0.5, seed=4)
    w = empirical_graphon(g)
    a = g.adj_float()
    n = g.n
    assert hom_density(K2, w) == pytest.approx(a.sum() / n ** 2, abs=1e-12)
    assert hom_density(K12, w) == pytest.approx((a @ a).sum() / n ** 3, abs=1e-12)
    assert hom_density(K3, w) == pytest.approx(np.trace(a @ a @ a) / n ** 3, abs=1e-12)
    assert hom_density(C4, w) == pytest.approx(np.trace(a @ a @ a @ a) / n ** 4,
                                               abs=1e-12)
