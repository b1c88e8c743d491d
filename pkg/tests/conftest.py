import numpy as np
import pytest

from graphonstat import BlockGraphon, Graph, graphon_by_name


@pytest.fixture(scope="session")
def w_affine():
    return graphon_by_name("paper-w1")


@pytest.fixture(scope="session")
def w_two_community():
    return graphon_by_name("paper-w2")


@pytest.fixture(scope="session")
def w_six_block():
    return graphon_by_name("paper-w3")


@pytest.fixture(scope="session")
def w_product():
    return graphon_by_name("wminus")


@pytest.fixture(scope="session")
def w_bipartite_half():
    return graphon_by_name("wplus")


@pytest.fixture(scope="session")
def w_const_half():
    return graphon_by_name("const:0.5")


# degree-regular but 4-cycle-irregular: complete bipartite K_{5,5} next to a
# Petersen graph, block masses chosen so both parts have the same degree
@pytest.fixture(scope="session")
def w_degree_regular_c4_irregular():
    a = np.zeros((20, 20))
    for i in range(5):
        for j in range(5, 10):
            a[i, j] = a[j, i] = 1
    outer = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]
    inner = [(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]
    for u, v in outer:
        a[10 + u, 10 + v] = a[10 + v, 10 + u] = 1
    for u, v in inner:
        a[15 + u, 15 + v] = a[15 + v, 15 + u] = 1
    for i in range(5):
        a[10 + i, 15 + i] = a[15 + i, 10 + i] = 1
    sizes = np.concatenate([np.full(10, 3 / 80), np.full(10, 5 / 80)])
    return BlockGraphon(sizes, a, name="k55-plus-petersen")


# 4-cycle-regular but degree-irregular 4-block graphon (found by numeric
# solve of diag(B(SB)^3) = const with a forced degree gap; the 4-cycle
# regularity functional evaluates below 1e-15 on it)
@pytest.fixture(scope="session")
def w_c4_regular_degree_irregular():
    sizes = [0.134948311979362, 0.45269466349605575,
             0.13126382963258737, 0.28109319489199475]
    values = [
        [0.37586254769354943, 0.82063817923293325, 0.32354465689636625,
         0.63523959474156089],
        [0.82063817923293325, 0.00057554791087480021, 0.99970089515802585,
         0.99975001635242511],
        [0.32354465689636625, 0.99970089515802585, 0.5481518268333655,
         0.005469569630745557],
        [0.63523959474156089, 0.99975001635242511, 0.005469569630745557,
         0.00028539593977372935]]
    return BlockGraphon(sizes, values, name="c4-regular-fixture")


def random_graph(n: int, p: float, seed) -> Graph:
    rng = np.random.default_rng(seed)
    upper = np.triu((rng.random((n, n)) < p).astype(np.uint8), 1)
    return Graph(upper + upper.T)


@pytest.fixture
def small_graph():
    # 6 vertices: a triangle 0-1-2, a pendant 3 on 0, an edge 4-5
    return Graph.from_edges(6, [(0, 1), (0, 2), (1, 2), (0, 3), (4, 5)])
