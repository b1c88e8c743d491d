"""Graphon representations and the homomorphism-density calculus.

A graphon is a symmetric kernel W on [0,1]^2 with values in [0,1].  Two
concrete forms are supported: step functions (BlockGraphon, evaluated by
exact summation over block assignments) and smooth expressions
(ExpressionGraphon, integrated by composite Gauss-Legendre quadrature).
Empirical graphons of observed graphs are BlockGraphons with n equal blocks.

On top of plain densities t(F,W) this module provides the pinned-vertex
conditional densities, the 2-point conditional kernel, the regularity
functional R(H,W), and the limit-law covariance matrices built from join
densities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._elim import contract
from .motifs import Motif, MultiMotif, as_multimotif, vertex_join, edge_join, \
    MotifSizeError

QUAD_CELLS = 16
QUAD_DEGREE = 4
QUAD_TOL = 1e-6
_MAX_CELLS = 128


class QuadratureError(RuntimeError):
    """Quadrature failed to converge; register step-like kernels as Block."""


class Graphon:
    """Base class; subclasses supply pointwise evaluation and a quadrature rule."""

    name: str = "graphon"

    def eval(self, x, y):
        raise NotImplementedError

    def quad(self):
        """(nodes, weights) with sum(w_i f(x_i)) approximating integral of f."""
        raise NotImplementedError

    @property
    def exact(self) -> bool:
        """True when the quadrature rule integrates this kernel exactly."""
        return False

    def __call__(self, x, y):
        return self.eval(x, y)


class BlockGraphon(Graphon):
    """Step graphon: B blocks with given sizes and a symmetric value matrix."""

    def __init__(self, sizes, values, name: str | None = None):
        sizes = np.asarray(sizes, dtype=float)
        values = np.asarray(values, dtype=float)
        if sizes.ndim != 1 or np.any(sizes <= 0):
            raise ValueError("block sizes must be a vector of positive reals")
        if abs(sizes.sum() - 1.0) > 1e-12:
            raise ValueError(f"block sizes sum to {sizes.sum()!r}, not 1")
        b = len(sizes)
        if values.shape != (b, b):
            raise ValueError(f"value matrix shape {values.shape} != ({b},{b})")
        if not np.allclose(values, values.T, atol=1e-12):
            raise ValueError("value matrix is not symmetric")
        if values.min() < -1e-12 or values.max() > 1 + 1e-12:
            raise ValueError("values outside [0,1]")
        self.sizes = sizes
        self.values = np.clip(values, 0.0, 1.0)
        self.cum = np.cumsum(sizes)
        self.name = name or f"block[{b}]"

    @property
    def n_blocks(self) -> int:
        return len(self.sizes)

    @property
    def exact(self) -> bool:
        return True

    def block_of(self, x):
        """Block index of x in [0,1] with the ceiling convention of step graphons."""
        idx = np.searchsorted(self.cum, np.asarray(x), side="left")
        return np.clip(idx, 0, self.n_blocks - 1)

    def eval(self, x, y):
        bi = self.block_of(x)
        bj = self.block_of(y)
        return self.values[bi, bj]

    def quad(self):
        mids = self.cum - self.sizes / 2
        return mids, self.sizes.copy()


class ExpressionGraphon(Graphon):
    """Graphon given by a vectorized expression W(x,y).

    Integrals use composite Gauss-Legendre quadrature: `cells` equal cells per
    axis with `degree` nodes each (default 16*4 = 64 points per axis), exact
    for polynomials up to degree 2*degree-1 within each cell.
    """

    def __init__(self, fn, name: str | None = None, cells: int = QUAD_CELLS,
                 degree: int = QUAD_DEGREE):
        self.fn = fn
        self.name = name or getattr(fn, "__name__", "expression")
        self.cells = int(cells)
        self.degree = int(degree)
        if self.cells < 1 or self.degree < 1:
            raise ValueError("cells and degree must be positive")
        self._spot_check()

    def _spot_check(self):
        rng = np.random.default_rng(202306)
        x = rng.random(64)
        y = rng.random(64)
        wxy = np.asarray(self.fn(x, y), dtype=float)
        wyx = np.asarray(self.fn(y, x), dtype=float)
        if not np.allclose(wxy, wyx, atol=1e-9):
            raise ValueError(f"graphon {self.name!r} is not symmetric")
        if wxy.min() < -1e-9 or wxy.max() > 1 + 1e-9:
            raise ValueError(f"graphon {self.name!r} takes values outside [0,1]")

    def eval(self, x, y):
        return np.clip(np.asarray(self.fn(x, y), dtype=float), 0.0, 1.0)

    def with_cells(self, cells: int) -> "ExpressionGraphon":
        out = ExpressionGraphon.__new__(ExpressionGraphon)
        out.fn, out.name, out.cells, out.degree = self.fn, self.name, int(cells), self.degree
        return out

    def quad(self):
        x, w = np.polynomial.legendre.leggauss(self.degree)
        x01 = (x + 1) / 2
        w01 = w / 2
        width = 1.0 / self.cells
        nodes = (np.arange(self.cells)[:, None] * width + x01[None, :] * width).ravel()
        weights = np.tile(w01 * width, self.cells)
        return nodes, weights


def empirical_block_graphon(adjacency: np.ndarray, name: str = "empirical") -> BlockGraphon:
    """Step graphon of an observed graph: n equal blocks, 0/1 values."""
    n = adjacency.shape[0]
    return BlockGraphon(np.full(n, 1.0 / n), adjacency.astype(float), name=name)


# -- sampling -----------------------------------------------------------------

def sample_graph(w: Graphon, n: int, seed):
    """W-random graph on n vertices: U_i iid uniform, then independent edge flips.

    Deterministic given the seed (numpy PCG64 stream; uniforms for the latent
    positions first, then one uniform per vertex pair in row-major order).
    """
    from .counting import Graph

    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    p = np.asarray(w.eval(u[:, None], u[None, :]), dtype=float)
    coins = rng.random((n, n))
    upper = np.triu(coins < p, k=1)
    adj = (upper | upper.T).astype(np.uint8)
    return Graph(adj, latents=u)


# -- homomorphism densities ---------------------------------------------------

def _hom_sum(mm: MultiMotif, w: Graphon, nodes, weights, pins=None):
    """Weighted homomorphism sum of mm in w; pinned vertices become result axes.

    pins: dict vertex -> 1-D array of evaluation points; the result is indexed
    by the pinned vertices in dict order (scalar when pins is empty).
    """
    pins = pins or {}
    q = len(nodes)
    domains = {}
    for v in range(1, mm.k + 1):
        domains[v] = len(pins[v]) if v in pins else q
    factors = []
    for v in range(1, mm.k + 1):
        if v not in pins:
            factors.append(((v,), weights))
    for (u, v), mult in mm.edges:
        xu = pins[u] if u in pins else nodes
        xv = pins[v] if v in pins else nodes
        mat = np.asarray(w.eval(xu[:, None], xv[None, :]), dtype=float)
        factors.append(((u, v), mat ** mult if mult > 1 else mat))
    keep = tuple(pins.keys())
    out = contract(factors, domains, keep=keep)
    return out if keep else float(out)


def hom_density(f: Motif | MultiMotif, w: Graphon, check: bool = True) -> float:
    """Homomorphism density t(f, w); multigraph edges multiply repeated kernels.

    Block graphons are summed exactly; expression graphons are integrated by
    composite Gauss-Legendre quadrature with a cell-doubling convergence check
    (relative change below 1e-6), which `check=False` disables.
    """
    mm = as_multimotif(f)
    if isinstance(w, ExpressionGraphon) and check:
        cells = w.cells
        prev = _hom_sum(mm, w, *w.with_cells(cells).quad())
        while True:
            cells *= 2
            cur = _hom_sum(mm, w, *w.with_cells(cells).quad())
            if abs(cur - prev) <= QUAD_TOL * max(abs(cur), 1e-12):
                return cur
            if cells >= _MAX_CELLS:
                raise QuadratureError(
                    f"density of {mm!r} in {w.name!r} did not converge at "
                    f"{cells * w.degree} points per axis; use a BlockGraphon "
                    f"for step-like kernels")
            prev = cur
    nodes, weights = w.quad()
    return _hom_sum(mm, w, nodes, weights)


def conditional_1pt(h: Motif | MultiMotif, a: int, x, w: Graphon):
    """1-point conditional density t_a(x, h, w) with vertex a pinned at x."""
    mm = as_multimotif(h)
    if not (1 <= a <= mm.k):
        raise ValueError(f"vertex {a} not in 1..{mm.k}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    nodes, weights = w.quad()
    out = _hom_sum(mm, w, nodes, weights, pins={a: xs})
    return out[0] if np.isscalar(x) or np.asarray(x).ndim == 0 else out


def tbar_1pt(h: Motif | MultiMotif, x, w: Graphon):
    """Vertex-averaged conditional density: mean of t_a(x,h,w) over a."""
    mm = as_multimotif(h)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    total = np.zeros(len(xs))
    nodes, weights = w.quad()
    for a in range(1, mm.k + 1):
        total += _hom_sum(mm, w, nodes, weights, pins={a: xs})
    total /= mm.k
    return total[0] if np.isscalar(x) or np.asarray(x).ndim == 0 else total


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric kernel on a grid: discretized W_H or the empirical 2-point matrix."""

    values: np.ndarray
    motif: Motif
    kind: str = "graphon"

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"kernel matrix must be square, got {v.shape}")

    @property
    def m(self) -> int:
        return self.values.shape[0]


def kernel_bound(h: Motif) -> float:
    """Upper bound k(k-1)/(2|Aut|) for the 2-point conditional kernel of h."""
    return h.k * (h.k - 1) / (2 * h.aut)


def degree_constant(h: Motif, w: Graphon) -> float:
    """d_{W_H} = |V|(|V|-1)/(2|Aut|) t(h,w): the kernel's degree when w is h-regular."""
    return kernel_bound(h) * hom_density(h, w)


def conditional_kernel_2pt(h: Motif, w: Graphon, grid: int = 64) -> KernelMatrix:
    """2-point conditional kernel W_H on an m x m midpoint grid.

    W_H(x,y) = (1/(2|Aut(h)|)) sum over ordered vertex pairs a != b of
    t_{a,b}(x,y,h,w); entries lie in [0, k(k-1)/(2|Aut|)].
    """
    if grid < 2:
        raise ValueError(f"need grid >= 2, got {grid}")
    mm = as_multimotif(h)
    g = (np.arange(grid) + 0.5) / grid
    nodes, weights = w.quad()
    total = np.zeros((grid, grid))
    for a in range(1, mm.k + 1):
        for b in range(a + 1, mm.k + 1):
            tab = _hom_sum(mm, w, nodes, weights, pins={a: g, b: g})
            total += tab + tab.T          # t_{b,a}(x,y) = t_{a,b}(y,x)
    vals = total / (2 * h.aut)
    vals = (vals + vals.T) / 2
    return KernelMatrix(vals, h, kind="graphon")


# -- regularity and covariance matrices ---------------------------------------

def _join_density_cached(join, w, cache):
    try:
        key = join.canonical_key()
    except MotifSizeError:
        key = None
    if key is not None and key in cache:
        return cache[key]
    val = hom_density(join, w)
    if key is not None:
        cache[key] = val
    return val


def regularity_R_graphon(h: Motif, w: Graphon, clamp: bool = True) -> float:
    """R(h,w) = sum_{a,b} t(h (+)_{a,b} h, w) - |V|^2 t(h,w)^2; zero iff h-regular.

    Floating point can leave tiny negatives for regular graphons, so the value
    is clamped at 0 by default; clamp=False returns the raw value.
    """
    cache: dict = {}
    s = 0.0
    for a in range(1, h.k + 1):
        for b in range(a, h.k + 1):
            val = _join_density_cached(vertex_join(h, a, h, b), w, cache)
            s += val if a == b else 2 * val
    t = hom_density(h, w)
    raw = s - h.k ** 2 * t ** 2
    if clamp:
        return max(raw, 0.0)
    return raw


@dataclass(frozen=True)
class CovMatrix:
    """Covariance matrix over a motif list, built from join densities."""

    labels: tuple[Motif, ...]
    entries: np.ndarray

    def __post_init__(self):
        e = self.entries
        if e.shape != (len(self.labels), len(self.labels)):
            raise ValueError(f"entries shape {e.shape} != motif count {len(self.labels)}")
        if not np.allclose(e, e.T, atol=1e-9):
            raise ValueError("covariance matrix is not symmetric")
        if np.any(np.diag(e) < -1e-9):
            raise ValueError("covariance matrix has a negative diagonal entry")

    @property
    def r(self) -> int:
        return len(self.labels)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())


def sigma_matrix(motifs, w: Graphon) -> CovMatrix:
    """Gaussian-block covariance for regular motifs from weak/strong edge joins.

    sigma_ij = (1/(2|Aut_i||Aut_j|)) sum over ordered edges (a,b) of H_i and
    (c,d) of H_j of [t(weak join) - t(strong join)].
    """
    motifs = tuple(motifs)
    if not motifs:
        raise ValueError("empty motif list")
    cache: dict = {}
    r = len(motifs)
    out = np.zeros((r, r))
    for i in range(r):
        for j in range(i, r):
            hi, hj = motifs[i], motifs[j]
            s = 0.0
            for pa in hi.ordered_edges():
                for pb in hj.ordered_edges():
                    weak = _join_density_cached(edge_join(hi, pa, hj, pb, "weak"), w, cache)
                    strong = _join_density_cached(edge_join(hi, pa, hj, pb, "strong"), w, cache)
                    s += weak - strong
            out[i, j] = out[j, i] = s / (2 * hi.aut * hj.aut)
    return CovMatrix(motifs, out)


def gamma_matrix(motifs, w: Graphon) -> CovMatrix:
    """Gaussian covariance for irregular motifs from vertex-join densities.

    tau_ij = (1/(|Aut_i||Aut_j|)) [sum_{a,b} t(H_i (+)_{a,b} H_j, w)
             - |V_i||V_j| t(H_i,w) t(H_j,w)]; the diagonal is R(H_i,w)/|Aut_i|^2.
    """
    motifs = tuple(motifs)
    if not motifs:
        raise ValueError("empty motif list")
    cache: dict = {}
    dens = [hom_density(h, w) for h in motifs]
    r = len(motifs)
    out = np.zeros((r, r))
    for i in range(r):
        for j in range(i, r):
            hi, hj = motifs[i], motifs[j]
            s = 0.0
            for a in range(1, hi.k + 1):
                for b in range(1, hj.k + 1):
                    s += _join_density_cached(vertex_join(hi, a, hj, b), w, cache)
            val = (s - hi.k * hj.k * dens[i] * dens[j]) / (hi.aut * hj.aut)
            out[i, j] = out[j, i] = val
    return CovMatrix(motifs, out)


# -- builtin graphons and file I/O --------------------------------------------

def _w_affine(x, y):
    return (np.asarray(x) + np.asarray(y)) / 2


def _w_product(x, y):
    return np.asarray(x) * np.asarray(y)


def _paper_w2() -> BlockGraphon:
    values = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float)
    return BlockGraphon(np.full(3, 1 / 3), values, name="paper-w2")


def _paper_w3() -> BlockGraphon:
    # Two complete tripartite groups {1,2,3} and {4,5,6} plus a half-density
    # bipartite link between blocks 3 and 4; gives (t(K2), t(K3)) = (13/36, 1/18).
    v = np.zeros((6, 6))
    for grp in ((0, 1, 2), (3, 4, 5)):
        for i in grp:
            for j in grp:
                if i != j:
                    v[i, j] = 1.0
    v[2, 3] = v[3, 2] = 0.5
    return BlockGraphon(np.full(6, 1 / 6), v, name="paper-w3")


def bipartite_graphon(p: float) -> BlockGraphon:
    return BlockGraphon([0.5, 0.5], [[0.0, p], [p, 0.0]], name=f"bipartite:{p:g}")


def constant_graphon(p: float) -> BlockGraphon:
    if not (0 <= p <= 1):
        raise ValueError(f"edge probability {p} outside [0,1]")
    return BlockGraphon([1.0], [[p]], name=f"const:{p:g}")


def graphon_by_name(spec: str) -> Graphon:
    """Resolve a graphon spec: builtin name, "const:p"/"bipartite:p", or JSON path."""
    s = spec.strip()
    low = s.lower()
    if low.startswith("const:"):
        return constant_graphon(float(low.split(":", 1)[1]))
    if low.startswith("bipartite:"):
        return bipartite_graphon(float(low.split(":", 1)[1]))
    if low in ("product", "wminus", "w-"):
        return ExpressionGraphon(_w_product, name="product")
    if low in ("affine", "paper-w1", "w1"):
        return ExpressionGraphon(_w_affine, name="affine")
    if low in ("wplus", "w+"):
        return bipartite_graphon(0.5)
    if low in ("paper-w2", "w2"):
        return _paper_w2()
    if low in ("paper-w3", "w3"):
        return _paper_w3()
    if s.endswith(".json"):
        return load_block_graphon(s)
    raise ValueError(f"unknown graphon spec {spec!r}")


def load_block_graphon(path: str) -> BlockGraphon:
    """Load a block graphon from JSON: {"sizes": [...], "values": [[...]]}."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "sizes" not in data or "values" not in data:
        raise ValueError(f"{path}: expected a JSON object with 'sizes' and 'values'")
    return BlockGraphon(data["sizes"], data["values"], name=path)


def save_block_graphon(w: BlockGraphon, path: str) -> None:
    with open(path, "w") as fh:
        json.dump({"sizes": w.sizes.tolist(), "values": w.values.tolist()}, fh)
